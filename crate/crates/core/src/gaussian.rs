//! Centered pure Gaussian states: closed-form tomograms and Wigner functions, covariance-ellipse
//! chords, and recovery of the covariance triple from three tomograms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::metaplectic::RotationParams;
use crate::numerics::{Axis, Grid1D, SampledWavefunction};
use crate::radon::{Route, Tomogram};
use crate::wigner::WignerMap;

/// Relative tolerance of the purity relation `σxx σpp − σxp² = ħ²/4`.
pub const SATURATION_TOL: f64 = 1e-10;

/// `ψ(x) = (2πσxx)^{-1/4} exp(−x²/4σxx) exp(iσxp x²/2ħσxx)`, described by its covariances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianState {
    sigma_xx: f64,
    sigma_pp: f64,
    sigma_xp: f64,
    hbar: f64,
}

impl GaussianState {
    /// Validates positivity and the purity relation.
    pub fn new(sigma_xx: f64, sigma_pp: f64, sigma_xp: f64, hbar: f64) -> Result<Self> {
        if !(sigma_xx > 0.0 && sigma_pp > 0.0 && hbar > 0.0) || !sigma_xp.is_finite() {
            return Err(Error::Domain(format!(
                "need sigma_xx > 0, sigma_pp > 0, hbar > 0 (got {sigma_xx}, {sigma_pp}, {hbar})"
            )));
        }
        let det = sigma_xx * sigma_pp - sigma_xp * sigma_xp;
        let target = 0.25 * hbar * hbar;
        if (det - target).abs() > SATURATION_TOL * (sigma_xx * sigma_pp) {
            return Err(Error::Domain(format!(
                "covariances are not those of a pure state: det = {det}, hbar^2/4 = {target}"
            )));
        }
        Ok(Self {
            sigma_xx,
            sigma_pp,
            sigma_xp,
            hbar,
        })
    }

    /// The pure state with the given position variance and covariance; `σpp` follows from purity.
    pub fn pure(sigma_xx: f64, sigma_xp: f64, hbar: f64) -> Result<Self> {
        if !(sigma_xx > 0.0 && hbar > 0.0) || !sigma_xp.is_finite() {
            return Err(Error::Domain(format!(
                "need sigma_xx > 0 and hbar > 0 (got {sigma_xx}, {hbar})"
            )));
        }
        let sigma_pp = (0.25 * hbar * hbar + sigma_xp * sigma_xp) / sigma_xx;
        Self::new(sigma_xx, sigma_pp, sigma_xp, hbar)
    }

    /// `σxx = σpp = ħ/2`.
    pub fn ground(hbar: f64) -> Result<Self> {
        Self::pure(0.5 * hbar, 0.0, hbar)
    }

    pub fn sigma_xx(&self) -> f64 {
        self.sigma_xx
    }

    pub fn sigma_pp(&self) -> f64 {
        self.sigma_pp
    }

    pub fn sigma_xp(&self) -> f64 {
        self.sigma_xp
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `[[σxx, σxp], [σxp, σpp]]`, row-major.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        [[self.sigma_xx, self.sigma_xp], [self.sigma_xp, self.sigma_pp]]
    }

    /// The state with the opposite covariance: same position and momentum densities.
    pub fn twin(&self) -> Self {
        Self {
            sigma_xp: -self.sigma_xp,
            ..*self
        }
    }

    /// `σ_X = μ²σxx + 2μνσxp + ν²σpp`, the variance of `μx̂ + νp̂`.
    pub fn tomogram_variance(&self, mu: f64, nu: f64) -> Result<f64> {
        RotationParams::new(mu, nu)?;
        Ok(mu * mu * self.sigma_xx + 2.0 * mu * nu * self.sigma_xp + nu * nu * self.sigma_pp)
    }

    /// Whether `grid` spans at least `8√σxx`.
    pub fn fits_grid(&self, grid: &Grid1D) -> bool {
        grid.x_max() - grid.x_min() >= 8.0 * self.sigma_xx.sqrt()
    }

    pub fn amplitude(&self, x: f64) -> Complex64 {
        let norm = (2.0 * PI * self.sigma_xx).powf(-0.25);
        let modulus = norm * (-x * x / (4.0 * self.sigma_xx)).exp();
        Complex64::from_polar(modulus, self.sigma_xp * x * x / (2.0 * self.hbar * self.sigma_xx))
    }

    /// Bivariate normal density with covariance `Σ`.
    pub fn wigner_at(&self, x: f64, p: f64) -> f64 {
        let det = self.sigma_xx * self.sigma_pp - self.sigma_xp * self.sigma_xp;
        let q = (self.sigma_pp * x * x - 2.0 * self.sigma_xp * x * p + self.sigma_xx * p * p) / det;
        (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
    }
}

/// Samples the state on `grid`; the grid must carry the same ħ. Use [`GaussianState::fits_grid`]
/// to detect truncation.
pub fn gaussian_wavefunction(state: &GaussianState, grid: Grid1D) -> Result<SampledWavefunction> {
    if (grid.hbar() - state.hbar).abs() > 1e-15 * state.hbar {
        return Err(Error::Config(format!(
            "grid hbar {} differs from state hbar {}",
            grid.hbar(),
            state.hbar
        )));
    }
    Ok(SampledWavefunction::from_fn(grid, |x| state.amplitude(x)))
}

fn normal_density(x: f64, variance: f64) -> f64 {
    (-x * x / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt()
}

/// Closed-form tomogram: the centered normal density of variance [`GaussianState::tomogram_variance`].
pub fn gaussian_tomogram(state: &GaussianState, mu: f64, nu: f64, axis: Axis) -> Result<Tomogram> {
    let params = RotationParams::new(mu, nu)?;
    let var = state.tomogram_variance(mu, nu)?;
    let values = axis.points().iter().map(|x| normal_density(*x, var)).collect();
    Tomogram::new(params, axis, values, state.hbar, Route::ClosedForm)
}

/// Closed-form Wigner function tabulated on the given axes.
pub fn gaussian_wigner(state: &GaussianState, x_axis: Axis, p_axis: Axis) -> WignerMap {
    let s = *state;
    WignerMap::from_fn(x_axis, p_axis, state.hbar, move |x, p| s.wigner_at(x, p))
}

/// Which coordinate parametrizes a chord.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChordVariable {
    X,
    P,
}

/// Intersection of the covariance ellipse `½ zᵀΣ⁻¹z ≤ 1` with the line `μx + νp = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseChord {
    pub mu: f64,
    pub nu: f64,
    /// The chord is `|t| ≤ half_width` in the parametrizing variable.
    pub half_width: f64,
    pub variable: ChordVariable,
    /// Coefficient `c` of `c t² ≤ ħ²/2`.
    pub coefficient: f64,
}

/// `σpp + 2(μ/ν)σxp + (μ/ν)²σxx`, the chord coefficient in the `x` parametrization.
pub fn chord_coefficient(state: &GaussianState, mu: f64, nu: f64) -> Result<f64> {
    if nu == 0.0 {
        return Err(Error::Domain("the x-parametrized chord needs nu != 0".into()));
    }
    let r = mu / nu;
    Ok(state.sigma_pp + 2.0 * r * state.sigma_xp + r * r * state.sigma_xx)
}

/// Chord of the covariance ellipse along `μx + νp = 0`, parametrized by `x` when `ν ≠ 0` and by
/// `p` on the momentum axis `ν = 0`.
pub fn ellipse_chord(state: &GaussianState, mu: f64, nu: f64) -> Result<EllipseChord> {
    RotationParams::new(mu, nu)?;
    let (coefficient, variable) = if nu == 0.0 {
        (state.sigma_xx, ChordVariable::P)
    } else {
        (chord_coefficient(state, mu, nu)?, ChordVariable::X)
    };
    if !(coefficient > 0.0) {
        return Err(Error::Consistency(format!(
            "chord coefficient {coefficient} is not positive for a valid state"
        )));
    }
    Ok(EllipseChord {
        mu,
        nu,
        half_width: state.hbar / (2.0 * coefficient).sqrt(),
        variable,
        coefficient,
    })
}

/// The chord coefficient equals `σ_X / ν²` within `tol` (relative).
pub fn chord_matches_tomogram_variance(state: &GaussianState, mu: f64, nu: f64, tol: f64) -> Result<bool> {
    let c = chord_coefficient(state, mu, nu)?;
    let v = state.tomogram_variance(mu, nu)? / (nu * nu);
    Ok((c - v).abs() <= tol * c.abs().max(v.abs()))
}

/// Moments of a tomogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TomogramMoments {
    pub mass: f64,
    pub mean: f64,
    /// From the window `|X − mean| ≤ 6σ`, corrected for the normal mass outside it.
    pub variance: f64,
    /// Full-axis Riemann sum.
    pub raw_variance: f64,
}

const TRUNCATION_SIGMAS: f64 = 6.0;

fn std_normal_pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * PI).sqrt()
}

fn std_normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / std::f64::consts::SQRT_2)
}

/// `E[(X−m)² | a ≤ X ≤ b] / σ²` for `X ~ N(m, σ²)` with `α = (a−m)/σ`, `β = (b−m)/σ`.
fn truncated_second_moment_factor(alpha: f64, beta: f64) -> f64 {
    let z = std_normal_cdf(beta) - std_normal_cdf(alpha);
    1.0 + (alpha * std_normal_pdf(alpha) - beta * std_normal_pdf(beta)) / z
}

/// Mass, mean and variance of a tomogram.
pub fn tomogram_moments(t: &Tomogram) -> Result<TomogramMoments> {
    let axis = t.axis();
    let h = axis.step.abs();
    let values = t.values();
    let mass = h * values.iter().sum::<f64>();
    if !(mass > 0.0) {
        return Err(Error::Domain("tomogram has no mass".into()));
    }
    let mean = h * values.iter().enumerate().map(|(k, v)| axis.point(k) * v).sum::<f64>() / mass;
    let raw_variance = h
        * values
            .iter()
            .enumerate()
            .map(|(k, v)| (axis.point(k) - mean).powi(2) * v)
            .sum::<f64>()
        / mass;

    let half = TRUNCATION_SIGMAS * raw_variance.sqrt();
    let (mut lo_edge, mut hi_edge) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut m0, mut m2) = (0.0, 0.0);
    for (k, v) in values.iter().enumerate() {
        let x = axis.point(k);
        if (x - mean).abs() <= half {
            m0 += v;
            m2 += (x - mean).powi(2) * v;
            lo_edge = lo_edge.min(x - 0.5 * h);
            hi_edge = hi_edge.max(x + 0.5 * h);
        }
    }
    let second = m2 / m0;
    let mut variance = raw_variance;
    for _ in 0..4 {
        let sigma = variance.sqrt();
        variance = second / truncated_second_moment_factor((lo_edge - mean) / sigma, (hi_edge - mean) / sigma);
    }
    Ok(TomogramMoments {
        mass,
        mean,
        variance,
        raw_variance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CovarianceSign {
    Plus,
    Minus,
    Moot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliOptions {
    /// Relative tolerance for the purity relation and the model fit.
    pub tolerance: f64,
}

impl Default for PauliOptions {
    fn default() -> Self {
        Self { tolerance: 1e-7 }
    }
}

/// Outcome of the reconstruction with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauliReport {
    pub state: GaussianState,
    pub sign: CovarianceSign,
    /// `σxx σpp − ħ²/4` before clamping at zero.
    pub saturation_residual: f64,
    /// Observed variance of the extra tomogram.
    pub observed_extra: f64,
    /// Predicted variances `μ²σxx ± 2μν|σxp| + ν²σpp`.
    pub predicted_plus: f64,
    pub predicted_minus: f64,
    /// `|V+ − V−|`: how far apart the two candidate predictions are.
    pub sign_margin: f64,
    /// Absolute tolerance the margin is measured against.
    pub tolerance: f64,
    /// Misfit of the chosen prediction.
    pub extra_residual: f64,
}

/// Recovers `(σxx, σpp, σxp)` of a pure centered Gaussian from its position tomogram, momentum
/// tomogram and one tomogram at `(μ, ν)` with `μν ≠ 0`.
pub fn pauli_reconstruct(t_x: &Tomogram, t_p: &Tomogram, t_extra: &Tomogram) -> Result<PauliReport> {
    pauli_reconstruct_with(t_x, t_p, t_extra, &PauliOptions::default())
}

pub fn pauli_reconstruct_with(
    t_x: &Tomogram,
    t_p: &Tomogram,
    t_extra: &Tomogram,
    opts: &PauliOptions,
) -> Result<PauliReport> {
    if t_x.nu() != 0.0 || t_p.mu() != 0.0 {
        return Err(Error::Domain(
            "the first two tomograms must be taken at (mu, 0) and (0, nu)".into(),
        ));
    }
    let (mu, nu) = (t_extra.mu(), t_extra.nu());
    if mu * nu == 0.0 {
        return Err(Error::Domain("the extra tomogram needs mu * nu != 0".into()));
    }
    let hbar = t_x.hbar();
    if (t_p.hbar() - hbar).abs() > 1e-15 * hbar || (t_extra.hbar() - hbar).abs() > 1e-15 * hbar {
        return Err(Error::Shape("tomograms carry different hbar".into()));
    }
    let tol = opts.tolerance;
    let sxx = tomogram_moments(t_x)?.variance / (t_x.mu() * t_x.mu());
    let spp = tomogram_moments(t_p)?.variance / (t_p.nu() * t_p.nu());
    let observed = tomogram_moments(t_extra)?.variance;

    let scale = sxx * spp;
    let residual = scale - 0.25 * hbar * hbar;
    if residual < -tol * scale {
        return Err(Error::ModelMismatch(format!(
            "sigma_xx * sigma_pp = {scale} is below hbar^2/4; the tomograms are not from a state"
        )));
    }
    let magnitude = residual.max(0.0).sqrt();
    let base = mu * mu * sxx + nu * nu * spp;
    let predicted_plus = base + 2.0 * mu * nu * magnitude;
    let predicted_minus = base - 2.0 * mu * nu * magnitude;
    let sign_margin = (predicted_plus - predicted_minus).abs();
    let abs_tol = tol * observed;
    // Covariance estimated linearly from the extra tomogram alone.
    let linear = (observed - base) / (2.0 * mu * nu);

    let (sign, sxp, extra_residual) = if residual <= tol * scale && linear.abs() <= abs_tol / (2.0 * (mu * nu).abs()) {
        (CovarianceSign::Moot, 0.0, (observed - base).abs())
    } else {
        if sign_margin <= abs_tol {
            return Err(Error::Ambiguous(format!(
                "both signs of sigma_xp fit the extra tomogram (margin {sign_margin:e}, tolerance {abs_tol:e})"
            )));
        }
        if (linear * linear - residual.max(0.0)).abs() > tol * scale {
            return Err(Error::ModelMismatch(format!(
                "extra tomogram implies |sigma_xp| = {}, purity implies {magnitude}; not a pure Gaussian",
                linear.abs()
            )));
        }
        let (rp, rm) = ((observed - predicted_plus).abs(), (observed - predicted_minus).abs());
        if rp <= rm {
            (CovarianceSign::Plus, magnitude, rp)
        } else {
            (CovarianceSign::Minus, -magnitude, rm)
        }
    };
    let state = GaussianState {
        sigma_xx: sxx,
        sigma_pp: spp,
        sigma_xp: sxp,
        hbar,
    };
    Ok(PauliReport {
        state,
        sign,
        saturation_residual: residual,
        observed_extra: observed,
        predicted_plus,
        predicted_minus,
        sign_margin,
        tolerance: abs_tol,
        extra_residual,
    })
}
