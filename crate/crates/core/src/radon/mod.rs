//! Symplectic Radon transform: tomograms by three independent routes and the inverse by
//! ramp-filtered back-projection.

mod format;
mod forward;
mod inverse;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use format::{load_tomograms, save_tomograms, BlockEntry, BlockFormat, TomogramManifest};
pub use forward::{
    chirp_oversampling, radon_chirp_fft, radon_chirp_fft_on, radon_line_integral,
    radon_metaplectic, radon_metaplectic_on,
};
pub use inverse::{inverse_radon, inverse_radon_with, FbpOptions, MIN_ANGLES, RECOMMENDED_ANGLES};

use crate::error::{Error, Result};
use crate::metaplectic::RotationParams;
use crate::numerics::{Axis, SampledWavefunction};

/// Values below this are treated as round-off and clipped to zero.
pub const NEGATIVITY_FLOOR: f64 = -1e-10;

/// How a tomogram was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Metaplectic,
    ChirpFft,
    LineIntegral,
    ClosedForm,
    Mixture,
    Loaded,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Metaplectic => "metaplectic",
            Route::ChirpFft => "chirp-fft",
            Route::LineIntegral => "line-integral",
            Route::ClosedForm => "closed-form",
            Route::Mixture => "mixture",
            Route::Loaded => "loaded",
        }
    }
}

/// One Radon slice `R(X; μ, ν)` sampled on a uniform `X` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Tomogram {
    params: RotationParams,
    axis: Axis,
    values: Vec<f64>,
    hbar: f64,
    route: Route,
    warning: bool,
}

impl Tomogram {
    /// Validates non-negativity down to [`NEGATIVITY_FLOOR`] and clips the round-off to zero.
    pub fn new(params: RotationParams, axis: Axis, values: Vec<f64>, hbar: f64, route: Route) -> Result<Self> {
        if values.len() != axis.len {
            return Err(Error::Shape(format!(
                "{} tomogram values for an axis of {} points",
                values.len(),
                axis.len
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= NEGATIVITY_FLOOR)) {
            return Err(Error::Domain(format!("tomogram value {v} is negative or not finite")));
        }
        let values = values.into_iter().map(|v| v.max(0.0)).collect();
        Ok(Self {
            params,
            axis,
            values,
            hbar,
            route,
            warning: false,
        })
    }

    pub(crate) fn with_warning(mut self, warning: bool) -> Self {
        self.warning = warning;
        self
    }

    pub fn params(&self) -> RotationParams {
        self.params
    }

    pub fn mu(&self) -> f64 {
        self.params.mu()
    }

    pub fn nu(&self) -> f64 {
        self.params.nu()
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// Accuracy warning: the state was truncated by its grid, a chirp was under-resolved, or a
    /// line left the tabulated Wigner map.
    pub fn warning(&self) -> bool {
        self.warning
    }

    /// `∫ R dX` by the Riemann sum.
    pub fn mass(&self) -> f64 {
        self.axis.step.abs() * self.values.iter().sum::<f64>()
    }

    pub fn linf_distance(&self, other: &Tomogram) -> Result<f64> {
        if !self.axis.approx_eq(&other.axis, 1e-12) {
            return Err(Error::Shape("tomograms sampled on different X axes".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Convex combination of tomograms taken at the same `(μ, ν)` on the same axis.
pub fn mix_tomograms(weights: &[f64], tomos: &[Tomogram]) -> Result<Tomogram> {
    if weights.len() != tomos.len() || tomos.is_empty() {
        return Err(Error::Shape(format!(
            "{} weights for {} tomograms",
            weights.len(),
            tomos.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::Domain("mixture weights must be non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("mixture weights sum to {total}, not 1")));
    }
    let first = &tomos[0];
    for t in &tomos[1..] {
        if !t.axis.approx_eq(&first.axis, 1e-12) {
            return Err(Error::Shape("tomograms sampled on different X axes".into()));
        }
        let (a, b) = (t.params, first.params);
        if (a.mu() - b.mu()).abs() > 1e-12 * b.lambda() || (a.nu() - b.nu()).abs() > 1e-12 * b.lambda() {
            return Err(Error::Shape("tomograms taken at different (mu, nu)".into()));
        }
        if (t.hbar - first.hbar).abs() > 1e-15 * first.hbar {
            return Err(Error::Shape("tomograms with different hbar".into()));
        }
    }
    let mut values = vec![0.0; first.axis.len];
    for (w, t) in weights.iter().zip(tomos) {
        for (acc, v) in values.iter_mut().zip(&t.values) {
            *acc += w * v;
        }
    }
    Ok(Tomogram {
        params: first.params,
        axis: first.axis,
        values,
        hbar: first.hbar,
        route: Route::Mixture,
        warning: tomos.iter().any(|t| t.warning),
    })
}

/// Tomograms at the unit directions `θ_k = θ_0 + kπ/K`, `0 ≤ θ_0 < π/K`, on a common axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TomogramSet {
    axis: Axis,
    hbar: f64,
    tomograms: Vec<Tomogram>,
}

impl TomogramSet {
    pub fn new(tomograms: Vec<Tomogram>) -> Result<Self> {
        let first = tomograms
            .first()
            .ok_or_else(|| Error::Domain("empty tomogram set".into()))?;
        let (axis, hbar) = (first.axis, first.hbar);
        let count = tomograms.len();
        let spacing = PI / count as f64;
        let theta0 = first.params.theta();
        for (k, t) in tomograms.iter().enumerate() {
            if !t.axis.approx_eq(&axis, 1e-12) {
                return Err(Error::Shape("tomograms in a set must share one X axis".into()));
            }
            if (t.hbar - hbar).abs() > 1e-15 * hbar {
                return Err(Error::Shape("tomograms in a set must share one hbar".into()));
            }
            if (t.params.lambda() - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "set directions must be unit vectors (|(mu, nu)| = {})",
                    t.params.lambda()
                )));
            }
            let theta = t.params.theta();
            let expected = theta0 + k as f64 * spacing;
            if !(0.0..PI).contains(&theta) || (theta - expected).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "angles must be strictly increasing and equispaced on [0, pi): angle {k} is {theta}, expected {expected}"
                )));
            }
        }
        Ok(Self {
            axis,
            hbar,
            tomograms,
        })
    }

    /// Sweeps `count` equispaced angles over `[0, π)` on the state's own axis.
    pub fn from_state(psi: &SampledWavefunction, count: usize, route: Route) -> Result<Self> {
        if count == 0 {
            return Err(Error::Domain("angle count must be positive".into()));
        }
        let axis = psi.grid().axis();
        let params: Vec<RotationParams> = (0..count)
            .map(|k| RotationParams::from_angle(k as f64 * PI / count as f64))
            .collect();
        let tomograms = match route {
            Route::Metaplectic => {
                use rayon::prelude::*;
                params
                    .par_iter()
                    .map(|p| radon_metaplectic_on(psi, p.mu(), p.nu(), axis))
                    .collect::<Result<Vec<_>>>()?
            }
            Route::ChirpFft => {
                use rayon::prelude::*;
                params
                    .par_iter()
                    .map(|p| {
                        if p.nu() == 0.0 {
                            radon_metaplectic_on(psi, p.mu(), p.nu(), axis)
                        } else {
                            radon_chirp_fft_on(psi, p.mu(), p.nu(), axis)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            Route::LineIntegral => {
                let w = crate::wigner::wigner_transform(psi);
                params
                    .iter()
                    .map(|p| radon_line_integral(&w, p.mu(), p.nu(), axis))
                    .collect::<Result<Vec<_>>>()?
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "route {} cannot sweep a sampled state",
                    other.as_str()
                )))
            }
        };
        Self::new(tomograms)
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn tomograms(&self) -> &[Tomogram] {
        &self.tomograms
    }

    pub fn len(&self) -> usize {
        self.tomograms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tomograms.is_empty()
    }

    pub fn angles(&self) -> Vec<f64> {
        self.tomograms.iter().map(|t| t.params.theta()).collect()
    }

    /// Pointwise `a·self + b·other`, angle by angle.
    pub fn combine(&self, a: f64, other: &TomogramSet, b: f64) -> Result<TomogramSet> {
        if self.len() != other.len() {
            return Err(Error::Shape("tomogram sets with different angle counts".into()));
        }
        let tomograms = self
            .tomograms
            .iter()
            .zip(&other.tomograms)
            .map(|(x, y)| {
                let mut t = mix_tomograms(&[0.5, 0.5], &[x.clone(), y.clone()])?;
                t.values = x.values.iter().zip(&y.values).map(|(u, v)| a * u + b * v).collect();
                Ok(t)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TomogramSet {
            axis: self.axis,
            hbar: self.hbar,
            tomograms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(mu: f64, nu: f64, v: f64) -> Tomogram {
        let axis = Axis::new(-1.0, 0.5, 5).unwrap();
        Tomogram::new(RotationParams::new(mu, nu).unwrap(), axis, vec![v; 5], 1.0, Route::ClosedForm).unwrap()
    }

    #[test]
    fn mixture_weights_are_validated() {
        let a = flat(1.0, 0.0, 0.4);
        let b = flat(1.0, 0.0, 0.2);
        assert_eq!(mix_tomograms(&[1.0], &[a.clone()]).unwrap().values(), a.values());
        let same = mix_tomograms(&[0.5, 0.5], &[a.clone(), a.clone()]).unwrap();
        assert_eq!(same.values(), a.values());
        assert!(mix_tomograms(&[0.7, 0.7], &[a.clone(), b.clone()]).is_err());
        assert!(mix_tomograms(&[1.5, -0.5], &[a.clone(), b.clone()]).is_err());
        assert!(mix_tomograms(&[0.5, 0.5], &[a, flat(0.0, 1.0, 0.4)]).is_err());
    }

    #[test]
    fn negative_values_are_rejected_and_round_off_clipped() {
        let axis = Axis::new(0.0, 1.0, 2).unwrap();
        let p = RotationParams::new(1.0, 0.0).unwrap();
        let t = Tomogram::new(p, axis, vec![-1e-12, 1.0], 1.0, Route::Loaded).unwrap();
        assert_eq!(t.values(), &[0.0, 1.0]);
        assert!(Tomogram::new(p, axis, vec![-1e-6, 1.0], 1.0, Route::Loaded).is_err());
    }

    #[test]
    fn set_requires_equispaced_angles() {
        let axis = Axis::new(-1.0, 0.5, 5).unwrap();
        let mk = |theta: f64| {
            Tomogram::new(RotationParams::from_angle(theta), axis, vec![0.1; 5], 1.0, Route::Loaded).unwrap()
        };
        let good: Vec<_> = (0..8).map(|k| mk(k as f64 * PI / 8.0)).collect();
        assert_eq!(TomogramSet::new(good.clone()).unwrap().len(), 8);
        let mut bad = good.clone();
        bad.swap(2, 3);
        assert!(TomogramSet::new(bad).is_err());
        let mut uneven = good;
        uneven[4] = mk(0.55 * PI);
        assert!(TomogramSet::new(uneven).is_err());
    }
}
