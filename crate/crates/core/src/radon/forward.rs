use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{Route, Tomogram};
use crate::error::{Error, Result};
use crate::metaplectic::{metaplectic_rotation_at, RotationParams};
use crate::numerics::{bandlimited_eval, Axis, ChirpZ, SampledWavefunction};
use crate::wigner::WignerMap;

/// Relative amplitude below which samples and Fourier coefficients count as negligible.
const SUPPORT_THRESHOLD: f64 = 1e-12;
/// Edge amplitude above which a tomogram is flagged as possibly truncated.
const EDGE_WARNING: f64 = 1e-7;
const MAX_OVERSAMPLING: usize = 64;

fn check_axis(axis: Axis) -> Result<()> {
    if axis.len < 2 {
        return Err(Error::Config("a tomogram axis needs at least two points".into()));
    }
    Ok(())
}

/// `R(X) = λ⁻¹ |Û_{μ,ν}ψ(X/λ)|²` on the axis `λ·x`.
pub fn radon_metaplectic(psi: &SampledWavefunction, mu: f64, nu: f64) -> Result<Tomogram> {
    let params = RotationParams::new(mu, nu)?;
    radon_metaplectic_on(psi, mu, nu, psi.grid().axis().scaled(params.lambda()))
}

pub fn radon_metaplectic_on(psi: &SampledWavefunction, mu: f64, nu: f64, axis: Axis) -> Result<Tomogram> {
    check_axis(axis)?;
    let params = RotationParams::new(mu, nu)?;
    let lambda = params.lambda();
    let values = metaplectic_rotation_at(psi, &params, axis.scaled(1.0 / lambda))
        .iter()
        .map(|v| v.norm_sqr() / lambda)
        .collect();
    Ok(Tomogram::new(params, axis, values, psi.hbar(), Route::Metaplectic)?
        .with_warning(psi.edge_amplitude() > EDGE_WARNING))
}

/// `(x_ext, k_ψ)`: the largest `|x|` where `ψ` is non-negligible and the largest wavenumber
/// present in its samples.
fn extents(psi: &SampledWavefunction) -> (f64, f64) {
    let grid = psi.grid();
    let values = psi.values();
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let x_ext = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > SUPPORT_THRESHOLD * peak)
        .map(|(k, _)| grid.point(k).abs())
        .fold(0.0, f64::max);

    let n = values.len();
    let mut spec = values.to_vec();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut spec);
    let top = spec.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let m_max = spec
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > SUPPORT_THRESHOLD * top)
        .map(|(m, _)| if m <= n / 2 { m } else { n - m })
        .max()
        .unwrap_or(0);
    let k_psi = 2.0 * PI * (m_max as f64 + 1.0) / (n as f64 * grid.dx());
    (x_ext, k_psi)
}

/// Oversampling factor for the chirp route and whether it hit the cap.
///
/// The chirped state `exp(iμx²/2ħν)ψ` carries wavenumbers up to
/// `K = |μ/ν| x_ext/ħ + k_ψ`; the grid is refined by a power of two until `πr/dx > K`.
pub fn chirp_oversampling(psi: &SampledWavefunction, mu: f64, nu: f64) -> Result<(usize, bool)> {
    let (r, capped, _) = oversampling(psi, mu, nu)?;
    Ok((r, capped))
}

fn oversampling(psi: &SampledWavefunction, mu: f64, nu: f64) -> Result<(usize, bool, f64)> {
    if nu == 0.0 {
        return Err(Error::Unsupported(
            "the chirp route needs nu != 0; use the metaplectic route for nu = 0".into(),
        ));
    }
    let (x_ext, k_psi) = extents(psi);
    let k = (mu / nu).abs() * x_ext / psi.hbar() + k_psi;
    let dx = psi.grid().dx();
    let mut r = 1;
    while PI * r as f64 / dx <= k && r < MAX_OVERSAMPLING {
        r *= 2;
    }
    Ok((r, PI * r as f64 / dx <= k, k))
}

/// `R(X) = |ν|⁻¹ |F[exp(iμx²/2ħν)ψ](X/ν)|²` with `F` the ħ-Fourier transform.
pub fn radon_chirp_fft(psi: &SampledWavefunction, mu: f64, nu: f64) -> Result<Tomogram> {
    let params = RotationParams::new(mu, nu)?;
    radon_chirp_fft_on(psi, mu, nu, psi.grid().axis().scaled(params.lambda()))
}

pub fn radon_chirp_fft_on(psi: &SampledWavefunction, mu: f64, nu: f64, axis: Axis) -> Result<Tomogram> {
    check_axis(axis)?;
    let params = RotationParams::new(mu, nu)?;
    let (r, capped, k_max) = oversampling(psi, mu, nu)?;
    let grid = psi.grid();
    let hbar = grid.hbar();
    let coarse = grid.axis();
    let fine = Axis {
        start: coarse.start,
        step: coarse.step / r as f64,
        len: coarse.len * r,
    };
    let samples = if r == 1 {
        psi.values().to_vec()
    } else {
        bandlimited_eval(psi.values(), coarse, fine)
    };
    let c = mu / (2.0 * hbar * nu);
    let chirped: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let x = fine.point(k);
            v * Complex64::from_polar(1.0, c * x * x)
        })
        .collect();

    let freq = axis.scaled(1.0 / nu);
    let transformed = ChirpZ::new(fine, freq, -1.0 / hbar).apply(&chirped);
    let amp = fine.step / (2.0 * PI * hbar).sqrt();
    let values = transformed
        .iter()
        .enumerate()
        .map(|(j, v)| {
            // Beyond the band limit the exact transform vanishes; the Riemann sum would alias.
            if freq.point(j).abs() / hbar > k_max {
                0.0
            } else {
                (amp * v).norm_sqr() / nu.abs()
            }
        })
        .collect();
    Ok(Tomogram::new(params, axis, values, hbar, Route::ChirpFft)?
        .with_warning(capped || psi.edge_amplitude() > EDGE_WARNING))
}

/// Parameter interval `[s0, s1]` on which `z0 + s d` stays inside `[x_lo, x_hi] × [p_lo, p_hi]`.
fn clip_line(z0: (f64, f64), d: (f64, f64), xr: (f64, f64), pr: (f64, f64)) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (z, dz, (a, b)) in [(z0.0, d.0, xr), (z0.1, d.1, pr)] {
        if dz.abs() < 1e-300 {
            if z < a || z > b {
                return None;
            }
        } else {
            let (t0, t1) = ((a - z) / dz, (b - z) / dz);
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
        }
    }
    (hi > lo).then_some((lo, hi))
}

fn ordered(axis: Axis) -> (f64, f64) {
    let (a, b) = (axis.start, axis.last());
    (a.min(b), a.max(b))
}

/// `R(X) = λ⁻¹ ∫ W(z0 + s d) ds` along the line `μx + νp = X`, with `z0 = X(μ,ν)/λ²` and the
/// unit direction `d = (−ν, μ)/λ`.
///
/// Composite trapezoid rule with step `½ min(dx, dp)` and bicubic sampling of the map. The
/// line is clipped to the tabulated rectangle; the result carries a warning when the map had
/// not decayed at its edges.
pub fn radon_line_integral(w: &WignerMap, mu: f64, nu: f64, axis: Axis) -> Result<Tomogram> {
    check_axis(axis)?;
    let params = RotationParams::new(mu, nu)?;
    let lambda = params.lambda();
    let d = (-nu / lambda, mu / lambda);
    let (xr, pr) = (ordered(w.x_axis()), ordered(w.p_axis()));
    let h = 0.5 * w.x_axis().step.abs().min(w.p_axis().step.abs());

    let values: Vec<f64> = (0..axis.len)
        .into_par_iter()
        .map(|k| {
            let x = axis.point(k);
            let z0 = (x * mu / (lambda * lambda), x * nu / (lambda * lambda));
            let Some((s0, s1)) = clip_line(z0, d, xr, pr) else {
                return 0.0;
            };
            let steps = ((s1 - s0) / h).ceil().max(1.0) as usize;
            let step = (s1 - s0) / steps as f64;
            let at = |i: usize| {
                let s = s0 + i as f64 * step;
                w.bicubic(z0.0 + s * d.0, z0.1 + s * d.1)
            };
            let interior: f64 = (1..steps).map(at).sum();
            step * (interior + 0.5 * (at(0) + at(steps))) / lambda
        })
        .collect();

    let peak = values.iter().fold(0.0f64, |m, v| m.max(*v));
    // Quadrature and interpolation can dip slightly below zero where W is negative.
    let values = values.into_iter().map(|v| if v < 0.0 && v > -1e-6 * peak.max(1.0) { 0.0 } else { v }).collect();
    Ok(Tomogram::new(params, axis, values, w.hbar(), Route::LineIntegral)?.with_warning(w.edge_warning()))
}
