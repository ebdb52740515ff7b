use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::chirpz::ChirpZ;
use super::grid::{Axis, SampledWavefunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// Continuum ħ-Fourier transform `(2πħ)^{-1/2} ∫ exp(∓ i x p / ħ) ψ(x) dx` evaluated at the
/// points of `out`. The integral is the Riemann sum over the grid, which is spectrally accurate
/// for states that decay at the grid edges.
pub fn hbar_fourier_at(psi: &SampledWavefunction, direction: Direction, out: Axis) -> Vec<Complex64> {
    let grid = psi.grid();
    let hbar = grid.hbar();
    let plan = ChirpZ::new(grid.axis(), out, direction.sign() / hbar);
    let c = grid.dx() / (2.0 * PI * hbar).sqrt();
    let mut values = plan.apply(psi.values());
    for v in values.iter_mut() {
        *v *= c;
    }
    values
}

/// Unitary ħ-Fourier transform with the momentum samples placed back on the position axis:
/// output sample `k` holds `ψ̂(x_k)`.
pub fn hbar_fourier(psi: &SampledWavefunction, direction: Direction) -> SampledWavefunction {
    let values = hbar_fourier_at(psi, direction, psi.grid().axis());
    SampledWavefunction::from_parts(*psi.grid(), values)
}

/// Multiplies by `exp(i c x² / 2ħ)`.
pub fn chirp_multiply(psi: &SampledWavefunction, c: f64) -> SampledWavefunction {
    if c == 0.0 {
        return psi.clone();
    }
    let grid = *psi.grid();
    let k = c / (2.0 * grid.hbar());
    let values = psi
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = grid.point(i);
            v * Complex64::from_polar(1.0, k * x * x)
        })
        .collect();
    SampledWavefunction::from_parts(grid, values)
}

/// Evaluates the trigonometric interpolant of `values` (samples on `axis`) at the points of `out`.
///
/// The Nyquist coefficient is split symmetrically so real data interpolate to real values.
/// Points outside the sampled interval evaluate to zero instead of wrapping around.
pub fn bandlimited_eval(values: &[Complex64], axis: Axis, out: Axis) -> Vec<Complex64> {
    let n = values.len();
    assert_eq!(n, axis.len, "samples do not match axis");
    let mut coeffs = values.to_vec();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut coeffs);
    let period = n as f64 * axis.step;
    let half = n / 2;

    // Signed frequencies -N/2 ..= N/2 (N+1 entries when N is even).
    let len = if n % 2 == 0 { n + 1 } else { n };
    let start = -(half as i64);
    let mut signed = Vec::with_capacity(len);
    for i in 0..len {
        let m = start + i as i64;
        let idx = m.rem_euclid(n as i64) as usize;
        let mut c = coeffs[idx] / n as f64;
        if n % 2 == 0 && m.unsigned_abs() as usize == half {
            c *= 0.5;
        }
        let shift = Complex64::from_polar(1.0, -2.0 * PI * m as f64 * axis.start / period);
        signed.push(c * shift);
    }
    let freq_axis = Axis {
        start: start as f64,
        step: 1.0,
        len,
    };
    let plan = ChirpZ::new(freq_axis, out, 2.0 * PI / period);
    let mut result = plan.apply(&signed);

    let (lo, hi) = {
        let a = axis.start - 0.5 * axis.step;
        let b = axis.start + (n as f64 - 0.5) * axis.step;
        (a.min(b), a.max(b))
    };
    for (j, v) in result.iter_mut().enumerate() {
        let y = out.point(j);
        if y < lo || y > hi {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    result
}

/// Scaling operator `√|s| ψ(s x)`, resampled onto the original grid by band-limited interpolation.
pub fn scale(psi: &SampledWavefunction, s: f64) -> Result<SampledWavefunction> {
    if s == 0.0 || !s.is_finite() {
        return Err(Error::Domain(format!("scale factor must be non-zero (got {s})")));
    }
    let grid = *psi.grid();
    if s == 1.0 {
        return Ok(psi.clone());
    }
    if s == -1.0 && grid.is_symmetric() {
        return Ok(parity(psi));
    }
    let axis = grid.axis();
    let mut values = bandlimited_eval(psi.values(), axis, axis.scaled(s));
    let amp = s.abs().sqrt();
    for v in values.iter_mut() {
        *v *= amp;
    }
    Ok(SampledWavefunction::from_parts(grid, values))
}

/// `ψ(-x)`. Exact index reversal on symmetric grids; band-limited resampling otherwise.
pub fn parity(psi: &SampledWavefunction) -> SampledWavefunction {
    let grid = *psi.grid();
    if !grid.is_symmetric() {
        return scale(psi, -1.0).expect("-1 is a valid scale factor");
    }
    let n = grid.n_points();
    let v = psi.values();
    // x_{N-k} = -x_k; the mirror of x_0 lies just off the grid and is taken as zero.
    let values = (0..n)
        .map(|k| if k == 0 { Complex64::new(0.0, 0.0) } else { v[n - k] })
        .collect();
    SampledWavefunction::from_parts(grid, values)
}
