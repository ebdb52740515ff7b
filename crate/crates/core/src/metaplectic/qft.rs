use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use super::symplectic::{FreeSymplectic, RotationParams};
use crate::error::{Error, Result};
use crate::numerics::{bandlimited_eval, parity, Axis, ChirpZ, SampledWavefunction};

/// Quadratic Fourier transform `Ŝ_{𝒜,m}` of a free `S ∈ Sp(1)`, evaluated at the points of `out`.
///
/// Factorized as chirp(Q) → ħ-Fourier → scaling by `L` → chirp(P) with the prefactor
/// `i^{m−½} √|L|`. The Fourier step and the scaling are fused: the transform is evaluated
/// directly at `L·y` so no resampling is needed.
pub fn quadratic_fourier_at(
    psi: &SampledWavefunction,
    s: &FreeSymplectic,
    out: Axis,
) -> Result<Vec<Complex64>> {
    if s.base().n() != 1 {
        return Err(Error::Unsupported(format!(
            "quadratic Fourier transforms are implemented for n = 1 only (got n = {})",
            s.base().n()
        )));
    }
    let form = s.form();
    let (p, l, q) = (form.p[(0, 0)], form.l[(0, 0)], form.q[(0, 0)]);
    let grid = psi.grid();
    let hbar = grid.hbar();

    let chirped: Vec<Complex64> = psi
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let x = grid.point(k);
            v * Complex64::from_polar(1.0, q * x * x / (2.0 * hbar))
        })
        .collect();
    // ∫ exp(-i L y x′ / ħ) f(x′) dx′ at every output y.
    let plan = ChirpZ::new(grid.axis(), out, -l / hbar);
    let mut values = plan.apply(&chirped);

    let phase = FRAC_PI_2 * (s.maslov() as f64 - 0.5);
    let amp = grid.dx() * l.abs().sqrt() / (2.0 * PI * hbar).sqrt();
    let pre = Complex64::from_polar(amp, phase);
    for (j, v) in values.iter_mut().enumerate() {
        let y = out.point(j);
        *v *= pre * Complex64::from_polar(1.0, p * y * y / (2.0 * hbar));
    }
    Ok(values)
}

pub fn quadratic_fourier(psi: &SampledWavefunction, s: &FreeSymplectic) -> Result<SampledWavefunction> {
    let values = quadratic_fourier_at(psi, s, psi.grid().axis())?;
    Ok(SampledWavefunction::from_parts(*psi.grid(), values))
}

fn free_rotation(theta: f64) -> FreeSymplectic {
    FreeSymplectic::new(RotationParams::from_angle(theta).rotation())
        .expect("rotation with |sin θ| >= 1/√2 is free")
}

/// Metaplectic operator `Û_{μ,ν}` covering the rotation `U_{μ,ν}`, evaluated at `out`.
///
/// * `ν = 0`: identity (`μ > 0`) or parity (`μ < 0`).
/// * `|μ| ≤ |ν|`: a single quadratic Fourier transform; its chirps are bounded by `|μ/ν| ≤ 1`.
/// * otherwise: a quarter turn `Û_{±π/2}` followed by the rotation through the remaining angle,
///   which again has `|cot| ≤ 1`. The product covers the same rotation.
pub fn metaplectic_rotation_at(
    psi: &SampledWavefunction,
    params: &RotationParams,
    out: Axis,
) -> Vec<Complex64> {
    let grid = *psi.grid();
    let same_axis = out.approx_eq(&grid.axis(), 1e-14);
    if params.nu() == 0.0 {
        return if params.mu() > 0.0 {
            if same_axis {
                psi.values().to_vec()
            } else {
                bandlimited_eval(psi.values(), grid.axis(), out)
            }
        } else if same_axis && grid.is_symmetric() {
            parity(psi).into_values()
        } else {
            bandlimited_eval(psi.values(), grid.axis(), out.scaled(-1.0))
        };
    }
    if params.mu().abs() <= params.nu().abs() {
        let s = FreeSymplectic::new(params.rotation()).expect("ν ≠ 0 makes the rotation free");
        return quadratic_fourier_at(psi, &s, out).expect("n = 1");
    }
    let theta = params.theta();
    let quarter = if theta >= -3.0 * FRAC_PI_4 { FRAC_PI_2 } else { -FRAC_PI_2 };
    let first = quadratic_fourier(psi, &free_rotation(quarter)).expect("n = 1");
    quadratic_fourier_at(&first, &free_rotation(theta - quarter), out).expect("n = 1")
}

pub fn metaplectic_rotation(psi: &SampledWavefunction, params: &RotationParams) -> SampledWavefunction {
    let values = metaplectic_rotation_at(psi, params, psi.grid().axis());
    SampledWavefunction::from_parts(*psi.grid(), values)
}
