//! Worked examples checked against independent oracles: direct quadratures, closed forms and
//! matrix algebra written out here rather than taken from the library.

use std::f64::consts::PI;

use symtomo::gaussian::{
    gaussian_tomogram, gaussian_wavefunction, gaussian_wigner, pauli_reconstruct, CovarianceSign, GaussianState,
};
use symtomo::metaplectic::{generating_form, metaplectic_rotation, FreeSymplectic, RotationParams, SymplecticMatrix};
use symtomo::numerics::{hbar_fourier, make_grid, Axis, Direction, Grid1D, SampledWavefunction};
use symtomo::radon::{
    inverse_radon, radon_chirp_fft_on, radon_line_integral, radon_metaplectic_on, Route, TomogramSet,
};
use symtomo::wigner::{marginals, wigner_transform};
use symtomo::Complex64;

fn grid(hbar: f64) -> Grid1D {
    make_grid(-16.0, 16.0, 1024, hbar).unwrap()
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn ground(hbar: f64) -> SampledWavefunction {
    SampledWavefunction::from_fn(grid(hbar), |x| {
        Complex64::new((PI * hbar).powf(-0.25) * (-x * x / (2.0 * hbar)).exp(), 0.0)
    })
}

/// `(2πσxx)^{-1/4} exp(−x²/4σxx + i σxp x²/(2ħσxx))`, written out independently of the library.
fn chirped(sxx: f64, sxp: f64, hbar: f64) -> SampledWavefunction {
    SampledWavefunction::from_fn(grid(hbar), |x| {
        let amp = (2.0 * PI * sxx).powf(-0.25) * (-x * x / (4.0 * sxx)).exp();
        Complex64::from_polar(amp, sxp * x * x / (2.0 * hbar * sxx))
    })
}

fn normal(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

#[test]
fn fourier_transform_matches_direct_quadrature() {
    let (a, b) = (0.25, 1.0 / 3.0);
    let g = make_grid(-16.0, 16.0, 512, 1.0).unwrap();
    let psi = SampledWavefunction::from_fn(g, |x| (-Complex64::new(a, b) * x * x).exp());
    let fast = hbar_fourier(&psi, Direction::Forward);
    let xs = g.points();
    let mut err: f64 = 0.0;
    for (j, p) in xs.iter().enumerate() {
        let direct: Complex64 = xs
            .iter()
            .zip(psi.values())
            .map(|(x, v)| v * Complex64::from_polar(1.0, -p * x))
            .sum::<Complex64>()
            * g.dx()
            / (2.0 * PI).sqrt();
        err = err.max((direct - fast.values()[j]).norm());
    }
    assert!(err < 1e-8, "{err}");
}

#[test]
fn ground_state_wigner_function_for_several_hbar() {
    for hbar in [1.0, 0.5] {
        let w = wigner_transform(&ground(hbar));
        let mut err: f64 = 0.0;
        for i in 0..w.x_axis().len {
            for j in 0..w.p_axis().len {
                let (x, p) = (w.x_axis().point(i), w.p_axis().point(j));
                err = err.max((w.get(i, j) - (-(x * x + p * p) / hbar).exp() / (PI * hbar)).abs());
            }
        }
        assert!(err < 1e-7, "hbar {hbar}: {err}");
        assert!((w.total_mass() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn chirped_gaussian_wigner_matches_direct_quadrature() {
    let (sxx, sxp) = (1.0, 0.3);
    let spp = (0.25 + sxp * sxp) / sxx;
    let w = wigner_transform(&chirped(sxx, sxp, 1.0));
    // Direct quadrature of (2π)^{-1} ∫ e^{-ipy} ψ(x + y/2) ψ*(x − y/2) dy with the analytic amplitude.
    let amplitude = |x: f64| {
        Complex64::from_polar((2.0 * PI * sxx).powf(-0.25) * (-x * x / (4.0 * sxx)).exp(), sxp * x * x / (2.0 * sxx))
    };
    let h = 1e-3;
    for (i, j) in [(512, 512), (534, 499), (470, 541), (576, 560), (520, 448)] {
        let (x, p) = (w.x_axis().point(i), w.p_axis().point(j));
        let direct: f64 = (-40_000..=40_000)
            .map(|k| {
                let y = k as f64 * h;
                (Complex64::from_polar(1.0, -p * y) * amplitude(x + y / 2.0) * amplitude(x - y / 2.0).conj()).re
            })
            .sum::<f64>()
            * h
            / (2.0 * PI);
        assert!((w.get(i, j) - direct).abs() < 1e-6, "({x},{p})");
        // exp(−(2/ħ²)(σpp x² − 2σxp x p + σxx p²)) / (πħ)
        let closed = (-2.0 * (spp * x * x - 2.0 * sxp * x * p + sxx * p * p)).exp() / PI;
        assert!((direct - closed).abs() < 1e-9);
    }
}

#[test]
fn marginals_of_a_chirped_gaussian() {
    let (sxx, sxp) = (1.0, 0.5);
    let psi = chirped(sxx, sxp, 1.0);
    let (pos, _) = marginals(&wigner_transform(&psi));
    let expect: Vec<f64> = psi.grid().points().iter().map(|x| normal(*x, 1.0)).collect();
    assert!(linf(&pos, &expect) < 1e-7);

    let phat = hbar_fourier(&psi, Direction::Forward);
    let dp = psi.grid().dx();
    let second: f64 = phat
        .grid()
        .points()
        .iter()
        .zip(phat.values())
        .map(|(p, v)| p * p * v.norm_sqr())
        .sum::<f64>()
        * dp;
    assert!((second - 0.5).abs() < 1e-7, "{second}");
}

#[test]
fn sampled_gaussian_has_the_requested_momentum_variance() {
    let state = GaussianState::pure(0.8, -0.35, 1.0).unwrap();
    let psi = gaussian_wavefunction(&state, grid(1.0)).unwrap();
    let phat = hbar_fourier(&psi, Direction::Forward);
    let dp = psi.grid().dx();
    let second: f64 = phat
        .grid()
        .points()
        .iter()
        .zip(phat.values())
        .map(|(p, v)| p * p * v.norm_sqr())
        .sum::<f64>()
        * dp;
    assert!((second - state.sigma_pp()).abs() < 1e-7);
}

#[test]
fn generating_form_of_the_rotation() {
    for (mu, nu) in [(1.0, 1.0), (3.0, 4.0), (-0.5, 2.0)] {
        let params = RotationParams::new(mu, nu).unwrap();
        let lambda = f64::hypot(mu, nu);
        let form = generating_form(&FreeSymplectic::new(params.rotation()).unwrap());
        assert!((form.p[(0, 0)] - mu / nu).abs() < 1e-14);
        assert!((form.q[(0, 0)] - mu / nu).abs() < 1e-14);
        assert!((form.l[(0, 0)] - lambda / nu).abs() < 1e-14);
    }
}

#[test]
fn free_matrix_is_rebuilt_from_its_generating_form() {
    for (a, b, c) in [(1.3, 0.7, -0.4), (-0.2, -1.9, 0.8), (2.0, 0.5, 1.1)] {
        // d from det = 1.
        let d = (1.0 + b * c) / a;
        let s = SymplecticMatrix::from_2x2(a, b, c, d).unwrap();
        let form = generating_form(&FreeSymplectic::new(s.clone()).unwrap());
        let (pf, lf, qf) = (form.p[(0, 0)], form.l[(0, 0)], form.q[(0, 0)]);
        // Gradient relations p = ∂𝒜/∂x, p′ = −∂𝒜/∂x′ give x = (qf x′ + p′)/lf and p = pf x − lf x′.
        let rebuilt = [qf / lf, 1.0 / lf, pf * qf / lf - lf, pf / lf];
        for (got, want) in rebuilt.iter().zip([a, b, c, d]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!((form.to_matrix().unwrap() - s.matrix()).amax() < 1e-10);
    }
}

#[test]
fn rotation_to_momentum_axis_gives_the_momentum_density() {
    let psi = chirped(0.9, 0.2, 1.0);
    let rotated = metaplectic_rotation(&psi, &RotationParams::new(0.0, 1.0).unwrap());
    let phat = hbar_fourier(&psi, Direction::Forward);
    assert!(linf(&rotated.density(), &phat.density()) < 1e-10);

    let g = ground(1.0);
    let diag = metaplectic_rotation(&g, &RotationParams::new(1.0, 1.0).unwrap());
    assert!(linf(&diag.density(), &g.density()) < 1e-10);
}

#[test]
fn axis_and_dilated_tomograms() {
    let (sxx, sxp) = (1.0, 0.3);
    let spp = (0.25 + sxp * sxp) / sxx;
    let psi = chirped(sxx, sxp, 1.0);
    let axis = psi.grid().axis();
    let points = axis.points();

    let tx = radon_metaplectic_on(&psi, 1.0, 0.0, axis).unwrap();
    let expect: Vec<f64> = points.iter().map(|x| normal(*x, sxx)).collect();
    assert!(linf(tx.values(), &expect) < 1e-7);

    let tp = radon_chirp_fft_on(&psi, 0.0, 1.0, axis).unwrap();
    let expect: Vec<f64> = points.iter().map(|x| normal(*x, spp)).collect();
    assert!(linf(tp.values(), &expect) < 1e-7);

    let t2 = radon_metaplectic_on(&psi, 2.0, 0.0, axis).unwrap();
    let expect: Vec<f64> = points.iter().map(|x| 0.5 * normal(x / 2.0, sxx)).collect();
    assert!(linf(t2.values(), &expect) < 1e-7);
}

#[test]
fn diagonal_tomogram_of_the_ground_state_has_unit_variance() {
    let psi = ground(1.0);
    let axis = psi.grid().axis();
    let expect: Vec<f64> = axis.points().iter().map(|x| normal(*x, 1.0)).collect();
    for t in [
        radon_metaplectic_on(&psi, 1.0, 1.0, axis).unwrap(),
        radon_chirp_fft_on(&psi, 1.0, 1.0, axis).unwrap(),
    ] {
        assert!(linf(t.values(), &expect) < 1e-7);
    }
}

#[test]
fn line_integral_agrees_with_chirp_route() {
    let psi = chirped(1.0, 0.3, 1.0);
    let axis = psi.grid().axis();
    let w = wigner_transform(&psi);
    let c = radon_chirp_fft_on(&psi, 1.0, 2.0, axis).unwrap();
    let l = radon_line_integral(&w, 1.0, 2.0, axis).unwrap();
    assert!(c.linf_distance(&l).unwrap() < 2e-6);

    let g = ground(1.0);
    let m = radon_metaplectic_on(&g, 3.0, 4.0, axis).unwrap();
    let l = radon_line_integral(&wigner_transform(&g), 3.0, 4.0, axis).unwrap();
    assert!(m.linf_distance(&l).unwrap() < 5e-4);
    // λ = 5 and σ_X = (9 + 16)/2.
    let expect: Vec<f64> = axis.points().iter().map(|x| normal(*x, 12.5)).collect();
    assert!(linf(m.values(), &expect) < 1e-7);
}

#[test]
fn back_projection_recovers_gaussian_wigner_functions() {
    let g = make_grid(-12.0, 12.0, 512, 1.0).unwrap();
    for (sxx, sxp) in [(0.5, 0.0), (1.0, 0.5)] {
        let state = GaussianState::pure(sxx, sxp, 1.0).unwrap();
        let psi = gaussian_wavefunction(&state, g).unwrap();
        let set = TomogramSet::from_state(&psi, 360, Route::Metaplectic).unwrap();
        let axis = g.axis();
        let w = inverse_radon(&set, axis, axis).unwrap();
        let err = w.linf_distance(&gaussian_wigner(&state, axis, axis)).unwrap();
        assert!(err < 1e-3, "({sxx},{sxp}): {err}");
    }
}

#[test]
fn first_excited_state_is_reconstructed_with_its_negative_core() {
    // ψ₁ = √2 π^{-1/4} x e^{−x²/2}: W₁ = (2(x² + p²) − 1) e^{−(x² + p²)} / π and every
    // normalized tomogram equals |ψ₁|².
    let g = make_grid(-12.0, 12.0, 512, 1.0).unwrap();
    let psi = SampledWavefunction::from_fn(g, |x| {
        Complex64::new(2f64.sqrt() * PI.powf(-0.25) * x * (-x * x / 2.0).exp(), 0.0)
    });
    let axis = g.axis();
    let density = psi.density();
    for theta in [0.3, 1.2, 2.5] {
        let t = radon_metaplectic_on(&psi, f64::cos(theta), f64::sin(theta), axis).unwrap();
        assert!(linf(t.values(), &density) < 1e-10);
    }
    let set = TomogramSet::from_state(&psi, 360, Route::Metaplectic).unwrap();
    let out = Axis::new(-4.0, 0.125, 65).unwrap();
    let w = inverse_radon(&set, out, out).unwrap();
    let mut err: f64 = 0.0;
    for i in 0..out.len {
        for j in 0..out.len {
            let r2 = out.point(i).powi(2) + out.point(j).powi(2);
            err = err.max((w.get(i, j) - (2.0 * r2 - 1.0) * (-r2).exp() / PI).abs());
        }
    }
    assert!(err < 1e-3, "{err}");
    assert!((w.get(32, 32) + 1.0 / PI).abs() < 1e-3);
}

#[test]
fn pauli_sign_from_the_forward_model() {
    // σxx = 1, σpp = 1/2 leaves |σxp| = 1/2; the (1,1) variance is 3/2 ± 1.
    let axis = Axis::new(-30.0, 60.0 / 4096.0, 4096).unwrap();
    for sign in [1.0, -1.0] {
        let state = GaussianState::new(1.0, 0.5, 0.5 * sign, 1.0).unwrap();
        assert!((state.tomogram_variance(1.0, 1.0).unwrap() - (1.5 + sign)).abs() < 1e-15);
        let tx = gaussian_tomogram(&state, 1.0, 0.0, axis).unwrap();
        let tp = gaussian_tomogram(&state, 0.0, 1.0, axis).unwrap();
        let te = gaussian_tomogram(&state, 1.0, 1.0, axis).unwrap();
        let r = pauli_reconstruct(&tx, &tp, &te).unwrap();
        let want = if sign > 0.0 { CovarianceSign::Plus } else { CovarianceSign::Minus };
        assert_eq!(r.sign, want);
        assert!((r.state.sigma_xp() - 0.5 * sign).abs() < 1e-6);
    }
}

#[test]
fn pauli_end_to_end_from_sampled_tomograms() {
    let state = GaussianState::pure(1.0, -0.3, 1.0).unwrap();
    let psi = gaussian_wavefunction(&state, grid(1.0)).unwrap();
    let axis = psi.grid().axis();
    let tx = radon_chirp_fft_on(&psi, 0.0, 1.0, axis).unwrap();
    let r = pauli_reconstruct(
        &radon_metaplectic_on(&psi, 1.0, 0.0, axis).unwrap(),
        &tx,
        &radon_chirp_fft_on(&psi, 1.0, 1.0, axis).unwrap(),
    )
    .unwrap();
    assert!((r.state.sigma_xp() + 0.3).abs() < 1e-4);
    assert_eq!(r.sign, CovarianceSign::Minus);
}
