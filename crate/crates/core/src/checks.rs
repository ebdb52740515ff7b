//! Seeded cross-module invariant suite behind `symtomo check`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gaussian::{
    chord_matches_tomogram_variance, gaussian_wavefunction, gaussian_wigner, pauli_reconstruct,
    tomogram_moments, GaussianState,
};
use crate::lagrangian::{is_lagrangian_frame, random_symplectic, FramePair};
use crate::metaplectic::{
    metaplectic_rotation, quadratic_fourier, standard_j, FreeSymplectic, RotationParams, SymplecticMatrix,
};
use crate::numerics::{hbar_fourier, make_grid, Direction, Grid1D, SampledWavefunction};
use crate::radon::{
    inverse_radon_with, radon_chirp_fft_on, radon_line_integral, radon_metaplectic_on, FbpOptions, Route,
    TomogramSet,
};
use crate::wigner::{marginals, momentum_density, wigner_transform};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Multiplies the back-projection constant; anything but 1 should make the round trip fail.
    pub fbp_constant_scale: f64,
    /// Angles of the round-trip sweep.
    pub angles: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            fbp_constant_scale: 1.0,
            angles: 360,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub results: Vec<CheckResult>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<28} {:<6} {:>12} {:>10}  detail", "check", "status", "value", "tol");
        for r in &self.results {
            let _ = writeln!(
                out,
                "{:<28} {:<6} {:>12.3e} {:>10.1e}  {}",
                r.name,
                if r.passed { "PASS" } else { "FAIL" },
                r.value,
                r.tolerance,
                r.detail
            );
        }
        let passed = self.results.iter().filter(|r| r.passed).count();
        let _ = writeln!(out, "{passed}/{} checks passed (seed {})", self.results.len(), self.seed);
        out
    }
}

fn result(name: &'static str, value: f64, tolerance: f64, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed: value <= tolerance,
        value,
        tolerance,
        detail,
    }
}

fn failed(name: &'static str, tolerance: f64, err: &crate::Error) -> CheckResult {
    CheckResult {
        name,
        passed: false,
        value: f64::INFINITY,
        tolerance,
        detail: format!("error: {err}"),
    }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn grid() -> Grid1D {
    make_grid(-16.0, 16.0, 1024, 1.0).expect("valid grid")
}

fn random_state(rng: &mut ChaCha8Rng) -> GaussianState {
    let sxx = rng.random_range(0.5..1.5);
    let sxp = rng.random_range(-0.5..0.5);
    GaussianState::pure(sxx, sxp, 1.0).expect("valid covariances")
}

fn random_direction(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let theta = rng.random_range(0.0..PI);
        let lambda = rng.random_range(0.5..2.0);
        let (mu, nu) = (lambda * theta.cos(), lambda * theta.sin());
        if nu.abs() > 0.05 * lambda {
            return (mu, nu);
        }
    }
}

fn sample(state: &GaussianState) -> SampledWavefunction {
    gaussian_wavefunction(state, grid()).expect("matching hbar")
}

/// Random free `S ∈ Sp(1)`: a rotation through an angle with `|sin θ| ≥ 0.3` times a mild squeeze.
fn random_free(rng: &mut ChaCha8Rng) -> SymplecticMatrix {
    loop {
        let theta = rng.random_range(-PI..PI);
        let k: f64 = rng.random_range(0.85..1.2);
        if theta.sin().abs() < 0.3 {
            continue;
        }
        let (s, c) = theta.sin_cos();
        return SymplecticMatrix::from_2x2(c * k, s / k, -s * k, c / k).expect("rotation times squeeze");
    }
}

/// Max over the map of `|W(Ŝψ)(z) − Wψ(S⁻¹z)|` with `Wψ` in closed form.
fn covariance_error(state: &GaussianState, image: &SampledWavefunction, s: &SymplecticMatrix) -> f64 {
    let w = wigner_transform(image);
    let inv = s.inverse();
    let (xa, pa) = (w.x_axis(), w.p_axis());
    let mut worst: f64 = 0.0;
    for i in 0..xa.len {
        for j in 0..pa.len {
            let (x, p) = inv.apply2(xa.point(i), pa.point(j));
            worst = worst.max((w.get(i, j) - state.wigner_at(x, p)).abs());
        }
    }
    worst
}

fn check_fourier_round_trip(rng: &mut ChaCha8Rng) -> CheckResult {
    let psi = sample(&random_state(rng));
    let back = hbar_fourier(&hbar_fourier(&psi, Direction::Forward), Direction::Inverse);
    let err = psi
        .values()
        .iter()
        .zip(back.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    result("fourier-round-trip", err, 1e-10, "F^-1 F psi = psi".into())
}

fn check_marginals(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let psi = sample(&random_state(rng));
        let w = wigner_transform(&psi);
        let (pos, mom) = marginals(&w);
        worst = worst.max(linf(&pos, &psi.density()));
        worst = worst.max(linf(&mom, &momentum_density(&psi, w.p_axis())));
    }
    result("wigner-marginals", worst, 1e-7, "3 random Gaussians".into())
}

fn check_wigner_closed_form(rng: &mut ChaCha8Rng) -> CheckResult {
    let state = random_state(rng);
    let w = wigner_transform(&sample(&state));
    let c = gaussian_wigner(&state, w.x_axis(), w.p_axis());
    let err = w.linf_distance(&c).unwrap_or(f64::INFINITY);
    let mass = (w.total_mass() - 1.0).abs();
    result(
        "wigner-closed-form",
        err.max(mass),
        1e-6,
        format!("grid vs bivariate normal, |mass - 1| = {mass:.1e}"),
    )
}

fn check_symplectic_covariance(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let state = random_state(rng);
        let psi = sample(&state);
        let (mu, nu) = random_direction(rng);
        let params = RotationParams::new(mu, nu).expect("nonzero direction");
        worst = worst.max(covariance_error(&state, &metaplectic_rotation(&psi, &params), &params.rotation()));
    }
    result("symplectic-covariance", worst, 1e-6, "W(U psi) = W psi o U^-1, 3 rotations".into())
}

fn check_unitarity_and_composition(rng: &mut ChaCha8Rng) -> (CheckResult, CheckResult) {
    let mut norm_err: f64 = 0.0;
    let mut phase_err: f64 = 0.0;
    for _ in 0..5 {
        let state = GaussianState::pure(rng.random_range(0.5..1.0), rng.random_range(-0.3..0.3), 1.0)
            .expect("valid covariances");
        let psi = sample(&state);
        let (m1, m2) = (random_free(rng), random_free(rng));
        let m12 = m1.compose(&m2).expect("same dimension");
        if m12.matrix()[(0, 1)].abs() < 0.3 {
            continue;
        }
        let (s1, s2) = (FreeSymplectic::new(m1).expect("free"), FreeSymplectic::new(m2).expect("free"));
        let s12 = FreeSymplectic::new(m12).expect("free");
        let step = quadratic_fourier(&psi, &s2).and_then(|v| quadratic_fourier(&v, &s1));
        let direct = quadratic_fourier(&psi, &s12);
        match (step, direct) {
            (Ok(a), Ok(b)) => {
                norm_err = norm_err.max((a.norm() - 1.0).abs()).max((b.norm() - 1.0).abs());
                let overlap = a.inner(&b).map(|c| c.norm()).unwrap_or(0.0);
                phase_err = phase_err.max((overlap - 1.0).abs());
            }
            (Err(e), _) | (_, Err(e)) => {
                return (failed("metaplectic-unitarity", 1e-8, &e), failed("metaplectic-composition", 1e-7, &e));
            }
        }
    }
    (
        result("metaplectic-unitarity", norm_err, 1e-8, "norms of free-matrix images".into()),
        result(
            "metaplectic-composition",
            phase_err,
            1e-7,
            "|<S1 S2 psi, (S1S2) psi>| = 1".into(),
        ),
    )
}

fn check_routes(rng: &mut ChaCha8Rng) -> (CheckResult, CheckResult) {
    let mut chirp: f64 = 0.0;
    let mut line: f64 = 0.0;
    for k in 0..4 {
        let psi = sample(&random_state(rng));
        let axis = psi.grid().axis();
        let (mu, nu) = random_direction(rng);
        let run = || -> crate::Result<(f64, Option<f64>)> {
            let m = radon_metaplectic_on(&psi, mu, nu, axis)?;
            let c = radon_chirp_fft_on(&psi, mu, nu, axis)?;
            let l = if k < 2 {
                Some(m.linf_distance(&radon_line_integral(&wigner_transform(&psi), mu, nu, axis)?)?)
            } else {
                None
            };
            Ok((m.linf_distance(&c)?, l))
        };
        match run() {
            Ok((c, l)) => {
                chirp = chirp.max(c);
                line = line.max(l.unwrap_or(0.0));
            }
            Err(e) => return (failed("route-metaplectic-chirp", 1e-7, &e), failed("route-line-integral", 5e-4, &e)),
        }
    }
    (
        result("route-metaplectic-chirp", chirp, 1e-7, "4 random directions".into()),
        result("route-line-integral", line, 5e-4, "2 random directions".into()),
    )
}

fn check_homogeneity_and_mass(rng: &mut ChaCha8Rng) -> (CheckResult, CheckResult) {
    let psi = sample(&random_state(rng));
    let (mu, nu) = random_direction(rng);
    let axis = psi.grid().axis();
    let mut homog: f64 = 0.0;
    let mut mass: f64 = 0.0;
    let outcome = (|| -> crate::Result<()> {
        let base = radon_metaplectic_on(&psi, mu, nu, axis)?;
        mass = mass.max((base.mass() - 1.0).abs());
        for s in [0.5, 2.0, 3.0] {
            let scaled = radon_metaplectic_on(&psi, s * mu, s * nu, axis.scaled(s))?;
            mass = mass.max((scaled.mass() - 1.0).abs());
            let diff = scaled
                .values()
                .iter()
                .zip(base.values())
                .map(|(a, b)| (a - b / s).abs())
                .fold(0.0, f64::max);
            homog = homog.max(diff);
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        return (failed("tomogram-homogeneity", 1e-7, &e), failed("tomogram-mass", 1e-7, &e));
    }
    (
        result("tomogram-homogeneity", homog, 1e-7, "R(sX; s mu, s nu) = R(X)/s".into()),
        result("tomogram-mass", mass, 1e-7, "integral of R = 1".into()),
    )
}

fn check_gaussian_variance(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let state = random_state(rng);
        let psi = sample(&state);
        let (mu, nu) = random_direction(rng);
        let run = || -> crate::Result<f64> {
            let t = radon_chirp_fft_on(&psi, mu, nu, psi.grid().axis())?;
            let expect = state.tomogram_variance(mu, nu)?;
            Ok((tomogram_moments(&t)?.variance - expect).abs() / expect)
        };
        match run() {
            Ok(e) => worst = worst.max(e),
            Err(e) => return failed("gaussian-tomogram-variance", 1e-6, &e),
        }
    }
    result("gaussian-tomogram-variance", worst, 1e-6, "relative, 5 random triples".into())
}

fn check_round_trip(rng: &mut ChaCha8Rng, opts: &CheckOptions) -> CheckResult {
    let state = random_state(rng);
    let psi = sample(&state);
    let run = || -> crate::Result<f64> {
        let set = TomogramSet::from_state(&psi, opts.angles, Route::Metaplectic)?;
        let axis = psi.grid().axis();
        let fbp = FbpOptions {
            constant_scale: opts.fbp_constant_scale,
            ..FbpOptions::default()
        };
        let w = inverse_radon_with(&set, axis, axis, &fbp)?;
        w.linf_distance(&gaussian_wigner(&state, axis, axis))
    };
    match run() {
        Ok(err) => result("fbp-round-trip", err, 1e-3, format!("{} angles", opts.angles)),
        Err(e) => failed("fbp-round-trip", 1e-3, &e),
    }
}

fn check_pauli(rng: &mut ChaCha8Rng) -> (CheckResult, CheckResult) {
    let mut worst: f64 = 0.0;
    let mut twin: f64 = 0.0;
    for _ in 0..3 {
        let state = random_state(rng);
        let (mu, nu) = random_direction(rng);
        let run = || -> crate::Result<(f64, f64)> {
            let psi = sample(&state);
            let other = sample(&state.twin());
            let axis = psi.grid().axis();
            let tx = radon_metaplectic_on(&psi, 1.0, 0.0, axis)?;
            let tp = radon_chirp_fft_on(&psi, 0.0, 1.0, axis)?;
            let te = radon_chirp_fft_on(&psi, mu, nu, axis)?;
            let r = pauli_reconstruct(&tx, &tp, &te)?.state;
            let err = (r.sigma_xx() - state.sigma_xx())
                .abs()
                .max((r.sigma_pp() - state.sigma_pp()).abs())
                .max((r.sigma_xp() - state.sigma_xp()).abs());
            let same = tx
                .linf_distance(&radon_metaplectic_on(&other, 1.0, 0.0, axis)?)?
                .max(tp.linf_distance(&radon_chirp_fft_on(&other, 0.0, 1.0, axis)?)?);
            Ok((err, same))
        };
        match run() {
            Ok((e, s)) => {
                worst = worst.max(e);
                twin = twin.max(s);
            }
            Err(e) => return (failed("pauli-reconstruction", 1e-4, &e), failed("pauli-twin-marginals", 1e-10, &e)),
        }
    }
    (
        result("pauli-reconstruction", worst, 1e-4, "3 states, sign included".into()),
        result("pauli-twin-marginals", twin, 1e-10, "+/- sigma_xp share axis tomograms".into()),
    )
}

fn check_chords(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut bad = 0;
    for _ in 0..100 {
        let state = random_state(rng);
        let (mu, nu) = random_direction(rng);
        if !chord_matches_tomogram_variance(&state, mu, nu, 1e-12).unwrap_or(false) {
            bad += 1;
        }
    }
    result("chord-variance-link", bad as f64, 0.0, "100 random states".into())
}

fn check_lagrangian(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut disagreements = 0;
    for k in 0..60 {
        let n = 1 + k % 3;
        let s = random_symplectic(n, 5, rng);
        let mut frame = FramePair::from_top_rows(&s).expect("even dimension");
        if k % 2 == 1 {
            let mut b = frame.b().clone();
            b[(0, n - 1)] += 0.5 + rng.random_range(0.0..1.0);
            // With n = 1 every frame is symmetric, so the negative case is the rank-deficient one.
            let a = if n == 1 { frame.a() * 0.0 } else { frame.a().clone() };
            let b = if n == 1 { b * 0.0 } else { b };
            frame = FramePair::new(a, b).expect("square");
        }
        // Oracle: [A B] J [A B]^T vanishes and [A B] has full row rank.
        let mut top = nalgebra::DMatrix::zeros(n, 2 * n);
        top.view_mut((0, 0), (n, n)).copy_from(frame.a());
        top.view_mut((0, n), (n, n)).copy_from(frame.b());
        let form = &top * standard_j(n) * top.transpose();
        let scale = top.amax().powi(2).max(f64::MIN_POSITIVE);
        let gram = &top * top.transpose();
        let oracle = form.amax() <= 1e-9 * scale && gram.determinant().abs() > 1e-9 * scale.powi(n as i32);
        if oracle != is_lagrangian_frame(&frame, 1e-9).lagrangian {
            disagreements += 1;
        }
    }
    result("lagrangian-frames", disagreements as f64, 0.0, "60 frames vs [A B] J [A B]^T oracle".into())
}

/// Runs every check with a generator seeded from `opts.seed`.
pub fn run_checks(opts: &CheckOptions) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut results = vec![
        check_fourier_round_trip(&mut rng),
        check_marginals(&mut rng),
        check_wigner_closed_form(&mut rng),
        check_symplectic_covariance(&mut rng),
    ];
    let (u, c) = check_unitarity_and_composition(&mut rng);
    results.extend([u, c]);
    let (c, l) = check_routes(&mut rng);
    results.extend([c, l]);
    let (h, m) = check_homogeneity_and_mass(&mut rng);
    results.extend([h, m]);
    results.push(check_gaussian_variance(&mut rng));
    results.push(check_round_trip(&mut rng, opts));
    let (p, t) = check_pauli(&mut rng);
    results.extend([p, t]);
    results.push(check_chords(&mut rng));
    results.push(check_lagrangian(&mut rng));
    CheckReport {
        seed: opts.seed,
        results,
    }
}
