use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symtomo::gaussian::{
    chord_coefficient, ellipse_chord, gaussian_wavefunction, tomogram_moments, GaussianState,
};
use symtomo::lagrangian::{is_lagrangian_frame, is_symplectic_nd, random_symplectic, FramePair};
use symtomo::metaplectic::{metaplectic_rotation, standard_j, RotationParams};
use symtomo::numerics::{hbar_fourier, make_grid, Direction, Grid1D, SampledWavefunction};
use symtomo::radon::{radon_chirp_fft_on, radon_metaplectic_on, NEGATIVITY_FLOOR};

fn grid() -> Grid1D {
    make_grid(-12.0, 12.0, 256, 1.0).unwrap()
}

fn sample(sxx: f64, sxp: f64) -> (GaussianState, SampledWavefunction) {
    let state = GaussianState::pure(sxx, sxp, 1.0).unwrap();
    let psi = gaussian_wavefunction(&state, grid()).unwrap();
    (state, psi)
}

fn direction() -> impl Strategy<Value = (f64, f64)> {
    (0.0..std::f64::consts::PI, 0.5..2.0f64)
        .prop_filter("away from the position axis", |(t, _)| t.sin().abs() > 0.05)
        .prop_map(|(t, l)| (l * t.cos(), l * t.sin()))
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tomograms_are_homogeneous(sxx in 0.5..1.5f64, sxp in -0.5..0.5f64, (mu, nu) in direction(), s in 0.3..3.0f64) {
        let (_, psi) = sample(sxx, sxp);
        let axis = psi.grid().axis();
        let base = radon_metaplectic_on(&psi, mu, nu, axis).unwrap();
        let scaled = radon_metaplectic_on(&psi, s * mu, s * nu, axis.scaled(s)).unwrap();
        let expect: Vec<f64> = base.values().iter().map(|v| v / s).collect();
        prop_assert!(linf(scaled.values(), &expect) < 1e-9);
    }

    #[test]
    fn tomograms_are_probability_densities(sxx in 0.5..1.5f64, sxp in -0.5..0.5f64, (mu, nu) in direction()) {
        let (state, psi) = sample(sxx, sxp);
        let t = radon_chirp_fft_on(&psi, mu, nu, psi.grid().axis().scaled(mu.hypot(nu))).unwrap();
        prop_assert!(t.values().iter().all(|v| *v >= NEGATIVITY_FLOOR));
        prop_assert!((t.mass() - 1.0).abs() < 1e-7);
        let m = tomogram_moments(&t).unwrap();
        let v = state.tomogram_variance(mu, nu).unwrap();
        prop_assert!((m.variance - v).abs() / v < 1e-6);
    }

    #[test]
    fn metaplectic_and_chirp_routes_agree(sxx in 0.5..1.5f64, sxp in -0.5..0.5f64, (mu, nu) in direction()) {
        let (_, psi) = sample(sxx, sxp);
        let axis = psi.grid().axis();
        let a = radon_metaplectic_on(&psi, mu, nu, axis).unwrap();
        let b = radon_chirp_fft_on(&psi, mu, nu, axis).unwrap();
        prop_assert!(a.linf_distance(&b).unwrap() < 1e-7);
    }

    #[test]
    fn rotations_preserve_the_norm(sxx in 0.5..1.5f64, sxp in -0.5..0.5f64, theta in -3.2..3.2f64) {
        let (_, psi) = sample(sxx, sxp);
        let out = metaplectic_rotation(&psi, &RotationParams::from_angle(theta));
        prop_assert!((out.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fourier_round_trip(sxx in 0.5..1.5f64, sxp in -0.5..0.5f64) {
        let (_, psi) = sample(sxx, sxp);
        let back = hbar_fourier(&hbar_fourier(&psi, Direction::Forward), Direction::Inverse);
        let err = psi.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn twins_share_axis_tomograms(sxx in 0.5..1.5f64, sxp in -0.5..0.5f64) {
        let (state, psi) = sample(sxx, sxp);
        let twin = gaussian_wavefunction(&state.twin(), grid()).unwrap();
        let axis = psi.grid().axis();
        for (mu, nu) in [(1.0, 0.0), (0.0, 1.0)] {
            let a = radon_metaplectic_on(&psi, mu, nu, axis).unwrap();
            let b = radon_metaplectic_on(&twin, mu, nu, axis).unwrap();
            prop_assert!(a.linf_distance(&b).unwrap() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn chord_coefficient_is_the_scaled_variance(sxx in 0.1..5.0f64, sxp in -2.0..2.0f64, (mu, nu) in direction()) {
        let state = GaussianState::pure(sxx, sxp, 1.0).unwrap();
        let c = chord_coefficient(&state, mu, nu).unwrap();
        let v = state.tomogram_variance(mu, nu).unwrap();
        prop_assert!((c * nu * nu - v).abs() / v < 1e-12);
        let chord = ellipse_chord(&state, mu, nu).unwrap();
        prop_assert!(chord.half_width > 0.0 && chord.half_width.is_finite());
    }

    #[test]
    fn symplectic_top_rows_are_lagrangian(n in 1usize..=3, factors in 1usize..8, seed in any::<u64>()) {
        let s = random_symplectic(n, factors, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(is_symplectic_nd(&s, 1e-9).unwrap().symplectic);
        let top = FramePair::from_top_rows(&s).unwrap();
        prop_assert!(is_lagrangian_frame(&top, 1e-9).lagrangian);
        // The bottom rows (C, D) of a symplectic matrix form a Lagrangian frame as well.
        let swapped = standard_j(n) * &s;
        prop_assert!(is_lagrangian_frame(&FramePair::from_top_rows(&swapped).unwrap(), 1e-9).lagrangian);
    }

    #[test]
    fn lagrangian_verdict_is_invariant_under_left_multiplication(
        n in 1usize..=3,
        seed in any::<u64>(),
        entries in proptest::collection::vec(-1.0..1.0f64, 9),
        broken in any::<bool>(),
    ) {
        let mut s = random_symplectic(n, 4, &mut ChaCha8Rng::seed_from_u64(seed));
        if broken {
            s[(0, n)] += 1.0 + s.amax();
        }
        let frame = FramePair::from_top_rows(&s).unwrap();
        let m = DMatrix::<f64>::identity(n, n) * 2.0 + DMatrix::from_fn(n, n, |i, j| 0.5 * entries[i * 3 + j]);
        prop_assume!(m.determinant().abs() > 0.1);
        let moved = frame.left_multiply(&m).unwrap();
        let a = is_lagrangian_frame(&frame, 1e-9);
        let b = is_lagrangian_frame(&moved, 1e-9);
        prop_assert_eq!(a.lagrangian, b.lagrangian);
        prop_assert_eq!(a.rank, b.rank);
    }
}
