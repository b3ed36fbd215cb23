use coherence_kit::poly::{evaluate, g_polynomial, superposition_poly, HomogeneousPolynomial};
use coherence_kit::random::{haar_state, haar_unitary, random_density_matrix, random_permutation, stream_rng};
use coherence_kit::roots::roots;
use coherence_kit::state::{
    apply_channel, dephase, dephasing_kraus, permutation_unitary, subspace_dephasing_kraus, CMatrix, PureState,
};
use coherence_kit::symmetric::{cg_lower_bound, twirl, TwirlMode};
use coherence_kit::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_norm(&(m - m.adjoint()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dephasing_is_idempotent(seed in any::<u64>(), d in 2usize..8) {
        let rho = random_density_matrix(&mut stream_rng(seed, 0), d, d);
        let once = dephase(&rho);
        prop_assert!(max_norm(&(dephase(&once).entries() - once.entries())) <= 1e-12);
    }

    #[test]
    fn permutation_conjugation_keeps_trace(seed in any::<u64>(), d in 2usize..8) {
        let mut rng = stream_rng(seed, 0);
        let rho = random_density_matrix(&mut rng, d, d);
        let u = permutation_unitary(&random_permutation(&mut rng, d));
        prop_assert!((rho.conjugate_by(&u).unwrap().trace() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn spectrum_reconstructs(seed in any::<u64>(), d in 2usize..=8, rank_frac in 0.0f64..1.0) {
        let rank = 1 + (rank_frac * d as f64) as usize % d;
        let rho = random_density_matrix(&mut stream_rng(seed, 0), d, rank);
        let s = rho.spectrum().unwrap();
        prop_assert!(max_norm(&(s.reconstruct() - rho.entries())) <= 1e-8);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn channels_keep_hermiticity_and_trace(seed in any::<u64>(), d in 2usize..7, split_frac in 0.0f64..1.0) {
        let rho = random_density_matrix(&mut stream_rng(seed, 0), d, d);
        let split = 1 + (split_frac * (d - 1) as f64) as usize % (d - 1);
        for kraus in [dephasing_kraus(d), subspace_dephasing_kraus(d, split)] {
            let out = apply_channel(&kraus, &rho).unwrap();
            prop_assert!(hermiticity_defect(out.entries()) <= 1e-12);
            prop_assert!((out.trace() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn polynomial_is_homogeneous(seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        prop_assume!(re.hypot(im) > 1e-3);
        let kappa = Complex64::new(re, im);
        let p = HomogeneousPolynomial::new(
            3,
            4,
            0.5,
            [
                (vec![4, 0, 0], Complex64::new(1.0, -1.0)),
                (vec![1, 2, 1], Complex64::new(0.5, 0.0)),
                (vec![0, 1, 3], Complex64::new(0.0, 2.0)),
            ],
        )
        .unwrap();
        let v = haar_state(&mut stream_rng(seed, 0), 3);
        let scaled: Vec<Complex64> = v.amplitudes().iter().map(|a| a * kappa).collect();
        let lhs = p.eval_raw(&scaled).norm();
        let rhs = kappa.norm().powi(4) * p.eval_raw(v.amplitudes()).norm();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    #[test]
    fn g_measure_ignores_relabeling_and_phases(seed in any::<u64>(), d in 2usize..8) {
        let mut rng = stream_rng(seed, 0);
        let g = g_polynomial(d).unwrap();
        let psi = haar_state(&mut rng, d);
        let base = evaluate(&g, &psi, d as f64).unwrap();
        let u = permutation_unitary(&random_permutation(&mut rng, d));
        prop_assert!((evaluate(&g, &psi.apply(&u).unwrap(), d as f64).unwrap() - base).abs() <= 1e-12);
        let phases = haar_state(&mut rng, d);
        let rotated: Vec<Complex64> = psi
            .amplitudes()
            .iter()
            .zip(phases.amplitudes())
            .map(|(a, p)| a * Complex64::from_polar(1.0, p.arg()))
            .collect();
        let rotated = PureState::normalize(rotated).unwrap();
        prop_assert!((evaluate(&g, &rotated, d as f64).unwrap() - base).abs() <= 1e-12);
    }

    #[test]
    fn superposition_poly_factors_through_its_roots(seed in any::<u64>(), d in 2usize..7) {
        let mut rng = stream_rng(seed, 0);
        let g = g_polynomial(d).unwrap();
        let (psi1, psi2) = (haar_state(&mut rng, d), haar_state(&mut rng, d));
        let q = superposition_poly(&g, &psi1, &psi2).unwrap();
        let zs = roots(&q).unwrap();
        let lead = q.leading();
        for _ in 0..20 {
            let w = Complex64::from_polar(rng.random_range(0.1..2.0), rng.random_range(0.0..std::f64::consts::TAU));
            let direct: Vec<Complex64> = psi1.amplitudes().iter().zip(psi2.amplitudes()).map(|(&x, &y)| x + w * y).collect();
            let exact = g.eval_raw(&direct).norm();
            let product = lead.norm() * zs.iter().map(|z| (w - z).norm()).product::<f64>();
            prop_assert!((exact - product).abs() <= 1e-6 * exact.max(1e-300), "{exact} vs {product}");
        }
    }

    #[test]
    fn twirl_is_idempotent_and_keeps_the_bound(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = stream_rng(seed, 0);
        let u = haar_unitary(&mut rng, d);
        let rho = random_density_matrix(&mut rng, d, d).conjugate_by(&u).unwrap();
        let once = twirl(&rho, TwirlMode::Exact).unwrap();
        let twice = twirl(&once, TwirlMode::Exact).unwrap();
        prop_assert!(max_norm(&(twice.entries() - once.entries())) <= 1e-10);
        prop_assert!((cg_lower_bound(&rho) - cg_lower_bound(&once)).abs() <= 1e-10);
    }
}
