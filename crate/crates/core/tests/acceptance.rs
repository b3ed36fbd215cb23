//! Acceptance criteria 1 to 9. Run with
//! `cargo test -p coherence-kit --test acceptance -- --nocapture`
//! to see one line per criterion.

use std::time::{Duration, Instant};

use coherence_kit::majorization::{monotonicity_witness, sample_transformable_pair};
use coherence_kit::poly::{c_l1_pure, evaluate, g_polynomial, zero_coherence_witness};
use coherence_kit::random::{haar_state, partial_support_state, random_density_matrix, stream_rng};
use coherence_kit::roof::{average_measure, minimize_convex_roof, Decomposition, SolverConfig};
use coherence_kit::state::{DensityMatrix, PureState};
use coherence_kit::symmetric::{
    cbar_g, cg_lower_bound, cg_symmetric, curve_to_csv, max_coherent, overlap_k, sweep_symmetric_curve, twirl,
    SymmetricState, TwirlMode,
};
use coherence_kit::Complex64;
use rand::Rng;

/// cbar_g(4, 0.9) evaluated with 50-digit arithmetic.
const CBAR_G_4_09: f64 = 0.761_891_491_704_361_1;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn criterion_1() -> Verdict {
    let mut worst: f64 = 0.0;
    for d in 2..=8 {
        let v = evaluate(&g_polynomial(d).unwrap(), &max_coherent(d).unwrap(), d as f64).unwrap();
        worst = worst.max((v - 1.0).abs());
    }
    verdict(worst <= 1e-12, format!("C_G(Psi_d) = 1 for d = 2..8, max error {worst:.2e}"))
}

fn criterion_2() -> Verdict {
    let mut nonzero = 0usize;
    for d in 3..=5 {
        let g = g_polynomial(d).unwrap();
        let mut rng = stream_rng(2, d as u64);
        for _ in 0..10_000 {
            let psi = partial_support_state(&mut rng, d);
            assert!(psi.populations().contains(&0.0));
            if evaluate(&g, &psi, d as f64).unwrap() != 0.0 {
                nonzero += 1;
            }
        }
    }
    verdict(nonzero == 0, format!("10^4 partial-support states per d = 3, 4, 5: {nonzero} nonzero values"))
}

fn criterion_3() -> Verdict {
    let curve = sweep_symmetric_curve(4, 0.25, 1.0, 101).unwrap();
    let cg_err = curve
        .iter()
        .map(|p| (p.cg - (1.0 - 4.0 * (1.0 - p.k)).max(0.0)).abs())
        .fold(0.0, f64::max);
    let csv = curve_to_csv(&curve);
    let csv_ok = csv.lines().count() == 102
        && csv.lines().skip(1).zip(&curve).all(|(line, p)| {
            let cg: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            (cg - p.cg).abs() <= 5e-7
        });
    let c09 = cbar_g(4, 0.9).unwrap();
    let oracle_err = (c09 - CBAR_G_4_09).abs();
    let quoted_err = (c09 - 0.76186).abs();
    let fine: Vec<f64> = (0..=100).map(|i| cbar_g(4, 0.75 + 0.25 * i as f64 / 100.0).unwrap()).collect();
    let second = fine.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::NEG_INFINITY, f64::max);
    verdict(
        cg_err <= 1e-12 && csv_ok && oracle_err <= 1e-4 && quoted_err <= 1e-4 && second <= 1e-9,
        format!(
            "d = 4 sweep: cg error {cg_err:.1e}; cbar_g(0.9) = {c09:.6} (oracle error {oracle_err:.1e}); \
             max second difference on [0.75, 1] {second:.1e}"
        ),
    )
}

struct RoofRun {
    rho: DensityMatrix,
    value: f64,
    decomposition: Decomposition,
    dim: usize,
}

fn k_grid(d: usize) -> Vec<f64> {
    let k_min = 1.0 / d as f64;
    (0..11)
        .map(|i| if i == 10 { 1.0 } else { k_min + (1.0 - k_min) * i as f64 / 10.0 })
        .collect()
}

fn criterion_4(runs: &mut Vec<RoofRun>) -> Verdict {
    let cfg = SolverConfig {
        restarts: 32,
        seed: 7,
        ..SolverConfig::default()
    };
    let mut worst_gap = f64::NEG_INFINITY;
    let mut best_gap = f64::INFINITY;
    let mut bound_ok = true;
    for d in 2..=4 {
        let g = g_polynomial(d).unwrap();
        for k in k_grid(d) {
            let rho = SymmetricState::from_overlap(d, k).unwrap().density_matrix();
            let r = minimize_convex_roof(&rho, &g, d as f64, &cfg).unwrap();
            let gap = r.value - cg_symmetric(d, k).unwrap();
            worst_gap = worst_gap.max(gap);
            best_gap = best_gap.min(gap);
            bound_ok &= cg_lower_bound(&rho) <= r.value + 1e-9;
            runs.push(RoofRun {
                rho,
                value: r.value,
                decomposition: r.decomposition,
                dim: d,
            });
        }
    }
    verdict(
        best_gap >= -1e-9 && worst_gap <= 1e-3 && bound_ok,
        format!(
            "33 symmetric states, d = 2, 3, 4: gap in [{best_gap:.1e}, {worst_gap:.1e}], lower bound {}",
            if bound_ok { "respected" } else { "violated" }
        ),
    )
}

/// ψ2 with |⟨ψ1|ψ2⟩| = `overlap` and a random phase.
fn partner(rng: &mut impl Rng, psi1: &PureState, overlap: f64) -> PureState {
    let raw = haar_state(rng, psi1.dim());
    let ov = psi1.inner(&raw);
    let chi: Vec<Complex64> = raw.amplitudes().iter().zip(psi1.amplitudes()).map(|(&y, &x)| y - ov * x).collect();
    let chi = PureState::normalize(chi).unwrap();
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let s = (1.0 - overlap * overlap).sqrt();
    let v = psi1
        .amplitudes()
        .iter()
        .zip(chi.amplitudes())
        .map(|(&x, &c)| phase * overlap * x + s * c)
        .collect();
    PureState::normalize(v).unwrap()
}

fn criterion_5() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut missing = 0usize;
    let mut total = 0usize;
    for d in 2..=4 {
        let g = g_polynomial(d).unwrap();
        let mut rng = stream_rng(5, d as u64);
        for t in 0..200 {
            let psi1 = haar_state(&mut rng, d);
            let overlap = if t % 2 == 0 { 0.0 } else { rng.random_range(0.0..=0.9) };
            let psi2 = partner(&mut rng, &psi1, overlap);
            let found = zero_coherence_witness(&g, &psi1, &psi2).unwrap();
            if found.is_empty() && evaluate(&g, &psi2, d as f64).unwrap() > 0.0 {
                missing += 1;
            }
            for w in &found {
                worst = worst.max(evaluate(&g, &w.state, d as f64).unwrap());
                total += 1;
            }
        }
    }
    verdict(
        worst < 1e-8 && missing == 0,
        format!("600 superposition lines: {total} witnesses, max C_G {worst:.1e}, {missing} lines without one"),
    )
}

fn criterion_6() -> Verdict {
    let mut violations = 0usize;
    for d in 2..=4 {
        let g = g_polynomial(d).unwrap();
        let mut rng = stream_rng(6, d as u64);
        for _ in 0..10_000 {
            let (psi, phi) = sample_transformable_pair(&mut rng, d);
            let r = monotonicity_witness(&g, d as f64, &psi, &phi).unwrap();
            if r.source_value < r.target_value - 1e-9 {
                violations += 1;
            }
        }
    }
    verdict(violations == 0, format!("3 x 10^4 certified pairs: {violations} violations"))
}

fn criterion_7() -> Verdict {
    let mut form_err: f64 = 0.0;
    let mut k_err: f64 = 0.0;
    for d in 2..=5 {
        let mut rng = stream_rng(7, d as u64);
        for _ in 0..100 {
            let rank = rng.random_range(1..=d);
            let rho = random_density_matrix(&mut rng, d, rank);
            let t = twirl(&rho, TwirlMode::Exact).unwrap();
            let (diag, off) = (t.entry(0, 0), t.entry(0, 1));
            for i in 0..d {
                for j in 0..d {
                    let target = if i == j { diag } else { off };
                    form_err = form_err.max((t.entry(i, j) - target).norm());
                }
            }
            k_err = k_err.max((overlap_k(&rho) - overlap_k(&t)).abs());
        }
    }
    verdict(
        form_err <= 1e-10 && k_err <= 1e-10,
        format!("400 states, d = 2..5: form error {form_err:.1e}, K drift {k_err:.1e}"),
    )
}

fn criterion_8() -> Verdict {
    let g = g_polynomial(2).unwrap();
    let mut rng = stream_rng(8, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let psi = haar_state(&mut rng, 2);
        worst = worst.max((c_l1_pure(&psi).unwrap() - evaluate(&g, &psi, 2.0).unwrap()).abs());
    }
    verdict(worst <= 1e-12, format!("10^4 qubits: max |C_l1 - C_G| {worst:.1e}"))
}

fn criterion_9(runs: &[RoofRun]) -> Verdict {
    let mut recon: f64 = 0.0;
    let mut value: f64 = 0.0;
    for r in runs {
        recon = recon.max(r.decomposition.reconstruction_error(&r.rho));
        let g = g_polynomial(r.dim).unwrap();
        value = value.max((average_measure(&r.decomposition, &g, r.dim as f64).unwrap() - r.value).abs());
    }
    verdict(
        !runs.is_empty() && recon <= 1e-8 && value <= 1e-12,
        format!("{} witnesses: reconstruction error {recon:.1e}, value mismatch {value:.1e}", runs.len()),
    )
}

#[test]
fn acceptance() {
    let mut runs = Vec::new();
    let mut results: Vec<(usize, Verdict, Duration, Duration)> = Vec::new();
    let mut timed = |n: usize, budget: Duration, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        results.push((n, v, start.elapsed(), budget));
    };
    timed(1, secs(1), &mut criterion_1);
    timed(2, secs(5), &mut criterion_2);
    timed(3, secs(1), &mut criterion_3);
    timed(4, secs(300), &mut || criterion_4(&mut runs));
    timed(5, secs(30), &mut criterion_5);
    timed(6, secs(30), &mut criterion_6);
    timed(7, secs(30), &mut criterion_7);
    timed(8, secs(1), &mut criterion_8);
    timed(9, secs(300), &mut || criterion_9(&runs));

    let mut failed = Vec::new();
    for (n, v, elapsed, budget) in &results {
        let pass = v.pass && elapsed <= budget;
        println!(
            "criterion {n}: {}  {} ({:.2} s of {} s)",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(*n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
