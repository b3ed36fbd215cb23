use std::fmt::Write as _;

use coherence_kit::majorization::{monotonicity_witness, sample_transformable_pair};
use coherence_kit::poly::{self, WITNESS_TOL};
use coherence_kit::random::{haar_state, stream_rng};
use coherence_kit::roof::{average_measure, minimize_convex_roof, SolverConfig};
use coherence_kit::state::PureState;
use coherence_kit::symmetric::{cg_lower_bound, cg_symmetric, SymmetricState};
use coherence_kit::Complex64;
use rayon::prelude::*;

use crate::commands::{CliError, Outcome};

const GAP_HIGH: f64 = 1e-3;
const GAP_LOW: f64 = -1e-9;
const GRID_POINTS: usize = 11;

fn verdict(out: &mut String, failures: usize) -> Outcome {
    let _ = writeln!(out, "{}", if failures == 0 { "PASS" } else { "FAIL" });
    Outcome {
        text: std::mem::take(out),
        code: if failures == 0 { 0 } else { 1 },
    }
}

fn require_dim(dim: usize) -> Result<(), CliError> {
    if dim < 2 {
        return Err(CliError::Usage(format!("--dim must be at least 2 (got {dim})")));
    }
    Ok(())
}

fn require_trials(trials: usize) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    Ok(())
}

/// A Haar state orthogonal to `psi1`.
fn orthogonal_partner(psi1: &PureState, rng: &mut impl rand::Rng) -> Result<PureState, CliError> {
    let raw = haar_state(rng, psi1.dim());
    let overlap = psi1.inner(&raw);
    let v: Vec<Complex64> = raw
        .amplitudes()
        .iter()
        .zip(psi1.amplitudes())
        .map(|(&b, &a)| b - overlap * a)
        .collect();
    Ok(PureState::normalize(v)?)
}

/// Zero-coherence witnesses on random orthogonal superposition lines, and
/// vanishing of the G-coherence off full dephased support.
pub fn nogo(dim: usize, trials: usize, seed: u64) -> Result<Outcome, CliError> {
    require_dim(dim)?;
    require_trials(trials)?;
    let g = poly::g_polynomial(dim)?;
    let scale = dim as f64;

    let per_trial: Vec<(usize, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let psi1 = haar_state(&mut rng, dim);
            let psi2 = orthogonal_partner(&psi1, &mut rng)?;
            let witnesses = poly::zero_coherence_witness(&g, &psi1, &psi2)?;
            let worst = witnesses
                .iter()
                .map(|w| poly::evaluate(&g, &w.state, scale))
                .collect::<coherence_kit::Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok((witnesses.len(), worst))
        })
        .collect::<Result<_, CliError>>()?;
    let empty = per_trial.iter().filter(|(n, _)| *n == 0).count();
    let worst_witness = per_trial.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let bad_witness = per_trial.iter().filter(|(_, v)| *v > WITNESS_TOL).count();

    let vanishing = poly::check_theorem2_vanishing(&g, scale, trials, seed)?;

    let mut out = String::new();
    let _ = writeln!(out, "suite nogo, d = {dim}, {trials} trials, seed {seed}");
    let _ = writeln!(
        out,
        "superposition lines without a witness: {empty}; witnesses above {WITNESS_TOL:e}: {bad_witness} (max {worst_witness:.3e})"
    );
    let _ = writeln!(
        out,
        "partial-support states: max C_G = {:.3e} (trial {})",
        vanishing.max_value, vanishing.worst_trial
    );
    let failures = empty + bad_witness + usize::from(vanishing.violated);
    Ok(verdict(&mut out, failures))
}

/// Monotonicity of the G-coherence along majorization-certified conversions.
pub fn monotone(dim: usize, trials: usize, seed: u64) -> Result<Outcome, CliError> {
    require_dim(dim)?;
    require_trials(trials)?;
    let g = poly::g_polynomial(dim)?;
    let scale = dim as f64;
    let violations: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let (psi, phi) = sample_transformable_pair(&mut rng, dim);
            Ok(usize::from(monotonicity_witness(&g, scale, &psi, &phi)?.violated))
        })
        .collect::<Result<Vec<usize>, CliError>>()?
        .into_iter()
        .sum();
    let mut out = String::new();
    let _ = writeln!(out, "suite monotone, d = {dim}, {trials} pairs, seed {seed}");
    let _ = writeln!(out, "violations: {violations}");
    Ok(verdict(&mut out, violations))
}

/// Numerical convex roof of symmetric states against the closed form.
pub fn theorem3(dim: usize, seed: u64) -> Result<Outcome, CliError> {
    require_dim(dim)?;
    let g = poly::g_polynomial(dim)?;
    let scale = dim as f64;
    let cfg = SolverConfig {
        seed,
        ..SolverConfig::default()
    };
    let k_min = 1.0 / dim as f64;
    let mut out = String::new();
    let _ = writeln!(out, "suite theorem3, d = {dim}, {GRID_POINTS} K values, seed {seed}");
    let mut failures = 0;
    let mut max_gap = f64::NEG_INFINITY;
    for i in 0..GRID_POINTS {
        let k = if i + 1 == GRID_POINTS {
            1.0
        } else {
            k_min + (1.0 - k_min) * i as f64 / (GRID_POINTS - 1) as f64
        };
        let rho = SymmetricState::from_overlap(dim, k)?.density_matrix();
        let result = minimize_convex_roof(&rho, &g, scale, &cfg)?;
        let exact = cg_symmetric(dim, k)?;
        let bound = cg_lower_bound(&rho);
        let gap = result.value - exact;
        let sound = result.decomposition.reconstruction_error(&rho) <= 1e-8
            && (average_measure(&result.decomposition, &g, scale)? - result.value).abs() <= 1e-12;
        let ok = (GAP_LOW..=GAP_HIGH).contains(&gap) && bound <= result.value + 1e-9 && sound;
        if !ok {
            failures += 1;
        }
        max_gap = max_gap.max(gap);
        let _ = writeln!(
            out,
            "K = {k:.6}  roof = {:.6}  exact = {exact:.6}  gap = {gap:+.3e}{}",
            result.value,
            if ok { "" } else { "  <-- violation" }
        );
    }
    let _ = writeln!(out, "max gap = {max_gap:.3e}");
    Ok(verdict(&mut out, failures))
}
