//! Numerical convex roof over pure-state decompositions.
//!
//! Every decomposition of ρ with n elements has the form √p_i ψ_i = Σ_k V_ik √λ_k e_k
//! for an n×r isometry V, where (λ_k, e_k) are the nonzero eigenpairs of ρ. The
//! solver draws Haar isometries, then lowers Σ p_i C(ψ_i) by two-row unitary
//! rotations of the rows w_i = √p_i ψ_i. Each restart descends first on
//! smoothed objectives, with |P| replaced by (|P|² + ε²‖w‖^{2h})^{1/2} for a
//! shrinking ε, and last on the exact one. Every iterate stays an exact
//! decomposition up to rounding, so the returned value is an upper bound that
//! can be rechecked from the witness alone.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigen::Spectrum;
use crate::error::{CoherenceError, Result};
use crate::poly::{evaluate, HomogeneousPolynomial};
use crate::random;
use crate::state::{CMatrix, DensityMatrix, PureState};

pub const RANK_TOL: f64 = 1e-12;
pub const DROP_TOL: f64 = 1e-14;
pub const PROBABILITY_TOL: f64 = 1e-10;
pub const ISOMETRY_TOL: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const THETA_GRID: usize = 12;
const PHASE_GRID: usize = 8;
const GOLDEN_ROUNDS: usize = 3;
const SMOOTHING: &[f64] = &[1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5, 1e-6];
const STAGE_SWEEPS: usize = 100;
const STAGE_STEP_TOL: f64 = 1e-6;
const STAGE_VALUE_TOL: f64 = 1e-7;

/// Probability-weighted pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    entries: Vec<(f64, PureState)>,
}

impl Decomposition {
    pub fn new(entries: Vec<(f64, PureState)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(CoherenceError::InvalidProbabilities("empty decomposition".into()));
        }
        let dim = entries[0].1.dim();
        let mut total = 0.0;
        for (p, psi) in &entries {
            if p.is_nan() || *p < 0.0 {
                return Err(CoherenceError::InvalidProbabilities(format!("negative weight {p}")));
            }
            if psi.dim() != dim {
                return Err(CoherenceError::DimensionMismatch {
                    expected: dim,
                    found: psi.dim(),
                });
            }
            total += p;
        }
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(CoherenceError::InvalidProbabilities(format!("weights sum to {total}")));
        }
        Ok(Self { entries })
    }

    /// From unnormalized rows w_i = √p_i ψ_i. Rows with p_i below `DROP_TOL`
    /// are discarded.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len());
        for w in rows {
            let p: f64 = w.iter().map(|a| a.norm_sqr()).sum();
            if p < DROP_TOL {
                continue;
            }
            entries.push((p, PureState::normalize(w.clone())?));
        }
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }

    pub fn entries(&self) -> &[(f64, PureState)] {
        &self.entries
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|(p, _)| *p).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries
            .iter()
            .map(|(p, psi)| psi.amplitudes().iter().map(|a| a * p.sqrt()).collect())
            .collect()
    }

    /// Σ p_i |ψ_i⟩⟨ψ_i|
    pub fn mixture(&self) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for (p, psi) in &self.entries {
            out += psi.projector() * Complex64::new(*p, 0.0);
        }
        out
    }

    /// Max-norm distance between the mixture and `rho`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        (self.mixture() - rho.entries())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Number of decomposition elements; `None` means rank(ρ) + 2.
    pub decomposition_size: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// Cap on full sweeps over all row pairs.
    pub max_sweeps: usize,
    /// Width at which an angle line search stops.
    pub step_tol: f64,
    /// A sweep gaining less than this ends the refinement.
    pub value_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            decomposition_size: None,
            restarts: 32,
            seed: 7,
            max_sweeps: 400,
            step_tol: 1e-10,
            value_tol: 1e-9,
        }
    }
}

/// Builds √p_i ψ_i = Σ_k V_ik √λ_k e_k from an n×r isometry V.
pub fn decomposition_from_isometry(spectrum: &Spectrum, v: &CMatrix) -> Result<Decomposition> {
    let r = spectrum.rank(RANK_TOL);
    if v.ncols() != r {
        return Err(CoherenceError::DimensionMismatch {
            expected: r,
            found: v.ncols(),
        });
    }
    let gram = v.adjoint() * v;
    let dev = (gram - CMatrix::identity(r, r))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if dev > ISOMETRY_TOL {
        return Err(CoherenceError::NotAnIsometry(dev));
    }
    let d = spectrum.dim();
    let roots: Vec<f64> = spectrum.eigenvalues[..r].iter().map(|l| l.sqrt()).collect();
    let rows: Vec<Vec<Complex64>> = (0..v.nrows())
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..r)
                        .map(|k| v[(i, k)] * roots[k] * spectrum.eigenvectors[(j, k)])
                        .sum()
                })
                .collect()
        })
        .collect();
    Decomposition::from_rows(&rows)
}

/// Σ p_i · C_p(ψ_i)
pub fn average_measure(dec: &Decomposition, p: &HomogeneousPolynomial, scale: f64) -> Result<f64> {
    dec.entries()
        .iter()
        .map(|(w, psi)| Ok(w * evaluate(p, psi, scale)?))
        .sum()
}

struct PairObjective<'a> {
    poly: &'a HomogeneousPolynomial,
    scale: f64,
    eps: f64,
    wi: &'a [Complex64],
    wk: &'a [Complex64],
    buf_i: Vec<Complex64>,
    buf_k: Vec<Complex64>,
}

impl PairObjective<'_> {
    /// Rotated rows: w_i' = cos θ w_i + e^{iφ} sin θ w_k, w_k' = -e^{-iφ} sin θ w_i + cos θ w_k.
    fn rotate(&mut self, theta: f64, phase: f64) {
        let (s, c) = theta.sin_cos();
        let e = Complex64::from_polar(1.0, phase);
        for j in 0..self.wi.len() {
            self.buf_i[j] = self.wi[j] * c + e * self.wk[j] * s;
            self.buf_k[j] = -e.conj() * self.wi[j] * s + self.wk[j] * c;
        }
    }

    fn value(&mut self, theta: f64, phase: f64) -> f64 {
        self.rotate(theta, phase);
        self.poly.smoothed_weighted_measure(&self.buf_i, self.scale, self.eps)
            + self.poly.smoothed_weighted_measure(&self.buf_k, self.scale, self.eps)
    }
}

/// Golden-section search for a minimum of `f` on [lo, hi]; returns the best point seen.
fn golden_section(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    best
}

/// Best unitary mixing of rows i and k; `Some` only on strict improvement.
fn optimize_pair(
    poly: &HomogeneousPolynomial,
    scale: f64,
    eps: f64,
    wi: &[Complex64],
    wk: &[Complex64],
    step_tol: f64,
) -> Option<(Vec<Complex64>, Vec<Complex64>, f64)> {
    let d = wi.len();
    let mut obj = PairObjective {
        poly,
        scale,
        eps,
        wi,
        wk,
        buf_i: vec![Complex64::new(0.0, 0.0); d],
        buf_k: vec![Complex64::new(0.0, 0.0); d],
    };
    let current = obj.value(0.0, 0.0);
    let mut best = (0.0, 0.0, current);
    let mut consider = |obj: &mut PairObjective, theta: f64, phase: f64| -> f64 {
        let v = obj.value(theta, phase);
        if v < best.2 {
            best = (theta, phase, v);
        }
        v
    };

    // angles that annihilate one amplitude of either rotated row
    for j in 0..d {
        let (x, y) = (wi[j], wk[j]);
        if y.norm() > 0.0 {
            let t = -x / y;
            consider(&mut obj, t.norm().atan(), t.arg());
        }
        if x.norm() > 0.0 {
            let t = y / x;
            consider(&mut obj, t.norm().atan(), -t.arg());
        }
    }
    let dtheta = 0.5 * PI / THETA_GRID as f64;
    let dphase = 2.0 * PI / PHASE_GRID as f64;
    for a in 1..=THETA_GRID {
        for b in 0..PHASE_GRID {
            consider(&mut obj, dtheta * a as f64, dphase * b as f64);
        }
    }

    let (mut theta, mut phase, mut value) = best;
    let (mut half_t, mut half_p) = (dtheta, 0.5 * dphase);
    for _ in 0..GOLDEN_ROUNDS {
        let (t, v) = golden_section(|t| obj.value(t, phase), theta - half_t, theta + half_t, step_tol);
        if v < value {
            theta = t;
            value = v;
        }
        let (p, v) = golden_section(|p| obj.value(theta, p), phase - half_p, phase + half_p, step_tol);
        if v < value {
            phase = p;
            value = v;
        }
        half_t *= 0.5;
        half_p *= 0.5;
    }

    if value < current && current - value > 1e-15 * current.max(1e-300) {
        obj.rotate(theta, phase);
        Some((obj.buf_i, obj.buf_k, value))
    } else {
        None
    }
}

fn rows_objective(rows: &[Vec<Complex64>], poly: &HomogeneousPolynomial, scale: f64, eps: f64) -> f64 {
    rows.iter().map(|w| poly.smoothed_weighted_measure(w, scale, eps)).sum()
}

/// Coordinate descent over two-row rotations (angle and phase) of the rows;
/// the objective never increases.
pub fn local_refine(
    dec: &Decomposition,
    p: &HomogeneousPolynomial,
    scale: f64,
    cfg: &SolverConfig,
) -> Result<Decomposition> {
    let mut rows = dec.rows();
    refine_rows(&mut rows, p, scale, 0.0, cfg);
    Decomposition::from_rows(&rows)
}

fn refine_rows(rows: &mut [Vec<Complex64>], p: &HomogeneousPolynomial, scale: f64, eps: f64, cfg: &SolverConfig) {
    let n = rows.len();
    let mut value = rows_objective(rows, p, scale, eps);
    for _ in 0..cfg.max_sweeps {
        let start = value;
        for i in 0..n {
            for k in (i + 1)..n {
                if let Some((wi, wk, _)) = optimize_pair(p, scale, eps, &rows[i], &rows[k], cfg.step_tol) {
                    rows[i] = wi;
                    rows[k] = wk;
                }
            }
        }
        value = rows_objective(rows, p, scale, eps);
        if start - value < cfg.value_tol {
            break;
        }
    }
}

/// Refinement on smoothed objectives with shrinking ε, then `local_refine`
/// on the exact objective from the best iterate seen.
fn annealed_refine(
    dec: &Decomposition,
    p: &HomogeneousPolynomial,
    scale: f64,
    cfg: &SolverConfig,
) -> Result<Decomposition> {
    let mut rows = dec.rows();
    let mut best = rows.clone();
    let mut best_value = rows_objective(&rows, p, scale, 0.0);
    let stage = SolverConfig {
        max_sweeps: cfg.max_sweeps.min(STAGE_SWEEPS),
        value_tol: cfg.value_tol.max(STAGE_VALUE_TOL),
        step_tol: cfg.step_tol.max(STAGE_STEP_TOL),
        ..cfg.clone()
    };
    for &eps in SMOOTHING {
        refine_rows(&mut rows, p, scale, eps, &stage);
        let value = rows_objective(&rows, p, scale, 0.0);
        if value < best_value {
            best_value = value;
            best.clone_from(&rows);
        }
    }
    local_refine(&Decomposition::from_rows(&best)?, p, scale, cfg)
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    /// Upper bound on the convex roof, equal to `average_measure(&decomposition)`.
    pub value: f64,
    pub decomposition: Decomposition,
    /// Index of the restart that produced the result.
    pub restart: usize,
}

/// Best decomposition over `cfg.restarts` Haar-random starts.
pub fn minimize_convex_roof(
    rho: &DensityMatrix,
    p: &HomogeneousPolynomial,
    scale: f64,
    cfg: &SolverConfig,
) -> Result<RoofResult> {
    if p.dim() != rho.dim() {
        return Err(CoherenceError::DimensionMismatch {
            expected: p.dim(),
            found: rho.dim(),
        });
    }
    if cfg.restarts == 0 {
        return Err(CoherenceError::InvalidArgument("restarts must be at least 1".into()));
    }
    let spectrum = rho.spectrum()?;
    let rank = spectrum.rank(RANK_TOL);
    let size = cfg.decomposition_size.unwrap_or(rank + 2);
    if size < rank {
        return Err(CoherenceError::RankDeficientSpectrumMismatch { size, rank });
    }
    if rank == 1 {
        let psi = PureState::normalize(spectrum.eigenvector(0))?;
        let decomposition = Decomposition::new(vec![(1.0, psi)])?;
        let value = average_measure(&decomposition, p, scale)?;
        return Ok(RoofResult {
            value,
            decomposition,
            restart: 0,
        });
    }

    let runs: Vec<(f64, Decomposition)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|s| {
            let mut rng = random::stream_rng(cfg.seed, s as u64);
            let u = random::haar_unitary(&mut rng, size);
            let v = u.columns(0, rank).into_owned();
            let start = decomposition_from_isometry(&spectrum, &v)?;
            let refined = annealed_refine(&start, p, scale, cfg)?;
            Ok((average_measure(&refined, p, scale)?, refined))
        })
        .collect::<Result<_>>()?;

    let (restart, (value, decomposition)) = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.total_cmp(&b.0).then(i.cmp(j)))
        .expect("at least one restart");
    Ok(RoofResult {
        value,
        decomposition,
        restart,
    })
}
