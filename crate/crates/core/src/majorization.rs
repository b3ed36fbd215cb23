//! Majorization of probability vectors and the pure-state conversion test.
//!
//! `incoherently_transformable` is the sufficient majorization condition only:
//! a `true` verdict certifies that ψ → φ is possible by an incoherent
//! operation, a `false` verdict proves nothing.

use rand::Rng;

use crate::error::{CoherenceError, Result};
use crate::poly::{evaluate, HomogeneousPolynomial};
use crate::random;
use crate::state::PureState;

pub const PREFIX_TOL: f64 = 1e-12;
pub const MONOTONICITY_TOL: f64 = 1e-9;
const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(CoherenceError::InvalidProbabilities("empty vector".into()));
        }
        if let Some(x) = entries.iter().find(|x| x.is_nan() || **x < 0.0) {
            return Err(CoherenceError::InvalidProbabilities(format!("negative entry {x}")));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(CoherenceError::InvalidProbabilities(format!("entries sum to {total}")));
        }
        Ok(Self(entries))
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    pub fn of_state(psi: &PureState) -> Self {
        Self(psi.populations())
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn descending_prefix_sums(&self) -> Vec<f64> {
        let mut sorted = self.0.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        sorted
            .iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }
}

/// True when x majorizes y (y ≺ x).
pub fn majorizes(x: &ProbVector, y: &ProbVector) -> Result<bool> {
    if x.len() != y.len() {
        return Err(CoherenceError::LengthMismatch(x.len(), y.len()));
    }
    Ok(x.descending_prefix_sums()
        .iter()
        .zip(y.descending_prefix_sums())
        .all(|(sx, sy)| sx - sy >= -PREFIX_TOL))
}

/// Certified incoherent convertibility of ψ into φ: populations of ψ are
/// majorized by those of φ.
pub fn incoherently_transformable(psi: &PureState, phi: &PureState) -> Result<bool> {
    if psi.dim() != phi.dim() {
        return Err(CoherenceError::DimensionMismatch {
            expected: psi.dim(),
            found: phi.dim(),
        });
    }
    majorizes(&ProbVector::of_state(phi), &ProbVector::of_state(psi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub source_value: f64,
    pub target_value: f64,
    /// The measure increased along a certified incoherent conversion.
    pub violated: bool,
}

pub fn monotonicity_witness(
    p: &HomogeneousPolynomial,
    scale: f64,
    psi: &PureState,
    phi: &PureState,
) -> Result<MonotonicityReport> {
    if !incoherently_transformable(psi, phi)? {
        return Err(CoherenceError::NotTransformable);
    }
    let source_value = evaluate(p, psi, scale)?;
    let target_value = evaluate(p, phi, scale)?;
    Ok(MonotonicityReport {
        source_value,
        target_value,
        violated: source_value < target_value - MONOTONICITY_TOL,
    })
}

/// A Haar state ψ and a state φ whose populations majorize those of ψ,
/// obtained by random transfers of weight from smaller to larger populations.
pub fn sample_transformable_pair<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> (PureState, PureState) {
    let psi = random::haar_state(rng, dim);
    let mut pops = psi.populations();
    let transfers = rng.random_range(1..=dim);
    for _ in 0..transfers {
        let i = rng.random_range(0..dim);
        let j = rng.random_range(0..dim);
        if i == j {
            continue;
        }
        let (rich, poor) = if pops[i] >= pops[j] { (i, j) } else { (j, i) };
        let moved = pops[poor] * rng.random_range(0.0..=1.0);
        pops[rich] += moved;
        pops[poor] -= moved;
    }
    let amps = pops
        .iter()
        .map(|&q| num_complex::Complex64::from_polar(q.max(0.0).sqrt(), rng.random_range(0.0..2.0 * std::f64::consts::PI)))
        .collect();
    let phi = PureState::normalize(amps).expect("populations sum to one");
    (psi, phi)
}
