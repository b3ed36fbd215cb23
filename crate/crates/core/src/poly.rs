//! Homogeneous-polynomial coherence measures on pure states.
//!
//! A measure is C_p(ψ) = scale · |P_h(ψ)|^m for a degree-h homogeneous
//! polynomial P_h in the amplitudes. The G-coherence is the single monomial
//! a_1⋯a_d with m = 2/d and scale d.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CoherenceError, Result};
use crate::random;
use crate::roots::{self, UnivariatePoly};
use crate::state::PureState;

/// Fixed angular offset of the interpolation nodes (golden-ratio conjugate).
const NODE_OFFSET: f64 = 0.618_033_988_749_894_8;
/// Interpolated coefficients below this fraction of the largest are set to zero.
const COEFF_FLUSH: f64 = 1e-14;
const POLISH_STEPS: usize = 4;
/// Relative cancellation below which a witness amplitude is taken as an exact zero.
const SNAP_REL: f64 = 1e-10;
pub const WITNESS_TOL: f64 = 1e-8;
pub const PARALLEL_TOL: f64 = 1e-9;
pub const VANISHING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPolynomial {
    dim: usize,
    degree: u32,
    power: f64,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl HomogeneousPolynomial {
    /// Zero coefficients are dropped; at least one must remain.
    pub fn new(
        dim: usize,
        degree: u32,
        power: f64,
        terms: impl IntoIterator<Item = (Vec<u32>, Complex64)>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(CoherenceError::DimensionTooSmall(dim));
        }
        if degree == 0 {
            return Err(CoherenceError::InvalidPolynomial("degree must be positive".into()));
        }
        if !(power > 0.0 && power.is_finite()) {
            return Err(CoherenceError::InvalidPolynomial(format!(
                "power must be positive, got {power}"
            )));
        }
        let mut map = BTreeMap::new();
        for (exps, coeff) in terms {
            if exps.len() != dim {
                return Err(CoherenceError::InvalidPolynomial(format!(
                    "multi-index {exps:?} has length {} but dim is {dim}",
                    exps.len()
                )));
            }
            let total: u32 = exps.iter().sum();
            if total != degree {
                return Err(CoherenceError::InvalidPolynomial(format!(
                    "multi-index {exps:?} sums to {total}, expected {degree}"
                )));
            }
            if !coeff.is_finite() {
                return Err(CoherenceError::InvalidPolynomial("non-finite coefficient".into()));
            }
            if coeff != Complex64::new(0.0, 0.0) {
                *map.entry(exps).or_insert(Complex64::new(0.0, 0.0)) += coeff;
            }
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        if map.is_empty() {
            return Err(CoherenceError::InvalidPolynomial("no nonzero coefficient".into()));
        }
        Ok(Self {
            dim,
            degree,
            power,
            terms: map,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Complex64> {
        &self.terms
    }

    /// P_h(v) for an arbitrary (unnormalized) vector.
    pub fn eval_raw(&self, v: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (exps, &coeff) in &self.terms {
            let mut term = coeff;
            for (&x, &k) in v.iter().zip(exps) {
                if k > 0 {
                    term *= x.powu(k);
                }
            }
            acc += term;
        }
        acc
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(CoherenceError::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    /// p · C_p(w/‖w‖) with p = ‖w‖², for an unnormalized vector w.
    pub(crate) fn weighted_measure(&self, w: &[Complex64], scale: f64) -> f64 {
        let norm_sqr: f64 = w.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr == 0.0 {
            return 0.0;
        }
        let value = self.eval_raw(w).norm();
        if value == 0.0 {
            return 0.0;
        }
        let hm = self.degree as f64 * self.power;
        scale * value.powf(self.power) * norm_sqr.powf(1.0 - 0.5 * hm)
    }

    /// `weighted_measure` with |P(w)| replaced by (|P(w)|² + ε²‖w‖^{2h})^{1/2},
    /// which removes the cusp where P vanishes. Equal to it at ε = 0.
    pub(crate) fn smoothed_weighted_measure(&self, w: &[Complex64], scale: f64, eps: f64) -> f64 {
        if eps == 0.0 {
            return self.weighted_measure(w, scale);
        }
        let norm_sqr: f64 = w.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr == 0.0 {
            return 0.0;
        }
        let h = self.degree as f64;
        let value_sqr = self.eval_raw(w).norm_sqr() + eps * eps * norm_sqr.powf(h);
        scale * value_sqr.powf(0.5 * self.power) * norm_sqr.powf(1.0 - 0.5 * h * self.power)
    }
}

/// The G-coherence polynomial a_1 a_2 ⋯ a_d with m = 2/d.
pub fn g_polynomial(dim: usize) -> Result<HomogeneousPolynomial> {
    if dim < 2 {
        return Err(CoherenceError::DimensionTooSmall(dim));
    }
    HomogeneousPolynomial::new(
        dim,
        dim as u32,
        2.0 / dim as f64,
        [(vec![1; dim], Complex64::new(1.0, 0.0))],
    )
}

/// scale · |P_h(ψ)|^m
pub fn evaluate(p: &HomogeneousPolynomial, psi: &PureState, scale: f64) -> Result<f64> {
    p.check_dim(psi.dim())?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CoherenceError::InvalidArgument(format!(
            "scale must be positive, got {scale}"
        )));
    }
    let v = p.eval_raw(psi.amplitudes()).norm();
    Ok(if v == 0.0 { 0.0 } else { scale * v.powf(p.power) })
}

/// C_G(ψ) = d · |a_1 ⋯ a_d|^{2/d}
pub fn g_coherence(psi: &PureState) -> Result<f64> {
    evaluate(&g_polynomial(psi.dim())?, psi, psi.dim() as f64)
}

/// ℓ1 coherence of a qubit, 2|a_1 a_2|.
pub fn c_l1_pure(psi: &PureState) -> Result<f64> {
    if psi.dim() != 2 {
        return Err(CoherenceError::DimensionMismatch {
            expected: 2,
            found: psi.dim(),
        });
    }
    let a = psi.amplitudes();
    Ok(2.0 * (a[0] * a[1]).norm())
}

/// Coefficients of q(ω) = P_h(ψ1 + ω ψ2), by sampling P_h on h+1 nodes of the
/// unit circle and inverting the discrete Fourier transform.
pub fn superposition_poly(
    p: &HomogeneousPolynomial,
    psi1: &PureState,
    psi2: &PureState,
) -> Result<UnivariatePoly> {
    p.check_dim(psi1.dim())?;
    p.check_dim(psi2.dim())?;
    let n = p.degree as usize + 1;
    let (a, b) = (psi1.amplitudes(), psi2.amplitudes());
    let samples: Vec<Complex64> = (0..n)
        .map(|k| {
            let omega = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64 + NODE_OFFSET);
            let v: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| x + omega * y).collect();
            p.eval_raw(&v)
        })
        .collect();
    let mut coeffs: Vec<Complex64> = (0..n)
        .map(|j| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(k, &s)| s * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64))
                .sum();
            sum * Complex64::from_polar(1.0 / n as f64, -(j as f64) * NODE_OFFSET)
        })
        .collect();
    let largest = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in coeffs.iter_mut() {
        if c.norm() <= COEFF_FLUSH * largest {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    Ok(UnivariatePoly::new(coeffs))
}

/// A zero-coherence state (ψ1 + ω ψ2)/Z(ω); `omega = None` stands for ψ2 itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub omega: Option<Complex64>,
    pub state: PureState,
}

/// Zero-coherence states on the superposition line of ψ1 and ψ2.
///
/// Finite roots z of q(ω) give the states (ψ1 + z ψ2)/Z(z). When P_h(ψ2)
/// vanishes and q(ω) has no finite root, ψ2 itself is returned.
pub fn zero_coherence_witness(
    p: &HomogeneousPolynomial,
    psi1: &PureState,
    psi2: &PureState,
) -> Result<Vec<Witness>> {
    p.check_dim(psi1.dim())?;
    p.check_dim(psi2.dim())?;
    let overlap = psi1.inner(psi2).norm();
    if overlap >= 1.0 - PARALLEL_TOL {
        return Err(CoherenceError::StatesParallel(overlap));
    }
    let q = superposition_poly(p, psi1, psi2)?;
    let found = match roots::roots(&q) {
        Ok(z) => z,
        Err(CoherenceError::ConstantPolynomial) => Vec::new(),
        Err(e) => return Err(e),
    };
    if found.is_empty() {
        // the ω^h coefficient P_h(ψ2) vanished, so ψ2 is itself a witness
        return Ok(vec![Witness {
            omega: None,
            state: psi2.clone(),
        }]);
    }
    let (a, b) = (psi1.amplitudes(), psi2.amplitudes());
    let slope = UnivariatePoly::new(
        q.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| c * j as f64)
            .collect(),
    );
    found
        .into_iter()
        .map(|z| {
            let z = polish_on_line(p, a, b, z, &slope);
            let line: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| x + z * y).collect();
            let snapped: Vec<Complex64> = a
                .iter()
                .zip(b)
                .zip(&line)
                .map(|((&x, &y), &s)| {
                    if s.norm() <= SNAP_REL * (x.norm() + (z * y).norm()) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        s
                    }
                })
                .collect();
            let v = if normalized_abs(p, &snapped) <= normalized_abs(p, &line) {
                snapped
            } else {
                line
            };
            Ok(Witness {
                omega: Some(z),
                state: PureState::normalize(v)?,
            })
        })
        .collect()
}

/// |P(v)| / ‖v‖^h
fn normalized_abs(p: &HomogeneousPolynomial, v: &[Complex64]) -> f64 {
    let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return f64::INFINITY;
    }
    p.eval_raw(v).norm() / norm.powi(p.degree as i32)
}

/// Newton steps on P(ψ1 + zψ2) evaluated directly, kept only while the
/// residual shrinks.
fn polish_on_line(
    p: &HomogeneousPolynomial,
    a: &[Complex64],
    b: &[Complex64],
    mut z: Complex64,
    slope: &UnivariatePoly,
) -> Complex64 {
    let f = |z: Complex64| {
        let v: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| x + z * y).collect();
        p.eval_raw(&v)
    };
    let mut fz = f(z);
    for _ in 0..POLISH_STEPS {
        let dz = slope.eval(z);
        if fz.norm() == 0.0 || dz.norm() == 0.0 {
            break;
        }
        let next = z - fz / dz;
        let fnext = f(next);
        if fnext.norm() >= fz.norm() {
            break;
        }
        z = next;
        fz = fnext;
    }
    z
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingReport {
    pub trials: usize,
    pub max_value: f64,
    /// Trial index attaining `max_value`.
    pub worst_trial: usize,
    pub violated: bool,
}

/// Samples Haar states on random proper subsets of the basis and records the
/// largest measure value. A genuine coherence measure must return zero on all.
pub fn check_theorem2_vanishing(
    p: &HomogeneousPolynomial,
    scale: f64,
    trials: usize,
    seed: u64,
) -> Result<VanishingReport> {
    if trials == 0 {
        return Err(CoherenceError::InvalidArgument("trials must be at least 1".into()));
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = random::stream_rng(seed, t as u64);
            let psi = random::partial_support_state(&mut rng, p.dim());
            evaluate(p, &psi, scale)
        })
        .collect::<Result<_>>()?;
    let (worst_trial, max_value) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    Ok(VanishingReport {
        trials,
        max_value,
        worst_trial,
        violated: max_value > VANISHING_TOL,
    })
}
