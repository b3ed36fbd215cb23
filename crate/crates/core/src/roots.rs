//! Univariate complex polynomials and the Aberth-Ehrlich root finder.

use num_complex::Complex64;

use crate::error::{CoherenceError, Result};

pub const MAX_ITERATIONS: usize = 500;
pub const STEP_TOL: f64 = 1e-13;
/// Coefficients below this fraction of the largest one count as zero when trimming.
pub const TRIM_TOL: f64 = 1e-13;

/// q(ω) = Σ_j c_j ω^j; trailing zero coefficients are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariatePoly {
    pub coefficients: Vec<Complex64>,
}

impl UnivariatePoly {
    pub fn new(coefficients: Vec<Complex64>) -> Self {
        Self { coefficients }
    }

    pub fn from_real(coefficients: &[f64]) -> Self {
        Self::new(coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.coefficients, z)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficients with negligible leading terms removed.
    pub fn trimmed(&self) -> Vec<Complex64> {
        let cutoff = TRIM_TOL * self.max_coefficient();
        let mut c = self.coefficients.clone();
        while c.last().is_some_and(|x| x.norm() <= cutoff) {
            c.pop();
        }
        c
    }

    pub fn degree(&self) -> usize {
        self.trimmed().len().saturating_sub(1)
    }

    /// Leading coefficient of the trimmed polynomial.
    pub fn leading(&self) -> Complex64 {
        self.trimmed().last().copied().unwrap_or_default()
    }
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Value and derivative in one Horner pass.
fn horner_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of `q` (with multiplicity), ordered by real then imaginary part.
pub fn roots(q: &UnivariatePoly) -> Result<Vec<Complex64>> {
    let c = q.trimmed();
    if c.len() < 2 {
        return Err(CoherenceError::ConstantPolynomial);
    }
    let n = c.len() - 1;
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|&a| a / lead).collect();

    // Cauchy bound on root moduli
    let radius = 1.0 + monic[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let offset = 0.4;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + offset;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut largest_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner_with_derivative(&monic, z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = z[k] - z[j];
                    if diff == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                largest_step = largest_step.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if largest_step <= STEP_TOL {
            converged = true;
            break;
        }
    }
    if !converged || z.iter().any(|r| !r.is_finite()) {
        return Err(CoherenceError::RootFindingDiverged(MAX_ITERATIONS));
    }

    // Newton polish, kept only when it does not increase the residual.
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(&monic, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let cand = *r - p / dp;
            if horner(&monic, cand).norm() < p.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(z)
}
