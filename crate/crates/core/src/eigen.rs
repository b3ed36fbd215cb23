//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot a_pq with a diagonal
//! unitary, then applies the classical real Jacobi rotation. Pivots are visited
//! in row-major order of the strict upper triangle, so the output is a pure
//! function of the input.

use num_complex::Complex64;

use crate::error::{CoherenceError, Result};
use crate::state::{CMatrix, DensityMatrix};

pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k).iter().copied().collect()
    }

    /// Number of eigenvalues strictly above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > tol).count()
    }

    /// Σ λ_k v_k v_k†
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(k);
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += v[i] * v[j].conj() * lambda;
                }
            }
        }
        out
    }
}

pub fn eig_hermitian(rho: &DensityMatrix) -> Result<Spectrum> {
    eig_hermitian_matrix(rho.entries())
}

/// Eigendecomposition of a Hermitian matrix; only the upper triangle is trusted.
pub fn eig_hermitian_matrix(m: &CMatrix) -> Result<Spectrum> {
    let n = m.nrows();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            a[(j, i)] = a[(i, j)].conj();
        }
    }
    let mut v = CMatrix::identity(n, n);
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut converged = n < 2 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(CoherenceError::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        let off = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm())
            .fold(0.0, f64::max);
        converged = off <= 1e-15 * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let column = v.column(src);
        let mut lead = 0;
        for i in 1..n {
            if column[i].norm() > column[lead].norm() + 1e-12 {
                lead = i;
            }
        }
        let phase = if column[lead].norm() > 0.0 {
            column[lead].conj() / column[lead].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            vecs[(i, col)] = column[i] * phase;
        }
        vecs[(lead, col)] = Complex64::new(vecs[(lead, col)].norm(), 0.0);
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: vecs,
    })
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let n = a.nrows();

    let tau = (aqq - app) / (2.0 * g);
    let t = if tau.is_infinite() {
        0.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    if t == 0.0 {
        return;
    }
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = diag(1, e^{-iα}) · [[c, s], [-s, c]] with α = arg(a_pq)
    let eia = apq / g;
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -eia.conj() * s;
    let g_qq = eia.conj() * c;

    // A ← A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::PureState;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn maximally_mixed_spectrum() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let s = eig_hermitian(&rho).unwrap();
        for l in &s.eigenvalues {
            assert!((l - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn projector_spectrum() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::from_real(&[h, h]).unwrap();
        let s = eig_hermitian(&DensityMatrix::from_pure(&psi).unwrap()).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!(s.eigenvalues[1].abs() < 1e-15);
        // sign convention: largest-modulus entry real and positive
        let v = s.eigenvector(0);
        assert!((v[0].re - h).abs() < 1e-15 && v[0].im == 0.0);
    }

    /// Characteristic polynomial of a 3x3 Hermitian matrix, evaluated directly.
    fn char_poly_3(m: &CMatrix, x: f64) -> f64 {
        let b = m - CMatrix::identity(3, 3) * Complex64::new(x, 0.0);
        let det = b[(0, 0)] * (b[(1, 1)] * b[(2, 2)] - b[(1, 2)] * b[(2, 1)])
            - b[(0, 1)] * (b[(1, 0)] * b[(2, 2)] - b[(1, 2)] * b[(2, 0)])
            + b[(0, 2)] * (b[(1, 0)] * b[(2, 1)] - b[(1, 1)] * b[(2, 0)]);
        det.re
    }

    #[test]
    fn symmetric_state_spectrum_matches_characteristic_polynomial() {
        // ρ = 0.4 |Ψ3⟩⟨Ψ3| + 0.6 I/3
        let m = CMatrix::from_fn(3, 3, |i, j| {
            let v = 0.4 / 3.0 + if i == j { 0.2 } else { 0.0 };
            Complex64::new(v, 0.0)
        });
        // brute force: det(ρ - x I) vanishes at 0.6 and (doubly) at 0.2
        assert!(char_poly_3(&m, 0.6).abs() < 1e-15);
        assert!(char_poly_3(&m, 0.2).abs() < 1e-15);
        // p(x) = -(x - 0.6)(x - 0.2)^2, so the central difference at 0.2 is -h^2
        let h = 1e-5;
        let deriv = (char_poly_3(&m, 0.2 + h) - char_poly_3(&m, 0.2 - h)) / (2.0 * h);
        assert!(deriv.abs() < 1e-9);

        let s = eig_hermitian_matrix(&m).unwrap();
        let expected = [0.6, 0.2, 0.2];
        for (l, e) in s.eigenvalues.iter().zip(expected) {
            assert!((l - e).abs() < 1e-14, "{l} vs {e}");
        }
    }

    #[test]
    fn complex_matrix_reconstructs() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                Complex64::new(0.5, 0.0),
                Complex64::new(0.1, 0.2),
                Complex64::new(-0.05, 0.1),
                Complex64::new(0.1, -0.2),
                Complex64::new(0.3, 0.0),
                Complex64::new(0.0, -0.07),
                Complex64::new(-0.05, -0.1),
                Complex64::new(0.0, 0.07),
                Complex64::new(0.2, 0.0),
            ],
        );
        let s = eig_hermitian_matrix(&m).unwrap();
        assert!(max_abs(&(s.reconstruct() - &m)) < 1e-14);
        let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
        assert!(max_abs(&(gram - CMatrix::identity(3, 3))) < 1e-14);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let again = eig_hermitian_matrix(&m).unwrap();
        assert_eq!(s.eigenvectors, again.eigenvectors);
    }
}
