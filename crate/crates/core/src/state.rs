//! States, density matrices and the basic incoherent channels.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen::{self, Spectrum};
use crate::error::{CoherenceError, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const NORM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = -1e-9;
pub const KRAUS_TOL: f64 = 1e-8;
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A normalized pure state in the reference basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Accepts `raw` only if it is already normalized; never rescales.
    pub fn new(raw: Vec<Complex64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(CoherenceError::ZeroVector);
        }
        let norm = l2_norm(&raw);
        if norm == 0.0 {
            return Err(CoherenceError::ZeroVector);
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(CoherenceError::NotNormalized { norm });
        }
        Ok(Self { amplitudes: raw })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalize(raw: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&raw);
        if raw.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(CoherenceError::ZeroVector);
        }
        Ok(Self {
            amplitudes: raw.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(raw: &[f64]) -> Result<Self> {
        Self::new(raw.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The computational basis state |index⟩.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(CoherenceError::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { amplitudes: amps })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &PureState) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn projector(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }

    pub fn apply(&self, unitary: &CMatrix) -> Result<PureState> {
        check_square(unitary, self.dim())?;
        let out: Vec<Complex64> = (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|k| unitary[(i, k)] * self.amplitudes[k])
                    .sum()
            })
            .collect();
        PureState::normalize(out)
    }
}

/// Validates a raw amplitude vector without normalizing it.
pub fn validate_state(raw: &[Complex64]) -> Result<PureState> {
    PureState::new(raw.to_vec())
}

pub(crate) fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_square(m: &CMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(CoherenceError::DimensionMismatch {
            expected: dim,
            found: if m.nrows() != dim { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

/// Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Strict constructor: Hermiticity is checked exactly as stored.
    pub fn new(entries: CMatrix) -> Result<Self> {
        let d = entries.nrows();
        if d < 2 {
            return Err(CoherenceError::DimensionTooSmall(d));
        }
        check_square(&entries, d)?;
        for i in 0..d {
            for j in i..d {
                if entries[(i, j)] != entries[(j, i)].conj() {
                    return Err(CoherenceError::NotHermitian { row: i, col: j });
                }
            }
        }
        Self::check_trace_and_spectrum(&entries)?;
        Ok(Self { entries })
    }

    /// Constructor for matrices produced by arithmetic: the Hermitian part is
    /// taken before validation, so rounding asymmetry is removed.
    pub fn from_computed(m: CMatrix) -> Result<Self> {
        let d = m.nrows();
        if d < 2 {
            return Err(CoherenceError::DimensionTooSmall(d));
        }
        check_square(&m, d)?;
        let mut h = m.clone();
        for i in 0..d {
            h[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..d {
                let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                h[(i, j)] = v;
                h[(j, i)] = v.conj();
            }
        }
        Self::check_trace_and_spectrum(&h)?;
        Ok(Self { entries: h })
    }

    fn check_trace_and_spectrum(m: &CMatrix) -> Result<()> {
        let tr: f64 = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(CoherenceError::BadTrace(tr));
        }
        let spectrum = eigen::eig_hermitian_matrix(m)?;
        let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min < PSD_TOL {
            return Err(CoherenceError::NotPositive(min));
        }
        Ok(())
    }

    pub fn from_pure(psi: &PureState) -> Result<Self> {
        Self::from_computed(psi.projector())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(CoherenceError::DimensionTooSmall(dim));
        }
        let v = Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self {
            entries: CMatrix::from_diagonal_element(dim, dim, v),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// ⟨psi|ρ|psi⟩
    pub fn expectation(&self, psi: &PureState) -> Complex64 {
        let a = psi.amplitudes();
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += a[i].conj() * self.entries[(i, j)] * a[j];
            }
        }
        acc
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        eigen::eig_hermitian(self)
    }

    /// U ρ U†
    pub fn conjugate_by(&self, unitary: &CMatrix) -> Result<DensityMatrix> {
        check_square(unitary, self.dim())?;
        Self::from_computed(unitary * &self.entries * unitary.adjoint())
    }
}

/// Δ(ρ): keeps the diagonal, drops all coherences.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        out[(i, i)] = rho.entries[(i, i)];
    }
    DensityMatrix { entries: out }
}

/// Number of basis populations of `psi` exceeding `zero_tol`.
pub fn dephased_rank(psi: &PureState, zero_tol: f64) -> usize {
    psi.amplitudes()
        .iter()
        .filter(|a| a.norm_sqr() > zero_tol)
        .count()
}

/// A bijection on `0..d`, stored as the image of each index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(CoherenceError::NotAPermutation(d));
            }
            seen[i] = true;
        }
        Ok(Self(images))
    }

    pub fn identity(d: usize) -> Self {
        Self((0..d).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (k, &i) in self.0.iter().enumerate() {
            inv[i] = k;
        }
        Self(inv)
    }

    /// Lexicographic successor; `false` once the last permutation is reached.
    pub fn advance(&mut self) -> bool {
        let p = &mut self.0;
        let n = p.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }
}

/// U_g = Σ_k |g(k)⟩⟨k|
pub fn permutation_unitary(perm: &Permutation) -> CMatrix {
    let d = perm.len();
    let mut u = CMatrix::zeros(d, d);
    for (k, &i) in perm.images().iter().enumerate() {
        u[(i, k)] = ONE;
    }
    u
}

/// Checks Σ K†K = I and returns the max-norm deviation.
pub fn kraus_deviation(kraus: &[CMatrix], dim: usize) -> Result<f64> {
    if kraus.is_empty() {
        return Err(CoherenceError::KrausNotTracePreserving(f64::INFINITY));
    }
    let mut acc = CMatrix::zeros(dim, dim);
    for k in kraus {
        check_square(k, dim)?;
        acc += k.adjoint() * k;
    }
    acc -= CMatrix::identity(dim, dim);
    Ok(acc.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Φ(ρ) = Σ K_n ρ K_n†
pub fn apply_channel(kraus: &[CMatrix], rho: &DensityMatrix) -> Result<DensityMatrix> {
    let dev = kraus_deviation(kraus, rho.dim())?;
    if dev > KRAUS_TOL {
        return Err(CoherenceError::KrausNotTracePreserving(dev));
    }
    let d = rho.dim();
    let mut out = CMatrix::zeros(d, d);
    for k in kraus {
        out += k * rho.entries() * k.adjoint();
    }
    DensityMatrix::from_computed(out)
}

/// Kraus operators {|i⟩⟨i|} of the full dephasing channel.
pub fn dephasing_kraus(dim: usize) -> Vec<CMatrix> {
    (0..dim)
        .map(|i| {
            let mut k = CMatrix::zeros(dim, dim);
            k[(i, i)] = ONE;
            k
        })
        .collect()
}

/// Projectors onto the span of the first `split` basis vectors and its complement.
pub fn subspace_dephasing_kraus(dim: usize, split: usize) -> Vec<CMatrix> {
    let p1 = CMatrix::from_fn(dim, dim, |i, j| if i == j && i < split { ONE } else { ZERO });
    let p2 = CMatrix::from_fn(dim, dim, |i, j| if i == j && i >= split { ONE } else { ZERO });
    vec![p1, p2]
}
