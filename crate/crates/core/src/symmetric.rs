//! Permutation-symmetric states and the closed-form G-coherence convex roof.
//!
//! The symmetric states are ρ^s = p|Ψ_d⟩⟨Ψ_d| + (1-p) I/d, fully described by
//! the overlap K = ⟨Ψ_d|ρ^s|Ψ_d⟩ = p(d-1)/d + 1/d. The twirl Λ averages U_g ρ U_g†
//! over all basis permutations; it lands in this family and conserves K.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{CoherenceError, Result};
use crate::random;
use crate::state::{self, CMatrix, DensityMatrix, Permutation, PureState};

pub const MAX_EXACT_TWIRL_DIM: usize = 8;
const K_TOL: f64 = 1e-12;

/// ρ^s(d, p) with p ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricState {
    dim: usize,
    mixing_p: f64,
}

impl SymmetricState {
    pub fn new(dim: usize, mixing_p: f64) -> Result<Self> {
        if dim < 2 {
            return Err(CoherenceError::DimensionTooSmall(dim));
        }
        if !(0.0..=1.0).contains(&mixing_p) {
            return Err(CoherenceError::InvalidArgument(format!(
                "mixing probability {mixing_p} outside [0, 1]"
            )));
        }
        Ok(Self { dim, mixing_p })
    }

    pub fn from_overlap(dim: usize, k: f64) -> Result<Self> {
        if dim < 2 {
            return Err(CoherenceError::DimensionTooSmall(dim));
        }
        check_symmetric_k(dim, k)?;
        let d = dim as f64;
        let p = ((k - 1.0 / d) * d / (d - 1.0)).clamp(0.0, 1.0);
        Ok(Self { dim, mixing_p: p })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mixing_p(&self) -> f64 {
        self.mixing_p
    }

    pub fn overlap(&self) -> f64 {
        let d = self.dim as f64;
        self.mixing_p * (d - 1.0) / d + 1.0 / d
    }

    pub fn matrix(&self) -> CMatrix {
        let d = self.dim as f64;
        let off = self.mixing_p / d;
        let diag = off + (1.0 - self.mixing_p) / d;
        CMatrix::from_fn(self.dim, self.dim, |i, j| {
            Complex64::new(if i == j { diag } else { off }, 0.0)
        })
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_computed(self.matrix()).expect("symmetric states are valid states")
    }
}

fn check_symmetric_k(dim: usize, k: f64) -> Result<()> {
    let min = 1.0 / dim as f64;
    if !(k >= min - K_TOL && k <= 1.0 + K_TOL) {
        return Err(CoherenceError::KOutOfRange { k, min });
    }
    Ok(())
}

/// |Ψ_d⟩ = Σ_i |i⟩ / √d
pub fn max_coherent(dim: usize) -> Result<PureState> {
    if dim < 2 {
        return Err(CoherenceError::DimensionTooSmall(dim));
    }
    let a = 1.0 / (dim as f64).sqrt();
    PureState::normalize(vec![Complex64::new(a, 0.0); dim])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwirlMode {
    /// Sum over all d! permutations (d ≤ 8).
    Exact,
    /// Average over `samples` uniformly random permutations; error O(1/√samples).
    Sampled { samples: usize, seed: u64 },
}

/// Λ(ρ) = (1/|G|) Σ_g U_g ρ U_g†
pub fn twirl(rho: &DensityMatrix, mode: TwirlMode) -> Result<DensityMatrix> {
    let d = rho.dim();
    let src = rho.entries();
    let mut acc = CMatrix::zeros(d, d);
    // (U_g ρ U_g†)_{g(i), g(j)} = ρ_{i, j}
    let mut add = |perm: &Permutation| {
        let img = perm.images();
        for i in 0..d {
            for j in 0..d {
                acc[(img[i], img[j])] += src[(i, j)];
            }
        }
    };
    let count = match mode {
        TwirlMode::Exact => {
            if d > MAX_EXACT_TWIRL_DIM {
                return Err(CoherenceError::DimensionTooLargeForExact {
                    dim: d,
                    max: MAX_EXACT_TWIRL_DIM,
                });
            }
            let mut perm = Permutation::identity(d);
            let mut n = 0usize;
            loop {
                add(&perm);
                n += 1;
                if !perm.advance() {
                    break;
                }
            }
            n
        }
        TwirlMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(CoherenceError::InvalidArgument("sample count must be positive".into()));
            }
            let mut rng = random::stream_rng(seed, 0);
            for _ in 0..samples {
                add(&random::random_permutation(&mut rng, d));
            }
            samples
        }
    };
    DensityMatrix::from_computed(acc / Complex64::new(count as f64, 0.0))
}

/// K = ⟨Ψ_d|ρ|Ψ_d⟩
pub fn overlap_k(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let sum: Complex64 = rho.entries().iter().sum();
    let k = sum / d as f64;
    debug_assert!(k.im.abs() <= 1e-12, "Hermitian input has real overlap");
    k.re
}

/// Minimum of C_G over pure states with overlap K (closed form).
pub fn cbar_g(dim: usize, k: f64) -> Result<f64> {
    if dim < 2 {
        return Err(CoherenceError::DimensionTooSmall(dim));
    }
    if !(-K_TOL..=1.0 + K_TOL).contains(&k) {
        return Err(CoherenceError::KOutOfRange { k, min: 0.0 });
    }
    let k = k.clamp(0.0, 1.0);
    let d = dim as f64;
    if k <= (d - 1.0) / d {
        return Ok(0.0);
    }
    let (a, b) = cbar_g_amplitudes(dim, k);
    if a <= 0.0 {
        return Ok(0.0);
    }
    Ok(d * (a * b.powi(dim as i32 - 1)).powf(2.0 / d))
}

/// Amplitudes (a, b, …, b) of the minimizing pure state at overlap K.
pub fn cbar_g_amplitudes(dim: usize, k: f64) -> (f64, f64) {
    let d = dim as f64;
    let (sk, sk1) = (k.sqrt(), (1.0 - k).max(0.0).sqrt());
    let a = (sk - (d - 1.0).sqrt() * sk1) / d.sqrt();
    let b = (sk + sk1 / (d - 1.0).sqrt()) / d.sqrt();
    (a, b)
}

/// Convex roof of C_G on ρ^s: max{1 - d(1-K), 0}.
pub fn cg_symmetric(dim: usize, k: f64) -> Result<f64> {
    if dim < 2 {
        return Err(CoherenceError::DimensionTooSmall(dim));
    }
    check_symmetric_k(dim, k)?;
    Ok((1.0 - dim as f64 * (1.0 - k)).max(0.0))
}

/// Lower bound on C_G(ρ) from the overlap with |Ψ_d⟩.
pub fn cg_lower_bound(rho: &DensityMatrix) -> f64 {
    let d = rho.dim() as f64;
    (1.0 - d * (1.0 - overlap_k(rho))).max(0.0)
}

/// Checks that every K_n maps each basis projector to a diagonal matrix, i.e.
/// each column of K_n has at most one nonzero entry. On failure returns the
/// index of the first offending operator.
pub fn is_incoherent_channel(kraus: &[CMatrix]) -> std::result::Result<(), usize> {
    for (n, k) in kraus.iter().enumerate() {
        for col in 0..k.ncols() {
            let v = k.column(col);
            for i in 0..k.nrows() {
                for j in (i + 1)..k.nrows() {
                    if (v[i] * v[j].conj()).norm() > 1e-12 {
                        return Err(n);
                    }
                }
            }
        }
    }
    Ok(())
}

/// max(bound(ρ), bound(χ(ρ))) for a user-supplied incoherent channel χ.
pub fn cg_lower_bound_with_pretreatment(rho: &DensityMatrix, kraus: &[CMatrix]) -> Result<f64> {
    let dev = state::kraus_deviation(kraus, rho.dim())?;
    if dev > state::KRAUS_TOL {
        return Err(CoherenceError::KrausNotTracePreserving(dev));
    }
    is_incoherent_channel(kraus).map_err(CoherenceError::ChannelNotIncoherent)?;
    let treated = state::apply_channel(kraus, rho)?;
    Ok(cg_lower_bound(rho).max(cg_lower_bound(&treated)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub k: f64,
    pub cbar_g: f64,
    pub cg: f64,
}

/// Both curves on a uniform K grid, endpoints included exactly.
pub fn sweep_symmetric_curve(dim: usize, k_min: f64, k_max: f64, n_points: usize) -> Result<Vec<CurvePoint>> {
    if dim < 2 {
        return Err(CoherenceError::DimensionTooSmall(dim));
    }
    check_symmetric_k(dim, k_min)?;
    check_symmetric_k(dim, k_max)?;
    if k_min >= k_max || n_points < 2 {
        return Err(CoherenceError::InvalidArgument(format!(
            "need k_min < k_max and at least 2 points (got [{k_min}, {k_max}], {n_points})"
        )));
    }
    let step = (k_max - k_min) / (n_points - 1) as f64;
    (0..n_points)
        .map(|i| {
            let k = if i + 1 == n_points { k_max } else { k_min + step * i as f64 };
            Ok(CurvePoint {
                k,
                cbar_g: cbar_g(dim, k)?,
                cg: cg_symmetric(dim, k)?,
            })
        })
        .collect()
}

/// CSV with header `K,cbar_g,cg`, six decimals.
pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("K,cbar_g,cg\n");
    for p in points {
        let _ = writeln!(out, "{:.6},{:.6},{:.6}", p.k, p.cbar_g, p.cg);
    }
    out
}
