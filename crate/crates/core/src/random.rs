//! Seeded sampling of Haar-random states, unitaries and mixed states.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::state::{CMatrix, DensityMatrix, Permutation, PureState};

/// Independent generator for `stream` derived from `seed` (counter-mode).
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let raw: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Ok(s) = PureState::normalize(raw) {
            return s;
        }
    }
}

/// Haar state supported on `support` only.
pub fn haar_state_on<R: Rng + ?Sized>(rng: &mut R, dim: usize, support: &[usize]) -> PureState {
    let local = haar_state(rng, support.len());
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for (&i, &a) in support.iter().zip(local.amplitudes()) {
        amps[i] = a;
    }
    PureState::normalize(amps).expect("support is nonempty")
}

/// Haar state on a uniformly chosen proper subset of the basis.
pub fn partial_support_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    let size = rng.random_range(1..dim);
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.shuffle(rng);
    idx.truncate(size);
    idx.sort_unstable();
    haar_state_on(rng, dim, &idx)
}

/// Haar-distributed unitary: Gram-Schmidt on a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    loop {
        let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Modified Gram-Schmidt (two passes); `None` on numerical rank loss.
pub fn orthonormalize_columns(m: &CMatrix) -> Option<CMatrix> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..q.nrows()).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
                for i in 0..q.nrows() {
                    let qik = q[(i, k)];
                    q[(i, j)] -= qik * proj;
                }
            }
        }
        let norm: f64 = (0..q.nrows()).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return None;
        }
        for i in 0..q.nrows() {
            q[(i, j)] /= norm;
        }
    }
    Some(q)
}

pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Permutation {
    let mut images: Vec<usize> = (0..dim).collect();
    images.shuffle(rng);
    Permutation::new(images).expect("shuffle of 0..d")
}

/// Random mixed state of the given rank: a trace-normalized complex Wishart
/// matrix G G† with G of shape dim × rank (the induced measure).
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, rank, |_, _| complex_gaussian(rng));
    let m = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    DensityMatrix::from_computed(m / Complex64::new(tr, 0.0)).expect("Wishart matrix is a state")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream_rng(7, 0).random();
        let b: f64 = stream_rng(7, 0).random();
        let c: f64 = stream_rng(7, 1).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = stream_rng(1, 0);
        let u = haar_unitary(&mut rng, 5);
        let err = (u.adjoint() * &u - CMatrix::identity(5, 5))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-14);
    }

    #[test]
    fn partial_support_is_proper() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..200 {
            let s = partial_support_state(&mut rng, 4);
            let zeros = s.amplitudes().iter().filter(|a| a.norm() == 0.0).count();
            assert!(zeros >= 1);
        }
    }

    #[test]
    fn random_density_matrix_has_requested_rank() {
        let mut rng = stream_rng(5, 0);
        let rho = random_density_matrix(&mut rng, 3, 2);
        let spectrum = rho.spectrum().unwrap();
        assert_eq!(spectrum.rank(1e-12), 2);
    }
}
