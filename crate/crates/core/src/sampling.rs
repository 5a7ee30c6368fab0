//! Seeded random matrices.
//!
//! Stream rule: trial `k` of a run seeded with `s` draws from
//! `ChaCha20Rng::seed_from_u64(s)` switched to stream `k` (word position 0).
//! ChaCha output is platform independent, so a `(seed, trial)` pair always
//! names the same matrix.

use nalgebra::linalg::QR;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linop::ComplexMatrix;

pub type StreamRng = ChaCha20Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    // Explicit row-major loop so the draw order is part of the contract.
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// `(G + G^dagger) / 2` for a complex Gaussian `G`.
pub fn gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = complex_gaussian_matrix(n, rng);
    ComplexMatrix::from_raw((&g + g.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Haar-distributed unitary via QR with the phases of `R`'s diagonal
/// moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let qr = QR::new(complex_gaussian_matrix(n, rng));
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_raw(q)
}

/// Hermitian `W diag(lambda) W^dagger` whose distinct eigenvalues repeat
/// according to `profile`. Adjacent distinct eigenvalues are at least 0.5
/// apart. Returns the matrix and the distinct eigenvalues in increasing
/// order.
pub fn planted_hermitian<R: Rng + ?Sized>(profile: &[usize], rng: &mut R) -> (ComplexMatrix, Vec<f64>) {
    assert!(!profile.is_empty() && profile.iter().all(|&m| m > 0));
    let n: usize = profile.iter().sum();
    let mut values = Vec::with_capacity(profile.len());
    let mut current = rng.random_range(-1.0..1.0);
    for _ in profile {
        values.push(current);
        current += 0.5 + rng.random_range(0.0..1.0);
    }
    let diag: Vec<Complex64> = profile
        .iter()
        .zip(&values)
        .flat_map(|(&m, &v)| std::iter::repeat_n(Complex64::new(v, 0.0), m))
        .collect();
    let w = haar_unitary(n, rng);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    let h = w.as_dmatrix() * d * w.as_dmatrix().adjoint();
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    (ComplexMatrix::from_raw(h), values)
}
