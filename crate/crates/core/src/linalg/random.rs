//! Seeded random matrix and state ensembles for tests and experiments.

use ndarray::Array1;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{dagger, qr_unitary, CMatrix, CVector, C64};

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_shape_fn((n, n), |_| complex_gaussian(rng))
}

/// Random full-rank density matrix `WW†/tr(WW†)` from a Ginibre sample.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let w = ginibre(n, rng);
    let m = w.dot(&dagger(&w));
    let tr: f64 = (0..n).map(|i| m[[i, i]].re).sum();
    m.mapv(|x| x / tr)
}

/// Haar-distributed `n x n` unitary.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    qr_unitary(&ginibre(n, rng)).expect("Gaussian sample is full rank")
}

/// GUE-like Hermitian matrix `(Z + Z†)/2` with O(1) entries.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let z = ginibre(n, rng);
    (&z + &dagger(&z)).mapv(|x| 0.5 * x)
}

/// Normalized state vector with Haar-uniform direction.
pub fn random_state_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = Array1::from_shape_fn(n, |_| complex_gaussian(rng));
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.mapv(|z| z / norm);
        }
    }
}
