//! Random instances for property checks and benchmarks.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::model::LindbladModel;
use crate::statespace::{dagger, hermitian_eigenvalues, DensityMatrix, OperatorMatrix, StateVector, C64};

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre(dim: usize, rng: &mut impl Rng) -> Array2<C64> {
    Array2::from_shape_simple_fn((dim, dim), || gaussian(rng))
}

/// Uniformly distributed pure state.
pub fn random_state(dim: usize, rng: &mut impl Rng) -> StateVector {
    let amps = Array1::from_shape_simple_fn(dim, || gaussian(rng));
    StateVector::new(amps).expect("gaussian vector is nonzero")
}

/// Random complex matrix rescaled to the given spectral norm.
pub fn random_matrix(dim: usize, spectral_norm: f64, rng: &mut impl Rng) -> OperatorMatrix {
    let op = OperatorMatrix::new(ginibre(dim, rng)).expect("square");
    let scale = spectral_norm / op.spectral_norm();
    op.scaled(C64::new(scale, 0.0))
}

/// Random Hermitian matrix whose largest |eigenvalue| is `spectral_norm`.
pub fn random_hermitian(dim: usize, spectral_norm: f64, rng: &mut impl Rng) -> OperatorMatrix {
    let g = ginibre(dim, rng);
    let h = (&g + &dagger(&g)).mapv(|z| z * 0.5);
    let largest = hermitian_eigenvalues(h.view()).into_iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
    let scale = if largest > 0.0 { spectral_norm / largest } else { 0.0 };
    OperatorMatrix::new(h.mapv(|z| z * scale)).expect("square")
}

/// Random full-rank density matrix `G G† / tr(G G†)`.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = ginibre(dim, rng);
    DensityMatrix::from_hermitian_part(g.dot(&dagger(&g))).expect("positive definite")
}

/// Haar-random unitary from Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> Array2<C64> {
    let mut u = ginibre(dim, rng);
    for j in 0..dim {
        for k in 0..j {
            let proj: C64 = (0..dim).map(|i| u[[i, k]].conj() * u[[i, j]]).sum();
            for i in 0..dim {
                let v = u[[i, k]];
                u[[i, j]] -= proj * v;
            }
        }
        let norm = (0..dim).map(|i| u[[i, j]].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..dim {
            u[[i, j]] /= norm;
        }
    }
    u
}

/// Random Lindblad model with `channels` operators. The Hamiltonian and every
/// Lindblad operator have spectral norm drawn uniformly from
/// `[0.2 · max_norm, max_norm]`.
pub fn random_model(dim: usize, channels: usize, max_norm: f64, rng: &mut impl Rng) -> LindbladModel {
    let h_norm = rng.random_range(0.2 * max_norm..=max_norm);
    let hamiltonian = random_hermitian(dim, h_norm, rng);
    let ops = (0..channels)
        .map(|_| {
            let n = rng.random_range(0.2 * max_norm..=max_norm);
            random_matrix(dim, n, rng)
        })
        .collect();
    LindbladModel::new(hamiltonian, ops).expect("random model is valid")
}

/// Random complex vector with independent standard normal entries scaled by
/// `scale`.
pub fn random_shifts(len: usize, scale: f64, rng: &mut impl Rng) -> Vec<C64> {
    (0..len).map(|_| gaussian(rng) * scale).collect()
}
