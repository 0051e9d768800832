#![allow(dead_code)]

use clusterdet::channel::ChannelRealization;
use clusterdet::rng::{complex_gaussian, rng_for};
use clusterdet::{CMatrix, CVector, HermitianView, C64};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Dense i.i.d. `CN(0, 1)` matrix.
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = rng_for(seed, 100);
    let data = (0..rows * cols)
        .map(|_| complex_gaussian(&mut rng, 1.0))
        .collect();
    CMatrix::new(rows, cols, data).unwrap()
}

pub fn random_vector(len: usize, seed: u64) -> CVector {
    let mut rng = rng_for(seed, 101);
    CVector::new((0..len).map(|_| complex_gaussian(&mut rng, 1.0)).collect()).unwrap()
}

/// `HᴴH + ridge·I` computed with a plain triple loop.
pub fn naive_gram(h: &CMatrix, ridge: f64) -> CMatrix {
    let n = h.cols();
    CMatrix::from_fn(n, n, |i, j| {
        let mut s = C64::new(0.0, 0.0);
        for k in 0..h.rows() {
            s += h.get(k, i).conj() * h.get(k, j);
        }
        if i == j {
            s + ridge
        } else {
            s
        }
    })
}

/// Random Hermitian positive-definite matrix.
pub fn random_hpd(n: usize, seed: u64) -> HermitianView {
    let h = random_matrix(n + 3, n, seed);
    clusterdet::linalg::hermitian_gram(&h, 0.1).unwrap()
}

pub fn to_na(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

pub fn from_na(m: &DMatrix<Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigenvalues of a Hermitian matrix through its real `2n × 2n` embedding
/// `[[Re, −Im], [Im, Re]]`; every eigenvalue appears twice there.
pub fn oracle_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.rows();
    let emb = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let v = m.get(i % n, j % n);
        match (i < n, j < n) {
            (true, true) | (false, false) => v.re,
            (true, false) => -v.im,
            (false, true) => v.im,
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(emb)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}

pub fn rel_err(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    num / den
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn realization(h: CMatrix, rho: f64, sizes: Vec<usize>) -> ChannelRealization {
    let n = h.cols();
    ChannelRealization {
        h,
        large_scale_gain: vec![1.0; n],
        k_factor: vec![1.0; n],
        user_positions: vec![[0.0; 3]; n],
        rho,
        cluster_sizes: sizes,
    }
}

/// Channel whose cluster column blocks occupy disjoint antenna rows, so
/// `H_cᴴH_i = 0` for `c ≠ i`.
pub fn block_orthogonal_channel(sizes: &[usize], rows_per_cluster: usize, seed: u64) -> CMatrix {
    let n: usize = sizes.iter().sum();
    let m = rows_per_cluster * sizes.len();
    let mut h = CMatrix::zeros(m, n);
    let mut col = 0;
    for (c, &nc) in sizes.iter().enumerate() {
        let block = random_matrix(rows_per_cluster, nc, seed.wrapping_add(c as u64));
        for r in 0..rows_per_cluster {
            for k in 0..nc {
                h.set(c * rows_per_cluster + r, col + k, block.get(r, k));
            }
        }
        col += nc;
    }
    h
}
