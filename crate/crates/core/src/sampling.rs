//! Seed derivation and synthetic-design helpers shared by the Monte Carlo
//! harnesses.

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Mixes a base seed with a stream index so replications are keyed
/// independently of execution order (splitmix64 finalizer).
pub fn derive_seed(base_seed: u64, index: u64) -> u64 {
    let mut z = base_seed
        .wrapping_add(0x9E3779B97F4A7C15)
        .wrapping_add(index.wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Replication generator keyed by (base_seed, replication_index).
pub fn replication_rng(base_seed: u64, replication: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base_seed, replication))
}

/// AR(1) covariance Σ(ρ) with Σ_ij = ρ^|i−j|.
pub fn ar1_covariance(m: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

/// Draws n i.i.d. rows from N(0, Σ) given the lower Cholesky factor of Σ.
pub fn gaussian_rows(rng: &mut ChaCha8Rng, n: usize, chol_l: &DMatrix<f64>) -> DMatrix<f64> {
    let m = chol_l.nrows();
    let mut out = DMatrix::zeros(n, m);
    for i in 0..n {
        let z =
            nalgebra::DVector::from_fn(m, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let row = chol_l * z;
        for j in 0..m {
            out[(i, j)] = row[j];
        }
    }
    out
}

/// A fixed n×m design with exactly orthonormal columns in the empirical
/// norm: √n · Q for the thin QR factor Q of a Gaussian draw.
pub fn orthonormal_design(n: usize, m: usize, seed: u64) -> Result<DMatrix<f64>> {
    if n < m {
        return Err(Error::InvalidParam(format!(
            "orthonormal design needs n >= m, got n={n}, m={m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, m, |_, _| rng.sample(rand_distr::StandardNormal));
    let qr = g.qr();
    Ok(qr.q() * (n as f64).sqrt())
}
