use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EnsembleConfig;
use crate::error::{Error, Result};

/// Largest dimension handled by dense eigendecomposition.
pub const N_DENSE_MAX: usize = 4000;

pub(crate) fn sample_rng(master_seed: u64, sample_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(sample_index);
    rng
}

/// Draws sample `sample_index`. The diagonal is zero; the upper triangle is
/// filled row by row and mirrored.
pub fn sample_matrix(config: &EnsembleConfig, sample_index: u64) -> DMatrix<f64> {
    let n = config.n;
    let p = config.edge_probability();
    let scale = 1.0 / config.rho_f64().sqrt();
    let mut rng = sample_rng(config.master_seed, sample_index);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                let v = config.dist.draw(&mut rng) * scale;
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
    }
    h
}

/// Eigenvalues of a symmetric matrix, or an error when the result is not
/// finite or loses the Frobenius norm.
pub(crate) fn eigenvalues(h: &DMatrix<f64>) -> Result<Vec<f64>> {
    if h.nrows() > N_DENSE_MAX {
        return Err(Error::Contract(format!("dimension {} exceeds {N_DENSE_MAX}", h.nrows())));
    }
    let ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    if ev.iter().any(|x| !x.is_finite()) {
        return Err(Error::Inconsistency("eigensolver produced a non-finite value".into()));
    }
    let frob: f64 = h.iter().map(|x| x * x).sum();
    let sum_sq: f64 = ev.iter().map(|x| x * x).sum();
    if (frob - sum_sq).abs() > 1e-8 * frob.max(1.0) {
        return Err(Error::Inconsistency(format!(
            "eigenvalues lost the Frobenius norm ({sum_sq} vs {frob})"
        )));
    }
    Ok(ev)
}

pub(crate) fn powers_from_eigenvalues(ev: &[f64], s_max: usize) -> Vec<f64> {
    let sq: Vec<f64> = ev.iter().map(|x| x * x).collect();
    let mut cur = vec![1.0; ev.len()];
    (1..=s_max)
        .map(|_| {
            for (c, q) in cur.iter_mut().zip(&sq) {
                *c *= q;
            }
            super::pairwise_sum(&cur)
        })
        .collect()
}

/// `[Tr H^2, Tr H^4, ..., Tr H^{2 s_max}]` from the spectrum.
pub fn trace_powers(h: &DMatrix<f64>, s_max: usize) -> Result<Vec<f64>> {
    Ok(powers_from_eigenvalues(&eigenvalues(h)?, s_max))
}
