//! Dense projector contraction for small `n`.

use num_complex::Complex64 as C64;

use super::exact::pairwise_sum;
use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::fib::PHI;
use crate::qsim::StateVector;
use crate::rep::{generator_matrix, generator_matrix_fib_only};

/// Largest qubit count accepted by [`tn_proj_dense`].
pub const DENSE_CAP: usize = 12;

/// Diagonal projectors on neighbouring qubit pairs, indexed by the pair
/// value `2 s_i + s_{i+1}`.
#[derive(Debug, Clone, Copy)]
pub struct ProjectorSet {
    pub boundary0: [f64; 4],
    pub mid: [f64; 4],
    pub boundary1: [f64; 4],
}

impl Default for ProjectorSet {
    fn default() -> Self {
        Self {
            boundary0: [0.0, 1.0, 0.0, 0.0],
            mid: [0.0, 1.0, 1.0, 1.0],
            boundary1: [0.0, PHI, 1.0, PHI],
        }
    }
}

impl ProjectorSet {
    /// Diagonal of the full chain `P_0 (x) P_F ... (x) P_1` on `n` qubits.
    pub fn chain_diagonal(&self, n: usize) -> Vec<f64> {
        let dim = 1usize << n;
        (0..dim)
            .map(|x| {
                let pair = |i: usize| (x >> (n - 2 - i)) & 3;
                let mut w = self.boundary0[pair(0)];
                for i in 1..n - 2 {
                    w *= self.mid[pair(i)];
                }
                w * self.boundary1[pair(n - 2)]
            })
            .collect()
    }
}

/// Dense evaluation of the weighted trace: the full `2^n x 2^n` operator is
/// built gate by gate, multiplied by the projector chain and traced.
///
/// `zero_non_fib` selects the zero action on the non-Fibonacci triples.
pub fn tn_proj_dense_with(b: &BraidWord, zero_non_fib: bool) -> Result<C64> {
    let n = b.qubits();
    if n > DENSE_CAP {
        return Err(Error::SizeCap { n, cap: DENSE_CAP });
    }
    let dim = 1usize << n;
    let mut cols: Vec<StateVector> = (0..dim as u64).map(|x| StateVector::basis(n, x)).collect();
    for &g in b.word() {
        let m = if zero_non_fib {
            generator_matrix_fib_only(g.signum())
        } else {
            generator_matrix(g.signum()).entries
        };
        let q = g.unsigned_abs() as usize - 1;
        for c in cols.iter_mut() {
            c.apply_mat8(q, &m);
        }
    }
    // tr(U P) with P diagonal
    let p = ProjectorSet::default().chain_diagonal(n);
    let terms: Vec<C64> = cols.iter().enumerate().map(|(x, c)| c.amplitudes()[x] * p[x]).collect();
    Ok(pairwise_sum(&terms) / PHI.powi(n as i32 - 1))
}

pub fn tn_proj_dense(b: &BraidWord) -> Result<C64> {
    tn_proj_dense_with(b, true)
}
