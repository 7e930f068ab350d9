//! Packed vectors on the Fibonacci basis `F_n` and local operator kernels.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fib::{enumerate_basis, FibWeights, MAX_QUBITS};
use crate::rep::{generator_matrix, Mat8};

/// Index map `F_n <-> [0, f_n)` plus kernels acting on packed vectors.
///
/// Basis position `k` holds the string whose tail `s_2 .. s_{n-1}` has
/// Zeckendorf rank `k`, so `rank(s) = sum over i >= 2 with s_i = 0 of f_i`.
#[derive(Debug, Clone)]
pub struct SubspaceView {
    n: usize,
    masks: Vec<u64>,
    fib: Vec<u64>,
}

impl SubspaceView {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Range(format!("subspace view needs n >= 3, got {n}")));
        }
        if n > MAX_QUBITS {
            return Err(Error::SizeCap { n, cap: MAX_QUBITS });
        }
        let masks = enumerate_basis(n)?.iter().map(|s| s.mask()).collect();
        Ok(Self { n, masks, fib: FibWeights::new(n).fib })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    #[inline]
    pub fn mask(&self, k: usize) -> u64 {
        self.masks[k]
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Position of a Fibonacci mask in the packed basis.
    pub fn index_of(&self, mask: u64) -> usize {
        let n = self.n;
        let mut k = 0u64;
        for i in 2..n {
            if (mask >> (n - 1 - i)) & 1 == 0 {
                k += self.fib[i];
            }
        }
        k as usize
    }

    /// Packed unit vector for basis position `k`.
    pub fn unit(&self, k: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[k] = C64::new(1.0, 0.0);
        v
    }

    /// `out = L v` for a 3-qubit operator `L` on qubits `q, q+1, q+2`.
    ///
    /// `L` may only couple triples that differ in the middle bit, which is
    /// the case for the generators and the cap operator.
    pub fn apply_local(&self, q: usize, l: &Mat8, v: &[C64], out: &mut [C64]) {
        let n = self.n;
        debug_assert!(q + 3 <= n);
        let shift = n - 3 - q;
        let mid = q + 1;
        // flipping s_mid from 1 to 0 adds f_mid to the rank
        let step = if mid >= 2 { self.fib[mid] as usize } else { 0 };
        for (a, &mask) in self.masks.iter().enumerate() {
            let t = ((mask >> shift) & 7) as usize;
            let mut acc = l[t][t] * v[a];
            let u = t ^ 0b010;
            let c = l[t][u];
            if c.norm_sqr() > 0.0 && mid >= 2 && crate::rep::is_fib_triple(u) {
                let partner = if t & 0b010 != 0 { a + step } else { a - step };
                acc += c * v[partner];
            }
            out[a] = acc;
        }
    }

    /// Applies `U_sigma_|g|^{sign g}` in place using `scratch`.
    pub fn apply_generator(&self, g: i32, v: &mut Vec<C64>, scratch: &mut Vec<C64>) {
        let m = generator_matrix(g.signum()).entries;
        self.apply_local(g.unsigned_abs() as usize - 1, &m, v, scratch);
        std::mem::swap(v, scratch);
    }

    /// `U_B v` for a braid word.
    pub fn evolve(&self, word: &[i32], v: &[C64]) -> Vec<C64> {
        let mut cur = v.to_vec();
        let mut scratch = vec![C64::new(0.0, 0.0); self.dim()];
        for &g in word {
            self.apply_generator(g, &mut cur, &mut scratch);
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::StateVector;
    use crate::rep::Op;

    #[test]
    fn index_matches_enumeration() {
        let v = SubspaceView::new(9).unwrap();
        for k in 0..v.dim() {
            assert_eq!(v.index_of(v.mask(k)), k);
        }
    }

    #[test]
    fn packed_matches_dense() {
        for n in 3..=8 {
            let view = SubspaceView::new(n).unwrap();
            for k in 0..view.dim() {
                for g in 1..n as i32 - 1 {
                    for sign in [1, -1] {
                        let packed = view.evolve(&[sign * g], &view.unit(k));
                        let mut sv = StateVector::basis(n, view.mask(k));
                        sv.apply(&Op::Gen { q: g as usize - 1, sign });
                        for (j, p) in packed.iter().enumerate() {
                            let d = sv.amplitudes()[view.mask(j) as usize];
                            assert!((p - d).norm() < 1e-12);
                        }
                        let inside: f64 = packed.iter().map(|a| a.norm_sqr()).sum();
                        assert!((inside - 1.0).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
