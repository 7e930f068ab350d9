//! Matrix product operator evolution with SVD compression.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::baselines::dense::ProjectorSet;
use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::fib::PHI;
use crate::rep::{generator_matrix_fib_only, Mat8};

/// Default cut for singular values treated as zero.
pub const DEFAULT_SVD_THRESHOLD: f64 = 1e-12;

/// Bytes per stored complex entry.
pub const BYTES_PER_ENTRY: usize = 16;

/// Closed-form cost model used for FLOP accounting. All counts are real
/// floating point operations; a complex multiply-add costs `CMAC`.
pub mod flop_model {
    /// Real flops per complex multiply-add.
    pub const CMAC: u64 = 8;
    /// Complex factor applied to the real SVD model.
    pub const SVD_COMPLEX_FACTOR: u64 = 4;
    /// Leading coefficients of the thin SVD model `4 M N^2 + 22 N^3`.
    pub const SVD_MN2: u64 = 4;
    pub const SVD_N3: u64 = 22;

    /// Dense `(m x k) * (k x n)` contraction.
    pub fn contraction(m: usize, k: usize, n: usize) -> u64 {
        CMAC * (m as u64) * (k as u64) * (n as u64)
    }

    /// Thin SVD of an `m x n` complex matrix.
    pub fn svd(m: usize, n: usize) -> u64 {
        let (big, small) = if m >= n { (m as u64, n as u64) } else { (n as u64, m as u64) };
        SVD_COMPLEX_FACTOR * (SVD_MN2 * big * small * small + SVD_N3 * small * small * small)
    }

    /// Applying a 3-site operator with `nnz` nonzero entries to a blob with
    /// outer dimensions `dl x dr`.
    pub fn gate(nnz: usize, dl: usize, dr: usize) -> u64 {
        CMAC * (nnz as u64) * 8 * (dl as u64) * (dr as u64)
    }
}

/// One MPO site with index order `[left][bra][ket][right]`.
#[derive(Debug, Clone)]
pub struct SiteTensor {
    pub dl: usize,
    pub dr: usize,
    pub data: Vec<C64>,
}

impl SiteTensor {
    fn identity() -> Self {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        Self { dl: 1, dr: 1, data: vec![one, z, z, one] }
    }

    #[inline]
    fn at(&self, l: usize, p: usize, r: usize) -> C64 {
        self.data[(l * 4 + p) * self.dr + r]
    }
}

/// Working state and bookkeeping of an MPO run.
#[derive(Debug, Clone)]
pub struct MpoState {
    pub sites: Vec<SiteTensor>,
    pub bond_dims: Vec<usize>,
    pub chi_max_seen: usize,
    pub truncation_threshold: f64,
    pub chi_limit: Option<usize>,
    /// Largest bond after each generator.
    pub step_bonds: Vec<usize>,
    /// Sum of squared discarded singular values, relative to the largest.
    pub discarded_weight: f64,
    pub flops: u64,
    /// Largest total size of resident tensors, SVD workspace excluded.
    pub peak_bytes: usize,
}

/// Summary of an MPO run without the tensors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MpoStats {
    pub chi_limit: Option<usize>,
    pub chi_max_seen: usize,
    pub bond_dims: Vec<usize>,
    pub step_bonds: Vec<usize>,
    pub discarded_weight: f64,
    pub flops: u64,
    pub peak_bytes: usize,
}

impl MpoState {
    /// The identity operator on `n` qubits (all bonds 1).
    pub fn identity(n: usize, chi_limit: Option<usize>, svd_threshold: f64) -> Self {
        let sites = vec![SiteTensor::identity(); n];
        let mut s = Self {
            sites,
            bond_dims: vec![1; n + 1],
            chi_max_seen: 1,
            truncation_threshold: svd_threshold,
            chi_limit,
            step_bonds: Vec::new(),
            discarded_weight: 0.0,
            flops: 0,
            peak_bytes: 0,
        };
        s.peak_bytes = s.resident_bytes(0);
        s
    }

    pub fn n(&self) -> usize {
        self.sites.len()
    }

    fn resident_bytes(&self, extra_entries: usize) -> usize {
        (self.sites.iter().map(|t| t.data.len()).sum::<usize>() + extra_entries) * BYTES_PER_ENTRY
    }

    pub fn stats(&self) -> MpoStats {
        MpoStats {
            chi_limit: self.chi_limit,
            chi_max_seen: self.chi_max_seen,
            bond_dims: self.bond_dims.clone(),
            step_bonds: self.step_bonds.clone(),
            discarded_weight: self.discarded_weight,
            flops: self.flops,
            peak_bytes: self.peak_bytes,
        }
    }

    /// `O <- G O` for a 3-site operator on sites `q, q+1, q+2`.
    pub fn apply_3site(&mut self, q: usize, g: &Mat8) {
        let (w1, w2, w3) = (&self.sites[q], &self.sites[q + 1], &self.sites[q + 2]);
        let (dl, d1, d2, dr) = (w1.dl, w1.dr, w2.dr, w3.dr);

        // w1 w2 -> [l][p1][p2][b]
        let mut t12 = vec![C64::new(0.0, 0.0); dl * 16 * d2];
        for l in 0..dl {
            for p1 in 0..4 {
                for a in 0..d1 {
                    let x = w1.at(l, p1, a);
                    if x.norm_sqr() == 0.0 {
                        continue;
                    }
                    for p2 in 0..4 {
                        let base = ((l * 4 + p1) * 4 + p2) * d2;
                        for b in 0..d2 {
                            t12[base + b] += x * w2.at(a, p2, b);
                        }
                    }
                }
            }
        }
        // blob [l][p1][p2][p3][r]
        let mut blob = vec![C64::new(0.0, 0.0); dl * 64 * dr];
        for row in 0..dl * 16 {
            for b in 0..d2 {
                let x = t12[row * d2 + b];
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                for p3 in 0..4 {
                    let base = (row * 4 + p3) * dr;
                    for r in 0..dr {
                        blob[base + r] += x * w3.at(b, p3, r);
                    }
                }
            }
        }
        self.flops += flop_model::contraction(dl * 4, d1, 4 * d2) + flop_model::contraction(dl * 16, d2, 4 * dr);
        self.peak_bytes = self.peak_bytes.max(self.resident_bytes(blob.len()));

        // act on the bra legs; p = 2 * bra + ket
        let nz: Vec<Vec<(usize, C64)>> = (0..8)
            .map(|o| (0..8).filter(|&i| g[o][i].norm_sqr() > 0.0).map(|i| (i, g[o][i])).collect())
            .collect();
        let nnz: usize = nz.iter().map(Vec::len).sum();
        let mut out = vec![C64::new(0.0, 0.0); blob.len()];
        let phys = |bra: usize, ket: usize| {
            let p1 = 2 * ((bra >> 2) & 1) + ((ket >> 2) & 1);
            let p2 = 2 * ((bra >> 1) & 1) + ((ket >> 1) & 1);
            let p3 = 2 * (bra & 1) + (ket & 1);
            (p1 * 4 + p2) * 4 + p3
        };
        for l in 0..dl {
            for ket in 0..8 {
                for (o, row) in nz.iter().enumerate() {
                    let dst = (l * 64 + phys(o, ket)) * dr;
                    for &(i, v) in row {
                        let src = (l * 64 + phys(i, ket)) * dr;
                        for r in 0..dr {
                            out[dst + r] += v * blob[src + r];
                        }
                    }
                }
            }
        }
        self.flops += flop_model::gate(nnz, dl, dr);

        // split (l p1) | (p2 p3 r), then (c p2) | (p3 r)
        let (left, rest, c1) = self.split(&out, dl * 4, 16 * dr);
        let (mid, right, c2) = self.split(&rest, c1 * 4, 4 * dr);
        self.sites[q] = SiteTensor { dl, dr: c1, data: left };
        self.sites[q + 1] = SiteTensor { dl: c1, dr: c2, data: mid };
        self.sites[q + 2] = SiteTensor { dl: c2, dr, data: right };
        self.bond_dims[q + 1] = c1;
        self.bond_dims[q + 2] = c2;
        let step_max = *self.bond_dims.iter().max().unwrap_or(&1);
        self.chi_max_seen = self.chi_max_seen.max(step_max);
        self.step_bonds.push(step_max);
        self.peak_bytes = self.peak_bytes.max(self.resident_bytes(0));
    }

    /// SVD split of a row-major `m x n` matrix into `U` (`m x k`) and
    /// `S V^dagger` (`k x n`), dropping small and excess singular values.
    fn split(&mut self, a: &[C64], m: usize, n: usize) -> (Vec<C64>, Vec<C64>, usize) {
        let mat = Mat::<C64>::from_fn(m, n, |i, j| a[i * n + j]);
        let svd = mat.thin_svd().expect("svd did not converge");
        self.flops += flop_model::svd(m, n);
        let s: Vec<f64> = (0..m.min(n)).map(|i| svd.S()[i].re).collect();
        let smax = s.first().copied().unwrap_or(0.0);
        let mut keep = s.iter().take_while(|&&x| smax > 0.0 && x >= self.truncation_threshold * smax).count();
        if let Some(lim) = self.chi_limit {
            keep = keep.min(lim);
        }
        let keep = keep.max(1);
        if smax > 0.0 {
            self.discarded_weight += s[keep..].iter().map(|x| (x / smax).powi(2)).sum::<f64>();
        }
        let (u, v) = (svd.U(), svd.V());
        let mut left = vec![C64::new(0.0, 0.0); m * keep];
        for i in 0..m {
            for k in 0..keep {
                left[i * keep + k] = u[(i, k)];
            }
        }
        let mut right = vec![C64::new(0.0, 0.0); keep * n];
        for k in 0..keep {
            for j in 0..n {
                right[k * n + j] = v[(j, k)].conj() * s[k];
            }
        }
        (left, right, keep)
    }

    /// `tr(O P) / phi^{n-1}` for the projector chain `P`.
    pub fn projected_trace(&mut self, proj: &ProjectorSet) -> C64 {
        let n = self.n();
        let weight = |pair: usize, prev: usize, x: usize| {
            let table = if pair == 0 {
                &proj.boundary0
            } else if pair == n - 2 {
                &proj.boundary1
            } else {
                &proj.mid
            };
            table[2 * prev + x]
        };
        // env[a][x]: left bond a, last diagonal bit x
        let w0 = &self.sites[0];
        let mut env: Vec<[C64; 2]> = (0..w0.dr).map(|r| [w0.at(0, 0, r), w0.at(0, 3, r)]).collect();
        for k in 1..n {
            let w = &self.sites[k];
            let mut next = vec![[C64::new(0.0, 0.0); 2]; w.dr];
            for (a, e) in env.iter().enumerate() {
                for x in 0..2 {
                    let c = e[0] * weight(k - 1, 0, x) + e[1] * weight(k - 1, 1, x);
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    for (r, slot) in next.iter_mut().enumerate() {
                        slot[x] += c * w.at(a, 3 * x, r);
                    }
                }
            }
            self.flops += flop_model::contraction(w.dl, 4, w.dr);
            env = next;
        }
        (env[0][0] + env[0][1]) / PHI.powi(n as i32 - 1)
    }
}

/// MPO evaluation of the weighted trace. `chi_limit = None` means no cap.
pub fn mpo_proj(b: &BraidWord, chi_limit: Option<usize>, svd_threshold: f64) -> Result<(C64, MpoState)> {
    if chi_limit == Some(0) {
        return Err(Error::Range("chi_limit must be >= 1".into()));
    }
    let n = b.qubits();
    let mut state = MpoState::identity(n, chi_limit, svd_threshold);
    let plus = generator_matrix_fib_only(1);
    let minus = generator_matrix_fib_only(-1);
    for &g in b.word() {
        let m = if g > 0 { &plus } else { &minus };
        state.apply_3site(g.unsigned_abs() as usize - 1, m);
    }
    let value = state.projected_trace(&ProjectorSet::default());
    Ok((value, state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_chi_one() {
        let b = BraidWord::identity(5).unwrap();
        let (v, st) = mpo_proj(&b, Some(1), DEFAULT_SVD_THRESHOLD).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
        assert_eq!(st.chi_max_seen, 1);
        assert_eq!(st.bond_dims[0], 1);
        assert_eq!(st.bond_dims[6], 1);
    }

    #[test]
    fn flop_model_closed_form() {
        assert_eq!(flop_model::contraction(2, 3, 4), 8 * 24);
        assert_eq!(flop_model::svd(10, 4), 4 * (4 * 10 * 16 + 22 * 64));
        assert_eq!(flop_model::svd(4, 10), flop_model::svd(10, 4));
    }
}
