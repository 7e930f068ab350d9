//! Benchmark braids with a known Jones value.
//!
//! A benchmark is a split product of `k` three-strand braids `b_i`, whose
//! Jones value factorizes, hidden by conjugation with a random brick-wall
//! braid `A`. The blocks are drawn so that the product of the block
//! magnitudes `|E_s[<s|U_b|s>]|` is close to uniform on `[0, 1]`.

use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::exact::{exact_weighted_trace, jones_markov_exact};
use crate::braid::{serialize_braid, BraidWord};
use crate::error::{Error, Result};
use crate::fib::PHI;

/// Below this magnitude a table entry counts as zero and is dropped.
const ZERO_CUTOFF: f64 = 1e-12;
/// Entries whose `T` agree to this tolerance share a group.
const GROUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub word: Vec<i32>,
    /// `E_s[<s|U_b|s>]` on three strands.
    pub value: C64,
    /// `log |value|`.
    pub log_abs: f64,
    /// Jones value of the Markov closure.
    pub jones: C64,
}

/// Entries sharing one value of `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueGroup {
    pub t: f64,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeStrandTable {
    pub max_len: usize,
    pub entries: Vec<TableEntry>,
    /// Sorted by decreasing `t`.
    pub groups: Vec<ValueGroup>,
}

/// Every word over `{+-1, +-2}` of length at most `max_len`, evaluated with
/// the exact oracle.
pub fn build_three_strand_table(max_len: usize) -> Result<ThreeStrandTable> {
    if max_len == 0 {
        return Err(Error::Config("table word length must be at least 1".into()));
    }
    let letters = [1, -1, 2, -2];
    let mut words: Vec<Vec<i32>> = vec![vec![]];
    let mut frontier: Vec<Vec<i32>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * 4);
        for w in &frontier {
            for &g in &letters {
                let mut x = w.clone();
                x.push(g);
                next.push(x);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let mut entries = Vec::new();
    for word in words {
        let b = BraidWord::new(3, word)?;
        let value = exact_weighted_trace(&b)?;
        if value.norm() < ZERO_CUTOFF {
            continue;
        }
        let jones = jones_markov_exact(&b)?;
        entries.push(TableEntry { word: b.into_word(), value, log_abs: value.norm().ln(), jones });
    }
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| entries[b].log_abs.total_cmp(&entries[a].log_abs));
    let mut groups: Vec<ValueGroup> = Vec::new();
    for i in order {
        let t = entries[i].log_abs;
        match groups.last_mut() {
            Some(g) if (g.t - t).abs() <= GROUP_TOL => g.members.push(i),
            _ => groups.push(ValueGroup { t, members: vec![i] }),
        }
    }
    Ok(ThreeStrandTable { max_len, entries, groups })
}

impl ThreeStrandTable {
    pub fn group_values(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.t).collect()
    }
}

/// Group probabilities for `k` blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeDesign {
    pub k: usize,
    pub p: Vec<f64>,
    /// Sum of squared MGF mismatches over the grid.
    pub residual: f64,
    /// `|p - proj(p - grad)|_inf` at the returned point.
    pub stationarity: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Fit settings for [`fit_magnitude_design_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub grid_points: usize,
    pub grid_max: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { grid_points: 100, grid_max: 7.5, tolerance: 1e-8, max_iter: 100_000 }
    }
}

pub fn fit_magnitude_design(table: &ThreeStrandTable, k: usize) -> Result<MagnitudeDesign> {
    fit_magnitude_design_with(table, k, FitOptions::default())
}

/// Least squares fit of the per-block MGF `sum_j p_j e^{x t_j}` to
/// `(x+1)^{-1/k}` on a grid, with `p` on the simplex. Solved by accelerated
/// projected gradient with adaptive restart, from `p_j = 1/m`. When the iteration cap is hit the
/// best iterate is returned with `converged = false`.
pub fn fit_magnitude_design_with(table: &ThreeStrandTable, k: usize, opts: FitOptions) -> Result<MagnitudeDesign> {
    let m = table.groups.len();
    if m == 0 {
        return Err(Error::Config("empty three-strand table".into()));
    }
    if k == 0 {
        return Err(Error::Config("block count must be at least 1".into()));
    }
    let xs: Vec<f64> = (0..opts.grid_points)
        .map(|i| opts.grid_max * i as f64 / (opts.grid_points - 1).max(1) as f64)
        .collect();
    let t = table.group_values();
    // a[r][j] = e^{x_r t_j}
    let a: Vec<Vec<f64>> = xs.iter().map(|&x| t.iter().map(|&tj| (x * tj).exp()).collect()).collect();
    let y: Vec<f64> = xs.iter().map(|&x| (x + 1.0).powf(-1.0 / k as f64)).collect();
    let resid = |p: &[f64]| -> Vec<f64> {
        a.iter().zip(&y).map(|(row, yr)| row.iter().zip(p).map(|(u, v)| u * v).sum::<f64>() - yr).collect()
    };
    let grad = |p: &[f64]| -> Vec<f64> {
        let r = resid(p);
        (0..m).map(|j| 2.0 * a.iter().zip(&r).map(|(row, rr)| row[j] * rr).sum::<f64>()).collect()
    };
    let loss = |p: &[f64]| resid(p).iter().map(|r| r * r).sum::<f64>();
    // Lipschitz constant of the gradient: 2 * largest eigenvalue of A^T A
    let gram: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| a.iter().map(|row| row[i] * row[j]).sum()).collect())
        .collect();
    let lip = 2.0 * largest_eigenvalue(&gram) * 1.01;
    let step = 1.0 / lip;

    let mut p = vec![1.0 / m as f64; m];
    let mut z = p.clone();
    let mut tk = 1.0f64;
    let mut best = (loss(&p), p.clone());
    let mut stat = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        let g = grad(&z);
        let next = project_simplex(&z.iter().zip(&g).map(|(zi, gi)| zi - step * gi).collect::<Vec<_>>());
        // restart the momentum when it points uphill
        let uphill: f64 = z.iter().zip(&next).zip(&p).map(|((zi, ni), pi)| (zi - ni) * (ni - pi)).sum();
        if uphill > 0.0 {
            tk = 1.0;
        }
        let t_next = (1.0 + (1.0 + 4.0 * tk * tk).sqrt()) / 2.0;
        let mom = (tk - 1.0) / t_next;
        z = next.iter().zip(&p).map(|(n, o)| n + mom * (n - o)).collect();
        p = next;
        tk = t_next;
        let l = loss(&p);
        if l < best.0 {
            best = (l, p.clone());
        }
        if it % 50 == 0 || it + 1 == opts.max_iter {
            stat = stationarity(&best.1, &grad(&best.1));
            if stat < opts.tolerance {
                break;
            }
        }
    }
    let (residual, p) = best;
    Ok(MagnitudeDesign { k, p, residual, stationarity: stat, iterations, converged: stat < opts.tolerance })
}

fn stationarity(p: &[f64], g: &[f64]) -> f64 {
    let step: Vec<f64> = p.iter().zip(g).map(|(a, b)| a - b).collect();
    let q = project_simplex(&step);
    p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn largest_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lam = 0.0;
    for _ in 0..500 {
        let w: Vec<f64> = m.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let done = (norm - lam).abs() <= 1e-12 * norm;
        lam = norm;
        v = next;
        if done {
            break;
        }
    }
    lam
}

/// Euclidean projection onto `{p >= 0, sum p = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let th = (css - 1.0) / (i + 1) as f64;
        if ui - th > 0.0 {
            theta = th;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

impl MagnitudeDesign {
    /// A table entry: group by `p`, member uniformly within the group.
    pub fn sample_block<'t, R: Rng + ?Sized>(&self, table: &'t ThreeStrandTable, rng: &mut R) -> &'t TableEntry {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut gi = self.p.len() - 1;
        for (j, &pj) in self.p.iter().enumerate() {
            acc += pj;
            if u < acc {
                gi = j;
                break;
            }
        }
        // skip zero-probability groups that only the rounding tail could reach
        while self.p[gi] == 0.0 && gi > 0 {
            gi -= 1;
        }
        let members = &table.groups[gi].members;
        &table.entries[*members.choose(rng).expect("nonempty group")]
    }
}

/// Brick-wall conjugator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugatorOptions {
    /// Probability that a brick is a crossing rather than the identity.
    pub crossing_probability: f64,
}

impl Default for ConjugatorOptions {
    fn default() -> Self {
        Self { crossing_probability: 2.0 / 3.0 }
    }
}

/// A random conjugator `A` and a word `A_inv` for its inverse.
///
/// `A` is `layers` brick-wall layers. `A_inv` undoes the permutation of `A`
/// with odd-even transposition sort. Every crossing gets its sign from one
/// random total order on the strands: the crossing of positions `i, i+1` is
/// positive iff the strand at `i+1` precedes the strand at `i`. Two strands
/// therefore always cross the same way, which makes `A A_inv` trivial.
pub fn generate_conjugator<R: Rng + ?Sized>(
    strands: usize,
    layers: usize,
    opts: ConjugatorOptions,
    rng: &mut R,
) -> Result<(BraidWord, BraidWord)> {
    if strands < 2 {
        return Err(Error::TooFewStrands(strands));
    }
    let mut rank: Vec<usize> = (0..strands).collect();
    rank.shuffle(rng);
    // pos[p] = strand at position p
    let mut pos: Vec<usize> = (0..strands).collect();
    let cross = |pos: &mut Vec<usize>, i: usize, out: &mut Vec<i32>| {
        // generator i+1 swaps positions i and i+1
        let sign = if rank[pos[i + 1]] < rank[pos[i]] { 1 } else { -1 };
        out.push(sign * (i as i32 + 1));
        pos.swap(i, i + 1);
    };
    let mut a = Vec::new();
    for layer in 0..layers {
        let mut i = layer % 2;
        while i + 1 < strands {
            if rng.gen::<f64>() < opts.crossing_probability {
                cross(&mut pos, i, &mut a);
            }
            i += 2;
        }
    }
    let mut a_inv = Vec::new();
    for round in 0..strands {
        let mut i = round % 2;
        while i + 1 < strands {
            if pos[i] > pos[i + 1] {
                cross(&mut pos, i, &mut a_inv);
            }
            i += 2;
        }
    }
    debug_assert!(pos.iter().enumerate().all(|(p, &s)| p == s));
    Ok((BraidWord::new(strands, a)?, BraidWord::new(strands, a_inv)?))
}

/// A generated benchmark braid and how it was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkBraid {
    pub braid: BraidWord,
    pub known_jones: C64,
    pub blocks: Vec<Vec<i32>>,
    pub layers: usize,
    pub seed: u64,
}

/// `A_inv (b_1 (x) ... (x) b_k) A` on `3k` strands.
pub fn generate_benchmark<R: Rng + ?Sized>(
    table: &ThreeStrandTable,
    design: &MagnitudeDesign,
    layers: usize,
    opts: ConjugatorOptions,
    seed: u64,
    rng: &mut R,
) -> Result<BenchmarkBraid> {
    let k = design.k;
    if design.p.len() != table.groups.len() {
        return Err(Error::Config("design does not match the table".into()));
    }
    let strands = 3 * k;
    let mut blocks = Vec::with_capacity(k);
    let mut inner = Vec::new();
    let mut known = C64::new(PHI.powi(k as i32 - 1), 0.0);
    for i in 0..k {
        let e = design.sample_block(table, rng);
        let off = 3 * i as i32;
        inner.extend(e.word.iter().map(|&g| g.signum() * (g.abs() + off)));
        blocks.push(e.word.clone());
        known *= e.jones;
    }
    let (a, a_inv) = generate_conjugator(strands, layers, opts, rng)?;
    let mut word = a_inv.into_word();
    word.extend(inner);
    word.extend_from_slice(a.word());
    Ok(BenchmarkBraid { braid: BraidWord::new(strands, word)?, known_jones: known, blocks, layers, seed })
}

/// Suite settings: block count, layer range and an optional crossing window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub k: usize,
    pub layers: (usize, usize),
    pub crossings: Option<(usize, usize)>,
    pub conjugator: ConjugatorOptions,
    pub max_attempts: usize,
}

/// `count` benchmarks; braid `i` uses RNG stream `i` of `seed`. Draws outside
/// the crossing window are redrawn on the same stream.
pub fn generate_suite(
    table: &ThreeStrandTable,
    design: &MagnitudeDesign,
    count: usize,
    opts: SuiteOptions,
    seed: u64,
) -> Result<Vec<BenchmarkBraid>> {
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = crate::qsim::stream_rng(seed, i as u64);
            for _ in 0..opts.max_attempts.max(1) {
                let layers = rng.gen_range(opts.layers.0..=opts.layers.1);
                let bb = generate_benchmark(table, design, layers, opts.conjugator, seed, &mut rng)?;
                match opts.crossings {
                    Some((lo, hi)) if !(lo..=hi).contains(&bb.braid.crossings()) => continue,
                    _ => return Ok(bb),
                }
            }
            Err(Error::Config(format!("no braid in the crossing window after {} attempts", opts.max_attempts)))
        })
        .collect()
}

/// One line of a benchmark file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub braid_text: String,
    pub known_jones_re: f64,
    pub known_jones_im: f64,
    pub k: usize,
    pub layers: usize,
    pub seed: u64,
    #[serde(default)]
    pub blocks: Vec<Vec<i32>>,
}

impl From<&BenchmarkBraid> for BenchmarkRecord {
    fn from(b: &BenchmarkBraid) -> Self {
        Self {
            braid_text: serialize_braid(&b.braid),
            known_jones_re: b.known_jones.re,
            known_jones_im: b.known_jones.im,
            k: b.blocks.len(),
            layers: b.layers,
            seed: b.seed,
            blocks: b.blocks.clone(),
        }
    }
}

impl BenchmarkRecord {
    pub fn braid(&self) -> Result<BraidWord> {
        crate::braid::parse_braid(&self.braid_text)
    }

    pub fn known_jones(&self) -> C64 {
        C64::new(self.known_jones_re, self.known_jones_im)
    }
}

/// Kolmogorov-Smirnov distance of a sample to Uniform[0, 1].
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = x.clamp(0.0, 1.0);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// KS distance to Uniform[0, 1] of the exact law of the product of block
/// magnitudes under `design`, by enumerating group choices.
pub fn design_ks(table: &ThreeStrandTable, design: &MagnitudeDesign) -> f64 {
    let t = table.group_values();
    let mut dist: Vec<(f64, f64)> = vec![(1.0, 1.0)];
    for _ in 0..design.k {
        let mut next = Vec::with_capacity(dist.len() * t.len());
        for &(v, p) in &dist {
            for (tj, &pj) in t.iter().zip(&design.p) {
                if pj > 0.0 {
                    next.push((v * tj.exp(), p * pj));
                }
            }
        }
        dist = next;
    }
    dist.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cdf = 0.0;
    let mut ks: f64 = 0.0;
    for (v, p) in dist {
        ks = ks.max((v - cdf).abs());
        cdf += p;
        ks = ks.max((cdf - v).abs());
    }
    ks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::stream_rng;

    #[test]
    fn table_basics() {
        let t = build_three_strand_table(2).unwrap();
        assert_eq!(t.entries[0].word, Vec::<i32>::new());
        assert!((t.entries[0].value - 1.0).norm() < 1e-14);
        assert!(t.entries.iter().all(|e| e.value.norm() <= 1.0 + 1e-12));
        let id = t.entries.iter().find(|e| e.word == [1, -1]).unwrap();
        assert!((id.value - 1.0).norm() < 1e-12);
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.9, -0.3]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(p.iter().all(|&x| x >= 0.0));
        assert_eq!(project_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
    }

    #[test]
    fn conjugator_layers_zero() {
        let mut rng = stream_rng(3, 0);
        let (a, ai) = generate_conjugator(5, 0, ConjugatorOptions::default(), &mut rng).unwrap();
        assert!(a.word().is_empty() && ai.word().is_empty());
    }

    #[test]
    fn conjugator_permutation_identity() {
        for s in 0..100 {
            let mut rng = stream_rng(s, 1);
            let strands = 2 + (s as usize % 9);
            let (a, ai) = generate_conjugator(strands, 1 + s as usize % 12, ConjugatorOptions::default(), &mut rng)
                .unwrap();
            let c = a.concat(&ai).unwrap();
            assert_eq!(c.permutation(), (0..strands).collect::<Vec<_>>());
        }
    }

    #[test]
    fn ks_of_grid_is_small() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_uniform(&xs) < 1e-3);
    }
}
