//! Heuristic crossing reduction.
//!
//! Free cancellation is done modulo far commutation. On top of that a seeded
//! hill climb tries slides, commutations and (when allowed) cyclic
//! rotations, and Dehornoy handle reduction is tried as a further pass. The
//! best word seen is returned, so the crossing count never increases.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::braid::{slide_triple, BraidWord};

/// Tuning for [`simplify_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplifyOptions {
    /// Number of random moves tried by the hill climb.
    pub budget: usize,
    pub seed: u64,
    /// Allow cyclic rotation. This keeps the Markov closure but changes the
    /// braid by a conjugation, so turn it off when the braid itself (or its
    /// plat closure) must be kept.
    pub cyclic: bool,
    /// Step cap for one run of handle reduction.
    pub handle_steps: usize,
}

impl Default for SimplifyOptions {
    fn default() -> Self {
        Self { budget: 10_000, seed: 0, cyclic: true, handle_steps: 20_000 }
    }
}

/// Simplify with cyclic moves allowed; the Markov closure is preserved.
pub fn simplify(b: &BraidWord, budget: usize, seed: u64) -> BraidWord {
    simplify_with(b, SimplifyOptions { budget, seed, ..SimplifyOptions::default() })
}

pub fn simplify_with(b: &BraidWord, opts: SimplifyOptions) -> BraidWord {
    let strands = b.strands();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cur = reduce(b.word());
    if let Some(h) = handle_reduce(&cur, opts.handle_steps, 8 * cur.len().max(8)) {
        if h.len() < cur.len() {
            cur = h;
        }
    }
    let mut best = cur.clone();
    for step in 0..opts.budget {
        if cur.len() < 2 {
            break;
        }
        let Some(next) = random_move(&cur, opts.cyclic, &mut rng) else {
            continue;
        };
        let next = reduce(&next);
        if next.len() <= cur.len() {
            cur = next;
            if cur.len() < best.len() {
                best = cur.clone();
            }
        }
        // occasional handle pass from the current point
        if step % 512 == 511 {
            if let Some(h) = handle_reduce(&cur, opts.handle_steps, 8 * cur.len().max(8)) {
                if h.len() < cur.len() {
                    cur = h;
                    if cur.len() < best.len() {
                        best = cur.clone();
                    }
                }
            }
        }
    }
    debug_assert!(best.len() <= b.crossings());
    BraidWord::new(strands, best).expect("moves keep generator range")
}

/// Cancels `g ... -g` whenever everything in between commutes with `g`.
pub fn reduce(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    'letters: for &g in word {
        for j in (0..out.len()).rev() {
            let h = out[j];
            if h == -g {
                out.remove(j);
                continue 'letters;
            }
            if h.unsigned_abs().abs_diff(g.unsigned_abs()) < 2 {
                break;
            }
        }
        out.push(g);
    }
    out
}

fn random_move<R: Rng>(w: &[i32], cyclic: bool, rng: &mut R) -> Option<Vec<i32>> {
    let len = w.len();
    let kinds: &[u8] = if cyclic { &[0, 1, 2] } else { &[0, 1] };
    let mut out = w.to_vec();
    match *kinds.choose(rng)? {
        0 => {
            // slide at a random applicable triple
            let start = rng.gen_range(0..len);
            for off in 0..len.saturating_sub(2) {
                let p = (start + off) % (len - 2);
                if let Some(t) = slide_triple(w[p], w[p + 1], w[p + 2]) {
                    out[p..p + 3].copy_from_slice(&t);
                    return Some(out);
                }
            }
            None
        }
        1 => {
            let p = rng.gen_range(0..len - 1);
            if w[p].unsigned_abs().abs_diff(w[p + 1].unsigned_abs()) >= 2 {
                out.swap(p, p + 1);
                Some(out)
            } else {
                None
            }
        }
        _ => {
            out.rotate_left(rng.gen_range(1..len));
            Some(out)
        }
    }
}

/// Dehornoy handle reduction. Returns `None` when the step or length cap is
/// hit. The result represents the same braid; it is empty exactly when the
/// braid is trivial.
pub fn handle_reduce(word: &[i32], max_steps: usize, max_len: usize) -> Option<Vec<i32>> {
    let mut w = word.to_vec();
    for _ in 0..max_steps {
        let Some((p, q)) = shortest_handle(&w) else {
            return Some(w);
        };
        let i = w[p].abs();
        let e = w[p].signum();
        let mut next = Vec::with_capacity(w.len() + 2 * (q - p));
        next.extend_from_slice(&w[..p]);
        for &g in &w[p + 1..q] {
            if g.abs() == i + 1 {
                let d = g.signum();
                next.extend_from_slice(&[-e * (i + 1), d * i, e * (i + 1)]);
            } else {
                next.push(g);
            }
        }
        next.extend_from_slice(&w[q + 1..]);
        w = crate::braid::free_reduce(&next);
        if w.len() > max_len {
            return None;
        }
    }
    None
}

/// A handle `s_i^e u s_i^-e` where `u` only uses generators above `i`,
/// choosing the shortest so that it contains no handle itself.
fn shortest_handle(w: &[i32]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for p in 0..w.len() {
        let i = w[p].abs();
        for q in p + 1..w.len() {
            if w[q].abs() <= i {
                if w[q] == -w[p] && best.map_or(true, |(a, b)| q - p < b - a) {
                    best = Some((p, q));
                }
                break;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let b = BraidWord::new(3, vec![1, -1, 2]).unwrap();
        assert_eq!(simplify(&b, 100, 1).word(), &[2]);
        let c = BraidWord::new(4, vec![1, 3]).unwrap();
        let s = simplify(&c, 100, 1);
        assert!(s.word() == [1, 3] || s.word() == [3, 1]);
    }

    #[test]
    fn commuting_cancellation() {
        assert_eq!(reduce(&[1, 3, 4, -1]), vec![3, 4]);
        assert_eq!(reduce(&[1, 2, -1]), vec![1, 2, -1]);
    }

    #[test]
    fn handle_reduction_finds_trivial() {
        // s1 s2 s1 = s2 s1 s2, so this word is trivial
        let w = [1, 2, 1, -2, -1, -2];
        assert_eq!(handle_reduce(&w, 1000, 1000), Some(vec![]));
        let nontrivial = [1, 1, 2, -1];
        assert!(!handle_reduce(&nontrivial, 1000, 1000).unwrap().is_empty());
    }
}
