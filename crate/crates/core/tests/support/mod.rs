//! Shared helpers for the integration tests: an independent Kauffman-bracket
//! state sum and seeded random braids.

#![allow(dead_code)]

use std::collections::HashSet;
use std::f64::consts::PI;

use knotweave::BraidWord;
use num_complex::Complex64 as C64;
use rand::Rng;

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

fn union(p: &mut [usize], x: usize, y: usize) {
    let (rx, ry) = (find(p, x), find(p, y));
    p[rx] = ry;
}

/// Kauffman bracket of the Markov (or plat) closure by brute-force state sum.
/// Exponential in the crossing count; keep words short.
pub fn bracket(b: &BraidWord, plat: bool, a: C64) -> C64 {
    let s = b.strands();
    let c = b.word().len();
    assert!(c <= 22, "state sum over {c} crossings is too slow");
    let node = |t: usize, p: usize| t * s + p;
    let d = -(a * a) - 1.0 / (a * a);
    let mut total = C64::new(0.0, 0.0);
    for state in 0..(1u64 << c) {
        let mut par: Vec<usize> = (0..(c + 1) * s).collect();
        let mut exp = 0i32;
        for (t, &g) in b.word().iter().enumerate() {
            let i = g.unsigned_abs() as usize - 1;
            for p in 0..s {
                if p != i && p != i + 1 {
                    union(&mut par, node(t, p), node(t + 1, p));
                }
            }
            let bit = (state >> t) & 1 == 1;
            exp += if bit { 1 } else { -1 };
            if bit ^ (g < 0) {
                union(&mut par, node(t, i), node(t + 1, i));
                union(&mut par, node(t, i + 1), node(t + 1, i + 1));
            } else {
                union(&mut par, node(t, i), node(t, i + 1));
                union(&mut par, node(t + 1, i), node(t + 1, i + 1));
            }
        }
        if plat {
            for j in 0..s / 2 {
                union(&mut par, node(0, 2 * j), node(0, 2 * j + 1));
                union(&mut par, node(c, 2 * j), node(c, 2 * j + 1));
            }
        } else {
            for p in 0..s {
                union(&mut par, node(0, p), node(c, p));
            }
        }
        let mut roots = HashSet::new();
        for x in 0..(c + 1) * s {
            roots.insert(find(&mut par, x));
        }
        total += a.powi(exp) * d.powi(roots.len() as i32 - 1);
    }
    total
}

/// Jones value `(-A^3)^{-w} <L>` at `A = e^{i 3pi/5}`.
pub fn kauffman_jones(b: &BraidWord, plat: bool) -> C64 {
    let a = C64::from_polar(1.0, 3.0 * PI / 5.0);
    (-(a.powi(3))).powi(-(b.writhe() as i32)) * bracket(b, plat, a)
}

pub fn random_braid<R: Rng + ?Sized>(strands: usize, crossings: usize, rng: &mut R) -> BraidWord {
    let word = (0..crossings)
        .map(|_| {
            let g = rng.gen_range(1..strands as i32);
            if rng.gen::<bool>() {
                g
            } else {
                -g
            }
        })
        .collect();
    BraidWord::new(strands, word).unwrap()
}

/// Relative distance, falling back to absolute near zero.
pub fn rel_err(x: C64, y: C64) -> f64 {
    (x - y).norm() / y.norm().max(1e-12)
}

use knotweave::{MarkovMove, SlideDirection};

/// Applies `steps` random applicable Poke/Slide/Cycle/Stabilize moves,
/// never growing past `max_strands`.
pub fn random_moves<R: Rng + ?Sized>(b: &BraidWord, steps: usize, max_strands: usize, rng: &mut R) -> BraidWord {
    let mut cur = b.clone();
    let mut done = 0;
    let mut tries = 0;
    while done < steps && tries < 100 * steps {
        tries += 1;
        let len = cur.word().len();
        let m = match rng.gen_range(0..6) {
            0 => {
                let g = rng.gen_range(1..cur.strands() as i32) * if rng.gen() { 1 } else { -1 };
                MarkovMove::Poke { position: rng.gen_range(0..=len), generator: Some(g) }
            }
            1 if len >= 2 => MarkovMove::Poke { position: rng.gen_range(0..len - 1), generator: None },
            2 | 3 if len >= 3 => {
                let direction = if rng.gen() { SlideDirection::Raise } else { SlideDirection::Lower };
                MarkovMove::Slide { position: rng.gen_range(0..len - 2), direction }
            }
            4 => MarkovMove::Cycle { offset: rng.gen_range(0..len.max(1)) },
            5 if cur.strands() < max_strands => MarkovMove::Stabilize { sign: if rng.gen() { 1 } else { -1 } },
            _ => continue,
        };
        if let Ok(next) = cur.apply_move(m) {
            cur = next;
            done += 1;
        }
    }
    cur
}

use knotweave::qsim::StateVector;
use knotweave::rep::Op;

/// Columns of the dense `2^n` unitary of a word, exact generator matrices.
pub fn dense_unitary(n: usize, word: &[i32]) -> Vec<Vec<C64>> {
    (0..1u64 << n)
        .map(|x| {
            let mut sv = StateVector::basis(n, x);
            for &g in word {
                sv.apply(&Op::Gen { q: g.unsigned_abs() as usize - 1, sign: g.signum() });
            }
            sv.amplitudes().to_vec()
        })
        .collect()
}

pub fn max_diff(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).norm()))
        .fold(0.0, f64::max)
}
