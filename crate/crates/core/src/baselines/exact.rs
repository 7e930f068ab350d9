//! Exact evaluation on the packed Fibonacci subspace.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::subspace::SubspaceView;
use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::fib::{basis_index, plat_string, PHI};
use crate::qsim::StateVector;
use crate::rep::{cis, Mat8, Op};

/// Default qubit cap for the exact oracle (`f_28 = 317811`).
pub const DEFAULT_CAP: usize = 28;

/// Sum with a fixed pairwise tree, so the result does not depend on how the
/// terms were produced.
pub fn pairwise_sum(xs: &[C64]) -> C64 {
    match xs.len() {
        0 => C64::new(0.0, 0.0),
        1 => xs[0],
        len => {
            let (a, b) = xs.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::SizeCap { n, cap })
    } else {
        Ok(())
    }
}

/// All `<s|U_B|s>` in basis order.
pub fn diagonal(b: &BraidWord, cap: usize) -> Result<Vec<C64>> {
    let n = b.qubits();
    check_cap(n, cap)?;
    let view = SubspaceView::new(n)?;
    Ok((0..view.dim())
        .into_par_iter()
        .map(|k| view.evolve(b.word(), &view.unit(k))[k])
        .collect())
}

/// All columns `U_B|s>` in basis order, as packed vectors.
pub fn columns(b: &BraidWord, cap: usize) -> Result<(SubspaceView, Vec<Vec<C64>>)> {
    let n = b.qubits();
    check_cap(n, cap)?;
    let view = SubspaceView::new(n)?;
    let cols = (0..view.dim())
        .into_par_iter()
        .map(|k| view.evolve(b.word(), &view.unit(k)))
        .collect();
    Ok((view, cols))
}

fn weighted(view: &SubspaceView, diag: &[C64]) -> C64 {
    let n = view.n();
    let terms: Vec<C64> = diag
        .iter()
        .enumerate()
        .map(|(k, d)| d * PHI.powi((view.mask(k) & 1) as i32))
        .collect();
    pairwise_sum(&terms) / PHI.powi(n as i32 - 1)
}

/// `E_{s~p}[<s|U_B|s>]` with the default cap.
pub fn exact_weighted_trace(b: &BraidWord) -> Result<C64> {
    exact_weighted_trace_capped(b, DEFAULT_CAP)
}

pub fn exact_weighted_trace_capped(b: &BraidWord, cap: usize) -> Result<C64> {
    let d = diagonal(b, cap)?;
    let view = SubspaceView::new(b.qubits())?;
    Ok(weighted(&view, &d))
}

/// `(-e^{-i3pi/5})^{3w}`.
pub fn writhe_factor(writhe: i64) -> C64 {
    let base = -cis(-3.0 * PI / 5.0);
    // reduce the exponent: base has order 10
    base.powi((3 * writhe).rem_euclid(10) as i32)
}

/// Markov prefactor `(-e^{-i3pi/5})^{3w} phi^{n-2}`.
pub fn markov_prefactor(writhe: i64, n: usize) -> C64 {
    writhe_factor(writhe) * PHI.powi(n as i32 - 2)
}

/// Plat prefactor `(-e^{-i3pi/5})^{3w} phi^{(n-3)/2}`.
pub fn plat_prefactor(writhe: i64, n: usize) -> C64 {
    writhe_factor(writhe) * PHI.powf((n as f64 - 3.0) / 2.0)
}

/// Jones value of the Markov closure.
pub fn jones_markov_exact(b: &BraidWord) -> Result<C64> {
    Ok(markov_prefactor(b.writhe(), b.qubits()) * exact_weighted_trace(b)?)
}

fn require_plat(b: &BraidWord) -> Result<()> {
    if b.strands() % 2 != 0 {
        return Err(Error::OddStrands(b.strands()));
    }
    Ok(())
}

/// `<alpha|U_B|alpha>` with `alpha = 0101...10`.
pub fn plat_amplitude(b: &BraidWord) -> Result<C64> {
    require_plat(b)?;
    let n = b.qubits();
    check_cap(n, DEFAULT_CAP)?;
    let view = SubspaceView::new(n)?;
    let k = basis_index(&plat_string(n)?)? as usize;
    Ok(view.evolve(b.word(), &view.unit(k))[k])
}

/// Jones value of the Plat closure.
pub fn jones_plat_exact(b: &BraidWord) -> Result<C64> {
    Ok(plat_prefactor(b.writhe(), b.qubits()) * plat_amplitude(b)?)
}

/// The cap operator `M`. On the Fibonacci triples it equals
/// `e^{i3pi/5} U_sigma + e^{i pi/5} I`; the other triples map to themselves.
pub fn cap_matrix() -> Mat8 {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut m = [[z; 8]; 8];
    for x in [0b000, 0b001, 0b100, 0b111] {
        m[x][x] = one;
    }
    m[0b010][0b010] = C64::new(PHI, 0.0);
    let a = 1.0 / PHI;
    let off = C64::new((1.0 - a * a).sqrt(), 0.0);
    m[0b101][0b101] = C64::new(a, 0.0);
    m[0b101][0b111] = off;
    m[0b111][0b101] = off;
    m
}

/// `U_E v`: the cap operator on qubits `(2i, 2i+1, 2i+2)` for every `i`.
pub fn apply_cap_chain(view: &SubspaceView, v: &[C64]) -> Vec<C64> {
    let m = cap_matrix();
    let mut cur = v.to_vec();
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for i in 0..(view.n() - 1) / 2 {
        view.apply_local(2 * i, &m, &cur, &mut out);
        std::mem::swap(&mut cur, &mut out);
    }
    cur
}

/// Jones value of `M(B E)`, evaluated as a weighted trace of `U_B U_E`.
pub fn jones_spliced_cap(b: &BraidWord) -> Result<C64> {
    require_plat(b)?;
    let n = b.qubits();
    check_cap(n, DEFAULT_CAP)?;
    let view = SubspaceView::new(n)?;
    let diag: Vec<C64> = (0..view.dim())
        .map(|k| {
            let e = apply_cap_chain(&view, &view.unit(k));
            view.evolve(b.word(), &e)[k]
        })
        .collect();
    Ok(markov_prefactor(b.writhe(), n) * weighted(&view, &diag))
}

/// The weighted trace computed on full `2^n` statevectors.
pub fn dense_weighted_trace(b: &BraidWord) -> Result<C64> {
    let n = b.qubits();
    check_cap(n, 16)?;
    let view = SubspaceView::new(n)?;
    let ops: Vec<Op> = b
        .word()
        .iter()
        .map(|&g| Op::Gen { q: g.unsigned_abs() as usize - 1, sign: g.signum() })
        .collect();
    let diag: Vec<C64> = view
        .masks()
        .iter()
        .map(|&m| {
            let mut sv = StateVector::basis(n, m);
            for op in &ops {
                sv.apply(op);
            }
            sv.amplitudes()[m as usize]
        })
        .collect();
    Ok(weighted(&view, &diag))
}
