//! The Fibonacci representation of the braid group: the 3-qubit generator
//! matrix, native-gate circuits, compiled generator powers, and the
//! echo-verification circuits used by the estimator.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::compiled::{fragment_angles, FragmentAngles, MAX_POWER};
use crate::error::{Error, Result};
use crate::fib::{FibString, PHI};

/// `|000>` eigenphase of `U_sigma`.
pub const ALPHA: f64 = 2.0 * PI / 5.0;

pub type Mat8 = [[C64; 8]; 8];

#[inline]
pub(crate) fn cis(t: f64) -> C64 {
    C64::from_polar(1.0, t)
}

/// 3-bit patterns that occur inside Fibonacci strings.
pub const FIB_TRIPLES: [usize; 5] = [0b010, 0b011, 0b101, 0b110, 0b111];

#[inline]
pub fn is_fib_triple(x: usize) -> bool {
    FIB_TRIPLES.contains(&x)
}

/// The 8x8 generator matrix together with its `|000>` eigenphase.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorMatrix {
    pub entries: Mat8,
    pub eigenphase_000: f64,
}

fn build_generator() -> Mat8 {
    let z = C64::new(0.0, 0.0);
    let mut m = [[z; 8]; 8];
    let inv_phi = 1.0 / PHI;
    m[0b101][0b101] = cis(4.0 * PI / 5.0) * inv_phi;
    m[0b111][0b111] = C64::new(-inv_phi, 0.0);
    m[0b010][0b010] = cis(-4.0 * PI / 5.0);
    m[0b011][0b011] = cis(3.0 * PI / 5.0);
    m[0b110][0b110] = cis(3.0 * PI / 5.0);
    let off = cis(-3.0 * PI / 5.0) * PHI.powf(-0.5);
    m[0b111][0b101] = off;
    m[0b101][0b111] = off;
    for x in [0b000, 0b001, 0b100] {
        m[x][x] = cis(ALPHA);
    }
    m
}

/// `U_sigma` for `sign = +1`, its conjugate for `sign = -1`.
pub fn generator_matrix(sign: i32) -> GeneratorMatrix {
    static PLUS: OnceLock<Mat8> = OnceLock::new();
    let plus = *PLUS.get_or_init(build_generator);
    if sign >= 0 {
        GeneratorMatrix { entries: plus, eigenphase_000: ALPHA }
    } else {
        GeneratorMatrix { entries: conj8(&plus), eigenphase_000: -ALPHA }
    }
}

/// `U_sigma^{sign}` with the non-Fibonacci block replaced by zeros.
pub fn generator_matrix_fib_only(sign: i32) -> Mat8 {
    let mut m = generator_matrix(sign).entries;
    for x in [0b000, 0b001, 0b100] {
        m[x][x] = C64::new(0.0, 0.0);
    }
    m
}

pub(crate) fn conj8(m: &Mat8) -> Mat8 {
    let mut out = *m;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v = v.conj();
        }
    }
    out
}

pub(crate) fn mul8(a: &Mat8, b: &Mat8) -> Mat8 {
    let mut out = [[C64::new(0.0, 0.0); 8]; 8];
    for i in 0..8 {
        for k in 0..8 {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..8 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub(crate) fn identity8() -> Mat8 {
    let mut m = [[C64::new(0.0, 0.0); 8]; 8];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    m
}

/// One operation of a circuit. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Op {
    /// `exp(-i theta/2 Z)`.
    Rz { q: usize, theta: f64 },
    /// `exp(-i alpha/2 (cos(beta) X + sin(beta) Y))`.
    U1q { q: usize, alpha: f64, beta: f64 },
    /// `exp(-i chi/2 Z Z)`.
    Rzz { q0: usize, q1: usize, chi: f64 },
    H { q: usize },
    Sdg { q: usize },
    Cnot { c: usize, t: usize },
    /// The exact generator matrix `U_sigma^{sign}` on qubits `q, q+1, q+2`.
    Gen { q: usize, sign: i32 },
    PrepZero,
    MeasureAll,
}

impl Op {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Op::Rz { q, .. } | Op::U1q { q, .. } | Op::H { q } | Op::Sdg { q } => vec![q],
            Op::Rzz { q0, q1, .. } => vec![q0, q1],
            Op::Cnot { c, t } => vec![c, t],
            Op::Gen { q, .. } => vec![q, q + 1, q + 2],
            Op::PrepZero | Op::MeasureAll => vec![],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Op::Rzz { .. } | Op::Cnot { .. })
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Op::Rz { q, theta } => write!(f, "RZ {q} {theta:.17e}"),
            Op::U1q { q, alpha, beta } => write!(f, "U1Q {q} {alpha:.17e},{beta:.17e}"),
            Op::Rzz { q0, q1, chi } => write!(f, "RZZ {q0},{q1} {chi:.17e}"),
            Op::H { q } => write!(f, "H {q}"),
            Op::Sdg { q } => write!(f, "SDG {q}"),
            Op::Cnot { c, t } => write!(f, "CNOT {c},{t}"),
            Op::Gen { q, sign } => write!(f, "GEN {q},{},{} {sign}", q + 1, q + 2),
            Op::PrepZero => write!(f, "PREP"),
            Op::MeasureAll => write!(f, "MEASURE"),
        }
    }
}

/// A gate list on `n_qubits` qubits.
///
/// For braid circuits, `fib_phase` is the global phase by which the circuit
/// differs from `U_B` on the Fibonacci span, and `zero_phase` is the phase it
/// puts on `|0...0>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<Op>,
    pub fib_phase: f64,
    pub zero_phase: f64,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, ops: Vec::new(), fib_phase: 0.0, zero_phase: 0.0 }
    }

    pub fn push(&mut self, op: Op) {
        self.ops.push(op);
    }

    pub fn count_rzz(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Rzz { .. })).count()
    }

    pub fn count(&self, pred: impl Fn(&Op) -> bool) -> usize {
        self.ops.iter().filter(|o| pred(o)).count()
    }

    /// Checks qubit ranges and prep/measure placement.
    pub fn validate(&self) -> Result<()> {
        let last = self.ops.len().saturating_sub(1);
        for (i, op) in self.ops.iter().enumerate() {
            match op {
                Op::PrepZero if i != 0 => {
                    return Err(Error::Circuit("PrepZero must be the first op".into()))
                }
                Op::MeasureAll if i != last => {
                    return Err(Error::Circuit("MeasureAll must be the last op".into()))
                }
                _ => {}
            }
            let qs = op.qubits();
            if qs.iter().any(|&q| q >= self.n_qubits) {
                return Err(Error::Circuit(format!("op {op} outside {} qubits", self.n_qubits)));
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::Circuit(format!("op {op} repeats a qubit")));
            }
        }
        Ok(())
    }

    /// Replaces H, Sdg and CNOT by native gates (equal up to global phase).
    pub fn lowered(&self) -> Circuit {
        let mut out = Circuit { ops: Vec::with_capacity(self.ops.len() * 2), ..self.clone() };
        let half = PI / 2.0;
        for &op in &self.ops {
            match op {
                Op::H { q } => {
                    out.push(Op::Rz { q, theta: PI });
                    out.push(Op::U1q { q, alpha: half, beta: half });
                }
                Op::Sdg { q } => out.push(Op::Rz { q, theta: -half }),
                Op::Cnot { c, t } => {
                    out.push(Op::Rz { q: t, theta: PI });
                    out.push(Op::U1q { q: t, alpha: half, beta: half });
                    out.push(Op::Rzz { q0: c, q1: t, chi: -half });
                    out.push(Op::Rz { q: c, theta: half });
                    out.push(Op::Rz { q: t, theta: half });
                    out.push(Op::Rz { q: t, theta: PI });
                    out.push(Op::U1q { q: t, alpha: half, beta: half });
                }
                other => out.push(other),
            }
        }
        out
    }

    /// Line-based text dump, one op per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("QUBITS {}\n", self.n_qubits);
        for op in &self.ops {
            s.push_str(&op.to_string());
            s.push('\n');
        }
        s
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(t: f64) -> f64 {
    let mut x = t.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// The 8x8 unitary of a 3-qubit circuit (qubit 0 most significant).
pub fn circuit_matrix3(ops: &[Op]) -> Mat8 {
    let mut m = identity8();
    for op in ops {
        let g = op_matrix3(op);
        m = mul8(&g, &m);
    }
    m
}

fn op_matrix3(op: &Op) -> Mat8 {
    let z = C64::new(0.0, 0.0);
    let mut g = [[z; 8]; 8];
    let bit = |x: usize, q: usize| (x >> (2 - q)) & 1;
    match *op {
        Op::Rz { q, theta } => {
            for (x, row) in g.iter_mut().enumerate() {
                row[x] = cis(if bit(x, q) == 0 { -theta / 2.0 } else { theta / 2.0 });
            }
        }
        Op::Rzz { q0, q1, chi } => {
            for (x, row) in g.iter_mut().enumerate() {
                let par = bit(x, q0) ^ bit(x, q1);
                row[x] = cis(if par == 0 { -chi / 2.0 } else { chi / 2.0 });
            }
        }
        Op::U1q { q, alpha, beta } => {
            let u = u1q_matrix(alpha, beta);
            for x in 0..8 {
                for y in 0..8 {
                    if (x ^ y) & !(1 << (2 - q)) & 7 != 0 {
                        continue;
                    }
                    g[x][y] = u[bit(x, q)][bit(y, q)];
                }
            }
        }
        Op::Gen { sign, .. } => g = generator_matrix(sign).entries,
        _ => panic!("op {op} has no 3-qubit matrix here"),
    }
    g
}

/// 2x2 matrix of `U1Q(alpha, beta)`.
pub fn u1q_matrix(alpha: f64, beta: f64) -> [[C64; 2]; 2] {
    let (c, s) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
    // -i s (cos b X + sin b Y): off-diagonals -i s e^{-ib}, -i s e^{ib}
    let mi = C64::new(0.0, -s);
    [[C64::new(c, 0.0), mi * cis(-beta)], [mi * cis(beta), C64::new(c, 0.0)]]
}

/// Native-gate fragment for `U_sigma^{sign k}` on qubits `q, q+1, q+2`.
///
/// Layout: four `U1Q` on the middle qubit interleaved with `RZZ` on
/// (middle, right), (left, middle), (middle, right), then one `RZ` per qubit.
pub fn compiled_generator(k: usize, sign: i32) -> Result<Circuit> {
    compiled_fragment_at(k, sign, 0, 3)
}

fn compiled_fragment_at(k: usize, sign: i32, q: usize, n_qubits: usize) -> Result<Circuit> {
    let a = fragment_angles(k)?;
    let s = if sign >= 0 { 1.0 } else { -1.0 };
    let mut c = Circuit::new(n_qubits);
    let pairs = [(q + 1, q + 2), (q, q + 1), (q + 1, q + 2)];
    for i in 0..4 {
        c.push(Op::U1q { q: q + 1, alpha: s * a.alpha[i], beta: s * a.beta[i] });
        if i < 3 {
            c.push(Op::Rzz { q0: pairs[i].0, q1: pairs[i].1, chi: s * a.chi[i] });
        }
    }
    for j in 0..3 {
        c.push(Op::Rz { q: q + j, theta: s * a.theta[j] });
    }
    let ph = fragment_phases(k)?;
    c.fib_phase = s * ph.fib_phase;
    c.zero_phase = s * ph.zero_phase;
    Ok(c)
}

/// Phases of a compiled fragment relative to `U_sigma^k`.
#[derive(Debug, Clone, Copy)]
pub struct FragmentPhases {
    /// Global phase on the Fibonacci span: fragment = `e^{i fib_phase} U_sigma^k` there.
    pub fib_phase: f64,
    /// Phase the fragment puts on `|000>`.
    pub zero_phase: f64,
    /// Largest deviation from `e^{i fib_phase} U_sigma^k` on columns of Fibonacci triples.
    pub max_error: f64,
    /// Largest amplitude leaking out of `|000>`.
    pub zero_leak: f64,
}

fn fragment_matrix(a: &FragmentAngles) -> Mat8 {
    let pairs = [(1, 2), (0, 1), (1, 2)];
    let mut ops = Vec::with_capacity(10);
    for i in 0..4 {
        ops.push(Op::U1q { q: 1, alpha: a.alpha[i], beta: a.beta[i] });
        if i < 3 {
            ops.push(Op::Rzz { q0: pairs[i].0, q1: pairs[i].1, chi: a.chi[i] });
        }
    }
    for j in 0..3 {
        ops.push(Op::Rz { q: j, theta: a.theta[j] });
    }
    circuit_matrix3(&ops)
}

/// `U_sigma^k` as an 8x8 matrix.
pub fn generator_power(k: usize, sign: i32) -> Mat8 {
    let g = generator_matrix(sign).entries;
    let mut m = identity8();
    for _ in 0..k {
        m = mul8(&g, &m);
    }
    m
}

/// Compares the compiled fragment against `U_sigma^k` on the Fibonacci span.
pub fn fragment_phases(k: usize) -> Result<FragmentPhases> {
    static CACHE: OnceLock<Vec<FragmentPhases>> = OnceLock::new();
    if !(1..=MAX_POWER).contains(&k) {
        return Err(Error::Range(format!("power {k} outside [1, {MAX_POWER}]")));
    }
    let table = CACHE.get_or_init(|| {
        (1..=MAX_POWER)
            .map(|k| measure_fragment(&fragment_angles(k).expect("table covers range"), k))
            .collect()
    });
    Ok(table[k - 1])
}

pub(crate) fn measure_fragment(a: &FragmentAngles, k: usize) -> FragmentPhases {
    let f = fragment_matrix(a);
    let t = generator_power(k, 1);
    let mut overlap = C64::new(0.0, 0.0);
    for &x in &FIB_TRIPLES {
        for &y in &FIB_TRIPLES {
            overlap += t[x][y].conj() * f[x][y];
        }
    }
    let fib_phase = overlap.arg();
    let ph = cis(fib_phase);
    // whole columns, so leakage out of the span counts too
    let mut max_error: f64 = 0.0;
    for x in 0..8 {
        for &y in &FIB_TRIPLES {
            max_error = max_error.max((f[x][y] - ph * t[x][y]).norm());
        }
    }
    let zero_leak = (1..8).map(|x| f[x][0].norm()).fold(0.0, f64::max);
    FragmentPhases { fib_phase, zero_phase: f[0][0].arg(), max_error, zero_leak }
}

/// Circuit for `U_B` on `strands + 1` qubits. Generator `g` acts on qubits
/// `|g|-1, |g|, |g|+1`. With `run_powers`, maximal runs of one letter (split
/// into chunks of at most nine) become a single compiled fragment; otherwise
/// every letter is its own `k = 1` fragment.
pub fn braid_circuit(b: &BraidWord, run_powers: bool) -> Circuit {
    let n = b.qubits();
    let mut c = Circuit::new(n);
    for (g, k) in letter_runs(b.word(), if run_powers { MAX_POWER } else { 1 }) {
        let q = g.unsigned_abs() as usize - 1;
        let frag = compiled_fragment_at(k, g.signum(), q, n).expect("power within table");
        c.ops.extend_from_slice(&frag.ops);
        c.fib_phase += frag.fib_phase;
        c.zero_phase += frag.zero_phase;
    }
    c.fib_phase = wrap_angle(c.fib_phase);
    c.zero_phase = wrap_angle(c.zero_phase);
    c
}

/// One compiled fragment of a braid circuit.
#[derive(Debug, Clone)]
pub struct Fragment {
    /// Leftmost qubit of the three it acts on.
    pub q: usize,
    pub power: usize,
    pub sign: i32,
    /// Native ops on the full register.
    pub ops: Vec<Op>,
    /// The same ops on a 3-qubit register.
    pub local_ops: Vec<Op>,
    /// Exact 8x8 action of `ops` on qubits `q, q+1, q+2`.
    pub matrix: Mat8,
    pub sparse: crate::qsim::SparseMat8,
    pub fib_phase: f64,
    pub zero_phase: f64,
}

/// The fragments of [`braid_circuit`], in order.
pub fn braid_fragments(b: &BraidWord, run_powers: bool) -> Vec<Fragment> {
    let n = b.qubits();
    letter_runs(b.word(), if run_powers { MAX_POWER } else { 1 })
        .into_iter()
        .map(|(g, k)| {
            let q = g.unsigned_abs() as usize - 1;
            let sign = g.signum();
            let local = compiled_fragment_at(k, sign, 0, 3).expect("power within table");
            let frag = compiled_fragment_at(k, sign, q, n).expect("power within table");
            let matrix = circuit_matrix3(&local.ops);
            Fragment {
                q,
                power: k,
                sign,
                ops: frag.ops,
                local_ops: local.ops,
                matrix,
                sparse: crate::qsim::SparseMat8::new(&matrix),
                fib_phase: frag.fib_phase,
                zero_phase: frag.zero_phase,
            }
        })
        .collect()
}

/// Circuit for `U_B` using the exact generator matrices.
pub fn braid_circuit_exact(b: &BraidWord) -> Circuit {
    let mut c = Circuit::new(b.qubits());
    for &g in b.word() {
        c.push(Op::Gen { q: g.unsigned_abs() as usize - 1, sign: g.signum() });
    }
    c.zero_phase = wrap_angle(b.writhe() as f64 * ALPHA);
    c
}

/// Splits a word into `(letter, run length)` with run lengths capped at `cap`.
pub fn letter_runs(word: &[i32], cap: usize) -> Vec<(i32, usize)> {
    let mut out: Vec<(i32, usize)> = Vec::new();
    for &g in word {
        match out.last_mut() {
            Some((h, k)) if *h == g && *k < cap => *k += 1,
            _ => out.push((g, 1)),
        }
    }
    out
}

/// Phase correction applied as `RZ` on qubit 1 so that the `|0...0>` and
/// `|s>` branches interfere with relative phase exactly `<s|U_B|s>`.
pub fn compensation_angle(braid: &Circuit) -> f64 {
    wrap_angle(braid.zero_phase - braid.fib_phase)
}

/// The echo-verification circuit estimating `Re <s|U_B|s>` (or `Im` when
/// `imag_part`): cat state on qubit 1 and the ones of `s`, braid, phase
/// compensation, uncompute, measure.
pub fn cfev_circuit(braid: &Circuit, s: &FibString, imag_part: bool) -> Result<Circuit> {
    cfev_circuit_with_phase(braid, s, imag_part, 0.0)
}

/// As [`cfev_circuit`], with an extra coherent `RZ(phase)` on qubit 1 merged
/// into the compensation. The estimate then targets `e^{i phase} <s|U_B|s>`.
pub fn cfev_circuit_with_phase(braid: &Circuit, s: &FibString, imag_part: bool, phase: f64) -> Result<Circuit> {
    let n = braid.n_qubits;
    if s.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: s.len() });
    }
    if !s.is_fibonacci() {
        return Err(Error::NotFibonacci(s.to_string()));
    }
    let mut c = Circuit::new(n);
    c.push(Op::PrepZero);
    c.push(Op::H { q: 1 });
    let targets: Vec<usize> = (2..n).filter(|&i| s.bit(i) == 1).collect();
    for &t in &targets {
        c.push(Op::Cnot { c: 1, t });
    }
    c.ops.extend_from_slice(&braid.ops);
    c.push(Op::Rz { q: 1, theta: wrap_angle(compensation_angle(braid) + phase) });
    for &t in targets.iter().rev() {
        c.push(Op::Cnot { c: 1, t });
    }
    if imag_part {
        c.push(Op::Sdg { q: 1 });
    }
    c.push(Op::H { q: 1 });
    c.push(Op::MeasureAll);
    c.fib_phase = braid.fib_phase;
    c.zero_phase = braid.zero_phase;
    Ok(c)
}

/// Builds a cfev circuit straight from a braid word.
pub fn cfev_for_braid(b: &BraidWord, s: &FibString, imag_part: bool, run_powers: bool) -> Result<Circuit> {
    cfev_circuit(&braid_circuit(b, run_powers), s, imag_part)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn generator_entries() {
        let u = generator_matrix(1).entries;
        assert!(close(u[0b010][0b010], cis(-4.0 * PI / 5.0), 1e-12));
        assert!(close(u[0b111][0b101], cis(-3.0 * PI / 5.0) * PHI.powf(-0.5), 1e-12));
        assert!(close(u[0b101][0b101], cis(4.0 * PI / 5.0) / PHI, 1e-12));
        let ui = generator_matrix(-1);
        assert!((ui.eigenphase_000 + ALPHA).abs() < 1e-15);
        let p = mul8(&u, &ui.entries);
        let id = identity8();
        for i in 0..8 {
            for j in 0..8 {
                assert!(close(p[i][j], id[i][j], 1e-12));
            }
        }
    }

    #[test]
    fn u1q_convention() {
        let u = u1q_matrix(PI, 0.0);
        assert!(close(u[1][0], C64::new(0.0, -1.0), 1e-15));
        assert!(close(u[0][0], C64::new(0.0, 0.0), 1e-15));
    }

    #[test]
    fn runs() {
        assert_eq!(letter_runs(&[1, 1, 1, -2, 1], 9), vec![(1, 3), (-2, 1), (1, 1)]);
        assert_eq!(letter_runs(&[2; 11], 9), vec![(2, 9), (2, 2)]);
        assert_eq!(letter_runs(&[1, 1], 1), vec![(1, 1), (1, 1)]);
    }

    #[test]
    fn fragments_meet_contract() {
        for k in 1..=MAX_POWER {
            let p = fragment_phases(k).unwrap();
            assert!(p.max_error < 1e-9, "k={k} err={}", p.max_error);
            assert!(p.zero_leak < 1e-9, "k={k} leak={}", p.zero_leak);
            assert_eq!(compiled_generator(k, 1).unwrap().count_rzz(), 3);
        }
        assert!(compiled_generator(0, 1).is_err());
        assert!(compiled_generator(10, 1).is_err());
    }

    #[test]
    fn negative_fragment_is_conjugate() {
        for k in [1, 2, 5] {
            let plus = circuit_matrix3(&compiled_generator(k, 1).unwrap().ops);
            let minus = circuit_matrix3(&compiled_generator(k, -1).unwrap().ops);
            for i in 0..8 {
                for j in 0..8 {
                    assert!(close(plus[i][j].conj(), minus[i][j], 1e-12));
                }
            }
        }
    }

    #[test]
    fn cfev_structure() {
        let b = BraidWord::new(2, vec![1, 1, 1]).unwrap();
        let s = FibString::parse("010").unwrap();
        let c = cfev_for_braid(&b, &s, true, true).unwrap();
        c.validate().unwrap();
        assert_eq!(c.count(|o| matches!(o, Op::Sdg { .. })), 1);
        assert_eq!(c.count_rzz(), 3);
        let c9 = cfev_for_braid(&b, &s, false, false).unwrap();
        assert_eq!(c9.count_rzz(), 9);
        assert_eq!(c9.count(|o| matches!(o, Op::Sdg { .. })), 0);
        assert!(cfev_for_braid(&b, &FibString::parse("001").unwrap(), false, true).is_err());
    }
}
