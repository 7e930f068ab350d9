//! The cfev estimator: shot generation, `g1`/`g2` postprocessing,
//! non-Fibonacci error detection and the conjugate tricks.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::exact::{markov_prefactor, plat_prefactor};
use crate::baselines::subspace::SubspaceView;
use crate::braid::{BraidWord, ClosureKind};
use crate::error::{Error, Result};
use crate::fib::{basis_index, low_mask, no_double_zero, plat_string, FibString, WeightedSampler};
use crate::qsim::{
    init_flips, random_pauli1, random_pauli2, readout_flips, stream_rng, NoiseModel, NoisySimulator, Pauli, SparseMat8,
    StateVector,
};
use crate::rep::{braid_circuit, braid_fragments, cfev_circuit_with_phase, cis, compensation_angle, wrap_angle, Circuit, Fragment, Op};

/// Shots per RNG stream. Results depend on the seed and this constant only,
/// not on the number of worker threads.
pub const CHUNK: usize = 2048;

/// Mitigation switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub error_detection: bool,
    pub conjugate_trick: bool,
    pub shot_level_trick: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Self { error_detection: true, conjugate_trick: false, shot_level_trick: false }
    }
}

/// Classification of one measurement record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub g1: u8,
    pub g2: u8,
    pub r: i8,
}

/// One shot, kept for inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotRecord {
    pub s: FibString,
    pub imag_part: bool,
    pub bits: Vec<u8>,
    pub g1: u8,
    pub g2: u8,
    pub r: i8,
}

/// `g1 = 1` iff every bit other than bit 1 is zero; `g2 = 1` iff bit 0 is
/// zero and `bits[2..] xor s[2..]` has no two adjacent zeros; `r = (-1)^{bits[1]} g1`.
pub fn postprocess(bits: &[u8], s: &FibString) -> Result<Outcome> {
    if bits.len() != s.len() {
        return Err(Error::LengthMismatch { expected: s.len(), got: bits.len() });
    }
    let n = bits.len();
    let mut mask = 0u64;
    for (i, &b) in bits.iter().enumerate() {
        if b > 1 {
            return Err(Error::Syntax(format!("bit value {b}")));
        }
        mask |= (b as u64) << (n - 1 - i);
    }
    Ok(postprocess_mask(mask, s.mask(), n))
}

#[inline]
pub(crate) fn postprocess_mask(bits: u64, s_mask: u64, n: usize) -> Outcome {
    let q1 = 1u64 << (n - 2);
    let q0 = 1u64 << (n - 1);
    let g1 = (bits & !q1) == 0;
    let tail = low_mask(n - 2);
    let g2 = bits & q0 == 0 && no_double_zero((bits ^ s_mask) & tail, n - 2);
    let r = if g1 {
        if bits & q1 != 0 {
            -1
        } else {
            1
        }
    } else {
        0
    };
    Outcome { g1: g1 as u8, g2: g2 as u8, r }
}

/// How shots are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShotMode {
    /// Noise-free shots from the exact outcome law; faulty shots by dense
    /// simulation from the first fault on. Same distribution as `Reference`.
    #[default]
    Fast,
    /// Every shot is a full trajectory of the lowered cfev circuit.
    Reference,
}

/// Options beyond the noise model and flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Merge runs of one letter into compiled `U_sigma^k` fragments.
    pub run_powers: bool,
    pub mode: ShotMode,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { run_powers: true, mode: ShotMode::Fast }
    }
}

/// A packed column `U_B|s>` with cumulative probabilities.
struct Column {
    amps: Vec<C64>,
    cum: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Fault {
    seg: usize,
    two_qubit: bool,
    ordinal: usize,
    paulis: (Pauli, Pauli),
}

/// Counters describing how shots were produced.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineStats {
    pub analytic_shots: u64,
    pub dense_shots: u64,
    pub faults: u64,
}

impl EngineStats {
    fn merge(&mut self, o: &EngineStats) {
        self.analytic_shots += o.analytic_shots;
        self.dense_shots += o.dense_shots;
        self.faults += o.faults;
    }
}

/// Shot generator for one braid under one noise model.
pub struct ShotEngine {
    n: usize,
    noise: NoiseModel,
    mode: ShotMode,
    word: Vec<i32>,
    view: SubspaceView,
    circuit: Circuit,
    fragments: Vec<Fragment>,
    /// Letters covered by fragments `0..j`.
    letter_end: Vec<usize>,
    fib_prefix: Vec<f64>,
    zero_prefix: Vec<f64>,
    phase: f64,
    comp: f64,
    columns: Mutex<HashMap<usize, Arc<Column>>>,
}

const U1Q_PER_FRAGMENT: usize = 4;
const RZZ_PER_FRAGMENT: usize = 3;

impl ShotEngine {
    pub fn new(b: &BraidWord, noise: NoiseModel, opts: RunOptions) -> Result<Self> {
        noise.validate()?;
        let n = b.qubits();
        let view = SubspaceView::new(n)?;
        let circuit = braid_circuit(b, opts.run_powers);
        let fragments = braid_fragments(b, opts.run_powers);
        let mut letter_end = vec![0];
        let mut fib_prefix = vec![0.0];
        let mut zero_prefix = vec![0.0];
        for f in &fragments {
            letter_end.push(letter_end.last().unwrap() + f.power);
            fib_prefix.push(fib_prefix.last().unwrap() + f.fib_phase);
            zero_prefix.push(zero_prefix.last().unwrap() + f.zero_phase);
        }
        let phase = noise.coherent_phase.unwrap_or(0.0);
        let comp = wrap_angle(compensation_angle(&circuit) + phase);
        Ok(Self {
            n,
            noise,
            mode: opts.mode,
            word: b.word().to_vec(),
            view,
            circuit,
            fragments,
            letter_end,
            fib_prefix,
            zero_prefix,
            phase,
            comp,
            columns: Mutex::new(HashMap::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn view(&self) -> &SubspaceView {
        &self.view
    }

    /// The full cfev circuit for `s` (before lowering).
    pub fn cfev(&self, s: &FibString, imag: bool) -> Result<Circuit> {
        cfev_circuit_with_phase(&self.circuit, s, imag, self.phase)
    }

    fn column(&self, k: usize) -> Arc<Column> {
        if let Some(c) = self.columns.lock().expect("column cache").get(&k) {
            return c.clone();
        }
        let amps = self.view.evolve(&self.word, &self.view.unit(k));
        let mut acc = 0.0;
        let cum = amps
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        let col = Arc::new(Column { amps, cum });
        self.columns.lock().expect("column cache").insert(k, col.clone());
        col
    }

    /// One measured record (readout errors included) for basis index `k`.
    pub fn shot<R: Rng + ?Sized>(&self, k: usize, imag: bool, rng: &mut R, stats: &mut EngineStats) -> u64 {
        if self.mode == ShotMode::Reference {
            let s = FibString::from_mask(self.view.mask(k), self.n);
            let c = self.cfev(&s, imag).expect("valid cfev circuit");
            let sim = NoisySimulator::new(&c, self.noise).expect("valid circuit");
            let mut sv = StateVector::zero(self.n);
            stats.dense_shots += 1;
            return sim.run_shot(&mut sv, rng);
        }
        let n = self.n;
        let s_mask = self.view.mask(k);
        let init = init_flips(n, &self.noise, rng);
        let m = (2..n).filter(|&i| (s_mask >> (n - 1 - i)) & 1 == 1).count();
        let faults = self.sample_faults(m, rng);
        stats.faults += faults.len() as u64;
        let idx = if init == 0 && faults.is_empty() {
            stats.analytic_shots += 1;
            self.analytic(k, s_mask, imag, rng)
        } else {
            stats.dense_shots += 1;
            self.dense(k, s_mask, imag, init, &faults, rng)
        };
        readout_flips(idx, n, &self.noise, rng)
    }

    /// Fault locations over segments `0` (prefix), `1..=F` (fragments) and
    /// `F+1` (suffix), by geometric skipping.
    fn sample_faults<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Vec<Fault> {
        let nf = self.fragments.len();
        let edge1 = 1 + 2 * m;
        let edge2 = m;
        let mut out = Vec::new();
        for two_qubit in [false, true] {
            let (p, edge, per) = if two_qubit {
                (self.noise.eps_2q, edge2, RZZ_PER_FRAGMENT)
            } else {
                (self.noise.eps_1q, edge1, U1Q_PER_FRAGMENT)
            };
            if p <= 0.0 {
                continue;
            }
            let total = 2 * edge + per * nf;
            let mut pos = geometric(p, rng);
            while pos < total {
                let (seg, ordinal) = if pos < edge {
                    (0, pos)
                } else if pos < edge + per * nf {
                    let x = pos - edge;
                    (1 + x / per, x % per)
                } else {
                    (nf + 1, pos - edge - per * nf)
                };
                let paulis = if two_qubit { random_pauli2(rng) } else { (random_pauli1(rng), 0) };
                out.push(Fault { seg, two_qubit, ordinal, paulis });
                pos += 1 + geometric(p, rng);
            }
        }
        out
    }

    fn analytic<R: Rng + ?Sized>(&self, k: usize, s_mask: u64, imag: bool, rng: &mut R) -> u64 {
        let n = self.n;
        let col = self.column(k);
        let mut z = cis(self.phase) * col.amps[k];
        if imag {
            z *= C64::new(0.0, -1.0);
        }
        let p0 = (1.0 + z).norm_sqr() / 4.0;
        let p1 = (1.0 - z).norm_sqr() / 4.0;
        let q1 = 1u64 << (n - 2);
        let u: f64 = rng.gen();
        if u < p0 {
            return 0;
        }
        if u < p0 + p1 {
            return q1;
        }
        // t != s, q1 uniform
        let total = *col.cum.last().unwrap_or(&1.0);
        let t = loop {
            let x = rng.gen::<f64>() * total;
            let t = col.cum.partition_point(|&c| c <= x).min(col.cum.len() - 1);
            if t != k && col.amps[t].norm_sqr() > 0.0 {
                break t;
            }
        };
        let tail = (self.view.mask(t) ^ s_mask) & low_mask(n - 2);
        if rng.gen::<bool>() {
            tail | q1
        } else {
            tail
        }
    }

    fn prefix_ops(&self, s_mask: u64) -> Vec<Op> {
        let n = self.n;
        let mut c = Circuit::new(n);
        c.push(Op::H { q: 1 });
        for t in (2..n).filter(|&i| (s_mask >> (n - 1 - i)) & 1 == 1) {
            c.push(Op::Cnot { c: 1, t });
        }
        c.lowered().ops
    }

    fn suffix_ops(&self, s_mask: u64, imag: bool) -> Vec<Op> {
        let mut c = Circuit::new(self.n);
        c.ops = self.suffix_ops_raw(s_mask, imag);
        c.lowered().ops
    }

    fn suffix_ops_raw(&self, s_mask: u64, imag: bool) -> Vec<Op> {
        let n = self.n;
        let mut c = Circuit::new(n);
        c.push(Op::Rz { q: 1, theta: self.comp });
        let targets: Vec<usize> = (2..n).filter(|&i| (s_mask >> (n - 1 - i)) & 1 == 1).collect();
        for &t in targets.iter().rev() {
            c.push(Op::Cnot { c: 1, t });
        }
        if imag {
            c.push(Op::Sdg { q: 1 });
        }
        c.push(Op::H { q: 1 });
        c.ops
    }

    fn dense<R: Rng + ?Sized>(&self, k: usize, s_mask: u64, imag: bool, init: u64, faults: &[Fault], rng: &mut R) -> u64 {
        let n = self.n;
        let nf = self.fragments.len();
        let first = faults.iter().map(|f| f.seg).min().unwrap_or(nf + 1);
        let start = if init != 0 { 0 } else { first };
        let seg_faults = |seg: usize| -> Vec<Fault> { faults.iter().filter(|f| f.seg == seg).copied().collect() };
        let mut sv;
        if start == 0 {
            sv = StateVector::basis(n, init);
            apply_with_faults(&mut sv, &self.prefix_ops(s_mask), &seg_faults(0));
        } else {
            // cat state evolved through fragments 0..j, from the packed prefix
            let j = start - 1;
            let v = self.view.evolve(&self.word[..self.letter_end[j]], &self.view.unit(k));
            let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
            amps[0] = cis(self.zero_prefix[j]) * FRAC_1_SQRT_2;
            let ph = cis(self.fib_prefix[j]) * FRAC_1_SQRT_2;
            for (t, a) in v.iter().enumerate() {
                amps[self.view.mask(t) as usize] += ph * a;
            }
            sv = StateVector::from_amplitudes(n, amps);
        }
        for (j, f) in self.fragments.iter().enumerate() {
            let seg = j + 1;
            if seg < start.max(1) {
                continue;
            }
            let fs = seg_faults(seg);
            if fs.is_empty() {
                sv.apply_sparse8(f.q, &f.sparse);
            } else {
                sv.apply_sparse8(f.q, &faulty_fragment(&f.local_ops, &fs));
            }
        }
        let tail = seg_faults(nf + 1);
        if tail.is_empty() {
            // the unlowered suffix equals the lowered one up to a global phase
            for op in &self.suffix_ops_raw(s_mask, imag) {
                sv.apply(op);
            }
        } else {
            apply_with_faults(&mut sv, &self.suffix_ops(s_mask, imag), &tail);
        }
        sv.sample_index(rng)
    }
}

/// The 8x8 action of a fragment with Pauli faults inserted.
fn faulty_fragment(local_ops: &[Op], faults: &[Fault]) -> SparseMat8 {
    let mut m = [[C64::new(0.0, 0.0); 8]; 8];
    for y in 0..8 {
        let mut sv = StateVector::basis(3, y as u64);
        apply_with_faults(&mut sv, local_ops, faults);
        for (x, a) in sv.amplitudes().iter().enumerate() {
            m[x][y] = *a;
        }
    }
    SparseMat8::new(&m)
}

fn apply_with_faults(sv: &mut StateVector, ops: &[Op], faults: &[Fault]) {
    let (mut c1, mut c2) = (0usize, 0usize);
    for op in ops {
        sv.apply(op);
        match *op {
            Op::U1q { q, .. } => {
                for f in faults.iter().filter(|f| !f.two_qubit && f.ordinal == c1) {
                    sv.apply_pauli(q, f.paulis.0);
                }
                c1 += 1;
            }
            Op::Rzz { q0, q1, .. } => {
                for f in faults.iter().filter(|f| f.two_qubit && f.ordinal == c2) {
                    sv.apply_pauli(q0, f.paulis.0);
                    sv.apply_pauli(q1, f.paulis.1);
                }
                c2 += 1;
            }
            _ => {}
        }
    }
}

/// Number of failures before the first success of a `p`-coin.
#[inline]
fn geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> usize {
    if p >= 1.0 {
        return 0;
    }
    let u: f64 = 1.0 - rng.gen::<f64>();
    let g = (u.ln() / (1.0 - p).ln()).floor();
    if g >= usize::MAX as f64 {
        usize::MAX
    } else {
        g as usize
    }
}

/// Partial sums of one estimator component; merging is associative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub sum: f64,
    pub sum_sq: f64,
    pub used: u64,
    pub discarded: u64,
}

impl Tally {
    pub fn merge(&mut self, o: &Tally) {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.used += o.used;
        self.discarded += o.discarded;
    }

    pub fn push(&mut self, r: f64) {
        self.sum += r;
        self.sum_sq += r * r;
        self.used += 1;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.used as f64
    }

    /// Sample variance with Bessel's correction.
    pub fn variance(&self) -> f64 {
        if self.used < 2 {
            return 0.0;
        }
        let u = self.used as f64;
        ((self.sum_sq - self.sum * self.sum / u) / (u - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.used as f64).sqrt()
    }
}

/// Where the input strings come from.
#[derive(Debug, Clone, Copy)]
enum Strings {
    Weighted,
    Fixed(usize),
}

/// Runs `shots` shots of one component and tallies `r`.
fn run_component(
    engine: &ShotEngine,
    strings: Strings,
    imag: bool,
    shots: usize,
    flags: Flags,
    seed: u64,
    stream_base: u64,
) -> Result<(Tally, EngineStats)> {
    let sampler = WeightedSampler::new(engine.n())?;
    let n_chunks = shots.div_ceil(CHUNK);
    let parts: Vec<(Tally, EngineStats)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, stream_base + c as u64);
            let len = CHUNK.min(shots - c * CHUNK);
            let mut tally = Tally::default();
            let mut stats = EngineStats::default();
            for _ in 0..len {
                let k = match strings {
                    Strings::Weighted => engine.view().index_of(sampler.sample(&mut rng).mask()),
                    Strings::Fixed(k) => k,
                };
                let bits = engine.shot(k, imag, &mut rng, &mut stats);
                let o = postprocess_mask(bits, engine.view().mask(k), engine.n());
                if flags.error_detection && o.g2 == 0 {
                    tally.discarded += 1;
                } else {
                    tally.push(o.r as f64);
                }
            }
            (tally, stats)
        })
        .collect();
    let mut tally = Tally::default();
    let mut stats = EngineStats::default();
    for (t, s) in &parts {
        tally.merge(t);
        stats.merge(s);
    }
    Ok((tally, stats))
}

/// Result of one estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JonesEstimate {
    pub closure: ClosureKind,
    /// Estimate of `E_s[<s|U_B|s>]` (Markov) or `<alpha|U_B|alpha>` (Plat).
    pub r: C64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    /// Mean of `r` over every shot, discarded ones counting as `r = 0`
    /// (what the estimate would be without error detection).
    pub r_unfiltered: C64,
    /// Prefactor-applied value.
    pub jones: C64,
    pub prefactor: C64,
    /// Shots per component.
    pub shots: usize,
    pub shots_used: u64,
    pub shots_discarded: u64,
    pub flags: Flags,
    /// Set when the conjugate trick could not resolve signs reliably.
    pub low_confidence: bool,
    /// `(|x|, |y|)` from the shot-level trick, when used.
    pub magnitudes: Option<(f64, f64)>,
    pub seed: u64,
    pub stats: EngineStats,
}

impl JonesEstimate {
    pub fn discard_rate(&self) -> f64 {
        let total = self.shots_used + self.shots_discarded;
        if total == 0 {
            0.0
        } else {
            self.shots_discarded as f64 / total as f64
        }
    }

    /// Standard error of `r` as a complex number.
    pub fn stderr(&self) -> f64 {
        self.stderr_re.hypot(self.stderr_im)
    }
}

struct RawEstimate {
    re: Tally,
    im: Tally,
    stats: EngineStats,
}

impl RawEstimate {
    fn value(&self) -> C64 {
        C64::new(self.re.mean(), self.im.mean())
    }

    fn unfiltered(&self) -> C64 {
        let all = |t: &Tally| t.sum / (t.used + t.discarded) as f64;
        C64::new(all(&self.re), all(&self.im))
    }
}

fn raw_estimate(
    b: &BraidWord,
    strings: Strings,
    shots: usize,
    noise: NoiseModel,
    flags: Flags,
    seed: u64,
    opts: RunOptions,
    stream_tag: u64,
) -> Result<RawEstimate> {
    let engine = ShotEngine::new(b, noise, opts)?;
    let (re, s1) = run_component(&engine, strings, false, shots, flags, seed, stream_tag << 40)?;
    let (im, s2) = run_component(&engine, strings, true, shots, flags, seed, (stream_tag << 40) | (1 << 39))?;
    if re.used == 0 || im.used == 0 {
        return Err(Error::AllDiscarded);
    }
    let mut stats = s1;
    stats.merge(&s2);
    Ok(RawEstimate { re, im, stats })
}

fn assemble(
    closure: ClosureKind,
    b: &BraidWord,
    strings: Strings,
    shots: usize,
    noise: NoiseModel,
    flags: Flags,
    seed: u64,
    opts: RunOptions,
    prefactor: C64,
) -> Result<JonesEstimate> {
    if shots == 0 {
        return Err(Error::Config("shots must be >= 1".into()));
    }
    let main = raw_estimate(b, strings, shots, noise, flags, seed, opts, 0)?;
    let mut est = JonesEstimate {
        closure,
        r: main.value(),
        r_unfiltered: main.unfiltered(),
        stderr_re: main.re.stderr(),
        stderr_im: main.im.stderr(),
        jones: C64::new(0.0, 0.0),
        prefactor,
        shots,
        shots_used: main.re.used + main.im.used,
        shots_discarded: main.re.discarded + main.im.discarded,
        flags,
        low_confidence: false,
        magnitudes: None,
        seed,
        stats: main.stats,
    };
    if flags.conjugate_trick {
        let mirror = raw_estimate(&b.conjugate_mirror(), strings, shots, noise, flags, seed, opts, 1)?;
        let ct = conjugate_trick_values(
            main.value(),
            mirror.value(),
            main.re.stderr().hypot(main.im.stderr()),
        );
        est.r = ct.value;
        est.low_confidence = ct.low_confidence;
        // average of two estimates of each component
        est.stderr_re = 0.5 * main.re.stderr().hypot(mirror.re.stderr());
        est.stderr_im = 0.5 * main.im.stderr().hypot(mirror.im.stderr());
        est.shots_used += mirror.re.used + mirror.im.used;
        est.shots_discarded += mirror.re.discarded + mirror.im.discarded;
        est.stats.merge(&mirror.stats);
    }
    est.jones = prefactor * est.r;
    Ok(est)
}

/// Markov-closure estimate: `N` real and `N` imaginary shots, each with a
/// fresh `s ~ p(s)`.
pub fn estimate_markov(b: &BraidWord, shots: usize, noise: NoiseModel, flags: Flags, seed: u64) -> Result<JonesEstimate> {
    estimate_markov_with(b, shots, noise, flags, seed, RunOptions::default())
}

pub fn estimate_markov_with(
    b: &BraidWord,
    shots: usize,
    noise: NoiseModel,
    flags: Flags,
    seed: u64,
    opts: RunOptions,
) -> Result<JonesEstimate> {
    if flags.shot_level_trick {
        return Err(Error::Config("the shot-level trick needs a fixed input string; use the Plat closure".into()));
    }
    let prefactor = markov_prefactor(b.writhe(), b.qubits());
    assemble(ClosureKind::Markov, b, Strings::Weighted, shots, noise, flags, seed, opts, prefactor)
}

/// Plat-closure estimate with `s = 0101...10`.
pub fn estimate_plat(b: &BraidWord, shots: usize, noise: NoiseModel, flags: Flags, seed: u64) -> Result<JonesEstimate> {
    estimate_plat_with(b, shots, noise, flags, seed, RunOptions::default())
}

pub fn estimate_plat_with(
    b: &BraidWord,
    shots: usize,
    noise: NoiseModel,
    flags: Flags,
    seed: u64,
    opts: RunOptions,
) -> Result<JonesEstimate> {
    if b.strands() % 2 != 0 {
        return Err(Error::OddStrands(b.strands()));
    }
    let n = b.qubits();
    let k = basis_index(&plat_string(n)?)? as usize;
    let prefactor = plat_prefactor(b.writhe(), n);
    if flags.shot_level_trick {
        return shot_level_plat(b, k, shots, noise, flags, seed, opts, prefactor);
    }
    assemble(ClosureKind::Plat, b, Strings::Fixed(k), shots, noise, flags, seed, opts, prefactor)
}

#[allow(clippy::too_many_arguments)]
fn shot_level_plat(
    b: &BraidWord,
    k: usize,
    shots: usize,
    noise: NoiseModel,
    flags: Flags,
    seed: u64,
    opts: RunOptions,
    prefactor: C64,
) -> Result<JonesEstimate> {
    let eb = ShotEngine::new(b, noise, opts)?;
    let es = ShotEngine::new(&b.conjugate_mirror(), noise, opts)?;
    let n = b.qubits();
    let s_mask = eb.view().mask(k);
    let n_chunks = shots.div_ceil(CHUNK);
    let parts: Vec<(Vec<[i8; 4]>, EngineStats)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, (2 << 40) + c as u64);
            let mut stats = EngineStats::default();
            let len = CHUNK.min(shots - c * CHUNK);
            let quads = (0..len)
                .map(|_| {
                    let mut q = [0i8; 4];
                    for (slot, (e, imag)) in q.iter_mut().zip([(&eb, false), (&eb, true), (&es, false), (&es, true)]) {
                        let o = postprocess_mask(e.shot(k, imag, &mut rng, &mut stats), s_mask, n);
                        *slot = if flags.error_detection && o.g2 == 0 { 0 } else { o.r };
                    }
                    q
                })
                .collect();
            (quads, stats)
        })
        .collect();
    let mut quads = Vec::with_capacity(shots);
    let mut stats = EngineStats::default();
    for (q, s) in parts {
        quads.extend(q);
        stats.merge(&s);
    }
    let sl = shot_level_conjugate(&quads);
    // plain means give sign information when they are resolvable
    let mean = |i: usize| quads.iter().map(|q| q[i] as f64).sum::<f64>() / quads.len() as f64;
    let zb = C64::new(mean(0), mean(1));
    let zs = C64::new(mean(2), mean(3));
    let se = (2.0 / quads.len() as f64).sqrt();
    let ct = conjugate_trick_values(zb, zs, se);
    let r = C64::new(sl.x_abs.copysign(ct.value.re), sl.y_abs.copysign(ct.value.im));
    Ok(JonesEstimate {
        closure: ClosureKind::Plat,
        r,
        r_unfiltered: r,
        stderr_re: sl.stderr_x,
        stderr_im: sl.stderr_y,
        jones: prefactor * r,
        prefactor,
        shots,
        shots_used: 4 * shots as u64,
        shots_discarded: 0,
        flags,
        low_confidence: ct.low_confidence,
        magnitudes: Some((sl.x_abs, sl.y_abs)),
        seed,
        stats,
    })
}

/// Output of the conjugate trick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateResult {
    pub value: C64,
    pub low_confidence: bool,
}

/// Recovers `R` from estimates of `e^{i theta} R` (braid) and
/// `e^{i theta} R*` (mirror braid) sharing one unknown phase.
pub fn conjugate_trick(est_b: &JonesEstimate, est_bstar: &JonesEstimate) -> ConjugateResult {
    conjugate_trick_values(est_b.r, est_bstar.r, est_b.stderr())
}

pub fn conjugate_trick_values(zb: C64, zs: C64, stderr: f64) -> ConjugateResult {
    let re = (zb + zs).norm() / 2.0;
    let im = (zb - zs).norm() / 2.0;
    let low_confidence = zb.norm() < 3.0 * stderr || zs.norm() < 3.0 * stderr;
    if zs.norm() == 0.0 || zb.norm() == 0.0 {
        return ConjugateResult { value: C64::new(re, im), low_confidence: true };
    }
    // +-R up to noise
    let rp = zb.norm() * (zb / zs).sqrt();
    let pairs = [C64::new(re, im), C64::new(re, -im)];
    let dist = |c: C64| (c - rp).norm().min((c + rp).norm());
    let c = if dist(pairs[0]) <= dist(pairs[1]) { pairs[0] } else { pairs[1] };
    // |theta| < pi/2: the member closest to e^{i theta} R
    let value = if (c - zb).norm() <= (-c - zb).norm() { c } else { -c };
    ConjugateResult { value, low_confidence }
}

/// Output of the shot-level conjugate trick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotLevelResult {
    pub x_abs: f64,
    pub y_abs: f64,
    /// Means of the per-shot estimators of `x^2` and `y^2`.
    pub x_sq: f64,
    pub y_sq: f64,
    pub stderr_x_sq: f64,
    pub stderr_y_sq: f64,
    /// Delta-method standard errors of `|x|` and `|y|`.
    pub stderr_x: f64,
    pub stderr_y: f64,
}

/// Shot-level trick on quadruples `(X, Y, X*, Y*)`.
pub fn shot_level_conjugate(quads: &[[i8; 4]]) -> ShotLevelResult {
    let mut tx = Tally::default();
    let mut ty = Tally::default();
    for q in quads {
        let [x, y, xs, ys] = q.map(|v| v as f64);
        tx.push(((x + xs).powi(2) + (y + ys).powi(2) - 2.0) / 4.0);
        ty.push(((x - xs).powi(2) + (y - ys).powi(2) - 2.0) / 4.0);
    }
    let (x_sq, y_sq) = if quads.is_empty() { (0.0, 0.0) } else { (tx.mean(), ty.mean()) };
    let x_abs = x_sq.max(0.0).sqrt();
    let y_abs = y_sq.max(0.0).sqrt();
    let delta = |se: f64, v: f64| if v > 0.0 { se / (2.0 * v) } else { se.sqrt() };
    ShotLevelResult {
        x_abs,
        y_abs,
        x_sq,
        y_sq,
        stderr_x_sq: tx.stderr(),
        stderr_y_sq: ty.stderr(),
        stderr_x: delta(tx.stderr(), x_abs),
        stderr_y: delta(ty.stderr(), y_abs),
    }
}

/// One draw of the three-outcome variable with mean `x cos(theta) - y sin(theta)`:
/// `P(0) = (1 - x^2 - y^2)/2`, `P(+-1) = (1 + x^2 + y^2)/4 +- (x cos(theta) - y sin(theta))/2`.
pub fn ev_sample<R: Rng + ?Sized>(x: f64, y: f64, theta: f64, rng: &mut R) -> i8 {
    let rr = x * x + y * y;
    let e = x * theta.cos() - y * theta.sin();
    let p_plus = (1.0 + rr) / 4.0 + e / 2.0;
    let p_minus = (1.0 + rr) / 4.0 - e / 2.0;
    let u: f64 = rng.gen();
    if u < p_plus {
        1
    } else if u < p_plus + p_minus {
        -1
    } else {
        0
    }
}

/// Synthetic `(X, Y, X*, Y*)` for amplitude `x + iy` under phase `theta`.
pub fn synthetic_quadruple<R: Rng + ?Sized>(x: f64, y: f64, theta: f64, rng: &mut R) -> [i8; 4] {
    [
        ev_sample(x, y, theta, rng),
        ev_sample(y, -x, theta, rng),
        ev_sample(x, -y, theta, rng),
        ev_sample(-y, -x, theta, rng),
    ]
}

/// One JSONL line for an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub braid: String,
    pub closure: ClosureKind,
    pub shots: usize,
    pub flags: Flags,
    #[serde(rename = "R_re")]
    pub r_re: f64,
    #[serde(rename = "R_im")]
    pub r_im: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub jones_re: f64,
    pub jones_im: f64,
    pub discard_rate: f64,
    pub seed: u64,
    pub noise_preset: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub low_confidence: Option<bool>,
    /// `|jones - oracle| / |oracle|` when an oracle value is known.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub relative_error: Option<f64>,
}

impl EstimateRecord {
    pub fn new(b: &BraidWord, est: &JonesEstimate, noise_preset: &str, oracle: Option<C64>) -> Self {
        Self {
            braid: b.to_string(),
            closure: est.closure,
            shots: est.shots,
            flags: est.flags,
            r_re: est.r.re,
            r_im: est.r.im,
            stderr_re: est.stderr_re,
            stderr_im: est.stderr_im,
            jones_re: est.jones.re,
            jones_im: est.jones.im,
            discard_rate: est.discard_rate(),
            seed: est.seed,
            noise_preset: noise_preset.to_string(),
            low_confidence: est.flags.conjugate_trick.then_some(est.low_confidence),
            relative_error: oracle.map(|o| (est.jones - o).norm() / o.norm()),
        }
    }
}
