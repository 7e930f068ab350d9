//! Dense statevector simulation with Pauli-trajectory noise and SPAM flips.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rep::{cis, generator_matrix, u1q_matrix, Circuit, Mat8, Op};

/// Deterministic RNG for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Gate and SPAM error rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub eps_1q: f64,
    pub eps_2q: f64,
    pub eps_init: f64,
    pub eps_meas0: f64,
    pub eps_meas1: f64,
    /// Coherent `RZ(theta)` on qubit 1 after the braid, for conjugate-trick tests.
    pub coherent_phase: Option<f64>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self { eps_1q: 0.0, eps_2q: 0.0, eps_init: 0.0, eps_meas0: 0.0, eps_meas1: 0.0, coherent_phase: None }
    }

    /// `eps_1q = eps_2q / 10`, SPAM rates equal to `eps_2q`.
    pub fn from_eps2q(eps_2q: f64) -> Self {
        Self {
            eps_1q: eps_2q / 10.0,
            eps_2q,
            eps_init: eps_2q,
            eps_meas0: eps_2q,
            eps_meas1: eps_2q,
            coherent_phase: None,
        }
    }

    /// Named presets: `h2like`/`high` (eps_2q = 5e-4), `low` (1e-4), `none`.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "none" | "noiseless" => Some(Self::noiseless()),
            "h2like" | "high" | "5e-4" => Some(Self::from_eps2q(5e-4)),
            "low" | "1e-4" => Some(Self::from_eps2q(1e-4)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("eps_1q", self.eps_1q),
            ("eps_2q", self.eps_2q),
            ("eps_init", self.eps_init),
            ("eps_meas0", self.eps_meas0),
            ("eps_meas1", self.eps_meas1),
        ] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }

    pub fn has_gate_noise(&self) -> bool {
        self.eps_1q > 0.0 || self.eps_2q > 0.0
    }

    pub fn is_noiseless(&self) -> bool {
        !self.has_gate_noise()
            && self.eps_init == 0.0
            && self.eps_meas0 == 0.0
            && self.eps_meas1 == 0.0
            && self.coherent_phase.is_none()
    }
}

/// Single-qubit Pauli, `0..3` meaning I, X, Y, Z.
pub type Pauli = u8;

/// Row-compressed 8x8 matrix.
#[derive(Debug, Clone, Copy)]
pub struct SparseMat8 {
    rows: [[(u8, C64); 8]; 8],
    len: [u8; 8],
}

impl SparseMat8 {
    pub fn new(m: &Mat8) -> Self {
        let mut rows = [[(0u8, C64::new(0.0, 0.0)); 8]; 8];
        let mut len = [0u8; 8];
        for x in 0..8 {
            for y in 0..8 {
                if m[x][y].norm_sqr() > 0.0 {
                    rows[x][len[x] as usize] = (y as u8, m[x][y]);
                    len[x] += 1;
                }
            }
        }
        Self { rows, len }
    }

    pub fn nnz(&self) -> usize {
        self.len.iter().map(|&l| l as usize).sum()
    }
}

/// Amplitudes of an `n`-qubit state; qubit 0 is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: u64) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index as usize] = C64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Self {
        assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Resets to `|index>` without reallocating.
    pub fn reset(&mut self, index: u64) {
        self.amps.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
        self.amps[index as usize] = C64::new(1.0, 0.0);
    }

    #[inline]
    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply_1q(&mut self, q: usize, m: &[[C64; 2]; 2]) {
        let b = self.bit(q);
        for chunk in self.amps.chunks_exact_mut(2 * b) {
            let (lo, hi) = chunk.split_at_mut(b);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a0, a1) = (*x, *y);
                *x = m[0][0] * a0 + m[0][1] * a1;
                *y = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_rz(&mut self, q: usize, theta: f64) {
        let b = self.bit(q);
        let (p0, p1) = (cis(-theta / 2.0), cis(theta / 2.0));
        for chunk in self.amps.chunks_exact_mut(2 * b) {
            let (lo, hi) = chunk.split_at_mut(b);
            lo.iter_mut().for_each(|a| *a *= p0);
            hi.iter_mut().for_each(|a| *a *= p1);
        }
    }

    pub fn apply_rzz(&mut self, q0: usize, q1: usize, chi: f64) {
        let (b0, b1) = (self.bit(q0), self.bit(q1));
        let (same, diff) = (cis(-chi / 2.0), cis(chi / 2.0));
        // blocks of the lower bit have constant parity
        let small = b0.min(b1);
        for (j, chunk) in self.amps.chunks_exact_mut(small).enumerate() {
            let i = j * small;
            let par = ((i & b0) != 0) ^ ((i & b1) != 0);
            let p = if par { diff } else { same };
            chunk.iter_mut().for_each(|a| *a *= p);
        }
    }

    pub fn apply_x(&mut self, q: usize) {
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                self.amps.swap(i, i | b);
            }
        }
    }

    pub fn apply_cnot(&mut self, c: usize, t: usize) {
        let (bc, bt) = (self.bit(c), self.bit(t));
        for i in 0..self.amps.len() {
            if i & bc != 0 && i & bt == 0 {
                self.amps.swap(i, i | bt);
            }
        }
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let b = self.bit(q);
        match p {
            0 => {}
            1 => self.apply_x(q),
            2 => {
                // Y = [[0, -i], [i, 0]]
                for i in 0..self.amps.len() {
                    if i & b == 0 {
                        let a0 = self.amps[i];
                        let a1 = self.amps[i | b];
                        self.amps[i] = C64::new(a1.im, -a1.re);
                        self.amps[i | b] = C64::new(-a0.im, a0.re);
                    }
                }
            }
            3 => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & b != 0 {
                        *a = -*a;
                    }
                }
            }
            _ => panic!("pauli index {p}"),
        }
    }

    /// Applies a 3-qubit matrix on qubits `q, q+1, q+2`, skipping zero entries.
    pub fn apply_mat8(&mut self, q: usize, m: &Mat8) {
        self.apply_sparse8(q, &SparseMat8::new(m));
    }

    pub fn apply_sparse8(&mut self, q: usize, m: &SparseMat8) {
        let stride = 1usize << (self.n - 3 - q);
        let mut buf = [C64::new(0.0, 0.0); 8];
        for chunk in self.amps.chunks_exact_mut(8 * stride) {
            for lo in 0..stride {
                for (y, slot) in buf.iter_mut().enumerate() {
                    *slot = chunk[y * stride + lo];
                }
                for x in 0..8 {
                    let mut acc = C64::new(0.0, 0.0);
                    for &(y, v) in &m.rows[x][..m.len[x] as usize] {
                        acc += v * buf[y as usize];
                    }
                    chunk[x * stride + lo] = acc;
                }
            }
        }
    }

    /// Applies a noiseless op. `PrepZero` resets; `MeasureAll` is ignored.
    pub fn apply(&mut self, op: &Op) {
        match *op {
            Op::Rz { q, theta } => self.apply_rz(q, theta),
            Op::U1q { q, alpha, beta } => self.apply_1q(q, &u1q_matrix(alpha, beta)),
            Op::Rzz { q0, q1, chi } => self.apply_rzz(q0, q1, chi),
            Op::H { q } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let m = [[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]];
                self.apply_1q(q, &m);
            }
            Op::Sdg { q } => {
                let b = self.bit(q);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & b != 0 {
                        *a *= C64::new(0.0, -1.0);
                    }
                }
            }
            Op::Cnot { c, t } => self.apply_cnot(c, t),
            Op::Gen { q, sign } => self.apply_mat8(q, &generator_matrix(sign).entries),
            Op::PrepZero => self.reset(0),
            Op::MeasureAll => {}
        }
    }

    /// One inverse-CDF draw from `|amp|^2`.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = self.norm_sqr();
        let mut r: f64 = rng.gen::<f64>() * total;
        let mut last_nonzero = 0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
                if r < p {
                    return i as u64;
                }
                r -= p;
            }
        }
        last_nonzero as u64
    }
}

/// Noiseless final state of `c` (measurement ignored).
pub fn statevector(c: &Circuit) -> StateVector {
    let mut sv = StateVector::zero(c.n_qubits);
    for op in &c.ops {
        sv.apply(op);
    }
    sv
}

/// A uniformly random non-identity Pauli on two qubits, as a pair.
pub fn random_pauli2<R: Rng + ?Sized>(rng: &mut R) -> (Pauli, Pauli) {
    let k = rng.gen_range(1..16u8);
    (k >> 2, k & 3)
}

pub fn random_pauli1<R: Rng + ?Sized>(rng: &mut R) -> Pauli {
    rng.gen_range(1..4u8)
}

/// Applies independent readout flips to a measured index.
pub fn readout_flips<R: Rng + ?Sized>(index: u64, n: usize, noise: &NoiseModel, rng: &mut R) -> u64 {
    if noise.eps_meas0 == 0.0 && noise.eps_meas1 == 0.0 {
        return index;
    }
    let mut out = index;
    for q in 0..n {
        let b = 1u64 << (n - 1 - q);
        let p = if index & b == 0 { noise.eps_meas0 } else { noise.eps_meas1 };
        if p > 0.0 && rng.gen::<f64>() < p {
            out ^= b;
        }
    }
    out
}

/// Initial basis state after preparation flips.
pub fn init_flips<R: Rng + ?Sized>(n: usize, noise: &NoiseModel, rng: &mut R) -> u64 {
    let mut x = 0u64;
    if noise.eps_init > 0.0 {
        for q in 0..n {
            if rng.gen::<f64>() < noise.eps_init {
                x |= 1 << (n - 1 - q);
            }
        }
    }
    x
}

/// Counters from a trajectory run, used to audit where noise was inserted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NoiseAudit {
    pub faults_1q: u64,
    pub faults_2q: u64,
    pub faults_on_rz: u64,
}

/// Pre-lowered circuit ready for repeated noisy shots.
#[derive(Debug, Clone)]
pub struct NoisySimulator {
    circuit: Circuit,
    noise: NoiseModel,
}

impl NoisySimulator {
    pub fn new(c: &Circuit, noise: NoiseModel) -> Result<Self> {
        noise.validate()?;
        c.validate()?;
        if !matches!(c.ops.last(), Some(Op::MeasureAll)) {
            return Err(Error::Circuit("circuit must end with MeasureAll".into()));
        }
        let circuit = if noise.has_gate_noise() { c.lowered() } else { c.clone() };
        Ok(Self { circuit, noise })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// One trajectory; returns the measured index (qubit 0 most significant).
    pub fn run_shot<R: Rng + ?Sized>(&self, sv: &mut StateVector, rng: &mut R) -> u64 {
        self.run_shot_audited(sv, rng, &mut NoiseAudit::default())
    }

    pub fn run_shot_audited<R: Rng + ?Sized>(
        &self,
        sv: &mut StateVector,
        rng: &mut R,
        audit: &mut NoiseAudit,
    ) -> u64 {
        let n = self.circuit.n_qubits;
        let noise = &self.noise;
        sv.reset(init_flips(n, noise, rng));
        for op in &self.circuit.ops {
            match *op {
                Op::PrepZero | Op::MeasureAll => {}
                Op::U1q { q, .. } => {
                    sv.apply(op);
                    if noise.eps_1q > 0.0 && rng.gen::<f64>() < noise.eps_1q {
                        sv.apply_pauli(q, random_pauli1(rng));
                        audit.faults_1q += 1;
                    }
                }
                Op::Rzz { q0, q1, .. } => {
                    sv.apply(op);
                    if noise.eps_2q > 0.0 && rng.gen::<f64>() < noise.eps_2q {
                        let (p0, p1) = random_pauli2(rng);
                        sv.apply_pauli(q0, p0);
                        sv.apply_pauli(q1, p1);
                        audit.faults_2q += 1;
                    }
                }
                _ => sv.apply(op),
            }
        }
        let idx = sv.sample_index(rng);
        readout_flips(idx, n, noise, rng)
    }
}

/// One noisy measurement record of `c` as a bit vector (qubit 0 first).
pub fn run_shot<R: Rng + ?Sized>(c: &Circuit, noise: &NoiseModel, rng: &mut R) -> Result<Vec<u8>> {
    let sim = NoisySimulator::new(c, *noise)?;
    let mut sv = StateVector::zero(c.n_qubits);
    let idx = sim.run_shot(&mut sv, rng);
    Ok(index_to_bits(idx, c.n_qubits))
}

pub fn index_to_bits(idx: u64, n: usize) -> Vec<u8> {
    (0..n).map(|q| ((idx >> (n - 1 - q)) & 1) as u8).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rzz_on_zero() {
        let mut c = Circuit::new(2);
        c.push(Op::Rzz { q0: 0, q1: 1, chi: PI });
        let sv = statevector(&c);
        assert!((sv.amplitudes()[0] - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn u1q_pi_flips() {
        let mut c = Circuit::new(1);
        c.push(Op::U1q { q: 0, alpha: PI, beta: 0.0 });
        let sv = statevector(&c);
        assert!((sv.amplitudes()[1] - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn lowering_preserves_action() {
        let mut c = Circuit::new(3);
        c.push(Op::U1q { q: 0, alpha: 0.7, beta: 0.3 });
        c.push(Op::U1q { q: 1, alpha: 1.1, beta: -0.4 });
        c.push(Op::U1q { q: 2, alpha: 0.2, beta: 2.0 });
        c.push(Op::H { q: 1 });
        c.push(Op::Cnot { c: 1, t: 2 });
        c.push(Op::Sdg { q: 0 });
        c.push(Op::Cnot { c: 2, t: 0 });
        let a = statevector(&c);
        let b = statevector(&c.lowered());
        let ov: C64 = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x.conj() * y).sum();
        assert!((ov.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mat8_matches_gen() {
        let mut a = StateVector::zero(5);
        for q in 0..5 {
            a.apply_1q(q, &u1q_matrix(0.3 + q as f64, 0.1 * q as f64));
        }
        let mut b = a.clone();
        a.apply(&Op::Gen { q: 1, sign: 1 });
        let m = generator_matrix(1).entries;
        // reference: explicit loop over all indices
        let shift = 5 - 3 - 1;
        let mut out = vec![C64::new(0.0, 0.0); 32];
        for i in 0..32usize {
            let x = (i >> shift) & 7;
            for y in 0..8 {
                let j = (i & !(7 << shift)) | (y << shift);
                out[i] += m[x][y] * b.amplitudes()[j];
            }
        }
        b = StateVector::from_amplitudes(5, out);
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn paulis_square_to_identity() {
        let mut a = StateVector::zero(2);
        a.apply_1q(0, &u1q_matrix(0.9, 0.2));
        let orig = a.clone();
        for p in 1..4 {
            a.apply_pauli(0, p);
            a.apply_pauli(0, p);
        }
        assert_eq!(a, orig);
    }

    #[test]
    fn prep_measure_noiseless() {
        let mut c = Circuit::new(3);
        c.push(Op::PrepZero);
        c.push(Op::MeasureAll);
        let mut rng = stream_rng(1, 0);
        for _ in 0..100 {
            assert_eq!(run_shot(&c, &NoiseModel::noiseless(), &mut rng).unwrap(), vec![0, 0, 0]);
        }
    }

    #[test]
    fn rejects_bad_noise() {
        let n = NoiseModel { eps_1q: 1.5, ..NoiseModel::noiseless() };
        assert!(n.validate().is_err());
    }
}
