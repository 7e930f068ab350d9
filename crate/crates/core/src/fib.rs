//! Fibonacci strings, the basis `F_n`, Zeckendorf ranking and the weighted
//! sampler.
//!
//! A string `s = s_0 s_1 ... s_{n-1}` is stored as a mask whose bit
//! `n-1-i` holds `s_i`, so the mask is also the computational basis index
//! with `q_0` as the most significant qubit.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// The golden ratio.
pub const PHI: f64 = 1.618_033_988_749_895;

/// Largest supported string length.
pub const MAX_QUBITS: usize = 62;

/// Fibonacci number `f_k` with `f_0 = 0`, `f_1 = 1`. Exact for `k <= 93`.
pub fn fibonacci(k: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..k {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

/// Table of Fibonacci numbers `f_0..=f_{n+2}`.
#[derive(Debug, Clone)]
pub struct FibWeights {
    pub n: usize,
    pub fib: Vec<u64>,
}

impl FibWeights {
    pub fn new(n: usize) -> Self {
        let mut fib = vec![0u64, 1];
        while fib.len() < n + 3 {
            let k = fib.len();
            fib.push(fib[k - 1] + fib[k - 2]);
        }
        Self { n, fib }
    }

    #[inline]
    pub fn f(&self, k: usize) -> u64 {
        self.fib[k]
    }

    /// `|F_n| = f_n`.
    pub fn basis_size(&self) -> u64 {
        self.fib[self.n]
    }

    /// Alg. 1 branch threshold `f_{n-1} / phi^{n-2}`, i.e. `P(s_{n-1} = 1)`.
    pub fn last_bit_probability(&self) -> f64 {
        let n = self.n;
        self.fib[n - 1] as f64 / PHI.powi(n as i32 - 2)
    }
}

/// A bit string of length `n`, `s_0` first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FibString {
    mask: u64,
    n: usize,
}

impl FibString {
    /// Wraps a mask without checking the Fibonacci condition.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        debug_assert!(n <= MAX_QUBITS);
        Self { mask: mask & low_mask(n), n }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let n = bits.len();
        let mut mask = 0u64;
        for &b in bits {
            mask = (mask << 1) | (b & 1) as u64;
        }
        Self { mask, n }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text.len() > MAX_QUBITS {
            return Err(Error::Syntax(format!("bad bit string {text:?}")));
        }
        let mut bits = Vec::with_capacity(text.len());
        for c in text.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(Error::Syntax(format!("bad bit string {text:?}"))),
            }
        }
        Ok(Self::from_bits(&bits))
    }

    #[inline]
    pub fn mask(&self) -> u64 {
        self.mask
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Bit `s_i`.
    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        ((self.mask >> (self.n - 1 - i)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.n).map(|i| self.bit(i)).collect()
    }

    /// No two consecutive zeros (membership in `F'_n`).
    pub fn is_fibonacci_prime(&self) -> bool {
        no_double_zero(self.mask, self.n)
    }

    /// Membership in `F_n`: `s_0 = 0` and no two consecutive zeros.
    pub fn is_fibonacci(&self) -> bool {
        self.n >= 2 && self.bit(0) == 0 && self.is_fibonacci_prime()
    }

    /// Substring `s_from .. s_{n-1}`.
    pub fn tail(&self, from: usize) -> FibString {
        FibString::from_mask(self.mask, self.n - from)
    }
}

impl fmt::Display for FibString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// True when the low `n` bits of `mask` contain no adjacent pair of zeros.
#[inline]
pub fn no_double_zero(mask: u64, n: usize) -> bool {
    if n < 2 {
        return true;
    }
    let z = !mask & low_mask(n);
    z & (z >> 1) == 0
}

/// Zeckendorf rank of `s` in `F'_m` (`m = s.len()`), in `[0, f_{m+2})`.
///
/// Inverse of [`unrank`]: position `i` contributes `f_{i+2}` when `s_i = 0`.
pub fn zeckendorf_index(s: &FibString) -> Result<u64> {
    if !s.is_fibonacci_prime() {
        return Err(Error::NotFibonacci(s.to_string()));
    }
    let w = FibWeights::new(s.len());
    let mut k = 0u64;
    for i in 0..s.len() {
        if s.bit(i) == 0 {
            k += w.f(i + 2);
        }
    }
    Ok(k)
}

/// String of `F'_m` with Zeckendorf rank `k`.
pub fn unrank(k: u64, m: usize) -> Result<FibString> {
    if m > MAX_QUBITS {
        return Err(Error::SizeCap { n: m, cap: MAX_QUBITS });
    }
    let w = FibWeights::new(m);
    if k >= w.f(m + 2) {
        return Err(Error::Range(format!("rank {k} outside [0, {})", w.f(m + 2))));
    }
    Ok(FibString::from_mask(unrank_mask(k, m, &w.fib), m))
}

/// Mask-level unrank; `fib` must hold at least `f_{m+1}`.
#[inline]
pub(crate) fn unrank_mask(mut k: u64, m: usize, fib: &[u64]) -> u64 {
    let mut mask = 0u64;
    for i in (0..m).rev() {
        let bit = if k >= fib[i + 2] {
            k -= fib[i + 2];
            0
        } else {
            1
        };
        mask |= bit << (m - 1 - i);
    }
    mask
}

/// The basis `F_n`, ordered by the Zeckendorf rank of `s_2 .. s_{n-1}`.
///
/// Position `k` holds `01` followed by `unrank(k, n - 2)`; position 0 is
/// therefore `011...1`.
pub fn enumerate_basis(n: usize) -> Result<Vec<FibString>> {
    if n < 2 {
        return Err(Error::Range(format!("basis needs n >= 2, got {n}")));
    }
    if n > MAX_QUBITS {
        return Err(Error::SizeCap { n, cap: MAX_QUBITS });
    }
    let w = FibWeights::new(n);
    let head = 1u64 << (n - 2);
    Ok((0..w.f(n))
        .map(|k| FibString::from_mask(head | unrank_mask(k, n - 2, &w.fib), n))
        .collect())
}

/// Index of `s` within [`enumerate_basis`].
pub fn basis_index(s: &FibString) -> Result<u64> {
    if !s.is_fibonacci() {
        return Err(Error::NotFibonacci(s.to_string()));
    }
    zeckendorf_index(&s.tail(2))
}

/// Weight `p(s) = phi^{s_{n-1}} / phi^{n-1}`, zero outside `F_n`.
pub fn pmf(s: &FibString, n: usize) -> Result<f64> {
    if s.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: s.len() });
    }
    if !s.is_fibonacci() {
        return Ok(0.0);
    }
    Ok(PHI.powi(s.bit(n - 1) as i32) / PHI.powi(n as i32 - 1))
}

/// Precomputed sampler for `p(s)` on `F_n`.
#[derive(Debug, Clone)]
pub struct WeightedSampler {
    n: usize,
    threshold: f64,
    fib: Vec<u64>,
}

impl WeightedSampler {
    pub fn new(n: usize) -> Result<Self> {
        if !(3..=MAX_QUBITS).contains(&n) {
            return Err(Error::Range(format!("sampler needs 3 <= n <= {MAX_QUBITS}, got {n}")));
        }
        let w = FibWeights::new(n);
        Ok(Self { n, threshold: w.last_bit_probability(), fib: w.fib })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FibString {
        let n = self.n;
        let fib = &self.fib;
        // s_0 = 0, s_1 = 1
        let mut mask = 1u64 << (n - 2);
        let r: f64 = rng.gen();
        let (mut j, mut k) = if r <= self.threshold {
            mask |= 1;
            (n as isize - 2, rng.gen_range(0..fib[n - 1]))
        } else {
            mask |= 1 << 1;
            (n as isize - 3, rng.gen_range(0..fib[n - 2]))
        };
        while j >= 2 {
            let ju = j as usize;
            if k >= fib[ju] {
                k -= fib[ju];
            } else {
                mask |= 1 << (n - 1 - ju);
            }
            j -= 1;
        }
        FibString::from_mask(mask, n)
    }
}

/// One draw from `p(s)` on `F_n`.
pub fn sample_weighted<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<FibString> {
    Ok(WeightedSampler::new(n)?.sample(rng))
}

/// The fixed Plat string `0101...10` of odd length `n`.
pub fn plat_string(n: usize) -> Result<FibString> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Range(format!("plat string needs odd n >= 3, got {n}")));
    }
    let bits: Vec<u8> = (0..n).map(|i| if i == n - 1 { 0 } else { (i % 2) as u8 }).collect();
    Ok(FibString::from_bits(&bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fibonacci_numbers() {
        let f: Vec<u64> = (0..10).map(fibonacci).collect();
        assert_eq!(f, vec![0, 1, 1, 2, 3, 5, 8, 13, 21, 34]);
    }

    #[test]
    fn basis_n4() {
        let b: Vec<String> = enumerate_basis(4).unwrap().iter().map(|s| s.to_string()).collect();
        assert_eq!(b, vec!["0111", "0101", "0110"]);
        assert_eq!(enumerate_basis(2).unwrap()[0].to_string(), "01");
    }

    #[test]
    fn basis_matches_brute_force() {
        for n in 2..=16 {
            let mut brute: Vec<u64> = (0..1u64 << n)
                .filter(|&m| FibString::from_mask(m, n).is_fibonacci())
                .collect();
            let mut ours: Vec<u64> = enumerate_basis(n).unwrap().iter().map(|s| s.mask()).collect();
            assert_eq!(ours.len() as u64, fibonacci(n));
            brute.sort();
            ours.sort();
            assert_eq!(brute, ours);
        }
    }

    #[test]
    fn rank_roundtrip() {
        for m in 1..=20 {
            let total = fibonacci(m + 2);
            for k in 0..total.min(5000) {
                let s = unrank(k, m).unwrap();
                assert!(s.is_fibonacci_prime());
                assert_eq!(zeckendorf_index(&s).unwrap(), k);
            }
        }
        assert_eq!(unrank(0, 5).unwrap().to_string(), "11111");
        assert!(unrank(5, 3).is_err());
    }

    #[test]
    fn pmf_values() {
        let s = FibString::parse("0101").unwrap();
        assert!((pmf(&s, 4).unwrap() - PHI.powi(-2)).abs() < 1e-15);
        assert_eq!(pmf(&FibString::parse("0100").unwrap(), 4).unwrap(), 0.0);
        let total: f64 = enumerate_basis(5).unwrap().iter().map(|s| pmf(s, 5).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_identity() {
        for n in 3..40 {
            let w = FibWeights::new(n);
            let lhs = w.last_bit_probability();
            let rhs = PHI * w.f(n - 1) as f64 / PHI.powi(n as i32 - 1);
            assert!((lhs - rhs).abs() < 1e-12);
            let alt = PHI * w.f(n - 1) as f64 / (PHI * w.f(n - 1) as f64 + w.f(n - 2) as f64);
            assert!((lhs - alt).abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_only_fibonacci() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 3..=30 {
            let s = WeightedSampler::new(n).unwrap();
            for _ in 0..2000 {
                assert!(s.sample(&mut rng).is_fibonacci());
            }
        }
    }

    #[test]
    fn plat_string_shape() {
        assert_eq!(plat_string(5).unwrap().to_string(), "01010");
        assert_eq!(plat_string(3).unwrap().to_string(), "010");
        assert!(plat_string(4).is_err());
    }
}
