mod support;

use std::f64::consts::PI;
use std::time::Instant;

use knotweave::fib::{
    basis_index, enumerate_basis, fibonacci, no_double_zero, pmf, plat_string, unrank, zeckendorf_index, FibString, WeightedSampler,
};
use knotweave::qsim::{statevector, stream_rng, StateVector};
use knotweave::rep::{
    braid_circuit, compiled_generator, circuit_matrix3, fragment_phases, generator_matrix, generator_power, Circuit,
    FIB_TRIPLES,
};
use knotweave::{BraidWord, PHI};
use num_complex::Complex64 as C64;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use support::{dense_unitary, max_diff, random_braid};

fn cis(t: f64) -> C64 {
    C64::from_polar(1.0, t)
}

#[test]
fn generator_entries() {
    let u = generator_matrix(1).entries;
    let ip = 1.0 / PHI;
    let expect = [
        (0b010, 0b010, cis(-4.0 * PI / 5.0)),
        (0b011, 0b011, cis(3.0 * PI / 5.0)),
        (0b110, 0b110, cis(3.0 * PI / 5.0)),
        (0b101, 0b101, cis(4.0 * PI / 5.0) * ip),
        (0b111, 0b111, C64::new(-ip, 0.0)),
        (0b101, 0b111, cis(-3.0 * PI / 5.0) * ip.sqrt()),
        (0b111, 0b101, cis(-3.0 * PI / 5.0) * ip.sqrt()),
    ];
    for (r, c, v) in expect {
        assert!((u[r][c] - v).norm() < 1e-12, "<{r:03b}|U|{c:03b}>");
    }
    // nothing couples Fibonacci and non-Fibonacci triples
    for r in 0..8 {
        for c in 0..8 {
            if FIB_TRIPLES.contains(&r) != FIB_TRIPLES.contains(&c) {
                assert_eq!(u[r][c].norm(), 0.0);
            }
        }
    }
}

#[test]
fn generator_is_unitary_and_inverse_is_adjoint() {
    let u = generator_matrix(1).entries;
    let v = generator_matrix(-1).entries;
    for i in 0..8 {
        for j in 0..8 {
            let uu: C64 = (0..8).map(|k| u[k][i].conj() * u[k][j]).sum();
            let uv: C64 = (0..8).map(|k| u[i][k] * v[k][j]).sum();
            let id = if i == j { 1.0 } else { 0.0 };
            assert!((uu - id).norm() < 1e-12);
            assert!((uv - id).norm() < 1e-12);
        }
    }
}

/// Columns on which the generators act as a braid group representation:
/// strings without two adjacent zeros, and the all-zero string.
fn invariant_columns(n: usize) -> Vec<usize> {
    (0..1usize << n).filter(|&x| x == 0 || no_double_zero(x as u64, n)).collect()
}

fn max_diff_on(a: &[Vec<C64>], b: &[Vec<C64>], cols: &[usize]) -> f64 {
    let pick = |m: &[Vec<C64>]| cols.iter().map(|&c| m[c].clone()).collect::<Vec<_>>();
    max_diff(&pick(a), &pick(b))
}

#[test]
fn braid_relations_dense() {
    for n in 4..=8 {
        let cols = invariant_columns(n);
        let id = dense_unitary(n, &[]);
        let top = n as i32 - 2;
        for i in 1..top {
            let a = dense_unitary(n, &[i, i + 1, i]);
            let b = dense_unitary(n, &[i + 1, i, i + 1]);
            assert!(max_diff_on(&a, &b, &cols) < 1e-12, "Yang-Baxter n={n} i={i}");
            // inverses hold on the whole space
            assert!(max_diff(&dense_unitary(n, &[i, -i]), &id) < 1e-12);
            assert!(max_diff(&dense_unitary(n, &[-i, i]), &id) < 1e-12);
            for j in (i + 2)..=top {
                let a = dense_unitary(n, &[i, j]);
                let b = dense_unitary(n, &[j, i]);
                // disjoint supports commute everywhere, neighbours at distance 2 on the span
                let d = if j - i >= 3 { max_diff(&a, &b) } else { max_diff_on(&a, &b, &cols) };
                assert!(d < 1e-12, "far commutation n={n} {i},{j}");
            }
        }
    }
}

#[test]
fn compiled_fragments_match_powers() {
    for k in 1..=9 {
        for sign in [1, -1] {
            let c = compiled_generator(k, sign).unwrap();
            assert_eq!(c.count_rzz(), 3);
            let m = circuit_matrix3(&c.ops);
            let t = generator_power(k, sign);
            let ph = cis(c.fib_phase);
            for x in 0..8 {
                for &y in &FIB_TRIPLES {
                    assert!((m[x][y] - ph * t[x][y]).norm() < 1e-9, "k={k} sign={sign}");
                }
            }
            assert!((m[0][0] - cis(c.zero_phase)).norm() < 1e-9);
        }
        let p = fragment_phases(k).unwrap();
        assert!(p.max_error < 1e-9 && p.zero_leak < 1e-9);
    }
}

#[test]
fn compiled_braid_circuit_on_fibonacci_span() {
    let mut rng = stream_rng(11, 0);
    for _ in 0..10 {
        let mut b = random_braid(5, 12, &mut rng);
        // force some runs so powers above 1 are exercised
        let mut w = b.word().to_vec();
        w.extend([2, 2, 2, 2, -3, -3]);
        b = BraidWord::new(5, w).unwrap();
        let n = b.qubits();
        for run_powers in [false, true] {
            let c = braid_circuit(&b, run_powers);
            let exact = dense_unitary(n, b.word());
            for s in enumerate_basis(n).unwrap() {
                let mut prep = Circuit::new(n);
                prep.ops = c.ops.clone();
                let mut sv = StateVector::basis(n, s.mask());
                for op in &c.ops {
                    sv.apply(op);
                }
                let col = &exact[s.mask() as usize];
                let ph = cis(c.fib_phase);
                for (a, e) in sv.amplitudes().iter().zip(col) {
                    assert!((a - ph * e).norm() < 1e-9, "{b} run_powers={run_powers} s={s:?} {a} vs {}", ph * e);
                }
            }
            // |0..0> picks up the tracked phase
            let z = statevector(&c);
            assert!((z.amplitudes()[0] - cis(c.zero_phase)).norm() < 1e-9);
        }
    }
}

#[test]
fn basis_counts_and_ranking() {
    for n in 3..=14 {
        let basis = enumerate_basis(n).unwrap();
        assert_eq!(basis.len() as u64, fibonacci(n));
        for (i, s) in basis.iter().enumerate() {
            assert_eq!(s.bit(0), 0);
            assert_eq!(s.bit(1), 1);
            assert!(s.is_fibonacci());
            assert_eq!(basis_index(s).unwrap(), i as u64);
        }
        let total: f64 = basis.iter().map(|s| pmf(s, n).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12, "n={n} total {total}");
    }
    for m in 1..=20 {
        let count = fibonacci(m + 2);
        for k in 0..count {
            assert_eq!(zeckendorf_index(&unrank(k, m).unwrap()).unwrap(), k);
        }
        assert!(unrank(count, m).is_err());
    }
    assert_eq!(plat_string(7).unwrap(), FibString::parse("0101010").unwrap());
    assert!(plat_string(6).is_err());
}

#[test]
fn sampler_chi_squared() {
    for n in [4usize, 8, 12] {
        let basis = enumerate_basis(n).unwrap();
        let sampler = WeightedSampler::new(n).unwrap();
        let mut counts = vec![0u64; basis.len()];
        let mut rng = stream_rng(12, n as u64);
        let draws = 1_000_000u64;
        for _ in 0..draws {
            let s = sampler.sample(&mut rng);
            assert!(s.is_fibonacci() && s.bit(0) == 0);
            counts[basis_index(&s).unwrap() as usize] += 1;
        }
        let stat: f64 = basis
            .iter()
            .zip(&counts)
            .map(|(s, &c)| {
                let e = pmf(s, n).unwrap() * draws as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let dof = (basis.len() - 1) as f64;
        let p = 1.0 - ChiSquared::new(dof).unwrap().cdf(stat);
        assert!(p > 1e-3, "n={n} chi2 {stat:.1} dof {dof} p {p:.2e}");
    }
}

#[test]
fn sampler_is_fast() {
    let sampler = WeightedSampler::new(32).unwrap();
    let mut rng = stream_rng(13, 0);
    let draws = 1_000_000;
    let start = Instant::now();
    let mut acc = 0u64;
    for _ in 0..draws {
        acc ^= sampler.sample(&mut rng).mask();
    }
    let per = start.elapsed().as_secs_f64() / draws as f64;
    assert!(acc != 0);
    assert!(per < 2e-6, "{:.3} us per draw", per * 1e6);
}
