mod support;

use knotweave::baselines::{exact_weighted_trace, plat_amplitude, SubspaceView};
use knotweave::fib::FibString;
use knotweave::protocol::{
    estimate_markov, estimate_markov_with, estimate_plat, postprocess, Flags, RunOptions, ShotMode,
};
use knotweave::qsim::{index_to_bits, statevector, stream_rng, NoiseAudit, NoiseModel, NoisySimulator, StateVector};
use knotweave::rep::{cfev_for_braid, Op};
use knotweave::{BraidWord, Error};
use num_complex::Complex64 as C64;
use rand::Rng;
use support::random_braid;

#[test]
fn noiseless_outcome_law() {
    let mut rng = stream_rng(21, 0);
    for _ in 0..50 {
        let strands = rng.gen_range(2..=5);
        let b = random_braid(strands, rng.gen_range(1..15), &mut rng);
        let n = b.qubits();
        let view = SubspaceView::new(n).unwrap();
        let k = rng.gen_range(0..view.dim());
        let s = FibString::from_mask(view.mask(k), n);
        let z = view.evolve(b.word(), &view.unit(k))[k];
        for imag in [false, true] {
            let c = cfev_for_braid(&b, &s, imag, true).unwrap();
            let sv = statevector(&c);
            let (mut plus, mut minus, mut zero, mut bad) = (0.0, 0.0, 0.0, 0.0);
            for (i, a) in sv.amplitudes().iter().enumerate() {
                let p = a.norm_sqr();
                let o = postprocess(&index_to_bits(i as u64, n), &s).unwrap();
                match (o.g2, o.r) {
                    (0, _) => bad += p,
                    (_, 1) => plus += p,
                    (_, -1) => minus += p,
                    _ => zero += p,
                }
            }
            let part = if imag { z.im } else { z.re };
            assert!((plus - minus - part).abs() < 1e-9, "{b} {s}");
            assert!((zero - (1.0 - z.norm_sqr()) / 2.0).abs() < 1e-9);
            assert!(bad < 1e-12);
        }
    }
}

#[test]
fn noiseless_runs_discard_nothing() {
    let b = BraidWord::new(5, vec![1, 2, -3, 4, 4, -2, 1, 3]).unwrap();
    let est = estimate_markov(&b, 5000, NoiseModel::noiseless(), Flags::default(), 3).unwrap();
    assert_eq!(est.shots_discarded, 0);
    assert_eq!(est.r, est.r_unfiltered);
    let off = Flags { error_detection: false, ..Flags::default() };
    let plain = estimate_markov(&b, 5000, NoiseModel::noiseless(), off, 3).unwrap();
    assert_eq!(plain.r, est.r);
}

#[test]
fn fast_and_reference_paths_agree() {
    let b = BraidWord::new(4, vec![1, 2, 2, -3, 1, 2, -1, 3]).unwrap();
    let noise = NoiseModel::from_eps2q(3e-2);
    let shots = 20_000;
    let run = |mode| {
        let opts = RunOptions { mode, ..RunOptions::default() };
        estimate_markov_with(&b, shots, noise, Flags::default(), 7, opts).unwrap()
    };
    let fast = run(ShotMode::Fast);
    let reference = run(ShotMode::Reference);
    let se_re = fast.stderr_re.hypot(reference.stderr_re);
    let se_im = fast.stderr_im.hypot(reference.stderr_im);
    assert!((fast.r.re - reference.r.re).abs() < 5.0 * se_re, "{} vs {}", fast.r, reference.r);
    assert!((fast.r.im - reference.r.im).abs() < 5.0 * se_im);
    let (d1, d2) = (fast.discard_rate(), reference.discard_rate());
    let total = 2.0 * shots as f64;
    let se_d = ((d1 * (1.0 - d1) + d2 * (1.0 - d2)) / total).sqrt();
    assert!((d1 - d2).abs() < 5.0 * se_d, "discard {d1} vs {d2}");
    assert!(d1 > 0.0);
}

#[test]
fn detection_removes_bias_under_heavy_noise() {
    let b = BraidWord::new(4, vec![1, 2, 2, -3, 1, 2, -1, 3]).unwrap();
    let oracle = exact_weighted_trace(&b).unwrap();
    let est = estimate_markov(&b, 40_000, NoiseModel::from_eps2q(2e-2), Flags::default(), 8).unwrap();
    assert!((est.r - oracle).norm() < (est.r_unfiltered - oracle).norm());
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let b = BraidWord::new(4, vec![1, -2, 3, 2, 1]).unwrap();
    let noise = NoiseModel::from_eps2q(1e-2);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_markov(&b, 6000, noise, Flags::default(), 11).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn plat_estimate_needs_even_strands() {
    let b = BraidWord::new(3, vec![1, 2]).unwrap();
    assert!(matches!(
        estimate_plat(&b, 10, NoiseModel::noiseless(), Flags::default(), 0),
        Err(Error::OddStrands(3))
    ));
    let shot_level = Flags { shot_level_trick: true, ..Flags::default() };
    assert!(matches!(
        estimate_markov(&b, 10, NoiseModel::noiseless(), shot_level, 0),
        Err(Error::Config(_))
    ));
}

#[test]
fn plat_estimate_is_unbiased() {
    let b = BraidWord::new(4, vec![1, 2, -3, 2, 2, 1, -2]).unwrap();
    let amp = plat_amplitude(&b).unwrap();
    let est = estimate_plat(&b, 20_000, NoiseModel::noiseless(), Flags::default(), 4).unwrap();
    assert!((est.r.re - amp.re).abs() < 5.0 * est.stderr_re);
    assert!((est.r.im - amp.im).abs() < 5.0 * est.stderr_im);
}

#[test]
fn noise_is_never_inserted_after_rz() {
    let b = BraidWord::new(4, vec![1, 2, 3, 3, -2]).unwrap();
    let s = FibString::parse("01011").unwrap();
    let c = cfev_for_braid(&b, &s, false, true).unwrap();
    let noise = NoiseModel { eps_1q: 1.0, eps_2q: 1.0, ..NoiseModel::noiseless() };
    let sim = NoisySimulator::new(&c, noise).unwrap();
    let lowered = sim.circuit();
    let n_1q = lowered.count(|op| matches!(op, Op::U1q { .. }));
    let n_2q = lowered.count(|op| matches!(op, Op::Rzz { .. }));
    let mut rng = stream_rng(5, 0);
    let mut sv = StateVector::zero(c.n_qubits);
    let mut audit = NoiseAudit::default();
    for _ in 0..20 {
        sim.run_shot_audited(&mut sv, &mut rng, &mut audit);
    }
    assert_eq!(audit.faults_on_rz, 0);
    assert_eq!(audit.faults_1q, 20 * n_1q as u64);
    assert_eq!(audit.faults_2q, 20 * n_2q as u64);
}

#[test]
fn noise_presets() {
    let h = NoiseModel::preset("h2like").unwrap();
    assert_eq!(h.eps_2q, 5e-4);
    assert_eq!(h.eps_1q, 5e-5);
    assert_eq!(NoiseModel::preset("low").unwrap().eps_2q, 1e-4);
    assert!(NoiseModel::preset("none").unwrap().is_noiseless());
    assert!(NoiseModel::preset("bogus").is_none());
    assert!(NoiseModel { eps_2q: 1.5, ..NoiseModel::noiseless() }.validate().is_err());
}

#[test]
fn coherent_phase_rotates_noiseless_estimate() {
    let b = BraidWord::new(4, vec![1, 2, 1, -3]).unwrap();
    let amp = plat_amplitude(&b).unwrap();
    let th = 0.4;
    let noise = NoiseModel { coherent_phase: Some(th), ..NoiseModel::noiseless() };
    let est = estimate_plat(&b, 40_000, noise, Flags::default(), 6).unwrap();
    let want = C64::from_polar(1.0, th) * amp;
    assert!((est.r.re - want.re).abs() < 5.0 * est.stderr_re);
    assert!((est.r.im - want.im).abs() < 5.0 * est.stderr_im);
}
