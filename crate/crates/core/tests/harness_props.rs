use lomdec::circuit::{Basis, Realization};
use lomdec::dem::Noise;
use lomdec::detectors::Frame;
use lomdec::harness::{gen_repeated_gate, monte_carlo, wilson_interval, Experiment, McConfig, RepeatedGate, ShotDecoder, Z95};
use lomdec::lom::LomPlan;
use lomdec::Result;
use proptest::prelude::*;

/// Predicts no flip at all, so it fails exactly when the requested product
/// is flipped by the sampled errors.
struct Silent(usize);

impl ShotDecoder for Silent {
    fn predict(&self, _: &[u32], _: u64) -> Result<Vec<bool>> {
        Ok(vec![false; self.0])
    }
}

#[test]
fn estimator_interval_covers_the_exact_rate() {
    let e = Experiment::build(
        gen_repeated_gate(RepeatedGate::I, 3, Basis::Z).unwrap(),
        3,
        Frame::Pre,
        Noise::Basic(0.002),
        Realization::zeros(),
    )
    .unwrap();
    assert_eq!(e.requests.len(), 1);
    let k = e.requests[0].ids()[0] - 1;
    // oracle: an odd number of the flipping hyperedges fire
    let q = e.dem.hyperedges.iter().filter(|h| h.flips(k)).fold(1.0, |acc, h| acc * (1.0 - 2.0 * h.p));
    let q = (1.0 - q) / 2.0;
    assert!(q > 0.01 && q < 0.2, "q = {q}");
    let reps = 200;
    let runs: Vec<_> = (0..reps)
        .map(|s| {
            let cfg = McConfig { max_shots: 2000, max_failures: u64::MAX, seed: s, ..McConfig::default() };
            monte_carlo(&e, &Silent(1), &cfg).unwrap()
        })
        .collect();
    let covered = runs.iter().filter(|r| r.ci_lo <= q && q <= r.ci_hi).count();
    let total: u64 = runs.iter().map(|r| r.failures).sum();
    eprintln!("pooled rate {:.5} vs exact {q:.5}", total as f64 / (2000 * reps) as f64);
    assert!(covered as f64 >= 0.93 * reps as f64, "coverage {covered}/{reps} for q = {q}");
}

#[test]
fn stopping_rule_caps_failures_and_shots() {
    let e = Experiment::build(
        gen_repeated_gate(RepeatedGate::I, 3, Basis::Z).unwrap(),
        3,
        Frame::Pre,
        Noise::Phenomenological(0.05),
        Realization::zeros(),
    )
    .unwrap();
    let plan = LomPlan::new(&e.dem, &e.bare, &e.realization, &e.requests, Default::default()).unwrap();
    let r = monte_carlo(&e, &plan, &McConfig { max_shots: 1_000_000, max_failures: 50, ..McConfig::default() }).unwrap();
    assert_eq!(r.failures, 50);
    assert!(r.shots < 1_000_000);
    let r = monte_carlo(&e, &plan, &McConfig { max_shots: 300, max_failures: 1_000_000, ..McConfig::default() }).unwrap();
    assert_eq!(r.shots, 300);
}

fn wilson_oracle(k: f64, n: f64) -> (f64, f64) {
    let z = 1.959964f64;
    let c = (k + z * z / 2.0) / (n + z * z);
    let h = z * (k * (n - k) / n + z * z / 4.0).sqrt() / (n + z * z);
    (c - h, c + h)
}

proptest! {
    #[test]
    fn wilson_matches_the_formula(n in 1u64..100_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as u64;
        let (lo, hi) = wilson_interval(k, n, Z95);
        let (a, b) = wilson_oracle(k as f64, n as f64);
        prop_assert!((lo - a.max(0.0)).abs() < 1e-9 && (hi - b.min(1.0)).abs() < 1e-9);
        let p = k as f64 / n as f64;
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
    }
}
