use lomdec::circuit::{backpropagate, Basis, ObservableSpec, Realization};
use lomdec::dem::Noise;
use lomdec::detectors::Frame;
use lomdec::harness::{gen_repeated_gate, monte_carlo, Experiment, McConfig, RepeatedGate};
use lomdec::lom::{extract_subgraph, single_lom_decode, syndrome_of, true_flips, LomPlan, SplitPolicy};
use lomdec::pauli::Pauli;
use proptest::prelude::*;

fn repeated(g: RepeatedGate, d: usize, b: Basis, noise: Noise) -> Experiment {
    Experiment::build(gen_repeated_gate(g, d, b).unwrap(), d, Frame::Pre, noise, Realization::zeros()).unwrap()
}

fn truth(e: &Experiment, hs: &[usize], o: &ObservableSpec) -> bool {
    let t = true_flips(&e.dem, hs);
    o.ids().iter().fold(false, |a, &id| a ^ t[id as usize - 1])
}

#[test]
fn every_single_basic_error_is_corrected_d3() {
    for g in [RepeatedGate::I, RepeatedGate::H, RepeatedGate::S, RepeatedGate::Cnot, RepeatedGate::AltCnot] {
        for b in [Basis::Z, Basis::X] {
            let e = repeated(g, 3, b, Noise::Basic(0.01));
            let plan = LomPlan::new(&e.dem, &e.bare, &e.realization, &e.requests, SplitPolicy::Drop).unwrap();
            for h in 0..e.dem.hyperedges.len() {
                let got = plan.decode_requested(&syndrome_of(&e.dem, &[h]), 0).unwrap();
                for (o, &p) in e.requests.iter().zip(&got) {
                    assert_eq!(p, truth(&e, &[h], o), "{g:?} {b:?} hyperedge {h} on {:?}", o.ids());
                }
            }
        }
    }
}

// Independent single-observable decodes of O1, O2 and O1·O2 agree for
// errors below half the distance.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn products_are_consistent_below_half_distance(a in any::<u32>(), b in any::<u32>(), alt in any::<bool>()) {
        thread_local! {
            static SETUP: Vec<(Experiment, [lomdec::lom::DecodingSubgraph; 3])> = [RepeatedGate::Cnot, RepeatedGate::AltCnot]
                .into_iter()
                .map(|g| {
                    let e = repeated(g, 5, Basis::Z, Noise::Basic(0.01));
                    let sub = |obs: &[u32]| extract_subgraph(&e.dem, obs, SplitPolicy::Drop).unwrap();
                    let subs = [sub(&[0]), sub(&[1]), sub(&[0, 1])];
                    (e, subs)
                })
                .collect();
        }
        SETUP.with(|s| {
            let (e, subs) = &s[alt as usize];
            let n = e.dem.hyperedges.len();
            let hs = [a as usize % n, b as usize % n];
            let syn = syndrome_of(&e.dem, &hs);
            let v: Vec<bool> = subs.iter().map(|g| single_lom_decode(g, &syn).unwrap()).collect();
            prop_assert_eq!(v[0] ^ v[1], v[2], "pair {:?}", hs);
            Ok(())
        })?;
    }
}

// Capped at 2000 failures rather than 10^6 shots; both policies share
// seeds, so the comparison is tighter than independent runs would be.
#[test]
fn phenomenological_policies_agree_within_ten_percent() {
    let cfg = McConfig { max_shots: 1_000_000, max_failures: 2_000, seed: 5, ..McConfig::default() };
    let mut worst = (0.0, String::new());
    for g in [RepeatedGate::I, RepeatedGate::H, RepeatedGate::S, RepeatedGate::Cnot, RepeatedGate::AltCnot] {
        for b in [Basis::Z, Basis::X] {
            let e = repeated(g, 3, b, Noise::Phenomenological(0.01));
            let rate = |pol| {
                let plan = LomPlan::new(&e.dem, &e.bare, &e.realization, &e.requests, pol).unwrap();
                monte_carlo(&e, &plan, &cfg).unwrap().p_log
            };
            let (x, y) = (rate(SplitPolicy::Reweight), rate(SplitPolicy::Drop));
            let rel = (x - y).abs() / x.max(y);
            eprintln!("{g:?} {b:?}: reweight {x:.4e}, drop {y:.4e}, relative difference {rel:.3}");
            if rel > worst.0 {
                worst = (rel, format!("{g:?} {b:?}"));
            }
        }
    }
    assert!(worst.0 < 0.10, "{}: relative difference {:.3}", worst.1, worst.0);
}

#[test]
fn repeated_s_toggles_the_observable_between_x_and_y() {
    let c = gen_repeated_gate(RepeatedGate::S, 3, Basis::X).unwrap();
    let back = backpropagate(&c, &ObservableSpec::single(1), &Realization::zeros()).unwrap();
    let m = c.measurements()[0].layer;
    // location t sits before layer t; layers 1..=4 are the S gates
    let seen: Vec<Pauli> = (1..=m).map(|t| back.get(t, 0).unwrap()).collect();
    assert_eq!(seen, vec![Pauli::X, Pauli::Y, Pauli::X, Pauli::Y, Pauli::X]);
}
