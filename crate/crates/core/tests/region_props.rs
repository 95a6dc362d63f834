use std::collections::BTreeMap;

use lomdec::circuit::{
    anticommutation_vector, backpropagate, find_reliable_completion, forward_propagate, is_fragile, observable_region,
    random_circuit, regions_anticommute, reset_region, BareCircuit, MeasId, ObservableSpec, RandomCircuitOptions,
    Realization, ResetStabilizer,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circuit(seed: u64) -> (BareCircuit, Realization) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    let layers = rng.gen_range(2..=12);
    let c = random_circuit(&mut rng, &RandomCircuitOptions::full(n, layers));
    // random values for every measurement, so conditions take both branches
    let bits: BTreeMap<MeasId, bool> = (1..=c.n_measurements() as MeasId).map(|i| (i, rng.gen())).collect();
    (c, Realization::explicit(bits))
}

fn observables(c: &BareCircuit, seed: u64) -> Vec<ObservableSpec> {
    let n = c.n_measurements() as MeasId;
    let mut out: Vec<ObservableSpec> = (1..=n).map(ObservableSpec::single).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for _ in 0..n.min(8) {
        let ids: Vec<MeasId> = (1..=n).filter(|_| rng.gen_bool(0.4)).collect();
        if let Ok(o) = ObservableSpec::new(ids) {
            out.push(o);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reset_duality_holds_for_every_pair(seed in any::<u64>()) {
        let (c, r) = circuit(seed);
        for o in observables(&c, seed) {
            let rep = observable_region(&c, &o).unwrap();
            let back = backpropagate(&c, &o, &r).unwrap();
            for e in c.reset_events() {
                let s = ResetStabilizer::single(e);
                let fwd = forward_propagate(&c, &s, &r).unwrap();
                prop_assert_eq!(
                    regions_anticommute(&fwd, &rep),
                    regions_anticommute(&reset_region(&s), &back),
                    "O={:?} S={:?}\n{}", o.ids(), e, c
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn backpropagation_is_multiplicative(seed in any::<u64>()) {
        let (c, r) = circuit(seed);
        let obs = observables(&c, seed);
        for a in &obs {
            for b in obs.iter().take(4) {
                let Some(ab) = a.product(b) else { continue };
                let lhs = backpropagate(&c, &ab, &r).unwrap();
                let rhs = backpropagate(&c, a, &r).unwrap().multiply(&backpropagate(&c, b, &r).unwrap());
                prop_assert_eq!(lhs, rhs);
                let mut v = anticommutation_vector(&c, a, &r).unwrap();
                v.xor_with(&anticommutation_vector(&c, b, &r).unwrap());
                prop_assert_eq!(v, anticommutation_vector(&c, &ab, &r).unwrap());
            }
        }
    }

    #[test]
    fn backpropagation_stays_after_resets(seed in any::<u64>()) {
        let (c, r) = circuit(seed);
        // first preparation layer of each qubit, RT included
        let act = c.activity();
        for o in observables(&c, seed) {
            for ((t, q), _) in backpropagate(&c, &o, &r).unwrap().entries() {
                let first = (0..c.n_layers()).find(|&l| matches!(act[l][q as usize], lomdec::circuit::Activity::Reset(_)));
                prop_assert!(matches!(first, Some(l) if l < t), "entry at ({}, q{}) before any reset", t, q);
            }
        }
    }

    #[test]
    fn completions_are_reliable(seed in any::<u64>()) {
        let (c, r) = circuit(seed);
        let n = c.n_measurements() as MeasId;
        let fragile: Vec<ObservableSpec> = (1..=n)
            .map(ObservableSpec::single)
            .filter(|o| is_fragile(&c, o, &r).unwrap().0)
            .collect();
        for (k, o) in fragile.iter().enumerate() {
            let pool = &fragile[..k];
            if let Some(idx) = find_reliable_completion(&c, o, pool, &r).unwrap() {
                let mut prod = o.clone();
                for &i in &idx {
                    prop_assert!(i < pool.len());
                    match prod.product(&pool[i]) {
                        Some(p) => prod = p,
                        None => prop_assert!(false, "completion cancels the observable"),
                    }
                }
                prop_assert!(!is_fragile(&c, &prod, &r).unwrap().0);
            } else {
                // no subset works: check exhaustively for small pools
                if pool.len() <= 10 {
                    for mask in 0u32..(1 << pool.len()) {
                        let mut prod = Some(o.clone());
                        for (i, p) in pool.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                prod = prod.and_then(|x| x.product(p));
                            }
                        }
                        if let Some(p) = prod {
                            prop_assert!(is_fragile(&c, &p, &r).unwrap().0);
                        }
                    }
                }
            }
        }
    }
}
