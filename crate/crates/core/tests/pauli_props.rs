use lomdec::pauli::{commutes, conjugate, multiply, CliffordLayer, Direction, Gate, Pauli, PauliString};
use lomdec::tableau::Tableau;
use proptest::prelude::*;

const N: u32 = 5;

fn pauli() -> impl Strategy<Value = Option<Pauli>> {
    prop_oneof![Just(None), Just(Some(Pauli::X)), Just(Some(Pauli::Y)), Just(Some(Pauli::Z))]
}

fn pauli_string() -> impl Strategy<Value = PauliString> {
    proptest::collection::vec(pauli(), N as usize)
        .prop_map(|v| PauliString::from_entries(v.into_iter().enumerate().filter_map(|(q, p)| Some((q as u32, p?)))))
}

// A layer from a random permutation: consecutive qubits are paired for
// two-qubit gates, kind selects the gate.
fn layer() -> impl Strategy<Value = CliffordLayer> {
    (Just((0..N).collect::<Vec<u32>>()).prop_shuffle(), proptest::collection::vec(0u8..8, N as usize)).prop_map(
        |(perm, kinds)| {
            let mut gates = Vec::new();
            let mut i = 0;
            while i < perm.len() {
                let q = perm[i];
                let k = kinds[i];
                if k >= 5 && i + 1 < perm.len() {
                    let r = perm[i + 1];
                    gates.push(match k {
                        5 => Gate::Cnot(q, r),
                        6 => Gate::Cz(q, r),
                        _ => Gate::Swap(q, r),
                    });
                    i += 2;
                    continue;
                }
                match k {
                    0 | 1 => gates.push(Gate::H(q)),
                    2 => gates.push(Gate::S(q)),
                    3 => gates.push(Gate::Sdg(q)),
                    _ => {}
                }
                i += 1;
            }
            CliffordLayer::new(gates).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn conjugation_round_trips(p in pauli_string(), l in layer()) {
        let f = conjugate(&p, &l, Direction::Forward);
        prop_assert_eq!(conjugate(&f, &l, Direction::Backward), p.clone());
        prop_assert_eq!(f.weight() == 0, p.weight() == 0);
    }

    #[test]
    fn conjugation_preserves_commutation(a in pauli_string(), b in pauli_string(), l in layer()) {
        let (fa, fb) = (conjugate(&a, &l, Direction::Forward), conjugate(&b, &l, Direction::Forward));
        prop_assert_eq!(commutes(&a, &b), commutes(&fa, &fb));
    }

    #[test]
    fn conjugation_is_multiplicative(a in pauli_string(), b in pauli_string(), l in layer()) {
        let lhs = conjugate(&multiply(&a, &b), &l, Direction::Forward);
        let rhs = multiply(&conjugate(&a, &l, Direction::Forward), &conjugate(&b, &l, Direction::Forward));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_algebra(a in pauli_string(), b in pauli_string(), c in pauli_string()) {
        prop_assert_eq!(multiply(&multiply(&a, &b), &c), multiply(&a, &multiply(&b, &c)));
        prop_assert_eq!(multiply(&a, &b), multiply(&b, &a));
        prop_assert!(multiply(&a, &a).is_identity());
        prop_assert!(a.iter().all(|(_, p)| [Pauli::X, Pauli::Y, Pauli::Z].contains(&p)));
        // commutation is a symmetric bilinear form
        prop_assert_eq!(commutes(&a, &multiply(&b, &c)), commutes(&a, &b) == commutes(&a, &c));
    }

    // Oracle: after running the layers on |0…0⟩, the forward images of every
    // Z_q must have deterministic outcomes on the tableau.
    #[test]
    fn forward_images_stabilize_the_evolved_state(ls in proptest::collection::vec(layer(), 1..6)) {
        let mut t = Tableau::new(N as usize);
        for l in &ls {
            t.apply_layer(l).unwrap();
        }
        for q in 0..N {
            let mut z = PauliString::single(q, Pauli::Z);
            for l in &ls {
                z = conjugate(&z, l, Direction::Forward);
            }
            prop_assert!(t.peek(&z).unwrap().is_some(), "image of Z{} is not a stabilizer", q);
            let mut x = PauliString::single(q, Pauli::X);
            for l in &ls {
                x = conjugate(&x, l, Direction::Forward);
            }
            prop_assert!(t.peek(&x).unwrap().is_none(), "image of X{} is a stabilizer", q);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Measuring a stabilizer of the evolved state, twice, gives the same bits
    // for every seed.
    #[test]
    fn stabilizer_measurements_are_seed_independent(ls in proptest::collection::vec(layer(), 1..5), q in 0..N) {
        use lomdec::tableau::{tableau_run, TableauOp};
        let mut prog: Vec<TableauOp> = ls.iter().cloned().map(TableauOp::Layer).collect();
        let mut z = PauliString::single(q, Pauli::Z);
        for l in &ls {
            z = conjugate(&z, l, Direction::Forward);
        }
        prog.push(TableauOp::MeasurePauli(z.clone()));
        prog.push(TableauOp::MeasurePauli(z));
        let first = tableau_run(N as usize, &prog, 0).unwrap();
        for seed in 1..8 {
            prop_assert_eq!(&tableau_run(N as usize, &prog, seed).unwrap(), &first);
        }
    }
}
