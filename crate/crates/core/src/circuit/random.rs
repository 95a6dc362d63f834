use rand::seq::SliceRandom;
use rand::Rng;

use super::{BareCircuit, Basis, Element, Gate1, Gate2, MeasId, Op, ResetKind};
use crate::pauli::Qubit;

#[derive(Clone, Debug)]
pub struct RandomCircuitOptions {
    pub n_qubits: u32,
    pub n_layers: usize,
    pub one_qubit: Vec<Gate1>,
    pub two_qubit: Vec<Gate2>,
    pub t_resets: bool,
    pub conditionals: bool,
    /// Measure every active qubit in a final layer.
    pub measure_at_end: bool,
}

impl RandomCircuitOptions {
    /// Everything the bare-circuit format supports.
    pub fn full(n_qubits: u32, n_layers: usize) -> Self {
        RandomCircuitOptions {
            n_qubits,
            n_layers,
            one_qubit: vec![Gate1::I, Gate1::H, Gate1::S, Gate1::Sdg, Gate1::X, Gate1::Z],
            two_qubit: vec![Gate2::Cnot, Gate2::Cz, Gate2::Swap],
            t_resets: true,
            conditionals: true,
            measure_at_end: true,
        }
    }

    /// Gates that lower to fold-transversal layers.
    pub fn encodable(n_qubits: u32, n_layers: usize) -> Self {
        RandomCircuitOptions {
            n_qubits,
            n_layers,
            one_qubit: vec![Gate1::I, Gate1::H, Gate1::S],
            two_qubit: vec![Gate2::Cnot],
            t_resets: false,
            conditionals: false,
            measure_at_end: true,
        }
    }
}

/// Random valid bare circuit. The last layer measures every active qubit
/// when `measure_at_end` is set (and then counts towards `n_layers`).
pub fn random_circuit(rng: &mut impl Rng, opt: &RandomCircuitOptions) -> BareCircuit {
    let n = opt.n_qubits as usize;
    let mut active = vec![false; n];
    let mut layers: Vec<Vec<Element>> = Vec::new();
    let mut meas_layers: Vec<usize> = Vec::new();
    let body = if opt.measure_at_end {
        opt.n_layers.saturating_sub(1)
    } else {
        opt.n_layers
    };
    for l in 0..body {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut used = vec![false; n];
        let mut layer = Vec::new();
        let mut next = active.clone();
        // conditions may only reference measurements of earlier layers
        let earlier = meas_layers.len();
        for &q in &order {
            if used[q] {
                continue;
            }
            if !active[q] {
                if rng.gen_bool(0.6) || l == 0 {
                    let kind = if opt.t_resets && rng.gen_bool(0.1) {
                        ResetKind::T
                    } else if rng.gen_bool(0.5) {
                        ResetKind::Zero
                    } else {
                        ResetKind::Plus
                    };
                    layer.push(Element::Reset(kind, q as Qubit));
                    used[q] = true;
                    next[q] = true;
                }
                continue;
            }
            let roll: f64 = rng.gen();
            if roll < 0.15 {
                let b = if rng.gen_bool(0.5) {
                    Basis::Z
                } else {
                    Basis::X
                };
                layer.push(Element::Measure(b, q as Qubit));
                used[q] = true;
                next[q] = false;
                meas_layers.push(l);
            } else if roll < 0.5 && !opt.two_qubit.is_empty() {
                let partners: Vec<usize> = (0..n)
                    .filter(|&p| p != q && active[p] && !used[p])
                    .collect();
                if let Some(&p) = partners.choose(rng) {
                    let g = *opt.two_qubit.choose(rng).unwrap();
                    let op = Op::Two(g, q as Qubit, p as Qubit);
                    used[q] = true;
                    used[p] = true;
                    layer.push(maybe_cond(rng, opt, op, &meas_layers[..earlier]));
                }
            } else if roll < 0.85 && !opt.one_qubit.is_empty() {
                let g = *opt.one_qubit.choose(rng).unwrap();
                used[q] = true;
                layer.push(maybe_cond(rng, opt, Op::One(g, q as Qubit), &meas_layers[..earlier]));
            }
        }
        layers.push(layer);
        active = next;
    }
    if opt.measure_at_end && opt.n_layers > 0 {
        let layer: Vec<Element> = (0..n)
            .filter(|&q| active[q])
            .map(|q| {
                Element::Measure(
                    if rng.gen_bool(0.5) {
                        Basis::Z
                    } else {
                        Basis::X
                    },
                    q as Qubit,
                )
            })
            .collect();
        layers.push(layer);
    }
    BareCircuit::new(opt.n_qubits, layers).expect("generator emits valid circuits")
}

fn maybe_cond(
    rng: &mut impl Rng,
    opt: &RandomCircuitOptions,
    op: Op,
    meas_layers: &[usize],
) -> Element {
    if opt.conditionals && !meas_layers.is_empty() && rng.gen_bool(0.2) {
        let k = rng.gen_range(1..=meas_layers.len().min(2));
        let mut ids: Vec<MeasId> = (1..=meas_layers.len() as MeasId).collect();
        ids.shuffle(rng);
        ids.truncate(k);
        ids.sort_unstable();
        Element::Cond(op, ids)
    } else {
        Element::Gate(op)
    }
}
