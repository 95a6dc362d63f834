//! Bare logical circuits and their observing / reset-stabilizing regions.

mod parse;
mod random;
mod region;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::{CliffordLayer, Gate, Pauli, Qubit};

pub use parse::{parse_circuit, write_circuit};
pub use random::{random_circuit, RandomCircuitOptions};
pub use region::{
    anticommutation_vector, backpropagate, find_reliable_completion, forward_propagate, is_fragile,
    is_fragile_forward, observable_region, regions_anticommute, reset_region, ObservableSpec,
    PauliRegion, ResetEvent, ResetStabilizer,
};

/// Measurement ids are 1-based, numbered in program order.
pub type MeasId = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn pauli(self) -> Pauli {
        match self {
            Basis::Z => Pauli::Z,
            Basis::X => Pauli::X,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ResetKind {
    Zero,
    Plus,
    T,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Gate1 {
    I,
    H,
    S,
    Sdg,
    X,
    Z,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Gate2 {
    Cnot,
    Cz,
    Swap,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Op {
    One(Gate1, Qubit),
    Two(Gate2, Qubit, Qubit),
}

impl Op {
    pub fn qubits(&self) -> Vec<Qubit> {
        match *self {
            Op::One(_, q) => vec![q],
            Op::Two(_, a, b) => vec![a, b],
        }
    }

    /// Primitive gate acting on bare qubits; Paulis and idles act trivially.
    pub fn as_gate(&self) -> Option<Gate> {
        match *self {
            Op::One(Gate1::H, q) => Some(Gate::H(q)),
            Op::One(Gate1::S, q) => Some(Gate::S(q)),
            Op::One(Gate1::Sdg, q) => Some(Gate::Sdg(q)),
            Op::One(_, _) => None,
            Op::Two(Gate2::Cnot, a, b) => Some(Gate::Cnot(a, b)),
            Op::Two(Gate2::Cz, a, b) => Some(Gate::Cz(a, b)),
            Op::Two(Gate2::Swap, a, b) => Some(Gate::Swap(a, b)),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Element {
    Reset(ResetKind, Qubit),
    Gate(Op),
    Measure(Basis, Qubit),
    /// Gate applied iff the XOR of the listed outcomes is 1.
    Cond(Op, Vec<MeasId>),
}

impl Element {
    pub fn qubits(&self) -> Vec<Qubit> {
        match self {
            Element::Reset(_, q) | Element::Measure(_, q) => vec![*q],
            Element::Gate(op) | Element::Cond(op, _) => op.qubits(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MeasInfo {
    pub layer: usize,
    pub qubit: Qubit,
    pub basis: Basis,
}

/// What a qubit does in one layer.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Activity {
    Inactive,
    Reset(ResetKind),
    Measure(Basis),
    /// Active and either idle or acted on by a gate.
    Busy,
}

#[derive(Clone, PartialEq, Debug)]
pub struct BareCircuit {
    n_qubits: u32,
    layers: Vec<Vec<Element>>,
    meas: Vec<MeasInfo>,
}

impl BareCircuit {
    pub fn new(n_qubits: u32, layers: Vec<Vec<Element>>) -> Result<Self> {
        Self::build(n_qubits, layers)
            .map_err(|(l, msg)| Error::Circuit(format!("layer {l}: {msg}")))
    }

    /// Validation with the offending layer index kept separate.
    pub(crate) fn build(
        n_qubits: u32,
        layers: Vec<Vec<Element>>,
    ) -> std::result::Result<Self, (usize, String)> {
        let mut active = vec![false; n_qubits as usize];
        let mut meas = Vec::new();
        for (l, layer) in layers.iter().enumerate() {
            let mut used = vec![false; n_qubits as usize];
            let mut next = active.clone();
            for el in layer {
                let qs = el.qubits();
                if qs.len() == 2 && qs[0] == qs[1] {
                    return Err((l, format!("two-qubit gate on a single qubit {}", qs[0])));
                }
                for &q in &qs {
                    if q >= n_qubits {
                        return Err((l, format!("qubit {q} out of range")));
                    }
                    if used[q as usize] {
                        return Err((l, format!("qubit {q} has two elements")));
                    }
                    used[q as usize] = true;
                }
                match el {
                    Element::Reset(_, q) => {
                        if active[*q as usize] {
                            return Err((l, format!("reset of active qubit {q}")));
                        }
                        next[*q as usize] = true;
                    }
                    Element::Measure(b, q) => {
                        if !active[*q as usize] {
                            return Err((l, format!("measurement of inactive qubit {q}")));
                        }
                        next[*q as usize] = false;
                        meas.push(MeasInfo {
                            layer: l,
                            qubit: *q,
                            basis: *b,
                        });
                    }
                    Element::Gate(_) | Element::Cond(..) => {
                        if let Some(&q) = qs.iter().find(|&&q| !active[q as usize]) {
                            return Err((l, format!("gate on inactive qubit {q}")));
                        }
                    }
                }
            }
            for el in layer {
                if let Element::Cond(_, ids) = el {
                    if ids.is_empty() {
                        return Err((l, "empty condition".to_string()));
                    }
                    for &id in ids {
                        let ok = id >= 1
                            && (id as usize) <= meas.len()
                            && meas[id as usize - 1].layer < l;
                        if !ok {
                            return Err((l, format!("condition references m{id}, which is not an earlier measurement"
                            )));
                        }
                    }
                }
            }
            active = next;
        }
        Ok(BareCircuit {
            n_qubits,
            layers,
            meas,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Element>] {
        &self.layers
    }

    pub fn layer(&self, l: usize) -> &[Element] {
        &self.layers[l]
    }

    pub fn n_measurements(&self) -> usize {
        self.meas.len()
    }

    pub fn measurement(&self, id: MeasId) -> Result<MeasInfo> {
        if id == 0 || id as usize > self.meas.len() {
            return Err(Error::Circuit(format!("no measurement m{id}")));
        }
        Ok(self.meas[id as usize - 1])
    }

    pub fn measurements(&self) -> &[MeasInfo] {
        &self.meas
    }

    /// Measurement ids recorded in layer `l`.
    pub fn measurements_in(&self, l: usize) -> impl Iterator<Item = (MeasId, MeasInfo)> + '_ {
        self.meas
            .iter()
            .enumerate()
            .filter(move |(_, m)| m.layer == l)
            .map(|(k, m)| (k as MeasId + 1, *m))
    }

    /// Per-layer, per-qubit activity table.
    pub fn activity(&self) -> Vec<Vec<Activity>> {
        let n = self.n_qubits as usize;
        let mut active = vec![false; n];
        let mut out = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let mut row: Vec<Activity> = active
                .iter()
                .map(|&a| {
                    if a {
                        Activity::Busy
                    } else {
                        Activity::Inactive
                    }
                })
                .collect();
            for el in layer {
                match el {
                    Element::Reset(k, q) => {
                        row[*q as usize] = Activity::Reset(*k);
                        active[*q as usize] = true;
                    }
                    Element::Measure(b, q) => {
                        row[*q as usize] = Activity::Measure(*b);
                        active[*q as usize] = false;
                    }
                    _ => {}
                }
            }
            out.push(row);
        }
        out
    }

    /// Gates applied in layer `l` once conditions are fixed by `r`.
    pub fn resolved_ops(&self, l: usize, r: &Realization) -> Result<Vec<Op>> {
        let mut out = Vec::new();
        for el in &self.layers[l] {
            match el {
                Element::Gate(op) => out.push(*op),
                Element::Cond(op, ids) => {
                    if r.condition(ids)? {
                        out.push(*op);
                    }
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// Phase-free Clifford action of layer `l` on the bare qubits.
    pub fn clifford_layer(&self, l: usize, r: &Realization) -> Result<CliffordLayer> {
        let gates = self
            .resolved_ops(l, r)?
            .iter()
            .filter_map(|op| op.as_gate())
            .collect();
        CliffordLayer::new(gates)
    }
}

impl fmt::Display for BareCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_circuit(self))
    }
}

/// Values of conditioning measurements.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Realization {
    bits: BTreeMap<MeasId, bool>,
    strict: bool,
}

impl Realization {
    /// Every conditioning measurement reads 0.
    pub fn zeros() -> Self {
        Realization {
            bits: BTreeMap::new(),
            strict: false,
        }
    }

    /// Only the listed measurements are fixed; other conditions are errors.
    pub fn explicit(bits: BTreeMap<MeasId, bool>) -> Self {
        Realization { bits, strict: true }
    }

    pub fn with(mut self, id: MeasId, v: bool) -> Self {
        self.bits.insert(id, v);
        self
    }

    pub fn get(&self, id: MeasId) -> Result<bool> {
        match self.bits.get(&id) {
            Some(&b) => Ok(b),
            None if !self.strict => Ok(false),
            None => Err(Error::Realization(id)),
        }
    }

    pub fn condition(&self, ids: &[MeasId]) -> Result<bool> {
        let mut acc = false;
        for &id in ids {
            acc ^= self.get(id)?;
        }
        Ok(acc)
    }
}
