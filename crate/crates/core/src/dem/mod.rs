//! Error mechanisms, their detector effects, and the decoding hypergraph.

mod text;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

pub use text::{parse_dem, serialize_dem};

use crate::circuit::Basis;
use crate::detectors::{Detector, DetectorSet, Frame};
use crate::encode::{EncodedCircuit, LogicalAction, RecordKind, Slot};
use crate::error::{Error, Result};
use crate::layout::CheckType;
use crate::pauli::{conjugate, Direction, Pauli, PauliString};

#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub enum Noise {
    /// X and Z data errors before each layer plus record flips, each with p.
    Basic(f64),
    /// X, Y, Z data errors with p/3 before each gate and before each round,
    /// record flips with p.
    Phenomenological(f64),
}

impl Noise {
    pub fn p(&self) -> f64 {
        match *self {
            Noise::Basic(p) | Noise::Phenomenological(p) => p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p();
        if p > 0.0 && p < 0.5 {
            Ok(())
        } else {
            Err(Error::Probability(p))
        }
    }

    pub fn is_basic(&self) -> bool {
        matches!(self, Noise::Basic(_))
    }

    pub fn with_p(&self, p: f64) -> Noise {
        match self {
            Noise::Basic(_) => Noise::Basic(p),
            Noise::Phenomenological(_) => Noise::Phenomenological(p),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum MechanismKind {
    Data {
        layer: usize,
        slot: Slot,
        j: u32,
        qubit: u32,
        pauli: Pauli,
    },
    Flip {
        record: u32,
    },
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ErrorMechanism {
    pub kind: MechanismKind,
    pub p: f64,
}

/// Physical Pauli, placed just before the gates of `layer`, that has the
/// same effect on every logical observable as a mechanism.
#[derive(Clone, PartialEq, Debug)]
pub struct Locator {
    pub layer: usize,
    pub pauli: PauliString,
}

/// Basic-model data errors sit on the side of the gate where the frame turns
/// them into edges: before it in the pre-gate frame, after it in the
/// post-gate frame.
pub fn enumerate_mechanisms(
    enc: &EncodedCircuit,
    noise: Noise,
    frame: Frame,
) -> Result<Vec<ErrorMechanism>> {
    noise.validate()?;
    let p = noise.p();
    let n = enc.layout.n_data() as u32;
    let paulis: &[Pauli] = match noise {
        Noise::Basic(_) => &[Pauli::X, Pauli::Z],
        Noise::Phenomenological(_) => &[Pauli::X, Pauli::Y, Pauli::Z],
    };
    let pd = if noise.is_basic() { p } else { p / 3.0 };
    let mut out = Vec::new();
    for (l, layer) in enc.layers.iter().enumerate() {
        let slots: &[Slot] = match (noise.is_basic(), frame) {
            (true, Frame::Pre) => &[Slot::PreGate],
            (true, Frame::Post) => &[Slot::PreRound],
            (false, _) => &[Slot::PreGate, Slot::PreRound],
        };
        for &slot in slots {
            for (j, a) in layer.actions.iter().enumerate() {
                let eligible = match slot {
                    Slot::PreGate => a.is_gate_like(),
                    Slot::PreRound if noise.is_basic() => a.is_gate_like(),
                    Slot::PreRound => a.active_after(),
                };
                if !eligible {
                    continue;
                }
                for qubit in 0..n {
                    for &pauli in paulis {
                        out.push(ErrorMechanism {
                            kind: MechanismKind::Data {
                                layer: l,
                                slot,
                                j: j as u32,
                                qubit,
                                pauli,
                            },
                            p: pd,
                        });
                    }
                }
            }
        }
    }
    for record in 0..enc.records.len() as u32 {
        out.push(ErrorMechanism {
            kind: MechanismKind::Flip { record },
            p,
        });
    }
    Ok(out)
}

/// Incidence tables shared by every effect computation.
pub struct EffectContext<'a> {
    pub enc: &'a EncodedCircuit,
    record_dets: Vec<Vec<u32>>,
    record_obs: Vec<Vec<u32>>,
}

impl<'a> EffectContext<'a> {
    pub fn new(enc: &'a EncodedCircuit, dets: &DetectorSet, observables: &[Vec<u32>]) -> Self {
        let nr = enc.records.len();
        let mut record_obs = vec![Vec::new(); nr];
        for (k, o) in observables.iter().enumerate() {
            for &r in o {
                record_obs[r as usize].push(k as u32);
            }
        }
        EffectContext {
            enc,
            record_dets: dets.record_incidence(nr),
            record_obs,
        }
    }

    /// Records flipped by a mechanism.
    pub fn record_flips(&self, m: &MechanismKind) -> Vec<u32> {
        let enc = self.enc;
        let (start, slot, j, qubit, pauli) = match *m {
            MechanismKind::Flip { record } => return vec![record],
            MechanismKind::Data {
                layer,
                slot,
                j,
                qubit,
                pauli,
            } => (layer, slot, j, qubit, pauli),
        };
        let lay = &enc.layout;
        let mut cur = PauliString::single(enc.offset(j) + qubit, pauli);
        let mut flips = Vec::new();
        for l in start..enc.layers.len() {
            let layer = &enc.layers[l];
            if l > start || slot == Slot::PreGate {
                for c in &layer.phys {
                    cur = conjugate(&cur, c, Direction::Forward);
                }
            }
            let mut keep = PauliString::identity();
            for (q, pq) in cur.iter() {
                let (bj, i) = enc.locate(q);
                match layer.actions[bj as usize] {
                    LogicalAction::Measure(b) => {
                        let anti = match b {
                            Basis::Z => pq.has_x(),
                            Basis::X => pq.has_z(),
                        };
                        if anti {
                            flips.push(enc.data_record(l, bj, i).unwrap());
                        }
                    }
                    LogicalAction::Inactive => {}
                    _ => {
                        keep.mul_at(q, pq);
                        for ty in [CheckType::X, CheckType::Z] {
                            for &k in lay.flipped_by(ty, i, pq) {
                                flips.push(enc.check_record(l, bj, ty, k).unwrap());
                            }
                        }
                    }
                }
            }
            cur = keep;
            if cur.is_identity() {
                break;
            }
        }
        flips
    }

    pub fn effect(&self, m: &MechanismKind) -> (Vec<u32>, Vec<u32>) {
        let mut d = Vec::new();
        let mut o = Vec::new();
        for r in self.record_flips(m) {
            d.extend_from_slice(&self.record_dets[r as usize]);
            o.extend_from_slice(&self.record_obs[r as usize]);
        }
        (odd_members(d), odd_members(o))
    }

    pub fn locator(&self, m: &MechanismKind) -> Option<Locator> {
        let enc = self.enc;
        match *m {
            MechanismKind::Data {
                layer,
                slot,
                j,
                qubit,
                pauli,
            } => {
                let mut p = PauliString::single(enc.offset(j) + qubit, pauli);
                if slot == Slot::PreRound {
                    for c in enc.layers[layer].phys.iter().rev() {
                        p = conjugate(&p, c, Direction::Backward);
                    }
                }
                Some(Locator { layer, pauli: p })
            }
            MechanismKind::Flip { record } => {
                let r = enc.records[record as usize];
                match r.kind {
                    RecordKind::Check { .. } => None,
                    RecordKind::Data { qubit, basis } => {
                        let p = if basis == Basis::Z {
                            Pauli::X
                        } else {
                            Pauli::Z
                        };
                        Some(Locator {
                            layer: r.layer,
                            pauli: PauliString::single(enc.offset(r.j) + qubit, p),
                        })
                    }
                }
            }
        }
    }
}

/// Sorted elements that occur an odd number of times.
fn odd_members(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut k = i;
        while k < v.len() && v[k] == v[i] {
            k += 1;
        }
        if (k - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = k;
    }
    out
}

pub fn mechanism_effect(
    enc: &EncodedCircuit,
    dets: &DetectorSet,
    observables: &[Vec<u32>],
    m: &ErrorMechanism,
) -> (Vec<u32>, Vec<u32>) {
    EffectContext::new(enc, dets, observables).effect(&m.kind)
}

#[derive(Clone, PartialEq, Debug)]
pub struct Hyperedge {
    pub dets: Vec<u32>,
    /// Indices of flipped observables, sorted.
    pub obs: Vec<u32>,
    pub p: f64,
    /// Indices into [`Dem::mechanisms`].
    pub sources: Vec<u32>,
}

impl Hyperedge {
    pub fn flips(&self, k: u32) -> bool {
        self.obs.binary_search(&k).is_ok()
    }
}

pub fn xor_prob(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// Decoding hypergraph: detectors, declared observables and hyperedges.
#[derive(Clone, Debug)]
pub struct Dem {
    pub d: usize,
    pub frame: Frame,
    pub noise: Option<Noise>,
    pub detectors: Vec<Detector>,
    /// Record sets of the declared observables.
    pub observables: Vec<Vec<u32>>,
    pub hyperedges: Vec<Hyperedge>,
    pub mechanisms: Vec<ErrorMechanism>,
    pub locators: Vec<Option<Locator>>,
}

impl Dem {
    pub fn n_detectors(&self) -> usize {
        self.detectors.len()
    }

    pub fn n_observables(&self) -> usize {
        self.observables.len()
    }

    /// Assembles hyperedges from mechanism effects, merging those with equal
    /// detectors and observables.
    pub fn from_mechanisms(
        d: usize,
        frame: Frame,
        noise: Option<Noise>,
        detectors: Vec<Detector>,
        observables: Vec<Vec<u32>>,
        mechanisms: Vec<ErrorMechanism>,
        effects: Vec<(Vec<u32>, Vec<u32>)>,
        locators: Vec<Option<Locator>>,
    ) -> Dem {
        let mut index: HashMap<(Vec<u32>, Vec<u32>), usize> = HashMap::new();
        let mut edges: Vec<Hyperedge> = Vec::new();
        for (i, (m, (dets, obs))) in mechanisms.iter().zip(effects).enumerate() {
            if dets.is_empty() && obs.is_empty() {
                continue;
            }
            match index.get(&(dets.clone(), obs.clone())) {
                Some(&k) => {
                    edges[k].p = xor_prob(edges[k].p, m.p);
                    edges[k].sources.push(i as u32);
                }
                None => {
                    index.insert((dets.clone(), obs.clone()), edges.len());
                    edges.push(Hyperedge {
                        dets,
                        obs,
                        p: m.p,
                        sources: vec![i as u32],
                    });
                }
            }
        }
        edges.sort_by(|a, b| (&a.dets, &a.obs).cmp(&(&b.dets, &b.obs)));
        Dem {
            d,
            frame,
            noise,
            detectors,
            observables,
            hyperedges: edges,
            mechanisms,
            locators,
        }
    }

    /// Hyperedges flipping observable `k`.
    pub fn observing_edge_set(&self, k: u32) -> Result<Vec<usize>> {
        let set: Vec<usize> = (0..self.hyperedges.len())
            .filter(|&h| self.hyperedges[h].flips(k))
            .collect();
        if matches!(self.noise, Some(Noise::Basic(_))) {
            for &h in &set {
                let e = &self.hyperedges[h];
                let mut tags: Vec<_> = e
                    .dets
                    .iter()
                    .map(|&v| self.detectors[v as usize].tag())
                    .collect();
                let t0 = tags.first().map(|t| t.0);
                let n = tags.len();
                tags.dedup();
                if tags.len() != n || tags.iter().any(|t| Some(t.0) != t0) {
                    return Err(Error::Invalid(format!(
                        "observing hyperedge {h} of observable {k} is not a space-like boundary edge"
                    )));
                }
            }
        }
        Ok(set)
    }

    /// Locators of every mechanism merged into hyperedge `h`.
    pub fn hyperedge_locators(&self, h: usize) -> impl Iterator<Item = &Locator> + '_ {
        self.hyperedges[h]
            .sources
            .iter()
            .filter_map(|&s| self.locators.get(s as usize).and_then(|l| l.as_ref()))
    }
}

pub fn build_dem(
    enc: &EncodedCircuit,
    dets: &DetectorSet,
    observables: &[Vec<u32>],
    noise: Noise,
) -> Result<Dem> {
    let mechs = enumerate_mechanisms(enc, noise, dets.frame)?;
    let ctx = EffectContext::new(enc, dets, observables);
    let effects: Vec<_> = mechs.par_iter().map(|m| ctx.effect(&m.kind)).collect();
    let locators: Vec<_> = mechs.iter().map(|m| ctx.locator(&m.kind)).collect();
    Ok(Dem::from_mechanisms(
        enc.d(),
        dets.frame,
        Some(noise),
        dets.detectors.clone(),
        observables.to_vec(),
        mechs,
        effects,
        locators,
    ))
}
