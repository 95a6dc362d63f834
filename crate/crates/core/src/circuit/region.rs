use std::collections::BTreeMap;

use super::{Activity, BareCircuit, Basis, MeasId, Realization, ResetKind};
use crate::error::{Error, Result};
use crate::f2::{Bits, Eliminator};
use crate::pauli::{conjugate, Direction, Pauli, PauliString, Qubit};

/// Pauli operators attached to circuit locations `(t, qubit)`; location `t`
/// sits just before layer `t`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PauliRegion {
    entries: BTreeMap<(usize, Qubit), Pauli>,
}

impl PauliRegion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, t: usize, q: Qubit) -> Option<Pauli> {
        self.entries.get(&(t, q)).copied()
    }

    pub fn mul_at(&mut self, t: usize, q: Qubit, p: Pauli) {
        match self.entries.get(&(t, q)).copied() {
            None => {
                self.entries.insert((t, q), p);
            }
            Some(old) => match old.mul(p) {
                Some(n) => {
                    self.entries.insert((t, q), n);
                }
                None => {
                    self.entries.remove(&(t, q));
                }
            },
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, Qubit), Pauli)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The slice of the region at location `t`.
    pub fn at(&self, t: usize) -> PauliString {
        PauliString::from_entries(
            self.entries
                .range((t, 0)..=(t, Qubit::MAX))
                .map(|(k, v)| (k.1, *v)),
        )
    }

    pub fn multiply(&self, other: &PauliRegion) -> PauliRegion {
        let mut out = self.clone();
        for ((t, q), p) in other.entries() {
            out.mul_at(t, q, p);
        }
        out
    }

    pub fn put_slice(&mut self, t: usize, s: &PauliString) {
        for (q, p) in s.iter() {
            self.entries.insert((t, q), p);
        }
    }
}

/// Parity of the number of locations where the two regions anticommute.
pub fn regions_anticommute(a: &PauliRegion, b: &PauliRegion) -> bool {
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut anti = false;
    for (k, p) in small.entries.iter() {
        if let Some(q) = big.entries.get(k) {
            anti ^= p != q;
        }
    }
    anti
}

/// A non-empty set of measurements whose outcome parity is the observable.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ObservableSpec {
    ids: Vec<MeasId>,
}

impl ObservableSpec {
    pub fn new(ids: impl IntoIterator<Item = MeasId>) -> Result<Self> {
        let mut v: Vec<MeasId> = Vec::new();
        for id in ids {
            match v.iter().position(|&x| x == id) {
                Some(k) => {
                    v.remove(k);
                }
                None => v.push(id),
            }
        }
        v.sort_unstable();
        if v.is_empty() {
            return Err(Error::Invalid(
                "observable must contain at least one measurement".into(),
            ));
        }
        Ok(ObservableSpec { ids: v })
    }

    pub fn single(id: MeasId) -> Self {
        ObservableSpec { ids: vec![id] }
    }

    pub fn ids(&self) -> &[MeasId] {
        &self.ids
    }

    /// Symmetric difference; `None` when the product is empty.
    pub fn product(&self, other: &ObservableSpec) -> Option<ObservableSpec> {
        ObservableSpec::new(self.ids.iter().chain(other.ids.iter()).copied()).ok()
    }

    pub fn to_bits(&self, n_meas: usize) -> Bits {
        Bits::from_indices(n_meas, self.ids.iter().map(|&i| i as usize - 1))
    }

    fn validate(&self, c: &BareCircuit) -> Result<()> {
        for &id in &self.ids {
            c.measurement(id)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ResetEvent {
    pub layer: usize,
    pub qubit: Qubit,
    pub basis: Basis,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ResetStabilizer {
    pub events: Vec<ResetEvent>,
}

impl ResetStabilizer {
    pub fn single(e: ResetEvent) -> Self {
        ResetStabilizer { events: vec![e] }
    }
}

impl BareCircuit {
    /// All |0⟩ and |+⟩ preparations, ordered by layer then qubit.
    pub fn reset_events(&self) -> Vec<ResetEvent> {
        let mut out = Vec::new();
        for (l, row) in self.activity().iter().enumerate() {
            for (q, a) in row.iter().enumerate() {
                let basis = match a {
                    Activity::Reset(ResetKind::Zero) => Basis::Z,
                    Activity::Reset(ResetKind::Plus) => Basis::X,
                    _ => continue,
                };
                out.push(ResetEvent {
                    layer: l,
                    qubit: q as Qubit,
                    basis,
                });
            }
        }
        out
    }
}

/// Pauli representation of an observable: the measured Pauli just before
/// each included measurement.
pub fn observable_region(c: &BareCircuit, o: &ObservableSpec) -> Result<PauliRegion> {
    let mut r = PauliRegion::new();
    for &id in o.ids() {
        let m = c.measurement(id)?;
        r.mul_at(m.layer, m.qubit, m.basis.pauli());
    }
    Ok(r)
}

/// Pauli representation of a reset stabilizer: the prepared eigen-operator
/// just after each reset.
pub fn reset_region(s: &ResetStabilizer) -> PauliRegion {
    let mut r = PauliRegion::new();
    for e in &s.events {
        r.mul_at(e.layer + 1, e.qubit, e.basis.pauli());
    }
    r
}

/// Observing region O←.
pub fn backpropagate(c: &BareCircuit, o: &ObservableSpec, r: &Realization) -> Result<PauliRegion> {
    o.validate(c)?;
    let act = c.activity();
    let last = o
        .ids()
        .iter()
        .map(|&id| c.meas[id as usize - 1].layer)
        .max()
        .unwrap();
    let mut cur = PauliString::identity();
    let mut region = PauliRegion::new();
    for t in (0..=last).rev() {
        for (q, a) in act[t].iter().enumerate() {
            if matches!(a, Activity::Reset(_)) {
                cur.remove(q as Qubit);
            }
        }
        cur = conjugate(&cur, &c.clifford_layer(t, r)?, Direction::Backward);
        for (id, m) in c.measurements_in(t) {
            if o.ids().contains(&id) {
                cur.mul_at(m.qubit, m.basis.pauli());
            }
        }
        region.put_slice(t, &cur);
    }
    Ok(region)
}

/// Reset-stabilizing region S→.
pub fn forward_propagate(
    c: &BareCircuit,
    s: &ResetStabilizer,
    r: &Realization,
) -> Result<PauliRegion> {
    let act = c.activity();
    for e in &s.events {
        let ok = e.layer < c.n_layers()
            && match act[e.layer].get(e.qubit as usize) {
                Some(Activity::Reset(ResetKind::Zero)) => e.basis == Basis::Z,
                Some(Activity::Reset(ResetKind::Plus)) => e.basis == Basis::X,
                _ => false,
            };
        if !ok {
            return Err(Error::Circuit(format!(
                "no reset of qubit {} in layer {}",
                e.qubit, e.layer
            )));
        }
    }
    let first = s
        .events
        .iter()
        .map(|e| e.layer)
        .min()
        .unwrap_or(c.n_layers());
    let mut cur = PauliString::identity();
    let mut region = PauliRegion::new();
    for t in first..c.n_layers() {
        for (q, a) in act[t].iter().enumerate() {
            if matches!(a, Activity::Measure(_)) {
                cur.remove(q as Qubit);
            }
        }
        cur = conjugate(&cur, &c.clifford_layer(t, r)?, Direction::Forward);
        for e in s.events.iter().filter(|e| e.layer == t) {
            cur.mul_at(e.qubit, e.basis.pauli());
        }
        region.put_slice(t + 1, &cur);
    }
    Ok(region)
}

/// Anticommutation parities of O← against each single-reset stabilizer, in
/// the order of [`BareCircuit::reset_events`].
pub fn anticommutation_vector(
    c: &BareCircuit,
    o: &ObservableSpec,
    r: &Realization,
) -> Result<Bits> {
    let back = backpropagate(c, o, r)?;
    let events = c.reset_events();
    let mut v = Bits::new(events.len());
    for (k, e) in events.iter().enumerate() {
        if let Some(p) = back.get(e.layer + 1, e.qubit) {
            v.set(k, p != e.basis.pauli());
        }
    }
    Ok(v)
}

pub fn is_fragile(
    c: &BareCircuit,
    o: &ObservableSpec,
    r: &Realization,
) -> Result<(bool, Option<ResetStabilizer>)> {
    let v = anticommutation_vector(c, o, r)?;
    match v.first_one() {
        Some(k) => Ok((true, Some(ResetStabilizer::single(c.reset_events()[k])))),
        None => Ok((false, None)),
    }
}

/// Same test through forward propagation of every single-reset stabilizer.
pub fn is_fragile_forward(
    c: &BareCircuit,
    o: &ObservableSpec,
    r: &Realization,
) -> Result<(bool, Option<ResetStabilizer>)> {
    let rep = observable_region(c, o)?;
    for e in c.reset_events() {
        let s = ResetStabilizer::single(e);
        if regions_anticommute(&forward_propagate(c, &s, r)?, &rep) {
            return Ok((true, Some(s)));
        }
    }
    Ok((false, None))
}

/// Subset of `pool` (as indices) whose product with `o` is reliable.
/// Among all solutions when the nullspace is small, the one with fewest
/// members wins, ties going to the lexicographically smallest index list.
pub fn find_reliable_completion(
    c: &BareCircuit,
    o: &ObservableSpec,
    pool: &[ObservableSpec],
    r: &Realization,
) -> Result<Option<Vec<usize>>> {
    let target = anticommutation_vector(c, o, r)?;
    let rows = pool
        .iter()
        .map(|p| anticommutation_vector(c, p, r))
        .collect::<Result<Vec<_>>>()?;
    let elim = Eliminator::new(&rows);
    let Some(x0) = elim.solve(&target) else {
        return Ok(None);
    };
    let null = elim.nullspace();
    let mut best: Vec<usize> = x0.ones().collect();
    if !null.is_empty() && null.len() <= 16 {
        for mask in 1u32..(1u32 << null.len()) {
            let mut cand = x0.clone();
            for (k, nv) in null.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    cand.xor_with(nv);
                }
            }
            let idx: Vec<usize> = cand.ones().collect();
            if (idx.len(), &idx) < (best.len(), &best) {
                best = idx;
            }
        }
    }
    Ok(Some(best))
}
