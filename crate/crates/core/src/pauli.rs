//! Phase-free Pauli strings and Clifford layers.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Qubit = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Option<Pauli> {
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn has_x(self) -> bool {
        self != Pauli::Z
    }

    pub fn has_z(self) -> bool {
        self != Pauli::X
    }

    pub fn commutes(self, other: Pauli) -> bool {
        self == other
    }

    pub fn mul(self, other: Pauli) -> Option<Pauli> {
        let (a, b) = self.bits();
        let (c, d) = other.bits();
        Pauli::from_bits(a ^ c, b ^ d)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(c)
    }
}

/// Sparse Pauli operator; entries sorted by qubit, identities never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct PauliString {
    entries: Vec<(Qubit, Pauli)>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(q: Qubit, p: Pauli) -> Self {
        PauliString {
            entries: vec![(q, p)],
        }
    }

    /// Builds a string from arbitrary entries; repeated qubits multiply.
    pub fn from_entries(it: impl IntoIterator<Item = (Qubit, Pauli)>) -> Self {
        let mut s = PauliString::identity();
        for (q, p) in it {
            s.mul_at(q, p);
        }
        s
    }

    pub fn from_bits(it: impl IntoIterator<Item = (Qubit, bool, bool)>) -> Self {
        PauliString::from_entries(
            it.into_iter()
                .filter_map(|(q, x, z)| Pauli::from_bits(x, z).map(|p| (q, p))),
        )
    }

    pub fn get(&self, q: Qubit) -> Option<Pauli> {
        self.entries
            .binary_search_by_key(&q, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Multiplies `p` onto qubit `q` in place.
    pub fn mul_at(&mut self, q: Qubit, p: Pauli) {
        match self.entries.binary_search_by_key(&q, |e| e.0) {
            Ok(i) => match self.entries[i].1.mul(p) {
                Some(r) => self.entries[i].1 = r,
                None => {
                    self.entries.remove(i);
                }
            },
            Err(i) => self.entries.insert(i, (q, p)),
        }
    }

    pub fn remove(&mut self, q: Qubit) -> Option<Pauli> {
        match self.entries.binary_search_by_key(&q, |e| e.0) {
            Ok(i) => Some(self.entries.remove(i).1),
            Err(_) => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Qubit, Pauli)> + '_ {
        self.entries.iter().copied()
    }

    pub fn weight(&self) -> usize {
        self.entries.len()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        commutes(self, other)
    }

    pub fn multiply(&self, other: &PauliString) -> PauliString {
        multiply(self, other)
    }

    pub fn conjugate(&self, layer: &CliffordLayer, dir: Direction) -> PauliString {
        conjugate(self, layer, dir)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("I");
        }
        for (k, (q, p)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "{p}{q}")?;
        }
        Ok(())
    }
}

pub fn commutes(a: &PauliString, b: &PauliString) -> bool {
    let (mut i, mut j, mut anti) = (0, 0, false);
    while i < a.entries.len() && j < b.entries.len() {
        let (qa, pa) = a.entries[i];
        let (qb, pb) = b.entries[j];
        match qa.cmp(&qb) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                anti ^= pa != pb;
                i += 1;
                j += 1;
            }
        }
    }
    !anti
}

pub fn multiply(a: &PauliString, b: &PauliString) -> PauliString {
    let mut out = Vec::with_capacity(a.entries.len() + b.entries.len());
    let (mut i, mut j) = (0, 0);
    while i < a.entries.len() || j < b.entries.len() {
        let ea = a.entries.get(i).copied();
        let eb = b.entries.get(j).copied();
        match (ea, eb) {
            (Some((qa, pa)), Some((qb, pb))) if qa == qb => {
                if let Some(r) = pa.mul(pb) {
                    out.push((qa, r));
                }
                i += 1;
                j += 1;
            }
            (Some((qa, pa)), Some((qb, _))) if qa < qb => {
                out.push((qa, pa));
                i += 1;
            }
            (Some(e), None) => {
                out.push(e);
                i += 1;
            }
            (_, Some(e)) => {
                out.push(e);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    PauliString { entries: out }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Gate {
    H(Qubit),
    S(Qubit),
    Sdg(Qubit),
    Cz(Qubit, Qubit),
    Cnot(Qubit, Qubit),
    Swap(Qubit, Qubit),
}

impl Gate {
    pub fn qubits(&self) -> (Qubit, Option<Qubit>) {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) => (q, None),
            Gate::Cz(a, b) | Gate::Cnot(a, b) | Gate::Swap(a, b) => (a, Some(b)),
        }
    }

    /// Phase-free image of the Pauli bits on the gate's qubits. Every gate in
    /// the set acts as an involution on phase-free Paulis, so this serves both
    /// directions.
    fn map(&self, a: (bool, bool), b: (bool, bool)) -> ((bool, bool), (bool, bool)) {
        let ((xa, za), (xb, zb)) = (a, b);
        match self {
            Gate::H(_) => ((za, xa), b),
            Gate::S(_) | Gate::Sdg(_) => ((xa, za ^ xa), b),
            Gate::Cz(..) => ((xa, za ^ xb), (xb, zb ^ xa)),
            Gate::Cnot(..) => ((xa, za ^ zb), (xb ^ xa, zb)),
            Gate::Swap(..) => (b, a),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "SDG {q}"),
            Gate::Cz(a, b) => write!(f, "CZ {a} {b}"),
            Gate::Cnot(a, b) => write!(f, "CNOT {a} {b}"),
            Gate::Swap(a, b) => write!(f, "SWAP {a} {b}"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    /// Heisenberg image under conjugation by the layer's inverse, P -> C P C†.
    Forward,
    /// P -> C† P C.
    Backward,
}

/// A set of gates on pairwise disjoint qubits.
#[derive(Clone, Debug, Default)]
pub struct CliffordLayer {
    gates: Vec<Gate>,
    index: HashMap<Qubit, usize>,
}

impl PartialEq for CliffordLayer {
    fn eq(&self, other: &Self) -> bool {
        self.gates == other.gates
    }
}

impl CliffordLayer {
    pub fn new(gates: Vec<Gate>) -> Result<Self> {
        let mut index = HashMap::new();
        for (k, g) in gates.iter().enumerate() {
            let (a, b) = g.qubits();
            if b == Some(a) {
                return Err(Error::Program(format!(
                    "gate `{g}` acts twice on qubit {a}"
                )));
            }
            for q in std::iter::once(a).chain(b) {
                if index.insert(q, k).is_some() {
                    return Err(Error::Program(format!(
                        "qubit {q} appears in two gates of one layer"
                    )));
                }
            }
        }
        Ok(CliffordLayer { gates, index })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn gate_on(&self, q: Qubit) -> Option<&Gate> {
        self.index.get(&q).map(|&k| &self.gates[k])
    }
}

pub fn conjugate(p: &PauliString, layer: &CliffordLayer, _dir: Direction) -> PauliString {
    if layer.is_empty() {
        return p.clone();
    }
    let mut out = PauliString::identity();
    let mut done: Vec<usize> = Vec::new();
    let bits = |q: Qubit| p.get(q).map(|x| x.bits()).unwrap_or((false, false));
    for (q, pq) in p.iter() {
        match layer.index.get(&q) {
            None => out.mul_at(q, pq),
            Some(&k) => {
                if done.contains(&k) {
                    continue;
                }
                done.push(k);
                let g = &layer.gates[k];
                let (a, b) = g.qubits();
                let bq = b.unwrap_or(a);
                let (na, nb) = g.map(bits(a), bits(bq));
                if let Some(pa) = Pauli::from_bits(na.0, na.1) {
                    out.mul_at(a, pa);
                }
                if let Some(b) = b {
                    if let Some(pb) = Pauli::from_bits(nb.0, nb.1) {
                        out.mul_at(b, pb);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Pauli::*;

    fn ps(e: &[(u32, Pauli)]) -> PauliString {
        PauliString::from_entries(e.iter().copied())
    }

    #[test]
    fn commutation_examples() {
        assert!(!commutes(&ps(&[(0, X)]), &ps(&[(0, Z)])));
        assert!(commutes(&ps(&[(0, X)]), &ps(&[(0, X)])));
        assert!(commutes(&ps(&[(0, X), (1, Z)]), &ps(&[(0, Z), (1, X)])));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(multiply(&ps(&[(0, X)]), &ps(&[(0, Z)])), ps(&[(0, Y)]));
        assert!(multiply(&ps(&[(0, X)]), &ps(&[(0, X)])).is_identity());
        assert_eq!(
            multiply(&ps(&[(0, X)]), &ps(&[(1, Z)])),
            ps(&[(0, X), (1, Z)])
        );
    }

    #[test]
    fn conjugation_examples() {
        let h = CliffordLayer::new(vec![Gate::H(0)]).unwrap();
        for dir in [Direction::Forward, Direction::Backward] {
            assert_eq!(conjugate(&ps(&[(0, X)]), &h, dir), ps(&[(0, Z)]));
        }
        let cx = CliffordLayer::new(vec![Gate::Cnot(0, 1)]).unwrap();
        assert_eq!(
            conjugate(&ps(&[(0, X)]), &cx, Direction::Forward),
            ps(&[(0, X), (1, X)])
        );
        assert_eq!(
            conjugate(&ps(&[(1, Z)]), &cx, Direction::Forward),
            ps(&[(0, Z), (1, Z)])
        );
        let s = CliffordLayer::new(vec![Gate::S(0)]).unwrap();
        assert_eq!(
            conjugate(&ps(&[(0, X)]), &s, Direction::Forward),
            ps(&[(0, Y)])
        );
        let cz = CliffordLayer::new(vec![Gate::Cz(0, 1)]).unwrap();
        assert_eq!(
            conjugate(&ps(&[(0, X)]), &cz, Direction::Forward),
            ps(&[(0, X), (1, Z)])
        );
        let sw = CliffordLayer::new(vec![Gate::Swap(0, 1)]).unwrap();
        assert_eq!(
            conjugate(&ps(&[(0, X), (1, Y)]), &sw, Direction::Forward),
            ps(&[(0, Y), (1, X)])
        );
    }

    #[test]
    fn overlapping_layer_rejected() {
        assert!(CliffordLayer::new(vec![Gate::H(0), Gate::Cnot(0, 1)]).is_err());
        assert!(CliffordLayer::new(vec![Gate::Cz(2, 2)]).is_err());
    }
}
