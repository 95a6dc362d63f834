//! Unrotated surface-code patch and fold-transversal gate layers.
//!
//! Coordinates are stored doubled: `(a, b) = (2x, 2y)`. Data qubits have
//! `a + b` even, X-checks have `a` even and `b` odd, Z-checks `a` odd and
//! `b` even. A check acts on the data qubits at `(a±1, b)` and `(a, b±1)`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::f2::{Bits, Eliminator};
use crate::pauli::{CliffordLayer, Gate, Pauli, PauliString, Qubit};

pub type Coord = (i32, i32);

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum CheckType {
    X,
    Z,
}

impl CheckType {
    pub fn pauli(self) -> Pauli {
        match self {
            CheckType::X => Pauli::X,
            CheckType::Z => Pauli::Z,
        }
    }

    pub fn other(self) -> CheckType {
        match self {
            CheckType::X => CheckType::Z,
            CheckType::Z => CheckType::X,
        }
    }
}

/// Formats a doubled coordinate component as a half-integer.
pub fn half(v: i32) -> String {
    if v % 2 == 0 {
        format!("{}", v / 2)
    } else {
        format!("{}.5", (v - 1) / 2)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum LogicalGate {
    I,
    H,
    S,
    Sdg,
    X,
    Z,
    Cnot,
}

pub struct CodeLayout {
    pub d: usize,
    pub data: Vec<Coord>,
    pub x_checks: Vec<Coord>,
    pub z_checks: Vec<Coord>,
    pub x_support: Vec<Vec<u32>>,
    pub z_support: Vec<Vec<u32>>,
    /// X-checks touching each data qubit.
    pub x_of_data: Vec<Vec<u32>>,
    pub z_of_data: Vec<Vec<u32>>,
    /// X-bar representative: X on the row `b = 0`.
    pub logical_x: Vec<u32>,
    /// Z-bar representative: Z on the column `a = 0`.
    pub logical_z: Vec<u32>,
    data_index: HashMap<Coord, u32>,
    x_index: HashMap<Coord, u32>,
    z_index: HashMap<Coord, u32>,
    x_elim: Eliminator,
    z_elim: Eliminator,
}

impl std::fmt::Debug for CodeLayout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CodeLayout(d={})", self.d)
    }
}

pub fn build_layout(d: usize) -> Result<CodeLayout> {
    CodeLayout::new(d)
}

impl CodeLayout {
    pub fn new(d: usize) -> Result<CodeLayout> {
        if d < 3 || d % 2 == 0 {
            return Err(Error::Distance(d));
        }
        let m = 2 * (d as i32 - 1);
        let mut data = Vec::new();
        let mut x_checks = Vec::new();
        let mut z_checks = Vec::new();
        for a in 0..=m {
            for b in 0..=m {
                match (a % 2, b % 2) {
                    (0, 0) | (1, 1) => data.push((a, b)),
                    (0, 1) => x_checks.push((a, b)),
                    _ => z_checks.push((a, b)),
                }
            }
        }
        let data_index: HashMap<Coord, u32> = data
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let support = |c: &Coord| -> Vec<u32> {
            let mut s: Vec<u32> = [
                (c.0 - 1, c.1),
                (c.0 + 1, c.1),
                (c.0, c.1 - 1),
                (c.0, c.1 + 1),
            ]
            .iter()
            .filter_map(|n| data_index.get(n).copied())
            .collect();
            s.sort_unstable();
            s
        };
        let x_support: Vec<Vec<u32>> = x_checks.iter().map(support).collect();
        let z_support: Vec<Vec<u32>> = z_checks.iter().map(support).collect();
        let n = data.len();
        let mut x_of_data = vec![Vec::new(); n];
        let mut z_of_data = vec![Vec::new(); n];
        for (k, s) in x_support.iter().enumerate() {
            for &q in s {
                x_of_data[q as usize].push(k as u32);
            }
        }
        for (k, s) in z_support.iter().enumerate() {
            for &q in s {
                z_of_data[q as usize].push(k as u32);
            }
        }
        let logical_x = data
            .iter()
            .enumerate()
            .filter(|(_, c)| c.1 == 0)
            .map(|(i, _)| i as u32)
            .collect();
        let logical_z = data
            .iter()
            .enumerate()
            .filter(|(_, c)| c.0 == 0)
            .map(|(i, _)| i as u32)
            .collect();
        let rows = |s: &Vec<Vec<u32>>| -> Vec<Bits> {
            s.iter()
                .map(|v| Bits::from_indices(n, v.iter().map(|&q| q as usize)))
                .collect()
        };
        let x_elim = Eliminator::new(&rows(&x_support));
        let z_elim = Eliminator::new(&rows(&z_support));
        Ok(CodeLayout {
            d,
            x_index: x_checks
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, i as u32))
                .collect(),
            z_index: z_checks
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, i as u32))
                .collect(),
            data,
            x_checks,
            z_checks,
            x_support,
            z_support,
            x_of_data,
            z_of_data,
            logical_x,
            logical_z,
            data_index,
            x_elim,
            z_elim,
        })
    }

    pub fn n_data(&self) -> usize {
        self.data.len()
    }

    pub fn n_x(&self) -> usize {
        self.x_checks.len()
    }

    pub fn n_z(&self) -> usize {
        self.z_checks.len()
    }

    /// Records per QEC round of one logical qubit (X-checks first).
    pub fn n_checks(&self) -> usize {
        self.x_checks.len() + self.z_checks.len()
    }

    pub fn data_at(&self, c: Coord) -> Option<u32> {
        self.data_index.get(&c).copied()
    }

    pub fn check_at(&self, t: CheckType, c: Coord) -> Option<u32> {
        match t {
            CheckType::X => self.x_index.get(&c).copied(),
            CheckType::Z => self.z_index.get(&c).copied(),
        }
    }

    pub fn checks(&self, t: CheckType) -> &[Coord] {
        match t {
            CheckType::X => &self.x_checks,
            CheckType::Z => &self.z_checks,
        }
    }

    pub fn support(&self, t: CheckType, k: u32) -> &[u32] {
        match t {
            CheckType::X => &self.x_support[k as usize],
            CheckType::Z => &self.z_support[k as usize],
        }
    }

    /// Checks of type `t` that anticommute with an error on data qubit `q`
    /// whose Pauli is `p`.
    pub fn flipped_by(&self, t: CheckType, q: u32, p: Pauli) -> &[u32] {
        match t {
            CheckType::X if p.has_z() => &self.x_of_data[q as usize],
            CheckType::Z if p.has_x() => &self.z_of_data[q as usize],
            _ => &[],
        }
    }

    pub fn check_pauli(&self, t: CheckType, k: u32, offset: u32) -> PauliString {
        PauliString::from_entries(self.support(t, k).iter().map(|&q| (offset + q, t.pauli())))
    }

    pub fn logical(&self, p: Pauli, offset: u32) -> PauliString {
        let xs = self.logical_x.iter().map(|&q| (offset + q, Pauli::X));
        let zs = self.logical_z.iter().map(|&q| (offset + q, Pauli::Z));
        match p {
            Pauli::X => PauliString::from_entries(xs),
            Pauli::Z => PauliString::from_entries(zs),
            Pauli::Y => PauliString::from_entries(xs.chain(zs)),
        }
    }

    /// Writes a block-local Pauli (given as X and Z parts over data qubits)
    /// as a product of X-checks and Z-checks, if it is a stabilizer.
    pub fn decompose(&self, xpart: &Bits, zpart: &Bits) -> Option<(Vec<u32>, Vec<u32>)> {
        let xs = self.x_elim.solve(xpart)?;
        let zs = self.z_elim.solve(zpart)?;
        Some((
            xs.ones().map(|i| i as u32).collect(),
            zs.ones().map(|i| i as u32).collect(),
        ))
    }

    /// Data pairs `(x, y) ↔ (y, x)` with `x < y`.
    pub fn fold_pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (i, &(a, b)) in self.data.iter().enumerate() {
            if a < b {
                out.push((i as u32, self.data_index[&(b, a)]));
            }
        }
        out
    }

    /// Physical layers for a logical gate acting on blocks whose data qubits
    /// start at the given offsets (`[j]` or `[control, target]`).
    pub fn gate_layers(&self, g: LogicalGate, offsets: &[u32]) -> Result<Vec<Vec<Gate>>> {
        let need = if g == LogicalGate::Cnot { 2 } else { 1 };
        if offsets.len() != need {
            return Err(Error::Invalid(format!(
                "{g:?} acts on {need} logical qubits"
            )));
        }
        let o = offsets[0];
        let n = self.n_data() as u32;
        Ok(match g {
            LogicalGate::I | LogicalGate::X | LogicalGate::Z => vec![],
            LogicalGate::H => vec![
                (0..n).map(|q| Gate::H(o + q)).collect(),
                self.fold_pairs()
                    .into_iter()
                    .map(|(p, q)| Gate::Swap(o + p, o + q))
                    .collect(),
            ],
            LogicalGate::S | LogicalGate::Sdg => {
                let mut v = Vec::new();
                for (i, &(a, b)) in self.data.iter().enumerate() {
                    if a == b {
                        let int_diag = a % 2 == 0;
                        let q = o + i as Qubit;
                        v.push(if int_diag == (g == LogicalGate::S) {
                            Gate::S(q)
                        } else {
                            Gate::Sdg(q)
                        });
                    }
                }
                v.extend(
                    self.fold_pairs()
                        .into_iter()
                        .map(|(p, q)| Gate::Cz(o + p, o + q)),
                );
                vec![v]
            }
            LogicalGate::Cnot => vec![(0..n)
                .map(|q| Gate::Cnot(offsets[0] + q, offsets[1] + q))
                .collect()],
        })
    }
}

/// Physical layers of a logical gate on block 0 (and block 1 as the
/// target of a CNOT).
pub fn physical_layer(g: LogicalGate, layout: &CodeLayout) -> Result<Vec<CliffordLayer>> {
    let n = layout.n_data() as u32;
    let offsets: Vec<u32> = if g == LogicalGate::Cnot {
        vec![0, n]
    } else {
        vec![0]
    };
    layout
        .gate_layers(g, &offsets)?
        .into_iter()
        .map(CliffordLayer::new)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let l = build_layout(3).unwrap();
        assert_eq!((l.n_data(), l.n_x(), l.n_z()), (13, 6, 6));
        assert_eq!(build_layout(5).unwrap().n_data(), 41);
        assert_eq!((l.logical_x.len(), l.logical_z.len()), (3, 3));
        assert!(build_layout(4).is_err());
        assert!(build_layout(1).is_err());
        let w: Vec<usize> = l.x_support.iter().map(|s| s.len()).collect();
        assert_eq!(w.iter().filter(|&&k| k == 3).count(), 4);
    }

    #[test]
    fn codes_commute() {
        for d in [3, 5, 7] {
            let l = build_layout(d).unwrap();
            for i in 0..l.n_x() {
                for k in 0..l.n_z() {
                    assert!(l
                        .check_pauli(CheckType::X, i as u32, 0)
                        .commutes(&l.check_pauli(CheckType::Z, k as u32, 0)));
                }
                assert!(l
                    .check_pauli(CheckType::X, i as u32, 0)
                    .commutes(&l.logical(Pauli::Z, 0)));
            }
            for k in 0..l.n_z() {
                assert!(l
                    .check_pauli(CheckType::Z, k as u32, 0)
                    .commutes(&l.logical(Pauli::X, 0)));
            }
            assert!(!l.logical(Pauli::X, 0).commutes(&l.logical(Pauli::Z, 0)));
        }
    }

    #[test]
    fn fold_gate_counts() {
        let l = build_layout(3).unwrap();
        let pairs = l.data.iter().filter(|c| c.0 < c.1).count();
        let h = physical_layer(LogicalGate::H, &l).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h[0].len(), 13);
        assert_eq!(h[1].len(), pairs);
        let s = physical_layer(LogicalGate::S, &l).unwrap();
        let count = |f: fn(&Gate) -> bool| s[0].gates().iter().filter(|g| f(g)).count();
        let int_diag = l.data.iter().filter(|c| c.0 == c.1 && c.0 % 2 == 0).count();
        let half_diag = l.data.iter().filter(|c| c.0 == c.1 && c.0 % 2 == 1).count();
        assert_eq!(count(|g| matches!(g, Gate::S(_))), int_diag);
        assert_eq!(count(|g| matches!(g, Gate::Sdg(_))), half_diag);
        assert_eq!(count(|g| matches!(g, Gate::Cz(..))), pairs);
        assert_eq!((int_diag, half_diag, pairs), (3, 2, 4));
        let cx = physical_layer(LogicalGate::Cnot, &l).unwrap();
        assert_eq!(cx[0].len(), 13);
        assert!(cx[0]
            .gates()
            .iter()
            .all(|g| matches!(g, Gate::Cnot(a, b) if *b == *a + 13)));
    }
}
