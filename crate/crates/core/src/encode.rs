//! Lowering of bare circuits onto surface-code patches.

use crate::circuit::{
    Activity, BareCircuit, Basis, Gate1, Gate2, MeasId, ObservableSpec, Op, Realization, ResetKind,
};
use crate::error::{Error, Result};
use crate::layout::{CheckType, CodeLayout, LogicalGate};
use crate::pauli::{CliffordLayer, Gate, Pauli, PauliString};
use crate::tableau::TableauOp;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Slot {
    /// Before the physical gates of a layer.
    PreGate,
    /// After the gates, before the QEC round.
    PreRound,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LogicalAction {
    Inactive,
    Reset(ResetKind),
    Measure(Basis),
    Idle,
    Gate(LogicalGate),
    Cnot { control: u32, target: u32 },
}

impl LogicalAction {
    /// Active before and after the layer, i.e. idling or gated.
    pub fn is_gate_like(&self) -> bool {
        matches!(
            self,
            LogicalAction::Idle | LogicalAction::Gate(_) | LogicalAction::Cnot { .. }
        )
    }

    pub fn active_after(&self) -> bool {
        !matches!(self, LogicalAction::Inactive | LogicalAction::Measure(_))
    }

    pub fn is_entangling(&self) -> bool {
        matches!(self, LogicalAction::Cnot { .. })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RecordKind {
    Check { ty: CheckType, index: u32 },
    Data { qubit: u32, basis: Basis },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Record {
    pub layer: usize,
    pub j: u32,
    pub kind: RecordKind,
}

#[derive(Clone, Debug)]
pub struct EncodedLayer {
    pub actions: Vec<LogicalAction>,
    /// Physical sub-layers (two for a fold-transversal Hadamard).
    pub phys: Vec<CliffordLayer>,
    pub data_base: Vec<Option<u32>>,
    pub round_base: Vec<Option<u32>>,
}

#[derive(Debug)]
pub struct EncodedCircuit {
    pub layout: CodeLayout,
    pub n_logical: u32,
    pub bare: BareCircuit,
    pub realization: Realization,
    pub layers: Vec<EncodedLayer>,
    pub records: Vec<Record>,
}

pub fn encode(bare: &BareCircuit, d: usize, r: &Realization) -> Result<EncodedCircuit> {
    let layout = CodeLayout::new(d)?;
    let n = layout.n_data() as u32;
    let k = bare.n_qubits();
    let act = bare.activity();
    let mut layers = Vec::with_capacity(bare.n_layers());
    let mut records = Vec::new();
    for (l, row) in act.iter().enumerate() {
        let mut actions: Vec<LogicalAction> = row
            .iter()
            .map(|a| match a {
                Activity::Inactive => LogicalAction::Inactive,
                Activity::Reset(k) => LogicalAction::Reset(*k),
                Activity::Measure(b) => LogicalAction::Measure(*b),
                Activity::Busy => LogicalAction::Idle,
            })
            .collect();
        let mut sub: Vec<Vec<Gate>> = vec![Vec::new(), Vec::new()];
        for op in bare.resolved_ops(l, r)? {
            let (g, qs) = match op {
                Op::One(Gate1::I | Gate1::X | Gate1::Z, _) => continue,
                Op::One(Gate1::H, q) => (LogicalGate::H, vec![q]),
                Op::One(Gate1::S, q) => (LogicalGate::S, vec![q]),
                Op::One(Gate1::Sdg, q) => (LogicalGate::Sdg, vec![q]),
                Op::Two(Gate2::Cnot, a, b) => (LogicalGate::Cnot, vec![a, b]),
                Op::Two(g, _, _) => {
                    return Err(Error::Unsupported(format!(
                        "{g:?} has no fold-transversal lowering"
                    )))
                }
            };
            if g == LogicalGate::Cnot {
                let a = LogicalAction::Cnot {
                    control: qs[0],
                    target: qs[1],
                };
                actions[qs[0] as usize] = a;
                actions[qs[1] as usize] = a;
            } else {
                actions[qs[0] as usize] = LogicalAction::Gate(g);
            }
            let offs: Vec<u32> = qs.iter().map(|q| q * n).collect();
            for (s, gates) in layout.gate_layers(g, &offs)?.into_iter().enumerate() {
                sub[s].extend(gates);
            }
        }
        if sub[1].is_empty() {
            sub.pop();
        }
        let phys = sub
            .into_iter()
            .filter(|g| !g.is_empty())
            .map(CliffordLayer::new)
            .collect::<Result<Vec<_>>>()?;
        let mut data_base = vec![None; k as usize];
        for (j, a) in actions.iter().enumerate() {
            if let LogicalAction::Measure(b) = a {
                data_base[j] = Some(records.len() as u32);
                for q in 0..n {
                    records.push(Record {
                        layer: l,
                        j: j as u32,
                        kind: RecordKind::Data {
                            qubit: q,
                            basis: *b,
                        },
                    });
                }
            }
        }
        let mut round_base = vec![None; k as usize];
        for (j, a) in actions.iter().enumerate() {
            if a.active_after() {
                round_base[j] = Some(records.len() as u32);
                for (ty, cnt) in [(CheckType::X, layout.n_x()), (CheckType::Z, layout.n_z())] {
                    for index in 0..cnt as u32 {
                        records.push(Record {
                            layer: l,
                            j: j as u32,
                            kind: RecordKind::Check { ty, index },
                        });
                    }
                }
            }
        }
        layers.push(EncodedLayer {
            actions,
            phys,
            data_base,
            round_base,
        });
    }
    Ok(EncodedCircuit {
        layout,
        n_logical: k,
        bare: bare.clone(),
        realization: r.clone(),
        layers,
        records,
    })
}

impl EncodedCircuit {
    pub fn d(&self) -> usize {
        self.layout.d
    }

    pub fn n_physical(&self) -> usize {
        self.n_logical as usize * self.layout.n_data()
    }

    pub fn offset(&self, j: u32) -> u32 {
        j * self.layout.n_data() as u32
    }

    /// Splits a physical qubit index into (logical qubit, data index).
    pub fn locate(&self, q: u32) -> (u32, u32) {
        let n = self.layout.n_data() as u32;
        (q / n, q % n)
    }

    pub fn n_rounds(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.round_base.iter().filter(|b| b.is_some()).count().min(1))
            .sum()
    }

    pub fn check_record(&self, layer: usize, j: u32, ty: CheckType, k: u32) -> Option<u32> {
        let base = self.layers[layer].round_base[j as usize]?;
        Some(match ty {
            CheckType::X => base + k,
            CheckType::Z => base + self.layout.n_x() as u32 + k,
        })
    }

    pub fn data_record(&self, layer: usize, j: u32, q: u32) -> Option<u32> {
        self.layers[layer].data_base[j as usize].map(|b| b + q)
    }

    /// Data records whose parity is the logical outcome of measurement `id`.
    pub fn lift(&self, id: MeasId) -> Result<Vec<u32>> {
        let m = self.bare.measurement(id)?;
        let base = self.layers[m.layer].data_base[m.qubit as usize]
            .expect("measured block has data records");
        let rep = match m.basis {
            Basis::Z => &self.layout.logical_z,
            Basis::X => &self.layout.logical_x,
        };
        Ok(rep.iter().map(|q| base + q).collect())
    }

    pub fn lift_observable(&self, o: &ObservableSpec) -> Result<Vec<u32>> {
        let mut v: Vec<u32> = Vec::new();
        for &id in o.ids() {
            v.extend(self.lift(id)?);
        }
        v.sort_unstable();
        Ok(v)
    }

    /// Stabilizer program reproducing the encoded circuit, with Paulis
    /// injected at the given `(layer, slot)` points. Outcome `i` of a run is
    /// record `i`.
    pub fn tableau_program(&self, inject: &[(usize, Slot, PauliString)]) -> Vec<TableauOp> {
        let lay = &self.layout;
        let n = lay.n_data() as u32;
        let mut prog = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            for (j, a) in layer.actions.iter().enumerate() {
                let o = j as u32 * n;
                if let LogicalAction::Reset(k) = a {
                    for q in 0..n {
                        prog.push(if *k == ResetKind::Plus {
                            TableauOp::ResetX(o + q)
                        } else {
                            TableauOp::ResetZ(o + q)
                        });
                    }
                    if *k == ResetKind::T {
                        for c in 0..lay.n_x() as u32 {
                            prog.push(TableauOp::Postselect(
                                lay.check_pauli(CheckType::X, c, o),
                                false,
                            ));
                        }
                    }
                }
            }
            for (il, s, p) in inject {
                if *il == l && *s == Slot::PreGate {
                    prog.push(TableauOp::Apply(p.clone()));
                }
            }
            for c in &layer.phys {
                prog.push(TableauOp::Layer(c.clone()));
            }
            for (il, s, p) in inject {
                if *il == l && *s == Slot::PreRound {
                    prog.push(TableauOp::Apply(p.clone()));
                }
            }
            for (j, a) in layer.actions.iter().enumerate() {
                if let LogicalAction::Measure(b) = a {
                    for q in 0..n {
                        let q = j as u32 * n + q;
                        prog.push(if *b == Basis::Z {
                            TableauOp::MeasureZ(q)
                        } else {
                            TableauOp::MeasureX(q)
                        });
                    }
                }
            }
            for (j, base) in layer.round_base.iter().enumerate() {
                if base.is_some() {
                    for ty in [CheckType::X, CheckType::Z] {
                        for c in 0..lay.checks(ty).len() as u32 {
                            prog.push(TableauOp::MeasurePauli(lay.check_pauli(
                                ty,
                                c,
                                j as u32 * n,
                            )));
                        }
                    }
                }
            }
        }
        prog
    }

    /// Physical representative of a logical Pauli on block `j`.
    pub fn logical(&self, j: u32, p: Pauli) -> PauliString {
        self.layout.logical(p, self.offset(j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::tableau::tableau_run;

    #[test]
    fn structural_counts() {
        let c = parse_circuit("R0 q0\nMZ q0\n").unwrap();
        let e = encode(&c, 3, &Realization::zeros()).unwrap();
        assert_eq!(e.n_rounds(), 1);
        let data = e
            .records
            .iter()
            .filter(|r| matches!(r.kind, RecordKind::Data { .. }))
            .count();
        assert_eq!((data, e.records.len()), (13, 25));
        assert_eq!(
            e.tableau_program(&[])
                .iter()
                .filter(|o| matches!(o, TableauOp::ResetZ(_)))
                .count(),
            13
        );
    }

    fn outcome(e: &EncodedCircuit, o: &ObservableSpec, seed: u64) -> bool {
        let out = tableau_run(e.n_physical(), &e.tableau_program(&[]), seed).unwrap();
        e.lift_observable(o)
            .unwrap()
            .iter()
            .fold(false, |acc, &r| acc ^ out[r as usize])
    }

    #[test]
    fn logical_actions_are_deterministic() {
        let r = Realization::zeros();
        let c = parse_circuit("R0 q0\nH q0\nMX q0\n").unwrap();
        let e = encode(&c, 3, &r).unwrap();
        for s in 0..5 {
            assert!(!outcome(&e, &ObservableSpec::single(1), s));
        }
        let c = parse_circuit("R0 q0; R+ q1\nCNOT q1 q0\nMZ q0; MZ q1\n").unwrap();
        let e = encode(&c, 3, &r).unwrap();
        let both = ObservableSpec::new([1, 2]).unwrap();
        let mut seen = [false; 2];
        for s in 0..12 {
            assert!(!outcome(&e, &both, s));
            seen[outcome(&e, &ObservableSpec::single(1), s) as usize] = true;
        }
        assert_eq!(seen, [true, true]);
        // S S = Z on |+>, read out in X.
        let c = parse_circuit("R+ q0\nS q0\nS q0\nMX q0\n").unwrap();
        let e = encode(&c, 3, &r).unwrap();
        assert!(outcome(&e, &ObservableSpec::single(1), 7));
    }
}
