//! Detector construction in the pre-gate and post-gate frames.

use serde::Serialize;

use crate::circuit::{Basis, ResetKind};
use crate::encode::{EncodedCircuit, LogicalAction};
use crate::error::{Error, Result};
use crate::f2::Bits;
use crate::layout::{CheckType, Coord};
use crate::pauli::{conjugate, Direction, PauliString};
use crate::tableau::tableau_run;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum Frame {
    Pre,
    Post,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Pre => "pre",
            Frame::Post => "post",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Detector {
    pub id: u32,
    pub t: u32,
    pub j: u32,
    /// Doubled spatial coordinate of the underlying check.
    pub coord: Coord,
    pub ty: CheckType,
    pub records: Vec<u32>,
}

impl Detector {
    /// Key shared by all detectors of one (time, logical qubit, type).
    pub fn tag(&self) -> (u32, u32, CheckType) {
        (self.t, self.j, self.ty)
    }
}

#[derive(Clone, Debug)]
pub struct DetectorSet {
    pub frame: Frame,
    pub detectors: Vec<Detector>,
}

impl DetectorSet {
    pub fn len(&self) -> usize {
        self.detectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detectors.is_empty()
    }

    /// For each record, the detectors containing it.
    pub fn record_incidence(&self, n_records: usize) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); n_records];
        for d in &self.detectors {
            for &r in &d.records {
                inc[r as usize].push(d.id);
            }
        }
        inc
    }
}

/// Writes a physical Pauli as a product of the check records of the round
/// after `layer`.
fn decompose(enc: &EncodedCircuit, p: &PauliString, layer: usize) -> Result<Vec<u32>> {
    let n = enc.layout.n_data();
    let mut blocks: Vec<(Bits, Bits)> = vec![(Bits::new(n), Bits::new(n)); enc.n_logical as usize];
    for (q, pq) in p.iter() {
        let (j, i) = enc.locate(q);
        let (x, z) = pq.bits();
        if x {
            blocks[j as usize].0.flip(i as usize);
        }
        if z {
            blocks[j as usize].1.flip(i as usize);
        }
    }
    let mut recs = Vec::new();
    for (j, (xb, zb)) in blocks.iter().enumerate() {
        if xb.is_zero() && zb.is_zero() {
            continue;
        }
        let (xs, zs) = enc.layout.decompose(xb, zb).ok_or_else(|| {
            Error::Invalid(format!(
                "layer {layer}: propagated check is not a stabilizer of block {j}"
            ))
        })?;
        let missing = || Error::Invalid(format!("layer {layer}: block {j} has no QEC round"));
        for k in xs {
            recs.push(
                enc.check_record(layer, j as u32, CheckType::X, k)
                    .ok_or_else(missing)?,
            );
        }
        for k in zs {
            recs.push(
                enc.check_record(layer, j as u32, CheckType::Z, k)
                    .ok_or_else(missing)?,
            );
        }
    }
    Ok(recs)
}

pub fn build_detectors(enc: &EncodedCircuit, frame: Frame) -> Result<DetectorSet> {
    let lay = &enc.layout;
    let mut dets = Vec::new();
    let mut push = |t: usize, j: usize, ty: CheckType, k: u32, mut records: Vec<u32>| {
        records.sort_unstable();
        dets.push(Detector {
            id: 0,
            t: t as u32,
            j: j as u32,
            coord: lay.checks(ty)[k as usize],
            ty,
            records,
        });
    };
    for (l, layer) in enc.layers.iter().enumerate() {
        for (j, a) in layer.actions.iter().enumerate() {
            let ju = j as u32;
            match a {
                LogicalAction::Inactive => {}
                LogicalAction::Reset(kind) => {
                    let types: &[CheckType] = match kind {
                        ResetKind::Zero => &[CheckType::Z],
                        ResetKind::Plus => &[CheckType::X],
                        ResetKind::T => &[CheckType::X, CheckType::Z],
                    };
                    for &ty in types {
                        for k in 0..lay.checks(ty).len() as u32 {
                            push(l, j, ty, k, vec![enc.check_record(l, ju, ty, k).unwrap()]);
                        }
                    }
                }
                LogicalAction::Measure(b) => {
                    let ty = if *b == Basis::Z {
                        CheckType::Z
                    } else {
                        CheckType::X
                    };
                    for k in 0..lay.checks(ty).len() as u32 {
                        let mut r: Vec<u32> = lay
                            .support(ty, k)
                            .iter()
                            .map(|&q| enc.data_record(l, ju, q).unwrap())
                            .collect();
                        r.push(enc.check_record(l - 1, ju, ty, k).unwrap());
                        push(l, j, ty, k, r);
                    }
                }
                _ => {
                    for ty in [CheckType::X, CheckType::Z] {
                        for k in 0..lay.checks(ty).len() as u32 {
                            let p = lay.check_pauli(ty, k, enc.offset(ju));
                            let mut r = match frame {
                                Frame::Pre => {
                                    let mut img = p;
                                    for c in &layer.phys {
                                        img = conjugate(&img, c, Direction::Forward);
                                    }
                                    let mut r = decompose(enc, &img, l)?;
                                    r.push(enc.check_record(l - 1, ju, ty, k).unwrap());
                                    r
                                }
                                Frame::Post => {
                                    let mut img = p;
                                    for c in layer.phys.iter().rev() {
                                        img = conjugate(&img, c, Direction::Backward);
                                    }
                                    let mut r = decompose(enc, &img, l - 1)?;
                                    r.push(enc.check_record(l, ju, ty, k).unwrap());
                                    r
                                }
                            };
                            r.dedup();
                            push(l, j, ty, k, r);
                        }
                    }
                }
            }
        }
    }
    dets.sort_by_key(|d| (d.t, d.j, d.ty, d.coord));
    for (i, d) in dets.iter_mut().enumerate() {
        d.id = i as u32;
    }
    Ok(DetectorSet {
        frame,
        detectors: dets,
    })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DeterminismReport {
    pub trials: usize,
    /// `(trial, detector id)` pairs with odd parity.
    pub violations: Vec<(usize, u32)>,
}

impl DeterminismReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs the noiseless tableau `trials` times and lists detectors whose
/// parity is ever odd.
pub fn check_determinism(
    enc: &EncodedCircuit,
    dets: &DetectorSet,
    trials: usize,
    seed: u64,
) -> Result<DeterminismReport> {
    let prog = enc.tableau_program(&[]);
    let mut rep = DeterminismReport {
        trials,
        violations: Vec::new(),
    };
    for t in 0..trials {
        let out = tableau_run(
            enc.n_physical(),
            &prog,
            seed.wrapping_add(t as u64)
                .wrapping_mul(0x9E37_79B9_7F4A_7C15),
        )?;
        for d in &dets.detectors {
            if d.records.iter().fold(false, |a, &r| a ^ out[r as usize]) {
                rep.violations.push((t, d.id));
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, Realization};
    use crate::encode::encode;
    use crate::layout::half;

    fn enc(text: &str, d: usize) -> EncodedCircuit {
        encode(&parse_circuit(text).unwrap(), d, &Realization::zeros()).unwrap()
    }

    #[test]
    fn table_shapes() {
        let e = enc("R0 q0\nI q0\nS q0\nMZ q0\n", 3);
        let ds = build_detectors(&e, Frame::Pre).unwrap();
        let at =
            |t: u32, ty: CheckType| ds.detectors.iter().filter(move |d| d.t == t && d.ty == ty);
        assert!(at(1, CheckType::X).all(|d| d.records.len() == 2));
        assert!(at(2, CheckType::X).all(|d| d.records.len() == 3));
        assert!(at(2, CheckType::Z).all(|d| d.records.len() == 2));
        let d = at(2, CheckType::X).next().unwrap();
        let (a, b) = d.coord;
        let lay = &e.layout;
        let mirror = e
            .check_record(
                2,
                0,
                CheckType::Z,
                lay.check_at(CheckType::Z, (b, a)).unwrap(),
            )
            .unwrap();
        assert!(d.records.contains(&mirror), "{} {}", half(a), half(b));
        assert_eq!(at(0, CheckType::Z).count(), 6);
        assert_eq!(at(0, CheckType::X).count(), 0);
        assert!(at(3, CheckType::Z)
            .all(|d| d.records.len() == 3 || d.records.len() == 4 || d.records.len() == 5));
        assert!(check_determinism(&e, &ds, 5, 1).unwrap().ok());
    }

    #[test]
    fn cnot_target_detector() {
        let e = enc("R0 q0; R0 q1\nCNOT q0 q1\nMZ q0; MZ q1\n", 3);
        let ds = build_detectors(&e, Frame::Pre).unwrap();
        let d = ds
            .detectors
            .iter()
            .find(|d| d.t == 1 && d.j == 1 && d.ty == CheckType::Z)
            .unwrap();
        assert_eq!(d.records.len(), 3);
        assert!(e.records[d.records[0] as usize].layer == 0);
        assert!(check_determinism(&e, &ds, 5, 2).unwrap().ok());
    }

    #[test]
    fn corrupted_detector_is_flagged() {
        let e = enc("R+ q0\nS q0\nS q0\nMX q0\n", 3);
        let mut ds = build_detectors(&e, Frame::Pre).unwrap();
        assert!(check_determinism(&e, &ds, 10, 3).unwrap().ok());
        let victim = ds
            .detectors
            .iter()
            .position(|d| d.t == 1 && d.ty == CheckType::X)
            .unwrap();
        ds.detectors[victim].records.pop();
        let rep = check_determinism(&e, &ds, 10, 3).unwrap();
        assert!(rep.violations.iter().any(|&(_, id)| id as usize == victim));
    }

    #[test]
    fn frames_agree_in_shape() {
        let e = enc("R0 q0; R+ q1\nH q0\nS q1\nCNOT q0 q1\nMZ q0; MX q1\n", 3);
        let pre = build_detectors(&e, Frame::Pre).unwrap();
        let post = build_detectors(&e, Frame::Post).unwrap();
        let sizes = |s: &DetectorSet| {
            let mut v: Vec<usize> = s.detectors.iter().map(|d| d.records.len()).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(sizes(&pre), sizes(&post));
        assert!(check_determinism(&e, &pre, 5, 4).unwrap().ok());
        assert!(check_determinism(&e, &post, 5, 4).unwrap().ok());
    }
}
