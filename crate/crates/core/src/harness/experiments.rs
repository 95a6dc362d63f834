use std::fmt::Write;
use std::str::FromStr;

use crate::circuit::{
    is_fragile, parse_circuit, BareCircuit, Basis, MeasId, ObservableSpec, Realization,
};
use crate::dem::{build_dem, Dem, Noise};
use crate::detectors::{build_detectors, DetectorSet, Frame};
use crate::encode::{encode, EncodedCircuit};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RepeatedGate {
    I,
    H,
    S,
    Cnot,
    AltCnot,
}

impl FromStr for RepeatedGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "I" => RepeatedGate::I,
            "H" => RepeatedGate::H,
            "S" => RepeatedGate::S,
            "CNOT" | "CX" => RepeatedGate::Cnot,
            "ALTCNOT" | "ALT-CNOT" => RepeatedGate::AltCnot,
            _ => return Err(Error::Invalid(format!("unknown repeated gate `{s}`"))),
        })
    }
}

/// Reset in `basis`, d+1 layers of `g`, then a transversal measurement in
/// `basis`.
pub fn gen_repeated_gate(g: RepeatedGate, d: usize, basis: Basis) -> Result<BareCircuit> {
    parse_circuit(&repeated_gate_text(g, d, basis)?)
}

pub fn repeated_gate_text(g: RepeatedGate, d: usize, basis: Basis) -> Result<String> {
    padded_repeated_gate_text(g, d, basis, 0, 0)
}

/// Repeated-gate circuit with `lead` idle layers after the reset and `tail`
/// idle layers before the measurement.
pub fn padded_repeated_gate_text(
    g: RepeatedGate,
    d: usize,
    basis: Basis,
    lead: usize,
    tail: usize,
) -> Result<String> {
    if d < 3 || d % 2 == 0 {
        return Err(Error::Distance(d));
    }
    let (r, m) = match basis {
        Basis::Z => ("R0", "MZ"),
        Basis::X => ("R+", "MX"),
    };
    let two = matches!(g, RepeatedGate::Cnot | RepeatedGate::AltCnot);
    let mut s = String::new();
    if two {
        writeln!(s, "{r} q0; {r} q1").unwrap();
    } else {
        writeln!(s, "{r} q0").unwrap();
    }
    let idle = if two { "I q0; I q1" } else { "I q0" };
    for _ in 0..lead {
        writeln!(s, "{idle}").unwrap();
    }
    for i in 0..=d {
        let line = match g {
            RepeatedGate::I => "I q0".to_string(),
            RepeatedGate::H => "H q0".to_string(),
            RepeatedGate::S => "S q0".to_string(),
            RepeatedGate::Cnot => "CNOT q0 q1".to_string(),
            RepeatedGate::AltCnot if i % 2 == 0 => "CNOT q0 q1".to_string(),
            RepeatedGate::AltCnot => "CNOT q1 q0".to_string(),
        };
        writeln!(s, "{line}").unwrap();
    }
    for _ in 0..tail {
        writeln!(s, "{idle}").unwrap();
    }
    if two {
        writeln!(s, "{m} q0; {m} q1").unwrap();
    } else {
        writeln!(s, "{m} q0").unwrap();
    }
    Ok(s)
}

/// Idle padding `(lead, tail)` that makes a repeated-gate circuit legal for
/// windows of width `w` with slow-reset factor `f`: the first gate sits at
/// layer `f·d` and the measurement ends on a multiple of `w`.
pub fn window_padding(d: usize, w: usize, f: usize) -> (usize, usize) {
    let lead = (f * d).saturating_sub(1);
    let base = lead + d + 3;
    (lead, (w - base % w) % w)
}

/// Parses a name of the form accepted by [`named_experiment`] into a
/// repeated gate and basis, if it is one.
pub fn parse_repeated_name(name: &str) -> Option<(RepeatedGate, Basis)> {
    let lower = name.to_ascii_lowercase();
    let rest = lower.strip_prefix("repeated-")?;
    let (g, basis) = match rest.rsplit_once('-') {
        Some((g, "x")) => (g, Basis::X),
        Some((g, "z")) => (g, Basis::Z),
        _ => (rest, Basis::Z),
    };
    Some((g.parse().ok()?, basis))
}

/// Bell-pair circuit with two fragile single measurements whose product is
/// reliable.
pub const BELL_PAIR: &str = "R0 q0; R+ q1\nCNOT q1 q0\nMZ q0; MZ q1\n";

/// Two T injections with conditional S corrections, then S† and an X
/// measurement.
pub const T_INJECTIONS: &str =
    "R+ q0; RT q1\nCNOT q0 q1\nMZ q1\nCOND S q0 ON m1; RT q1\nCNOT q0 q1\nMZ q1\nCOND S q0 ON m2\nSDG q0\nMX q0\n";

/// Reset, H̄, CNOT̄, measurements.
pub const RESET_H_CNOT: &str = "R0 q0; R0 q1\nH q0\nCNOT q0 q1\nMZ q0; MZ q1\n";

/// Named circuit generators accepted by the CLI.
pub fn named_experiment(name: &str, d: usize) -> Result<String> {
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "bell" => return Ok(BELL_PAIR.to_string()),
        "t-injection" => return Ok(T_INJECTIONS.to_string()),
        "reset-h-cnot" => return Ok(RESET_H_CNOT.to_string()),
        _ => {}
    }
    let (g, basis) = parse_repeated_name(&lower)
        .ok_or_else(|| Error::Invalid(format!("unknown experiment `{name}`")))?;
    repeated_gate_text(g, d, basis)
}

/// An encoded circuit with its detectors and decoding hypergraph. Declared
/// observable `L{i}` is measurement `m{i+1}`.
#[derive(Debug)]
pub struct Experiment {
    pub bare: BareCircuit,
    pub realization: Realization,
    pub encoded: EncodedCircuit,
    pub detectors: DetectorSet,
    pub dem: Dem,
    pub requests: Vec<ObservableSpec>,
}

impl Experiment {
    pub fn build(
        bare: BareCircuit,
        d: usize,
        frame: Frame,
        noise: Noise,
        r: Realization,
    ) -> Result<Experiment> {
        let encoded = encode(&bare, d, &r)?;
        let detectors = build_detectors(&encoded, frame)?;
        let obs = (1..=bare.n_measurements() as MeasId)
            .map(|i| encoded.lift_observable(&ObservableSpec::single(i)))
            .collect::<Result<Vec<_>>>()?;
        let dem = build_dem(&encoded, &detectors, &obs, noise)?;
        let requests = default_requests(&bare, &r)?;
        Ok(Experiment {
            bare,
            realization: r,
            encoded,
            detectors,
            dem,
            requests,
        })
    }

    pub fn from_text(text: &str, d: usize, frame: Frame, noise: Noise) -> Result<Experiment> {
        Experiment::build(parse_circuit(text)?, d, frame, noise, Realization::zeros())
    }

    pub fn with_requests(mut self, requests: Vec<ObservableSpec>) -> Self {
        self.requests = requests;
        self
    }

    /// Declared-observable indices of a product.
    pub fn observable_indices(o: &ObservableSpec) -> Vec<u32> {
        o.ids().iter().map(|&i| i - 1).collect()
    }
}

/// Reliable single measurements of the last measuring layer; when there are
/// none, reliable pairwise products of those measurements, else of all.
pub fn default_requests(c: &BareCircuit, r: &Realization) -> Result<Vec<ObservableSpec>> {
    let last = c.measurements().iter().map(|m| m.layer).max();
    let Some(last) = last else { return Ok(vec![]) };
    let finals: Vec<MeasId> = c.measurements_in(last).map(|(id, _)| id).collect();
    let mut out = Vec::new();
    for &id in &finals {
        let o = ObservableSpec::single(id);
        if !is_fragile(c, &o, r)?.0 {
            out.push(o);
        }
    }
    if out.is_empty() {
        let all: Vec<MeasId> = (1..=c.n_measurements() as MeasId).collect();
        for pool in [&finals, &all] {
            for (i, &a) in pool.iter().enumerate() {
                for &b in &pool[i + 1..] {
                    let o = ObservableSpec::new([a, b])?;
                    if !is_fragile(c, &o, r)?.0 {
                        out.push(o);
                    }
                }
            }
            if !out.is_empty() {
                break;
            }
        }
    }
    Ok(out)
}
