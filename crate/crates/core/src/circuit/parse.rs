use super::{Activity, BareCircuit, Basis, Element, Gate1, Gate2, MeasId, Op, ResetKind};
use crate::error::{Error, Result};
use crate::pauli::Qubit;

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn qubit(tok: &str, line: usize, col: usize) -> Result<Qubit> {
    let digits = tok
        .strip_prefix('q')
        .or_else(|| tok.strip_prefix('Q'))
        .unwrap_or(tok);
    digits
        .parse::<Qubit>()
        .map_err(|_| perr(line, col, format!("expected a qubit, found `{tok}`")))
}

fn op_from(name: &str, args: &[(usize, &str)], line: usize, col: usize) -> Result<Op> {
    let one = |g: Gate1| -> Result<Op> {
        match args {
            [(c, a)] => Ok(Op::One(g, qubit(a, line, *c)?)),
            _ => Err(perr(line, col, format!("`{name}` takes one qubit"))),
        }
    };
    let two = |g: Gate2| -> Result<Op> {
        match args {
            [(c1, a), (c2, b)] => Ok(Op::Two(g, qubit(a, line, *c1)?, qubit(b, line, *c2)?)),
            _ => Err(perr(line, col, format!("`{name}` takes two qubits"))),
        }
    };
    match name.to_ascii_uppercase().as_str() {
        "I" => one(Gate1::I),
        "H" => one(Gate1::H),
        "S" => one(Gate1::S),
        "SDG" => one(Gate1::Sdg),
        "X" => one(Gate1::X),
        "Z" => one(Gate1::Z),
        "CNOT" | "CX" => two(Gate2::Cnot),
        "CZ" => two(Gate2::Cz),
        "SWAP" => two(Gate2::Swap),
        _ => Err(perr(line, col, format!("unknown gate `{name}`"))),
    }
}

fn condition(toks: &[(usize, &str)], line: usize, col: usize) -> Result<Vec<MeasId>> {
    let joined: String = toks.iter().map(|t| t.1).collect::<Vec<_>>().join("");
    if joined.is_empty() {
        return Err(perr(line, col, "missing condition after ON"));
    }
    joined
        .split('^')
        .map(|m| {
            m.strip_prefix('m')
                .or_else(|| m.strip_prefix('M'))
                .and_then(|d| d.parse::<MeasId>().ok())
                .filter(|&id| id >= 1)
                .ok_or_else(|| perr(line, toks[0].0, format!("bad measurement reference `{m}`")))
        })
        .collect()
}

fn element(toks: &[(usize, &str)], line: usize) -> Result<Element> {
    let (col, head) = toks[0];
    let args = &toks[1..];
    let single = |line: usize| -> Result<Qubit> {
        match args {
            [(c, a)] => qubit(a, line, *c),
            _ => Err(perr(line, col, format!("`{head}` takes one qubit"))),
        }
    };
    match head.to_ascii_uppercase().as_str() {
        "R0" | "R" => Ok(Element::Reset(ResetKind::Zero, single(line)?)),
        "R+" | "RX" => Ok(Element::Reset(ResetKind::Plus, single(line)?)),
        "RT" => Ok(Element::Reset(ResetKind::T, single(line)?)),
        "MZ" | "M" => Ok(Element::Measure(Basis::Z, single(line)?)),
        "MX" => Ok(Element::Measure(Basis::X, single(line)?)),
        "COND" => {
            let on = args
                .iter()
                .position(|t| t.1.eq_ignore_ascii_case("ON"))
                .ok_or_else(|| perr(line, col, "COND requires `ON <condition>`"))?;
            if on == 0 {
                return Err(perr(line, col, "COND requires a gate"));
            }
            let op = op_from(args[0].1, &args[1..on], line, args[0].0)?;
            let cond = condition(&args[on + 1..], line, col)?;
            Ok(Element::Cond(op, cond))
        }
        _ => Ok(Element::Gate(op_from(head, args, line, col)?)),
    }
}

/// Parses the line-per-layer circuit format.
pub fn parse_circuit(text: &str) -> Result<BareCircuit> {
    let mut layers = Vec::new();
    let mut lines_of = Vec::new();
    let mut n_qubits = 0u32;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let mut layer = Vec::new();
        let mut offset = 0;
        for part in body.split(';') {
            let mut toks = Vec::new();
            let mut pos = 0;
            for tok in part.split_whitespace() {
                let at = part[pos..].find(tok).unwrap() + pos;
                toks.push((offset + at + 1, tok));
                pos = at + tok.len();
            }
            offset += part.len() + 1;
            if toks.is_empty() {
                continue;
            }
            if toks.len() == 1 && toks[0].1.eq_ignore_ascii_case("TICK") {
                continue;
            }
            let el = element(&toks, line)?;
            for q in el.qubits() {
                n_qubits = n_qubits.max(q + 1);
            }
            layer.push(el);
        }
        layers.push(layer);
        lines_of.push(line);
    }
    BareCircuit::build(n_qubits, layers).map_err(|(l, msg)| perr(lines_of[l], 1, msg))
}

fn op_text(op: &Op) -> String {
    match op {
        Op::One(g, q) => {
            let n = match g {
                Gate1::I => "I",
                Gate1::H => "H",
                Gate1::S => "S",
                Gate1::Sdg => "SDG",
                Gate1::X => "X",
                Gate1::Z => "Z",
            };
            format!("{n} q{q}")
        }
        Op::Two(g, a, b) => {
            let n = match g {
                Gate2::Cnot => "CNOT",
                Gate2::Cz => "CZ",
                Gate2::Swap => "SWAP",
            };
            format!("{n} q{a} q{b}")
        }
    }
}

/// Inverse of [`parse_circuit`]. Empty layers become idles on the active
/// qubits, or `TICK` when nothing is active.
pub fn write_circuit(c: &BareCircuit) -> String {
    let act = c.activity();
    let mut out = String::new();
    for (l, layer) in c.layers().iter().enumerate() {
        let mut parts: Vec<String> = layer
            .iter()
            .map(|el| match el {
                Element::Reset(ResetKind::Zero, q) => format!("R0 q{q}"),
                Element::Reset(ResetKind::Plus, q) => format!("R+ q{q}"),
                Element::Reset(ResetKind::T, q) => format!("RT q{q}"),
                Element::Measure(Basis::Z, q) => format!("MZ q{q}"),
                Element::Measure(Basis::X, q) => format!("MX q{q}"),
                Element::Gate(op) => op_text(op),
                Element::Cond(op, ids) => {
                    let cond: Vec<String> = ids.iter().map(|i| format!("m{i}")).collect();
                    format!("COND {} ON {}", op_text(op), cond.join("^"))
                }
            })
            .collect();
        if parts.is_empty() {
            parts = act[l]
                .iter()
                .enumerate()
                .filter(|(_, a)| **a == Activity::Busy)
                .map(|(q, _)| format!("I q{q}"))
                .collect();
            if parts.is_empty() {
                parts.push("TICK".into());
            }
        }
        out.push_str(&parts.join("; "));
        out.push('\n');
    }
    out
}
