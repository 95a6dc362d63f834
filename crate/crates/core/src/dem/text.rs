use std::fmt::Write;

use super::{Dem, Hyperedge};
use crate::detectors::{Detector, Frame};
use crate::error::{Error, Result};
use crate::layout::{half, CheckType};

/// `%.12g`-style formatting.
pub(crate) fn fmt_prob(p: f64) -> String {
    if p == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", p);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let strip = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exp) {
        strip(format!("{:.*}", (11 - exp).max(0) as usize, p))
    } else {
        format!(
            "{}e{}{:02}",
            strip(mant.to_string()),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

pub fn serialize_dem(dem: &Dem) -> String {
    let mut s = String::new();
    writeln!(s, "dem v1 frame={} d={}", dem.frame.name(), dem.d).unwrap();
    for det in &dem.detectors {
        let ty = if det.ty == CheckType::X { "X" } else { "Z" };
        writeln!(
            s,
            "detector D{} t={} j={} x={} y={} type={}",
            det.id,
            det.t,
            det.j,
            half(det.coord.0),
            half(det.coord.1),
            ty
        )
        .unwrap();
    }
    for (k, o) in dem.observables.iter().enumerate() {
        write!(s, "observable L{k} =").unwrap();
        for r in o {
            write!(s, " m{r}").unwrap();
        }
        s.push('\n');
    }
    for h in &dem.hyperedges {
        write!(s, "error({})", fmt_prob(h.p)).unwrap();
        for d in &h.dets {
            write!(s, " D{d}").unwrap();
        }
        for o in &h.obs {
            write!(s, " L{o}").unwrap();
        }
        s.push('\n');
    }
    s
}

fn derr(line: usize, msg: impl Into<String>) -> Error {
    Error::Dem {
        line,
        msg: msg.into(),
    }
}

fn field<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| derr(line, format!("expected `{key}=…`, found `{tok}`")))
}

fn doubled(v: &str, line: usize) -> Result<i32> {
    let f: f64 = v
        .parse()
        .map_err(|_| derr(line, format!("bad coordinate `{v}`")))?;
    let d = f * 2.0;
    if d.fract() != 0.0 {
        return Err(derr(
            line,
            format!("coordinate `{v}` is not a half-integer"),
        ));
    }
    Ok(d as i32)
}

fn index(tok: &str, prefix: char, line: usize) -> Result<u32> {
    tok.strip_prefix(prefix)
        .and_then(|r| r.parse().ok())
        .ok_or_else(|| derr(line, format!("expected `{prefix}<n>`, found `{tok}`")))
}

pub fn parse_dem(text: &str) -> Result<Dem> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| derr(1, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "dem" || h[1] != "v1" {
        return Err(derr(1, "expected header `dem v1 frame=<pre|post> d=<d>`"));
    }
    let frame = match field(h[2], "frame", 1)? {
        "pre" => Frame::Pre,
        "post" => Frame::Post,
        other => return Err(derr(1, format!("unknown frame `{other}`"))),
    };
    let d: usize = field(h[3], "d", 1)?
        .parse()
        .map_err(|_| derr(1, "bad distance"))?;
    let mut detectors = Vec::new();
    let mut observables: Vec<Vec<u32>> = Vec::new();
    let mut hyperedges = Vec::new();
    for (ln, raw) in lines {
        let line = ln + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks[0] {
            "detector" => {
                if toks.len() != 7 {
                    return Err(derr(line, "detector line needs id, t, j, x, y and type"));
                }
                let id = index(toks[1], 'D', line)?;
                if id as usize != detectors.len() {
                    return Err(derr(
                        line,
                        format!("detector ids must be dense, expected D{}", detectors.len()),
                    ));
                }
                let num = |k: usize, key: &str| -> Result<u32> {
                    field(toks[k], key, line)?
                        .parse()
                        .map_err(|_| derr(line, format!("bad `{key}` value")))
                };
                let ty = match field(toks[6], "type", line)? {
                    "X" => CheckType::X,
                    "Z" => CheckType::Z,
                    other => return Err(derr(line, format!("unknown detector type `{other}`"))),
                };
                detectors.push(Detector {
                    id,
                    t: num(2, "t")?,
                    j: num(3, "j")?,
                    coord: (
                        doubled(field(toks[4], "x", line)?, line)?,
                        doubled(field(toks[5], "y", line)?, line)?,
                    ),
                    ty,
                    records: Vec::new(),
                });
            }
            "observable" => {
                if toks.len() < 3 || toks[2] != "=" {
                    return Err(derr(line, "expected `observable L<k> = m<i> …`"));
                }
                let k = index(toks[1], 'L', line)?;
                if k as usize != observables.len() {
                    return Err(derr(line, "observable ids must be dense"));
                }
                observables.push(
                    toks[3..]
                        .iter()
                        .map(|t| index(t, 'm', line))
                        .collect::<Result<_>>()?,
                );
            }
            t if t.starts_with("error(") => {
                let p: f64 = t
                    .strip_prefix("error(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|r| r.parse().ok())
                    .ok_or_else(|| derr(line, format!("malformed probability in `{t}`")))?;
                if !(p > 0.0 && p < 1.0) {
                    return Err(derr(line, format!("probability {p} out of range")));
                }
                let mut dets = Vec::new();
                let mut obs = Vec::new();
                for tok in &toks[1..] {
                    if tok.starts_with('D') {
                        let v = index(tok, 'D', line)?;
                        if v as usize >= detectors.len() {
                            return Err(derr(line, format!("unknown detector {tok}")));
                        }
                        dets.push(v);
                    } else {
                        let v = index(tok, 'L', line)?;
                        if v as usize >= observables.len() {
                            return Err(derr(line, format!("unknown observable {tok}")));
                        }
                        obs.push(v);
                    }
                }
                hyperedges.push(Hyperedge {
                    dets,
                    obs,
                    p,
                    sources: Vec::new(),
                });
            }
            other => return Err(derr(line, format!("unknown line kind `{other}`"))),
        }
    }
    Ok(Dem {
        d,
        frame,
        noise: None,
        detectors,
        observables,
        hyperedges,
        mechanisms: Vec::new(),
        locators: Vec::new(),
    })
}
