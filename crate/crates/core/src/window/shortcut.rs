//! Short-cut edges: unit-weight time-like edges joining track vertices with
//! equal spatial coordinates across detector types and logical qubits.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::dem::{Dem, Noise};
use crate::detectors::Detector;
use crate::error::Result;
use crate::layout::CheckType;
use crate::lom::{log_weight, DecodingSubgraph, SubEdge};

#[derive(Clone, Copy, PartialEq, Debug, Default, Serialize)]
pub struct ShortCutConfig {
    pub enabled: bool,
    /// Weight of each short-cut edge. Defaults to 1 under basic noise and to
    /// the log-likelihood weight of p otherwise.
    pub weight: Option<f64>,
}

impl ShortCutConfig {
    pub fn on() -> Self {
        ShortCutConfig {
            enabled: true,
            weight: None,
        }
    }
}

/// Coordinates `v(t, k, z, z̃)` of a detector. X-detectors of qubit `j` get
/// `k = 2j`, Z-detectors `k = 2j + 1` (qubits are 0-based here). With the
/// doubled check coordinate `(a, b)`, X-detectors map to `z = a/2`,
/// `z̃ = (b+1)/2` and Z-detectors to `z = b/2`, `z̃ = (a+1)/2`; the top and
/// bottom boundaries sit at `z̃ = d` and `z̃ = 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize)]
pub struct VertexLabel {
    pub t: u32,
    pub k: u32,
    pub z: u32,
    pub zt: u32,
}

pub fn relabel(det: &Detector) -> VertexLabel {
    let (a, b) = (det.coord.0 as u32, det.coord.1 as u32);
    match det.ty {
        CheckType::X => VertexLabel {
            t: det.t,
            k: 2 * det.j,
            z: a / 2,
            zt: (b + 1) / 2,
        },
        CheckType::Z => VertexLabel {
            t: det.t,
            k: 2 * det.j + 1,
            z: b / 2,
            zt: (a + 1) / 2,
        },
    }
}

/// Adds k-type edges between every pair of track vertices at equal
/// `(t, z, z̃)` and t-type edges between every pair at `(t, ·, z, z̃)` and
/// `(t+1, ·, z, z̃)`, skipping pairs already joined by a real edge.
pub fn add_shortcut_edges(
    dem: &Dem,
    mut sub: DecodingSubgraph,
    cfg: &ShortCutConfig,
) -> Result<DecodingSubgraph> {
    if !cfg.enabled {
        return Ok(sub);
    }
    let weight = cfg.weight.unwrap_or(match dem.noise {
        Some(Noise::Basic(_)) | None => 1.0,
        Some(n) => log_weight(n.p()),
    });
    let mut by_site: BTreeMap<(u32, u32, u32), Vec<u32>> = BTreeMap::new();
    for (i, &v) in sub.vertices.iter().enumerate() {
        let l = relabel(&dem.detectors[v as usize]);
        by_site.entry((l.t, l.z, l.zt)).or_default().push(i as u32);
    }
    let mut joined: HashSet<(u32, u32)> = sub
        .edges
        .iter()
        .filter(|e| e.ends.len() == 2)
        .map(|e| (e.ends[0], e.ends[1]))
        .collect();
    let mut added = Vec::new();
    let mut push = |a: u32, b: u32| {
        let key = (a.min(b), a.max(b));
        if a != b && joined.insert(key) {
            added.push(SubEdge {
                ends: vec![key.0, key.1],
                p: 0.0,
                weight,
                sources: vec![],
                observing: false,
                shortcut: true,
            });
        }
    };
    for (&(t, z, zt), here) in &by_site {
        for (x, &a) in here.iter().enumerate() {
            for &b in &here[x + 1..] {
                push(a, b);
            }
        }
        if let Some(next) = by_site.get(&(t + 1, z, zt)) {
            for &a in here {
                for &b in next {
                    push(a, b);
                }
            }
        }
    }
    sub.edges.extend(added);
    sub.rebuild()?;
    Ok(sub)
}
