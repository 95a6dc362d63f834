//! Minimum-weight perfect matching with a virtual boundary.
//!
//! Defect distances come from Dijkstra rows that are computed lazily and
//! cached per source vertex; the matching itself is solved by the blossom
//! algorithm on the complete defect graph extended by one boundary image per
//! defect.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Edge weights are converted to fixed point with this resolution.
pub const WEIGHT_SCALE: f64 = 1e4;

const INF: u64 = u64::MAX;
const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct MatchEdge {
    pub u: u32,
    /// `None` for an edge to the boundary.
    pub v: Option<u32>,
    pub weight: f64,
    /// Observable bits toggled by the edge.
    pub flags: u64,
    /// Provenance, typically hyperedge ids.
    pub payload: Vec<u32>,
    fixed: u64,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub dist: Vec<u64>,
    pub pred_edge: Vec<u32>,
    pub parity: Vec<u64>,
}

pub struct MatchGraph {
    n: usize,
    edges: Vec<MatchEdge>,
    adj: Vec<Vec<(u32, u32)>>,
    rows: Vec<OnceLock<Row>>,
}

impl std::fmt::Debug for MatchGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "MatchGraph({} vertices, {} edges)",
            self.n,
            self.edges.len()
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchingSolution {
    /// Matched pairs; `None` marks a match to the boundary.
    pub pairs: Vec<(u32, Option<u32>)>,
    /// Edge ids used an odd number of times by the expanded paths.
    pub edges: Vec<u32>,
    pub weight: f64,
    pub flags: u64,
}

impl MatchGraph {
    /// Builds a graph over vertices `0..n`. Parallel edges with equal flags
    /// collapse to the lightest one, keeping the union of payloads.
    pub fn new(n: usize, raw: Vec<(u32, Option<u32>, f64, u64, Vec<u32>)>) -> Result<MatchGraph> {
        let mut index: HashMap<(u32, u32, u64), usize> = HashMap::new();
        let mut edges: Vec<MatchEdge> = Vec::new();
        for (u, v, w, flags, payload) in raw {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::Invalid(format!(
                    "edge weight {w} must be finite and non-negative"
                )));
            }
            let (u, v) = match v {
                Some(v) if v < u => (v, Some(u)),
                _ => (u, v),
            };
            for x in std::iter::once(u).chain(v) {
                if x as usize >= n {
                    return Err(Error::UnknownVertex(x));
                }
            }
            if v == Some(u) {
                continue;
            }
            let key = (u, v.unwrap_or(NONE), flags);
            let fixed = (w * WEIGHT_SCALE).round() as u64;
            match index.get(&key) {
                Some(&k) => {
                    let e = &mut edges[k];
                    if fixed < e.fixed {
                        e.fixed = fixed;
                        e.weight = w;
                    }
                    e.payload.extend(payload);
                    e.payload.sort_unstable();
                    e.payload.dedup();
                }
                None => {
                    index.insert(key, edges.len());
                    let mut payload = payload;
                    payload.sort_unstable();
                    payload.dedup();
                    edges.push(MatchEdge {
                        u,
                        v,
                        weight: w,
                        flags,
                        payload,
                        fixed,
                    });
                }
            }
        }
        let mut adj = vec![Vec::new(); n + 1];
        for (k, e) in edges.iter().enumerate() {
            let v = e.v.unwrap_or(n as u32);
            adj[e.u as usize].push((v, k as u32));
            if e.v.is_some() {
                adj[v as usize].push((e.u, k as u32));
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(MatchGraph {
            n,
            edges,
            adj,
            rows: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[MatchEdge] {
        &self.edges
    }

    /// Index used for the boundary in distance rows.
    pub fn boundary(&self) -> usize {
        self.n
    }

    fn other(&self, e: &MatchEdge, x: u32) -> u32 {
        if e.u == x {
            e.v.unwrap_or(self.n as u32)
        } else {
            e.u
        }
    }

    fn dijkstra(&self, s: u32) -> Row {
        let m = self.n + 1;
        let mut dist = vec![INF; m];
        let mut pred_edge = vec![NONE; m];
        let mut pred_v = vec![NONE; m];
        let mut parity = vec![0u64; m];
        let mut done = vec![false; m];
        let mut heap = BinaryHeap::new();
        dist[s as usize] = 0;
        heap.push(Reverse((0u64, s)));
        while let Some(Reverse((d, u))) = heap.pop() {
            let ui = u as usize;
            if done[ui] || d > dist[ui] {
                continue;
            }
            done[ui] = true;
            if pred_edge[ui] != NONE {
                let e = &self.edges[pred_edge[ui] as usize];
                parity[ui] = parity[pred_v[ui] as usize] ^ e.flags;
            }
            if ui == self.n {
                continue;
            }
            for &(v, k) in &self.adj[ui] {
                let vi = v as usize;
                if done[vi] {
                    continue;
                }
                let nd = d + self.edges[k as usize].fixed;
                if nd < dist[vi] || (nd == dist[vi] && (u, k) < (pred_v[vi], pred_edge[vi])) {
                    if nd < dist[vi] {
                        heap.push(Reverse((nd, v)));
                    }
                    dist[vi] = nd;
                    pred_v[vi] = u;
                    pred_edge[vi] = k;
                }
            }
        }
        Row {
            dist,
            pred_edge,
            parity,
        }
    }

    /// Cached shortest-path row from vertex `s` (includes the boundary).
    pub fn row(&self, s: u32) -> Result<&Row> {
        if s as usize >= self.n {
            return Err(Error::UnknownVertex(s));
        }
        Ok(self.rows[s as usize].get_or_init(|| self.dijkstra(s)))
    }

    /// Distance between two vertices, or to the boundary when `b` is `None`.
    pub fn distance(&self, a: u32, b: Option<u32>) -> Result<Option<f64>> {
        let row = self.row(a)?;
        let t = match b {
            Some(b) if (b as usize) < self.n => b as usize,
            Some(b) => return Err(Error::UnknownVertex(b)),
            None => self.n,
        };
        Ok((row.dist[t] != INF).then(|| row.dist[t] as f64 / WEIGHT_SCALE))
    }

    /// Edge ids along the stored shortest path from `s` to `t`.
    pub fn path(&self, s: u32, t: Option<u32>) -> Result<Vec<u32>> {
        let row = self.row(s)?;
        let mut x = t.map(|t| t as usize).unwrap_or(self.n);
        if row.dist[x] == INF {
            return Err(Error::Infeasible);
        }
        let mut out = Vec::new();
        while x != s as usize {
            let k = row.pred_edge[x];
            out.push(k);
            x = self.other(&self.edges[k as usize], x as u32) as usize;
        }
        out.reverse();
        Ok(out)
    }

    /// Matched pairs for a defect set.
    fn solve_pairs(&self, defects: &[u32]) -> Result<(Vec<(u32, Option<u32>)>, u64)> {
        let mut ds: Vec<u32> = defects.to_vec();
        ds.sort_unstable();
        ds.dedup();
        let k = ds.len();
        let rows: Vec<&Row> = ds.iter().map(|&v| self.row(v)).collect::<Result<_>>()?;
        let bdy: Vec<u64> = rows.iter().map(|r| r.dist[self.n]).collect();
        match k {
            0 => return Ok((vec![], 0)),
            1 => {
                if bdy[0] == INF {
                    return Err(Error::Infeasible);
                }
                return Ok((vec![(ds[0], None)], bdy[0]));
            }
            2 => {
                let w = rows[0].dist[ds[1] as usize];
                let split = bdy[0].saturating_add(bdy[1]);
                if w == INF && split >= INF {
                    return Err(Error::Infeasible);
                }
                return Ok(if w <= split {
                    (vec![(ds[0], Some(ds[1]))], w)
                } else {
                    (vec![(ds[0], None), (ds[1], None)], split)
                });
            }
            _ => {}
        }
        let mut cand: Vec<(usize, usize, u64)> = Vec::new();
        for i in 0..k {
            if bdy[i] != INF {
                cand.push((i, k + i, bdy[i]));
            }
            for j in i + 1..k {
                let w = rows[i].dist[ds[j] as usize];
                if w == INF {
                    continue;
                }
                if bdy[i] != INF && bdy[j] != INF && w > bdy[i] + bdy[j] {
                    continue;
                }
                cand.push((i, j, w));
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                cand.push((k + i, k + j, 0));
            }
        }
        let maxw = cand.iter().map(|c| c.2).max().unwrap_or(0);
        if maxw > (i32::MAX / 8) as u64 {
            return Err(Error::Invalid("path weights overflow the matcher".into()));
        }
        let mut order = cand.clone();
        order.sort_unstable_by_key(|c| (c.0, c.1));
        let edges: Vec<(usize, usize, i32)> = order
            .iter()
            .map(|c| (c.0, c.1, (maxw - c.2 + 1) as i32))
            .collect();
        if edges.is_empty() {
            return Err(Error::Infeasible);
        }
        let mate = mwmatching::Matching::new(edges).max_cardinality().solve();
        let mate_of = |x: usize| mate.get(x).copied().unwrap_or(mwmatching::SENTINEL);
        let mut pairs = Vec::new();
        let mut total = 0u64;
        for i in 0..k {
            let m = mate_of(i);
            if m == mwmatching::SENTINEL {
                return Err(Error::Infeasible);
            }
            if m < k {
                if i < m {
                    pairs.push((ds[i], Some(ds[m])));
                    total += rows[i].dist[ds[m] as usize];
                }
            } else if m == k + i {
                pairs.push((ds[i], None));
                total += bdy[i];
            } else {
                return Err(Error::Infeasible);
            }
        }
        Ok((pairs, total))
    }

    /// XOR of the flags along the minimum-weight correction.
    pub fn decode_flags(&self, defects: &[u32]) -> Result<u64> {
        let (pairs, _) = self.solve_pairs(defects)?;
        let mut f = 0;
        for (a, b) in pairs {
            let row = self.row(a)?;
            f ^= row.parity[b.map(|b| b as usize).unwrap_or(self.n)];
        }
        Ok(f)
    }

    pub fn decode(&self, defects: &[u32]) -> Result<MatchingSolution> {
        let (pairs, total) = self.solve_pairs(defects)?;
        let mut used: Vec<u32> = Vec::new();
        let mut flags = 0;
        for &(a, b) in &pairs {
            used.extend(self.path(a, b)?);
            flags ^= self.row(a)?.parity[b.map(|b| b as usize).unwrap_or(self.n)];
        }
        used.sort_unstable();
        let mut edges = Vec::new();
        let mut i = 0;
        while i < used.len() {
            let mut j = i;
            while j < used.len() && used[j] == used[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                edges.push(used[i]);
            }
            i = j;
        }
        Ok(MatchingSolution {
            pairs,
            edges,
            weight: total as f64 / WEIGHT_SCALE,
            flags,
        })
    }
}

/// Convenience wrapper matching the graph-level decode operation.
pub fn decode_graph(g: &MatchGraph, defects: &[u32]) -> Result<MatchingSolution> {
    g.decode(defects)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, e: &[(u32, Option<u32>)]) -> MatchGraph {
        MatchGraph::new(n, e.iter().map(|&(u, v)| (u, v, 1.0, 0, vec![])).collect()).unwrap()
    }

    #[test]
    fn trivial_cases() {
        let g = unit(2, &[(0, None), (0, Some(1))]);
        let s = g.decode(&[0]).unwrap();
        assert_eq!((s.weight, s.edges.len()), (1.0, 1));
        let s = g.decode(&[0, 1]).unwrap();
        assert_eq!(s.pairs, vec![(0, Some(1))]);
        assert_eq!(s.weight, 1.0);
        assert!(g.decode(&[]).unwrap().edges.is_empty());
        assert_eq!(g.decode(&[5]).unwrap_err(), Error::UnknownVertex(5));
        let iso = unit(3, &[(0, Some(1))]);
        assert_eq!(iso.decode(&[2]).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn shortest_path_examples() {
        let g = unit(4, &[(0, Some(1)), (1, Some(2)), (2, Some(3))]);
        assert_eq!(g.distance(0, Some(3)).unwrap(), Some(3.0));
        let g = unit(3, &[(0, Some(1))]);
        assert_eq!(g.distance(0, Some(2)).unwrap(), None);
        let g = MatchGraph::new(
            3,
            vec![
                (0, Some(1), 1.0, 0, vec![]),
                (1, Some(2), 1.0, 0, vec![]),
                (0, Some(2), 3.0, 0, vec![]),
            ],
        )
        .unwrap();
        assert_eq!(g.distance(0, Some(2)).unwrap(), Some(2.0));
    }

    #[test]
    fn path_through_boundary_pair() {
        // 0 - 1 - 2 - 3 chain with boundaries at both ends.
        let g = unit(
            4,
            &[
                (0, None),
                (0, Some(1)),
                (1, Some(2)),
                (2, Some(3)),
                (3, None),
            ],
        );
        let s = g.decode(&[0, 3]).unwrap();
        assert_eq!(s.weight, 2.0);
        assert_eq!(s.pairs, vec![(0, None), (3, None)]);
        let s = g.decode(&[0, 1, 2, 3]).unwrap();
        assert_eq!(s.weight, 2.0);
    }
}
