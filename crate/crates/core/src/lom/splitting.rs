//! Matching on the graph-like part of the hypergraph, with every heavier
//! hyperedge decomposed into a minimum-weight set of graph edges.

use crate::dem::{xor_prob, Dem};
use crate::error::{Error, Result};
use crate::matching::MatchGraph;

use super::log_weight;

#[derive(Debug)]
pub struct SplittingDecoder {
    graph: MatchGraph,
    n_obs: usize,
}

impl SplittingDecoder {
    pub fn new(dem: &Dem) -> Result<SplittingDecoder> {
        if dem.n_observables() > 64 {
            return Err(Error::Unsupported(format!(
                "{} observables (at most 64)",
                dem.n_observables()
            )));
        }
        let mask = |obs: &[u32]| obs.iter().fold(0u64, |m, &k| m | 1 << k);
        let mut probs = Vec::new();
        let mut raw = Vec::new();
        for (h, e) in dem.hyperedges.iter().enumerate() {
            if e.dets.is_empty() || e.dets.len() > 2 {
                continue;
            }
            probs.push(e.p);
            raw.push((
                e.dets[0],
                e.dets.get(1).copied(),
                log_weight(e.p),
                mask(&e.obs),
                vec![h as u32],
            ));
        }
        let n = dem.n_detectors();
        let base = MatchGraph::new(n, raw.clone())?;
        // base edges can be collapsed, so map back through the payload
        let mut by_h = vec![usize::MAX; dem.hyperedges.len()];
        for (k, r) in raw.iter().enumerate() {
            by_h[r.4[0] as usize] = k;
        }
        for (h, e) in dem.hyperedges.iter().enumerate() {
            if e.dets.len() <= 2 {
                continue;
            }
            let sol = base.decode(&e.dets).map_err(|_| {
                Error::Invalid(format!(
                    "hyperedge {h} cannot be decomposed into graph edges"
                ))
            })?;
            for k in sol.edges {
                let src = base.edges()[k as usize].payload[0] as usize;
                let i = by_h[src];
                probs[i] = xor_prob(probs[i], e.p);
            }
        }
        for (r, &p) in raw.iter_mut().zip(&probs) {
            r.2 = log_weight(p);
        }
        Ok(SplittingDecoder {
            graph: MatchGraph::new(n, raw)?,
            n_obs: dem.n_observables(),
        })
    }

    pub fn decode_mask(&self, defects: &[u32]) -> Result<u64> {
        self.graph.decode_flags(defects)
    }

    pub fn decode(&self, defects: &[u32]) -> Result<Vec<bool>> {
        let m = self.decode_mask(defects)?;
        Ok((0..self.n_obs).map(|k| m >> k & 1 == 1).collect())
    }
}

pub fn splitting_decode(dem: &Dem, defects: &[u32]) -> Result<Vec<bool>> {
    SplittingDecoder::new(dem)?.decode(defects)
}
