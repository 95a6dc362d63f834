use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dem::Dem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shot {
    /// Flipped hyperedge ids, ascending.
    pub flipped: Vec<usize>,
    /// Detectors with odd incidence, ascending.
    pub defects: Vec<u32>,
    /// Flip of each declared observable.
    pub truth: Vec<bool>,
}

/// Independent hyperedge sampler. Hyperedges with equal probability are
/// grouped and sampled by geometric skipping.
#[derive(Clone, Debug)]
pub struct Sampler {
    groups: Vec<(f64, Vec<usize>)>,
    n_obs: usize,
    n_det: usize,
}

impl Sampler {
    pub fn new(dem: &Dem) -> Sampler {
        let mut idx: Vec<usize> = (0..dem.hyperedges.len())
            .filter(|&h| dem.hyperedges[h].p > 0.0)
            .collect();
        idx.sort_by(|&a, &b| {
            dem.hyperedges[a]
                .p
                .total_cmp(&dem.hyperedges[b].p)
                .then(a.cmp(&b))
        });
        let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
        for h in idx {
            let p = dem.hyperedges[h].p;
            match groups.last_mut() {
                Some((q, v)) if *q == p => v.push(h),
                _ => groups.push((p, vec![h])),
            }
        }
        Sampler {
            groups,
            n_obs: dem.n_observables(),
            n_det: dem.n_detectors(),
        }
    }

    /// Per-shot stream keyed by (seed, shot index).
    pub fn rng(seed: u64, shot: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(shot);
        r
    }

    pub fn flips(&self, rng: &mut impl Rng) -> Vec<usize> {
        let mut out = Vec::new();
        for (p, members) in &self.groups {
            if *p >= 0.5 {
                out.extend(members.iter().copied().filter(|_| rng.gen::<f64>() < *p));
                continue;
            }
            let ln_q = (-p).ln_1p();
            let mut i = 0usize;
            loop {
                let u: f64 = 1.0 - rng.gen::<f64>();
                let skip = (u.ln() / ln_q).floor();
                if !skip.is_finite() || skip >= (members.len() - i) as f64 {
                    break;
                }
                i += skip as usize;
                out.push(members[i]);
                i += 1;
                if i >= members.len() {
                    break;
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn shot(&self, dem: &Dem, seed: u64, index: u64) -> Shot {
        let flipped = self.flips(&mut Sampler::rng(seed, index));
        self.shot_of(dem, flipped)
    }

    pub fn shot_of(&self, dem: &Dem, flipped: Vec<usize>) -> Shot {
        let mut par = vec![false; self.n_det];
        let mut truth = vec![false; self.n_obs];
        for &h in &flipped {
            let e = &dem.hyperedges[h];
            for &v in &e.dets {
                par[v as usize] ^= true;
            }
            for &k in &e.obs {
                truth[k as usize] ^= true;
            }
        }
        let defects = (0..self.n_det as u32)
            .filter(|&v| par[v as usize])
            .collect();
        Shot {
            flipped,
            defects,
            truth,
        }
    }
}

pub fn sample_shot(dem: &Dem, seed: u64, index: u64) -> Shot {
    Sampler::new(dem).shot(dem, seed, index)
}
