use std::collections::HashMap;

use crate::dem::Dem;
use crate::error::{Error, Result};
use crate::lom::{observable_vertices, observing_set};

#[derive(Clone, Debug, PartialEq)]
pub enum DistanceMode {
    /// Empty full syndrome and a flip of at least one listed product of
    /// declared observables.
    Circuit(Vec<Vec<u32>>),
    /// Empty syndrome on V_O and odd observing parity for one product.
    Lom(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceResult {
    pub weight: usize,
    /// Hyperedge ids of a minimum witness.
    pub witness: Vec<usize>,
}

fn binom(n: usize, k: usize) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n as u128 - i) / (i + 1);
    }
    r
}

type Sig = (Vec<u32>, u64);

fn xor_sig(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// Restricted syndrome -> observable mask -> one subset reaching it.
type Table = HashMap<Vec<u32>, HashMap<u64, Vec<usize>>>;

fn all_subsets(sigs: &[Sig], k: usize) -> Table {
    let mut table = Table::new();
    let n = sigs.len();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return table;
    }
    loop {
        let (syn, m) = idx.iter().fold((Vec::new(), 0u64), |(s, m), &i| {
            (xor_sig(&s, &sigs[i].0), m ^ sigs[i].1)
        });
        table
            .entry(syn)
            .or_default()
            .entry(m)
            .or_insert_with(|| idx.clone());
        // next combination in lexicographic order
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return table;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimum number of mechanisms forming an undetectable logical error, by
/// meet-in-the-middle enumeration of hyperedge subsets up to `max_weight`.
/// Each hyperedge stands for its lightest mechanism.
pub fn brute_force_distance(
    dem: &Dem,
    max_weight: usize,
    mode: &DistanceMode,
    budget: u128,
) -> Result<Option<DistanceResult>> {
    // relevant hyperedges and their restricted signatures
    let (sigs, which): (Vec<Sig>, Vec<usize>) = match mode {
        DistanceMode::Circuit(products) => {
            if products.len() > 64 {
                return Err(Error::Unsupported("more than 64 products".into()));
            }
            dem.hyperedges
                .iter()
                .enumerate()
                .filter_map(|(h, e)| {
                    let m = products.iter().enumerate().fold(0u64, |m, (i, p)| {
                        let odd = p.iter().filter(|&&k| e.flips(k)).count() % 2 == 1;
                        m | (odd as u64) << i
                    });
                    (!e.dets.is_empty() || m != 0).then(|| ((e.dets.clone(), m), h))
                })
                .unzip()
        }
        DistanceMode::Lom(obs) => {
            let observing = observing_set(dem, obs);
            let v = observable_vertices(dem, &observing);
            let mut inv = vec![false; dem.n_detectors()];
            for &x in &v {
                inv[x as usize] = true;
            }
            let mut flag = vec![false; dem.hyperedges.len()];
            for &h in &observing {
                flag[h as usize] = true;
            }
            dem.hyperedges
                .iter()
                .enumerate()
                .filter_map(|(h, e)| {
                    let dets: Vec<u32> = e
                        .dets
                        .iter()
                        .copied()
                        .filter(|&x| inv[x as usize])
                        .collect();
                    (!dets.is_empty() || flag[h]).then(|| ((dets, flag[h] as u64), h))
                })
                .unzip()
        }
    };
    let n = sigs.len();
    let half_hi = max_weight.div_ceil(2);
    let required: u128 = (1..=half_hi).map(|k| binom(n, k)).sum();
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    // tables[k]: restricted syndrome -> (observable mask -> one subset)
    let mut tables: Vec<Table> = vec![all_subsets(&sigs, 0)];
    let lookup = |tables: &[Table], a: usize, b: usize| -> Option<Vec<usize>> {
        for (syn, masks) in &tables[a] {
            let Some(other) = tables[b].get(syn) else {
                continue;
            };
            for (ma, sa) in masks {
                for (mb, sb) in other {
                    if ma != mb {
                        let mut w: Vec<usize> = sa.iter().chain(sb).copied().collect();
                        w.sort_unstable();
                        return Some(w);
                    }
                }
            }
        }
        None
    };
    for w in 1..=max_weight {
        let (a, b) = (w / 2, w - w / 2);
        while tables.len() <= b {
            let k = tables.len();
            tables.push(all_subsets(&sigs, k));
        }
        if let Some(found) = lookup(&tables, a, b) {
            // halves are disjoint here: an overlap would cancel into a
            // lighter solution, found at an earlier weight
            return Ok(Some(DistanceResult {
                weight: w,
                witness: found.into_iter().map(|i| which[i]).collect(),
            }));
        }
    }
    Ok(None)
}
