//! Logical-observable matching: one matching instance per observable, each on
//! the graph-like projection of the hypergraph onto the detectors that share
//! a location and type with the observable's observing edges.

mod splitting;

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use splitting::{splitting_decode, SplittingDecoder};

use crate::circuit::{
    find_reliable_completion, is_fragile, BareCircuit, MeasId, ObservableSpec, Realization,
};
use crate::dem::{xor_prob, Dem, MechanismKind, Noise};
use crate::detectors::Frame;
use crate::encode::Slot;
use crate::error::{Error, Result};
use crate::f2::ValuedBasis;
use crate::layout::CheckType;
use crate::matching::MatchGraph;
use crate::pauli::Pauli;

/// What to do with a projected hyperedge that still has more than two
/// endpoints (only possible for Y-type mechanisms under phenomenological
/// noise).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
pub enum SplitPolicy {
    /// Split into the edges of its X and Z components and fold the
    /// probability into them.
    Reweight,
    #[default]
    Drop,
}

/// Matching weight for an edge of probability `p`.
pub fn edge_weight(noise: Option<Noise>, p: f64) -> f64 {
    match noise {
        Some(Noise::Basic(_)) => 1.0,
        _ => log_weight(p),
    }
}

pub fn log_weight(p: f64) -> f64 {
    let p = p.clamp(1e-300, 0.5);
    ((1.0 - p) / p).ln().max(0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubEdge {
    /// Endpoints as local vertex indices; one endpoint means a boundary edge.
    pub ends: Vec<u32>,
    pub p: f64,
    pub weight: f64,
    /// Hyperedge ids projected onto this edge.
    pub sources: Vec<u32>,
    pub observing: bool,
    pub shortcut: bool,
}

#[derive(Debug)]
pub struct DecodingSubgraph {
    /// Declared observables whose product is decoded.
    pub observable: Vec<u32>,
    /// Sorted detector ids of V_O.
    pub vertices: Vec<u32>,
    local: Vec<u32>,
    pub edges: Vec<SubEdge>,
    /// Hyperedge ids of H_O.
    pub observing: Vec<u32>,
    graph: MatchGraph,
}

const ABSENT: u32 = u32::MAX;

impl DecodingSubgraph {
    pub fn local_index(&self, det: u32) -> Option<u32> {
        self.local
            .get(det as usize)
            .copied()
            .filter(|&v| v != ABSENT)
    }

    pub fn graph(&self) -> &MatchGraph {
        &self.graph
    }

    pub fn contains(&self, det: u32) -> bool {
        self.local_index(det).is_some()
    }

    /// Restricts a global defect list to local indices.
    pub fn restrict(&self, defects: &[u32]) -> Vec<u32> {
        defects
            .iter()
            .filter_map(|&d| self.local_index(d))
            .collect()
    }

    /// Rebuilds the matcher after `edges` was modified.
    pub fn rebuild(&mut self) -> Result<()> {
        self.graph = graph_of(self.vertices.len(), &self.edges)?;
        Ok(())
    }
}

fn graph_of(n: usize, edges: &[SubEdge]) -> Result<MatchGraph> {
    let raw = edges
        .iter()
        .enumerate()
        .map(|(k, e)| {
            (
                e.ends[0],
                e.ends.get(1).copied(),
                e.weight,
                e.observing as u64,
                vec![k as u32],
            )
        })
        .collect();
    MatchGraph::new(n, raw)
}

/// Hyperedges flipping the product of `observable`.
pub fn observing_set(dem: &Dem, observable: &[u32]) -> Vec<u32> {
    (0..dem.hyperedges.len() as u32)
        .filter(|&h| {
            let e = &dem.hyperedges[h as usize];
            observable.iter().filter(|&&k| e.flips(k)).count() % 2 == 1
        })
        .collect()
}

/// Record flips and the single-qubit X or Z errors of the basic model for
/// the frame.
fn is_elementary(kind: &MechanismKind, frame: Frame) -> bool {
    let slot_ok = |s: Slot| match frame {
        Frame::Pre => s == Slot::PreGate,
        Frame::Post => s == Slot::PreRound,
    };
    match kind {
        MechanismKind::Flip { .. } => true,
        MechanismKind::Data { slot, pauli, .. } => slot_ok(*slot) && *pauli != Pauli::Y,
    }
}

/// V_O: every detector whose (t, j, type) tag is carried by an endpoint of
/// an observing edge. Tags are read off observing edges with an elementary
/// source, so that composite errors (Y, or errors after a gate) are split
/// rather than widening V_O. Reset slices whose records are read by an
/// included detector are pulled in as well, so the reset time boundary
/// stays closed.
pub fn observable_vertices(dem: &Dem, observing: &[u32]) -> Vec<u32> {
    let elementary: Vec<u32> = observing
        .iter()
        .copied()
        .filter(|&h| {
            dem.hyperedges[h as usize].sources.iter().any(|&s| {
                dem.mechanisms
                    .get(s as usize)
                    .is_none_or(|m| is_elementary(&m.kind, dem.frame))
            })
        })
        .collect();
    let tagged = if elementary.is_empty() {
        observing
    } else {
        &elementary[..]
    };
    let mut tags: BTreeSet<(u32, u32, CheckType)> = BTreeSet::new();
    for &h in tagged {
        for &v in &dem.hyperedges[h as usize].dets {
            tags.insert(dem.detectors[v as usize].tag());
        }
    }
    let mut by_tag: HashMap<(u32, u32, CheckType), Vec<u32>> = HashMap::new();
    for d in &dem.detectors {
        by_tag.entry(d.tag()).or_default().push(d.id);
    }
    // reset singletons whose record is read by an included detector
    let mut read = HashSet::new();
    for t in &tags {
        for &i in &by_tag[t] {
            read.extend(dem.detectors[i as usize].records.iter().copied());
        }
    }
    let extra: Vec<_> = by_tag
        .iter()
        .filter(|(t, ids)| {
            !tags.contains(t)
                && ids
                    .iter()
                    .all(|&i| dem.detectors[i as usize].records.len() == 1)
                && ids
                    .iter()
                    .any(|&i| read.contains(&dem.detectors[i as usize].records[0]))
        })
        .map(|(t, _)| *t)
        .collect();
    tags.extend(extra);
    let mut out: Vec<u32> = tags
        .iter()
        .filter_map(|t| by_tag.get(t))
        .flatten()
        .copied()
        .collect();
    out.sort_unstable();
    out
}

/// Single-qubit X and Z components of every data mechanism, as hyperedge
/// ids. The pre-gate equivalent Pauli is split into pre-gate mechanisms of
/// the same layer; where those do not exist a Y splits into X and Z at its
/// own slot.
fn component_index(dem: &Dem) -> HashMap<u32, Vec<u32>> {
    let mut edge_of = vec![None; dem.mechanisms.len()];
    for (h, e) in dem.hyperedges.iter().enumerate() {
        for &s in &e.sources {
            edge_of[s as usize] = Some(h as u32);
        }
    }
    let mut by_kind = HashMap::new();
    for (i, m) in dem.mechanisms.iter().enumerate() {
        by_kind.insert(m.kind, i);
    }
    let n_data = (2 * dem.d * dem.d - 2 * dem.d + 1) as u32;
    let split = |p: Pauli| -> &'static [Pauli] {
        match p {
            Pauli::X => &[Pauli::X],
            Pauli::Z => &[Pauli::Z],
            Pauli::Y => &[Pauli::X, Pauli::Z],
        }
    };
    // None: some component is not a mechanism; inner None: its effect is empty
    let lookup = |kinds: Vec<MechanismKind>| -> Option<Vec<u32>> {
        let mut out = Vec::new();
        for k in kinds {
            let &i = by_kind.get(&k)?;
            out.extend(edge_of[i]);
        }
        Some(out)
    };
    let mut out = HashMap::new();
    for (i, m) in dem.mechanisms.iter().enumerate() {
        let MechanismKind::Data {
            layer,
            slot,
            j,
            qubit,
            pauli,
        } = m.kind
        else {
            continue;
        };
        let pre = dem
            .locators
            .get(i)
            .and_then(|l| l.as_ref())
            .and_then(|loc| {
                let kinds = loc
                    .pauli
                    .iter()
                    .flat_map(|(q, p)| {
                        split(p).iter().map(move |&c| MechanismKind::Data {
                            layer: loc.layer,
                            slot: Slot::PreGate,
                            j: q / n_data,
                            qubit: q % n_data,
                            pauli: c,
                        })
                    })
                    .collect();
                lookup(kinds)
            });
        let comps = pre.or_else(|| {
            (pauli == Pauli::Y).then(|| {
                lookup(
                    split(pauli)
                        .iter()
                        .map(|&c| MechanismKind::Data {
                            layer,
                            slot,
                            j,
                            qubit,
                            pauli: c,
                        })
                        .collect(),
                )
            })?
        });
        if let Some(c) = comps {
            // a mechanism that is its own only component cannot be split
            if !(c.len() == 1 && edge_of[i] == Some(c[0])) {
                out.insert(i as u32, c);
            }
        }
    }
    out
}

#[derive(Default)]
struct EdgeSet {
    index: HashMap<(Vec<u32>, bool), usize>,
    edges: Vec<SubEdge>,
}

impl EdgeSet {
    fn add(&mut self, ends: Vec<u32>, p: f64, h: u32, observing: bool) {
        match self.index.get(&(ends.clone(), observing)) {
            Some(&k) => {
                self.edges[k].p = xor_prob(self.edges[k].p, p);
                self.edges[k].sources.push(h);
            }
            None => {
                self.index
                    .insert((ends.clone(), observing), self.edges.len());
                self.edges.push(SubEdge {
                    ends,
                    p,
                    weight: 0.0,
                    sources: vec![h],
                    observing,
                    shortcut: false,
                });
            }
        }
    }
}

/// Projects every hyperedge accepted by `keep` onto `vertices`.
pub fn project(
    dem: &Dem,
    observable: Vec<u32>,
    vertices: Vec<u32>,
    observing: Vec<u32>,
    policy: SplitPolicy,
    keep: impl Fn(usize) -> bool,
) -> Result<DecodingSubgraph> {
    let mut local = vec![ABSENT; dem.n_detectors()];
    for (i, &v) in vertices.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let is_obs = {
        let mut f = vec![false; dem.hyperedges.len()];
        for &h in &observing {
            f[h as usize] = true;
        }
        f
    };
    let mut set = EdgeSet::default();
    let mut oversize = Vec::new();
    let mut components: Option<HashMap<u32, Vec<u32>>> = None;
    for (h, e) in dem.hyperedges.iter().enumerate() {
        if !keep(h) {
            continue;
        }
        let mut ends: Vec<u32> = e
            .dets
            .iter()
            .filter_map(|&v| Some(local[v as usize]).filter(|&x| x != ABSENT))
            .collect();
        if ends.is_empty() {
            continue;
        }
        ends.sort_unstable();
        if ends.len() > 2 {
            oversize.push(h);
            continue;
        }
        set.add(ends, e.p, h as u32, is_obs[h]);
    }
    for h in oversize {
        let e = &dem.hyperedges[h];
        let basic = matches!(dem.noise, Some(Noise::Basic(_)));
        if basic || policy == SplitPolicy::Drop {
            if basic {
                return Err(Error::NotAGraph {
                    hyperedge: h,
                    endpoints: e
                        .dets
                        .iter()
                        .filter(|&&v| local[v as usize] != ABSENT)
                        .count(),
                });
            }
            continue;
        }
        let comps = components.get_or_insert_with(|| component_index(dem));
        let mut parts = Vec::new();
        for &src in &e.sources {
            let Some(pair) = comps.get(&src) else {
                return Err(Error::NotAGraph {
                    hyperedge: h,
                    endpoints: e.dets.len(),
                });
            };
            for &c in pair {
                let mut part: Vec<u32> = dem.hyperedges[c as usize]
                    .dets
                    .iter()
                    .filter_map(|&v| Some(local[v as usize]).filter(|&x| x != ABSENT))
                    .collect();
                part.sort_unstable();
                if part.len() > 2 {
                    return Err(Error::NotAGraph {
                        hyperedge: c as usize,
                        endpoints: part.len(),
                    });
                }
                if !part.is_empty() {
                    parts.push((part, is_obs[c as usize]));
                }
            }
            // merged sources share one effect, so one decomposition suffices
            break;
        }
        for (part, f) in parts {
            set.add(part, e.p, h as u32, f);
        }
    }
    let mut edges = set.edges;
    for e in &mut edges {
        e.weight = edge_weight(dem.noise, e.p);
        e.sources.sort_unstable();
        e.sources.dedup();
    }
    let graph = graph_of(vertices.len(), &edges)?;
    Ok(DecodingSubgraph {
        observable,
        vertices,
        local,
        edges,
        observing,
        graph,
    })
}

/// G_O for the product of the declared observables in `observable`.
pub fn extract_subgraph(
    dem: &Dem,
    observable: &[u32],
    policy: SplitPolicy,
) -> Result<DecodingSubgraph> {
    for &k in observable {
        if k as usize >= dem.n_observables() {
            return Err(Error::Invalid(format!("observable L{k} is not declared")));
        }
    }
    let mut obs = observable.to_vec();
    obs.sort_unstable();
    let observing = observing_set(dem, &obs);
    let vertices = observable_vertices(dem, &observing);
    project(dem, obs, vertices, observing, policy, |_| true)
}

/// Parity of observing edges in the minimum-weight correction.
pub fn single_lom_decode(sub: &DecodingSubgraph, defects: &[u32]) -> Result<bool> {
    let local = sub.restrict(defects);
    Ok(sub.graph.decode_flags(&local)? & 1 == 1)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Method {
    Decoded,
    Inferred,
    CoinToss,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Decoded,
    CoinToss,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub spec: ObservableSpec,
    pub kind: GeneratorKind,
}

/// Independent generating set: requested reliable products first, then one
/// generator per measurement not yet spanned, walking in time order.
/// Fragile measurements are completed against earlier coin-tossed ones when
/// possible and coin-tossed otherwise.
pub fn choose_generating_set(
    c: &BareCircuit,
    r: &Realization,
    requests: &[ObservableSpec],
) -> Result<Vec<Generator>> {
    let n = c.n_measurements();
    let mut span = ValuedBasis::new();
    let mut gens = Vec::new();
    for o in requests {
        for &id in o.ids() {
            c.measurement(id)?;
        }
        if is_fragile(c, o, r)?.0 {
            continue;
        }
        if span.insert(&o.to_bits(n), false) {
            gens.push(Generator {
                spec: o.clone(),
                kind: GeneratorKind::Decoded,
            });
        }
    }
    let mut tossed: Vec<ObservableSpec> = Vec::new();
    for id in 1..=n as MeasId {
        let o = ObservableSpec::single(id);
        let bits = o.to_bits(n);
        if span.value(&bits).is_some() {
            continue;
        }
        if !is_fragile(c, &o, r)?.0 {
            span.insert(&bits, false);
            gens.push(Generator {
                spec: o,
                kind: GeneratorKind::Decoded,
            });
            continue;
        }
        match find_reliable_completion(c, &o, &tossed, r)? {
            Some(idx) => {
                let mut spec = o;
                for i in idx {
                    spec = spec
                        .product(&tossed[i])
                        .ok_or_else(|| Error::Invalid("empty completion".into()))?;
                }
                span.insert(&spec.to_bits(n), false);
                gens.push(Generator {
                    spec,
                    kind: GeneratorKind::Decoded,
                });
            }
            None => {
                span.insert(&bits, false);
                tossed.push(o.clone());
                gens.push(Generator {
                    spec: o,
                    kind: GeneratorKind::CoinToss,
                });
            }
        }
    }
    Ok(gens)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LomPrediction {
    /// Predicted flip of each measurement, indexed by id − 1.
    pub flips: Vec<bool>,
    pub methods: Vec<Method>,
    /// Predicted flip of each requested product.
    pub requested: Vec<bool>,
}

/// Precomputed generators and their decoding subgraphs. The DEM must declare
/// observable `L{i}` as measurement `m{i+1}` for every measurement.
#[derive(Debug)]
pub struct LomPlan {
    n_meas: usize,
    pub generators: Vec<Generator>,
    subgraphs: Vec<Option<DecodingSubgraph>>,
    pub requests: Vec<ObservableSpec>,
    methods: Vec<Method>,
}

impl LomPlan {
    pub fn new(
        dem: &Dem,
        c: &BareCircuit,
        r: &Realization,
        requests: &[ObservableSpec],
        policy: SplitPolicy,
    ) -> Result<LomPlan> {
        let n = c.n_measurements();
        if dem.n_observables() != n {
            return Err(Error::Invalid(format!(
                "expected one declared observable per measurement ({n}), found {}",
                dem.n_observables()
            )));
        }
        let generators = choose_generating_set(c, r, requests)?;
        let subgraphs = generators
            .iter()
            .map(|g| match g.kind {
                GeneratorKind::Decoded => {
                    let obs: Vec<u32> = g.spec.ids().iter().map(|&i| i - 1).collect();
                    extract_subgraph(dem, &obs, policy).map(Some)
                }
                GeneratorKind::CoinToss => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        let methods = (1..=n as MeasId)
            .map(|id| {
                let single = ObservableSpec::single(id);
                match generators.iter().find(|g| g.spec == single) {
                    Some(g) if g.kind == GeneratorKind::CoinToss => Method::CoinToss,
                    Some(_) => Method::Decoded,
                    None => Method::Inferred,
                }
            })
            .collect();
        Ok(LomPlan {
            n_meas: n,
            generators,
            subgraphs,
            requests: requests.to_vec(),
            methods,
        })
    }

    pub fn subgraph(&self, g: usize) -> Option<&DecodingSubgraph> {
        self.subgraphs[g].as_ref()
    }

    /// Generator values for one syndrome. Coin tosses draw from a stream
    /// keyed by `seed`.
    pub fn generator_values(&self, defects: &[u32], seed: u64) -> Result<Vec<bool>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.subgraphs
            .iter()
            .map(|s| match s {
                Some(sub) => single_lom_decode(sub, defects),
                None => Ok(rng.gen::<bool>()),
            })
            .collect()
    }

    fn basis(&self, values: &[bool]) -> ValuedBasis {
        let mut b = ValuedBasis::new();
        for (g, &v) in self.generators.iter().zip(values) {
            b.insert(&g.spec.to_bits(self.n_meas), v);
        }
        b
    }

    /// Predicted flips of the requested products only.
    pub fn decode_requested(&self, defects: &[u32], seed: u64) -> Result<Vec<bool>> {
        let vals = self.generator_values(defects, seed)?;
        let basis = self.basis(&vals);
        self.requests
            .iter()
            .map(|o| self.value(&basis, o))
            .collect()
    }

    fn value(&self, basis: &ValuedBasis, o: &ObservableSpec) -> Result<bool> {
        basis.value(&o.to_bits(self.n_meas)).ok_or_else(|| {
            Error::Invalid(format!(
                "observable {:?} is outside the decoded span",
                o.ids()
            ))
        })
    }

    pub fn decode(&self, defects: &[u32], seed: u64) -> Result<LomPrediction> {
        let vals = self.generator_values(defects, seed)?;
        let basis = self.basis(&vals);
        let flips = (1..=self.n_meas as MeasId)
            .map(|id| self.value(&basis, &ObservableSpec::single(id)))
            .collect::<Result<Vec<_>>>()?;
        let requested = self
            .requests
            .iter()
            .map(|o| self.value(&basis, o))
            .collect::<Result<Vec<_>>>()?;
        Ok(LomPrediction {
            flips,
            methods: self.methods.clone(),
            requested,
        })
    }
}

/// One-shot convenience: plans, then decodes a single syndrome.
pub fn lom_decode(
    dem: &Dem,
    c: &BareCircuit,
    r: &Realization,
    defects: &[u32],
    requests: &[ObservableSpec],
    seed: u64,
) -> Result<LomPrediction> {
    LomPlan::new(dem, c, r, requests, SplitPolicy::default())?.decode(defects, seed)
}

/// Defects produced by flipping a set of hyperedges.
pub fn syndrome_of(dem: &Dem, hyperedges: &[usize]) -> Vec<u32> {
    let mut v: Vec<u32> = hyperedges
        .iter()
        .flat_map(|&h| dem.hyperedges[h].dets.iter().copied())
        .collect();
    v.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut k = i;
        while k < v.len() && v[k] == v[i] {
            k += 1;
        }
        if (k - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = k;
    }
    out
}

/// True flip of each declared observable for a set of hyperedges.
pub fn true_flips(dem: &Dem, hyperedges: &[usize]) -> Vec<bool> {
    let mut f = vec![false; dem.n_observables()];
    for &h in hyperedges {
        for &k in &dem.hyperedges[h].obs {
            f[k as usize] ^= true;
        }
    }
    f
}

/// Flip of a product observable given per-measurement flips.
pub fn product_flip(flips: &[bool], o: &ObservableSpec) -> bool {
    o.ids()
        .iter()
        .fold(false, |a, &id| a ^ flips[id as usize - 1])
}
