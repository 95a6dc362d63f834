//! Sliding-window LOM decoding for circuits with slow resets.
//!
//! Windows are laid out on the bare circuit. Each window runs one matching
//! instance per single-qubit X̄ or Z̄ at its center, commits the time-like
//! edges crossing the center and advances a logical Pauli frame. Logical
//! measurements are decoded as they happen, from the last committed center.

mod shortcut;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

pub use shortcut::{add_shortcut_edges, relabel, ShortCutConfig, VertexLabel};

use crate::circuit::{
    Activity, BareCircuit, Element, MeasId, Op, PauliRegion, Realization, ResetKind,
};
use crate::dem::Dem;
use crate::error::{Error, Result};
use crate::harness::{Experiment, ShotDecoder};
use crate::lom::{observable_vertices, product_flip, project, DecodingSubgraph, SplitPolicy};
use crate::pauli::{conjugate, Direction, Pauli, PauliString, Qubit};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Window {
    pub t_prev: usize,
    pub t_center: usize,
    pub t_current: usize,
}

/// Quiescent stretch after a reset during which the qubit only idles, so its
/// tracks are the single-qubit memory tracks of ordinary sliding-window
/// matching.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct PreWindow {
    pub qubit: Qubit,
    pub reset_layer: usize,
    pub until: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct WindowPlan {
    pub d: usize,
    pub commit_width: usize,
    pub buffer_width: usize,
    pub slow_reset_factor: usize,
    pub synchronize: bool,
    pub n_layers: usize,
    pub boundaries: Vec<usize>,
    pub windows: Vec<Window>,
    pub pre_windows: Vec<PreWindow>,
}

/// Layer of the last reset of `q` before location `t`, with its kind.
fn last_reset(c: &BareCircuit, q: Qubit, t: usize) -> Option<(usize, ResetKind)> {
    (0..t.min(c.n_layers())).rev().find_map(|l| {
        c.layer(l).iter().find_map(|e| match e {
            Element::Reset(k, r) if *r == q => Some((l, *k)),
            _ => None,
        })
    })
}

fn is_injection(c: &BareCircuit, q: Qubit, t: usize) -> bool {
    matches!(last_reset(c, q, t), Some((_, ResetKind::T)))
}

fn entangles(e: &Element, q: Qubit) -> bool {
    match e {
        Element::Gate(Op::Two(_, a, b)) | Element::Cond(Op::Two(_, a, b), _) => *a == q || *b == q,
        _ => false,
    }
}

/// Checks widths, slow resets and (optionally) synchronization, then lays
/// out windows with centers every `commit_width` rounds.
pub fn plan_windows(
    c: &BareCircuit,
    r: &Realization,
    d: usize,
    commit_width: usize,
    buffer_width: usize,
    slow_reset_factor: usize,
    synchronize: bool,
) -> Result<WindowPlan> {
    for (name, w) in [("commit", commit_width), ("buffer", buffer_width)] {
        if 2 * w <= d {
            return Err(Error::Window(format!(
                "{name} width {w} must exceed d/2 = {}",
                d as f64 / 2.0
            )));
        }
    }
    let n_layers = c.n_layers();
    let mut pre_windows = Vec::new();
    for (l, layer) in c.layers().iter().enumerate() {
        for e in layer {
            let Element::Reset(kind, q) = e else { continue };
            if *kind == ResetKind::T {
                continue;
            }
            let earliest = l + slow_reset_factor * d;
            for g in l + 1..n_layers {
                let row = c.layer(g);
                if row
                    .iter()
                    .any(|e| matches!(e, Element::Measure(_, m) if m == q))
                {
                    break;
                }
                if row.iter().any(|e| entangles(e, *q)) {
                    if g < earliest {
                        return Err(Error::Window(format!(
                            "reset of q{q} in layer {l} is followed by an entangling gate in layer {g}; \
                             the earliest legal gate layer is {earliest}"
                        )));
                    }
                    break;
                }
            }
            pre_windows.push(PreWindow {
                qubit: *q,
                reset_layer: l,
                until: earliest.min(n_layers),
            });
        }
    }
    let mut windows = Vec::new();
    let mut t_prev = 0;
    while t_prev + commit_width < n_layers {
        let t_center = t_prev + commit_width;
        windows.push(Window {
            t_prev,
            t_center,
            t_current: (t_center + buffer_width).min(n_layers),
        });
        t_prev = t_center;
    }
    let mut boundaries: Vec<usize> = windows
        .iter()
        .flat_map(|w| [w.t_prev, w.t_center, w.t_current])
        .collect();
    boundaries.sort_unstable();
    boundaries.dedup();
    let plan = WindowPlan {
        d,
        commit_width,
        buffer_width,
        slow_reset_factor,
        synchronize,
        n_layers,
        boundaries,
        windows,
        pre_windows,
    };
    if synchronize {
        check_synchronized(c, &plan)?;
    }
    check_forward_boundaries(c, r, &plan)?;
    Ok(plan)
}

fn check_synchronized(c: &BareCircuit, plan: &WindowPlan) -> Result<()> {
    let on_grid = |t: usize| t % plan.commit_width == 0;
    for (l, layer) in c.layers().iter().enumerate() {
        for e in layer {
            match e {
                Element::Reset(k, q) if *k != ResetKind::T && !on_grid(l) => {
                    return Err(Error::Window(format!(
                        "reset of q{q} in layer {l} is not at a window boundary"
                    )));
                }
                Element::Measure(_, q) if !is_injection(c, *q, l) && !on_grid(l + 1) => {
                    return Err(Error::Window(format!(
                        "measurement of q{q} in layer {l} is not in the last round before a window boundary"
                    )));
                }
                _ => {}
            }
        }
    }
    Ok(())
}

/// Rejects plans where a forward track ends on an anticommuting measurement
/// no more than d/2 rounds after its center. Measurements in the final layer
/// are exempt, since no later window reads the artificial defects such a
/// track leaves behind, and so are T-injection measurements.
fn check_forward_boundaries(c: &BareCircuit, r: &Realization, plan: &WindowPlan) -> Result<()> {
    let act = c.activity();
    for w in &plan.windows {
        for j in active_at(&act, w.t_center) {
            for p in [Pauli::X, Pauli::Z] {
                let (_, fragile) = track_region(c, r, &act, j, p, w)?;
                for (id, m) in fragile {
                    let q = c.measurement(id)?.qubit;
                    if !is_injection(c, q, m)
                        && m + 1 < plan.n_layers
                        && 2 * (m + 1 - w.t_center) <= plan.d
                    {
                        return Err(Error::Window(format!(
                            "measurement m{id} in layer {m} is a fragile boundary of the {p} track of q{j} \
                             centered at {}; synchronize measurements with the window boundaries",
                            w.t_center
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn active_at(act: &[Vec<Activity>], t: usize) -> Vec<Qubit> {
    act.get(t)
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, a)| matches!(a, Activity::Busy | Activity::Measure(_)))
                .map(|(q, _)| q as Qubit)
                .collect()
        })
        .unwrap_or_default()
}

/// Slices `start..hi` of the forward propagation of `p` from location
/// `start`; measured qubits leave after their slice.
fn forward_slices(
    c: &BareCircuit,
    r: &Realization,
    act: &[Vec<Activity>],
    start: usize,
    p: PauliString,
    hi: usize,
    out: &mut PauliRegion,
) -> Result<()> {
    let mut cur = p;
    for t in start..hi {
        out.put_slice(t, &cur);
        for (q, a) in act[t].iter().enumerate() {
            if matches!(a, Activity::Measure(_)) {
                cur.remove(q as Qubit);
            }
        }
        cur = conjugate(&cur, &c.clifford_layer(t, r)?, Direction::Forward);
    }
    Ok(())
}

/// Region of a single-qubit `p` on `j` placed at the window center,
/// propagated back to `t_prev` and forward to `t_current`. Forward parts
/// that end on an anticommuting measurement of an injected |T̄⟩ are peeled
/// onto the preparation by multiplying in its propagated X̄, Z̄ or Ȳ. The
/// anticommuting measurements that remain are returned as `(id, layer)`.
fn track_region(
    c: &BareCircuit,
    r: &Realization,
    act: &[Vec<Activity>],
    j: Qubit,
    p: Pauli,
    w: &Window,
) -> Result<(PauliRegion, Vec<(MeasId, usize)>)> {
    let mut region = PauliRegion::new();
    let mut cur = PauliString::single(j, p);
    for t in (w.t_prev..w.t_center).rev() {
        for (q, a) in act[t].iter().enumerate() {
            if matches!(a, Activity::Reset(_)) {
                cur.remove(q as Qubit);
            }
        }
        cur = conjugate(&cur, &c.clifford_layer(t, r)?, Direction::Backward);
        region.put_slice(t, &cur);
    }
    let mut fwd = PauliRegion::new();
    forward_slices(
        c,
        r,
        act,
        w.t_center,
        PauliString::single(j, p),
        w.t_current,
        &mut fwd,
    )?;
    let anti = |reg: &PauliRegion| -> Vec<(MeasId, usize, Qubit, Pauli)> {
        (w.t_center..w.t_current)
            .flat_map(|t| c.measurements_in(t).map(move |(id, m)| (id, t, m)))
            .filter(|(_, t, m)| {
                reg.get(*t, m.qubit)
                    .is_some_and(|x| !x.commutes(m.basis.pauli()))
            })
            .map(|(id, t, m)| (id, t, m.qubit, m.basis.pauli()))
            .collect()
    };
    for (_, m, q, basis) in anti(&fwd) {
        let Some((rt, ResetKind::T)) = last_reset(c, q, m) else {
            continue;
        };
        if rt < w.t_center {
            continue;
        }
        for peel in [Pauli::X, Pauli::Z, Pauli::Y] {
            let mut prep = PauliRegion::new();
            forward_slices(
                c,
                r,
                act,
                rt + 1,
                PauliString::single(q, peel),
                w.t_current,
                &mut prep,
            )?;
            let cand = fwd.multiply(&prep);
            if cand.get(m, q).is_none_or(|x| x.commutes(basis)) {
                fwd = cand;
                break;
            }
        }
    }
    let fragile = anti(&fwd)
        .into_iter()
        .map(|(id, t, _, _)| (id, t))
        .collect();
    Ok((region.multiply(&fwd), fragile))
}

/// Bare logical content of physical errors: for each mechanism with a
/// locator, its location and the bare Pauli it applies there.
pub struct WindowModel<'a> {
    pub exp: &'a Experiment,
    effects: Vec<Option<(usize, PauliString)>>,
    act: Vec<Vec<Activity>>,
}

impl<'a> WindowModel<'a> {
    pub fn new(exp: &'a Experiment) -> Result<Self> {
        let dem = &exp.dem;
        if dem.locators.len() != dem.mechanisms.len() {
            return Err(Error::Invalid(
                "windowed decoding needs a DEM built from its circuit".into(),
            ));
        }
        let enc = &exp.encoded;
        let n = enc.layout.n_data();
        let mut in_x = vec![false; n];
        let mut in_z = vec![false; n];
        for &q in &enc.layout.logical_x {
            in_x[q as usize] = true;
        }
        for &q in &enc.layout.logical_z {
            in_z[q as usize] = true;
        }
        let hyper_effect = |h: &crate::dem::Hyperedge| {
            h.sources
                .iter()
                .find_map(|&s| dem.locators[s as usize].as_ref())
                .map(|loc| {
                    let mut bits: BTreeMap<u32, (bool, bool)> = BTreeMap::new();
                    for (q, p) in loc.pauli.iter() {
                        let (j, i) = enc.locate(q);
                        let e = bits.entry(j).or_default();
                        // X̄ meets Z errors on its support and Z̄ meets X errors
                        e.0 ^= p.has_x() && in_z[i as usize];
                        e.1 ^= p.has_z() && in_x[i as usize];
                    }
                    (
                        loc.layer,
                        PauliString::from_bits(bits.into_iter().map(|(j, (x, z))| (j, x, z))),
                    )
                })
        };
        let effects = dem.hyperedges.iter().map(hyper_effect).collect();
        Ok(WindowModel {
            exp,
            effects,
            act: exp.bare.activity(),
        })
    }

    pub fn dem(&self) -> &Dem {
        &self.exp.dem
    }

    /// Location and bare logical Pauli of hyperedge `h`, if it has any.
    pub fn effect(&self, h: usize) -> Option<&(usize, PauliString)> {
        self.effects[h].as_ref()
    }

    fn observing(&self, region: &PauliRegion, lo: usize, hi: usize) -> Vec<(u32, usize)> {
        (0..self.effects.len())
            .filter_map(|h| {
                let (l, e) = self.effects[h].as_ref()?;
                (*l >= lo && *l < hi && !e.commutes(&region.at(*l))).then_some((h as u32, *l))
            })
            .collect()
    }

    /// Decoding subgraph over detectors in `lo..hi` for `region`. Hyperedges
    /// reaching before `lo` are dropped (closed past); detectors at or after
    /// `hi` are absent, so edges into them end on the boundary. Only
    /// observing edges located before `commit_end` are flagged.
    fn subgraph(
        &self,
        observable: Vec<u32>,
        region: &PauliRegion,
        lo: usize,
        commit_end: usize,
        hi: usize,
        policy: SplitPolicy,
    ) -> Result<DecodingSubgraph> {
        let dem = self.dem();
        let in_past = |h: usize| {
            dem.hyperedges[h]
                .dets
                .iter()
                .any(|&v| (dem.detectors[v as usize].t as usize) < lo)
        };
        let obs: Vec<(u32, usize)> = self
            .observing(region, lo, hi)
            .into_iter()
            .filter(|&(h, _)| !in_past(h as usize))
            .collect();
        let all: Vec<u32> = obs.iter().map(|o| o.0).collect();
        let flagged: Vec<u32> = obs
            .iter()
            .filter(|o| o.1 < commit_end)
            .map(|o| o.0)
            .collect();
        let vertices: Vec<u32> = observable_vertices(dem, &all)
            .into_iter()
            .filter(|&v| {
                let t = dem.detectors[v as usize].t as usize;
                t >= lo && t < hi
            })
            .collect();
        project(dem, observable, vertices, flagged, policy, |h| !in_past(h))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum TrackKind {
    Window { qubit: Qubit, pauli: Pauli },
    Measurement { id: MeasId },
}

#[derive(Debug)]
pub struct Track {
    pub kind: TrackKind,
    /// Detector times `lo..hi`; for window tracks `center` is the window
    /// center, for measurement tracks it equals `hi`.
    pub lo: usize,
    pub center: usize,
    pub hi: usize,
    pub region: PauliRegion,
    pub sub: DecodingSubgraph,
}

/// The 2k tracks of window `idx`, one per X̄ or Z̄ of each qubit active at
/// the center.
pub fn window_tracks(
    model: &WindowModel,
    plan: &WindowPlan,
    idx: usize,
    policy: SplitPolicy,
    shortcut: &ShortCutConfig,
) -> Result<Vec<Track>> {
    let w = plan
        .windows
        .get(idx)
        .ok_or_else(|| Error::Invalid(format!("window {idx} is not in the plan")))?;
    let c = &model.exp.bare;
    let r = &model.exp.realization;
    let mut out = Vec::new();
    for j in active_at(&model.act, w.t_center) {
        for p in [Pauli::X, Pauli::Z] {
            let (region, _) = track_region(c, r, &model.act, j, p, w)?;
            let mut sub =
                model.subgraph(vec![], &region, w.t_prev, w.t_center, w.t_current, policy)?;
            if shortcut.enabled {
                sub = add_shortcut_edges(model.dem(), sub, shortcut)?;
            }
            out.push(Track {
                kind: TrackKind::Window { qubit: j, pauli: p },
                lo: w.t_prev,
                center: w.t_center,
                hi: w.t_current,
                region,
                sub,
            });
        }
    }
    Ok(out)
}

/// Track of measurement `id` back to the committed frontier `lo`.
pub fn measurement_track(
    model: &WindowModel,
    id: MeasId,
    lo: usize,
    policy: SplitPolicy,
    shortcut: &ShortCutConfig,
) -> Result<Track> {
    let c = &model.exp.bare;
    let r = &model.exp.realization;
    let m = c.measurement(id)?;
    let mut region = PauliRegion::new();
    let mut cur = PauliString::single(m.qubit, m.basis.pauli());
    region.put_slice(m.layer, &cur);
    for t in (lo..m.layer).rev() {
        for (q, a) in model.act[t].iter().enumerate() {
            if matches!(a, Activity::Reset(_)) {
                cur.remove(q as Qubit);
            }
        }
        cur = conjugate(&cur, &c.clifford_layer(t, r)?, Direction::Backward);
        region.put_slice(t, &cur);
    }
    let hi = m.layer + 1;
    let mut sub = model.subgraph(vec![id - 1], &region, lo, hi, hi, policy)?;
    if shortcut.enabled {
        sub = add_shortcut_edges(model.dem(), sub, shortcut)?;
    }
    Ok(Track {
        kind: TrackKind::Measurement { id },
        lo,
        center: hi,
        hi,
        region,
        sub,
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CommittedEdge {
    pub window: usize,
    pub track: usize,
    /// Detector ids of the committed edge's endpoints.
    pub ends: Vec<u32>,
}

/// Decoder state carried between windows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CommitState {
    /// Latest committed center; the frame refers to this location.
    pub frontier: usize,
    /// Estimated bare logical error at the frontier.
    pub frame: PauliString,
    /// Detector parity adjustments (artificial defects).
    pub ledger: Vec<bool>,
    pub committed: Vec<CommittedEdge>,
    pub outcomes: BTreeMap<MeasId, bool>,
}

impl CommitState {
    pub fn new(n_detectors: usize) -> Self {
        CommitState {
            frontier: 0,
            frame: PauliString::identity(),
            ledger: vec![false; n_detectors],
            committed: Vec::new(),
            outcomes: BTreeMap::new(),
        }
    }

    /// Cumulative flip of `p` on qubit `j` up to the frontier.
    pub fn frame_bit(&self, j: Qubit, p: Pauli) -> bool {
        !self.frame.commutes(&PauliString::single(j, p))
    }

    fn advance(
        &mut self,
        c: &BareCircuit,
        r: &Realization,
        act: &[Vec<Activity>],
        to: usize,
    ) -> Result<()> {
        for t in self.frontier..to {
            for (q, a) in act[t].iter().enumerate() {
                if matches!(a, Activity::Measure(_) | Activity::Reset(_)) {
                    self.frame.remove(q as Qubit);
                }
            }
            self.frame = conjugate(&self.frame, &c.clifford_layer(t, r)?, Direction::Forward);
        }
        self.frontier = to;
        Ok(())
    }
}

struct TrackOutcome {
    bit: bool,
    /// Endpoints of edges crossing the center, on the later side.
    flips: Vec<u32>,
    ends: Vec<Vec<u32>>,
}

fn run_track(dem: &Dem, tr: &Track, defects: &[bool], ledger: &[bool]) -> Result<TrackOutcome> {
    let sub = &tr.sub;
    let local: Vec<u32> = sub
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, &v)| defects[v as usize] ^ ledger[v as usize])
        .map(|(i, _)| i as u32)
        .collect();
    let sol = sub.graph().decode(&local)?;
    let time = |i: u32| dem.detectors[sub.vertices[i as usize] as usize].t as usize;
    let mut flips = Vec::new();
    let mut ends = Vec::new();
    for &e in &sol.edges {
        let me = &sub.graph().edges()[e as usize];
        let vs: Vec<u32> = std::iter::once(me.u).chain(me.v).collect();
        if vs.iter().any(|&i| time(i) < tr.center) && vs.iter().any(|&i| time(i) >= tr.center) {
            let later: Vec<u32> = vs
                .iter()
                .filter(|&&i| time(i) >= tr.center)
                .map(|&i| sub.vertices[i as usize])
                .collect();
            flips.extend_from_slice(&later);
            ends.push(vs.iter().map(|&i| sub.vertices[i as usize]).collect());
        }
    }
    Ok(TrackOutcome {
        bit: sol.flags & 1 == 1,
        flips,
        ends,
    })
}

/// Runs the tracks of window `idx`: commits the edges crossing the center
/// into the ledger and advances the frame to the center.
pub fn decode_window(
    model: &WindowModel,
    idx: usize,
    tracks: &[Track],
    defects: &[bool],
    state: &mut CommitState,
) -> Result<()> {
    let dem = model.dem();
    let outcomes: Vec<TrackOutcome> = tracks
        .par_iter()
        .map(|tr| run_track(dem, tr, defects, &state.ledger))
        .collect::<Result<_>>()?;
    let center = tracks.first().map(|t| t.center);
    if let Some(center) = center {
        state.advance(&model.exp.bare, &model.exp.realization, &model.act, center)?;
    }
    for (k, (tr, o)) in tracks.iter().zip(outcomes).enumerate() {
        for v in o.flips {
            state.ledger[v as usize] ^= true;
        }
        for ends in o.ends {
            state.committed.push(CommittedEdge {
                window: idx,
                track: k,
                ends,
            });
        }
        if let TrackKind::Window { qubit, pauli } = tr.kind {
            if o.bit {
                // an X̄ flip is a Z error and vice versa
                let err = if pauli == Pauli::X {
                    Pauli::Z
                } else {
                    Pauli::X
                };
                state.frame.mul_at(qubit, err);
            }
        }
    }
    Ok(())
}

/// Outcome flip of a measurement from its track and the committed frame,
/// without committing any edge.
pub fn decode_measurement_immediate(
    model: &WindowModel,
    track: &Track,
    defects: &[bool],
    state: &mut CommitState,
) -> Result<bool> {
    let TrackKind::Measurement { id } = track.kind else {
        return Err(Error::Invalid("not a measurement track".into()));
    };
    if track.lo != state.frontier {
        return Err(Error::Invalid(format!(
            "measurement track starts at {} but the frontier is {}",
            track.lo, state.frontier
        )));
    }
    let o = run_track(model.dem(), track, defects, &state.ledger)?;
    let flip = o.bit ^ !state.frame.commutes(&track.region.at(track.lo));
    state.outcomes.insert(id, flip);
    Ok(flip)
}

/// Precomputed tracks for a whole circuit.
pub struct WindowedDecoder<'a> {
    pub model: WindowModel<'a>,
    pub plan: WindowPlan,
    pub tracks: Vec<Vec<Track>>,
    /// Measurement tracks in decoding order, each with the number of windows
    /// run before it.
    pub measurements: Vec<(usize, Track)>,
    pub requests: Vec<crate::circuit::ObservableSpec>,
}

impl<'a> WindowedDecoder<'a> {
    pub fn new(
        exp: &'a Experiment,
        plan: WindowPlan,
        policy: SplitPolicy,
        shortcut: ShortCutConfig,
    ) -> Result<Self> {
        let model = WindowModel::new(exp)?;
        let tracks = (0..plan.windows.len())
            .map(|i| window_tracks(&model, &plan, i, policy, &shortcut))
            .collect::<Result<Vec<_>>>()?;
        let mut order: Vec<MeasId> = (1..=exp.bare.n_measurements() as MeasId).collect();
        order.sort_by_key(|&id| (exp.bare.measurements()[id as usize - 1].layer, id));
        let measurements = order
            .into_iter()
            .map(|id| {
                let m = exp.bare.measurements()[id as usize - 1].layer;
                let before = plan.windows.iter().take_while(|w| w.t_current <= m).count();
                let lo = if before == 0 {
                    0
                } else {
                    plan.windows[before - 1].t_center
                };
                Ok((
                    before,
                    measurement_track(&model, id, lo, policy, &shortcut)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WindowedDecoder {
            model,
            plan,
            tracks,
            measurements,
            requests: exp.requests.clone(),
        })
    }

    /// Replays the windows and measurements in time order for one syndrome.
    pub fn run(&self, defect_ids: &[u32]) -> Result<CommitState> {
        let n = self.model.dem().n_detectors();
        let mut defects = vec![false; n];
        for &v in defect_ids {
            defects[v as usize] ^= true;
        }
        let mut state = CommitState::new(n);
        let mut done = 0;
        for (before, tr) in &self.measurements {
            while done < *before {
                decode_window(&self.model, done, &self.tracks[done], &defects, &mut state)?;
                done += 1;
            }
            decode_measurement_immediate(&self.model, tr, &defects, &mut state)?;
        }
        Ok(state)
    }

    /// Predicted flip of every measurement, indexed by id − 1.
    pub fn decode(&self, defect_ids: &[u32]) -> Result<Vec<bool>> {
        let st = self.run(defect_ids)?;
        Ok(st.outcomes.values().copied().collect())
    }
}

impl ShotDecoder for WindowedDecoder<'_> {
    fn predict(&self, defects: &[u32], _: u64) -> Result<Vec<bool>> {
        let f = self.decode(defects)?;
        Ok(self.requests.iter().map(|o| product_flip(&f, o)).collect())
    }
}

#[cfg(test)]
mod tests;
