use super::*;
use crate::circuit::{parse_circuit, Basis, ObservableSpec};
use crate::dem::Noise;
use crate::detectors::Frame;
use crate::harness::{padded_repeated_gate_text, window_padding, RepeatedGate};
use crate::layout::CheckType;
use crate::lom::{observing_set, syndrome_of, LomPlan};

fn memory_text(layers: usize) -> String {
    let mut s = String::from("R0 q0\n");
    for _ in 0..layers - 2 {
        s.push_str("I q0\n");
    }
    s.push_str("MZ q0\n");
    s
}

/// Slow-reset, synchronized repeated-gate circuit for commit width `w`.
fn sync_text(g: RepeatedGate, d: usize, basis: Basis, w: usize) -> String {
    let (lead, tail) = window_padding(d, w, 1);
    padded_repeated_gate_text(g, d, basis, lead, tail).unwrap()
}

fn exp(text: &str, d: usize) -> Experiment {
    Experiment::from_text(text, d, Frame::Pre, Noise::Basic(0.01)).unwrap()
}

#[test]
fn memory_plan_arithmetic() {
    let c = parse_circuit(&memory_text(20)).unwrap();
    let plan = plan_windows(&c, &Realization::zeros(), 5, 3, 3, 1, false).unwrap();
    assert_eq!(plan.windows.len(), 6);
    assert_eq!(
        plan.windows.iter().map(|w| w.t_center).collect::<Vec<_>>(),
        vec![3, 6, 9, 12, 15, 18]
    );
    assert_eq!(
        plan.windows[5],
        Window {
            t_prev: 15,
            t_center: 18,
            t_current: 20
        }
    );
    assert_eq!(
        plan.pre_windows,
        vec![PreWindow {
            qubit: 0,
            reset_layer: 0,
            until: 5
        }]
    );
}

#[test]
fn narrow_windows_are_rejected() {
    let c = parse_circuit(&memory_text(20)).unwrap();
    let e = plan_windows(&c, &Realization::zeros(), 5, 2, 3, 1, false).unwrap_err();
    assert!(matches!(e, Error::Window(_)));
    assert!(plan_windows(&c, &Realization::zeros(), 5, 3, 2, 1, false).is_err());
}

#[test]
fn fast_reset_is_rejected_with_earliest_layer() {
    let mut s = String::from("R0 q0\n");
    for _ in 1..10 {
        s.push_str("I q0\n");
    }
    s.push_str("I q0; R0 q1\nCNOT q0 q1\nMZ q0; MZ q1\n");
    let c = parse_circuit(&s).unwrap();
    let Err(Error::Window(msg)) = plan_windows(&c, &Realization::zeros(), 5, 3, 3, 1, false) else {
        panic!("expected a window error");
    };
    assert!(
        msg.contains("q1") && msg.contains("layer 10") && msg.contains("15"),
        "{msg}"
    );
    // the same circuit passes once the reset needs no quiescent rounds
    assert!(plan_windows(&c, &Realization::zeros(), 5, 3, 3, 0, false).is_ok());
}

#[test]
fn synchronization_guard() {
    let text = sync_text(RepeatedGate::I, 3, Basis::Z, 2);
    let c = parse_circuit(&text).unwrap();
    assert!(plan_windows(&c, &Realization::zeros(), 3, 2, 2, 1, true).is_ok());
    let off = padded_repeated_gate_text(RepeatedGate::I, 3, Basis::Z, 2, 1).unwrap();
    let c = parse_circuit(&off).unwrap();
    assert!(plan_windows(&c, &Realization::zeros(), 3, 2, 2, 1, true).is_err());
}

#[test]
fn bulk_memory_z_track_is_the_window_slice() {
    let e = exp(&memory_text(16), 3);
    let plan = plan_windows(&e.bare, &e.realization, 3, 2, 2, 1, false).unwrap();
    let model = WindowModel::new(&e).unwrap();
    let tracks = window_tracks(
        &model,
        &plan,
        3,
        SplitPolicy::Drop,
        &ShortCutConfig::default(),
    )
    .unwrap();
    assert_eq!(tracks.len(), 2);
    let w = plan.windows[3];
    let z = tracks
        .iter()
        .find(|t| {
            t.kind
                == TrackKind::Window {
                    qubit: 0,
                    pauli: Pauli::Z,
                }
        })
        .unwrap();
    let want: Vec<u32> = e
        .dem
        .detectors
        .iter()
        .filter(|d| d.ty == CheckType::Z && (w.t_prev..w.t_current).contains(&(d.t as usize)))
        .map(|d| d.id)
        .collect();
    assert_eq!(z.sub.vertices, want);
    assert!(z.sub.edges.iter().all(|e| e.ends.len() <= 2));
}

#[test]
fn measurement_observing_edges_match_the_dem() {
    for g in [
        RepeatedGate::I,
        RepeatedGate::H,
        RepeatedGate::S,
        RepeatedGate::Cnot,
    ] {
        for basis in [Basis::Z, Basis::X] {
            let e = exp(&padded_repeated_gate_text(g, 3, basis, 0, 0).unwrap(), 3);
            let model = WindowModel::new(&e).unwrap();
            for id in 1..=e.bare.n_measurements() as MeasId {
                let tr =
                    measurement_track(&model, id, 0, SplitPolicy::Drop, &ShortCutConfig::default())
                        .unwrap();
                let mut got: Vec<u32> = tr.sub.observing.clone();
                got.sort_unstable();
                assert_eq!(
                    got,
                    observing_set(&e.dem, &[id - 1]),
                    "{g:?} {basis:?} m{id}"
                );
            }
        }
    }
}

#[test]
fn no_errors_commit_nothing() {
    let e = exp(&sync_text(RepeatedGate::Cnot, 3, Basis::Z, 2), 3);
    let plan = plan_windows(&e.bare, &e.realization, 3, 2, 2, 1, true).unwrap();
    let dec = WindowedDecoder::new(&e, plan, SplitPolicy::Drop, ShortCutConfig::default()).unwrap();
    let st = dec.run(&[]).unwrap();
    assert!(st.committed.is_empty());
    assert!(st.frame.is_identity());
    assert!(st.ledger.iter().all(|&b| !b));
    assert!(st.outcomes.values().all(|&b| !b));
}

fn assert_equivalent(text: &str, d: usize, w: usize, shortcut: ShortCutConfig, max_weight: usize) {
    let e = exp(text, d);
    let plan = plan_windows(&e.bare, &e.realization, d, w, w, 1, true).unwrap();
    let dec = WindowedDecoder::new(&e, plan, SplitPolicy::Drop, shortcut).unwrap();
    let lom = LomPlan::new(
        &e.dem,
        &e.bare,
        &e.realization,
        &e.requests,
        SplitPolicy::Drop,
    )
    .unwrap();
    let n = e.dem.hyperedges.len();
    let check = |hs: &[usize]| {
        let s = syndrome_of(&e.dem, hs);
        let a = dec.predict(&s, 0).unwrap();
        let b = lom.decode_requested(&s, 0).unwrap();
        assert_eq!(a, b, "hyperedges {hs:?}");
    };
    for h in 0..n {
        check(&[h]);
    }
    if max_weight >= 2 {
        // a fixed pseudo-random sample of pairs
        let mut x = 0x2545_f491_4f6c_dd1du64;
        for _ in 0..300 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let a = (x % n as u64) as usize;
            let b = ((x >> 32) % n as u64) as usize;
            if a != b {
                check(&[a, b]);
            }
        }
    }
}

#[test]
fn windowed_matches_windowless_on_single_errors_d3() {
    for g in [
        RepeatedGate::I,
        RepeatedGate::H,
        RepeatedGate::S,
        RepeatedGate::Cnot,
        RepeatedGate::AltCnot,
    ] {
        for basis in [Basis::Z, Basis::X] {
            let text = sync_text(g, 3, basis, 2);
            assert_equivalent(&text, 3, 2, ShortCutConfig::default(), 1);
            assert_equivalent(&text, 3, 2, ShortCutConfig::on(), 1);
        }
    }
}

#[test]
fn windowed_matches_windowless_on_sampled_pairs_d5() {
    for g in [RepeatedGate::S, RepeatedGate::Cnot] {
        let text = sync_text(g, 5, Basis::Z, 3);
        assert_equivalent(&text, 5, 3, ShortCutConfig::on(), 2);
    }
}

#[test]
fn crossing_edge_leaves_an_artificial_defect() {
    let e = exp(&memory_text(12), 5);
    let plan = plan_windows(&e.bare, &e.realization, 5, 3, 3, 1, false).unwrap();
    let w = plan.windows[0];
    // two measurement errors on one Z-check, in the rounds just before and
    // at the first center
    let check = e
        .dem
        .detectors
        .iter()
        .find(|d| d.ty == CheckType::Z && d.t as usize == w.t_center)
        .unwrap();
    let rec = |t: usize| {
        e.dem
            .detectors
            .iter()
            .find(|d| d.ty == CheckType::Z && d.coord == check.coord && d.t as usize == t)
            .unwrap()
            .records[0]
    };
    let flip_of = |r: u32| {
        e.dem
            .hyperedges
            .iter()
            .position(|h| {
                h.sources.iter().any(|&s| {
                    e.dem.mechanisms[s as usize].kind
                        == crate::dem::MechanismKind::Flip { record: r }
                })
            })
            .unwrap()
    };
    let hs = [flip_of(rec(w.t_center)), flip_of(rec(w.t_center + 1))];
    let s = syndrome_of(&e.dem, &hs);
    let dec = WindowedDecoder::new(
        &e,
        plan.clone(),
        SplitPolicy::Drop,
        ShortCutConfig::default(),
    )
    .unwrap();
    let st = dec.run(&s).unwrap();
    let first: Vec<_> = st.committed.iter().filter(|c| c.window == 0).collect();
    assert_eq!(first.len(), 1);
    let lom = LomPlan::new(
        &e.dem,
        &e.bare,
        &e.realization,
        &e.requests,
        SplitPolicy::Drop,
    )
    .unwrap();
    assert_eq!(
        dec.predict(&s, 0).unwrap(),
        lom.decode_requested(&s, 0).unwrap()
    );
    assert_eq!(dec.predict(&s, 0).unwrap(), vec![false]);
}

#[test]
fn each_crossing_edge_lies_in_one_track() {
    let e = exp(&sync_text(RepeatedGate::AltCnot, 3, Basis::Z, 2), 3);
    let plan = plan_windows(&e.bare, &e.realization, 3, 2, 2, 1, true).unwrap();
    let model = WindowModel::new(&e).unwrap();
    for (i, w) in plan.windows.iter().enumerate() {
        let tracks = window_tracks(
            &model,
            &plan,
            i,
            SplitPolicy::Drop,
            &ShortCutConfig::default(),
        )
        .unwrap();
        for h in &e.dem.hyperedges {
            let ts: Vec<usize> = h
                .dets
                .iter()
                .map(|&v| e.dem.detectors[v as usize].t as usize)
                .collect();
            if ts.len() != 2 || !(ts.contains(&(w.t_center - 1)) && ts.contains(&w.t_center)) {
                continue;
            }
            let n = tracks
                .iter()
                .filter(|t| h.dets.iter().all(|&v| t.sub.contains(v)))
                .count();
            assert_eq!(n, 1, "window {i} hyperedge {:?}", h.dets);
        }
    }
}

#[test]
fn cnot_track_spreads_on_one_side() {
    // one CNOT in layer 3, just before the center of window 1
    let text = "R+ q0; R0 q1\nI q0; I q1\nI q0; I q1\nCNOT q0 q1\nI q0; I q1\nI q0; I q1\nI q0; I q1\nMX q0; MZ q1\n";
    let e = Experiment::from_text(text, 3, Frame::Pre, Noise::Basic(0.01)).unwrap();
    let plan = plan_windows(&e.bare, &e.realization, 3, 2, 2, 1, true).unwrap();
    let model = WindowModel::new(&e).unwrap();
    let w = plan.windows[1];
    assert_eq!((w.t_prev, w.t_center, w.t_current), (2, 4, 6));
    let tracks = window_tracks(
        &model,
        &plan,
        1,
        SplitPolicy::Drop,
        &ShortCutConfig::default(),
    )
    .unwrap();
    let x0 = tracks
        .iter()
        .find(|t| {
            t.kind
                == TrackKind::Window {
                    qubit: 0,
                    pauli: Pauli::X,
                }
        })
        .unwrap();
    for t in w.t_prev..w.t_current {
        let want = if t < w.t_center { 2 } else { 1 };
        assert_eq!(x0.region.at(t).weight(), want, "slice {t}");
    }
    let blocks = |lo: usize, hi: usize| -> Vec<u32> {
        let mut js: Vec<u32> = x0
            .sub
            .vertices
            .iter()
            .map(|&v| &e.dem.detectors[v as usize])
            .filter(|d| (lo..hi).contains(&(d.t as usize)))
            .map(|d| d.j)
            .collect();
        js.sort_unstable();
        js.dedup();
        js
    };
    assert_eq!(blocks(w.t_prev, w.t_center), vec![0, 1]);
    assert_eq!(blocks(w.t_center, w.t_current), vec![0]);
}

/// Slow-reset T injection: the injection sits after the center of the first
/// window, so the forward X̄ track of q0 reaches the Z measurement of q1.
fn injection_text(d: usize) -> String {
    let mut s = String::from("R+ q0\n");
    for _ in 1..d + 1 {
        s.push_str("I q0\n");
    }
    s.push_str("I q0; RT q1\nCNOT q0 q1\nMZ q1\nCOND S q0 ON m1\n");
    for _ in 0..d {
        s.push_str("I q0\n");
    }
    s.push_str("MX q0\n");
    s
}

#[test]
fn injection_track_is_peeled_onto_the_preparation() {
    let d = 3;
    let c = parse_circuit(&injection_text(d)).unwrap();
    let r = Realization::zeros();
    let act = c.activity();
    let rt = d + 1;
    let w = Window {
        t_prev: rt - 2,
        t_center: rt,
        t_current: rt + 3,
    };
    let (region, fragile) = track_region(&c, &r, &act, 0, Pauli::X, &w).unwrap();
    assert!(fragile.is_empty());
    // the preparation X̄ sits on q1 from just after the injection up to the
    // CNOT, and cancels the copy of X̄ that the CNOT spreads onto q1
    assert_eq!(region.get(rt + 1, 1), Some(Pauli::X));
    assert_eq!(region.get(rt + 2, 1), None);
    assert_eq!(region.get(rt + 2, 0), Some(Pauli::X));
    assert!(plan_windows(&c, &r, d, 2, 2, 1, false).is_ok());
}

#[test]
fn injection_outcome_is_decoded_before_the_next_window() {
    let d = 3;
    let e = exp(&injection_text(d), d);
    let plan = plan_windows(&e.bare, &e.realization, d, 2, 2, 1, false).unwrap();
    let dec = WindowedDecoder::new(
        &e,
        plan.clone(),
        SplitPolicy::Drop,
        ShortCutConfig::default(),
    )
    .unwrap();
    let m1 = e.bare.measurement(1).unwrap().layer;
    let (before, tr) = dec
        .measurements
        .iter()
        .find(|(_, t)| t.kind == TrackKind::Measurement { id: 1 })
        .unwrap();
    assert!(plan.windows[..*before].iter().all(|w| w.t_current <= m1));
    assert!(plan.windows[*before..].iter().all(|w| w.t_current > m1));
    assert_eq!(tr.hi, m1 + 1);
    assert!(dec.run(&[]).unwrap().outcomes.values().all(|&b| !b));
}

#[test]
fn shortcut_edges_join_types_and_never_observe() {
    let e = exp(&sync_text(RepeatedGate::Cnot, 3, Basis::Z, 2), 3);
    let plan = plan_windows(&e.bare, &e.realization, 3, 2, 2, 1, true).unwrap();
    let model = WindowModel::new(&e).unwrap();
    let tracks = window_tracks(&model, &plan, 1, SplitPolicy::Drop, &ShortCutConfig::on()).unwrap();
    let mut k_type = 0;
    for tr in &tracks {
        for se in tr.sub.edges.iter().filter(|x| x.shortcut) {
            assert!(!se.observing && se.sources.is_empty());
            let a = relabel(&e.dem.detectors[tr.sub.vertices[se.ends[0] as usize] as usize]);
            let b = relabel(&e.dem.detectors[tr.sub.vertices[se.ends[1] as usize] as usize]);
            assert_eq!((a.z, a.zt), (b.z, b.zt));
            assert!(a.t.abs_diff(b.t) <= 1);
            if a.t == b.t {
                assert_ne!(a.k, b.k);
                k_type += 1;
            }
        }
    }
    assert!(k_type > 0);
}

#[test]
fn relabeling_ranges() {
    let e = exp(&memory_text(4), 5);
    for d in &e.dem.detectors {
        let l = relabel(d);
        assert!(l.z < 5 && (1..5).contains(&l.zt), "{d:?} -> {l:?}");
        assert_eq!(l.k % 2, if d.ty == CheckType::X { 0 } else { 1 });
    }
}

#[test]
fn windowed_is_a_shot_decoder() {
    let e = exp(&sync_text(RepeatedGate::I, 3, Basis::X, 2), 3);
    let plan = plan_windows(&e.bare, &e.realization, 3, 2, 2, 1, true).unwrap();
    let dec = WindowedDecoder::new(&e, plan, SplitPolicy::Drop, ShortCutConfig::default()).unwrap();
    assert_eq!(e.requests, vec![ObservableSpec::single(1)]);
    assert_eq!(dec.predict(&[], 0).unwrap(), vec![false]);
}

/// Shortcut tracks of several synchronized circuits, in a fixed order,
/// skipping windows that still overlap the quiescent rounds after a reset.
fn shortcut_tracks<'a>(exps: &'a [Experiment], d: usize, w: usize) -> Vec<(&'a Experiment, Track)> {
    let mut out = Vec::new();
    for e in exps {
        let plan = plan_windows(&e.bare, &e.realization, d, w, w, 1, true).unwrap();
        let model = WindowModel::new(e).unwrap();
        for i in 0..plan.windows.len() {
            if plan
                .pre_windows
                .iter()
                .any(|p| plan.windows[i].t_prev < p.until)
            {
                continue;
            }
            for t in
                window_tracks(&model, &plan, i, SplitPolicy::Drop, &ShortCutConfig::on()).unwrap()
            {
                out.push((e, t));
            }
        }
    }
    out
}

#[test]
fn shortcut_metric_formula() {
    let mut checked_tracks = 0;
    let mut x = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = move || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        x
    };
    for (d, w) in [(3, 2), (5, 3)] {
        let exps: Vec<Experiment> = [
            RepeatedGate::I,
            RepeatedGate::H,
            RepeatedGate::S,
            RepeatedGate::Cnot,
            RepeatedGate::AltCnot,
        ]
        .iter()
        .flat_map(|&g| [Basis::Z, Basis::X].map(move |b| (g, b)))
        .map(|(g, b)| exp(&sync_text(g, d, b, w), d))
        .collect();
        let tracks = shortcut_tracks(&exps, d, w);
        for _ in 0..25 {
            let (e, tr) = &tracks[(next() % tracks.len() as u64) as usize];
            let n = tr.sub.vertices.len() as u64;
            let label = |i: u32| relabel(&e.dem.detectors[tr.sub.vertices[i as usize] as usize]);
            for _ in 0..40 {
                let (a, b) = ((next() % n) as u32, (next() % n) as u32);
                let (la, lb) = (label(a), label(b));
                let want = la.z.abs_diff(lb.z)
                    + la.zt.abs_diff(lb.zt)
                    + la.t.abs_diff(lb.t)
                    + u32::from(la.t == lb.t && la.k != lb.k);
                let got = tr.sub.graph().distance(a, Some(b)).unwrap().unwrap();
                assert_eq!(got, want as f64, "{la:?} {lb:?} in {:?}", tr.kind);
            }
            checked_tracks += 1;
        }
    }
    assert_eq!(checked_tracks, 50);
}
