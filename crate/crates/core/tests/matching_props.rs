use lomdec::matching::MatchGraph;
use proptest::prelude::*;

type RawEdge = (u32, Option<u32>, f64, u64, Vec<u32>);

// Floyd-Warshall over vertices plus boundary, then exhaustive pairing.
fn oracle(n: usize, edges: &[RawEdge], defects: &[u32]) -> Option<u64> {
    let m = n + 1;
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; m]; m];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v, w, _, _) in edges {
        let v = v.map(|v| v as usize).unwrap_or(n);
        let u = u as usize;
        let w = w as u64;
        if u != v && w < d[u][v] {
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    // the boundary is a sink: paths may end there but never pass through it
    for k in 0..n {
        for i in 0..m {
            for j in 0..m {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    fn go(rest: &[usize], d: &[Vec<u64>], n: usize, inf: u64) -> u64 {
        let Some((&a, tail)) = rest.split_first() else {
            return 0;
        };
        let mut best = inf;
        let sub = go(tail, d, n, inf);
        if d[a][n] < inf && sub < inf {
            best = best.min(d[a][n] + sub);
        }
        for i in 0..tail.len() {
            if d[a][tail[i]] >= inf {
                continue;
            }
            let mut r: Vec<usize> = tail.to_vec();
            r.remove(i);
            let s = go(&r, d, n, inf);
            if s < inf {
                best = best.min(d[a][tail[i]] + s);
            }
        }
        best
    }
    let ds: Vec<usize> = defects.iter().map(|&x| x as usize).collect();
    let r = go(&ds, &d, n, inf);
    (r < inf).then_some(r)
}

fn graph_case() -> impl Strategy<Value = (usize, Vec<RawEdge>, Vec<u32>)> {
    (2usize..=14).prop_flat_map(|n| {
        let edge = (
            0..n as u32,
            prop::option::weighted(0.8, 0..n as u32),
            1u32..8,
            0u64..4,
        )
            .prop_map(|(u, v, w, f)| (u, v, w as f64, f, vec![]));
        (
            Just(n),
            prop::collection::vec(edge, 1..3 * n),
            prop::collection::btree_set(0..n as u32, 0..=n.min(10)),
        )
            .prop_map(|(n, e, ds)| (n, e, ds.into_iter().collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn matches_exhaustive_oracle((n, edges, defects) in graph_case()) {
        let g = MatchGraph::new(n, edges.clone()).unwrap();
        let want = oracle(n, &edges, &defects);
        match g.decode(&defects) {
            Ok(sol) => {
                prop_assert_eq!(Some(sol.weight as u64), want);
                // the reduced edge set must have exactly the defects as odd-degree vertices
                let mut deg = vec![0u32; n];
                let mut f = 0;
                for &k in &sol.edges {
                    let e = &g.edges()[k as usize];
                    deg[e.u as usize] ^= 1;
                    if let Some(v) = e.v { deg[v as usize] ^= 1; }
                    f ^= e.flags;
                }
                let odd: Vec<u32> = (0..n as u32).filter(|&v| deg[v as usize] == 1).collect();
                prop_assert_eq!(odd, defects.clone());
                prop_assert_eq!(f, sol.flags);
                prop_assert_eq!(g.decode_flags(&defects).unwrap(), sol.flags);
                let again = MatchGraph::new(n, edges).unwrap().decode(&defects).unwrap();
                prop_assert_eq!(again, sol);
            }
            Err(_) => prop_assert_eq!(want, None),
        }
    }
}
