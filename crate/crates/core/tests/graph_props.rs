mod common;

use std::sync::Arc;

use common::*;
use graphcalc::graph::{load_graph, monge_cost, Distance};
use graphcalc::{fixtures, Error, SubgraphWindow};
use proptest::prelude::*;

#[test]
fn load_examples() {
    let g = load_graph(r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"]]}"#).unwrap();
    assert_eq!(g.degrees(), vec![1, 2, 1]);
    assert_eq!(g.distance_by_id("a", "c").unwrap(), Distance::Finite(2));
    let bad = load_graph(r#"{"vertices":["a"],"edges":[["a","a"]]}"#);
    assert!(matches!(bad, Err(Error::SelfLoop(_))));
    let dup = load_graph(r#"{"vertices":["a","b"],"edges":[["a","b"],["b","a"]]}"#);
    assert!(matches!(dup, Err(Error::DuplicateEdge(..))));
    let dangling = load_graph(r#"{"vertices":["a"],"edges":[["a","z"]]}"#);
    assert!(matches!(dangling, Err(Error::DanglingEndpoint(_))));
    assert!(matches!(load_graph("{"), Err(Error::Parse(_))));
}

#[test]
fn window_examples() {
    let p5 = Arc::new(fixtures::path(5));
    let w = SubgraphWindow::from_ids(p5.clone(), &["b", "c", "d"]).unwrap();
    assert_eq!(w.boundary_ids(), vec!["a", "e"]);
    assert!(matches!(
        SubgraphWindow::from_ids(p5, &["b", "d"]),
        Err(Error::DisconnectedInterior)
    ));
    let c4 = fixtures::cycle(4);
    assert_eq!(c4.volume(&[0, 1, 2, 3]), 8.0);
    assert_eq!(c4.volume(&[]), 0.0);
}

#[test]
fn monge_c4_example() {
    let c4 = fixtures::cycle(4);
    let m = monge_cost(&c4, &[0, 1], &[2, 3]).unwrap();
    assert_eq!(m.cost, 2);
    assert_eq!(m.permutation, vec![1, 0]);
}

proptest! {
    #[test]
    fn handshake(g in arb_graph(1, 30)) {
        let total: usize = g.degrees().iter().sum();
        prop_assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn distance_matches_floyd_warshall(g in arb_graph(1, 30)) {
        let fw = floyd_warshall(&g);
        for x in 0..g.len() {
            for y in 0..g.len() {
                prop_assert_eq!(g.distance(x, y).finite(), fw[x][y]);
                prop_assert_eq!(g.distance(x, y), g.distance(y, x));
                prop_assert_eq!(g.distance(x, y) == Distance::Finite(0), x == y);
                for z in 0..g.len() {
                    if let (Some(a), Some(b), Some(c)) = (fw[x][y], fw[y][z], fw[x][z]) {
                        prop_assert!(c <= a + b);
                    }
                }
            }
        }
    }

    #[test]
    fn window_boundary_definition(g in arb_connected_graph(2, 14), seed in any::<u64>()) {
        let g = Arc::new(g);
        let n = g.len();
        // grow a connected interior from a random start
        let mut rng = graphcalc::numerics::Lcg64::new(seed);
        let mut interior = vec![rng.below(n)];
        let target = 1 + rng.below(n);
        while interior.len() < target {
            let frontier: Vec<usize> = (0..n)
                .filter(|v| !interior.contains(v) && g.neighbors(*v).iter().any(|y| interior.contains(y)))
                .collect();
            if frontier.is_empty() { break; }
            interior.push(frontier[rng.below(frontier.len())]);
        }
        let w = SubgraphWindow::new(g.clone(), &interior).unwrap();
        let expected: Vec<usize> = (0..n)
            .filter(|v| !interior.contains(v) && g.neighbors(*v).iter().any(|y| interior.contains(y)))
            .collect();
        let mut got = w.boundary().to_vec();
        got.sort();
        prop_assert_eq!(got, expected);
        for b in w.boundary() {
            prop_assert!(!interior.contains(b));
        }
    }

    #[test]
    fn monge_matches_permutations(g in arb_connected_graph(4, 12), k in 1usize..=6, seed in any::<u64>()) {
        prop_assume!(2 * k <= g.len());
        let mut rng = graphcalc::numerics::Lcg64::new(seed);
        let mut vs: Vec<usize> = (0..g.len()).collect();
        for i in (1..vs.len()).rev() {
            vs.swap(i, rng.below(i + 1));
        }
        let (a, b) = (vs[..k].to_vec(), vs[k..2 * k].to_vec());
        let fw = floyd_warshall(&g);
        let mut best: Option<(usize, Vec<usize>)> = None;
        for p in permutations(k) {
            let c: usize = (0..k).map(|i| fw[a[i]][b[p[i]]].unwrap()).sum();
            if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
                best = Some((c, p));
            }
        }
        let (cost, perm) = best.unwrap();
        let m = monge_cost(&g, &a, &b).unwrap();
        prop_assert_eq!(m.cost, cost);
        prop_assert_eq!(m.permutation, perm);
    }
}
