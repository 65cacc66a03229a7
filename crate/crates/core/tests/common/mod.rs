#![allow(dead_code)]

use graphcalc::Graph;
use proptest::prelude::*;

/// Graph on `n` vertices "v0".."v{n-1}" keeping the edges whose bit is set
/// in `mask`, enumerated over pairs a < b in order.
pub fn masked_graph(n: usize, mask: &[bool]) -> Graph {
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    let mut k = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            if mask[k] {
                edges.push((a, b));
            }
            k += 1;
        }
    }
    Graph::new(ids, &edges).unwrap()
}

/// A spanning path 0–1–…–(n−1) plus random chords: always connected.
pub fn connected_graph(n: usize, mask: &[bool]) -> Graph {
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    let mut k = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            if b == a + 1 || mask[k] {
                edges.push((a, b));
            }
            k += 1;
        }
    }
    Graph::new(ids, &edges).unwrap()
}

pub fn arb_graph(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.3), n * (n - 1) / 2)
            .prop_map(move |mask| masked_graph(n, &mask))
    })
}

pub fn arb_connected_graph(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.25), n * (n - 1) / 2)
            .prop_map(move |mask| connected_graph(n, &mask))
    })
}

/// All-pairs hop distances by Floyd–Warshall; `None` = unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.len();
    let mut d = vec![vec![None; n]; n];
    for x in 0..n {
        d[x][x] = Some(0);
        for &y in g.neighbors(x) {
            d[x][y] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Every permutation of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All simple paths from `a` to `b`, by depth-first search.
pub fn simple_paths(g: &Graph, a: usize, b: usize) -> Vec<Vec<usize>> {
    fn rec(g: &Graph, b: usize, path: &mut Vec<usize>, seen: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let x = *path.last().unwrap();
        if x == b {
            out.push(path.clone());
            return;
        }
        for &y in g.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                path.push(y);
                rec(g, b, path, seen, out);
                path.pop();
                seen[y] = false;
            }
        }
    }
    let mut seen = vec![false; g.len()];
    seen[a] = true;
    let mut out = Vec::new();
    rec(g, b, &mut vec![a], &mut seen, &mut out);
    out
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (|diff| = {:e})", (a - b).abs());
}
