//! Critical points of vertex functions and the mountain-pass search
//! between two strict local minima.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, SubgraphWindow, VertexFunction};

/// Neighbourhoods above this size are not searched for arc decompositions.
pub const ARC_DEGREE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    StrictLocalMin,
    LocalMin,
    StrictLocalMax,
    LocalMax,
    MinimaxPoint,
    Regular,
}

/// Through-pair x0, x1 and one low vertex on each arc of N(x).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxWitness {
    pub x0: String,
    pub x1: String,
    pub y0: String,
    pub y1: String,
    /// Both arcs from x0 to x1, endpoints included.
    pub arcs: [Vec<String>; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexClassification {
    pub vertex: String,
    pub kinds: Vec<VertexKind>,
    pub witness: Option<MinimaxWitness>,
    /// Why the mini-max test was not run, when it was not.
    pub minimax_skipped: Option<String>,
}

impl VertexClassification {
    pub fn is(&self, kind: VertexKind) -> bool {
        self.kinds.contains(&kind)
    }
}

/// Classify x by the signs of ∇_xy f and by the arc test on N(x).
///
/// x is a mini-max point when some neighbours x0, x1 with
/// min(f(x0), f(x1)) ≥ f(x) split N(x) into two x0–x1 paths inside N(x),
/// each with an interior vertex y where f(y) ≤ f(x). The search runs over
/// every Hamiltonian cycle of the induced neighbourhood; the witness is the
/// lexicographically smallest (x0, x1, y0, y1) by vertex index.
pub fn classify_vertex(g: &Graph, f: &VertexFunction, x: usize) -> Result<VertexClassification> {
    let fx = f.at(g, x)?;
    let nbrs = g.neighbors(x);
    let vals = f.gather(g, nbrs)?;
    let mut kinds = Vec::new();
    if vals.iter().all(|&v| v > fx) {
        kinds.push(VertexKind::StrictLocalMin);
    }
    if vals.iter().all(|&v| v >= fx) {
        kinds.push(VertexKind::LocalMin);
    }
    if vals.iter().all(|&v| v < fx) {
        kinds.push(VertexKind::StrictLocalMax);
    }
    if vals.iter().all(|&v| v <= fx) {
        kinds.push(VertexKind::LocalMax);
    }

    let mut witness = None;
    let mut skipped = None;
    if nbrs.len() < 4 {
        skipped = Some(format!("degree {} < 4", nbrs.len()));
    } else if !g.induces_connected(nbrs) {
        skipped = Some("neighbourhood is disconnected".to_string());
    } else if nbrs.len() > ARC_DEGREE_LIMIT {
        return Err(Error::DegreeTooLarge {
            vertex: g.id(x).to_string(),
            degree: nbrs.len(),
            limit: ARC_DEGREE_LIMIT,
        });
    } else {
        witness = arc_witness(g, nbrs, &vals, fx);
        if witness.is_some() {
            kinds.push(VertexKind::MinimaxPoint);
        }
    }
    if kinds.is_empty() {
        kinds.push(VertexKind::Regular);
    }
    Ok(VertexClassification {
        vertex: g.id(x).to_string(),
        kinds,
        witness,
        minimax_skipped: skipped,
    })
}

/// Hamiltonian cycles of the graph induced on `nbrs`, as local position
/// sequences starting at position 0, each listed in one direction only.
fn hamiltonian_cycles(g: &Graph, nbrs: &[usize]) -> Vec<Vec<usize>> {
    let k = nbrs.len();
    let adj: Vec<Vec<bool>> = (0..k)
        .map(|i| (0..k).map(|j| g.adjacent(nbrs[i], nbrs[j])).collect())
        .collect();
    let mut out = Vec::new();
    let mut used = vec![false; k];
    used[0] = true;
    let mut path = vec![0];
    fn extend(adj: &[Vec<bool>], used: &mut [bool], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = adj.len();
        let last = *path.last().unwrap();
        if path.len() == k {
            if adj[last][0] && path[1] < path[k - 1] {
                out.push(path.clone());
            }
            return;
        }
        for next in 1..k {
            if !used[next] && adj[last][next] {
                used[next] = true;
                path.push(next);
                extend(adj, used, path, out);
                path.pop();
                used[next] = false;
            }
        }
    }
    if k >= 3 {
        extend(&adj, &mut used, &mut path, &mut out);
    }
    out
}

fn arc_witness(g: &Graph, nbrs: &[usize], vals: &[f64], fx: f64) -> Option<MinimaxWitness> {
    let k = nbrs.len();
    let mut best: Option<((usize, usize, usize, usize), [Vec<usize>; 2])> = None;
    for cycle in hamiltonian_cycles(g, nbrs) {
        let pos: Vec<usize> = {
            let mut p = vec![0; k];
            cycle.iter().enumerate().for_each(|(i, &v)| p[v] = i);
            p
        };
        for a in 0..k {
            for b in (a + 1)..k {
                if vals[a] < fx || vals[b] < fx {
                    continue;
                }
                let (pa, pb) = (pos[a], pos[b]);
                let (lo, hi) = (pa.min(pb), pa.max(pb));
                let inner: Vec<usize> = cycle[lo + 1..hi].to_vec();
                let outer: Vec<usize> = cycle[hi + 1..].iter().chain(&cycle[..lo]).copied().collect();
                let low = |arc: &[usize]| arc.iter().copied().filter(|&v| vals[v] <= fx).min();
                let (Some(y_in), Some(y_out)) = (low(&inner), low(&outer)) else {
                    continue;
                };
                let key = (a, b, y_in.min(y_out), y_in.max(y_out));
                if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                    let orient = |seq: Vec<usize>, forward: bool| -> Vec<usize> {
                        let mut s = seq;
                        if !forward {
                            s.reverse();
                        }
                        s
                    };
                    // both arcs run from a to b
                    let mut arc1 = vec![a];
                    arc1.extend(orient(inner, pa < pb));
                    arc1.push(b);
                    let mut arc2 = vec![a];
                    arc2.extend(orient(outer, pa > pb));
                    arc2.push(b);
                    let arcs = if y_in <= y_out { [arc1, arc2] } else { [arc2, arc1] };
                    best = Some((key, arcs));
                }
            }
        }
    }
    best.map(|((a, b, y0, y1), arcs)| {
        let id = |v: usize| g.id(nbrs[v]).to_string();
        MinimaxWitness {
            x0: id(a),
            x1: id(b),
            y0: id(y0),
            y1: id(y1),
            arcs: arcs.map(|arc| arc.into_iter().map(id).collect()),
        }
    })
}

/// c = min over z0→z1 paths of max f along the path, with the
/// lexicographically smallest among the shortest optimal paths.
pub fn bottleneck_level(g: &Graph, f: &VertexFunction, z0: usize, z1: usize) -> Result<(f64, Vec<usize>)> {
    let n = g.len();
    let all: Vec<usize> = (0..n).collect();
    let vals = f.gather(g, &all)?;
    if g.bfs_distances(z0)[z1].is_none() {
        return Err(Error::Unreachable(g.id(z0).into(), g.id(z1).into()));
    }
    // best-first on the running maximum
    let mut level = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    level[z0] = vals[z0];
    loop {
        let next = (0..n)
            .filter(|&v| !done[v] && level[v].is_finite())
            .min_by(|&a, &b| level[a].total_cmp(&level[b]).then(a.cmp(&b)));
        let Some(x) = next else { break };
        done[x] = true;
        if x == z1 {
            break;
        }
        for &y in g.neighbors(x) {
            let cand = level[x].max(vals[y]);
            if cand < level[y] {
                level[y] = cand;
            }
        }
    }
    let c = level[z1];
    let path = shortest_lex_path(g, z0, z1, |v| vals[v] <= c).expect("optimal path exists");
    Ok((c, path))
}

/// Lexicographically smallest shortest path through vertices passing
/// `allowed`.
fn shortest_lex_path(g: &Graph, from: usize, to: usize, allowed: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    let n = g.len();
    let mut dist = vec![usize::MAX; n];
    dist[to] = 0;
    let mut queue = VecDeque::from([to]);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if dist[y] == usize::MAX && allowed(y) {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    if dist[from] == usize::MAX {
        return None;
    }
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        // neighbours are sorted, so the first hit is the smallest index
        cur = *g.neighbors(cur).iter().find(|&&y| dist[y] == dist[cur] - 1)?;
        path.push(cur);
    }
    Some(path)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxSearch {
    pub c: f64,
    pub z: String,
    pub path: Vec<String>,
    /// Every y ∈ N(z) off the final path has f(y) ≥ c.
    pub off_path_condition: bool,
    /// Verdict of the arc test on z; `None` when it was skipped or z's degree
    /// exceeds the enumeration limit.
    pub classifier_minimax: Option<bool>,
    pub warnings: Vec<String>,
}

/// Search for a mini-max point between strict local minima z0 and z1.
///
/// Starting from an optimal bottleneck path, every vertex at level c is
/// bypassed when some path vertex before it connects to one after it
/// through vertices strictly below c. A level vertex that cannot be bypassed
/// is returned, preferring one whose off-path neighbours all lie at or above
/// c.
pub fn find_minimax(g: &Graph, f: &VertexFunction, z0: usize, z1: usize) -> Result<MinimaxSearch> {
    for z in [z0, z1] {
        if !classify_vertex_signs(g, f, z)? {
            return Err(Error::NotStrictMinimum(g.id(z).to_string()));
        }
    }
    let (c, mut path) = bottleneck_level(g, f, z0, z1)?;
    let vals = f.gather(g, &(0..g.len()).collect::<Vec<_>>())?;

    loop {
        let mut changed = false;
        for p in 0..path.len() {
            if vals[path[p]] != c {
                continue;
            }
            if let Some(next) = reroute(g, &vals, c, &path, p) {
                path = next;
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }

    let on_path = {
        let mut m = vec![false; g.len()];
        path.iter().for_each(|&v| m[v] = true);
        m
    };
    let level: Vec<usize> = path.iter().copied().filter(|&v| vals[v] == c).collect();
    let off_ok = |z: usize| g.neighbors(z).iter().all(|&y| on_path[y] || vals[y] >= c);
    let mut warnings = Vec::new();
    let z = match level.iter().copied().find(|&z| off_ok(z)) {
        Some(z) => z,
        None => {
            let z = level[0];
            warnings.push(format!(
                "every level-c vertex on the path has an off-path neighbour below c; returning {:?}",
                g.id(z)
            ));
            z
        }
    };
    if g.degree(z) < 4 {
        warnings.push(format!("{:?} has degree {} < 4", g.id(z), g.degree(z)));
    } else if !g.induces_connected(g.neighbors(z)) {
        warnings.push(format!("neighbourhood of {:?} is disconnected", g.id(z)));
    }
    let classifier_minimax = classify_vertex(g, f, z)
        .ok()
        .and_then(|cl| cl.minimax_skipped.is_none().then(|| cl.is(VertexKind::MinimaxPoint)));
    Ok(MinimaxSearch {
        c,
        z: g.id(z).to_string(),
        path: path.iter().map(|&v| g.id(v).to_string()).collect(),
        off_path_condition: off_ok(z),
        classifier_minimax,
        warnings,
    })
}

fn classify_vertex_signs(g: &Graph, f: &VertexFunction, x: usize) -> Result<bool> {
    let fx = f.at(g, x)?;
    for &y in g.neighbors(x) {
        if f.at(g, y)? <= fx {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bypass path[p] by a detour from an earlier path vertex to a later one
/// through free vertices below c; returns the rewired path.
fn reroute(g: &Graph, vals: &[f64], c: f64, path: &[usize], p: usize) -> Option<Vec<usize>> {
    let n = g.len();
    let mut index = vec![usize::MAX; n];
    path.iter().enumerate().for_each(|(i, &v)| index[v] = i);
    let free = |v: usize| index[v] == usize::MAX && vals[v] < c;

    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in &path[..p] {
        seen[s] = true;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        let exit = g
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&y| index[y] != usize::MAX && index[y] > p)
            .max_by_key(|&y| index[y]);
        if let Some(target) = exit {
            let mut detour = Vec::new();
            let mut v = u;
            while index[v] == usize::MAX {
                detour.push(v);
                v = parent[v];
            }
            detour.reverse();
            let mut out = path[..=index[v]].to_vec();
            out.extend(detour);
            out.extend_from_slice(&path[index[target]..]);
            return Some(out);
        }
        for &y in g.neighbors(u) {
            if !seen[y] && free(y) {
                seen[y] = true;
                parent[y] = u;
                queue.push_back(y);
            }
        }
    }
    None
}

/// Finite-window stand-in for coercivity: every boundary value strictly
/// exceeds the level of interest (`candidate`, or the interior maximum).
pub fn is_coercive_on_window(f: &VertexFunction, w: &SubgraphWindow, candidate: Option<f64>) -> bool {
    let g = w.host();
    let (Ok(inner), Ok(bdry)) = (f.gather(g, w.interior()), f.gather(g, w.boundary())) else {
        return false;
    };
    if bdry.is_empty() {
        return false;
    }
    let level = candidate.unwrap_or_else(|| inner.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    bdry.iter().all(|&b| b > level)
}
