use super::Graph;
use crate::error::{Error, Result};

/// Largest |A| accepted by the exhaustive assignment search.
pub const MONGE_MAX: usize = 10;

/// Optimal matching of `sources[i]` to `targets[permutation[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MongeAssignment {
    pub cost: usize,
    /// 0-based permutation σ, lexicographically smallest among optima.
    pub permutation: Vec<usize>,
}

/// Minimise Σ d(a_i, b_σ(i)) over all permutations σ by exhaustive search.
///
/// Permutations are visited in lexicographic order and only strict
/// improvements replace the incumbent, which yields the lexicographically
/// smallest optimal σ. Pairs in different components contribute an
/// infinite cost; if every σ is infinite the call fails with `Unreachable`.
pub fn monge_cost(g: &Graph, sources: &[usize], targets: &[usize]) -> Result<MongeAssignment> {
    if sources.len() != targets.len() {
        return Err(Error::SizeMismatch(format!(
            "|A| = {}, |B| = {}",
            sources.len(),
            targets.len()
        )));
    }
    if sources.len() > MONGE_MAX {
        return Err(Error::SizeBound {
            what: "Monge instance",
            size: sources.len(),
            bound: MONGE_MAX,
        });
    }
    for &v in sources.iter().chain(targets) {
        if v >= g.len() {
            return Err(Error::UnknownVertex(format!("#{v}")));
        }
    }
    if let Some(&v) = sources.iter().find(|v| targets.contains(v)) {
        return Err(Error::Overlap(g.id(v).to_string()));
    }
    let n = sources.len();
    let dist: Vec<Vec<Option<usize>>> = sources
        .iter()
        .map(|&a| {
            let d = g.bfs_distances(a);
            targets.iter().map(|&b| d[b]).collect()
        })
        .collect();

    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(usize, Vec<usize>)> = None;
    loop {
        let cost: Option<usize> = perm
            .iter()
            .enumerate()
            .try_fold(0usize, |acc, (i, &j)| dist[i][j].map(|d| acc + d));
        if let Some(c) = cost {
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, perm.clone()));
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    match best {
        Some((cost, permutation)) => Ok(MongeAssignment { cost, permutation }),
        None => Err(Error::Unreachable(
            g.id(sources[0]).to_string(),
            g.id(targets[0]).to_string(),
        )),
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}
