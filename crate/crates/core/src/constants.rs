//! Cheeger constants by exhaustive cut enumeration, and Poincaré constants
//! of windows and whole graphs.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, SubgraphWindow, VertexFunction};
use crate::linalg::{diagonal_pencil_eigen, Matrix};
use crate::numerics::Accumulator;

/// Largest vertex count accepted by the exhaustive cut search.
pub const CHEEGER_MAX: usize = 24;

/// Boundary sizes and volumes of one cut `S | Sᶜ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutReport {
    pub subset: Vec<String>,
    pub edge_boundary_size: usize,
    pub vertex_boundary_size: usize,
    pub vol_s: f64,
    pub vol_complement: f64,
    pub h_value: f64,
    pub g_value: f64,
}

/// Cut statistics of an arbitrary proper nonempty subset.
pub fn cut_report(g: &Graph, subset: &[usize]) -> Result<CutReport> {
    let n = g.len();
    let mut inside = vec![false; n];
    for &v in subset {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, len: n });
        }
        inside[v] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    if size == 0 || size == n {
        return Err(Error::InvalidArgument("cut needs a proper nonempty subset".into()));
    }
    let members: Vec<usize> = (0..n).filter(|&v| inside[v]).collect();
    let mut edges = 0;
    let mut touched = vec![false; n];
    for &x in &members {
        for &y in g.neighbors(x) {
            if !inside[y] {
                edges += 1;
                touched[y] = true;
            }
        }
    }
    let vertices = touched.iter().filter(|&&b| b).count();
    let vol_s = g.volume(&members);
    let vol_c = 2.0 * g.edge_count() as f64 - vol_s;
    let denom = vol_s.min(vol_c);
    Ok(CutReport {
        subset: members.iter().map(|&v| g.id(v).to_string()).collect(),
        edge_boundary_size: edges,
        vertex_boundary_size: vertices,
        vol_s,
        vol_complement: vol_c,
        h_value: edges as f64 / denom,
        g_value: vertices as f64 / denom,
    })
}

/// Lexicographic order of the sorted member lists of two bitmasks.
///
/// At the lowest differing vertex v, the list holding v comes first unless
/// the other list has already ended.
fn lex_cmp(a: u32, b: u32) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let v = diff.trailing_zeros();
    let above = (u64::MAX << (v + 1)) as u32;
    if a & (1 << v) != 0 {
        if b & above != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    } else if a & above != 0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    num: u64,
    den: u64,
    mask: u32,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        match (self.num * other.den).cmp(&(other.num * self.den)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => lex_cmp(self.mask, other.mask) == Ordering::Less,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Numerator {
    Edges,
    Vertices,
}

fn enumerate(g: &Graph, which: Numerator) -> Result<(f64, CutReport)> {
    let n = g.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two vertices".into()));
    }
    if n > CHEEGER_MAX {
        return Err(Error::SizeBound {
            what: "graph",
            size: n,
            bound: CHEEGER_MAX,
        });
    }
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let adj: Vec<u32> = (0..n)
        .map(|x| g.neighbors(x).iter().fold(0u32, |m, &y| m | (1 << y)))
        .collect();
    let deg: Vec<u64> = g.degrees().into_iter().map(|d| d as u64).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let total: u64 = deg.iter().sum();

    let evaluate = |s: u32| -> Candidate {
        let mut vol = 0;
        let mut edges = 0;
        let mut reach = 0u32;
        let mut bits = s;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            vol += deg[x];
            edges += (adj[x] & !s).count_ones() as u64;
            reach |= adj[x];
        }
        let num = match which {
            Numerator::Edges => edges,
            Numerator::Vertices => (reach & !s & full).count_ones() as u64,
        };
        Candidate {
            num,
            den: vol.min(total - vol),
            mask: s,
        }
    };

    let mut best: Option<Candidate> = None;
    // one representative per {S, Sᶜ} pair: the side holding vertex 0
    for rest in 0..(1u32 << (n - 1)) - 1 {
        let s = 1 | (rest << 1);
        for cand in [evaluate(s), evaluate(full & !s)] {
            if best.is_none_or(|b| cand.beats(&b)) {
                best = Some(cand);
            }
        }
    }
    let best = best.expect("at least one proper cut");
    let members: Vec<usize> = (0..n).filter(|&v| best.mask & (1 << v) != 0).collect();
    let report = cut_report(g, &members)?;
    Ok((best.num as f64 / best.den as f64, report))
}

/// h_G = min over proper nonempty S of |E(S,Sᶜ)| / min(vol S, vol Sᶜ),
/// with the lexicographically smallest optimal S as witness.
pub fn cheeger_h(g: &Graph) -> Result<(f64, CutReport)> {
    enumerate(g, Numerator::Edges)
}

/// g_G = min over proper nonempty S of |δS| / min(vol S, vol Sᶜ).
pub fn cheeger_g(g: &Graph) -> Result<(f64, CutReport)> {
    enumerate(g, Numerator::Vertices)
}

/// Both constants and whether g_G ≥ h_G holds on this graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerSummary {
    pub h: f64,
    pub h_witness: CutReport,
    pub g: f64,
    pub g_witness: CutReport,
    pub g_at_least_h: bool,
}

pub fn cheeger_summary(g: &Graph) -> Result<CheegerSummary> {
    let (h, h_witness) = cheeger_h(g)?;
    let (gc, g_witness) = cheeger_g(g)?;
    Ok(CheegerSummary {
        h,
        h_witness,
        g: gc,
        g_witness,
        g_at_least_h: gc >= h,
    })
}

/// Σ_{xy∈E} |f(y) − f(x)| / min_c Σ_x d_x |f(x) − c|.
///
/// The minimizing c is the degree-weighted median of f, taking the smaller
/// value when two medians tie.
pub fn cheeger_functional(g: &Graph, f: &VertexFunction) -> Result<f64> {
    let n = g.len();
    let values = f.gather(g, &(0..n).collect::<Vec<_>>())?;
    let numerator: Accumulator = g.edges().map(|(a, b)| (values[b] - values[a]).abs()).collect();
    let c = weighted_median(&values, &g.degrees());
    let denominator: Accumulator = (0..n)
        .map(|x| g.degree(x) as f64 * (values[x] - c).abs())
        .collect();
    let den = denominator.value();
    if !(den > 0.0) {
        return Err(Error::ConstantFunction);
    }
    Ok(numerator.value() / den)
}

/// Smallest c with weight(f ≤ c) ≥ half the total weight.
pub fn weighted_median(values: &[f64], weights: &[usize]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: usize = weights.iter().sum();
    let mut acc = 0;
    for &i in &order {
        acc += weights[i];
        if 2 * acc >= total {
            return values[i];
        }
    }
    order.last().map_or(0.0, |&i| values[i])
}

/// Optimal constant of a Poincaré inequality with the function attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareResult {
    pub constant: f64,
    pub extremal: VertexFunction,
}

/// Best c with Σ_{x∈S} Σ_{y~x} (u(y)−u(x))² ≥ c Σ_{x∈S} d_x u(x)² for all
/// u vanishing on δS.
///
/// Each interior edge appears twice in the energy and each boundary edge
/// once, so this is the smallest eigenvalue of the pencil (Q, D) with
/// Q_xx = 2·#(N(x)∩S) + #(N(x)∩δS) and Q_xy = −2 on interior edges. On a
/// window whose boundary edges are few it sits well below 2μ₁(−Δ).
pub fn poincare_dirichlet(w: &SubgraphWindow) -> Result<PoincareResult> {
    let g = w.host();
    let interior = w.interior();
    let m = interior.len();
    let mut q = Matrix::zeros(m);
    for (i, &x) in interior.iter().enumerate() {
        for &y in g.neighbors(x) {
            match w.interior_position(y) {
                Some(j) => {
                    q[(i, i)] += 2.0;
                    q[(i, j)] -= 2.0;
                }
                None => q[(i, i)] += 1.0,
            }
        }
    }
    let mass: Vec<f64> = interior.iter().map(|&x| g.degree(x) as f64).collect();
    let eig = diagonal_pencil_eigen(&q, &mass)?;
    let mut extremal = VertexFunction::empty(g.len());
    for &b in w.boundary() {
        extremal.set(b, 0.0);
    }
    for (i, &x) in interior.iter().enumerate() {
        extremal.set(x, eig.vectors[(i, 0)]);
    }
    Ok(PoincareResult {
        constant: eig.values[0],
        extremal,
    })
}

pub fn poincare_dirichlet_constant(w: &SubgraphWindow) -> Result<f64> {
    Ok(poincare_dirichlet(w)?.constant)
}

/// Best c with Σ_x Σ_{y~x} (u(y)−u(x))² ≥ c Σ_x d_x (u(x) − ū)², where ū is
/// the degree-weighted mean, over the whole graph.
///
/// The energy is 2·uᵀLu for the combinatorial Laplacian L; the constant is
/// the second eigenvalue of the pencil (2L, D).
pub fn poincare_neumann(g: &Graph) -> Result<PoincareResult> {
    let n = g.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let mut q = Matrix::zeros(n);
    for (a, b) in g.edges() {
        q[(a, a)] += 2.0;
        q[(b, b)] += 2.0;
        q[(a, b)] -= 2.0;
        q[(b, a)] -= 2.0;
    }
    let mass: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    let eig = diagonal_pencil_eigen(&q, &mass)?;
    Ok(PoincareResult {
        constant: eig.values[1],
        extremal: VertexFunction::full(eig.vector(1)),
    })
}

pub fn poincare_neumann_constant(g: &Graph) -> Result<f64> {
    Ok(poincare_neumann(g)?.constant)
}

/// Σ_{x∈S} Σ_{y~x} (u(y) − u(x))², the energy used by both inequalities.
pub fn window_energy(u: &VertexFunction, w: &SubgraphWindow) -> Result<f64> {
    crate::calculus::dirichlet_energy(u, w)
}
