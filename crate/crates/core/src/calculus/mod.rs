//! Discrete differential operators on graphs.
//!
//! For f defined on a closed neighbourhood O(x) = N(x) ∪ {x}:
//!
//! ```text
//! ∇_xy f   = f(y) - f(x)                       (y ~ x)
//! ∇f(x)    = (∇_xy f)_{y ∈ N(x)}
//! W·U (x)  = (1/d_x) Σ_y w(xy) u(xy)
//! div W(x) = (1/d_x) Σ_y w(xy)
//! Δf(x)    = s · (1/d_x) Σ_y ∇_xy f            s ∈ {1, 2/3}
//! H(f)(x)  = ½ (f(y) + f(z) - 2 f(x))_{y,z ∈ N(x)}
//! ```
//!
//! Integrals carry the degree weight: ∫_A f = Σ_{x ∈ A} f(x) d_x.

mod field;
mod green;
pub mod suite;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, SubgraphWindow, VertexFunction};
use crate::numerics::Accumulator;

pub use field::{FieldSymmetry, VectorField};
pub use green::{
    green_symmetric_report, green_vectorfield_report, GreenSymmetricReport, GreenVectorFieldReport,
};

/// Multiplier applied to the Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LaplacianScale {
    #[default]
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2/3")]
    TwoThirds,
}

impl LaplacianScale {
    pub fn value(self) -> f64 {
        match self {
            LaplacianScale::One => 1.0,
            LaplacianScale::TwoThirds => 2.0 / 3.0,
        }
    }
}

impl fmt::Display for LaplacianScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LaplacianScale::One => "1",
            LaplacianScale::TwoThirds => "2/3",
        })
    }
}

impl FromStr for LaplacianScale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "1.0" => Ok(LaplacianScale::One),
            "2/3" => Ok(LaplacianScale::TwoThirds),
            other => Err(Error::InvalidArgument(format!(
                "laplacian scale must be 1 or 2/3, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CalculusConfig {
    pub laplacian_scale: LaplacianScale,
}

impl CalculusConfig {
    pub fn new(laplacian_scale: LaplacianScale) -> Self {
        Self { laplacian_scale }
    }

    pub fn scale(&self) -> f64 {
        self.laplacian_scale.value()
    }
}

fn check_vertex(g: &Graph, x: usize) -> Result<()> {
    if x < g.len() {
        Ok(())
    } else {
        Err(Error::UnknownVertex(format!("#{x}")))
    }
}

/// ∇_xy f = f(y) - f(x).
pub fn edge_difference(g: &Graph, f: &VertexFunction, x: usize, y: usize) -> Result<f64> {
    check_vertex(g, x)?;
    check_vertex(g, y)?;
    if !g.adjacent(x, y) {
        return Err(Error::NotAdjacent(g.id(x).into(), g.id(y).into()));
    }
    Ok(f.at(g, y)? - f.at(g, x)?)
}

/// ∇f(x) with its squared length |∇f(x)|² = (1/d_x) Σ (∇_xy f)².
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub components: Vec<f64>,
    pub norm_sq: f64,
}

pub fn gradient(g: &Graph, f: &VertexFunction, x: usize) -> Result<Gradient> {
    check_vertex(g, x)?;
    let fx = f.at(g, x)?;
    let components = g
        .neighbors(x)
        .iter()
        .map(|&y| f.at(g, y).map(|fy| fy - fx))
        .collect::<Result<Vec<_>>>()?;
    let d = g.degree(x);
    let norm_sq = if d == 0 {
        0.0
    } else {
        components.iter().map(|c| c * c).sum::<f64>() / d as f64
    };
    Ok(Gradient {
        components,
        norm_sq,
    })
}

/// W·U(x) = (1/d_x) Σ_y w(xy) u(xy).
pub fn dot(g: &Graph, w: &VectorField, u: &VectorField, x: usize) -> Result<f64> {
    let a = w.at(g, x)?;
    let b = u.at(g, x)?;
    let d = g.degree(x);
    if d == 0 {
        return Ok(0.0);
    }
    Ok(a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>() / d as f64)
}

/// div W(x) = (1/d_x) Σ_y w(xy).
pub fn divergence(g: &Graph, w: &VectorField, x: usize) -> Result<f64> {
    check_vertex(g, x)?;
    let row = w.at(g, x)?;
    let d = g.degree(x);
    if d == 0 {
        return Ok(0.0);
    }
    Ok(row.iter().sum::<f64>() / d as f64)
}

/// d_x Δf(x) = s · Σ_y ∇_xy f, the degree-weighted Laplacian density.
pub fn weighted_laplacian(g: &Graph, f: &VertexFunction, x: usize, cfg: CalculusConfig) -> Result<f64> {
    check_vertex(g, x)?;
    let fx = f.at(g, x)?;
    let mut acc = Accumulator::new();
    for &y in g.neighbors(x) {
        acc.add(f.at(g, y)? - fx);
    }
    Ok(cfg.scale() * acc.value())
}

/// Δf(x) = s · (1/d_x) Σ_y (f(y) - f(x)).
pub fn laplacian(g: &Graph, f: &VertexFunction, x: usize, cfg: CalculusConfig) -> Result<f64> {
    let d = g.degree(x);
    let w = weighted_laplacian(g, f, x, cfg)?;
    Ok(if d == 0 { 0.0 } else { w / d as f64 })
}

/// W(f)(x) = (1/d_x) Σ_y w(xy) ∇_xy f.
pub fn directional_derivative(g: &Graph, w: &VectorField, f: &VertexFunction, x: usize) -> Result<f64> {
    let row = w.at(g, x)?;
    let grad = gradient(g, f, x)?;
    let d = g.degree(x);
    if d == 0 {
        return Ok(0.0);
    }
    Ok(row.iter().zip(&grad.components).map(|(a, b)| a * b).sum::<f64>() / d as f64)
}

/// (fW)(xy) = ½ (f(x) + f(y)) w(xy), on every vertex where both W and the
/// closed neighbourhood values of f are available.
pub fn pointwise_product(g: &Graph, f: &VertexFunction, w: &VectorField) -> Result<VectorField> {
    let mut entries = vec![None; g.len()];
    let mut any = false;
    for x in 0..g.len() {
        if !w.is_defined(x) {
            continue;
        }
        let row = w.at(g, x)?;
        let fx = f.at(g, x)?;
        let vals = g
            .neighbors(x)
            .iter()
            .zip(row)
            .map(|(&y, &wxy)| f.at(g, y).map(|fy| 0.5 * (fx + fy) * wxy))
            .collect::<Result<Vec<_>>>()?;
        entries[x] = Some(vals);
        any = true;
    }
    if !any {
        return Err(Error::SizeMismatch("field has an empty domain".into()));
    }
    Ok(VectorField::from_parts(entries, w.is_flagged_antisymmetric()))
}

/// The d_x × d_x matrix of second differences at a vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianMatrix {
    pub center: usize,
    pub neighbor_order: Vec<usize>,
    pub entries: Vec<Vec<f64>>,
}

impl HessianMatrix {
    pub fn trace(&self) -> f64 {
        (0..self.entries.len()).map(|i| self.entries[i][i]).sum()
    }

    pub fn is_entrywise_nonneg(&self) -> bool {
        self.entries.iter().flatten().all(|&v| v >= 0.0)
    }
}

/// H(f)(x)_{yz} = ½ (f(y) + f(z) - 2 f(x)).
pub fn hessian(g: &Graph, f: &VertexFunction, x: usize) -> Result<HessianMatrix> {
    check_vertex(g, x)?;
    let fx = f.at(g, x)?;
    let order = g.neighbors(x).to_vec();
    let vals = f.gather(g, &order)?;
    let entries = vals
        .iter()
        .map(|&fy| vals.iter().map(|&fz| 0.5 * (fy + fz - 2.0 * fx)).collect())
        .collect();
    Ok(HessianMatrix {
        center: x,
        neighbor_order: order,
        entries,
    })
}

/// (w1 +_H w2)(x)_{yz} = ½ (w1(xy) + w2(xz)).
pub fn hessian_sum(g: &Graph, w1: &VectorField, w2: &VectorField, x: usize) -> Result<Vec<Vec<f64>>> {
    let a = w1.at(g, x)?;
    let b = w2.at(g, x)?;
    Ok(a.iter()
        .map(|&p| b.iter().map(|&q| 0.5 * (p + q)).collect())
        .collect())
}

/// div (w1 +_H w2)(x) = (w1(xy) + w2(xy))_y.
pub fn hessian_sum_divergence(g: &Graph, w1: &VectorField, w2: &VectorField, x: usize) -> Result<Vec<f64>> {
    let a = w1.at(g, x)?;
    let b = w2.at(g, x)?;
    Ok(a.iter().zip(b).map(|(p, q)| p + q).collect())
}

/// div H(f)(x) = d_x ∇f(x).
pub fn hessian_divergence(g: &Graph, f: &VertexFunction, x: usize) -> Result<Vec<f64>> {
    let d = g.degree(x) as f64;
    Ok(gradient(g, f, x)?.components.into_iter().map(|c| d * c).collect())
}

/// ∫_A f = Σ_{x ∈ A} f(x) d_x.
pub fn integrate(g: &Graph, f: &VertexFunction, set: &[usize]) -> Result<f64> {
    let mut acc = Accumulator::new();
    for &x in set {
        check_vertex(g, x)?;
        acc.add_product(f.at(g, x)?, g.degree(x) as f64);
    }
    Ok(acc.value())
}

/// ∫_S |∇f|² = Σ_{x ∈ S} Σ_{y ∈ N(x)} (∇_xy f)².
pub fn dirichlet_energy(f: &VertexFunction, w: &SubgraphWindow) -> Result<f64> {
    dirichlet_form(f, f, w)
}

/// Bilinear version Σ_{x ∈ S} Σ_{y ∈ N(x)} ∇_xy f ∇_xy g.
pub fn dirichlet_form(f: &VertexFunction, h: &VertexFunction, w: &SubgraphWindow) -> Result<f64> {
    let g = w.host();
    let mut acc = Accumulator::new();
    for &x in w.interior() {
        let (fx, hx) = (f.at(g, x)?, h.at(g, x)?);
        for &y in g.neighbors(x) {
            acc.add_product(f.at(g, y)? - fx, h.at(g, y)? - hx);
        }
    }
    Ok(acc.value())
}

/// Σ_{x ∈ A} Σ_{y ∈ N(x) ∩ A} w(xy) for an antisymmetric field, i.e. the
/// total weighted divergence of the field zero-extended outside A.
pub fn divergence_theorem_residual(g: &Graph, w: &VectorField, set: &[usize]) -> Result<f64> {
    if !w.is_flagged_antisymmetric() {
        return Err(Error::NotAntisymmetric);
    }
    let mut inside = vec![false; g.len()];
    for &x in set {
        check_vertex(g, x)?;
        inside[x] = true;
    }
    let mut acc = Accumulator::new();
    for &x in set {
        let row = w.at(g, x)?;
        for (&y, &v) in g.neighbors(x).iter().zip(row) {
            if inside[y] {
                acc.add(v);
            }
        }
    }
    Ok(acc.value())
}

/// Flags from the maximum principle at one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximumPrincipleReport {
    pub is_local_min: bool,
    pub gradient_nonneg: bool,
    pub hessian_nonneg: bool,
    pub laplacian_nonneg: bool,
    pub laplacian: f64,
}

impl MaximumPrincipleReport {
    /// False only when x is a local minimum and some conclusion fails.
    pub fn holds(&self) -> bool {
        !self.is_local_min || (self.gradient_nonneg && self.hessian_nonneg && self.laplacian_nonneg)
    }
}

pub fn maximum_principle_check(
    g: &Graph,
    f: &VertexFunction,
    x: usize,
    cfg: CalculusConfig,
) -> Result<MaximumPrincipleReport> {
    let grad = gradient(g, f, x)?;
    let h = hessian(g, f, x)?;
    let lap = laplacian(g, f, x, cfg)?;
    let gradient_nonneg = grad.components.iter().all(|&c| c >= 0.0);
    Ok(MaximumPrincipleReport {
        is_local_min: gradient_nonneg,
        gradient_nonneg,
        hessian_nonneg: h.is_entrywise_nonneg(),
        laplacian_nonneg: lap >= 0.0,
        laplacian: lap,
    })
}
