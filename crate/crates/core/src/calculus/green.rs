//! Summation-by-parts identities on a window, evaluated term by term.

use serde::Serialize;

use super::{CalculusConfig, VectorField};
use crate::error::Result;
use crate::graph::{Region, SubgraphWindow, VertexFunction};
use crate::numerics::Accumulator;

/// Terms of Σ_S d_x Δf g = interior + boundary.
///
/// `residual` is the identity that follows from the definitions and must
/// vanish. `stated_form_residual` measures the variant with the full
/// interior-incident energy −(s/2) Σ_{x∈S} Σ_{y~x} ∇f ∇g in place of the
/// S–S sum; `dirichlet_three_halves_residual` (present when f vanishes on
/// δS) measures lhs = −(3s/2) Σ_{x∈S} Σ_{y~x} ∇f ∇g. Neither variant holds
/// in general; they are reported, never asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenSymmetricReport {
    pub laplacian_scale: f64,
    pub lhs: f64,
    pub interior_term: f64,
    pub boundary_term: f64,
    pub residual: f64,
    pub stated_form_rhs: f64,
    pub stated_form_residual: f64,
    pub dirichlet_three_halves_residual: Option<f64>,
}

pub fn green_symmetric_report(
    f: &VertexFunction,
    g2: &VertexFunction,
    w: &SubgraphWindow,
    cfg: CalculusConfig,
) -> Result<GreenSymmetricReport> {
    let host = w.host();
    let s = cfg.scale();
    let mut lhs = Accumulator::new();
    let mut inner = Accumulator::new();
    let mut bdry = Accumulator::new();
    let mut full = Accumulator::new();
    let mut resid = Accumulator::new();
    for &x in w.interior() {
        let fx = f.at(host, x)?;
        let gx = g2.at(host, x)?;
        for &y in host.neighbors(x) {
            let df = f.at(host, y)? - fx;
            let dg = g2.at(host, y)? - gx;
            lhs.add_product(df, gx);
            resid.add_product(df, gx);
            full.add_product(df, dg);
            match w.region(y) {
                Region::Interior => {
                    inner.add_product(df, dg);
                    resid.add_product(0.5 * df, dg);
                }
                _ => {
                    bdry.add_product(gx, df);
                    resid.add_product(-gx, df);
                }
            }
        }
    }
    let lhs = s * lhs.value();
    let interior_term = -0.5 * s * inner.value();
    let boundary_term = s * bdry.value();
    let stated_form_rhs = -0.5 * s * full.value() + boundary_term;
    let dirichlet = w
        .boundary()
        .iter()
        .all(|&b| f.is_defined(b) && f.raw(b) == 0.0);
    Ok(GreenSymmetricReport {
        laplacian_scale: s,
        lhs,
        interior_term,
        boundary_term,
        residual: s * resid.value(),
        stated_form_rhs,
        stated_form_residual: lhs - stated_form_rhs,
        dirichlet_three_halves_residual: dirichlet.then(|| lhs + 1.5 * s * full.value()),
    })
}

/// Terms of ∫_S (div W) f = −½ ∫_S W·∇f + ∫_S div(fW).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenVectorFieldReport {
    pub integral_div_w_f: f64,
    pub minus_half_w_dot_grad: f64,
    pub integral_div_fw: f64,
    pub residual: f64,
}

pub fn green_vectorfield_report(
    field: &VectorField,
    f: &VertexFunction,
    w: &SubgraphWindow,
) -> Result<GreenVectorFieldReport> {
    let host = w.host();
    let mut lhs = Accumulator::new();
    let mut dot = Accumulator::new();
    let mut prod = Accumulator::new();
    let mut resid = Accumulator::new();
    for &x in w.interior() {
        let row = field.at(host, x)?;
        let fx = f.at(host, x)?;
        for (&y, &wxy) in host.neighbors(x).iter().zip(row) {
            let fy = f.at(host, y)?;
            let diff = fy - fx;
            let avg = 0.5 * (fx + fy);
            lhs.add_product(wxy, fx);
            dot.add_product(wxy, diff);
            prod.add_product(wxy, avg);
            resid.add_product(wxy, fx);
            resid.add_product(wxy, 0.5 * diff);
            resid.add_product(-wxy, avg);
        }
    }
    Ok(GreenVectorFieldReport {
        integral_div_w_f: lhs.value(),
        minus_half_w_dot_grad: -0.5 * dot.value(),
        integral_div_fw: prod.value(),
        residual: resid.value(),
    })
}
