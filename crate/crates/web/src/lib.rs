//! Browser bindings for three interactive views: a spectrum explorer over
//! the named fixtures, heat diffusion on a grid, and a sphere-valued
//! harmonic map on a grid disk.
//!
//! Each view has a plain-Rust entry point (tested natively) and a thin
//! `wasm_bindgen` wrapper that turns errors into JS exceptions.

use std::f64::consts::TAU;
use std::sync::Arc;

use graphcalc::calculus::CalculusConfig;
use graphcalc::harmonic::{dirichlet_minimize, map_energy, SphereMap, SpherePoint};
use graphcalc::spectral::{eigensystem, BoundaryCondition, EigenSystem, HeatKernel, OperatorSpec, Reconstruction};
use graphcalc::{fixtures, Error, Result, SubgraphWindow, VertexFunction};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest grid side accepted by the grid views.
pub const MAX_SIDE: usize = 12;

#[derive(Debug, Serialize)]
pub struct SpectrumView {
    pub vertices: Vec<String>,
    pub interior: Vec<String>,
    pub values: Vec<f64>,
    /// One row per eigenvalue, over `vertices`.
    pub functions: Vec<Vec<f64>>,
}

/// Spectrum of a named fixture on the window with the given interior ids
/// (empty for the whole graph).
pub fn spectrum_view(fixture: &str, interior: &[&str], bc: &str) -> Result<SpectrumView> {
    let g = Arc::new(
        fixtures::by_name(fixture).ok_or_else(|| Error::InvalidArgument(format!("unknown fixture {fixture:?}")))?,
    );
    let w = if interior.is_empty() {
        SubgraphWindow::whole(g.clone())?
    } else {
        SubgraphWindow::from_ids(g.clone(), interior)?
    };
    let spec = OperatorSpec::new(w.clone(), None, bc.parse()?, CalculusConfig::default())?;
    let es = eigensystem(&spec)?;
    let closure = w.closure();
    Ok(SpectrumView {
        vertices: closure.iter().map(|&v| g.id(v).to_string()).collect(),
        interior: w.interior_ids().iter().map(|s| s.to_string()).collect(),
        functions: es
            .functions
            .iter()
            .map(|f| f.gather(&g, closure))
            .collect::<Result<_>>()?,
        values: es.values,
    })
}

fn check_side(rows: usize, cols: usize) -> Result<()> {
    if (3..=MAX_SIDE).contains(&rows) && (3..=MAX_SIDE).contains(&cols) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("grid sides must lie in 3..={MAX_SIDE}")))
    }
}

/// Heat flow on a rows × cols grid from a unit spike, with the outer ring
/// held at zero or the whole grid insulated.
#[wasm_bindgen]
pub struct GridHeat {
    rows: usize,
    cols: usize,
    es: EigenSystem,
    data: VertexFunction,
}

impl GridHeat {
    pub fn build(rows: usize, cols: usize, spike_row: usize, spike_col: usize, dirichlet: bool) -> Result<Self> {
        check_side(rows, cols)?;
        if spike_row >= rows || spike_col >= cols {
            return Err(Error::InvalidArgument("spike lies outside the grid".into()));
        }
        let g = Arc::new(fixtures::grid(rows, cols));
        let (w, bc) = if dirichlet {
            let inner: Vec<usize> = (1..rows - 1)
                .flat_map(|r| (1..cols - 1).map(move |c| fixtures::grid_index(cols, r, c)))
                .collect();
            (SubgraphWindow::new(g.clone(), &inner)?, BoundaryCondition::Dirichlet)
        } else {
            (SubgraphWindow::whole(g.clone())?, BoundaryCondition::None)
        };
        let es = eigensystem(&OperatorSpec::new(w.clone(), None, bc, CalculusConfig::default())?)?;
        let spike = fixtures::grid_index(cols, spike_row, spike_col);
        let mut data = VertexFunction::empty(g.len());
        for &x in w.closure() {
            data.set(x, if x == spike && w.interior_position(x).is_some() { 1.0 } else { 0.0 });
        }
        Ok(Self { rows, cols, es, data })
    }

    /// u(t) in row-major order; cells outside the window read 0.
    pub fn values(&self, t: f64) -> Result<Vec<f64>> {
        let u = HeatKernel::new(&self.es).reconstruct(t, &self.data, Reconstruction::Weighted)?;
        Ok((0..self.rows * self.cols)
            .map(|v| if u.is_defined(v) { u.raw(v) } else { 0.0 })
            .collect())
    }
}

#[wasm_bindgen]
impl GridHeat {
    #[wasm_bindgen(constructor)]
    pub fn new(rows: usize, cols: usize, spike_row: usize, spike_col: usize, dirichlet: bool) -> std::result::Result<GridHeat, JsError> {
        Self::build(rows, cols, spike_row, spike_col, dirichlet).map_err(js)
    }

    pub fn state(&self, t: f64) -> std::result::Result<Vec<f64>, JsError> {
        self.values(t).map_err(js)
    }

    /// Eigenvalues of the operator, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        self.es.values.clone()
    }
}

#[derive(Debug, Serialize)]
pub struct DiskMap {
    pub rows: usize,
    pub cols: usize,
    /// Row-major points on S².
    pub points: Vec<[f64; 3]>,
    pub energy: f64,
    pub steps: usize,
}

/// Harmonic map of an n × n grid whose outer ring winds `turns` times
/// around the circle of height `height` on the sphere.
pub fn disk_map(n: usize, height: f64, turns: i32) -> Result<DiskMap> {
    check_side(n, n)?;
    if !(height.abs() < 1.0) {
        return Err(Error::InvalidArgument("height must lie in (-1, 1)".into()));
    }
    let g = Arc::new(fixtures::grid(n, n));
    let ring: Vec<(usize, usize)> = (0..n - 1)
        .map(|c| (0, c))
        .chain((0..n - 1).map(|r| (r, n - 1)))
        .chain((1..n).rev().map(|c| (n - 1, c)))
        .chain((1..n).rev().map(|r| (r, 0)))
        .collect();
    let radius = (1.0 - height * height).sqrt();
    let mut phi = SphereMap::empty(g.len());
    for (k, &(r, c)) in ring.iter().enumerate() {
        let a = TAU * turns as f64 * k as f64 / ring.len() as f64;
        phi.set(fixtures::grid_index(n, r, c), SpherePoint::new([radius * a.cos(), radius * a.sin(), height])?);
    }
    let inner: Vec<usize> = (1..n - 1)
        .flat_map(|r| (1..n - 1).map(move |c| fixtures::grid_index(n, r, c)))
        .collect();
    let w = SubgraphWindow::new(g.clone(), &inner)?;
    let result = dirichlet_minimize(&phi, &w, 1e-8)?;
    let mut points = Vec::with_capacity(n * n);
    for v in 0..n * n {
        // corners lie outside the closure; show them at their ring value
        let p = result.map.get(v).or_else(|| phi.get(v));
        points.push(p.map_or([0.0, 0.0, 1.0], |p| p.coords()));
    }
    Ok(DiskMap {
        rows: n,
        cols: n,
        points,
        energy: map_energy(&result.map, &w)?,
        steps: result.steps,
    })
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable view")
}

/// Names of the built-in fixtures, as a JSON array.
#[wasm_bindgen(js_name = fixtureNames)]
pub fn fixture_names() -> String {
    to_json(&fixtures::all().iter().map(|(n, _)| *n).collect::<Vec<_>>())
}

/// Vertex ids of a fixture, as a JSON array.
#[wasm_bindgen(js_name = fixtureVertices)]
pub fn fixture_vertices(fixture: &str) -> std::result::Result<String, JsError> {
    let g = fixtures::by_name(fixture).ok_or_else(|| JsError::new("unknown fixture"))?;
    Ok(to_json(&g.ids()))
}

/// `interior` is a comma-separated id list, empty for the whole graph.
#[wasm_bindgen]
pub fn spectrum(fixture: &str, interior: &str, bc: &str) -> std::result::Result<String, JsError> {
    let ids: Vec<&str> = interior.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    spectrum_view(fixture, &ids, bc).map(|v| to_json(&v)).map_err(js)
}

#[wasm_bindgen(js_name = harmonicDisk)]
pub fn harmonic_disk(n: usize, height: f64, turns: i32) -> std::result::Result<String, JsError> {
    disk_map(n, height, turns).map(|m| to_json(&m)).map_err(js)
}
