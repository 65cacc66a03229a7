//! Seeded batch runner for the calculus identities.

use std::sync::Arc;

use serde::Serialize;

use super::{
    divergence, divergence_theorem_residual, dot, edge_difference, green_symmetric_report,
    green_vectorfield_report, hessian, laplacian, maximum_principle_check, pointwise_product,
    CalculusConfig, LaplacianScale, VectorField,
};
use crate::error::Result;
use crate::graph::{Graph, SubgraphWindow, VertexFunction};
use crate::numerics::Lcg64;

/// Range of the random values fed to every check.
pub const VALUE_RANGE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub instances: usize,
    pub max_abs_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximumPrincipleSummary {
    pub vertices_checked: usize,
    pub local_minima: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub trials: usize,
    pub laplacian_scale: LaplacianScale,
    pub checks: Vec<CheckSummary>,
    pub maximum_principle: MaximumPrincipleSummary,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.max_abs_residual)
            .fold(0.0, f64::max)
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Random connected window grown breadth-first from a random seed vertex.
pub fn random_window(g: &Arc<Graph>, rng: &mut Lcg64) -> Result<SubgraphWindow> {
    let n = g.len();
    let target = 1 + rng.below(n);
    let start = rng.below(n);
    let mut inside = vec![false; n];
    inside[start] = true;
    let mut members = vec![start];
    let mut frontier: Vec<usize> = g.neighbors(start).to_vec();
    while members.len() < target && !frontier.is_empty() {
        let pick = frontier.swap_remove(rng.below(frontier.len()));
        if inside[pick] {
            continue;
        }
        inside[pick] = true;
        members.push(pick);
        frontier.extend(g.neighbors(pick).iter().filter(|&&y| !inside[y]));
    }
    SubgraphWindow::new(g.clone(), &members)
}

fn random_function(n: usize, rng: &mut Lcg64) -> VertexFunction {
    VertexFunction::full(rng.vector(n, -VALUE_RANGE, VALUE_RANGE))
}

fn random_field(g: &Graph, rng: &mut Lcg64) -> VectorField {
    let all: Vec<usize> = (0..g.len()).collect();
    VectorField::from_fn(g, &all, |_, _| rng.uniform(-VALUE_RANGE, VALUE_RANGE))
}

struct Tracker {
    name: &'static str,
    instances: usize,
    max: f64,
}

impl Tracker {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            instances: 0,
            max: 0.0,
        }
    }

    fn record(&mut self, r: f64) {
        self.instances += 1;
        // NaN must surface as a failure
        if r.is_nan() || r.abs() > self.max {
            self.max = if r.is_nan() { f64::INFINITY } else { r.abs() };
        }
    }

    fn finish(self) -> CheckSummary {
        CheckSummary {
            name: self.name,
            instances: self.instances,
            max_abs_residual: self.max,
        }
    }
}

/// Run every identity check `trials` times on seeded random data.
///
/// Each trial draws a window, two functions and two fields, then records
/// the divergence theorem, both Green identities, the two product rules,
/// linearity of Δ and div, the Hessian trace identity and the maximum
/// principle at every vertex.
pub fn run_identity_suite(
    g: &Arc<Graph>,
    seed: u64,
    trials: usize,
    cfg: CalculusConfig,
) -> Result<IdentityReport> {
    let mut rng = Lcg64::new(seed);
    let n = g.len();
    let mut div_thm = Tracker::new("divergence_theorem");
    let mut green_sym = Tracker::new("green_symmetric");
    let mut green_vf = Tracker::new("green_vectorfield");
    let mut prod_grad = Tracker::new("product_rule_gradient");
    let mut prod_div = Tracker::new("product_rule_divergence");
    let mut linear = Tracker::new("linearity");
    let mut trace = Tracker::new("hessian_trace");
    let mut mp = MaximumPrincipleSummary {
        vertices_checked: 0,
        local_minima: 0,
        violations: 0,
    };
    let one = CalculusConfig::new(LaplacianScale::One);

    for _ in 0..trials {
        let window = random_window(g, &mut rng)?;
        let f = random_function(n, &mut rng);
        let h = random_function(n, &mut rng);
        let field = random_field(g, &mut rng);
        let other = random_field(g, &mut rng);
        let anti = VectorField::antisymmetric_from_edges(g, |_, _| rng.uniform(-VALUE_RANGE, VALUE_RANGE));
        let (alpha, beta) = (rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));

        div_thm.record(divergence_theorem_residual(g, &anti, window.interior())?);
        green_sym.record(green_symmetric_report(&f, &h, &window, cfg)?.residual);
        green_vf.record(green_vectorfield_report(&field, &f, &window)?.residual);

        let fh = VertexFunction::full((0..n).map(|v| f.raw(v) * h.raw(v)).collect());
        for (x, y) in g.edges() {
            let df = edge_difference(g, &f, x, y)?;
            let dh = edge_difference(g, &h, x, y)?;
            let lhs = edge_difference(g, &fh, x, y)?;
            prod_grad.record(lhs - (df * dh + f.raw(x) * dh + h.raw(x) * df));
        }

        let fw = pointwise_product(g, &f, &field)?;
        let grad_f = VectorField::gradient_of(g, &f);
        let combo_f = f.combine(alpha, &h, beta);
        let combo_w = field.combine(alpha, &other, beta);
        for x in 0..n {
            let lhs = divergence(g, &fw, x)?;
            let rhs = f.raw(x) * divergence(g, &field, x)? + 0.5 * dot(g, &grad_f, &field, x)?;
            prod_div.record(lhs - rhs);

            let lap = laplacian(g, &combo_f, x, cfg)?
                - (alpha * laplacian(g, &f, x, cfg)? + beta * laplacian(g, &h, x, cfg)?);
            linear.record(lap);
            let dv = divergence(g, &combo_w, x)?
                - (alpha * divergence(g, &field, x)? + beta * divergence(g, &other, x)?);
            linear.record(dv);

            let tr = hessian(g, &f, x)?.trace() - g.degree(x) as f64 * laplacian(g, &f, x, one)?;
            trace.record(tr);

            let report = maximum_principle_check(g, &f, x, cfg)?;
            mp.vertices_checked += 1;
            if report.is_local_min {
                mp.local_minima += 1;
            }
            if !report.holds() {
                mp.violations += 1;
            }
        }
    }

    Ok(IdentityReport {
        seed,
        trials,
        laplacian_scale: cfg.laplacian_scale,
        checks: vec![
            div_thm.finish(),
            green_sym.finish(),
            green_vf.finish(),
            prod_grad.finish(),
            prod_div.finish(),
            linear.finish(),
            trace.finish(),
        ],
        maximum_principle: mp,
    })
}
