//! Maps from a window into the unit two-sphere: energy, first variation,
//! a projected gradient flow, and Dirichlet minimization.
//!
//! E_S(u) = Σ_{x∈S̄} ½ Σ_{y∈N(x)∩S̄} d²(u(x), u(y)), so every edge inside S̄
//! contributes d² once. Its gradient in u(x) is −2 Σ_y log_{u(x)} u(y).

mod sphere;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Region, SubgraphWindow};
use crate::numerics::Accumulator;

pub use sphere::{cross, dot, norm, sphere_distance, sphere_exp, sphere_log, SpherePoint, Tangent};

/// Sphere-valued map on part of a host graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMap {
    values: Vec<Option<SpherePoint>>,
}

impl SphereMap {
    pub fn empty(n: usize) -> Self {
        Self { values: vec![None; n] }
    }

    pub fn constant(n: usize, p: SpherePoint) -> Self {
        Self { values: vec![Some(p); n] }
    }

    pub fn set(&mut self, v: usize, p: SpherePoint) {
        self.values[v] = Some(p);
    }

    pub fn get(&self, v: usize) -> Option<SpherePoint> {
        self.values.get(v).copied().flatten()
    }

    pub fn at(&self, g: &Graph, v: usize) -> Result<SpherePoint> {
        self.get(v).ok_or_else(|| Error::OutOfDomain(g.id(v).to_string()))
    }

    pub fn host_len(&self) -> usize {
        self.values.len()
    }

    /// Parse `vertex,x,y,z` rows; every point is normalized.
    pub fn from_csv(g: &Graph, text: &str) -> Result<Self> {
        use crate::graph::io_helpers::{csv_records, parse_number};
        let mut map = Self::empty(g.len());
        for row in csv_records(text, &["vertex", "x", "y", "z"])? {
            let v = g.index_of(&row[0])?;
            if map.values[v].is_some() {
                return Err(Error::Parse(format!("vertex {:?} listed twice", row[0])));
            }
            let p = SpherePoint::new([parse_number(&row[1])?, parse_number(&row[2])?, parse_number(&row[3])?])?;
            map.set(v, p);
        }
        Ok(map)
    }

    /// `(id, coords)` for defined vertices in `order`.
    pub fn rows<'a>(&'a self, g: &'a Graph, order: &'a [usize]) -> impl Iterator<Item = (&'a str, [f64; 3])> + 'a {
        order
            .iter()
            .filter_map(move |&v| self.get(v).map(|p| (g.id(v), p.coords())))
    }
}

fn antipodal(g: &Graph, x: usize, y: usize, e: Error) -> Error {
    match e {
        Error::Antipodal(..) => Error::Antipodal(g.id(x).to_string(), g.id(y).to_string()),
        other => other,
    }
}

/// E_S(u) = Σ_{x∈S̄} d_x e(u)(x) with neighbour sums restricted to S̄.
pub fn map_energy(u: &SphereMap, w: &SubgraphWindow) -> Result<f64> {
    let g = w.host();
    let mut acc = Accumulator::new();
    for &x in w.closure() {
        let ux = u.at(g, x)?;
        for &y in g.neighbors(x) {
            if w.region(y) != Region::Outside {
                let d = sphere_distance(&ux, &u.at(g, y)?);
                acc.add_product(0.5 * d, d);
            }
        }
    }
    Ok(acc.value())
}

/// Intrinsic gradient of E_S with respect to u(x), x ∈ S:
/// −2 Σ_{y~x} log_{u(x)} u(y), which is 2 d_x times the tension
/// −(1/d_x) Σ_y log_{u(x)} u(y).
pub fn first_variation(u: &SphereMap, w: &SubgraphWindow, x: usize) -> Result<Tangent> {
    let g = w.host();
    if w.region(x) != Region::Interior {
        return Err(Error::InvalidArgument(format!("{:?} is not an interior vertex", g.id(x))));
    }
    let ux = u.at(g, x)?;
    let mut out = [Accumulator::new(), Accumulator::new(), Accumulator::new()];
    for &y in g.neighbors(x) {
        let l = sphere_log(&ux, &u.at(g, y)?).map_err(|e| antipodal(g, x, y, e))?;
        for k in 0..3 {
            out[k].add(-2.0 * l[k]);
        }
    }
    Ok([out[0].value(), out[1].value(), out[2].value()])
}

/// −div W(x) + ½ M(u)(x), tangent-projected at u(x), with
/// W(xy) = d ∂₂d and M(u)(x) = (1/d_x) Σ_y d (∂₁d + ∂₂d), where
/// ∂₁d(p,q) = −q / sin θ and ∂₂d(p,q) = −p / sin θ are the coordinate
/// partials of arccos(p·q).
///
/// ∂₂d is radial at p and projects away, leaving −(1/(2d_x)) Σ_y log;
/// [`first_variation`] equals 4 d_x times this residual.
pub fn ambient_residual(u: &SphereMap, w: &SubgraphWindow, x: usize) -> Result<Tangent> {
    let g = w.host();
    if w.region(x) != Region::Interior {
        return Err(Error::InvalidArgument(format!("{:?} is not an interior vertex", g.id(x))));
    }
    let p = u.at(g, x)?;
    let pc = p.coords();
    let dx = g.degree(x) as f64;
    let mut div_w = [0.0; 3];
    let mut m = [0.0; 3];
    for &y in g.neighbors(x) {
        let q = u.at(g, y)?;
        let qc = q.coords();
        let sine = norm(&cross(&pc, &qc));
        let cosine = dot(&pc, &qc);
        if sine < 1e-12 && cosine < 0.0 {
            return Err(Error::Antipodal(g.id(x).to_string(), g.id(y).to_string()));
        }
        let theta = sine.atan2(cosine);
        let ratio = if theta < 1e-8 { 1.0 } else { theta / sine };
        // d·∂₁d and d·∂₂d
        let d1 = sphere::scale(&qc, -ratio);
        let d2 = sphere::scale(&pc, -ratio);
        for k in 0..3 {
            div_w[k] += d2[k] / dx;
            m[k] += (d1[k] + d2[k]) / dx;
        }
    }
    let raw = [
        -div_w[0] + 0.5 * m[0],
        -div_w[1] + 0.5 * m[1],
        -div_w[2] + 0.5 * m[2],
    ];
    Ok(p.project(&raw))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowOutcome {
    Converged,
    StepCapReached,
    /// No step size down to 2^-60 of the current one lowers the energy.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowRecord {
    pub step: usize,
    pub energy: f64,
    pub tau: f64,
    pub max_variation: f64,
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub map: SphereMap,
    pub outcome: FlowOutcome,
    pub steps: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub max_variation: f64,
    /// Energy before each accepted step, then the final state. Energies
    /// after the first are tracked as E_0 plus the accumulated
    /// [`energy_change`], which makes the sequence exactly nonincreasing.
    pub history: Vec<FlowRecord>,
    /// The step size actually used at the start.
    pub tau_used: f64,
}


fn max_variation(u: &SphereMap, w: &SubgraphWindow) -> Result<(Vec<Tangent>, f64)> {
    let vars = w
        .interior()
        .iter()
        .map(|&x| first_variation(u, w, x))
        .collect::<Result<Vec<_>>>()?;
    let worst = vars.iter().map(norm).fold(0.0, f64::max);
    Ok((vars, worst))
}

/// Projected gradient descent u(x) ← exp_{u(x)}(−τ ∇_x E) on the interior,
/// boundary values frozen.
///
/// τ is capped at 1/(2 d_max), where a step moves each vertex to at most
/// the geodesic mean of its neighbours. It is halved whenever a step would
/// raise the energy and doubled back after each accepted step. Stops when
/// max_x ‖∇_x E‖ ≤ tol, after `max_steps` accepted steps, or when no step
/// size lowers the energy.
pub fn harmonic_heat_flow(
    u0: &SphereMap,
    w: &SubgraphWindow,
    tau: f64,
    max_steps: usize,
    tol: f64,
) -> Result<FlowResult> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let g = w.host();
    for &x in w.closure() {
        u0.at(g, x)?;
    }
    let d_max = w.interior().iter().map(|&x| g.degree(x)).max().unwrap_or(1) as f64;
    let tau_used = tau.min(1.0 / (2.0 * d_max));
    let mut tau_k = tau_used;
    let mut u = u0.clone();
    let mut energy = map_energy(&u, w)?;
    let initial_energy = energy;
    let mut history = Vec::new();
    let mut steps = 0;
    loop {
        let (vars, worst) = max_variation(&u, w)?;
        history.push(FlowRecord {
            step: steps,
            energy,
            tau: tau_k,
            max_variation: worst,
        });
        let outcome = if worst <= tol {
            Some(FlowOutcome::Converged)
        } else if steps >= max_steps {
            Some(FlowOutcome::StepCapReached)
        } else {
            let r = descend(&mut u, &mut energy, &mut tau_k, &vars, w)?;
            tau_k = (2.0 * tau_k).min(tau_used);
            r
        };
        if let Some(outcome) = outcome {
            return Ok(FlowResult {
                map: u,
                outcome,
                steps,
                initial_energy,
                final_energy: energy,
                max_variation: worst,
                history,
                tau_used,
            });
        }
        steps += 1;
    }
}

/// E_S(next) − E_S(u), accurate relative to its own size rather than to E.
///
/// For each edge the change of the angle is atan2(Δs·c − Δc·s, c c′ + s s′),
/// with Δc and Δs expanded in the coordinate differences p′ − p and q′ − q,
/// which are exact for nearby points. Comparing two separately rounded
/// energies cannot resolve changes below ε·E; this can.
pub fn energy_change(u: &SphereMap, next: &SphereMap, w: &SubgraphWindow) -> Result<f64> {
    let g = w.host();
    let mut acc = Accumulator::new();
    for &x in w.closure() {
        for &y in g.neighbors(x) {
            if y < x || w.region(y) == Region::Outside {
                continue;
            }
            let (p, q) = (u.at(g, x)?.coords(), u.at(g, y)?.coords());
            let (p1, q1) = (next.at(g, x)?.coords(), next.at(g, y)?.coords());
            let (dp, dq) = (sphere::sub(&p1, &p), sphere::sub(&q1, &q));
            let c = dot(&p, &q);
            let cross_pq = cross(&p, &q);
            let s = norm(&cross_pq);
            let dc = dot(&dp, &q) + dot(&p, &dq) + dot(&dp, &dq);
            let dx = sphere::add(&sphere::add(&cross(&dp, &q), &cross(&p, &dq)), &cross(&dp, &dq));
            let s1 = norm(&sphere::add(&cross_pq, &dx));
            let ds = if s + s1 > 0.0 {
                (2.0 * dot(&cross_pq, &dx) + dot(&dx, &dx)) / (s + s1)
            } else {
                0.0
            };
            let c1 = c + dc;
            let theta = s.atan2(c);
            let dtheta = (ds * c - dc * s).atan2(c * c1 + s * s1);
            acc.add(dtheta * (2.0 * theta + dtheta));
        }
    }
    Ok(acc.value())
}

/// Halvings of τ tried before a step is declared stalled.
const MAX_HALVINGS: u32 = 60;

/// One accepted step, halving τ until the energy does not rise.
fn descend(
    u: &mut SphereMap,
    energy: &mut f64,
    tau: &mut f64,
    vars: &[Tangent],
    w: &SubgraphWindow,
) -> Result<Option<FlowOutcome>> {
    let g = w.host();
    for _ in 0..MAX_HALVINGS {
        let mut next = u.clone();
        for (&x, v) in w.interior().iter().zip(vars) {
            next.set(x, sphere_exp(&u.at(g, x)?, &sphere::scale(v, -*tau)));
        }
        let change = energy_change(u, &next, w)?;
        if change <= 0.0 && next != *u {
            *u = next;
            *energy += change;
            return Ok(None);
        }
        *tau *= 0.5;
    }
    Ok(Some(FlowOutcome::Stalled))
}

/// Interior seed: ten Gauss–Seidel sweeps of normalized neighbour averaging,
/// starting from the boundary values; (0,0,1) where no direction emerges.
pub fn seed_interior(phi: &SphereMap, w: &SubgraphWindow) -> Result<SphereMap> {
    let g = w.host();
    let mut u = SphereMap::empty(g.len());
    for &b in w.boundary() {
        u.set(b, phi.at(g, b)?);
    }
    let fallback = SpherePoint::new([0.0, 0.0, 1.0]).expect("unit");
    for _ in 0..10 {
        for &x in w.interior() {
            let mut sum = [0.0; 3];
            for &y in g.neighbors(x) {
                if let Some(p) = u.get(y) {
                    sum = sphere::add(&sum, &p.coords());
                }
            }
            let p = if norm(&sum) > 1e-12 {
                SpherePoint::new(sum)?
            } else {
                u.get(x).unwrap_or(fallback)
            };
            u.set(x, p);
        }
    }
    Ok(u)
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub map: SphereMap,
    pub seed_energy: f64,
    pub energy: f64,
    pub max_variation: f64,
    pub steps: usize,
    /// `Converged`, or `Stalled` when the energy floor was hit above `tol`.
    pub outcome: FlowOutcome,
    /// E(u) ≤ E(seed).
    pub certified: bool,
    pub history: Vec<FlowRecord>,
}

/// Default step cap for [`dirichlet_minimize`].
pub const MINIMIZE_MAX_STEPS: usize = 200_000;

/// Minimize E_S over maps with the given boundary values.
pub fn dirichlet_minimize(phi: &SphereMap, w: &SubgraphWindow, tol: f64) -> Result<MinimizeResult> {
    let seed = seed_interior(phi, w)?;
    let flow = harmonic_heat_flow(&seed, w, f64::INFINITY, MINIMIZE_MAX_STEPS, tol)?;
    if flow.outcome == FlowOutcome::StepCapReached {
        return Err(Error::NoConvergence(format!(
            "map flow stopped after {} steps with max variation {:.3e}",
            flow.steps, flow.max_variation
        )));
    }
    Ok(MinimizeResult {
        certified: flow.final_energy <= flow.initial_energy,
        map: flow.map,
        seed_energy: flow.initial_energy,
        energy: flow.final_energy,
        max_variation: flow.max_variation,
        steps: flow.steps,
        outcome: flow.outcome,
        history: flow.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn sp(x: f64, y: f64, z: f64) -> SpherePoint {
        SpherePoint::new([x, y, z]).unwrap()
    }

    fn p3_map(mid: SpherePoint) -> (SubgraphWindow, SphereMap) {
        let g = Arc::new(fixtures::path(3));
        let w = SubgraphWindow::new(g, &[1]).unwrap();
        let mut u = SphereMap::empty(3);
        u.set(0, sp(1.0, 0.0, 0.0));
        u.set(1, mid);
        u.set(2, sp(0.0, 1.0, 0.0));
        (w, u)
    }

    #[test]
    fn energy_examples() {
        let (w, u) = p3_map(sp(1.0, 1.0, 0.0));
        assert!((map_energy(&u, &w).unwrap() - PI * PI / 8.0).abs() < 1e-14);
        let k2 = Arc::new(fixtures::complete(2));
        let w = SubgraphWindow::whole(k2).unwrap();
        let mut u = SphereMap::empty(2);
        u.set(0, sp(1.0, 0.0, 0.0));
        u.set(1, sp(0.0, 0.0, 1.0));
        assert!((map_energy(&u, &w).unwrap() - PI * PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn variation_and_ambient_residual() {
        let (w, u) = p3_map(sp(1.0, 1.0, 0.0));
        assert!(norm(&first_variation(&u, &w, 1).unwrap()) < 1e-15);
        let (w, u) = p3_map(sp(1.0, 0.2, 0.3));
        let v = first_variation(&u, &w, 1).unwrap();
        let r = ambient_residual(&u, &w, 1).unwrap();
        for k in 0..3 {
            assert!((v[k] - 8.0 * r[k]).abs() < 1e-13, "{v:?} {r:?}");
        }
    }

    #[test]
    fn p3_flow_reaches_midpoint() {
        let (w, u0) = p3_map(sp(0.0, 0.0, 1.0));
        let r = harmonic_heat_flow(&u0, &w, 0.5, 10_000, 1e-10).unwrap();
        assert_eq!(r.outcome, FlowOutcome::Converged);
        let mid = r.map.get(1).unwrap();
        assert!(sphere_distance(&mid, &sp(1.0, 1.0, 0.0)) < 1e-8);
        assert!(r.history.windows(2).all(|p| p[1].energy <= p[0].energy));
    }

    #[test]
    fn step_cap_is_reported() {
        let (w, u0) = p3_map(sp(0.0, 0.0, 1.0));
        let r = harmonic_heat_flow(&u0, &w, 0.5, 2, 1e-14).unwrap();
        assert_eq!((r.outcome, r.steps), (FlowOutcome::StepCapReached, 2));
    }

    #[test]
    fn constant_boundary_is_fixed_point() {
        let g = Arc::new(fixtures::grid(4, 4));
        let w = SubgraphWindow::new(g, &[5, 6, 9, 10]).unwrap();
        let p = sp(0.3, -0.2, 0.9);
        let r = harmonic_heat_flow(&SphereMap::constant(16, p), &w, 0.5, 10, 1e-12).unwrap();
        assert_eq!((r.steps, r.final_energy), (0, 0.0));
        let m = dirichlet_minimize(&SphereMap::constant(16, p), &w, 1e-10).unwrap();
        assert!(m.energy < 1e-28);
    }
}
