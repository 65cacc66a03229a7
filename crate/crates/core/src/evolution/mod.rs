//! Heat flow by spectral expansion, first-order transport, and the discrete
//! Morse flow for ∂_t u = Δu + V(t)u.

mod dmf;
mod potential;

use serde::Serialize;

use crate::calculus::{dirichlet_energy, VectorField};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexFunction};
use crate::numerics::Accumulator;
use crate::spectral::{eigensystem, BoundaryCondition, HeatKernel, OperatorSpec, Reconstruction};

pub use dmf::{
    dmf_convergence_study, dmf_run, dmf_step, ConvergenceMode, ConvergenceReport, DmfBound, DmfRun,
    DmfStep, LedgerEntry,
};
pub use potential::Potential;

/// Largest time step accepted by the differential checks.
pub const MAX_CHECK_STEP: f64 = 1e-2;

/// Sampled solution u(t) at increasing times starting at 0.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub scheme: &'static str,
    pub step: Option<f64>,
    pub times: Vec<f64>,
    pub states: Vec<VertexFunction>,
    /// Vertices carried by every state, in output order.
    pub vertices: Vec<usize>,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::InvalidArgument("time grid must start at 0".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// `n + 1` equally spaced times covering [0, t_end].
pub fn uniform_times(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
}

/// Verify that f obeys the operator's boundary condition where defined.
pub fn check_boundary(spec: &OperatorSpec, f: &VertexFunction) -> Result<()> {
    let w = spec.window();
    let g = w.host();
    let inner = f.gather(g, w.interior())?;
    let implied = spec.extend(&inner);
    let scale = inner.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for &b in w.boundary() {
        if f.is_defined(b) && (f.raw(b) - implied.raw(b)).abs() > 1e-12 * scale {
            return Err(Error::BoundaryViolation(g.id(b).to_string()));
        }
    }
    Ok(())
}

/// u(·, t) = Σ_j e^{−λ_j t} (f, φ_j)_w φ_j for ∂_t u + Lu = 0.
pub fn spectral_heat_solve(spec: &OperatorSpec, f: &VertexFunction, times: &[f64]) -> Result<Trajectory> {
    check_times(times)?;
    check_boundary(spec, f)?;
    let es = eigensystem(spec)?;
    let kernel = HeatKernel::new(&es);
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        states.push(if t == 0.0 {
            spec.extend(&f.gather(spec.window().host(), spec.window().interior())?)
        } else {
            kernel.reconstruct(t, f, Reconstruction::Weighted)?
        });
    }
    let step = (times.len() > 1).then(|| times[1] - times[0]);
    Ok(Trajectory {
        scheme: "spectral",
        step,
        times: times.to_vec(),
        states,
        vertices: spec.window().closure().to_vec(),
    })
}

/// Measured L² and energy balances along a heat trajectory.
///
/// E(u) = (Lu, u)_w is the energy that the equation dissipates:
/// d/dt ‖u‖²_w = −2E(u) and d/dt E(u) = −2‖u_t‖²_w. The `literal_*` fields
/// evaluate the same balances with E replaced by ∫_S |∇u|² + (Qu, u)_w,
/// where ∫_S |∇u|² = Σ_{x∈S} Σ_{y~x} (∇_xy u)²; those are reported, not
/// expected to vanish.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatIdentityReport {
    pub dt: f64,
    pub samples: usize,
    /// max |d/dt ‖u‖²_w + 2(Lu,u)_w| over samples with a full five-point
    /// stencil.
    pub differential_residual: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub energy_nonincreasing: bool,
    /// ‖u(T)‖² + 2∫(Lu,u) − ‖f‖², trapezoid in time.
    pub conservation_residual: f64,
    /// E(u(T)) + 2∫‖u_t‖² − E(f), trapezoid in time.
    pub energy_identity_residual: f64,
    pub literal_conservation_residual: f64,
    pub literal_energy_identity_residual: f64,
    pub literal_energy_nonincreasing: bool,
    /// c making ‖u(T)‖² + c∫∫_S|∇u|² + 2∫(Qu,u) = ‖f‖² hold; `None` when
    /// the gradient integral vanishes.
    pub measured_gradient_constant: Option<f64>,
}

fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    let mut acc = Accumulator::new();
    for k in 1..times.len() {
        acc.add(0.5 * (times[k] - times[k - 1]) * (values[k] + values[k - 1]));
    }
    acc.value()
}

pub fn heat_identities_report(traj: &Trajectory, spec: &OperatorSpec) -> Result<HeatIdentityReport> {
    let times = &traj.times;
    check_times(times)?;
    let n = times.len();
    if n < 5 {
        return Err(Error::InvalidArgument("need at least five samples".into()));
    }
    let dt = times[1] - times[0];
    if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1e-300)) {
        return Err(Error::InvalidArgument("differential checks need a uniform time grid".into()));
    }
    if dt > MAX_CHECK_STEP {
        return Err(Error::CoarseGrid(dt));
    }

    let w = spec.window();
    let g = w.host();
    let (k, mass) = spec.stiffness();
    let mut norm = Vec::with_capacity(n);
    let mut energy = Vec::with_capacity(n);
    let mut grad = Vec::with_capacity(n);
    let mut qform = Vec::with_capacity(n);
    let mut rate = Vec::with_capacity(n);
    for u in &traj.states {
        let v = u.gather(g, w.interior())?;
        let kv = k.mul_vec(&v);
        let mut nn = Accumulator::new();
        let mut ee = Accumulator::new();
        let mut qq = Accumulator::new();
        for i in 0..v.len() {
            nn.add_product(mass[i] * v[i], v[i]);
            ee.add_product(v[i], kv[i]);
            qq.add_product(spec.potential_at(i) * mass[i] * v[i], v[i]);
        }
        let lu = spec.apply(u)?;
        let mut rr = Accumulator::new();
        for i in 0..v.len() {
            rr.add_product(mass[i] * lu[i], lu[i]);
        }
        norm.push(nn.value());
        energy.push(ee.value());
        grad.push(dirichlet_energy(u, w)?);
        qform.push(qq.value());
        rate.push(rr.value());
    }

    let mut differential: f64 = 0.0;
    for i in 2..n - 2 {
        let d = (norm[i - 2] - 8.0 * norm[i - 1] + 8.0 * norm[i + 1] - norm[i + 2]) / (12.0 * dt);
        differential = differential.max((d + 2.0 * energy[i]).abs());
    }
    let tol = |x: f64| 1e-12 * x.abs().max(1.0);
    let nonincreasing = |xs: &[f64]| xs.windows(2).all(|p| p[1] <= p[0] + tol(p[0]));
    let literal: Vec<f64> = grad.iter().zip(&qform).map(|(a, b)| a + b).collect();
    let int_energy = trapezoid(times, &energy);
    let int_rate = trapezoid(times, &rate);
    let int_grad = trapezoid(times, &grad);
    let int_q = trapezoid(times, &qform);
    let last = n - 1;
    Ok(HeatIdentityReport {
        dt,
        samples: n,
        differential_residual: differential,
        energy_initial: energy[0],
        energy_final: energy[last],
        energy_nonincreasing: nonincreasing(&energy),
        conservation_residual: norm[last] + 2.0 * int_energy - norm[0],
        energy_identity_residual: energy[last] + 2.0 * int_rate - energy[0],
        literal_conservation_residual: norm[last] + 2.0 * int_grad + 2.0 * int_q - norm[0],
        literal_energy_identity_residual: literal[last] + 2.0 * int_rate - literal[0],
        literal_energy_nonincreasing: nonincreasing(&literal),
        measured_gradient_constant: (int_grad != 0.0)
            .then(|| (norm[0] - norm[last] - 2.0 * int_q) / int_grad),
    })
}

/// Right-hand side f_t(x) = (1/d_x) Σ_y w(xy)(f(y) − f(x)).
pub fn transport_rate(g: &Graph, field: &VectorField, f: &[f64]) -> Result<Vec<f64>> {
    (0..g.len())
        .map(|x| {
            let row = field.at(g, x)?;
            let d = g.degree(x);
            if d == 0 {
                return Ok(0.0);
            }
            let mut acc = Accumulator::new();
            for (&y, &w) in g.neighbors(x).iter().zip(row) {
                if !w.is_finite() {
                    return Err(Error::NonFinite(format!("field value on ({}, {})", g.id(x), g.id(y))));
                }
                acc.add_product(w, f[y] - f[x]);
            }
            Ok(acc.value() / d as f64)
        })
        .collect()
}

/// Integrate f_t = W(t)·∇f on [0, t_end] by classical fourth-order
/// Runge–Kutta with `steps` equal steps.
pub fn transport_solve(
    g: &Graph,
    mut field: impl FnMut(f64) -> Result<VectorField>,
    f0: &VertexFunction,
    t_end: f64,
    steps: usize,
) -> Result<Trajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) || steps == 0 {
        return Err(Error::InvalidArgument("need T > 0 and at least one step".into()));
    }
    let all: Vec<usize> = (0..g.len()).collect();
    let mut f = f0.gather(g, &all)?;
    let h = t_end / steps as f64;
    let mut times = vec![0.0];
    let mut states = vec![VertexFunction::full(f.clone())];
    for k in 0..steps {
        let t = k as f64 * h;
        let w0 = field(t)?;
        let wm = field(t + 0.5 * h)?;
        let w1 = field(t + h)?;
        let shifted = |base: &[f64], k: &[f64], c: f64| -> Vec<f64> {
            base.iter().zip(k).map(|(b, d)| b + c * d).collect()
        };
        let k1 = transport_rate(g, &w0, &f)?;
        let k2 = transport_rate(g, &wm, &shifted(&f, &k1, 0.5 * h))?;
        let k3 = transport_rate(g, &wm, &shifted(&f, &k2, 0.5 * h))?;
        let k4 = transport_rate(g, &w1, &shifted(&f, &k3, h))?;
        for x in 0..f.len() {
            f[x] += h / 6.0 * (k1[x] + 2.0 * k2[x] + 2.0 * k3[x] + k4[x]);
        }
        times.push(if k + 1 == steps { t_end } else { (k + 1) as f64 * h });
        states.push(VertexFunction::full(f.clone()));
    }
    Ok(Trajectory {
        scheme: "rk4",
        step: Some(h),
        times,
        states,
        vertices: all,
    })
}

/// Operator with Q = −V for a time-independent potential, under Dirichlet
/// conditions: the generator of ∂_t u = Δu + Vu.
pub(crate) fn shifted_operator(
    w: &crate::graph::SubgraphWindow,
    v: &[f64],
    cfg: crate::calculus::CalculusConfig,
) -> Result<OperatorSpec> {
    let g = w.host();
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    let q = VertexFunction::on(g.len(), w.interior(), &neg)?;
    OperatorSpec::new(w.clone(), Some(&q), BoundaryCondition::Dirichlet, cfg)
}
