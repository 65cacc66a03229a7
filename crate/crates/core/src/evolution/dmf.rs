//! Discrete Morse flow: implicit steps that minimize
//! F_n(u) = (1/2h)‖u − u_{n−1}‖²_w + J_n(u), with
//! J_n(u) = ½(−Δu, u)_w − ½(λ_n u, u)_w, under Dirichlet conditions.

use serde::Serialize;

use super::{shifted_operator, Potential};
use crate::calculus::{laplacian, CalculusConfig};
use crate::error::{Error, Result};
use crate::graph::{SubgraphWindow, VertexFunction};
use crate::linalg::{solve_spd, Matrix};
use crate::numerics::{fitted_order, Accumulator};
use crate::spectral::{eigensystem, BoundaryCondition, HeatKernel, OperatorSpec, Reconstruction};

/// Relative residual demanded of each linear solve.
pub const STEP_TOLERANCE: f64 = 1e-12;

/// Reusable data for the step system on one window.
struct StepSystem {
    window: SubgraphWindow,
    cfg: CalculusConfig,
    stiffness: Matrix,
    mass: Vec<f64>,
    mu1: f64,
}

impl StepSystem {
    fn new(w: &SubgraphWindow, cfg: CalculusConfig) -> Result<Self> {
        let spec = OperatorSpec::new(w.clone(), None, BoundaryCondition::Dirichlet, cfg)?;
        let es = eigensystem(&spec)?;
        let (stiffness, mass) = spec.stiffness();
        Ok(Self {
            window: w.clone(),
            cfg,
            stiffness,
            mass,
            mu1: es.values[0],
        })
    }

    fn interior(&self, u: &VertexFunction) -> Result<Vec<f64>> {
        let w = &self.window;
        let g = w.host();
        for &b in w.boundary() {
            if u.is_defined(b) && u.raw(b) != 0.0 {
                return Err(Error::BoundaryViolation(g.id(b).to_string()));
            }
        }
        u.gather(g, w.interior())
    }

    fn extend(&self, v: &[f64]) -> VertexFunction {
        let w = &self.window;
        let mut f = VertexFunction::empty(w.host().len());
        w.boundary().iter().for_each(|&b| f.set(b, 0.0));
        w.interior().iter().zip(v).for_each(|(&x, &y)| f.set(x, y));
        f
    }

    fn j(&self, lambda: &[f64], v: &[f64]) -> f64 {
        let kv = self.stiffness.mul_vec(v);
        let mut acc = Accumulator::new();
        for i in 0..v.len() {
            acc.add_product(0.5 * v[i], kv[i]);
            acc.add_product(-0.5 * lambda[i] * self.mass[i] * v[i], v[i]);
        }
        acc.value()
    }

    fn f(&self, h: f64, lambda: &[f64], prev: &[f64], v: &[f64]) -> f64 {
        let mut acc = Accumulator::new();
        for i in 0..v.len() {
            let d = v[i] - prev[i];
            acc.add_product(self.mass[i] * d / (2.0 * h), d);
        }
        acc.add(self.j(lambda, v));
        acc.value()
    }

    fn step(&self, prev: &[f64], h: f64, lambda: &[f64]) -> Result<DmfStep> {
        let m = prev.len();
        let max_lambda = lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(1.0 / h + self.mu1 - max_lambda > 0.0) {
            return Err(Error::Indefinite {
                inv_h: 1.0 / h,
                mu1: self.mu1,
                max_lambda,
            });
        }
        let mut a = self.stiffness.clone();
        for i in 0..m {
            a[(i, i)] += self.mass[i] * (1.0 / h - lambda[i]);
        }
        let rhs: Vec<f64> = (0..m).map(|i| self.mass[i] * prev[i] / h).collect();
        let u = solve_spd(&a, &rhs)?;
        let au = a.mul_vec(&u);
        let r_norm = au.iter().zip(&rhs).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let b_norm = rhs.iter().map(|q| q * q).sum::<f64>().sqrt();
        if r_norm > STEP_TOLERANCE * b_norm.max(f64::MIN_POSITIVE) && r_norm > 0.0 {
            return Err(Error::NoConvergence(format!(
                "step solve relative residual {:.3e}",
                r_norm / b_norm
            )));
        }

        let u_fn = self.extend(&u);
        let g = self.window.host();
        let mut el = Accumulator::new();
        for (i, &x) in self.window.interior().iter().enumerate() {
            let r = (u[i] - prev[i]) / h - laplacian(g, &u_fn, x, self.cfg)? - lambda[i] * u[i];
            el.add_product(self.mass[i] * r, r);
        }
        let f_prev = self.f(h, lambda, prev, prev);
        let f_new = self.f(h, lambda, prev, &u);
        let mut warnings = Vec::new();
        if max_lambda > self.mu1 {
            warnings.push(format!(
                "lambda {max_lambda} exceeds the principal eigenvalue {}; J_n may be negative",
                self.mu1
            ));
        }
        Ok(DmfStep {
            certified: f_new <= f_prev + 1e-12 * f_prev.abs().max(1.0),
            u: u_fn,
            el_residual: el.value().sqrt(),
            f_prev,
            f_new,
            j_prev: self.j(lambda, prev),
            j_new: self.j(lambda, &u),
            warnings,
        })
    }
}

fn broadcast(lambda: &[f64], m: usize) -> Result<Vec<f64>> {
    match lambda.len() {
        1 => Ok(vec![lambda[0]; m]),
        k if k == m => Ok(lambda.to_vec()),
        k => Err(Error::SizeMismatch(format!("{k} lambda values for {m} interior vertices"))),
    }
}

/// One implicit step and its certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct DmfStep {
    pub u: VertexFunction,
    /// ‖(u_n − u_{n−1})/h − Δu_n − λ_n u_n‖_w, evaluated by the stencil.
    pub el_residual: f64,
    /// F_n(u_{n−1}).
    pub f_prev: f64,
    /// F_n(u_n).
    pub f_new: f64,
    /// F_n(u_n) ≤ F_n(u_{n−1}) up to rounding.
    pub certified: bool,
    /// J_n(u_{n−1}).
    pub j_prev: f64,
    /// J_n(u_n).
    pub j_new: f64,
    pub warnings: Vec<String>,
}

/// Solve (1/h − Δ − λ_n) u_n = u_{n−1}/h on the interior with u_n = 0 on δS.
///
/// `lambda` holds one value (spatially constant) or one per interior
/// vertex. The step requires 1/h + μ₁ − max λ_n > 0, which makes the system
/// positive definite.
pub fn dmf_step(
    u_prev: &VertexFunction,
    h: f64,
    lambda: &[f64],
    w: &SubgraphWindow,
    cfg: CalculusConfig,
) -> Result<DmfStep> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {h}")));
    }
    let sys = StepSystem::new(w, cfg)?;
    let prev = sys.interior(u_prev)?;
    let lambda = broadcast(lambda, prev.len())?;
    sys.step(&prev, h, &lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub n: usize,
    pub t: f64,
    pub lambda_max: f64,
    /// F_n(u_{n−1}) and F_n(u_n).
    pub f_at_prev: f64,
    pub f_at_new: f64,
    /// J_n(u_{n−1}) and J_n(u_n).
    pub j_at_prev: f64,
    pub j_at_new: f64,
    /// J_{n−1}(u_{n−1}), absent for the first step.
    pub j_prev_step_at_prev: Option<f64>,
    /// (1/2h)‖u_n − u_{n−1}‖²_w.
    pub kinetic: f64,
    pub el_residual: f64,
    pub certified: bool,
}

/// The summed energy estimate
/// ½ Σ h‖∂u_n‖² + J_N(u_N) ≤ J_1(u_0) + Σ_{n≥2} (J_n(u_{n−1}) − J_{n−1}(u_{n−1})).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DmfBound {
    pub kinetic_sum: f64,
    pub j_final: f64,
    pub lhs: f64,
    pub j_initial: f64,
    /// Σ_{n≥2} (J_n(u_{n−1}) − J_{n−1}(u_{n−1})); ≤ 0 when λ is nondecreasing.
    pub correction: f64,
    pub rhs: f64,
    pub holds: bool,
    /// lhs ≤ J_1(u_0), the form without correction terms.
    pub uncorrected_holds: bool,
}

#[derive(Debug, Clone)]
pub struct DmfRun {
    pub h: f64,
    pub t_end: f64,
    pub mu1: f64,
    /// t_0..t_N.
    pub times: Vec<f64>,
    /// λ_n over the interior for n = 1..N.
    pub lambdas: Vec<Vec<f64>>,
    /// u_0..u_N on the closure.
    pub steps: Vec<VertexFunction>,
    pub ledger: Vec<LedgerEntry>,
    pub bound: DmfBound,
    pub warnings: Vec<String>,
}

impl DmfRun {
    /// Index n with t ∈ (t_{n−1}, t_n], for 0 < t ≤ T.
    fn interval(&self, t: f64) -> usize {
        let n = self.times.partition_point(|&s| s < t);
        n.clamp(1, self.times.len() - 1)
    }

    fn check(&self, t: f64, lo: f64) -> Result<()> {
        if t >= lo && t <= self.t_end {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("time {t} outside [{lo}, {}]", self.t_end)))
        }
    }

    /// u_N(t) = ((t_n − t)/h) u_{n−1} + ((t − t_{n−1})/h) u_n on [0, T].
    pub fn piecewise_linear(&self, t: f64) -> Result<VertexFunction> {
        self.check(t, 0.0)?;
        if t == 0.0 {
            return Ok(self.steps[0].clone());
        }
        let n = self.interval(t);
        let a = (self.times[n] - t) / self.h;
        let b = (t - self.times[n - 1]) / self.h;
        Ok(self.steps[n - 1].combine(a, &self.steps[n], b))
    }

    /// û_N(t) = u_n on (t_{n−1}, t_n], and φ on [−h, 0].
    pub fn piecewise_constant(&self, t: f64) -> Result<VertexFunction> {
        self.check(t, -self.h)?;
        if t <= 0.0 {
            return Ok(self.steps[0].clone());
        }
        Ok(self.steps[self.interval(t)].clone())
    }

    pub fn final_state(&self) -> &VertexFunction {
        self.steps.last().expect("at least u_0")
    }
}

/// N implicit steps of size h = T/N with λ_n = V(t_{n−1}).
pub fn dmf_run(
    phi: &VertexFunction,
    potential: &Potential,
    t_end: f64,
    n_steps: usize,
    w: &SubgraphWindow,
    cfg: CalculusConfig,
) -> Result<DmfRun> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t_end}")));
    }
    let sys = StepSystem::new(w, cfg)?;
    let g = w.host();
    let h = t_end / n_steps as f64;
    let times: Vec<f64> = (0..=n_steps).map(|n| t_end * n as f64 / n_steps as f64).collect();
    let mut prev = sys.interior(phi)?;
    let mut steps = vec![sys.extend(&prev)];
    let mut lambdas = Vec::with_capacity(n_steps);
    let mut ledger = Vec::with_capacity(n_steps);
    let mut warnings = Vec::new();
    let mut kinetic_sum = Accumulator::new();
    let mut correction = Accumulator::new();
    let mut j_initial = 0.0;

    for n in 1..=n_steps {
        let lambda = potential.at(g, times[n - 1], w.interior())?;
        let step = sys.step(&prev, h, &lambda)?;
        let u = step.u.gather(g, w.interior())?;
        let kinetic = step.f_new - step.j_new;
        let j_prev_step_at_prev = lambdas.last().map(|l: &Vec<f64>| sys.j(l, &prev));
        if n == 1 {
            j_initial = step.j_prev;
        }
        if let Some(jp) = j_prev_step_at_prev {
            correction.add(step.j_prev - jp);
        }
        kinetic_sum.add(kinetic);
        for msg in &step.warnings {
            warnings.push(format!("step {n}: {msg}"));
        }
        ledger.push(LedgerEntry {
            n,
            t: times[n],
            lambda_max: lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            f_at_prev: step.f_prev,
            f_at_new: step.f_new,
            j_at_prev: step.j_prev,
            j_at_new: step.j_new,
            j_prev_step_at_prev,
            kinetic,
            el_residual: step.el_residual,
            certified: step.certified,
        });
        lambdas.push(lambda);
        steps.push(step.u);
        prev = u;
    }

    let j_final = ledger.last().map_or(0.0, |e| e.j_at_new);
    let lhs = kinetic_sum.value() + j_final;
    let correction = correction.value();
    let rhs = j_initial + correction;
    let slack = |x: f64| 1e-12 * x.abs().max(1.0);
    Ok(DmfRun {
        h,
        t_end,
        mu1: sys.mu1,
        times,
        lambdas,
        steps,
        ledger,
        bound: DmfBound {
            kinetic_sum: kinetic_sum.value(),
            j_final,
            lhs,
            j_initial,
            correction,
            rhs,
            holds: lhs <= rhs + slack(rhs),
            uncorrected_holds: lhs <= j_initial + slack(j_initial),
        },
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceMode {
    /// Against the spectral solution (time-independent V).
    Spectral,
    /// Between consecutive resolutions.
    SelfConvergence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub mode: ConvergenceMode,
    pub ns: Vec<usize>,
    /// Step size attached to each error.
    pub hs: Vec<f64>,
    pub errors: Vec<f64>,
    pub observed_order: Option<f64>,
    pub errors_decreasing: bool,
}

fn weighted_distance(w: &SubgraphWindow, a: &VertexFunction, b: &VertexFunction) -> Result<f64> {
    let g = w.host();
    let mut acc = Accumulator::new();
    for &x in w.interior() {
        let d = a.at(g, x)? - b.at(g, x)?;
        acc.add_product(g.degree(x) as f64 * d, d);
    }
    Ok(acc.value().sqrt())
}

/// Errors of the discrete Morse flow as N grows.
///
/// A time-independent V is compared against the spectral solution of
/// ∂_t u = Δu + Vu at the grid times; a time-dependent V is compared
/// between consecutive resolutions at the coarser grid times.
pub fn dmf_convergence_study(
    phi: &VertexFunction,
    potential: &Potential,
    t_end: f64,
    ns: &[usize],
    w: &SubgraphWindow,
    cfg: CalculusConfig,
) -> Result<ConvergenceReport> {
    if ns.len() < 2 || ns.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument("need at least two ascending step counts".into()));
    }
    let runs = ns
        .iter()
        .map(|&n| dmf_run(phi, potential, t_end, n, w, cfg))
        .collect::<Result<Vec<_>>>()?;
    let (mode, hs, errors) = if potential.is_stationary() {
        let v = potential.at(w.host(), 0.0, w.interior())?;
        let spec = shifted_operator(w, &v, cfg)?;
        let es = eigensystem(&spec)?;
        let kernel = HeatKernel::new(&es);
        let mut errors = Vec::new();
        for run in &runs {
            let mut worst: f64 = 0.0;
            for n in 1..run.steps.len() {
                let exact = kernel.reconstruct(run.times[n], phi, Reconstruction::Weighted)?;
                worst = worst.max(weighted_distance(w, &run.steps[n], &exact)?);
            }
            errors.push(worst);
        }
        (ConvergenceMode::Spectral, runs.iter().map(|r| r.h).collect::<Vec<_>>(), errors)
    } else {
        let mut errors = Vec::new();
        for pair in runs.windows(2) {
            let (coarse, fine) = (&pair[0], &pair[1]);
            let mut worst: f64 = 0.0;
            for &t in &coarse.times[1..] {
                let d = weighted_distance(w, &coarse.piecewise_constant(t)?, &fine.piecewise_constant(t)?)?;
                worst = worst.max(d);
            }
            errors.push(worst);
        }
        let hs = runs[..runs.len() - 1].iter().map(|r| r.h).collect();
        (ConvergenceMode::SelfConvergence, hs, errors)
    };
    Ok(ConvergenceReport {
        mode,
        ns: ns.to_vec(),
        observed_order: fitted_order(&hs, &errors),
        errors_decreasing: errors.windows(2).all(|p| p[1] < p[0]),
        hs,
        errors,
    })
}
