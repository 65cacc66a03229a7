//! Spectrum of L = −Δ + Q on a window, Rayleigh quotients, min-max and
//! Barta checks, heat kernels and Green functions.
//!
//! With D = diag(d_x) the operator is L = D⁻¹K for a symmetric K, so it is
//! self-adjoint for (f, g) = Σ_{x∈S} f(x) g(x) d_x. Eigenfunctions come out
//! orthonormal in that inner product.

mod heat;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calculus::CalculusConfig;
use crate::error::{Error, Result};
use crate::graph::{Region, SubgraphWindow, VertexFunction};
use crate::linalg::{diagonal_pencil_eigen, symmetric_eigen, Matrix};
use crate::numerics::{Accumulator, Lcg64};

pub use heat::{green_function, GreenFunction, HeatKernel, Reconstruction};

/// Largest interior accepted by the dense eigensolver.
pub const EIGEN_MAX: usize = 2000;

/// Boundary handling for the operator on a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// f ≡ 0 on δS.
    Dirichlet,
    /// Each boundary value is the mean of its interior neighbours.
    Neumann,
    /// The window is the whole graph.
    None,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::None => "none",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Self::Dirichlet),
            "neumann" => Ok(Self::Neumann),
            "none" => Ok(Self::None),
            other => Err(Error::InvalidArgument(format!("unknown boundary condition {other:?}"))),
        }
    }
}

/// Operator data: window, potential Q on S, boundary condition, scale.
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    window: SubgraphWindow,
    potential: Vec<f64>,
    bc: BoundaryCondition,
    cfg: CalculusConfig,
}

impl OperatorSpec {
    /// `potential` must be defined on the interior; `None` means Q ≡ 0.
    pub fn new(
        window: SubgraphWindow,
        potential: Option<&VertexFunction>,
        bc: BoundaryCondition,
        cfg: CalculusConfig,
    ) -> Result<Self> {
        match bc {
            BoundaryCondition::Dirichlet | BoundaryCondition::Neumann if window.boundary().is_empty() => {
                return Err(Error::InvalidArgument(format!("{bc} condition needs a nonempty boundary")));
            }
            BoundaryCondition::None if !window.boundary().is_empty() => {
                return Err(Error::InvalidArgument(
                    "boundary condition `none` needs the whole graph as window".into(),
                ));
            }
            _ => {}
        }
        let potential = match potential {
            None => vec![0.0; window.interior().len()],
            Some(q) => {
                let vals = q.gather(window.host(), window.interior())?;
                if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFinite(format!(
                        "potential at {:?}",
                        window.host().id(window.interior()[i])
                    )));
                }
                vals
            }
        };
        Ok(Self {
            window,
            potential,
            bc,
            cfg,
        })
    }

    pub fn window(&self) -> &SubgraphWindow {
        &self.window
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn cfg(&self) -> CalculusConfig {
        self.cfg
    }

    /// Q at the i-th interior vertex.
    pub fn potential_at(&self, i: usize) -> f64 {
        self.potential[i]
    }

    /// The symmetric matrix K = D·L over interior positions, and D.
    ///
    /// Under Neumann, eliminating f(b) = mean over N(b)∩S adds −s/m_b to
    /// K_xz for every pair x, z in N(b)∩S, which keeps K symmetric.
    pub fn stiffness(&self) -> (Matrix, Vec<f64>) {
        let w = &self.window;
        let g = w.host();
        let s = self.cfg.scale();
        let m = w.interior().len();
        let mut k = Matrix::zeros(m);
        let mass: Vec<f64> = w.interior().iter().map(|&x| g.degree(x) as f64).collect();
        for (i, &x) in w.interior().iter().enumerate() {
            k[(i, i)] += s * mass[i] + self.potential[i] * mass[i];
            for &y in g.neighbors(x) {
                if let Some(j) = w.interior_position(y) {
                    k[(i, j)] -= s;
                }
            }
        }
        if self.bc == BoundaryCondition::Neumann {
            for &b in w.boundary() {
                let inner: Vec<usize> = g
                    .neighbors(b)
                    .iter()
                    .filter_map(|&z| w.interior_position(z))
                    .collect();
                let share = s / inner.len() as f64;
                for &i in &inner {
                    for &j in &inner {
                        k[(i, j)] -= share;
                    }
                }
            }
        }
        (k, mass)
    }

    /// Extend interior values to the closure as the boundary condition
    /// dictates.
    pub fn extend(&self, interior_values: &[f64]) -> VertexFunction {
        let w = &self.window;
        let g = w.host();
        let mut f = VertexFunction::empty(g.len());
        for (&x, &v) in w.interior().iter().zip(interior_values) {
            f.set(x, v);
        }
        for &b in w.boundary() {
            let v = match self.bc {
                BoundaryCondition::Neumann => {
                    let inner: Vec<f64> = g
                        .neighbors(b)
                        .iter()
                        .filter_map(|&z| w.interior_position(z).map(|i| interior_values[i]))
                        .collect();
                    inner.iter().sum::<f64>() / inner.len() as f64
                }
                _ => 0.0,
            };
            f.set(b, v);
        }
        f
    }

    /// (Lf)(x) = −Δf(x) + Q(x)f(x) on the interior, read from f on the
    /// closure (the stencil form, independent of the matrix assembly).
    pub fn apply(&self, f: &VertexFunction) -> Result<Vec<f64>> {
        let g = self.window.host();
        let s = self.cfg.scale();
        self.window
            .interior()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let fx = f.at(g, x)?;
                let mut acc = Accumulator::new();
                for &y in g.neighbors(x) {
                    acc.add(fx - f.at(g, y)?);
                }
                Ok(s * acc.value() / g.degree(x) as f64 + self.potential[i] * fx)
            })
            .collect()
    }
}

/// Full spectrum of an operator, ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// φ_j on the closure, zero-extended (Dirichlet) or mean-extended
    /// (Neumann) to δS.
    pub functions: Vec<VertexFunction>,
    coefficients: Matrix,
    stiffness: Matrix,
    mass: Vec<f64>,
    spec: OperatorSpec,
}

pub fn eigensystem(spec: &OperatorSpec) -> Result<EigenSystem> {
    let m = spec.window.interior().len();
    if m > EIGEN_MAX {
        return Err(Error::SizeBound {
            what: "window interior",
            size: m,
            bound: EIGEN_MAX,
        });
    }
    let (k, mass) = spec.stiffness();
    let eig = diagonal_pencil_eigen(&k, &mass)?;
    let functions = (0..m).map(|j| spec.extend(&eig.vector(j))).collect();
    Ok(EigenSystem {
        values: eig.values,
        functions,
        coefficients: eig.vectors,
        stiffness: k,
        mass,
        spec: spec.clone(),
    })
}

impl EigenSystem {
    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// φ_j at interior position i (j is zero-based here).
    pub fn component(&self, j: usize, i: usize) -> f64 {
        self.coefficients[(i, j)]
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    fn quotient(&self, v: &[f64]) -> Result<f64> {
        let kv = self.stiffness.mul_vec(v);
        let mut num = Accumulator::new();
        let mut den = Accumulator::new();
        for i in 0..v.len() {
            num.add_product(v[i], kv[i]);
            den.add_product(v[i] * self.mass[i], v[i]);
        }
        let den = den.value();
        if den == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok(num.value() / den)
    }

    /// Largest j-th eigenvalue residual ‖Lφ_j − λ_jφ_j‖_∞ over all pairs,
    /// measured with the stencil.
    pub fn max_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (lambda, phi) in self.values.iter().zip(&self.functions) {
            let lphi = self.spec.apply(phi)?;
            for (i, &x) in self.spec.window.interior().iter().enumerate() {
                worst = worst.max((lphi[i] - lambda * phi.raw(x)).abs());
            }
        }
        Ok(worst)
    }

    /// max |(φ_i, φ_j)_w − δ_ij|.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.len();
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in a..m {
                let ip: Accumulator = (0..m)
                    .map(|i| self.coefficients[(i, a)] * self.coefficients[(i, b)] * self.mass[i])
                    .collect();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ip.value() - target).abs());
            }
        }
        worst
    }
}

/// E(f) = (f, Lf)_w / (f, f)_w; only interior values are read, boundary
/// values being implied by the boundary condition.
pub fn rayleigh_quotient(f: &VertexFunction, es: &EigenSystem) -> Result<f64> {
    let v = f.gather(es.spec.window.host(), es.spec.window.interior())?;
    es.quotient(&v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CourantFischerReport {
    pub j: usize,
    pub claimed_lambda: f64,
    /// max of E over span{φ_1..φ_j}: the larger of the sampled maximum and
    /// E(φ_j).
    pub span_max: f64,
    pub sampled_span_max: f64,
    /// Smallest value of max E over the random j-dimensional subspaces.
    pub random_subspace_min_max: f64,
    /// random_subspace_min_max − λ_j; nonnegative up to rounding.
    pub deficit_over_lower_dims: f64,
    pub holds: bool,
}

pub const CF_SPAN_SAMPLES: usize = 200;
pub const CF_SUBSPACES: usize = 50;

/// Min-max check for the j-th eigenvalue (1-based).
pub fn courant_fischer_check(es: &EigenSystem, j: usize, seed: u64) -> Result<CourantFischerReport> {
    let m = es.len();
    if j == 0 || j > m {
        return Err(Error::IndexOutOfRange { index: j, len: m });
    }
    let lambda = es.values[j - 1];
    let mut rng = Lcg64::new(seed);

    let mut sampled = f64::NEG_INFINITY;
    for _ in 0..CF_SPAN_SAMPLES {
        let c = unit_vector(&mut rng, j);
        let v: Vec<f64> = (0..m)
            .map(|i| (0..j).map(|k| c[k] * es.coefficients[(i, k)]).sum())
            .collect();
        sampled = sampled.max(es.quotient(&v)?);
    }
    let at_phi = es.quotient(&(0..m).map(|i| es.coefficients[(i, j - 1)]).collect::<Vec<_>>())?;
    let span_max = sampled.max(at_phi);

    let mut min_max = f64::INFINITY;
    for _ in 0..CF_SUBSPACES {
        let basis: Vec<Vec<f64>> = (0..j).map(|_| rng.vector(m, -1.0, 1.0)).collect();
        min_max = min_max.min(subspace_max(es, basis)?);
    }
    let tol = 1e-9;
    Ok(CourantFischerReport {
        j,
        claimed_lambda: lambda,
        span_max,
        sampled_span_max: sampled,
        random_subspace_min_max: min_max,
        deficit_over_lower_dims: min_max - lambda,
        holds: (span_max - lambda).abs() <= tol && sampled <= lambda + tol && min_max >= lambda - tol,
    })
}

fn unit_vector(rng: &mut Lcg64, n: usize) -> Vec<f64> {
    loop {
        let v = rng.vector(n, -1.0, 1.0);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// max of E over span(basis), via weighted Gram–Schmidt and the projected
/// matrix.
fn subspace_max(es: &EigenSystem, mut basis: Vec<Vec<f64>>) -> Result<f64> {
    let mass = &es.mass;
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).zip(mass).map(|((x, y), d)| x * y * d).sum()
    };
    for k in 0..basis.len() {
        // two passes keep the basis orthonormal to rounding
        for _ in 0..2 {
            for l in 0..k {
                let c = ip(&basis[k], &basis[l]);
                let (head, tail) = basis.split_at_mut(k);
                tail[0].iter_mut().zip(&head[l]).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = ip(&basis[k], &basis[k]).sqrt();
        if norm < 1e-10 {
            return Err(Error::NoConvergence("degenerate random subspace".into()));
        }
        basis[k].iter_mut().for_each(|x| *x /= norm);
    }
    let kb: Vec<Vec<f64>> = basis.iter().map(|b| es.stiffness.mul_vec(b)).collect();
    let j = basis.len();
    let proj = Matrix::from_fn(j, |a, b| {
        0.5 * (basis[a].iter().zip(&kb[b]).map(|(x, y)| x * y).sum::<f64>()
            + basis[b].iter().zip(&kb[a]).map(|(x, y)| x * y).sum::<f64>())
    });
    let eig = symmetric_eigen(&proj)?;
    Ok(eig.values[j - 1])
}

/// μ = min_{x∈S} (Lu)(x) / u(x) for a test function u > 0 on S and ≥ 0 on
/// δS; a lower bound for the principal Dirichlet eigenvalue.
pub fn barta_bound(
    w: &SubgraphWindow,
    potential: Option<&VertexFunction>,
    u: &VertexFunction,
    cfg: CalculusConfig,
) -> Result<f64> {
    let g = w.host();
    for &x in w.closure() {
        let v = u.at(g, x)?;
        let ok = match w.region(x) {
            Region::Interior => v > 0.0,
            _ => v >= 0.0,
        };
        if !ok {
            return Err(Error::NonPositive(g.id(x).to_string()));
        }
    }
    let bc = if w.boundary().is_empty() {
        BoundaryCondition::None
    } else {
        BoundaryCondition::Dirichlet
    };
    let spec = OperatorSpec::new(w.clone(), potential, bc, cfg)?;
    let lu = spec.apply(u)?;
    Ok(w
        .interior()
        .iter()
        .zip(&lu)
        .map(|(&x, l)| l / u.raw(x))
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::sync::Arc;

    fn whole(g: crate::graph::Graph) -> OperatorSpec {
        let w = SubgraphWindow::whole(Arc::new(g)).unwrap();
        OperatorSpec::new(w, None, BoundaryCondition::None, CalculusConfig::default()).unwrap()
    }

    fn window(g: crate::graph::Graph, interior: &[usize], bc: BoundaryCondition) -> OperatorSpec {
        let w = SubgraphWindow::new(Arc::new(g), interior).unwrap();
        OperatorSpec::new(w, None, bc, CalculusConfig::default()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn spectra_of_examples() {
        let es = eigensystem(&whole(fixtures::cycle(4))).unwrap();
        assert!(close(&es.values, &[0.0, 1.0, 1.0, 2.0], 1e-12), "{:?}", es.values);
        let es = eigensystem(&whole(fixtures::complete(4))).unwrap();
        let t = 4.0 / 3.0;
        assert!(close(&es.values, &[0.0, t, t, t], 1e-12));
        let es = eigensystem(&window(fixtures::path(3), &[1], BoundaryCondition::Dirichlet)).unwrap();
        assert!(close(&es.values, &[1.0], 1e-14));
        assert!((es.functions[0].raw(1) - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn residual_and_orthonormality() {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let es = eigensystem(&window(fixtures::grid(4, 4), &[5, 6, 9, 10, 1], bc)).unwrap();
            assert!(es.max_residual().unwrap() <= 1e-10);
            assert!(es.orthonormality_defect() <= 1e-10);
        }
    }

    #[test]
    fn neumann_keeps_constants() {
        let es = eigensystem(&window(fixtures::path(5), &[1, 2, 3], BoundaryCondition::Neumann)).unwrap();
        assert!(es.values[0].abs() < 1e-12);
        let phi = &es.functions[0];
        assert!((phi.raw(0) - phi.raw(2)).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_examples() {
        let es = eigensystem(&whole(fixtures::cycle(4))).unwrap();
        let f = VertexFunction::full(vec![1.0, 0.0, -1.0, 0.0]);
        assert!((rayleigh_quotient(&f, &es).unwrap() - 1.0).abs() < 1e-14);
        let f2 = f.map(|v| 2.0 * v);
        assert_eq!(rayleigh_quotient(&f2, &es).unwrap(), rayleigh_quotient(&f, &es).unwrap());
        let z = VertexFunction::constant(4, 0.0);
        assert_eq!(rayleigh_quotient(&z, &es).unwrap_err(), Error::ZeroFunction);
    }

    #[test]
    fn courant_fischer_examples() {
        let es = eigensystem(&whole(fixtures::cycle(4))).unwrap();
        let r = courant_fischer_check(&es, 2, 1).unwrap();
        assert!((r.span_max - 1.0).abs() < 1e-9 && r.holds, "{r:?}");
        let r = courant_fischer_check(&es, 1, 1).unwrap();
        assert!(r.holds);
        assert!(courant_fischer_check(&es, 5, 1).is_err());
        let es = eigensystem(&window(fixtures::path(5), &[1, 2, 3], BoundaryCondition::Dirichlet)).unwrap();
        let r = courant_fischer_check(&es, 3, 9).unwrap();
        assert!((r.span_max - (1.0 + 0.5f64.sqrt())).abs() < 1e-9 && r.holds, "{r:?}");
    }

    #[test]
    fn barta_examples() {
        let g = Arc::new(fixtures::cycle(4));
        let w = SubgraphWindow::whole(g.clone()).unwrap();
        let one = VertexFunction::constant(4, 1.0);
        let q = VertexFunction::constant(4, 0.7);
        let cfg = CalculusConfig::default();
        assert!((barta_bound(&w, Some(&q), &one, cfg).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(barta_bound(&w, None, &one, cfg).unwrap(), 0.0);

        let spec = window(fixtures::path(5), &[1, 2, 3], BoundaryCondition::Dirichlet);
        let es = eigensystem(&spec).unwrap();
        let mu = barta_bound(spec.window(), None, &es.functions[0], cfg).unwrap();
        assert!((mu - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);

        let bad = VertexFunction::full(vec![1.0, -1.0, 1.0, 1.0]);
        assert!(matches!(barta_bound(&w, None, &bad, cfg), Err(Error::NonPositive(_))));
    }

    #[test]
    fn spec_validation() {
        let w = SubgraphWindow::whole(Arc::new(fixtures::cycle(4))).unwrap();
        assert!(OperatorSpec::new(w, None, BoundaryCondition::Dirichlet, CalculusConfig::default()).is_err());
        let w = SubgraphWindow::new(Arc::new(fixtures::path(3)), &[1]).unwrap();
        let q = VertexFunction::full(vec![0.0, f64::NAN, 0.0]);
        assert!(matches!(
            OperatorSpec::new(w, Some(&q), BoundaryCondition::Dirichlet, CalculusConfig::default()),
            Err(Error::NonFinite(_))
        ));
    }
}
