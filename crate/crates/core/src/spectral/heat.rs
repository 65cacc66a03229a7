use serde::{Deserialize, Serialize};

use super::EigenSystem;
use crate::error::{Error, Result};
use crate::graph::VertexFunction;
use crate::linalg::Matrix;
use crate::numerics::Accumulator;

/// How the kernel acts on data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reconstruction {
    /// u(x) = Σ_y S_t(x,y) f(y) d_y; returns f at t = 0.
    #[default]
    Weighted,
    /// u(x) = Σ_y S_t(x,y) f(y); off by the factor 1/d at t = 0.
    Unweighted,
}

/// S_t(x,y) = Σ_j e^{−λ_j t} φ_j(x) φ_j(y) over interior vertices.
#[derive(Debug, Clone, Copy)]
pub struct HeatKernel<'a> {
    es: &'a EigenSystem,
}

impl<'a> HeatKernel<'a> {
    pub fn new(es: &'a EigenSystem) -> Self {
        Self { es }
    }

    fn position(&self, x: usize) -> Result<usize> {
        let w = self.es.spec.window();
        w.interior_position(x)
            .ok_or_else(|| Error::OutOfDomain(w.host().id(x).to_string()))
    }

    fn check_time(t: f64) -> Result<()> {
        if t >= 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("time must be finite and nonnegative, got {t}")))
        }
    }

    /// S_t(x, y) for host vertices x, y in the interior.
    pub fn eval(&self, t: f64, x: usize, y: usize) -> Result<f64> {
        Self::check_time(t)?;
        let (i, k) = (self.position(x)?, self.position(y)?);
        Ok(self.eval_positions(t, i, k))
    }

    fn eval_positions(&self, t: f64, i: usize, k: usize) -> f64 {
        let es = self.es;
        let mut acc = Accumulator::new();
        for (j, lambda) in es.values.iter().enumerate() {
            acc.add_product((-lambda * t).exp() * es.component(j, i), es.component(j, k));
        }
        acc.value()
    }

    /// The kernel as a matrix over interior positions.
    pub fn matrix(&self, t: f64) -> Result<Matrix> {
        Self::check_time(t)?;
        let m = self.es.len();
        Ok(Matrix::from_fn(m, |i, k| self.eval_positions(t, i, k)))
    }

    /// u(·, t) from data f on the interior, extended to δS by the boundary
    /// condition.
    pub fn reconstruct(&self, t: f64, f: &VertexFunction, mode: Reconstruction) -> Result<VertexFunction> {
        Self::check_time(t)?;
        let es = self.es;
        let w = es.spec.window();
        let data = f.gather(w.host(), w.interior())?;
        let m = es.len();
        let coeffs: Vec<f64> = (0..m)
            .map(|j| {
                let mut acc = Accumulator::new();
                for i in 0..m {
                    let weight = match mode {
                        Reconstruction::Weighted => es.mass[i],
                        Reconstruction::Unweighted => 1.0,
                    };
                    acc.add_product(es.component(j, i) * weight, data[i]);
                }
                (-es.values[j] * t).exp() * acc.value()
            })
            .collect();
        let u: Vec<f64> = (0..m)
            .map(|i| {
                let mut acc = Accumulator::new();
                for (j, c) in coeffs.iter().enumerate() {
                    acc.add_product(*c, es.component(j, i));
                }
                acc.value()
            })
            .collect();
        Ok(es.spec.extend(&u))
    }

    /// max over x, y of |Σ_z S_t(x,z) S_s(z,y) d_z − S_{t+s}(x,y)|.
    pub fn semigroup_residual(&self, t: f64, s: f64) -> Result<f64> {
        let a = self.matrix(t)?;
        let b = self.matrix(s)?;
        let c = self.matrix(t + s)?;
        let m = self.es.len();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for k in 0..m {
                let mut acc = Accumulator::new();
                for z in 0..m {
                    acc.add_product(a[(i, z)] * self.es.mass[z], b[(z, k)]);
                }
                worst = worst.max((acc.value() - c[(i, k)]).abs());
            }
        }
        Ok(worst)
    }
}

/// Spectra whose smallest eigenvalue is at or below this are treated as
/// singular.
pub const SPECTRUM_FLOOR: f64 = 1e-12;

/// G(x,y) = Σ_j φ_j(x) φ_j(y) / λ_j over interior positions.
#[derive(Debug, Clone)]
pub struct GreenFunction<'a> {
    es: &'a EigenSystem,
    matrix: Matrix,
}

pub fn green_function(es: &EigenSystem) -> Result<GreenFunction<'_>> {
    if let Some((j, &v)) = es.values.iter().enumerate().find(|(_, &v)| v <= SPECTRUM_FLOOR) {
        return Err(Error::NonPositiveSpectrum { index: j + 1, value: v });
    }
    let m = es.len();
    let matrix = Matrix::from_fn(m, |i, k| {
        let mut acc = Accumulator::new();
        for (j, lambda) in es.values.iter().enumerate() {
            acc.add_product(es.component(j, i) / lambda, es.component(j, k));
        }
        acc.value()
    });
    Ok(GreenFunction { es, matrix })
}

impl GreenFunction<'_> {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn eval(&self, x: usize, y: usize) -> Result<f64> {
        let w = self.es.spec.window();
        let pos = |v: usize| {
            w.interior_position(v)
                .ok_or_else(|| Error::OutOfDomain(w.host().id(v).to_string()))
        };
        Ok(self.matrix[(pos(x)?, pos(y)?)])
    }

    /// (Gf)(x) = Σ_y G(x,y) f(y) d_y, extended by the boundary condition.
    pub fn apply(&self, f: &VertexFunction) -> Result<VertexFunction> {
        let w = self.es.spec.window();
        let data = f.gather(w.host(), w.interior())?;
        let m = data.len();
        let u: Vec<f64> = (0..m)
            .map(|i| {
                let mut acc = Accumulator::new();
                for k in 0..m {
                    acc.add_product(self.matrix[(i, k)] * self.es.mass[k], data[k]);
                }
                acc.value()
            })
            .collect();
        Ok(self.es.spec.extend(&u))
    }
}
