use serde::Serialize;

use crate::error::{Error, Result};

/// Point on the unit two-sphere in ambient coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpherePoint([f64; 3]);

pub type Tangent = [f64; 3];

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0].mul_add(b[0], a[1].mul_add(b[1], a[2] * b[2]))
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &[f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

impl SpherePoint {
    /// Normalizes; rejects zero and non-finite vectors.
    pub fn new(coords: [f64; 3]) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("sphere coordinates {coords:?}")));
        }
        let n = norm(&coords);
        if !(n > 0.0) {
            return Err(Error::InvalidArgument("zero vector has no direction".into()));
        }
        Ok(Self(scale(&coords, 1.0 / n)))
    }

    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    /// Component of v orthogonal to this point.
    pub fn project(&self, v: &[f64; 3]) -> Tangent {
        sub(v, &scale(&self.0, dot(v, &self.0)))
    }
}

/// Geodesic distance in [0, π], computed as atan2(|p×q|, p·q) so that
/// nearby and nearly antipodal pairs keep full relative accuracy.
pub fn sphere_distance(p: &SpherePoint, q: &SpherePoint) -> f64 {
    norm(&cross(&p.0, &q.0)).atan2(dot(&p.0, &q.0))
}

/// Below this sine the pair counts as antipodal when p·q < 0.
const ANTIPODAL_SINE: f64 = 1e-12;

/// θ / sin θ, continuous at 0.
fn theta_over_sine(theta: f64, sine: f64) -> f64 {
    if sine < 1e-300 || theta < 1e-8 {
        1.0 + theta * theta / 6.0
    } else {
        theta / sine
    }
}

/// log_p(q): the tangent vector at p of length d(p,q) pointing to q.
pub fn sphere_log(p: &SpherePoint, q: &SpherePoint) -> Result<Tangent> {
    let v = p.project(&q.0);
    let sine = norm(&v);
    let cosine = dot(&p.0, &q.0);
    if sine < ANTIPODAL_SINE && cosine < 0.0 {
        return Err(Error::Antipodal(format!("{:?}", p.0), format!("{:?}", q.0)));
    }
    let theta = sine.atan2(cosine);
    Ok(scale(&v, theta_over_sine(theta, sine)))
}

/// exp_p(v) for a tangent v at p; the result is renormalized.
pub fn sphere_exp(p: &SpherePoint, v: &Tangent) -> SpherePoint {
    let v = p.project(v);
    let theta = norm(&v);
    let sinc = if theta < 1e-8 { 1.0 - theta * theta / 6.0 } else { theta.sin() / theta };
    let out = add(&scale(&p.0, theta.cos()), &scale(&v, sinc));
    SpherePoint::new(out).unwrap_or(*p)
}
