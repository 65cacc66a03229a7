use super::Graph;
use crate::error::{Error, Result};

/// Real-valued function on a subset of a host graph's vertices.
///
/// Indexed by host vertex index; evaluation outside the domain is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    values: Vec<f64>,
    defined: Vec<bool>,
}

impl VertexFunction {
    /// Defined on every vertex.
    pub fn full(values: Vec<f64>) -> Self {
        let defined = vec![true; values.len()];
        Self { values, defined }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::full(vec![c; n])
    }

    /// Undefined everywhere on a host with `n` vertices.
    pub fn empty(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            defined: vec![false; n],
        }
    }

    /// Defined on `domain` with matching `values`.
    pub fn on(n: usize, domain: &[usize], values: &[f64]) -> Result<Self> {
        if domain.len() != values.len() {
            return Err(Error::SizeMismatch(format!(
                "{} domain vertices, {} values",
                domain.len(),
                values.len()
            )));
        }
        let mut f = Self::empty(n);
        for (&v, &x) in domain.iter().zip(values) {
            if v >= n {
                return Err(Error::UnknownVertex(format!("#{v}")));
            }
            f.set(v, x);
        }
        Ok(f)
    }

    /// From `(id, value)` pairs against a host graph.
    pub fn from_pairs<S: AsRef<str>>(g: &Graph, pairs: &[(S, f64)]) -> Result<Self> {
        let mut f = Self::empty(g.len());
        for (id, x) in pairs {
            f.set(g.index_of(id.as_ref())?, *x);
        }
        Ok(f)
    }

    pub fn host_len(&self) -> usize {
        self.values.len()
    }

    pub fn set(&mut self, v: usize, x: f64) {
        self.values[v] = x;
        self.defined[v] = true;
    }

    pub fn is_defined(&self, v: usize) -> bool {
        self.defined.get(v).copied().unwrap_or(false)
    }

    /// Value at `v`; `g` is only used to name the vertex in errors.
    pub fn at(&self, g: &Graph, v: usize) -> Result<f64> {
        if self.is_defined(v) {
            Ok(self.values[v])
        } else {
            Err(Error::OutOfDomain(if v < g.len() {
                g.id(v).to_string()
            } else {
                format!("#{v}")
            }))
        }
    }

    /// Value at `v` without a domain check; undefined vertices read 0.
    pub fn raw(&self, v: usize) -> f64 {
        self.values[v]
    }

    /// Domain vertices, ascending.
    pub fn domain(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&v| self.defined[v]).collect()
    }

    /// Values at `vertices`, failing on any undefined vertex.
    pub fn gather(&self, g: &Graph, vertices: &[usize]) -> Result<Vec<f64>> {
        vertices.iter().map(|&v| self.at(g, v)).collect()
    }

    pub fn require(&self, g: &Graph, vertices: &[usize]) -> Result<()> {
        vertices.iter().try_for_each(|&v| self.at(g, v).map(|_| ()))
    }

    /// Pointwise `alpha * self + beta * other` on the common domain.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        let mut out = Self::empty(self.values.len());
        for v in 0..self.values.len() {
            if self.defined[v] && other.is_defined(v) {
                out.set(v, alpha * self.values[v] + beta * other.values[v]);
            }
        }
        out
    }

    pub fn map(&self, mut op: impl FnMut(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&x| op(x)).collect(),
            defined: self.defined.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn domain_checks() {
        let g = fixtures::path(3);
        let f = VertexFunction::on(3, &[1], &[5.0]).unwrap();
        assert_eq!(f.at(&g, 1).unwrap(), 5.0);
        assert_eq!(f.at(&g, 0).unwrap_err(), Error::OutOfDomain("a".into()));
        assert_eq!(f.domain(), vec![1]);
        assert!(VertexFunction::on(3, &[0, 1], &[1.0]).is_err());
    }

    #[test]
    fn combine_is_pointwise() {
        let a = VertexFunction::full(vec![1.0, 2.0]);
        let b = VertexFunction::full(vec![3.0, -1.0]);
        let c = a.combine(2.0, &b, 1.0);
        assert_eq!(c.raw(0), 5.0);
        assert_eq!(c.raw(1), 3.0);
    }
}
