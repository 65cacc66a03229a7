use crate::error::{Error, Result};
use crate::graph::{Graph, VertexFunction};

/// How a vector-field file's ordered pairs are completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSymmetry {
    /// Listed pairs as given, everything else zero.
    AsGiven,
    /// w(yx) = w(xy) for every listed pair.
    Symmetrize,
    /// w(yx) = -w(xy) for every listed pair; the field is flagged antisymmetric.
    Antisymmetrize,
}

/// Values w(xy) on ordered adjacent pairs.
///
/// Entries for vertex `x` are stored in the order of `g.neighbors(x)`; a
/// vertex without entries is outside the field's domain.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    entries: Vec<Option<Vec<f64>>>,
    antisymmetric: bool,
}

impl VectorField {
    /// The zero field on every vertex (trivially antisymmetric).
    pub fn zero(g: &Graph) -> Self {
        Self {
            entries: (0..g.len()).map(|x| Some(vec![0.0; g.degree(x)])).collect(),
            antisymmetric: true,
        }
    }

    /// Field on `domain` with w(xy) = `value(x, y)`; unflagged.
    pub fn from_fn(g: &Graph, domain: &[usize], mut value: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = vec![None; g.len()];
        for &x in domain {
            entries[x] = Some(g.neighbors(x).iter().map(|&y| value(x, y)).collect());
        }
        Self {
            entries,
            antisymmetric: false,
        }
    }

    /// Antisymmetric field on all of `g` built from values on unordered
    /// edges: w(ab) = value(a, b) for a < b and w(ba) = -w(ab).
    pub fn antisymmetric_from_edges(g: &Graph, mut value: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries: Vec<Option<Vec<f64>>> =
            (0..g.len()).map(|x| Some(vec![0.0; g.degree(x)])).collect();
        for (a, b) in g.edges() {
            let v = value(a, b);
            let sa = g.neighbor_slot(a, b).expect("edge");
            let sb = g.neighbor_slot(b, a).expect("edge");
            entries[a].as_mut().unwrap()[sa] = v;
            entries[b].as_mut().unwrap()[sb] = -v;
        }
        Self {
            entries,
            antisymmetric: true,
        }
    }

    /// The gradient field x ↦ (∇_{xy} f)_y on every vertex whose closed
    /// neighbourhood lies in f's domain. Always antisymmetric.
    pub fn gradient_of(g: &Graph, f: &VertexFunction) -> Self {
        let mut entries = vec![None; g.len()];
        for x in 0..g.len() {
            if f.is_defined(x) && g.neighbors(x).iter().all(|&y| f.is_defined(y)) {
                entries[x] = Some(g.neighbors(x).iter().map(|&y| f.raw(y) - f.raw(x)).collect());
            }
        }
        Self {
            entries,
            antisymmetric: true,
        }
    }

    /// Parse a `from,to,value` CSV.
    pub fn from_csv(g: &Graph, text: &str, mode: FieldSymmetry) -> Result<Self> {
        use crate::graph::io_helpers::{csv_records, parse_number};
        let mut vals: Vec<Vec<Option<f64>>> = (0..g.len()).map(|x| vec![None; g.degree(x)]).collect();
        let put = |x: usize, y: usize, v: f64, vals: &mut Vec<Vec<Option<f64>>>| -> Result<()> {
            let slot = g
                .neighbor_slot(x, y)
                .ok_or_else(|| Error::NotAdjacent(g.id(x).into(), g.id(y).into()))?;
            match vals[x][slot] {
                Some(old) if old != v => Err(Error::Parse(format!(
                    "conflicting values for ({}, {})",
                    g.id(x),
                    g.id(y)
                ))),
                _ => {
                    vals[x][slot] = Some(v);
                    Ok(())
                }
            }
        };
        for row in csv_records(text, &["from", "to", "value"])? {
            let x = g.index_of(&row[0])?;
            let y = g.index_of(&row[1])?;
            let v = parse_number(&row[2])?;
            put(x, y, v, &mut vals)?;
            match mode {
                FieldSymmetry::AsGiven => {}
                FieldSymmetry::Symmetrize => put(y, x, v, &mut vals)?,
                FieldSymmetry::Antisymmetrize => put(y, x, -v, &mut vals)?,
            }
        }
        Ok(Self {
            entries: vals
                .into_iter()
                .map(|row| Some(row.into_iter().map(|v| v.unwrap_or(0.0)).collect()))
                .collect(),
            antisymmetric: mode == FieldSymmetry::Antisymmetrize,
        })
    }

    pub fn is_flagged_antisymmetric(&self) -> bool {
        self.antisymmetric
    }

    /// Set the antisymmetry flag after verifying w(xy) = -w(yx) on every
    /// pair with both endpoints in the domain.
    pub fn flag_antisymmetric(mut self, g: &Graph) -> Result<Self> {
        if !self.check_antisymmetric(g, 0.0) {
            return Err(Error::NotAntisymmetric);
        }
        self.antisymmetric = true;
        Ok(self)
    }

    /// Whether |w(xy) + w(yx)| ≤ tol on every pair inside the domain.
    pub fn check_antisymmetric(&self, g: &Graph, tol: f64) -> bool {
        (0..g.len()).all(|x| match &self.entries[x] {
            None => true,
            Some(row) => g.neighbors(x).iter().zip(row).all(|(&y, &wxy)| {
                match self.entries.get(y).and_then(|r| r.as_ref()) {
                    None => true,
                    Some(ry) => {
                        let s = g.neighbor_slot(y, x).expect("symmetric adjacency");
                        (wxy + ry[s]).abs() <= tol
                    }
                }
            }),
        })
    }

    pub fn is_defined(&self, x: usize) -> bool {
        self.entries.get(x).is_some_and(Option::is_some)
    }

    /// w(x·) in neighbour order.
    pub fn at(&self, g: &Graph, x: usize) -> Result<&[f64]> {
        self.entries
            .get(x)
            .and_then(|r| r.as_deref())
            .ok_or_else(|| Error::OutOfDomain(g.id(x).to_string()))
    }

    /// w(xy).
    pub fn value(&self, g: &Graph, x: usize, y: usize) -> Result<f64> {
        let row = self.at(g, x)?;
        let s = g
            .neighbor_slot(x, y)
            .ok_or_else(|| Error::NotAdjacent(g.id(x).into(), g.id(y).into()))?;
        Ok(row[s])
    }

    /// `alpha * self + beta * other` on the common domain; antisymmetric
    /// when both inputs are.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(p, q)| alpha * p + beta * q).collect()),
                _ => None,
            })
            .collect();
        Self {
            entries,
            antisymmetric: self.antisymmetric && other.antisymmetric,
        }
    }

    pub(crate) fn from_parts(entries: Vec<Option<Vec<f64>>>, antisymmetric: bool) -> Self {
        Self {
            entries,
            antisymmetric,
        }
    }
}
