use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexFunction};

/// Time-dependent potential V(t) or V(t, x).
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// V ≡ v.
    Constant(f64),
    /// V(t) = a + b t.
    Linear { a: f64, b: f64 },
    /// V(t) = sin t.
    Sin,
    /// V(t, x) = q(x), constant in time.
    Vertex(VertexFunction),
}

impl Potential {
    /// V(t, ·) on `vertices`.
    pub fn at(&self, g: &Graph, t: f64, vertices: &[usize]) -> Result<Vec<f64>> {
        let values = match self {
            Potential::Constant(v) => vec![*v; vertices.len()],
            Potential::Linear { a, b } => vec![a + b * t; vertices.len()],
            Potential::Sin => vec![t.sin(); vertices.len()],
            Potential::Vertex(q) => q.gather(g, vertices)?,
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("potential at t = {t}")));
        }
        Ok(values)
    }

    /// Whether V does not depend on time.
    pub fn is_stationary(&self) -> bool {
        matches!(self, Potential::Constant(_) | Potential::Vertex(_) | Potential::Linear { b: 0.0, .. })
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Constant(v) => write!(f, "const:{v}"),
            Potential::Linear { a, b } => write!(f, "linear:{a},{b}"),
            Potential::Sin => f.write_str("sin"),
            Potential::Vertex(_) => f.write_str("vertex"),
        }
    }
}

/// Parses `const:<v>`, `linear:<a>,<b>`, `sin`, or a bare number.
/// Per-vertex potentials are loaded from CSV instead.
impl FromStr for Potential {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unrecognized potential {s:?}"));
        let num = |t: &str| -> Result<f64> {
            let v: f64 = t.trim().parse().map_err(|_| bad())?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        let s = s.trim();
        if s == "sin" {
            return Ok(Potential::Sin);
        }
        if let Some(rest) = s.strip_prefix("const:") {
            return Ok(Potential::Constant(num(rest)?));
        }
        if let Some(rest) = s.strip_prefix("linear:") {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            return Ok(Potential::Linear { a: num(a)?, b: num(b)? });
        }
        Ok(Potential::Constant(num(s)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_profiles() {
        assert_eq!("const:2.5".parse::<Potential>().unwrap(), Potential::Constant(2.5));
        assert_eq!("-1".parse::<Potential>().unwrap(), Potential::Constant(-1.0));
        assert_eq!(
            "linear:0,1".parse::<Potential>().unwrap(),
            Potential::Linear { a: 0.0, b: 1.0 }
        );
        assert_eq!("sin".parse::<Potential>().unwrap(), Potential::Sin);
        assert!("cos".parse::<Potential>().is_err());
        assert!("const:nan".parse::<Potential>().is_err());
    }
}
