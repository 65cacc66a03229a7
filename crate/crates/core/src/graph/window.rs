use std::sync::Arc;

use super::Graph;
use crate::error::{Error, Result};

/// Where a host vertex sits relative to a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
    Outside,
}

/// A connected vertex set S inside a host graph, with its vertex boundary
/// δS = { y ∉ S : y ~ x for some x ∈ S } and closure S ∪ δS.
///
/// The boundary is always recomputed from the host adjacency.
#[derive(Debug, Clone)]
pub struct SubgraphWindow {
    host: Arc<Graph>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    closure: Vec<usize>,
    region: Vec<Region>,
    interior_pos: Vec<Option<usize>>,
}

impl SubgraphWindow {
    /// `build_window`: validate S and derive δS.
    pub fn new(host: Arc<Graph>, interior: &[usize]) -> Result<Self> {
        if interior.is_empty() {
            return Err(Error::EmptyInterior);
        }
        if let Some(&bad) = interior.iter().find(|&&v| v >= host.len()) {
            return Err(Error::UnknownVertex(format!("#{bad}")));
        }
        let mut s = interior.to_vec();
        s.sort_unstable();
        s.dedup();
        if !host.induces_connected(&s) {
            return Err(Error::DisconnectedInterior);
        }
        let mut region = vec![Region::Outside; host.len()];
        s.iter().for_each(|&v| region[v] = Region::Interior);
        for &x in &s {
            for &y in host.neighbors(x) {
                if region[y] == Region::Outside {
                    region[y] = Region::Boundary;
                }
            }
        }
        let boundary: Vec<usize> = (0..host.len())
            .filter(|&v| region[v] == Region::Boundary)
            .collect();
        let closure: Vec<usize> = (0..host.len())
            .filter(|&v| region[v] != Region::Outside)
            .collect();
        let mut interior_pos = vec![None; host.len()];
        s.iter().enumerate().for_each(|(i, &v)| interior_pos[v] = Some(i));
        Ok(Self {
            host,
            interior: s,
            boundary,
            closure,
            region,
            interior_pos,
        })
    }

    /// Window by vertex ids.
    pub fn from_ids<S: AsRef<str>>(host: Arc<Graph>, ids: &[S]) -> Result<Self> {
        let idx = host.indices_of(ids)?;
        Self::new(host, &idx)
    }

    /// The whole graph as a window (empty boundary).
    pub fn whole(host: Arc<Graph>) -> Result<Self> {
        let all: Vec<usize> = (0..host.len()).collect();
        if !host.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        Self::new(host, &all)
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn host_arc(&self) -> &Arc<Graph> {
        &self.host
    }

    /// S, ascending.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// δS, ascending.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// S ∪ δS, ascending.
    pub fn closure(&self) -> &[usize] {
        &self.closure
    }

    pub fn region(&self, v: usize) -> Region {
        self.region[v]
    }

    /// Position of `v` within `interior()`.
    pub fn interior_position(&self, v: usize) -> Option<usize> {
        self.interior_pos[v]
    }

    pub fn interior_ids(&self) -> Vec<&str> {
        self.interior.iter().map(|&v| self.host.id(v)).collect()
    }

    pub fn boundary_ids(&self) -> Vec<&str> {
        self.boundary.iter().map(|&v| self.host.id(v)).collect()
    }
}
