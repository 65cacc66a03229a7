//! Finite simple graphs, subgraph windows with boundary, vertex functions.

mod function;
mod io;
mod monge;
mod window;

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

pub use function::VertexFunction;
pub use io::{load_function_csv, load_graph, GraphFile};
pub use monge::{monge_cost, MongeAssignment, MONGE_MAX};
pub use window::{Region, SubgraphWindow};

pub(crate) mod io_helpers {
    pub(crate) use super::io::{csv_records, parse_number};
}

/// Immutable finite simple undirected graph.
///
/// Vertices keep the order in which they were declared; every internal
/// index refers to that order. Neighbour lists are sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Build from ids and index pairs, validating simplicity.
    pub fn new<S: Into<String>>(ids: Vec<S>, edges: &[(usize, usize)]) -> Result<Self> {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(id.clone()));
            }
        }
        let mut adjacency = vec![Vec::new(); ids.len()];
        for &(a, b) in edges {
            if a >= ids.len() || b >= ids.len() {
                return Err(Error::DanglingEndpoint(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(Error::SelfLoop(ids[a].clone()));
            }
            if adjacency[a].contains(&b) {
                return Err(Error::DuplicateEdge(ids[a].clone(), ids[b].clone()));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        adjacency.iter_mut().for_each(|n| n.sort_unstable());
        Ok(Self {
            ids,
            index,
            adjacency,
            edge_count: edges.len(),
        })
    }

    /// Build from string ids and string edge pairs.
    pub fn from_edges(ids: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let lookup: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let ia = *lookup
                .get(a)
                .ok_or_else(|| Error::DanglingEndpoint(a.to_string()))?;
            let ib = *lookup
                .get(b)
                .ok_or_else(|| Error::DanglingEndpoint(b.to_string()))?;
            pairs.push((ia, ib));
        }
        Self::new(ids.to_vec(), &pairs)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    /// Resolve a list of ids to indices.
    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter().map(|s| self.index_of(s.as_ref())).collect()
    }

    /// N(x), sorted by vertex index.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// d_x = |N(x)|.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Position of `y` in `N(x)`.
    pub fn neighbor_slot(&self, x: usize, y: usize) -> Option<usize> {
        self.adjacency[x].binary_search(&y).ok()
    }

    /// Unordered edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    /// Breadth-first hop distances from `source`; `None` marks unreachable.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap_or(0);
            for &y in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Shortest-path edge count between two vertices.
    pub fn distance(&self, x0: usize, x1: usize) -> Distance {
        match self.bfs_distances(x0)[x1] {
            Some(d) => Distance::Finite(d),
            None => Distance::Unreachable,
        }
    }

    /// `graph_distance` by vertex id.
    pub fn distance_by_id(&self, x0: &str, x1: &str) -> Result<Distance> {
        Ok(self.distance(self.index_of(x0)?, self.index_of(x1)?))
    }

    /// True when the subgraph induced on `set` is connected (and nonempty).
    pub fn induces_connected(&self, set: &[usize]) -> bool {
        let Some(&start) = set.first() else {
            return false;
        };
        let mut inside = vec![false; self.len()];
        set.iter().for_each(|&v| inside[v] = true);
        let size = inside.iter().filter(|&&b| b).count();
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.adjacency[x] {
                if inside[y] && !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == size
    }

    pub fn is_connected(&self) -> bool {
        let all: Vec<usize> = (0..self.len()).collect();
        self.induces_connected(&all)
    }

    /// vol(A) = sum of degrees over A.
    pub fn volume(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.degree(v) as f64).sum()
    }

    /// `volume` by vertex ids.
    pub fn volume_by_id<S: AsRef<str>>(&self, ids: &[S]) -> Result<f64> {
        Ok(self.volume(&self.indices_of(ids)?))
    }
}

/// Outcome of a hop-distance query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Finite(usize),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }
}
