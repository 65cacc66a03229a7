use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Graph, VertexFunction};
use crate::error::{Error, Result};

/// On-disk graph format: `{"vertices": [...], "edges": [[a, b], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> Self {
        Self {
            vertices: g.ids().to_vec(),
            edges: g
                .edges()
                .map(|(a, b)| (g.id(a).to_string(), g.id(b).to_string()))
                .collect(),
        }
    }
}

/// Parse and validate a JSON graph file. Vertex order follows the file.
pub fn load_graph(text: &str) -> Result<Graph> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut index = HashMap::with_capacity(file.vertices.len());
    for (i, id) in file.vertices.iter().enumerate() {
        if index.insert(id.as_str(), i).is_some() {
            return Err(Error::DuplicateVertex(id.clone()));
        }
    }
    let mut pairs = Vec::with_capacity(file.edges.len());
    for (a, b) in &file.edges {
        let ia = *index
            .get(a.as_str())
            .ok_or_else(|| Error::DanglingEndpoint(a.clone()))?;
        let ib = *index
            .get(b.as_str())
            .ok_or_else(|| Error::DanglingEndpoint(b.clone()))?;
        pairs.push((ia, ib));
    }
    Graph::new(file.vertices, &pairs)
}

/// Read CSV rows as trimmed string records, skipping the header row and
/// blank lines.
pub(crate) fn csv_records(text: &str, expect_header: &[&str]) -> Result<Vec<Vec<String>>> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if header != expect_header {
        return Err(Error::Parse(format!(
            "expected header {:?}, found {:?}",
            expect_header.join(","),
            header.join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(rows)
}

pub(crate) fn parse_number(s: &str) -> Result<f64> {
    let x: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::NonFinite(s.to_string()));
    }
    Ok(x)
}

/// Parse a `vertex,value` CSV into a function on `g`.
pub fn load_function_csv(g: &Graph, text: &str) -> Result<VertexFunction> {
    let mut f = VertexFunction::empty(g.len());
    for row in csv_records(text, &["vertex", "value"])? {
        let v = g.index_of(&row[0])?;
        if f.is_defined(v) {
            return Err(Error::Parse(format!("vertex {:?} listed twice", row[0])));
        }
        f.set(v, parse_number(&row[1])?);
    }
    Ok(f)
}
