//! Named test graphs used throughout the test-suites, the CLI fixtures and
//! the browser demo.

use crate::graph::Graph;

fn letters(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if n <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("v{i}")
            }
        })
        .collect()
}

/// Path on `n` vertices named a, b, c, ... (v0, v1, ... beyond 26).
pub fn path(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::new(letters(n), &edges).expect("path")
}

/// Cycle on vertices "1".."n".
pub fn cycle(n: usize) -> Graph {
    let ids: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(ids, &edges).expect("cycle")
}

/// Complete graph on vertices "1".."n".
pub fn complete(n: usize) -> Graph {
    let ids: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            edges.push((a, b));
        }
    }
    Graph::new(ids, &edges).expect("complete")
}

/// Star with a centre and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    let mut ids = vec!["center".to_string()];
    ids.extend((1..=leaves).map(|i| format!("l{i}")));
    let edges: Vec<(usize, usize)> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::new(ids, &edges).expect("star")
}

/// Octahedron: the six points ±e_i, adjacent unless antipodal.
pub fn octahedron() -> Graph {
    let ids = ["e1", "-e1", "e2", "-e2", "e3", "-e3"];
    let mut edges = Vec::new();
    for a in 0..6 {
        for b in (a + 1)..6 {
            if a / 2 != b / 2 {
                edges.push((a, b));
            }
        }
    }
    Graph::new(ids.to_vec(), &edges).expect("octahedron")
}

/// Coordinates of the octahedron vertices in the order of [`octahedron`].
pub fn octahedron_coordinates() -> [[f64; 3]; 6] {
    [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ]
}

/// `rows × cols` grid, vertices "g{r}{c}" (or "g{r}_{c}" past 10) in
/// row-major order.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let wide = rows > 10 || cols > 10;
    let ids: Vec<String> = (0..rows)
        .flat_map(|r| {
            (0..cols).map(move |c| {
                if wide {
                    format!("g{r}_{c}")
                } else {
                    format!("g{r}{c}")
                }
            })
        })
        .collect();
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::new(ids, &edges).expect("grid")
}

/// Index of grid vertex `(r, c)`.
pub fn grid_index(cols: usize, r: usize, c: usize) -> usize {
    r * cols + c
}

/// The named fixture set.
pub fn all() -> Vec<(&'static str, Graph)> {
    vec![
        ("k2", complete(2)),
        ("p3", path(3)),
        ("p5", path(5)),
        ("c4", cycle(4)),
        ("k4", complete(4)),
        ("star3", star(3)),
        ("octahedron", octahedron()),
        ("grid4x4", grid(4, 4)),
    ]
}

/// Look up a fixture by name.
pub fn by_name(name: &str) -> Option<Graph> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, g)| g)
}
