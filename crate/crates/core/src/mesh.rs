//! Structured triangulation of a rectangle with globally oriented edges.
//!
//! Every square of an `n x n` grid is split along its lower-left to upper-right
//! diagonal. Global edge tangents point from the lower to the higher node index;
//! element-local edge `i` is the edge opposite local vertex `i`, traversed
//! counter-clockwise.

use std::fmt::Write as _;

use nalgebra::Vector2;

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

/// Axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self { x_min, x_max, y_min, y_max }
    }

    /// The square `(-1, 1)^2`.
    pub fn symmetric_unit() -> Self {
        Self::new(-1.0, 1.0, -1.0, 1.0)
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.x_max > self.x_min && self.y_max > self.y_min)
            || !self.x_min.is_finite()
            || !self.x_max.is_finite()
            || !self.y_min.is_finite()
            || !self.y_max.is_finite()
    }
}

/// Sign `s` with `s * t_global = t_local_ccw`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeshTopology {
    pub nodes: Vec<Point>,
    /// Counter-clockwise node triples.
    pub elements: Vec<[usize; 3]>,
    /// `(low, high)` node pairs; the tangent points low -> high.
    pub edges: Vec<[usize; 2]>,
    /// Global edge of each local edge, local edge `i` being opposite vertex `i`.
    pub element_edges: Vec<[usize; 3]>,
    pub element_edge_orientation: Vec<[Orientation; 3]>,
    /// Elements adjacent to each edge, in increasing element order.
    pub edge_elements: Vec<Vec<usize>>,
    pub boundary_edge: Vec<bool>,
    pub n: usize,
    pub bounds: Rect,
}

impl MeshTopology {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Vertex coordinates of an element in counter-clockwise order.
    pub fn element_vertices(&self, elem: usize) -> [Point; 3] {
        let [a, b, c] = self.elements[elem];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn element_area(&self, elem: usize) -> f64 {
        let [a, b, c] = self.element_vertices(elem);
        0.5 * cross(b - a, c - a)
    }

    pub fn element_diameter(&self, elem: usize) -> f64 {
        let [a, b, c] = self.element_vertices(elem);
        (b - a).norm().max((c - b).norm()).max((a - c).norm())
    }

    /// Mesh size: the largest element diameter.
    pub fn h(&self) -> f64 {
        (0..self.num_elements())
            .map(|e| self.element_diameter(e))
            .fold(0.0, f64::max)
    }

    /// Start and end points of a global edge, following the global tangent.
    pub fn edge_points(&self, edge: usize) -> (Point, Point) {
        let [a, b] = self.edges[edge];
        (self.nodes[a], self.nodes[b])
    }

    /// Start and end node of local edge `i` under the counter-clockwise convention.
    pub fn local_edge_nodes(&self, elem: usize, local_edge: usize) -> [usize; 2] {
        let tri = self.elements[elem];
        [tri[(local_edge + 1) % 3], tri[(local_edge + 2) % 3]]
    }

    pub fn element_edge_sign(&self, elem: usize, local_edge: usize) -> Result<Orientation> {
        if elem >= self.num_elements() {
            return Err(Error::IndexOutOfRange { what: "element", index: elem, len: self.num_elements() });
        }
        if local_edge >= 3 {
            return Err(Error::IndexOutOfRange { what: "local edge", index: local_edge, len: 3 });
        }
        Ok(self.element_edge_orientation[elem][local_edge])
    }

    /// Plain-text listing of nodes, elements and edges.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "nodes {}", self.num_nodes());
        for (i, p) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "{i} {:.17e} {:.17e}", p.x, p.y);
        }
        let _ = writeln!(out, "elements {}", self.num_elements());
        for (i, t) in self.elements.iter().enumerate() {
            let e = self.element_edges[i];
            let s = self.element_edge_orientation[i].map(|o| o.sign() as i32);
            let _ = writeln!(
                out,
                "{i} {} {} {} edges {} {} {} signs {} {} {}",
                t[0], t[1], t[2], e[0], e[1], e[2], s[0], s[1], s[2]
            );
        }
        let _ = writeln!(out, "edges {}", self.num_edges());
        for (i, e) in self.edges.iter().enumerate() {
            let _ = writeln!(out, "{i} {} {} {}", e[0], e[1], u8::from(self.boundary_edge[i]));
        }
        out
    }
}

pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Uniform `n x n` grid of squares, each split into two right triangles.
pub fn build_uniform_triangulation(n: usize, bounds: Rect) -> Result<MeshTopology> {
    if n == 0 {
        return Err(Error::Config("mesh resolution must be at least 1".into()));
    }
    if bounds.is_degenerate() {
        return Err(Error::Config(format!("degenerate mesh bounds {bounds:?}")));
    }
    let np = n + 1;
    let dx = (bounds.x_max - bounds.x_min) / n as f64;
    let dy = (bounds.y_max - bounds.y_min) / n as f64;
    let node = |i: usize, j: usize| j * np + i;

    let mut nodes = Vec::with_capacity(np * np);
    for j in 0..np {
        for i in 0..np {
            // Pin the last row/column to the bounds exactly.
            let x = if i == n { bounds.x_max } else { bounds.x_min + i as f64 * dx };
            let y = if j == n { bounds.y_max } else { bounds.y_min + j as f64 * dy };
            nodes.push(Point::new(x, y));
        }
    }

    let mut elements = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let p00 = node(i, j);
            let p10 = node(i + 1, j);
            let p01 = node(i, j + 1);
            let p11 = node(i + 1, j + 1);
            elements.push([p00, p10, p11]);
            elements.push([p00, p11, p01]);
        }
    }

    // Edge numbering: horizontal, vertical, then diagonal edges, each row-major.
    let num_h = n * np;
    let num_v = np * n;
    let h_edge = |i: usize, j: usize| j * n + i;
    let v_edge = |i: usize, j: usize| num_h + j * np + i;
    let d_edge = |i: usize, j: usize| num_h + num_v + j * n + i;

    let mut edges = vec![[0usize; 2]; num_h + num_v + n * n];
    for j in 0..np {
        for i in 0..n {
            edges[h_edge(i, j)] = [node(i, j), node(i + 1, j)];
        }
    }
    for j in 0..n {
        for i in 0..np {
            edges[v_edge(i, j)] = [node(i, j), node(i, j + 1)];
        }
    }
    for j in 0..n {
        for i in 0..n {
            edges[d_edge(i, j)] = [node(i, j), node(i + 1, j + 1)];
        }
    }

    let mut element_edges = Vec::with_capacity(elements.len());
    for j in 0..n {
        for i in 0..n {
            // lower: [p00, p10, p11] -> opposite edges: (p10,p11), (p11,p00), (p00,p10)
            element_edges.push([v_edge(i + 1, j), d_edge(i, j), h_edge(i, j)]);
            // upper: [p00, p11, p01] -> opposite edges: (p11,p01), (p01,p00), (p00,p11)
            element_edges.push([h_edge(i, j + 1), v_edge(i, j), d_edge(i, j)]);
        }
    }

    let mut element_edge_orientation = Vec::with_capacity(elements.len());
    let mut edge_elements = vec![Vec::with_capacity(2); edges.len()];
    for (t, tri) in elements.iter().enumerate() {
        let mut orient = [Orientation::Positive; 3];
        for k in 0..3 {
            let start = tri[(k + 1) % 3];
            let end = tri[(k + 2) % 3];
            let g = element_edges[t][k];
            debug_assert!(
                (edges[g] == [start, end]) || (edges[g] == [end, start]),
                "edge table mismatch"
            );
            orient[k] = if edges[g][0] == start { Orientation::Positive } else { Orientation::Negative };
            edge_elements[g].push(t);
        }
        element_edge_orientation.push(orient);
    }
    let boundary_edge = edge_elements.iter().map(|adj| adj.len() == 1).collect();

    Ok(MeshTopology {
        nodes,
        elements,
        edges,
        element_edges,
        element_edge_orientation,
        edge_elements,
        boundary_edge,
        n,
        bounds,
    })
}
