//! Root graphs and the graphs derived from them.
//!
//! Indexing convention used everywhere in the crate:
//!
//! * root vertices are `0..n`;
//! * root edges are stored as pairs `(u, v)` with `u < v`, sorted
//!   lexicographically, and edge `j` is the `j`-th pair of that list;
//! * a derived graph on `V(G) ∪ E(G)` (total, Q, R, subdivision) puts the root
//!   vertices first (`0..n`) and the root edges after them (`n..n + m`).
//!
//! For `K_{n1,n2}` with the first part `0..n1`, lexicographic order puts the
//! edge joining `i` and `n1 + j` at index `i * n2 + j`.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Undirected simple graph with canonical edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Matrix<u8>,
    degrees: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an edge list in any order and orientation.
    /// Self-loops, repeated edges and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut canon: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) has an endpoint outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("repeated edge ({}, {})", w[0].0, w[0].1)));
        }
        let mut adjacency = Matrix::zeros(n, n);
        let mut degrees = vec![0; n];
        for &(u, v) in &canon {
            adjacency[(u, v)] = 1;
            adjacency[(v, u)] = 1;
            degrees[u] += 1;
            degrees[v] += 1;
        }
        Ok(Self {
            n,
            edges: canon,
            adjacency,
            degrees,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> &Matrix<u8> {
        &self.adjacency
    }

    pub fn adjacency_f64(&self) -> Matrix<f64> {
        self.adjacency.map(f64::from)
    }

    pub fn adjacency_i64(&self) -> Matrix<i64> {
        self.adjacency.map(i64::from)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[(u, v)] == 1
    }

    /// Index of edge `{u, v}` in the canonical order.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency
            .row(v)
            .iter()
            .enumerate()
            .filter_map(|(u, &a)| (a == 1).then_some(u))
    }

    /// Common degree if the graph is regular (and non-empty).
    pub fn regular_degree(&self) -> Option<usize> {
        let first = *self.degrees.first()?;
        self.degrees.iter().all(|&d| d == first).then_some(first)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.components() == 1
    }

    fn components(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        count
    }

    /// Two-colouring (`false` for the side containing vertex 0 of each
    /// component) if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut colour: Vec<Option<bool>> = vec![None; self.n];
        for start in 0..self.n {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                let cv = colour[v].unwrap();
                for u in self.neighbors(v) {
                    match colour[u] {
                        None => {
                            colour[u] = Some(!cv);
                            queue.push_back(u);
                        }
                        Some(cu) if cu == cv => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(colour.into_iter().map(|c| c.unwrap()).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Serializes as `n m` followed by one `u v` line per edge (0-based).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the edge-list format written by [`Graph::to_edge_list`]. Blank
    /// lines and lines starting with `#` are ignored.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("missing `n m` header".into()))?;
        let (n, m) = parse_pair(header, 1)?;
        let mut edges = Vec::with_capacity(m);
        for (lineno, line) in lines {
            edges.push(parse_pair(line, lineno + 1)?);
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Self::new(n, edges)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse(format!("line {lineno}: expected two integers")))?
            .parse()
            .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(Error::Parse(format!("line {lineno}: expected two integers")));
    }
    Ok(pair)
}

/// A position of the walker: a root vertex or a root edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "index")]
pub enum ElementLabel {
    Vertex(usize),
    Edge(usize),
}

impl ElementLabel {
    pub fn validate(self, g: &Graph) -> Result<Self> {
        let (index, len) = match self {
            ElementLabel::Vertex(i) => (i, g.n()),
            ElementLabel::Edge(j) => (j, g.m()),
        };
        if index >= len {
            return Err(Error::IndexOutOfRange { index, len });
        }
        Ok(self)
    }

    /// Row of this element in the `V ∪ E` basis of a graph with `n` vertices.
    pub fn basis_index(self, n: usize) -> usize {
        match self {
            ElementLabel::Vertex(i) => i,
            ElementLabel::Edge(j) => n + j,
        }
    }

    pub fn is_vertex(self) -> bool {
        matches!(self, ElementLabel::Vertex(_))
    }
}

impl fmt::Display for ElementLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementLabel::Vertex(i) => write!(f, "vertex {i}"),
            ElementLabel::Edge(j) => write!(f, "edge {j}"),
        }
    }
}

/// `n × m` vertex-edge incidence matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrix {
    matrix: Matrix<u8>,
}

impl IncidenceMatrix {
    pub fn matrix(&self) -> &Matrix<u8> {
        &self.matrix
    }

    pub fn to_i64(&self) -> Matrix<i64> {
        self.matrix.map(i64::from)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.matrix.map(f64::from)
    }
}

pub fn incidence_matrix(g: &Graph) -> IncidenceMatrix {
    let mut matrix = Matrix::zeros(g.n(), g.m());
    for (j, &(u, v)) in g.edges().iter().enumerate() {
        matrix[(u, j)] = 1;
        matrix[(v, j)] = 1;
    }
    IncidenceMatrix { matrix }
}

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidSize("complete graph needs n >= 1".into()));
    }
    Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// `K_{n1,n2}` with parts `0..n1` and `n1..n1 + n2`.
pub fn complete_bipartite(n1: usize, n2: usize) -> Result<Graph> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidSize(
            "complete bipartite graph needs both parts non-empty".into(),
        ));
    }
    Graph::new(n1 + n2, (0..n1).flat_map(|i| (0..n2).map(move |j| (i, n1 + j))))
}

pub fn cycle_graph(k: usize) -> Result<Graph> {
    if k < 3 {
        return Err(Error::InvalidSize("cycle needs k >= 3".into()));
    }
    Graph::new(k, (0..k).map(|i| (i, (i + 1) % k)))
}

pub fn path_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidSize("path needs n >= 1".into()));
    }
    Graph::new(n, (1..n).map(|i| (i - 1, i)))
}

/// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i -- i + 5`.
pub fn petersen_graph() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    Graph::new(10, outer.chain(inner).chain(spokes).collect::<Vec<_>>()).expect("petersen edges are valid")
}

pub fn line_graph(g: &Graph) -> Result<Graph> {
    if g.m() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let edges = g.edges();
    let mut out = Vec::new();
    for a in 0..edges.len() {
        for b in a + 1..edges.len() {
            if share_endpoint(edges[a], edges[b]) {
                out.push((a, b));
            }
        }
    }
    Graph::new(edges.len(), out)
}

fn share_endpoint(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1
}

/// Which blocks of the total-graph adjacency a derived graph keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivedKind {
    /// All three blocks.
    Total,
    /// Drops vertex–vertex adjacency.
    Q,
    /// Drops edge–edge adjacency.
    R,
    /// Keeps only incidences.
    Subdivision,
}

impl DerivedKind {
    fn keeps_vertex_block(self) -> bool {
        matches!(self, DerivedKind::Total | DerivedKind::R)
    }

    fn keeps_edge_block(self) -> bool {
        matches!(self, DerivedKind::Total | DerivedKind::Q)
    }
}

/// A graph on `V(G) ∪ E(G)` together with the label of each of its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalGraph {
    root: Graph,
    graph: Graph,
    labels: Vec<ElementLabel>,
    kind: DerivedKind,
}

impl TotalGraph {
    pub fn root(&self) -> &Graph {
        &self.root
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn kind(&self) -> DerivedKind {
        self.kind
    }

    /// `labels()[k]` is the root element represented by vertex `k`.
    pub fn labels(&self) -> &[ElementLabel] {
        &self.labels
    }

    pub fn index_of(&self, label: ElementLabel) -> Result<usize> {
        label.validate(&self.root)?;
        Ok(label.basis_index(self.root.n()))
    }

    /// Dimension `n + m` of the walk's state space.
    pub fn dimension(&self) -> usize {
        self.labels.len()
    }
}

/// Assembles `[[A_G, R], [Rᵀ, A_L(G)]]` (or the subset of blocks the kind
/// keeps).
pub fn derived_graph(g: &Graph, kind: DerivedKind) -> TotalGraph {
    let n = g.n();
    let mut edges = Vec::new();
    if kind.keeps_vertex_block() {
        edges.extend_from_slice(g.edges());
    }
    for (j, &(u, v)) in g.edges().iter().enumerate() {
        edges.push((u, n + j));
        edges.push((v, n + j));
    }
    if kind.keeps_edge_block() && g.m() > 0 {
        let line = line_graph(g).expect("non-empty edge set");
        edges.extend(line.edges().iter().map(|&(a, b)| (n + a, n + b)));
    }
    let graph = Graph::new(n + g.m(), edges).expect("blocks of a simple graph form a simple graph");
    let labels = (0..n)
        .map(ElementLabel::Vertex)
        .chain((0..g.m()).map(ElementLabel::Edge))
        .collect();
    TotalGraph {
        root: g.clone(),
        graph,
        labels,
        kind,
    }
}

pub fn total_graph(g: &Graph) -> TotalGraph {
    derived_graph(g, DerivedKind::Total)
}

pub fn q_graph(g: &Graph) -> TotalGraph {
    derived_graph(g, DerivedKind::Q)
}

pub fn r_graph(g: &Graph) -> TotalGraph {
    derived_graph(g, DerivedKind::R)
}

pub fn subdivision_graph(g: &Graph) -> TotalGraph {
    derived_graph(g, DerivedKind::Subdivision)
}
