//! Finite weighted measured graphs `(V, w, m)`, their transition rates,
//! degrees and the combinatorial metric.

mod enumerate;
mod generate;
mod io;

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use thiserror::Error;

use crate::scalar::{Number, NumericError, Scalar};

pub use enumerate::connected_graphs;
pub use generate::{generate, random_connected, Family, RandomGraphParams, Weighting};
pub use io::{load_graph, load_graph_file, save_graph, save_graph_file, to_json_string, LoadOptions};

/// Index of a vertex in its graph's vertex order.
pub type Vertex = usize;

/// Distance between vertices in different components.
pub const UNREACHABLE: u32 = u32::MAX;

/// All-pairs distances are computed up front below this size.
const EAGER_DISTANCE_LIMIT: usize = 4096;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("nonpositive measure at vertex {0:?}")]
    NonpositiveMeasure(String),
    #[error("negative weight on edge {0:?}-{1:?}")]
    NegativeWeight(String, String),
    #[error("self-loop with nonzero weight at {0:?}")]
    SelfLoop(String),
    #[error("duplicate edge {0:?}-{1:?}")]
    DuplicateEdge(String, String),
    #[error("asymmetric weight entries for {0:?}-{1:?}")]
    AsymmetricWeight(String, String),
    #[error("no edges")]
    NoEdges,
    #[error("graph is not connected")]
    Disconnected,
    #[error("unsupported graph family {0:?}")]
    UnsupportedFamily(String),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, Vertex>,
    measure: Vec<Number>,
    // Sorted by neighbor index; only positive weights are stored.
    adjacency: Vec<Vec<(Vertex, Number)>>,
    edge_count: usize,
    distances: Vec<OnceLock<Box<[u32]>>>,
}

/// Collects vertices and edges, then validates everything in [`build`](Self::build).
#[derive(Debug, Default)]
pub struct GraphBuilder {
    ids: Vec<String>,
    index: HashMap<String, Vertex>,
    measure: Vec<Number>,
    edges: HashMap<(Vertex, Vertex), Number>,
    edge_order: Vec<(Vertex, Vertex)>,
    error: Option<GraphError>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, id: impl Into<String>, m: Number) -> Vertex {
        let id = id.into();
        if self.error.is_none() {
            if self.index.contains_key(&id) {
                self.error = Some(GraphError::DuplicateVertex(id.clone()));
            } else if !(m.value() > 0.0) || m.exact().is_some_and(|r| r <= num_rational::Ratio::from_integer(0)) {
                self.error = Some(GraphError::NonpositiveMeasure(id.clone()));
            }
        }
        let v = self.ids.len();
        self.index.entry(id.clone()).or_insert(v);
        self.ids.push(id);
        self.measure.push(m);
        v
    }

    pub fn edge(&mut self, u: Vertex, v: Vertex, w: Number) -> &mut Self {
        if self.error.is_some() {
            return self;
        }
        let name = |x: Vertex| self.ids.get(x).cloned().unwrap_or_else(|| x.to_string());
        if u >= self.ids.len() || v >= self.ids.len() {
            self.error = Some(GraphError::VertexOutOfRange(u.max(v)));
            return self;
        }
        if !w.value().is_finite() || w.value() < 0.0 {
            self.error = Some(GraphError::NegativeWeight(name(u), name(v)));
            return self;
        }
        if u == v {
            if !w.is_zero() {
                self.error = Some(GraphError::SelfLoop(name(u)));
            }
            return self;
        }
        let key = (u.min(v), u.max(v));
        match self.edges.get(&key) {
            Some(prev) if prev.value() == w.value() => {
                self.error = Some(GraphError::DuplicateEdge(name(u), name(v)));
            }
            Some(_) => {
                self.error = Some(GraphError::AsymmetricWeight(name(u), name(v)));
            }
            None => {
                self.edges.insert(key, w);
                self.edge_order.push(key);
            }
        }
        self
    }

    pub fn edge_by_id(&mut self, u: &str, v: &str, w: Number) -> &mut Self {
        match (self.index.get(u).copied(), self.index.get(v).copied()) {
            (Some(a), Some(b)) => self.edge(a, b, w),
            (a, _) => {
                if self.error.is_none() {
                    let missing = if a.is_none() { u } else { v };
                    self.error = Some(GraphError::UnknownVertex(missing.to_string()));
                }
                self
            }
        }
    }

    pub fn build(self) -> Result<WeightedGraph, GraphError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let n = self.ids.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut edge_count = 0;
        for key in &self.edge_order {
            let w = self.edges[key];
            if w.is_zero() {
                continue;
            }
            adjacency[key.0].push((key.1, w));
            adjacency[key.1].push((key.0, w));
            edge_count += 1;
        }
        for list in &mut adjacency {
            list.sort_by_key(|(v, _)| *v);
        }
        let g = WeightedGraph {
            ids: self.ids,
            index: self.index,
            measure: self.measure,
            adjacency,
            edge_count,
            distances: (0..n).map(|_| OnceLock::new()).collect(),
        };
        if n <= EAGER_DISTANCE_LIMIT {
            for v in 0..n {
                g.distance_row(v);
            }
        }
        Ok(g)
    }
}

impl WeightedGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.ids.len()
    }

    pub fn id(&self, v: Vertex) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<Vertex> {
        self.index.get(id).copied()
    }

    /// Look up a vertex by id, naming it in the error when absent.
    pub fn vertex(&self, id: &str) -> Result<Vertex, GraphError> {
        self.index_of(id)
            .ok_or_else(|| GraphError::UnknownVertex(id.to_string()))
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.num_vertices() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange(v))
        }
    }

    pub fn measure(&self, v: Vertex) -> f64 {
        self.measure[v].value()
    }

    pub fn measure_number(&self, v: Vertex) -> Number {
        self.measure[v]
    }

    pub fn total_measure(&self) -> f64 {
        self.measure.iter().map(Number::value).sum()
    }

    pub fn total_measure_as<T: Scalar>(&self) -> Result<T, NumericError> {
        self.measure
            .iter()
            .try_fold(T::zero(), |acc, m| acc.add(&T::from_number(m)?))
    }

    /// Neighbors with their edge weights, in increasing vertex order.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, Number)] {
        &self.adjacency[v]
    }

    pub fn neighbor_vertices(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adjacency[v].iter().map(|(u, _)| *u)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn weight_number(&self, u: Vertex, v: Vertex) -> Option<Number> {
        self.adjacency
            .get(u)?
            .binary_search_by_key(&v, |(x, _)| *x)
            .ok()
            .map(|i| self.adjacency[u][i].1)
    }

    pub fn weight(&self, u: Vertex, v: Vertex) -> f64 {
        self.weight_number(u, v).map_or(0.0, |w| w.value())
    }

    pub fn is_adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.weight_number(u, v).is_some()
    }

    /// Edges `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, Number)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |(v, _)| u < *v)
                .map(move |(v, w)| (u, *v, *w))
        })
    }

    /// `q(x,y) = w(x,y) / m(x)`.
    pub fn transition_rate(&self, x: Vertex, y: Vertex) -> Result<f64, GraphError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        Ok(self.weight(x, y) / self.measure(x))
    }

    /// Transition rate in the requested arithmetic.
    pub fn rate<T: Scalar>(&self, x: Vertex, y: Vertex) -> Result<T, GraphError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        match self.weight_number(x, y) {
            None => Ok(T::zero()),
            Some(w) => Ok(T::from_number(&w)?.div(&T::from_number(&self.measure[x])?)?),
        }
    }

    /// `Deg(x) = Σ_y q(x,y)`.
    pub fn weighted_degree(&self, x: Vertex) -> f64 {
        let total: f64 = self.adjacency[x].iter().map(|(_, w)| w.value()).sum();
        total / self.measure(x)
    }

    pub fn weighted_degree_as<T: Scalar>(&self, x: Vertex) -> Result<T, GraphError> {
        let mut total = T::zero();
        for (_, w) in &self.adjacency[x] {
            total = total.add(&T::from_number(w)?)?;
        }
        Ok(total.div(&T::from_number(&self.measure[x])?)?)
    }

    pub fn deg_max(&self) -> f64 {
        self.vertices()
            .map(|x| self.weighted_degree(x))
            .fold(0.0, f64::max)
    }

    /// Smallest transition rate over ordered adjacent pairs.
    pub fn q_min(&self) -> Result<f64, GraphError> {
        let mut best: Option<f64> = None;
        for x in self.vertices() {
            for (_, w) in &self.adjacency[x] {
                let q = w.value() / self.measure(x);
                best = Some(best.map_or(q, |b: f64| b.min(q)));
            }
        }
        best.ok_or(GraphError::NoEdges)
    }

    pub fn q_min_as<T: Scalar>(&self) -> Result<T, GraphError> {
        let mut best: Option<T> = None;
        for x in self.vertices() {
            for (y, _) in &self.adjacency[x] {
                let q: T = self.rate(x, *y)?;
                best = Some(match best {
                    Some(b) if b <= q => b,
                    _ => q,
                });
            }
        }
        best.ok_or(GraphError::NoEdges)
    }

    fn distance_row(&self, source: Vertex) -> &[u32] {
        self.distances[source].get_or_init(|| self.bfs(source))
    }

    fn bfs(&self, source: Vertex) -> Box<[u32]> {
        let mut dist = vec![UNREACHABLE; self.num_vertices()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if dist[v] == UNREACHABLE {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist.into_boxed_slice()
    }

    /// Combinatorial distance; [`UNREACHABLE`] across components.
    pub fn distance(&self, x: Vertex, y: Vertex) -> u32 {
        self.distance_row(x)[y]
    }

    /// `B_r(x)` in increasing vertex order.
    pub fn ball(&self, x: Vertex, r: u32) -> Vec<Vertex> {
        let row = self.distance_row(x);
        self.vertices().filter(|&z| row[z] <= r).collect()
    }

    /// `S_r(x)` in increasing vertex order.
    pub fn sphere(&self, x: Vertex, r: u32) -> Vec<Vertex> {
        let row = self.distance_row(x);
        self.vertices().filter(|&z| row[z] == r).collect()
    }

    pub fn diameter(&self) -> u32 {
        self.vertices()
            .flat_map(|x| self.distance_row(x).iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Component label per vertex, labels numbered in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.num_vertices()];
        let mut next = 0;
        for v in self.vertices() {
            if label[v] != usize::MAX {
                continue;
            }
            for (u, d) in self.distance_row(v).iter().enumerate() {
                if *d != UNREACHABLE {
                    label[u] = next;
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices() > 0 && self.distance_row(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// Same graph with every measure divided by `c`; this multiplies every
    /// transition rate by `c`.
    pub fn with_measures_divided(&self, c: Number) -> Result<WeightedGraph, GraphError> {
        let mut b = GraphBuilder::new();
        for v in self.vertices() {
            b.vertex(self.ids[v].clone(), self.measure[v].div(&c));
        }
        for (u, v, w) in self.edges() {
            b.edge(u, v, w);
        }
        b.build()
    }
}
