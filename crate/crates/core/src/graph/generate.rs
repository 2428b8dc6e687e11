use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{GraphBuilder, GraphError, Vertex, WeightedGraph};
use crate::scalar::Number;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    /// Dimension of the cube; `2^dim` vertices.
    Hypercube(usize),
    Grid(usize, usize),
    /// A run of consecutive integers `0..n`, i.e. a finite piece of Z.
    LatticeSegment(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// `w ≡ 1`, `m ≡ 1`.
    Unit,
    /// `w ≡ 1`, `m(x)` = combinatorial degree, so `Deg ≡ 1`.
    Normalized,
    /// `w ≡ 1/(2|E|)`, `m(x) = deg(x)/(2|E|)`: `Deg ≡ 1` and `m(V) = 1`.
    DegreeOne,
}

impl FromStr for Family {
    type Err = GraphError;

    /// Parses `name:size`, e.g. `cycle:6`, `grid:4x4`, `hypercube:3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, size) = s
            .split_once(':')
            .ok_or_else(|| GraphError::InvalidSize(format!("expected family:size, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| GraphError::InvalidSize(format!("{t:?} in {s:?}")))
        };
        let family = match name.trim() {
            "path" => Family::Path(parse(size)?),
            "cycle" => Family::Cycle(parse(size)?),
            "complete" => Family::Complete(parse(size)?),
            "hypercube" => Family::Hypercube(parse(size)?),
            "grid" => {
                let (r, c) = size.split_once(['x', 'X']).unwrap_or((size, size));
                Family::Grid(parse(r)?, parse(c)?)
            }
            "segment" | "lattice-segment" | "segment-of-integer-lattice" => {
                Family::LatticeSegment(parse(size)?)
            }
            other => return Err(GraphError::UnsupportedFamily(other.to_string())),
        };
        Ok(family)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Path(n) => write!(f, "path:{n}"),
            Family::Cycle(n) => write!(f, "cycle:{n}"),
            Family::Complete(n) => write!(f, "complete:{n}"),
            Family::Hypercube(d) => write!(f, "hypercube:{d}"),
            Family::Grid(r, c) => write!(f, "grid:{r}x{c}"),
            Family::LatticeSegment(n) => write!(f, "segment:{n}"),
        }
    }
}

impl FromStr for Weighting {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit" => Ok(Weighting::Unit),
            "normalized" => Ok(Weighting::Normalized),
            "degree-one" => Ok(Weighting::DegreeOne),
            other => Err(GraphError::Malformed(format!("unknown weighting {other:?}"))),
        }
    }
}

/// Vertex ids and edge list of a family.
type Topology = (Vec<String>, Vec<(Vertex, Vertex)>);

fn topology(family: &Family) -> Result<Topology, GraphError> {
    let need = |n: usize, min: usize| {
        if n >= min {
            Ok(())
        } else {
            Err(GraphError::InvalidSize(format!("{family} needs size >= {min}")))
        }
    };
    let numbered = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
    Ok(match *family {
        Family::Path(n) | Family::LatticeSegment(n) => {
            need(n, 1)?;
            (numbered(n), (1..n).map(|i| (i - 1, i)).collect())
        }
        Family::Cycle(n) => {
            need(n, 3)?;
            (numbered(n), (0..n).map(|i| (i, (i + 1) % n)).collect())
        }
        Family::Complete(n) => {
            need(n, 1)?;
            let edges = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect();
            (numbered(n), edges)
        }
        Family::Hypercube(dim) => {
            if dim > 16 {
                return Err(GraphError::InvalidSize(format!("{family} is too large")));
            }
            let n = 1usize << dim;
            let ids = (0..n)
                .map(|i| {
                    if dim == 0 {
                        "0".to_string()
                    } else {
                        format!("{:0width$b}", i, width = dim)
                    }
                })
                .collect();
            let edges = (0..n)
                .flat_map(|i| (0..dim).map(move |b| (i, i ^ (1 << b))))
                .filter(|(i, j)| i < j)
                .collect();
            (ids, edges)
        }
        Family::Grid(rows, cols) => {
            need(rows, 1)?;
            need(cols, 1)?;
            let at = |r: usize, c: usize| r * cols + c;
            let ids = (0..rows)
                .flat_map(|r| (0..cols).map(move |c| format!("{r}_{c}")))
                .collect();
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((at(r, c), at(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((at(r, c), at(r + 1, c)));
                    }
                }
            }
            (ids, edges)
        }
    })
}

/// Build a graph from an explicit edge list under the given weighting.
pub(crate) fn weighted_from_edges(
    ids: Vec<String>,
    edges: &[(Vertex, Vertex)],
    weighting: Weighting,
) -> Result<WeightedGraph, GraphError> {
    let n = ids.len();
    let mut degree = vec![0i64; n];
    for &(u, v) in edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let double_edges = 2 * edges.len() as i128;
    let measure = |v: Vertex| match weighting {
        Weighting::Unit => Number::from_int(1),
        Weighting::Normalized => Number::from_int(degree[v].max(1)),
        Weighting::DegreeOne if double_edges == 0 => Number::from_int(1),
        Weighting::DegreeOne => Number::from_ratio(degree[v] as i128, double_edges),
    };
    let weight = match weighting {
        Weighting::Unit | Weighting::Normalized => Number::from_int(1),
        Weighting::DegreeOne => Number::from_ratio(1, double_edges.max(1)),
    };
    let mut b = GraphBuilder::new();
    for (v, id) in ids.into_iter().enumerate() {
        b.vertex(id, measure(v));
    }
    for &(u, v) in edges {
        b.edge(u, v, weight);
    }
    b.build()
}

pub fn generate(family: &Family, weighting: Weighting) -> Result<WeightedGraph, GraphError> {
    let (ids, edges) = topology(family)?;
    weighted_from_edges(ids, &edges, weighting)
}

/// Parameters for [`random_connected`]: weights and measures are drawn as
/// `k/den` with `den` in `1..=max_denominator` and `k` in `1..=2·den`.
#[derive(Debug, Clone, Copy)]
pub struct RandomGraphParams {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub extra_edge_probability: f64,
    pub max_denominator: i128,
}

impl Default for RandomGraphParams {
    fn default() -> Self {
        RandomGraphParams {
            min_vertices: 2,
            max_vertices: 12,
            extra_edge_probability: 0.3,
            max_denominator: 8,
        }
    }
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R, max_den: i128) -> Number {
    let den = rng.random_range(1..=max_den);
    let num = rng.random_range(1..=2 * den);
    Number::from_ratio(num, den)
}

/// Random connected graph: a random spanning tree plus independent extra
/// edges, with random rational weights and measures.
pub fn random_connected<R: Rng + ?Sized>(
    rng: &mut R,
    params: RandomGraphParams,
) -> Result<WeightedGraph, GraphError> {
    if params.min_vertices == 0 || params.min_vertices > params.max_vertices {
        return Err(GraphError::InvalidSize("bad vertex range".into()));
    }
    let n = rng.random_range(params.min_vertices..=params.max_vertices);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        let m = random_rational(rng, params.max_denominator);
        b.vertex(format!("v{i}"), m);
    }
    let mut present = vec![vec![false; n]; n];
    for i in 1..n {
        let j = rng.random_range(0..i);
        present[i][j] = true;
        present[j][i] = true;
    }
    for i in 0..n {
        for j in i + 1..n {
            if !present[i][j] && rng.random_bool(params.extra_edge_probability) {
                present[i][j] = true;
            }
            if present[i][j] {
                b.edge(i, j, random_rational(rng, params.max_denominator));
            }
        }
    }
    b.build()
}
