use rayon::prelude::*;
use serde_json::{json, Value};

use crate::graph::{connected_graphs, generate, Family, GraphError, Vertex, WeightedGraph, Weighting};
use crate::ollivier::curvature_primal;
use crate::scalar::Scalar;
use crate::Rational;

use super::{be_curvatures, be_nonnegative, BakryEmeryError};

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub graph: WeightedGraph,
}

/// Every connected graph on at most `max_vertices` vertices, then the
/// generator families of that size, all with unit weights.
pub fn default_catalog(max_vertices: usize) -> Result<Vec<CatalogEntry>, GraphError> {
    let mut catalog: Vec<CatalogEntry> = connected_graphs(max_vertices)?
        .into_iter()
        .enumerate()
        .map(|(i, graph)| CatalogEntry {
            name: format!("connected-{}v-{}e-{i}", graph.num_vertices(), graph.num_edges()),
            graph,
        })
        .collect();
    let mut families = Vec::new();
    for n in 2..=max_vertices {
        families.push(Family::Path(n));
        families.push(Family::Complete(n));
        if n >= 3 {
            families.push(Family::Cycle(n));
        }
    }
    for dim in 1..=4usize {
        if 1usize << dim <= max_vertices {
            families.push(Family::Hypercube(dim));
        }
    }
    for rows in 2..=max_vertices {
        for cols in rows..=max_vertices {
            if rows * cols <= max_vertices {
                families.push(Family::Grid(rows, cols));
            }
        }
    }
    for family in families {
        catalog.push(CatalogEntry {
            name: family.to_string(),
            graph: generate(&family, Weighting::Unit)?,
        });
    }
    Ok(catalog)
}

/// A graph with its full curvature tables.
#[derive(Debug, Clone)]
pub struct Witness {
    pub name: String,
    pub graph: WeightedGraph,
    /// Bakry–Émery curvature per vertex.
    pub be: Vec<f64>,
    /// Exact sign test `BE ≥ 0` per vertex.
    pub be_nonnegative: Vec<bool>,
    /// `κ` for every unordered pair, exact.
    pub kappa: Vec<(Vertex, Vertex, Rational)>,
}

impl Witness {
    fn build(entry: &CatalogEntry) -> Result<Self, BakryEmeryError> {
        let g = &entry.graph;
        let be = be_curvatures(g)?;
        let be_nonnegative = g
            .vertices()
            .map(|x| be_nonnegative(g, x))
            .collect::<Result<_, _>>()?;
        Ok(Witness {
            name: entry.name.clone(),
            graph: g.clone(),
            be,
            be_nonnegative,
            kappa: pair_curvatures(g)?,
        })
    }

    pub fn min_kappa(&self) -> Option<&Rational> {
        self.kappa.iter().map(|(_, _, k)| k).min()
    }

    pub fn to_json(&self) -> Value {
        let g = &self.graph;
        json!({
            "name": self.name,
            "vertices": g.num_vertices(),
            "edges": g.num_edges(),
            "bakry_emery": g.vertices().map(|x| json!({
                "vertex": g.id(x),
                "curvature": self.be[x],
                "nonnegative": self.be_nonnegative[x],
            })).collect::<Vec<_>>(),
            "ollivier": self.kappa.iter().map(|(x, y, k)| json!({
                "pair": [g.id(*x), g.id(*y)],
                "d": g.distance(*x, *y),
                "kappa": k.to_f64(),
                "kappa_exact": k.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn pair_curvatures(g: &WeightedGraph) -> Result<Vec<(Vertex, Vertex, Rational)>, BakryEmeryError> {
    let mut out = Vec::new();
    for x in g.vertices() {
        for y in x + 1..g.num_vertices() {
            let (k, _) = curvature_primal::<Rational>(g, x, y)?;
            out.push((x, y, k));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default)]
struct Signs {
    be_negative: bool,
    kappa_negative: bool,
}

fn signs(g: &WeightedGraph) -> Result<Signs, BakryEmeryError> {
    let mut be_negative = false;
    for x in g.vertices() {
        if !be_nonnegative(g, x)? {
            be_negative = true;
            break;
        }
    }
    let kappa_negative = pair_curvatures(g)?.iter().any(|(_, _, k)| *k < Rational::from_integer(0));
    Ok(Signs {
        be_negative,
        kappa_negative,
    })
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub examined: usize,
    /// Some vertex has `BE < 0` while every pair has `κ ≥ 0`.
    pub be_negative_kappa_nonnegative: Option<Witness>,
    /// Some pair has `κ < 0` while every vertex has `BE ≥ 0`.
    pub kappa_negative_be_nonnegative: Option<Witness>,
}

impl SearchOutcome {
    /// True when at least one of the two witnesses was not found.
    pub fn exhausted(&self) -> bool {
        self.be_negative_kappa_nonnegative.is_none() || self.kappa_negative_be_nonnegative.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "examined": self.examined,
            "exhausted": self.exhausted(),
            "be_negative_kappa_nonnegative":
                self.be_negative_kappa_nonnegative.as_ref().map(Witness::to_json),
            "kappa_negative_be_nonnegative":
                self.kappa_negative_be_nonnegative.as_ref().map(Witness::to_json),
        })
    }
}

/// First graph of the catalog (in catalog order) of each kind. Signs are
/// decided in exact arithmetic.
pub fn counterexample_search(catalog: &[CatalogEntry]) -> Result<SearchOutcome, BakryEmeryError> {
    let all: Vec<Signs> = catalog
        .par_iter()
        .map(|entry| signs(&entry.graph))
        .collect::<Result<_, _>>()?;
    let first = |want: fn(&Signs) -> bool| -> Result<Option<Witness>, BakryEmeryError> {
        all.iter()
            .position(want)
            .map(|i| Witness::build(&catalog[i]))
            .transpose()
    };
    Ok(SearchOutcome {
        examined: catalog.len(),
        be_negative_kappa_nonnegative: first(|s| s.be_negative && !s.kappa_negative)?,
        kappa_negative_be_nonnegative: first(|s| s.kappa_negative && !s.be_negative)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_catalog_is_exhausted() {
        let out = counterexample_search(&[]).unwrap();
        assert_eq!(out.examined, 0);
        assert!(out.exhausted());
    }

    #[test]
    fn k2_alone_is_exhausted() {
        let catalog = default_catalog(2).unwrap();
        assert!(catalog.iter().all(|e| e.graph.num_vertices() == 2));
        let out = counterexample_search(&catalog).unwrap();
        assert!(out.be_negative_kappa_nonnegative.is_none());
        assert!(out.kappa_negative_be_nonnegative.is_none());
    }

    #[test]
    fn catalog_contents() {
        let catalog = default_catalog(4).unwrap();
        let exhaustive = catalog.iter().filter(|e| e.name.starts_with("connected")).count();
        assert_eq!(exhaustive, 1 + 2 + 6);
        assert!(catalog.iter().any(|e| e.name == Family::Hypercube(2).to_string()));
    }
}
