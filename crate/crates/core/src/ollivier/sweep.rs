use rayon::prelude::*;

use crate::graph::{Vertex, WeightedGraph, UNREACHABLE};
use crate::scalar::Scalar;

use super::{curvature, curvature_primal, CurvatureError, CurvatureReport, Method};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSelector {
    /// Every edge once, as `(u, v)` with `u < v`.
    Edges,
    /// Every unordered pair once, as `(u, v)` with `u < v`.
    AllPairs,
    List(Vec<(Vertex, Vertex)>),
}

impl PairSelector {
    pub fn pairs(&self, g: &WeightedGraph) -> Vec<(Vertex, Vertex)> {
        match self {
            PairSelector::Edges => g.edges().map(|(u, v, _)| (u, v)).collect(),
            PairSelector::AllPairs => g
                .vertices()
                .flat_map(|u| (u + 1..g.num_vertices()).map(move |v| (u, v)))
                .collect(),
            PairSelector::List(list) => list.clone(),
        }
    }
}

#[derive(Debug)]
pub struct SweepEntry<T = f64> {
    pub x0: Vertex,
    pub y0: Vertex,
    pub result: Result<CurvatureReport<T>, CurvatureError>,
}

/// Curvature of every selected pair. Pairs run in parallel; the output is in
/// selector order and a failing pair does not stop the others.
pub fn curvature_sweep<T: Scalar>(
    g: &WeightedGraph,
    selector: &PairSelector,
    method: Method,
) -> Vec<SweepEntry<T>> {
    selector
        .pairs(g)
        .into_par_iter()
        .map(|(x0, y0)| SweepEntry {
            x0,
            y0,
            result: curvature(g, x0, y0, method),
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MinCurvature<T = f64> {
    pub kappa: T,
    pub pair: (Vertex, Vertex),
}

/// Infimum of `κ` over all pairs of distinct vertices in a common component
/// (transport program).
pub fn min_curvature<T: Scalar>(g: &WeightedGraph) -> Result<MinCurvature<T>, CurvatureError> {
    let mut pairs = PairSelector::AllPairs.pairs(g);
    pairs.retain(|&(x, y)| g.distance(x, y) != UNREACHABLE);
    let values: Vec<(T, (Vertex, Vertex))> = pairs
        .into_par_iter()
        .map(|(x, y)| curvature_primal::<T>(g, x, y).map(|(k, _)| (k, (x, y))))
        .collect::<Result<_, _>>()?;
    values
        .into_iter()
        .reduce(|best, next| if next.0 < best.0 { next } else { best })
        .map(|(kappa, pair)| MinCurvature { kappa, pair })
        .ok_or(CurvatureError::NoPairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, Weighting};
    use crate::Rational;

    #[test]
    fn cycle_edges_are_all_equal() {
        let g = generate(&Family::Cycle(6), Weighting::Unit).unwrap();
        let rows = curvature_sweep::<f64>(&g, &PairSelector::Edges, Method::Both);
        assert_eq!(rows.len(), 6);
        for row in &rows {
            let report = row.result.as_ref().unwrap();
            assert!(report.kappa().abs() < 1e-9);
            assert!(report.duality_gap().unwrap() <= 1e-7);
        }
    }

    #[test]
    fn hypercube_edges_are_all_equal() {
        let g = generate(&Family::Hypercube(3), Weighting::Unit).unwrap();
        let rows = curvature_sweep::<Rational>(&g, &PairSelector::Edges, Method::Primal);
        let first = *rows[0].result.as_ref().unwrap().kappa();
        assert!(rows.iter().all(|r| *r.result.as_ref().unwrap().kappa() == first));
    }

    #[test]
    fn failing_pairs_do_not_stop_the_sweep() {
        let g = generate(&Family::Path(3), Weighting::Unit).unwrap();
        let rows = curvature_sweep::<f64>(
            &g,
            &PairSelector::List(vec![(0, 0), (0, 1)]),
            Method::Primal,
        );
        assert!(rows[0].result.is_err());
        assert!((rows[1].result.as_ref().unwrap().kappa() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infimum_over_pairs() {
        let g = generate(&Family::Complete(5), Weighting::DegreeOne).unwrap();
        let min = min_curvature::<Rational>(&g).unwrap();
        assert_eq!(min.kappa, Rational::new(5, 4));
    }
}
