use serde::Serialize;

use crate::graph::{GraphError, Vertex, WeightedGraph};
use crate::ollivier::{min_curvature, CurvatureError, MinCurvature};
use crate::scalar::{NumericError, Scalar};
use crate::Rational;

use super::HeatError;

/// Curvature infimum over all connected pairs, as a float. Solved in exact
/// arithmetic when the data allow it, otherwise in floating point.
pub fn curvature_infimum(g: &WeightedGraph) -> Result<MinCurvature<f64>, HeatError> {
    match min_curvature::<Rational>(g) {
        Ok(m) => Ok(MinCurvature {
            kappa: m.kappa.to_f64(),
            pair: m.pair,
        }),
        Err(CurvatureError::Numeric(_))
        | Err(CurvatureError::Graph(GraphError::Numeric(_)))
        | Err(CurvatureError::Lp(crate::lp::LpError::Numeric(NumericError::Overflow))) => {
            Ok(min_curvature::<f64>(g)?)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub deg_max: f64,
    pub deg_max_finite: bool,
    pub q_min: Option<f64>,
    pub q_min_positive: bool,
    pub min_curvature: Option<f64>,
    pub min_pair: Option<(Vertex, Vertex)>,
    /// Bounded degree, `q_min > 0` and nonnegative curvature.
    pub liouville_hypotheses_met: bool,
}

pub fn hypothesis_check(g: &WeightedGraph) -> HypothesisReport {
    let deg_max = g.deg_max();
    let q_min = g.q_min().ok();
    let infimum = curvature_infimum(g).ok();
    let deg_max_finite = deg_max.is_finite();
    let q_min_positive = q_min.is_some_and(|q| q > 0.0);
    let nonnegative = infimum.as_ref().is_some_and(|m| !m.kappa.is_negative());
    HypothesisReport {
        deg_max,
        deg_max_finite,
        q_min,
        q_min_positive,
        min_curvature: infimum.as_ref().map(|m| m.kappa),
        min_pair: infimum.as_ref().map(|m| m.pair),
        liouville_hypotheses_met: deg_max_finite && q_min_positive && nonnegative,
    }
}
