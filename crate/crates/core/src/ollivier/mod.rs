//! Ollivier curvature `κ(x₀,y₀)` of a vertex pair, computed two ways.
//!
//! The **primal** program maximizes
//! `Σ ρ(x,y) [1 - d(x,y)/d(x₀,y₀)]` over transport plans on
//! `B₁(x₀) × B₁(y₀)` whose sphere marginals equal the transition rates.
//!
//! The **dual** program minimizes `(Δf(x₀) - Δf(y₀)) / d(x₀,y₀)` over
//! functions `f` on `B₁(x₀) ∪ B₁(y₀)` that are 1-Lipschitz for the graph
//! metric and satisfy `f(y₀) - f(x₀) = d(x₀,y₀)`. Any such local function
//! extends to a global 1-Lipschitz one (`g(z) = max_w f(w) - d(w,z)`)
//! without changing the Laplacian at the two centers, so the local program
//! has the same optimum as the global definition.
//!
//! The two optima agree by LP duality; reports carry both plus their gap.

mod plan;
mod surgery;
mod sweep;

use thiserror::Error;

use crate::graph::{GraphError, Vertex, WeightedGraph, UNREACHABLE};
use crate::lp::{self, LinearProgram, LowerBound, LpError, Relation, Sense, Status};
use crate::scalar::{NumericError, Scalar};
use crate::spectral_heat::VertexFunction;

pub use plan::{mass_beyond, plan_to_json, plan_value, verify_plan, PlanCheck, TransportPlan};
pub use surgery::{long_range_mass, plan_surgery, strict_progress_neighbor, LongRangeMass, SurgeryOutcome};
pub use sweep::{curvature_sweep, min_curvature, MinCurvature, PairSelector, SweepEntry};

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("curvature needs two distinct vertices")]
    SameVertex,
    #[error("vertices {0} and {1} are in different components")]
    Disconnected(Vertex, Vertex),
    #[error("curvature LP ended with status {0:?}")]
    SolverStatus(Status),
    #[error("{0}")]
    PlanDomain(String),
    #[error("plan is not feasible: largest marginal residual {0}")]
    InfeasiblePlan(f64),
    #[error("{x_prime} is not a neighbor of {x0} one step closer to {y0}")]
    NotStrictProgress { x0: Vertex, y0: Vertex, x_prime: Vertex },
    #[error("no neighbor of {x0} lies one step closer to {y0}")]
    NoStrictProgressNeighbor { x0: Vertex, y0: Vertex },
    #[error("plan value {value} is below the optimum {optimum}")]
    NotOptimal { value: f64, optimum: f64 },
    #[error("surgery postcondition failed: {0}")]
    SurgeryInvariant(String),
    #[error("graph has no pairs to sweep")]
    NoPairs,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Which formulations to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Primal,
    Dual,
    #[default]
    Both,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "primal" => Ok(Method::Primal),
            "dual" => Ok(Method::Dual),
            "both" => Ok(Method::Both),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PrimalSolution<T = f64> {
    pub kappa: T,
    pub plan: TransportPlan<T>,
}

#[derive(Debug, Clone)]
pub struct DualSolution<T = f64> {
    pub kappa: T,
    /// Optimal `f` on `B₁(x₀) ∪ B₁(y₀)`, normalized by `f(x₀) = 0`.
    pub witness: VertexFunction<T>,
}

#[derive(Debug, Clone)]
pub struct CurvatureReport<T = f64> {
    pub x0: Vertex,
    pub y0: Vertex,
    pub distance: u32,
    pub primal: Option<PrimalSolution<T>>,
    pub dual: Option<DualSolution<T>>,
}

impl<T: Scalar> CurvatureReport<T> {
    /// Primal value when solved, otherwise the dual one.
    pub fn kappa(&self) -> &T {
        match (&self.primal, &self.dual) {
            (Some(p), _) => &p.kappa,
            (None, Some(d)) => &d.kappa,
            (None, None) => unreachable!("report without any solution"),
        }
    }

    /// `|κ_primal - κ_dual|` when both were solved.
    pub fn duality_gap(&self) -> Option<T> {
        let (p, d) = (self.primal.as_ref()?, self.dual.as_ref()?);
        p.kappa.sub(&d.kappa).ok().map(|g| g.abs())
    }
}

fn check_pair(g: &WeightedGraph, x0: Vertex, y0: Vertex) -> Result<u32, CurvatureError> {
    g.check_vertex(x0)?;
    g.check_vertex(y0)?;
    if x0 == y0 {
        return Err(CurvatureError::SameVertex);
    }
    let d = g.distance(x0, y0);
    if d == UNREACHABLE {
        return Err(CurvatureError::Disconnected(x0, y0));
    }
    Ok(d)
}

/// Transport formulation. Returns `κ` and an optimal plan.
pub fn curvature_primal<T: Scalar>(
    g: &WeightedGraph,
    x0: Vertex,
    y0: Vertex,
) -> Result<(T, TransportPlan<T>), CurvatureError> {
    let d0 = check_pair(g, x0, y0)?;
    let sources = g.ball(x0, 1);
    let targets = g.ball(y0, 1);
    let cols = targets.len();

    // Objective scaled by d0 so the coefficients are the integers d0 - d(x,y).
    let mut lp = LinearProgram::<T>::new(Sense::Maximize);
    for &x in &sources {
        for &y in &targets {
            let gain = d0 as i64 - g.distance(x, y) as i64;
            lp.add_variable(LowerBound::Zero, None, T::from_i64(gain));
        }
    }
    for (i, &x) in sources.iter().enumerate() {
        if x == x0 {
            continue;
        }
        let row = (0..cols).map(|j| (i * cols + j, T::one())).collect();
        lp.add_constraint(row, Relation::Eq, g.rate(x0, x)?);
    }
    for (j, &y) in targets.iter().enumerate() {
        if y == y0 {
            continue;
        }
        let col = (0..sources.len()).map(|i| (i * cols + j, T::one())).collect();
        lp.add_constraint(col, Relation::Eq, g.rate(y0, y)?);
    }

    let solution = lp::solve(&lp)?;
    if solution.status != Status::Optimal {
        return Err(CurvatureError::SolverStatus(solution.status));
    }
    let kappa = solution.value.div(&T::from_i64(d0 as i64))?;
    let mass = solution.assignment.into_iter().map(|m| m.clean()).collect();
    Ok((kappa, TransportPlan::from_parts(x0, y0, sources, targets, mass)))
}

/// Pairwise Lipschitz constraints among `domain`, dropping `(u,v)` whenever
/// some `w` in the domain lies on a geodesic from `u` to `v`: those follow
/// from the constraints through `w`.
fn lipschitz_pairs(g: &WeightedGraph, domain: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    let mut pairs = Vec::new();
    for &u in domain {
        for &v in domain {
            if u == v {
                continue;
            }
            let duv = g.distance(u, v);
            let implied = domain.iter().any(|&w| {
                w != u && w != v && g.distance(u, w) + g.distance(w, v) == duv
            });
            if !implied {
                pairs.push((u, v));
            }
        }
    }
    pairs
}

/// Lipschitz-function formulation. Returns `κ` and an optimal witness.
pub fn curvature_dual<T: Scalar>(
    g: &WeightedGraph,
    x0: Vertex,
    y0: Vertex,
) -> Result<(T, VertexFunction<T>), CurvatureError> {
    let d0 = check_pair(g, x0, y0)?;
    let mut domain = g.ball(x0, 1);
    domain.extend(g.ball(y0, 1));
    domain.sort_unstable();
    domain.dedup();
    let var = |v: Vertex| domain.binary_search(&v).expect("vertex in domain");

    // Objective d0·κ = Δf(x0) - Δf(y0), linear in the values of f.
    let mut cost = vec![T::zero(); domain.len()];
    for (center, sign) in [(x0, T::one()), (y0, T::one().neg())] {
        for &(y, _) in g.neighbors(center) {
            let q = g.rate::<T>(center, y)?.mul(&sign)?;
            cost[var(y)] = cost[var(y)].add(&q)?;
            cost[var(center)] = cost[var(center)].sub(&q)?;
        }
    }

    let mut lp = LinearProgram::<T>::new(Sense::Minimize);
    for c in cost {
        lp.add_variable(LowerBound::Free, None, c);
    }
    lp.add_constraint(vec![(var(x0), T::one())], Relation::Eq, T::zero());
    lp.add_constraint(
        vec![(var(y0), T::one()), (var(x0), T::one().neg())],
        Relation::Eq,
        T::from_i64(d0 as i64),
    );
    for (u, v) in lipschitz_pairs(g, &domain) {
        lp.add_constraint(
            vec![(var(u), T::one()), (var(v), T::one().neg())],
            Relation::Le,
            T::from_i64(g.distance(u, v) as i64),
        );
    }

    let solution = lp::solve(&lp)?;
    if solution.status != Status::Optimal {
        return Err(CurvatureError::SolverStatus(solution.status));
    }
    let kappa = solution.value.div(&T::from_i64(d0 as i64))?;
    let mut witness = VertexFunction::empty(g.num_vertices());
    for (i, value) in solution.assignment.into_iter().enumerate() {
        witness.set(domain[i], value.clean());
    }
    Ok((kappa, witness))
}

pub fn curvature<T: Scalar>(
    g: &WeightedGraph,
    x0: Vertex,
    y0: Vertex,
    method: Method,
) -> Result<CurvatureReport<T>, CurvatureError> {
    let distance = check_pair(g, x0, y0)?;
    let primal = match method {
        Method::Primal | Method::Both => {
            let (kappa, plan) = curvature_primal(g, x0, y0)?;
            Some(PrimalSolution { kappa, plan })
        }
        Method::Dual => None,
    };
    let dual = match method {
        Method::Dual | Method::Both => {
            let (kappa, witness) = curvature_dual(g, x0, y0)?;
            Some(DualSolution { kappa, witness })
        }
        Method::Primal => None,
    };
    Ok(CurvatureReport {
        x0,
        y0,
        distance,
        primal,
        dual,
    })
}

/// Float curvature from the transport program.
pub fn kappa(g: &WeightedGraph, x0: Vertex, y0: Vertex) -> Result<f64, CurvatureError> {
    curvature_primal::<f64>(g, x0, y0).map(|(k, _)| k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, Weighting};
    use crate::spectral_heat::laplacian_apply;
    use crate::{Number, Rational};

    fn r(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn k2_curvature_is_two() {
        let g = generate(&Family::Complete(2), Weighting::Unit).unwrap();
        let (k, plan) = curvature_primal::<Rational>(&g, 0, 1).unwrap();
        assert_eq!(k, r(2));
        assert_eq!(plan.at(1, 0), r(0));
        let (k, f) = curvature_dual::<Rational>(&g, 0, 1).unwrap();
        assert_eq!(k, r(2));
        assert_eq!((f.get(0), f.get(1)), (Some(&r(0)), Some(&r(1))));
    }

    #[test]
    fn path_endpoint_pair() {
        let g = generate(&Family::Path(3), Weighting::Unit).unwrap();
        let report = curvature::<Rational>(&g, 0, 1, Method::Both).unwrap();
        assert_eq!(*report.kappa(), r(1));
        assert_eq!(report.duality_gap(), Some(r(0)));
    }

    #[test]
    fn flat_pairs_have_zero_curvature() {
        let c6 = generate(&Family::Cycle(6), Weighting::Unit).unwrap();
        assert_eq!(curvature_primal::<Rational>(&c6, 2, 3).unwrap().0, r(0));
        let z = generate(&Family::LatticeSegment(21), Weighting::Unit).unwrap();
        assert_eq!(curvature_dual::<Rational>(&z, 10, 11).unwrap().0, r(0));
    }

    #[test]
    fn witness_is_shift_invariant() {
        let g = generate(&Family::Path(3), Weighting::Unit).unwrap();
        let (k, f) = curvature_dual::<f64>(&g, 0, 1).unwrap();
        // Extend the local witness to all of V (it already is) and shift it.
        let base = f.as_total().unwrap();
        for shift in [0.0, 3.5, -7.25] {
            let h = VertexFunction::total(base.iter().map(|v| v + shift).collect());
            let lap = laplacian_apply(&g, &h).unwrap();
            let value = (lap.get(0).unwrap() - lap.get(1).unwrap()) / g.distance(0, 1) as f64;
            assert!((value - k).abs() < 1e-12);
        }
    }

    #[test]
    fn errors_on_bad_pairs() {
        let g = generate(&Family::Path(3), Weighting::Unit).unwrap();
        assert!(matches!(kappa(&g, 1, 1), Err(CurvatureError::SameVertex)));
        let mut b = WeightedGraph::builder();
        b.vertex("a", Number::from_int(1));
        b.vertex("b", Number::from_int(1));
        let split = b.build().unwrap();
        assert!(matches!(kappa(&split, 0, 1), Err(CurvatureError::Disconnected(0, 1))));
    }

    #[test]
    fn exact_mode_needs_exact_data() {
        let mut b = WeightedGraph::builder();
        let a = b.vertex("a", Number::parse_decimal("1e-300").unwrap());
        let c = b.vertex("c", Number::from_int(1));
        b.edge(a, c, Number::from_int(1));
        let g = b.build().unwrap();
        assert!(curvature_primal::<f64>(&g, a, c).is_ok());
        assert!(matches!(
            curvature_primal::<Rational>(&g, a, c),
            Err(CurvatureError::Graph(GraphError::Numeric(NumericError::NotExact)))
        ));
    }

    #[test]
    fn pruned_constraints_keep_edges() {
        let g = generate(&Family::Cycle(6), Weighting::Unit).unwrap();
        let domain: Vec<Vertex> = vec![0, 1, 2, 5];
        let pairs = lipschitz_pairs(&g, &domain);
        assert!(pairs.contains(&(0, 1)) && pairs.contains(&(1, 0)));
        // 5 - 0 - 1 is a geodesic inside the domain.
        assert!(!pairs.contains(&(5, 1)));
    }
}
