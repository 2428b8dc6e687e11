use serde::Serialize;

use crate::graph::WeightedGraph;

use super::{curvature_infimum, HeatError, VertexFunction};

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub k: f64,
    pub r: f64,
    /// `2rK`.
    pub lambda: f64,
    /// `m(f > r)`.
    pub tail_mass: f64,
    /// `e^{-Kr²}`.
    pub tail_bound: f64,
    /// `⟨e^{λf}⟩`.
    pub laplace_value: f64,
    /// `e^{λ²/(4K)}`.
    pub laplace_bound: f64,
    /// `e^{-λr}⟨e^{λf}⟩`, which dominates the tail mass.
    pub chernoff_value: f64,
    pub pass_tail: bool,
    pub pass_laplace: bool,
    /// `tail_mass ≤ chernoff_value` and `e^{-λr}·laplace_bound = tail_bound`.
    pub pass_chain: bool,
    /// `e^{-K²r²}`, reported when `K ≤ 1`.
    pub old_bound: Option<f64>,
    /// `Kr² ≥ K²r²`, i.e. `K ≥ K²`, which holds exactly when `0 ≤ K ≤ 1`.
    pub beats_old_bound: Option<bool>,
}

impl ConcentrationReport {
    pub fn pass(&self) -> bool {
        self.pass_tail && self.pass_laplace && self.pass_chain
    }
}

/// Concentration checks on one graph against one validated `K`.
#[derive(Debug, Clone)]
pub struct ConcentrationChecker<'g> {
    graph: &'g WeightedGraph,
    k: f64,
    infimum: f64,
}

impl<'g> ConcentrationChecker<'g> {
    pub fn new(g: &'g WeightedGraph, k: f64) -> Result<Self, HeatError> {
        if !g.is_connected() {
            return Err(HeatError::Hypothesis {
                hypothesis: "connected",
                detail: format!("{} components", g.component_count()),
            });
        }
        let deg = g.deg_max();
        if deg > 1.0 + 1e-12 {
            return Err(HeatError::Hypothesis {
                hypothesis: "Deg_max ≤ 1",
                detail: format!("Deg_max = {deg}"),
            });
        }
        let total = g.total_measure();
        if (total - 1.0).abs() > 1e-12 {
            return Err(HeatError::Hypothesis {
                hypothesis: "m(V) = 1",
                detail: format!("m(V) = {total}"),
            });
        }
        if !(k > 0.0) {
            return Err(HeatError::NonpositiveK(k));
        }
        let infimum = curvature_infimum(g)?.kappa;
        if !k.is_finite() || k > infimum + 1e-9 {
            return Err(HeatError::CurvatureBound { k, infimum });
        }
        Ok(ConcentrationChecker { graph: g, k, infimum })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn infimum(&self) -> f64 {
        self.infimum
    }

    pub fn check(&self, f: &VertexFunction, r: f64) -> Result<ConcentrationReport, HeatError> {
        let g = self.graph;
        let values = f.values_or_err()?;
        let mean = f.mean(g)?;
        if mean.abs() > 1e-12 {
            return Err(HeatError::Hypothesis {
                hypothesis: "⟨f⟩ = 0",
                detail: format!("⟨f⟩ = {mean}"),
            });
        }
        let norm = f.lipschitz_norm(g);
        if norm > 1.0 + 1e-12 {
            return Err(HeatError::Hypothesis {
                hypothesis: "‖∇f‖_∞ ≤ 1",
                detail: format!("‖∇f‖_∞ = {norm}"),
            });
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(HeatError::NonpositiveR(r));
        }
        let k = self.k;
        let lambda = 2.0 * r * k;
        let tail_mass: f64 = g.vertices().filter(|&x| values[x] > r).map(|x| g.measure(x)).sum();
        let tail_bound = (-k * r * r).exp();
        let laplace_value: f64 = g.vertices().map(|x| g.measure(x) * (lambda * values[x]).exp()).sum();
        let laplace_bound = (lambda * lambda / (4.0 * k)).exp();
        let chernoff_value = (-lambda * r).exp() * laplace_value;
        let chained = (-lambda * r).exp() * laplace_bound;
        let pass_chain = tail_mass <= chernoff_value * (1.0 + 1e-12) + 1e-12
            && (chained - tail_bound).abs() <= 1e-12 * tail_bound.max(1.0);
        let (old_bound, beats_old_bound) = if k <= 1.0 {
            (Some((-k * k * r * r).exp()), Some(k >= k * k))
        } else {
            (None, None)
        };
        Ok(ConcentrationReport {
            k,
            r,
            lambda,
            tail_mass,
            tail_bound,
            laplace_value,
            laplace_bound,
            chernoff_value,
            pass_tail: tail_mass <= tail_bound + 1e-12,
            pass_laplace: laplace_value <= laplace_bound * (1.0 + 1e-8),
            pass_chain,
            old_bound,
            beats_old_bound,
        })
    }
}

pub fn concentration_check(
    g: &WeightedGraph,
    f: &VertexFunction,
    k: f64,
    r: f64,
) -> Result<ConcentrationReport, HeatError> {
    ConcentrationChecker::new(g, k)?.check(f, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, Weighting};
    use crate::spectral_heat::random_lipschitz;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_function_has_no_tail() {
        let g = generate(&Family::Complete(5), Weighting::DegreeOne).unwrap();
        let zero = VertexFunction::total(vec![0.0; 5]);
        for r in [0.25, 0.5, 1.0, 2.0] {
            let report = concentration_check(&g, &zero, 1.25, r).unwrap();
            assert_eq!(report.tail_mass, 0.0);
            assert_eq!(report.lambda, 2.0 * r * 1.25);
            assert!(report.pass());
            assert!(report.old_bound.is_none());
        }
    }

    #[test]
    fn indicator_like_function_on_k5() {
        let g = generate(&Family::Complete(5), Weighting::DegreeOne).unwrap();
        // 1 at one vertex, centered: mass 1/5 at 0.8, rest at -0.2.
        let f = VertexFunction::total(vec![0.8, -0.2, -0.2, -0.2, -0.2]);
        let checker = ConcentrationChecker::new(&g, 1.25).unwrap();
        for r in [0.25, 0.5, 1.0, 2.0] {
            let report = checker.check(&f, r).unwrap();
            assert!(report.pass(), "{report:?}");
        }
        assert!((checker.check(&f, 0.5).unwrap().tail_mass - 0.2).abs() < 1e-15);
    }

    #[test]
    fn old_bound_comparison_below_one() {
        let g = generate(&Family::Hypercube(3), Weighting::DegreeOne).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = random_lipschitz(&g, &mut rng, true).unwrap();
        let checker = ConcentrationChecker::new(&g, 0.5).unwrap();
        let report = checker.check(&f, 1.0).unwrap();
        assert_eq!(report.beats_old_bound, Some(true));
        assert!(report.tail_bound <= report.old_bound.unwrap());
    }

    #[test]
    fn preconditions_are_named() {
        let c6 = generate(&Family::Cycle(6), Weighting::Unit).unwrap();
        let err = ConcentrationChecker::new(&c6, 0.1).unwrap_err();
        assert!(err.to_string().contains("Deg_max ≤ 1"), "{err}");

        let c6n = generate(&Family::Cycle(6), Weighting::Normalized).unwrap();
        let err = ConcentrationChecker::new(&c6n, 0.1).unwrap_err();
        assert!(err.to_string().contains("m(V) = 1"), "{err}");

        let k5 = generate(&Family::Complete(5), Weighting::DegreeOne).unwrap();
        let err = ConcentrationChecker::new(&k5, 10.0).unwrap_err();
        assert!(err.to_string().contains("exceeds computed curvature infimum"), "{err}");
        assert!(matches!(ConcentrationChecker::new(&k5, 0.0), Err(HeatError::NonpositiveK(_))));

        let checker = ConcentrationChecker::new(&k5, 1.0).unwrap();
        let uncentered = VertexFunction::total(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(checker.check(&uncentered, 1.0).unwrap_err().to_string().contains("⟨f⟩ = 0"));
        let steep = VertexFunction::total(vec![1.6, -0.4, -0.4, -0.4, -0.4]);
        assert!(checker.check(&steep, 1.0).unwrap_err().to_string().contains("‖∇f‖_∞ ≤ 1"));
    }
}
