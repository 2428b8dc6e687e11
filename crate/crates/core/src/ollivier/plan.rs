use serde_json::{json, Value};

use crate::graph::{Vertex, WeightedGraph};
use crate::scalar::Scalar;

use super::CurvatureError;

/// A nonnegative coupling `ρ` on `B₁(x₀) × B₁(y₀)`.
///
/// Only the sphere marginals are constrained: rows `x ∈ S₁(x₀)` must carry
/// `q(x₀,x)` and columns `y ∈ S₁(y₀)` must carry `q(y₀,y)`. The row of `x₀`
/// and the column of `y₀` are free.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<T = f64> {
    x0: Vertex,
    y0: Vertex,
    sources: Vec<Vertex>,
    targets: Vec<Vertex>,
    mass: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanCheck<T = f64> {
    pub feasible: bool,
    /// `Σ_y ρ(x,y) - q(x₀,x)` for each `x ∈ S₁(x₀)`.
    pub row_residuals: Vec<(Vertex, T)>,
    /// `Σ_x ρ(x,y) - q(y₀,y)` for each `y ∈ S₁(y₀)`.
    pub col_residuals: Vec<(Vertex, T)>,
    pub min_entry: T,
}

impl<T: Scalar> PlanCheck<T> {
    pub fn max_residual(&self) -> T {
        self.row_residuals
            .iter()
            .chain(&self.col_residuals)
            .map(|(_, r)| r.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

impl<T: Scalar> TransportPlan<T> {
    pub fn zeros(g: &WeightedGraph, x0: Vertex, y0: Vertex) -> Self {
        let sources = g.ball(x0, 1);
        let targets = g.ball(y0, 1);
        let mass = vec![T::zero(); sources.len() * targets.len()];
        TransportPlan {
            x0,
            y0,
            sources,
            targets,
            mass,
        }
    }

    pub(crate) fn from_parts(
        x0: Vertex,
        y0: Vertex,
        sources: Vec<Vertex>,
        targets: Vec<Vertex>,
        mass: Vec<T>,
    ) -> Self {
        debug_assert_eq!(mass.len(), sources.len() * targets.len());
        TransportPlan {
            x0,
            y0,
            sources,
            targets,
            mass,
        }
    }

    pub fn x0(&self) -> Vertex {
        self.x0
    }

    pub fn y0(&self) -> Vertex {
        self.y0
    }

    pub fn sources(&self) -> &[Vertex] {
        &self.sources
    }

    pub fn targets(&self) -> &[Vertex] {
        &self.targets
    }

    fn slot(&self, x: Vertex, y: Vertex) -> Option<usize> {
        let i = self.sources.binary_search(&x).ok()?;
        let j = self.targets.binary_search(&y).ok()?;
        Some(i * self.targets.len() + j)
    }

    pub fn get(&self, x: Vertex, y: Vertex) -> Option<&T> {
        self.slot(x, y).map(|k| &self.mass[k])
    }

    /// The entry at `(x,y)`, or zero outside the ball product.
    pub fn at(&self, x: Vertex, y: Vertex) -> T {
        self.get(x, y).cloned().unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, x: Vertex, y: Vertex, value: T) -> Result<(), CurvatureError> {
        let k = self.slot(x, y).ok_or_else(|| {
            CurvatureError::PlanDomain(format!("entry ({x},{y}) lies outside B1(x0) x B1(y0)"))
        })?;
        self.mass[k] = value;
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (Vertex, Vertex, &T)> + '_ {
        let cols = self.targets.len();
        self.mass
            .iter()
            .enumerate()
            .map(move |(k, m)| (self.sources[k / cols], self.targets[k % cols], m))
    }

    pub fn to_f64(&self) -> TransportPlan<f64> {
        TransportPlan {
            x0: self.x0,
            y0: self.y0,
            sources: self.sources.clone(),
            targets: self.targets.clone(),
            mass: self.mass.iter().map(Scalar::to_f64).collect(),
        }
    }

    fn check_domain(&self, g: &WeightedGraph) -> Result<(), CurvatureError> {
        g.check_vertex(self.x0)?;
        g.check_vertex(self.y0)?;
        if self.sources != g.ball(self.x0, 1) || self.targets != g.ball(self.y0, 1) {
            return Err(CurvatureError::PlanDomain(
                "plan is not indexed by B1(x0) x B1(y0) of this graph".into(),
            ));
        }
        Ok(())
    }
}

/// Marginal residuals and feasibility (all residuals and negative entries
/// within the backend tolerance).
pub fn verify_plan<T: Scalar>(g: &WeightedGraph, plan: &TransportPlan<T>) -> Result<PlanCheck<T>, CurvatureError> {
    plan.check_domain(g)?;
    let mut row_residuals = Vec::new();
    for &x in plan.sources.iter().filter(|&&x| x != plan.x0) {
        let mut total = T::zero();
        for &y in &plan.targets {
            total = total.add(&plan.at(x, y))?;
        }
        row_residuals.push((x, total.sub(&g.rate::<T>(plan.x0, x)?)?));
    }
    let mut col_residuals = Vec::new();
    for &y in plan.targets.iter().filter(|&&y| y != plan.y0) {
        let mut total = T::zero();
        for &x in &plan.sources {
            total = total.add(&plan.at(x, y))?;
        }
        col_residuals.push((y, total.sub(&g.rate::<T>(plan.y0, y)?)?));
    }
    let min_entry = plan
        .mass
        .iter()
        .cloned()
        .fold(None, |acc: Option<T>, m| match acc {
            Some(a) if a <= m => Some(a),
            _ => Some(m),
        })
        .unwrap_or_else(T::zero);
    let feasible = row_residuals
        .iter()
        .chain(&col_residuals)
        .all(|(_, r)| r.is_negligible())
        && !min_entry.is_negative();
    Ok(PlanCheck {
        feasible,
        row_residuals,
        col_residuals,
        min_entry,
    })
}

/// `Σ ρ(x,y) [1 - d(x,y)/d(x₀,y₀)]`.
pub fn plan_value<T: Scalar>(g: &WeightedGraph, plan: &TransportPlan<T>) -> Result<T, CurvatureError> {
    plan.check_domain(g)?;
    let d0 = g.distance(plan.x0, plan.y0) as i64;
    let mut total = T::zero();
    for (x, y, m) in plan.entries() {
        let coefficient = T::from_i64(d0 - g.distance(x, y) as i64);
        total = total.add(&m.mul(&coefficient)?)?;
    }
    Ok(total.div(&T::from_i64(d0))?)
}

/// Mass moved over distances strictly greater than `d0`.
pub fn mass_beyond<T: Scalar>(g: &WeightedGraph, plan: &TransportPlan<T>, d0: u32) -> Result<T, CurvatureError> {
    let mut total = T::zero();
    for (x, y, m) in plan.entries() {
        if g.distance(x, y) > d0 {
            total = total.add(m)?;
        }
    }
    Ok(total)
}

/// JSON export: `{pair, entries: [{x, y, rho, d}], value, marginal_residuals}`.
/// Exact plans carry an additional `rho_exact` string per entry.
pub fn plan_to_json<T: Scalar>(g: &WeightedGraph, plan: &TransportPlan<T>) -> Result<Value, CurvatureError> {
    let check = verify_plan(g, plan)?;
    let value = plan_value(g, plan)?;
    let entries: Vec<Value> = plan
        .entries()
        .map(|(x, y, m)| {
            let mut e = json!({
                "x": g.id(x),
                "y": g.id(y),
                "rho": m.to_f64(),
                "d": g.distance(x, y),
            });
            if T::EXACT {
                e["rho_exact"] = json!(m.to_string());
            }
            e
        })
        .collect();
    let residuals = |list: &[(Vertex, T)]| -> Vec<Value> {
        list.iter()
            .map(|(v, r)| json!({"vertex": g.id(*v), "residual": r.to_f64()}))
            .collect()
    };
    let mut out = json!({
        "pair": [g.id(plan.x0), g.id(plan.y0)],
        "entries": entries,
        "value": value.to_f64(),
        "marginal_residuals": {
            "rows": residuals(&check.row_residuals),
            "cols": residuals(&check.col_residuals),
        },
    });
    if T::EXACT {
        out["value_exact"] = json!(value.to_string());
    }
    Ok(out)
}
