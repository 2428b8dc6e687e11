//! Rewriting an optimal plan so that a neighbor `x'` of `x₀` one step closer
//! to `y₀` ships all of its mass strictly inside distance `d(x₀,y₀)`.
//!
//! With `d₀ = d(x₀,y₀)` and `F = {y ∈ B₁(y₀) : d(x',y) ≥ d₀}`:
//!
//! ```text
//! ρ(x',y₀) = ρ₀(x',y₀) + Σ_{z∈F} ρ₀(x',z)
//! ρ(x',y)  = 0                        for y ∈ F
//! ρ(x₀,y)  = ρ₀(x₀,y) + ρ₀(x',y)      for y ∈ F
//! ρ(x,y)   = ρ₀(x,y)                  otherwise
//! ```
//!
//! Marginals are unchanged and the objective does not drop, so optimality
//! is preserved. When the curvature is small the rewritten plan must then
//! move at least `(q_min - ε)/2` over distances larger than `d₀`, where
//! `ε = max(0, d₀·κ)`.

use crate::graph::{Vertex, WeightedGraph};
use crate::scalar::Scalar;

use super::plan::{mass_beyond, plan_value, verify_plan, TransportPlan};
use super::{check_pair, curvature_primal, CurvatureError};

#[derive(Debug, Clone)]
pub struct SurgeryOutcome<T = f64> {
    pub plan: TransportPlan<T>,
    pub x_prime: Vertex,
    pub value_before: T,
    pub value_after: T,
    /// Changed entries with `(ρ - ρ₀)(x,y)·(d₀ - d(x,y))`; their sum is
    /// `d₀·(value_after - value_before)` and is never negative.
    pub cost_changes: Vec<(Vertex, Vertex, T)>,
}

/// Smallest-index neighbor `x'` of `x₀` with `d(x',y₀) = d(x₀,y₀) - 1`.
/// For adjacent pairs this is `y₀` itself.
pub fn strict_progress_neighbor(g: &WeightedGraph, x0: Vertex, y0: Vertex) -> Option<Vertex> {
    let d0 = g.distance(x0, y0);
    if x0 == y0 || d0 == crate::UNREACHABLE {
        return None;
    }
    g.neighbor_vertices(x0)
        .find(|&x| g.distance(x, y0) + 1 == d0)
}

pub fn plan_surgery<T: Scalar>(
    g: &WeightedGraph,
    x0: Vertex,
    y0: Vertex,
    x_prime: Vertex,
    rho0: &TransportPlan<T>,
) -> Result<SurgeryOutcome<T>, CurvatureError> {
    let d0 = check_pair(g, x0, y0)?;
    g.check_vertex(x_prime)?;
    if rho0.x0() != x0 || rho0.y0() != y0 {
        return Err(CurvatureError::PlanDomain(format!(
            "plan is for pair ({},{}), not ({x0},{y0})",
            rho0.x0(),
            rho0.y0()
        )));
    }
    if !g.is_adjacent(x0, x_prime) || g.distance(x_prime, y0) + 1 != d0 {
        return Err(CurvatureError::NotStrictProgress { x0, y0, x_prime });
    }
    let before_check = verify_plan(g, rho0)?;
    if !before_check.feasible {
        return Err(CurvatureError::InfeasiblePlan(before_check.max_residual().to_f64()));
    }
    let value_before = plan_value(g, rho0)?;
    let (optimum, _) = curvature_primal::<T>(g, x0, y0)?;
    if optimum.sub(&value_before)?.is_positive() {
        return Err(CurvatureError::NotOptimal {
            value: value_before.to_f64(),
            optimum: optimum.to_f64(),
        });
    }

    let forbidden: Vec<Vertex> = rho0
        .targets()
        .iter()
        .copied()
        .filter(|&y| g.distance(x_prime, y) >= d0)
        .collect();
    let mut rho = rho0.clone();
    let mut absorbed = rho0.at(x_prime, y0);
    for &y in &forbidden {
        let moved = rho0.at(x_prime, y);
        absorbed = absorbed.add(&moved)?;
        rho.set(x_prime, y, T::zero())?;
        rho.set(x0, y, rho0.at(x0, y).add(&moved)?)?;
    }
    rho.set(x_prime, y0, absorbed)?;

    let mut cost_changes = Vec::new();
    for (x, y, m) in rho.entries() {
        let delta = m.sub(&rho0.at(x, y))?;
        if !delta.is_exact_zero() {
            let gain = T::from_i64(d0 as i64 - g.distance(x, y) as i64);
            cost_changes.push((x, y, delta.mul(&gain)?));
        }
    }

    // Postconditions.
    let after_check = verify_plan(g, &rho)?;
    if !after_check.feasible {
        return Err(CurvatureError::SurgeryInvariant(format!(
            "marginals broken, residual {}",
            after_check.max_residual()
        )));
    }
    let value_after = plan_value(g, &rho)?;
    if value_after.sub(&value_before)?.is_negative() {
        return Err(CurvatureError::SurgeryInvariant(format!(
            "objective dropped from {value_before} to {value_after}"
        )));
    }
    let mut leftover = T::zero();
    for &y in &forbidden {
        leftover = leftover.add(&rho.at(x_prime, y))?;
    }
    if !leftover.is_exact_zero() {
        return Err(CurvatureError::SurgeryInvariant(format!(
            "{leftover} mass left in the forbidden region"
        )));
    }

    Ok(SurgeryOutcome {
        plan: rho,
        x_prime,
        value_before,
        value_after,
        cost_changes,
    })
}

/// Everything needed to check the long-range mass bound for one pair.
#[derive(Debug, Clone)]
pub struct LongRangeMass<T = f64> {
    pub kappa: T,
    /// `max(0, d₀·κ)`.
    pub epsilon: T,
    pub q_min: T,
    /// Mass of the rewritten plan over distances `> d₀`.
    pub mass_beyond: T,
    /// `(q_min - ε)/2`.
    pub bound: T,
    pub holds: bool,
    pub surgery: SurgeryOutcome<T>,
}

/// Solve the transport program, rewrite the optimal plan around the
/// smallest-index strict-progress neighbor, and compare its long-range mass
/// against `(q_min - ε)/2`.
pub fn long_range_mass<T: Scalar>(
    g: &WeightedGraph,
    x0: Vertex,
    y0: Vertex,
    x_prime: Option<Vertex>,
) -> Result<LongRangeMass<T>, CurvatureError> {
    let d0 = check_pair(g, x0, y0)?;
    let x_prime = match x_prime {
        Some(x) => x,
        None => strict_progress_neighbor(g, x0, y0)
            .ok_or(CurvatureError::NoStrictProgressNeighbor { x0, y0 })?,
    };
    let (kappa, rho0) = curvature_primal::<T>(g, x0, y0)?;
    let surgery = plan_surgery(g, x0, y0, x_prime, &rho0)?;
    let scaled = kappa.mul(&T::from_i64(d0 as i64))?;
    let epsilon = if scaled > T::zero() { scaled } else { T::zero() };
    let q_min = g.q_min_as::<T>()?;
    let mass = mass_beyond(g, &surgery.plan, d0)?;
    let bound = q_min.sub(&epsilon)?.div(&T::from_i64(2))?;
    let holds = !bound.sub(&mass)?.is_positive();
    Ok(LongRangeMass {
        kappa,
        epsilon,
        q_min,
        mass_beyond: mass,
        bound,
        holds,
        surgery,
    })
}
