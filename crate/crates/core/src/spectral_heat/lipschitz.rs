use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Vertex, WeightedGraph, UNREACHABLE};

use super::{HeatError, VertexFunction};

/// Slack used when checking the 1-Lipschitz property of input data.
const LIPSCHITZ_SLACK: f64 = 1e-12;

fn check_lipschitz_on_domain(g: &WeightedGraph, f: &VertexFunction) -> Result<(), HeatError> {
    let domain: Vec<Vertex> = f.domain().collect();
    for &u in &domain {
        for &v in &domain {
            let d = g.distance(u, v);
            if u == v || d == UNREACHABLE {
                continue;
            }
            let excess = f.get(u).unwrap() - f.get(v).unwrap() - d as f64;
            if excess > LIPSCHITZ_SLACK {
                return Err(HeatError::NotLipschitz { u, v, excess });
            }
        }
    }
    Ok(())
}

/// `g(z) = max_{w∈S} g₀(w) - d(w,z)`: the smallest 1-Lipschitz function
/// agreeing with `g₀` on its domain `S`.
pub fn min_lipschitz_extension(g: &WeightedGraph, g0: &VertexFunction) -> Result<VertexFunction, HeatError> {
    if g0.len() != g.num_vertices() {
        return Err(HeatError::LengthMismatch {
            expected: g.num_vertices(),
            got: g0.len(),
        });
    }
    if g0.domain().next().is_none() {
        return Err(HeatError::EmptyBoundary);
    }
    check_lipschitz_on_domain(g, g0)?;
    let mut out = VertexFunction::empty(g.num_vertices());
    for z in g.vertices() {
        let best = g0
            .domain()
            .filter(|&w| g.distance(w, z) != UNREACHABLE)
            .map(|w| g0.get(w).unwrap() - g.distance(w, z) as f64)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
        out.set(z, best.ok_or(HeatError::UnreachableInterior(z))?);
    }
    for w in g0.domain() {
        out.set(w, *g0.get(w).unwrap());
    }
    Ok(out)
}

/// `f(x) ← min_w f(w) + d(w,x)`, the largest 1-Lipschitz function below
/// `values`.
pub fn lipschitz_projection(g: &WeightedGraph, values: &[f64]) -> Result<Vec<f64>, HeatError> {
    if values.len() != g.num_vertices() {
        return Err(HeatError::LengthMismatch {
            expected: g.num_vertices(),
            got: values.len(),
        });
    }
    Ok(g.vertices()
        .map(|x| {
            g.vertices()
                .filter(|&w| g.distance(w, x) != UNREACHABLE)
                .map(|w| values[w] + g.distance(w, x) as f64)
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// I.i.d. uniform values in `[-D, D]` (`D` the diameter), projected to be
/// 1-Lipschitz and then shifted to `m`-mean zero when `centered`.
pub fn random_lipschitz<R: Rng + ?Sized>(
    g: &WeightedGraph,
    rng: &mut R,
    centered: bool,
) -> Result<VertexFunction, HeatError> {
    if !g.is_connected() {
        return Err(HeatError::Disconnected);
    }
    let span = g.diameter().max(1) as f64;
    let raw: Vec<f64> = g.vertices().map(|_| rng.random_range(-span..=span)).collect();
    let mut f = lipschitz_projection(g, &raw)?;
    if centered {
        let mean: f64 = g.vertices().map(|x| g.measure(x) * f[x]).sum::<f64>() / g.total_measure();
        for v in &mut f {
            *v -= mean;
        }
    }
    Ok(VertexFunction::total(f))
}

/// `count` functions from [`random_lipschitz`] drawn from one ChaCha stream
/// seeded with `seed`.
pub fn random_lipschitz_samples(
    g: &WeightedGraph,
    seed: u64,
    count: usize,
    centered: bool,
) -> Result<Vec<VertexFunction>, HeatError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_lipschitz(g, &mut rng, centered)).collect()
}

#[derive(Debug, Clone)]
pub struct GeodesicScenario {
    pub f: VertexFunction,
    pub x0: Vertex,
    pub y0: Vertex,
    pub epsilon: f64,
}

/// Outcome of extending `g₀(w) = min(f(w), f(x₀) - d + d(y₀,w))` from
/// `B₁(x₀)`, with `d = d(x₀,y₀)`. Each field is the worst violation, so
/// all of them are at most zero (up to rounding) when the claims hold.
#[derive(Debug, Clone)]
pub struct GeodesicExtensionReport {
    pub extension: VertexFunction,
    /// `max_z g(z) - f(z)`.
    pub above_f: f64,
    /// `|g(y₀) - (g(x₀) - d)|`.
    pub anchor_error: f64,
    /// `max_{z∈B₁(x₀)} f(z) - ε - g(z)`.
    pub below_f_minus_eps: f64,
    /// `max_{z~z'} g(z) - g(z') - 1`.
    pub lipschitz_excess: f64,
}

impl GeodesicExtensionReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.above_f <= tolerance
            && self.anchor_error <= tolerance
            && self.below_f_minus_eps <= tolerance
            && self.lipschitz_excess <= tolerance
    }
}

pub fn geodesic_extension_check(g: &WeightedGraph, scenario: &GeodesicScenario) -> Result<GeodesicExtensionReport, HeatError> {
    let GeodesicScenario { f, x0, y0, epsilon } = scenario;
    let (x0, y0, eps) = (*x0, *y0, *epsilon);
    g.check_vertex(x0)?;
    g.check_vertex(y0)?;
    let values = f.values_or_err()?;
    if values.len() != g.num_vertices() {
        return Err(HeatError::LengthMismatch {
            expected: g.num_vertices(),
            got: values.len(),
        });
    }
    let norm = f.lipschitz_norm(g);
    if norm > 1.0 + LIPSCHITZ_SLACK {
        return Err(HeatError::Hypothesis {
            hypothesis: "‖∇f‖_∞ ≤ 1",
            detail: format!("‖∇f‖_∞ = {norm}"),
        });
    }
    let d = g.distance(x0, y0);
    if x0 == y0 || d == UNREACHABLE {
        return Err(HeatError::Hypothesis {
            hypothesis: "x0 ≠ y0 connected",
            detail: format!("pair ({x0},{y0})"),
        });
    }
    let d = d as f64;
    if values[x0] - values[y0] < d - eps - LIPSCHITZ_SLACK {
        return Err(HeatError::Hypothesis {
            hypothesis: "f(x0) - f(y0) ≥ d(x0,y0) - ε",
            detail: format!("f(x0) - f(y0) = {}, d = {d}", values[x0] - values[y0]),
        });
    }

    let mut g0 = VertexFunction::empty(g.num_vertices());
    for w in g.ball(x0, 1) {
        let cap = values[x0] - d + g.distance(y0, w) as f64;
        g0.set(w, values[w].min(cap));
    }
    let ext = min_lipschitz_extension(g, &g0)?;
    let e = ext.values_or_err()?;

    let above_f = g.vertices().map(|z| e[z] - values[z]).fold(f64::NEG_INFINITY, f64::max);
    let anchor_error = (e[y0] - (e[x0] - d)).abs();
    let below_f_minus_eps = g
        .ball(x0, 1)
        .into_iter()
        .map(|z| values[z] - eps - e[z])
        .fold(f64::NEG_INFINITY, f64::max);
    let lipschitz_excess = g
        .vertices()
        .flat_map(|z| g.neighbor_vertices(z).map(move |y| (z, y)))
        .map(|(z, y)| e[z] - e[y] - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GeodesicExtensionReport {
        extension: ext,
        above_f,
        anchor_error,
        below_f_minus_eps,
        lipschitz_excess,
    })
}

/// A random scenario with `‖∇f‖_∞ = 1` exactly. Values are multiples of
/// 1/64 so every comparison is exact in floating point.
pub fn random_geodesic_scenario<R: Rng + ?Sized>(
    g: &WeightedGraph,
    rng: &mut R,
    epsilon: f64,
) -> Result<GeodesicScenario, HeatError> {
    if !g.is_connected() || g.num_vertices() < 2 {
        return Err(HeatError::Disconnected);
    }
    let span = 64 * g.diameter() as i64;
    let f = loop {
        let raw: Vec<f64> = g
            .vertices()
            .map(|_| rng.random_range(-span..=span) as f64 / 64.0)
            .collect();
        let f = VertexFunction::total(lipschitz_projection(g, &raw)?);
        if f.lipschitz_norm(g) == 1.0 {
            break f;
        }
    };
    let values = f.values_or_err()?;
    let candidates: Vec<(Vertex, Vertex)> = g
        .vertices()
        .flat_map(|x| g.vertices().map(move |y| (x, y)))
        .filter(|&(x, y)| x != y && values[x] - values[y] >= g.distance(x, y) as f64 - epsilon)
        .collect();
    if candidates.is_empty() {
        return Err(HeatError::NoNearGeodesicPair(epsilon));
    }
    let (x0, y0) = candidates[rng.random_range(0..candidates.len())];
    Ok(GeodesicScenario { f, x0, y0, epsilon })
}
