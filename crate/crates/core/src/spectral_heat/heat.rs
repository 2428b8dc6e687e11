use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::graph::WeightedGraph;
use crate::ollivier::MinCurvature;

use super::{curvature_infimum, HeatError, VertexFunction};

pub const DEFAULT_T_GRID: [f64; 7] = [0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0];

/// Eigendecomposition of the conjugated Laplacian `M^{1/2} Δ M^{-1/2}`,
/// whose entries are `w(x,y)/√(m(x)m(y))` and `-Deg(x)` on the diagonal.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    sqrt_m: DVector<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl HeatKernel {
    pub fn new(g: &WeightedGraph) -> Result<Self, HeatError> {
        if !g.is_connected() {
            return Err(HeatError::Disconnected);
        }
        let n = g.num_vertices();
        let sqrt_m = DVector::from_iterator(n, g.vertices().map(|x| g.measure(x).sqrt()));
        let mut s = DMatrix::<f64>::zeros(n, n);
        for x in g.vertices() {
            for y in g.neighbor_vertices(x) {
                s[(x, y)] = g.weight(x, y) / (sqrt_m[x] * sqrt_m[y]);
            }
            s[(x, x)] = -g.weighted_degree(x);
        }
        let eigen = SymmetricEigen::new(s);
        Ok(HeatKernel {
            sqrt_m,
            eigenvalues: eigen.eigenvalues,
            eigenvectors: eigen.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eigenvalues.as_slice()
    }

    /// `P_t f`. Returns `f` unchanged at `t = 0`.
    pub fn evolve(&self, f: &[f64], t: f64) -> Result<Vec<f64>, HeatError> {
        let n = self.sqrt_m.len();
        if f.len() != n {
            return Err(HeatError::LengthMismatch { expected: n, got: f.len() });
        }
        if t < 0.0 || t.is_nan() {
            return Err(HeatError::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(f.to_vec());
        }
        let u = DVector::from_iterator(n, f.iter().zip(self.sqrt_m.iter()).map(|(v, s)| v * s));
        let mut coeffs = self.eigenvectors.tr_mul(&u);
        for (c, lambda) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= (t * lambda).exp();
        }
        let v = &self.eigenvectors * coeffs;
        Ok(v.iter().zip(self.sqrt_m.iter()).map(|(v, s)| v / s).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatState {
    pub base: VertexFunction,
    pub t: f64,
    pub values: VertexFunction,
}

pub fn heat_evolve(g: &WeightedGraph, f: &VertexFunction, t: f64) -> Result<HeatState, HeatError> {
    let values = f.values_or_err()?;
    if t < 0.0 || t.is_nan() {
        return Err(HeatError::NegativeTime(t));
    }
    let kernel = HeatKernel::new(g)?;
    Ok(HeatState {
        base: f.clone(),
        t,
        values: VertexFunction::total(kernel.evolve(&values, t)?),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub t: f64,
    /// `‖∇P_t f‖_∞ / ‖∇f‖_∞`.
    pub ratio: f64,
    /// `e^{-Kt}`.
    pub bound: f64,
    pub pass: bool,
}

/// Gradient decay checks for many functions against one validated `K`.
#[derive(Debug, Clone)]
pub struct DecayChecker<'g> {
    graph: &'g WeightedGraph,
    kernel: HeatKernel,
    k: f64,
    infimum: MinCurvature<f64>,
}

impl<'g> DecayChecker<'g> {
    /// Fails when `K` is above the curvature infimum of `g` (1e-9 slack).
    pub fn new(g: &'g WeightedGraph, k: f64) -> Result<Self, HeatError> {
        let kernel = HeatKernel::new(g)?;
        let infimum = curvature_infimum(g)?;
        if !k.is_finite() || k > infimum.kappa + 1e-9 {
            return Err(HeatError::CurvatureBound {
                k,
                infimum: infimum.kappa,
            });
        }
        Ok(DecayChecker {
            graph: g,
            kernel,
            k,
            infimum,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn infimum(&self) -> &MinCurvature<f64> {
        &self.infimum
    }

    pub fn check(&self, f: &VertexFunction, t_grid: &[f64]) -> Result<Vec<DecayRow>, HeatError> {
        let values = f.values_or_err()?;
        let initial = f.lipschitz_norm(self.graph);
        if initial == 0.0 {
            return Err(HeatError::ConstantFunction);
        }
        t_grid
            .iter()
            .map(|&t| {
                let evolved = VertexFunction::total(self.kernel.evolve(&values, t)?);
                let ratio = evolved.lipschitz_norm(self.graph) / initial;
                let bound = (-self.k * t).exp();
                Ok(DecayRow {
                    t,
                    ratio,
                    bound,
                    pass: ratio <= bound + 1e-8,
                })
            })
            .collect()
    }
}

pub fn gradient_decay_check(
    g: &WeightedGraph,
    f: &VertexFunction,
    k: f64,
    t_grid: &[f64],
) -> Result<Vec<DecayRow>, HeatError> {
    DecayChecker::new(g, k)?.check(f, t_grid)
}
