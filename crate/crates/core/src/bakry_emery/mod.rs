//! Carré du champ `Γ`, its iterate `Γ₂` and vertex Bakry–Émery curvature.
//!
//! ```text
//! 2Γ(f,h)  = Δ(fh) - fΔh - hΔf
//! 2Γ₂(f)   = ΔΓ(f) - 2Γ(f, Δf)
//! ```
//!
//! The curvature at `x` is the largest `K` with `Γ₂(f)(x) ≥ K Γ(f)(x)` for
//! all `f`. Both forms only see `f` on `B₂(x)` and are invariant under
//! adding constants, so we fix `f(x) = 0` and work with matrices indexed by
//! `B₂(x)∖{x}`. `Γ` ignores the second sphere; minimizing `Γ₂` over those
//! coordinates (a Schur complement) leaves a pencil on `S₁(x)` whose
//! smallest generalized eigenvalue is the curvature.

mod search;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::{GraphError, Vertex, WeightedGraph};
use crate::linalg;
use crate::ollivier::CurvatureError;
use crate::scalar::{NumericError, Scalar};
use crate::spectral_heat::VertexFunction;
use crate::Rational;

pub use search::{counterexample_search, default_catalog, CatalogEntry, SearchOutcome, Witness};

#[derive(Debug, Error)]
pub enum BakryEmeryError {
    #[error("function is not defined at vertex {0}")]
    Undefined(Vertex),
    #[error("vertex {0} has no neighbors")]
    Isolated(Vertex),
    #[error("second-sphere block is not positive definite at vertex {0}")]
    Degenerate(Vertex),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

fn at<T: Scalar>(f: &VertexFunction<T>, v: Vertex) -> Result<T, BakryEmeryError> {
    f.get(v).cloned().ok_or(BakryEmeryError::Undefined(v))
}

fn laplacian_at<T: Scalar>(g: &WeightedGraph, f: &VertexFunction<T>, x: Vertex) -> Result<T, BakryEmeryError> {
    let fx = at(f, x)?;
    let mut total = T::zero();
    for y in g.neighbor_vertices(x) {
        let q: T = g.rate(x, y)?;
        total = total.add(&q.mul(&at(f, y)?.sub(&fx)?)?)?;
    }
    Ok(total)
}

/// `Γ(f,h)(x) = ½ Σ_y q(x,y)(f(y) - f(x))(h(y) - h(x))`.
pub fn gamma<T: Scalar>(
    g: &WeightedGraph,
    f: &VertexFunction<T>,
    h: &VertexFunction<T>,
    x: Vertex,
) -> Result<T, BakryEmeryError> {
    g.check_vertex(x)?;
    let (fx, hx) = (at(f, x)?, at(h, x)?);
    let mut total = T::zero();
    for y in g.neighbor_vertices(x) {
        let q: T = g.rate(x, y)?;
        let term = at(f, y)?.sub(&fx)?.mul(&at(h, y)?.sub(&hx)?)?;
        total = total.add(&q.mul(&term)?)?;
    }
    Ok(total.div(&T::from_i64(2))?)
}

/// `Γ₂(f)(x) = ½ΔΓ(f)(x) - Γ(f, Δf)(x)`.
pub fn gamma2<T: Scalar>(g: &WeightedGraph, f: &VertexFunction<T>, x: Vertex) -> Result<T, BakryEmeryError> {
    g.check_vertex(x)?;
    let gamma_x = gamma(g, f, f, x)?;
    let lap_x = laplacian_at(g, f, x)?;
    let mut half_lap_gamma = T::zero();
    let mut cross = T::zero();
    let fx = at(f, x)?;
    for y in g.neighbor_vertices(x) {
        let q: T = g.rate(x, y)?;
        let dg = gamma(g, f, f, y)?.sub(&gamma_x)?;
        half_lap_gamma = half_lap_gamma.add(&q.mul(&dg)?)?;
        let dl = laplacian_at(g, f, y)?.sub(&lap_x)?;
        cross = cross.add(&q.mul(&at(f, y)?.sub(&fx)?.mul(&dl)?)?)?;
    }
    let two = T::from_i64(2);
    Ok(half_lap_gamma.div(&two)?.sub(&cross.div(&two)?)?)
}

/// Matrices of `f ↦ Γ(f)(x)` and `f ↦ Γ₂(f)(x)` over functions with
/// `f(x) = 0`, in the basis `S₁(x)` followed by `S₂(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalForms<T = f64> {
    pub center: Vertex,
    pub basis: Vec<Vertex>,
    /// Number of leading basis vertices in `S₁(x)`.
    pub first_sphere: usize,
    pub gamma_matrix: Vec<Vec<T>>,
    pub gamma2_matrix: Vec<Vec<T>>,
}

impl<T: Scalar> LocalForms<T> {
    pub fn new(g: &WeightedGraph, x: Vertex) -> Result<Self, BakryEmeryError> {
        g.check_vertex(x)?;
        if g.degree(x) == 0 {
            return Err(BakryEmeryError::Isolated(x));
        }
        let s1 = g.sphere(x, 1);
        let first_sphere = s1.len();
        let mut basis = s1;
        basis.extend(g.sphere(x, 2));
        let k = basis.len();
        let n = g.num_vertices();

        let indicator = |entries: &[Vertex]| {
            let mut values = vec![T::zero(); n];
            for &v in entries {
                values[v] = values[v].add(&T::one()).expect("small integer");
            }
            VertexFunction::total(values)
        };
        let forms = |f: &VertexFunction<T>| -> Result<(T, T), BakryEmeryError> {
            Ok((gamma(g, f, f, x)?, gamma2(g, f, x)?))
        };

        let diagonal: Vec<(T, T)> = basis
            .iter()
            .map(|&v| forms(&indicator(&[v])))
            .collect::<Result<_, _>>()?;
        let mut gm = vec![vec![T::zero(); k]; k];
        let mut g2m = vec![vec![T::zero(); k]; k];
        let two = T::from_i64(2);
        for i in 0..k {
            gm[i][i] = diagonal[i].0.clone();
            g2m[i][i] = diagonal[i].1.clone();
            for j in i + 1..k {
                let (a, b) = forms(&indicator(&[basis[i], basis[j]]))?;
                let a = a.sub(&diagonal[i].0)?.sub(&diagonal[j].0)?.div(&two)?;
                let b = b.sub(&diagonal[i].1)?.sub(&diagonal[j].1)?.div(&two)?;
                gm[i][j] = a.clone();
                gm[j][i] = a;
                g2m[i][j] = b.clone();
                g2m[j][i] = b;
            }
        }
        Ok(LocalForms {
            center: x,
            basis,
            first_sphere,
            gamma_matrix: gm,
            gamma2_matrix: g2m,
        })
    }

    /// `Γ₂ - KΓ` as a matrix.
    pub fn shifted(&self, k: &T) -> Result<Vec<Vec<T>>, NumericError> {
        let mut out = self.gamma2_matrix.clone();
        for (row, grow) in out.iter_mut().zip(&self.gamma_matrix) {
            for (v, gv) in row.iter_mut().zip(grow) {
                *v = v.sub(&k.mul(gv)?)?;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self, g: &WeightedGraph) -> Value {
        let matrix = |m: &Vec<Vec<T>>| -> Vec<Vec<f64>> {
            m.iter().map(|row| row.iter().map(Scalar::to_f64).collect()).collect()
        };
        let mut out = json!({
            "center": g.id(self.center),
            "basis": self.basis.iter().map(|&v| g.id(v)).collect::<Vec<_>>(),
            "first_sphere": self.first_sphere,
            "gamma": matrix(&self.gamma_matrix),
            "gamma2": matrix(&self.gamma2_matrix),
        });
        if T::EXACT {
            let exact = |m: &Vec<Vec<T>>| -> Vec<Vec<String>> {
                m.iter().map(|row| row.iter().map(ToString::to_string).collect()).collect()
            };
            out["gamma_exact"] = json!(exact(&self.gamma_matrix));
            out["gamma2_exact"] = json!(exact(&self.gamma2_matrix));
        }
        out
    }
}

/// Vertex Bakry–Émery curvature (non-normalized, infinite dimension).
pub fn be_curvature(g: &WeightedGraph, x: Vertex) -> Result<f64, BakryEmeryError> {
    let forms = LocalForms::<f64>::new(g, x)?;
    let a = forms.first_sphere;
    let k = forms.basis.len();
    let g2 = &forms.gamma2_matrix;

    // Schur complement of the second-sphere block, which is diagonal.
    let mut reduced = DMatrix::<f64>::from_fn(a, a, |i, j| g2[i][j]);
    for b in a..k {
        let pivot = g2[b][b];
        if pivot <= 0.0 {
            return Err(BakryEmeryError::Degenerate(x));
        }
        for i in 0..a {
            for j in 0..a {
                reduced[(i, j)] -= g2[i][b] * g2[b][j] / pivot;
            }
        }
    }
    // Restrict to the range of Γ (its first-sphere block is diagonal).
    let keep: Vec<usize> = (0..a).filter(|&i| forms.gamma_matrix[i][i] > 1e-10).collect();
    if keep.is_empty() {
        return Err(BakryEmeryError::Isolated(x));
    }
    let scale: Vec<f64> = keep.iter().map(|&i| forms.gamma_matrix[i][i].sqrt()).collect();
    let pencil = DMatrix::<f64>::from_fn(keep.len(), keep.len(), |i, j| {
        reduced[(keep[i], keep[j])] / (scale[i] * scale[j])
    });
    let eigen = SymmetricEigen::new(pencil);
    Ok(eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Curvature at every vertex, in vertex order.
pub fn be_curvatures(g: &WeightedGraph) -> Result<Vec<f64>, BakryEmeryError> {
    g.vertices().into_par_iter().map(|x| be_curvature(g, x)).collect()
}

/// Whether `Γ₂ ≥ KΓ` holds at `x`, decided exactly.
pub fn be_at_least(g: &WeightedGraph, x: Vertex, k: Rational) -> Result<bool, BakryEmeryError> {
    let forms = LocalForms::<Rational>::new(g, x)?;
    Ok(linalg::is_positive_semidefinite(forms.shifted(&k)?)?)
}

/// Sign test `BE(x) ≥ 0`: exact when the data are rational, otherwise by
/// the float curvature with the 1e-9 tolerance.
pub fn be_nonnegative(g: &WeightedGraph, x: Vertex) -> Result<bool, BakryEmeryError> {
    match be_at_least(g, x, Rational::from_integer(0)) {
        Ok(b) => Ok(b),
        Err(BakryEmeryError::Numeric(_)) | Err(BakryEmeryError::Graph(GraphError::Numeric(_))) => {
            Ok(!be_curvature(g, x)?.is_negative())
        }
        Err(e) => Err(e),
    }
}
