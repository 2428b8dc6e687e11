//! Curvature on finite weighted measured graphs.
//!
//! * [`graph`]: the graph model `(V, w, m)`, metric, generators and the
//!   `.graph.json` format.
//! * [`lp`]: a small dense simplex solver over `f64` or exact rationals.
//! * [`ollivier`]: Ollivier curvature through a transport LP and a
//!   Lipschitz-function LP, optimal plans, and plan surgery.
//! * [`bakry_emery`]: Γ, Γ₂ and vertex Bakry–Émery curvature, plus a search
//!   for graphs where the two curvature signs disagree.
//! * [`spectral_heat`]: Laplacian, heat semigroup, Lipschitz extensions,
//!   harmonic functions, gradient decay and concentration checks.

// Index loops read closer to the matrix formulas; `!(a > b)` is kept where
// NaN must be rejected.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bakry_emery;
pub mod graph;
pub mod linalg;
pub mod lp;
pub mod ollivier;
pub mod scalar;
pub mod spectral_heat;

pub use graph::{Vertex, WeightedGraph, UNREACHABLE};
pub use scalar::{Number, NumericError, Rational, Scalar};

/// Arithmetic backend selected at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Float,
    Exact,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "float" => Ok(Mode::Float),
            "exact" | "exact-rational" | "rational" => Ok(Mode::Exact),
            other => Err(format!("unknown mode {other:?} (expected float or exact)")),
        }
    }
}
