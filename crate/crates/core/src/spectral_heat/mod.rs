//! Laplacian, heat semigroup and the finite checks built on them.
//!
//! `Δf(x) = Σ_y q(x,y)(f(y) - f(x))` is self-adjoint for the inner product
//! weighted by `m`, since `m(x)q(x,y) = w(x,y)`. The semigroup `P_t = e^{tΔ}`
//! is computed from the eigendecomposition of `M^{1/2} Δ M^{-1/2}`.

mod concentration;
mod function;
mod heat;
mod hypotheses;
mod laplacian;
mod lipschitz;

use thiserror::Error;

use crate::graph::{GraphError, Vertex};
use crate::ollivier::CurvatureError;
use crate::scalar::NumericError;

pub use concentration::{concentration_check, ConcentrationChecker, ConcentrationReport};
pub use function::{load_function, save_function, VertexFunction};
pub use heat::{gradient_decay_check, heat_evolve, DecayChecker, DecayRow, HeatKernel, HeatState, DEFAULT_T_GRID};
pub use hypotheses::{curvature_infimum, hypothesis_check, HypothesisReport};
pub use laplacian::{
    dirichlet_solve, harmonic_residual, laplacian_apply, laplacian_kernel_dim, laplacian_matrix, laplacian_values,
};
pub use lipschitz::{
    geodesic_extension_check, lipschitz_projection, min_lipschitz_extension, random_geodesic_scenario,
    random_lipschitz, random_lipschitz_samples, GeodesicExtensionReport, GeodesicScenario,
};

#[derive(Debug, Error)]
pub enum HeatError {
    #[error("function is not defined at vertex {0}")]
    PartialFunction(Vertex),
    #[error("function has {got} values, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("malformed function file: {0}")]
    Malformed(String),
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("graph must be connected")]
    Disconnected,
    #[error("boundary set is empty")]
    EmptyBoundary,
    #[error("interior vertex {0} is not connected to the boundary")]
    UnreachableInterior(Vertex),
    #[error("not 1-Lipschitz: f({u}) - f({v}) exceeds d({u},{v}) by {excess}")]
    NotLipschitz { u: Vertex, v: Vertex, excess: f64 },
    #[error("function is constant")]
    ConstantFunction,
    #[error("hypothesis {hypothesis} fails: {detail}")]
    Hypothesis { hypothesis: &'static str, detail: String },
    #[error("K = {k} exceeds computed curvature infimum {infimum}")]
    CurvatureBound { k: f64, infimum: f64 },
    #[error("K must be positive, got {0}")]
    NonpositiveK(f64),
    #[error("r must be positive, got {0}")]
    NonpositiveR(f64),
    #[error("no pair satisfies f(x0) - f(y0) >= d(x0,y0) - {0}")]
    NoNearGeodesicPair(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}
