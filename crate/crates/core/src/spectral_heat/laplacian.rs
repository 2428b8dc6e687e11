use nalgebra::{DMatrix, DVector};

use crate::graph::{GraphError, WeightedGraph};
use crate::linalg;
use crate::scalar::{NumericError, Scalar};
use crate::Rational;

use super::{HeatError, VertexFunction};

/// `Δf` for a function given as a full value vector.
pub fn laplacian_values<T: Scalar>(g: &WeightedGraph, f: &[T]) -> Result<Vec<T>, HeatError> {
    if f.len() != g.num_vertices() {
        return Err(HeatError::LengthMismatch {
            expected: g.num_vertices(),
            got: f.len(),
        });
    }
    let mut out = Vec::with_capacity(f.len());
    for x in g.vertices() {
        let mut total = T::zero();
        for y in g.neighbor_vertices(x) {
            let q: T = g.rate(x, y)?;
            total = total.add(&q.mul(&f[y].sub(&f[x])?)?)?;
        }
        out.push(total);
    }
    Ok(out)
}

pub fn laplacian_apply(g: &WeightedGraph, f: &VertexFunction) -> Result<VertexFunction, HeatError> {
    let values = f.values_or_err()?;
    Ok(VertexFunction::total(laplacian_values(g, &values)?))
}

/// Matrix of `Δ`: `q(x,y)` off the diagonal, `-Deg(x)` on it.
pub fn laplacian_matrix<T: Scalar>(g: &WeightedGraph) -> Result<Vec<Vec<T>>, GraphError> {
    let n = g.num_vertices();
    let mut a = vec![vec![T::zero(); n]; n];
    for x in g.vertices() {
        for y in g.neighbor_vertices(x) {
            a[x][y] = g.rate(x, y)?;
        }
        a[x][x] = g.weighted_degree_as::<T>(x)?.neg();
    }
    Ok(a)
}

/// `‖Δf‖_∞`.
pub fn harmonic_residual(g: &WeightedGraph, f: &VertexFunction) -> Result<f64, HeatError> {
    let lap = laplacian_apply(g, f)?;
    Ok(lap.sup_norm())
}

/// Harmonic extension of `boundary` to the vertices outside its domain.
pub fn dirichlet_solve(g: &WeightedGraph, boundary: &VertexFunction) -> Result<VertexFunction, HeatError> {
    if boundary.len() != g.num_vertices() {
        return Err(HeatError::LengthMismatch {
            expected: g.num_vertices(),
            got: boundary.len(),
        });
    }
    if boundary.domain().next().is_none() {
        return Err(HeatError::EmptyBoundary);
    }
    let components = g.components();
    let mut touches = vec![false; g.component_count()];
    for b in boundary.domain() {
        touches[components[b]] = true;
    }
    let interior: Vec<_> = g.vertices().filter(|&v| boundary.get(v).is_none()).collect();
    if let Some(&v) = interior.iter().find(|&&v| !touches[components[v]]) {
        return Err(HeatError::UnreachableInterior(v));
    }

    let mut slot = vec![usize::MAX; g.num_vertices()];
    for (i, &v) in interior.iter().enumerate() {
        slot[v] = i;
    }
    let k = interior.len();
    let mut a = DMatrix::<f64>::zeros(k, k);
    let mut b = DVector::<f64>::zeros(k);
    for (i, &x) in interior.iter().enumerate() {
        for y in g.neighbor_vertices(x) {
            let q = g.transition_rate(x, y)?;
            a[(i, i)] += q;
            match boundary.get(y) {
                Some(value) => b[i] += q * value,
                None => a[(i, slot[y])] -= q,
            }
        }
    }
    let solution = a
        .lu()
        .solve(&b)
        .ok_or_else(|| HeatError::UnreachableInterior(interior[0]))?;
    let mut out = boundary.clone();
    for (i, &v) in interior.iter().enumerate() {
        out.set(v, solution[i]);
    }
    Ok(out)
}

/// Dimension of the null space of `Δ`. Uses exact arithmetic when every
/// weight and measure is rational.
pub fn laplacian_kernel_dim(g: &WeightedGraph) -> Result<usize, HeatError> {
    let n = g.num_vertices();
    match laplacian_matrix::<Rational>(g) {
        Ok(a) => match linalg::rank(a) {
            Ok(r) => return Ok(n - r),
            Err(NumericError::Overflow) => {}
            Err(e) => return Err(e.into()),
        },
        Err(GraphError::Numeric(_)) => {}
        Err(e) => return Err(e.into()),
    }
    let a = laplacian_matrix::<f64>(g)?;
    Ok(n - linalg::rank(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, Weighting};
    use crate::Number;
    use proptest::prelude::*;

    #[test]
    fn constants_and_k2() {
        let g = generate(&Family::Complete(2), Weighting::Unit).unwrap();
        let lap = laplacian_apply(&g, &VertexFunction::total(vec![0.0, 1.0])).unwrap();
        assert_eq!(lap, VertexFunction::total(vec![1.0, -1.0]));
        let c = generate(&Family::Cycle(5), Weighting::Unit).unwrap();
        let lap = laplacian_apply(&c, &VertexFunction::total(vec![3.0; 5])).unwrap();
        assert_eq!(lap.sup_norm(), 0.0);
    }

    #[test]
    fn partial_input_rejected() {
        let g = generate(&Family::Path(2), Weighting::Unit).unwrap();
        let f = VertexFunction::from_options(vec![Some(1.0), None]);
        assert!(matches!(laplacian_apply(&g, &f), Err(HeatError::PartialFunction(1))));
    }

    #[test]
    fn path_dirichlet_midpoint() {
        let g = generate(&Family::Path(3), Weighting::Unit).unwrap();
        let boundary = VertexFunction::from_options(vec![Some(0.0), None, Some(2.0)]);
        let f = dirichlet_solve(&g, &boundary).unwrap();
        assert!((f.get(1).unwrap() - 1.0).abs() < 1e-12);
        assert!(harmonic_residual(&g, &f).unwrap() > 0.5); // endpoints are not harmonic
    }

    #[test]
    fn constant_boundary_gives_constant() {
        let g = generate(&Family::Grid(3, 4), Weighting::DegreeOne).unwrap();
        let mut boundary = VertexFunction::empty(g.num_vertices());
        boundary.set(0, 2.5);
        boundary.set(7, 2.5);
        let f = dirichlet_solve(&g, &boundary).unwrap();
        for v in g.vertices() {
            assert!((f.get(v).unwrap() - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_errors() {
        let g = generate(&Family::Path(3), Weighting::Unit).unwrap();
        assert!(matches!(
            dirichlet_solve(&g, &VertexFunction::empty(3)),
            Err(HeatError::EmptyBoundary)
        ));
        let mut b = WeightedGraph::builder();
        let u = b.vertex("u", Number::from_int(1));
        let v = b.vertex("v", Number::from_int(1));
        b.vertex("w", Number::from_int(1));
        b.edge(u, v, Number::from_int(1));
        let split = b.build().unwrap();
        let boundary = VertexFunction::from_options(vec![Some(1.0), None, None]);
        assert!(matches!(
            dirichlet_solve(&split, &boundary),
            Err(HeatError::UnreachableInterior(2))
        ));
    }

    #[test]
    fn kernel_counts_components() {
        let g = generate(&Family::Hypercube(3), Weighting::DegreeOne).unwrap();
        assert_eq!(laplacian_kernel_dim(&g).unwrap(), 1);
        let mut b = WeightedGraph::builder();
        for id in ["a", "b", "c", "d", "e"] {
            b.vertex(id, Number::from_ratio(1, 3));
        }
        b.edge(0, 1, Number::from_int(2));
        b.edge(2, 3, Number::from_ratio(1, 7));
        let g = b.build().unwrap();
        assert_eq!(laplacian_kernel_dim(&g).unwrap(), 3);
    }

    proptest! {
        #[test]
        fn dirichlet_form_is_nonpositive(
            values in proptest::collection::vec(-10.0f64..10.0, 8),
        ) {
            let g = generate(&Family::Hypercube(3), Weighting::Unit).unwrap();
            let lap = laplacian_values(&g, &values).unwrap();
            let form: f64 = g.vertices().map(|x| g.measure(x) * values[x] * lap[x]).sum();
            prop_assert!(form <= 1e-9);
        }
    }
}
