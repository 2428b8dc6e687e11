use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::graph::{Vertex, WeightedGraph, UNREACHABLE};
use crate::scalar::Scalar;

use super::HeatError;

/// A real function on the vertices, possibly defined only on a subset.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction<T = f64> {
    values: Vec<Option<T>>,
}

impl<T: Clone> VertexFunction<T> {
    pub fn total(values: Vec<T>) -> Self {
        VertexFunction {
            values: values.into_iter().map(Some).collect(),
        }
    }

    /// Empty domain on a graph with `n` vertices.
    pub fn empty(n: usize) -> Self {
        VertexFunction {
            values: vec![None; n],
        }
    }

    pub fn from_options(values: Vec<Option<T>>) -> Self {
        VertexFunction { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(Option::is_none)
    }

    pub fn get(&self, v: Vertex) -> Option<&T> {
        self.values.get(v).and_then(Option::as_ref)
    }

    pub fn set(&mut self, v: Vertex, value: T) {
        self.values[v] = Some(value);
    }

    pub fn domain(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_some())
            .map(|(i, _)| i)
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn as_total(&self) -> Option<Vec<T>> {
        self.values.iter().cloned().collect()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> VertexFunction<U> {
        VertexFunction {
            values: self.values.iter().map(|v| v.as_ref().map(&f)).collect(),
        }
    }
}

impl<T: Scalar> VertexFunction<T> {
    pub fn to_f64(&self) -> VertexFunction<f64> {
        self.map(Scalar::to_f64)
    }
}

impl VertexFunction<f64> {
    /// `∇_{xy} f = (f(x) - f(y)) / d(x,y)`; `None` off the domain, on the
    /// diagonal, or across components.
    pub fn gradient(&self, g: &WeightedGraph, x: Vertex, y: Vertex) -> Option<f64> {
        let d = g.distance(x, y);
        if x == y || d == UNREACHABLE {
            return None;
        }
        Some((self.get(x)? - self.get(y)?) / d as f64)
    }

    /// `‖∇f‖_∞`: largest gradient over ordered adjacent pairs in the domain.
    /// Ordered pairs cover both signs, so this is the absolute version.
    pub fn lipschitz_norm(&self, g: &WeightedGraph) -> f64 {
        let mut best: f64 = 0.0;
        for x in self.domain() {
            for y in g.neighbor_vertices(x) {
                if let Some(grad) = self.gradient(g, x, y) {
                    best = best.max(grad);
                }
            }
        }
        best
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// `⟨f⟩ = Σ m(x) f(x)`, requiring a total function.
    pub fn mean(&self, g: &WeightedGraph) -> Result<f64, HeatError> {
        let mut total = 0.0;
        for x in g.vertices() {
            total += g.measure(x) * self.get(x).ok_or(HeatError::PartialFunction(x))?;
        }
        Ok(total)
    }

    pub fn values_or_err(&self) -> Result<Vec<f64>, HeatError> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v.ok_or(HeatError::PartialFunction(i)))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct FunctionDoc {
    values: BTreeMap<String, f64>,
}

/// Read `{"values": {"<vertex id>": <number>, ...}}`. Vertices not listed
/// are outside the domain.
pub fn load_function<R: Read>(g: &WeightedGraph, reader: R) -> Result<VertexFunction, HeatError> {
    let doc: FunctionDoc =
        serde_json::from_reader(reader).map_err(|e| HeatError::Malformed(e.to_string()))?;
    let mut f = VertexFunction::empty(g.num_vertices());
    for (id, value) in doc.values {
        let v = g.vertex(&id)?;
        f.set(v, value);
    }
    Ok(f)
}

pub fn save_function<W: Write>(g: &WeightedGraph, f: &VertexFunction, mut writer: W) -> Result<(), HeatError> {
    let doc = FunctionDoc {
        values: f.domain().map(|v| (g.id(v).to_string(), f.get(v).copied().unwrap_or(0.0))).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| HeatError::Malformed(e.to_string()))?;
    s.push('\n');
    writer
        .write_all(s.as_bytes())
        .map_err(|e| HeatError::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, Weighting};

    #[test]
    fn gradient_and_norms() {
        let g = generate(&Family::Path(3), Weighting::Unit).unwrap();
        let f = VertexFunction::total(vec![0.0, 1.0, 3.0]);
        assert_eq!(f.gradient(&g, 2, 0), Some(1.5));
        assert_eq!(f.gradient(&g, 0, 0), None);
        assert_eq!(f.lipschitz_norm(&g), 2.0);
        assert_eq!(f.sup_norm(), 3.0);
        assert_eq!(f.mean(&g).unwrap(), 4.0);
    }

    #[test]
    fn partial_functions() {
        let g = generate(&Family::Path(3), Weighting::Unit).unwrap();
        let mut f = VertexFunction::empty(3);
        f.set(1, 2.0);
        assert_eq!(f.domain().collect::<Vec<_>>(), vec![1]);
        assert!(!f.is_total());
        assert!(matches!(f.mean(&g), Err(HeatError::PartialFunction(0))));
    }

    #[test]
    fn function_file_round_trip() {
        let g = generate(&Family::Cycle(4), Weighting::Unit).unwrap();
        let f = VertexFunction::total(vec![0.5, -1.0, 0.25, 0.0]);
        let mut buf = Vec::new();
        save_function(&g, &f, &mut buf).unwrap();
        assert_eq!(load_function(&g, buf.as_slice()).unwrap(), f);
        let err = load_function(&g, r#"{"values":{"zz":1}}"#.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("zz"));
    }
}
