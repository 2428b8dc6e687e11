//! Test-only oracles that share no code with the solvers under test.

#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;

use curvlab::{Rational, Vertex, WeightedGraph};
use num_traits::Zero;

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn exact_rate(g: &WeightedGraph, x: Vertex, y: Vertex) -> Rational {
    let w = g.weight_number(x, y).expect("adjacent").exact().expect("exact weight");
    w / g.measure_number(x).exact().expect("exact measure")
}

/// Solve the square system `a·x = b`; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c] / a[c][c];
                for j in c..n {
                    let v = a[c][j];
                    a[i][j] -= f * v;
                }
                let v = b[c];
                b[i] -= f * v;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Row-reduce `[a | b]` and drop zero rows, so the rows left are independent.
fn independent_rows(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let mut rows: Vec<(Vec<Rational>, Rational)> = a.into_iter().zip(b).collect();
    let ncols = rows.first().map_or(0, |r| r.0.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i].0[c].is_zero()) else { continue };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && !rows[i].0[c].is_zero() {
                let f = rows[i].0[c] / rows[rank].0[c];
                let (pivot_row, pivot_rhs) = rows[rank].clone();
                for j in 0..ncols {
                    rows[i].0[j] -= f * pivot_row[j];
                }
                rows[i].1 -= f * pivot_rhs;
            }
        }
        rank += 1;
    }
    for row in &rows[rank..] {
        assert!(row.1.is_zero(), "inconsistent marginal system");
    }
    rows.truncate(rank);
    rows.into_iter().unzip()
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        visit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        if idx[i] == i + n - k {
            return;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `κ(x₀,y₀)` by enumerating every basic feasible solution of the transport
/// polytope on `B₁(x₀) × B₁(y₀)` in exact arithmetic and keeping the best.
pub fn transport_oracle(g: &WeightedGraph, x0: Vertex, y0: Vertex) -> Rational {
    let d0 = g.distance(x0, y0) as i128;
    let ball = |v: Vertex| -> Vec<Vertex> {
        let mut b: Vec<Vertex> = g.neighbor_vertices(v).collect();
        b.push(v);
        b.sort_unstable();
        b
    };
    let sources = ball(x0);
    let targets = ball(y0);
    let nvars = sources.len() * targets.len();
    let var = |i: usize, j: usize| i * targets.len() + j;
    let gain: Vec<Rational> = (0..nvars)
        .map(|k| {
            let (x, y) = (sources[k / targets.len()], targets[k % targets.len()]);
            Rational::from_integer(d0 - g.distance(x, y) as i128)
        })
        .collect();

    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, &x) in sources.iter().enumerate() {
        if x != x0 {
            let mut row = vec![Rational::zero(); nvars];
            for j in 0..targets.len() {
                row[var(i, j)] = Rational::from_integer(1);
            }
            a.push(row);
            b.push(exact_rate(g, x0, x));
        }
    }
    for (j, &y) in targets.iter().enumerate() {
        if y != y0 {
            let mut row = vec![Rational::zero(); nvars];
            for i in 0..sources.len() {
                row[var(i, j)] = Rational::from_integer(1);
            }
            a.push(row);
            b.push(exact_rate(g, y0, y));
        }
    }
    let (a, b) = independent_rows(a, b);
    let m = a.len();

    let mut best: Option<Rational> = None;
    combinations(nvars, m, |basis| {
        let square: Vec<Vec<Rational>> = a.iter().map(|row| basis.iter().map(|&k| row[k]).collect()).collect();
        let Some(xb) = solve_square(square, b.clone()) else { return };
        if xb.iter().any(|v| *v < Rational::zero()) {
            return;
        }
        let value: Rational = basis.iter().zip(&xb).map(|(&k, v)| gain[k] * v).sum();
        if best.is_none_or(|cur| value > cur) {
            best = Some(value);
        }
    });
    best.expect("transport polytope has a vertex") / Rational::from_integer(d0)
}
