//! Dense two-phase simplex with Bland's pivoting rule.
//!
//! Problems here are small (a few hundred columns at most), so the solver
//! keeps a full tableau. It runs over any [`Scalar`]: with `f64` all sign
//! tests use a 1e-9 tolerance, with [`Rational`](crate::Rational) everything
//! is exact and overflow is an error.
//!
//! Free variables are split into a difference of two nonnegative columns
//! and upper bounds become extra `≤` rows.

use std::fmt::Write as _;

use thiserror::Error;

use crate::scalar::{NumericError, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
}

/// Sparse coefficients, relation and right-hand side of one row.
type SparseRow<T> = (Vec<(usize, T)>, Relation, T);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBound {
    Zero,
    Free,
}

#[derive(Debug, Clone)]
pub struct Variable<T> {
    pub lower: LowerBound,
    pub upper: Option<T>,
    pub cost: T,
}

#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub coefficients: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub sense: Sense,
    pub variables: Vec<Variable<T>>,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub status: Status,
    /// Objective value; zero unless `status` is optimal.
    pub value: T,
    pub assignment: Vec<T>,
    /// One price per constraint, in the problem's own sense: at an optimum
    /// `Σ rhs·price = value`.
    pub duals: Vec<T>,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("constraint {constraint} references variable {index} but only {count} exist")]
    DimensionMismatch {
        constraint: usize,
        index: usize,
        count: usize,
    },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("pivot limit of {0} exceeded")]
    PivotLimit(usize),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

const PIVOT_LIMIT: usize = 200_000;

impl<T: Scalar> LinearProgram<T> {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            variables: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_variable(&mut self, lower: LowerBound, upper: Option<T>, cost: T) -> usize {
        self.variables.push(Variable { lower, upper, cost });
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, coefficients: Vec<(usize, T)>, relation: Relation, rhs: T) -> usize {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let finite = |t: &T| t.to_f64().is_finite();
        for (j, v) in self.variables.iter().enumerate() {
            if !finite(&v.cost) || v.upper.as_ref().is_some_and(|u| !finite(u)) {
                return Err(LpError::NonFinite(format!("variable {j}")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            for (j, a) in &c.coefficients {
                if *j >= self.variables.len() {
                    return Err(LpError::DimensionMismatch {
                        constraint: i,
                        index: *j,
                        count: self.variables.len(),
                    });
                }
                if !finite(a) {
                    return Err(LpError::NonFinite(format!("constraint {i}")));
                }
            }
            if !finite(&c.rhs) {
                return Err(LpError::NonFinite(format!("constraint {i}")));
            }
        }
        Ok(())
    }

    pub fn objective_at(&self, x: &[T]) -> Result<T, NumericError> {
        self.variables
            .iter()
            .zip(x)
            .try_fold(T::zero(), |acc, (v, xj)| acc.add(&v.cost.mul(xj)?))
    }

    /// Largest violation of any bound or constraint at `x`, in the backend's
    /// arithmetic. Zero when `x` is feasible.
    pub fn max_violation(&self, x: &[T]) -> Result<T, NumericError> {
        let mut worst = T::zero();
        let mut bump = |v: T| {
            if v > worst {
                worst = v;
            }
        };
        for (v, xj) in self.variables.iter().zip(x) {
            if v.lower == LowerBound::Zero {
                bump(xj.neg());
            }
            if let Some(u) = &v.upper {
                bump(xj.sub(u)?);
            }
        }
        for c in &self.constraints {
            let mut lhs = T::zero();
            for (j, a) in &c.coefficients {
                lhs = lhs.add(&a.mul(&x[*j])?)?;
            }
            let diff = lhs.sub(&c.rhs)?;
            bump(match c.relation {
                Relation::Eq => diff.abs(),
                Relation::Le => diff,
            });
        }
        Ok(worst)
    }

    /// Fixed-layout text dump for reproducing a problem outside this crate.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let sense = match self.sense {
            Sense::Maximize => "MAXIMIZE",
            Sense::Minimize => "MINIMIZE",
        };
        let _ = writeln!(s, "{sense} {} VARIABLES {} CONSTRAINTS", self.variables.len(), self.constraints.len());
        for (j, v) in self.variables.iter().enumerate() {
            let lower = match v.lower {
                LowerBound::Zero => "0",
                LowerBound::Free => "-inf",
            };
            let upper = v.upper.as_ref().map_or("+inf".to_string(), |u| u.to_string());
            let _ = writeln!(s, "VAR {j:>5} COST {:>24} LOWER {lower:>6} UPPER {upper}", v.cost.to_string());
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let rel = match c.relation {
                Relation::Eq => "=",
                Relation::Le => "<=",
            };
            let _ = write!(s, "ROW {i:>5} {rel:<2} {:>24} :", c.rhs.to_string());
            for (j, a) in &c.coefficients {
                let _ = write!(s, " {j}:{a}");
            }
            s.push('\n');
        }
        s
    }
}

/// How an original variable maps onto tableau columns.
enum ColumnMap {
    Single(usize),
    Split(usize, usize),
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    // Reduced costs r_j = c_j - c_B B^-1 A_j and the current objective value.
    reduced: Vec<T>,
    objective: T,
    structural: usize,
    pivots: usize,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) -> Result<(), LpError> {
        self.pivots += 1;
        if self.pivots > PIVOT_LIMIT {
            return Err(LpError::PivotLimit(PIVOT_LIMIT));
        }
        let p = self.rows[r][c].clone();
        for a in self.rows[r].iter_mut() {
            if !a.is_exact_zero() {
                *a = a.div(&p)?.clean();
            }
        }
        self.rhs[r] = self.rhs[r].div(&p)?.clean();
        self.rows[r][c] = T::one();
        let support: Vec<usize> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_exact_zero())
            .map(|(j, _)| j)
            .collect();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_exact_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &support {
                let v = self.rows[i][j].sub(&f.mul(&pivot_row[j])?)?;
                self.rows[i][j] = v.clean();
            }
            self.rows[i][c] = T::zero();
            self.rhs[i] = self.rhs[i].sub(&f.mul(&pivot_rhs)?)?.clean();
        }
        let f = self.reduced[c].clone();
        if !f.is_exact_zero() {
            for &j in &support {
                let v = self.reduced[j].sub(&f.mul(&pivot_row[j])?)?;
                self.reduced[j] = v.clean();
            }
            self.reduced[c] = T::zero();
            self.objective = self.objective.add(&f.mul(&pivot_rhs)?)?;
        }
        self.basis[r] = c;
        Ok(())
    }

    fn price_out(&mut self, costs: &[T]) -> Result<(), LpError> {
        self.reduced = costs.to_vec();
        self.objective = T::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_exact_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                if !a.is_exact_zero() {
                    self.reduced[j] = self.reduced[j].sub(&cb.mul(a)?)?.clean();
                }
            }
            self.objective = self.objective.add(&cb.mul(&self.rhs[i])?)?;
        }
        Ok(())
    }

    /// Maximize the priced-out objective over columns `< enterable`.
    /// Returns false when unbounded.
    fn run(&mut self, enterable: usize) -> Result<bool, LpError> {
        loop {
            // Bland: lowest-index improving column enters.
            let Some(c) = (0..enterable).find(|&j| self.reduced[j].is_positive()) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs[i].div(a)?;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let diff = ratio.sub(&br)?;
                        // Ties go to the lowest-index basic variable.
                        if diff.is_negative() || (diff.is_negligible() && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c)?,
            }
        }
    }
}

pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpSolution<T>, LpError> {
    lp.validate()?;

    // Structural columns.
    let mut maps = Vec::with_capacity(lp.variables.len());
    let mut ncols = 0;
    for v in &lp.variables {
        maps.push(match v.lower {
            LowerBound::Zero => {
                ncols += 1;
                ColumnMap::Single(ncols - 1)
            }
            LowerBound::Free => {
                ncols += 2;
                ColumnMap::Split(ncols - 2, ncols - 1)
            }
        });
    }

    // Rows in structural columns, before slacks.
    let mut rows_sparse: Vec<SparseRow<T>> = Vec::new();
    let expand = |coeffs: &[(usize, T)]| -> Vec<(usize, T)> {
        let mut out = Vec::new();
        for (j, a) in coeffs {
            match maps[*j] {
                ColumnMap::Single(c) => out.push((c, a.clone())),
                ColumnMap::Split(p, n) => {
                    out.push((p, a.clone()));
                    out.push((n, a.neg()));
                }
            }
        }
        out
    };
    for c in &lp.constraints {
        rows_sparse.push((expand(&c.coefficients), c.relation, c.rhs.clone()));
    }
    for (j, v) in lp.variables.iter().enumerate() {
        if let Some(u) = &v.upper {
            rows_sparse.push((expand(&[(j, T::one())]), Relation::Le, u.clone()));
        }
    }

    let m = rows_sparse.len();
    let slack_count = rows_sparse.iter().filter(|r| r.1 == Relation::Le).count();
    let slack_start = ncols;
    let art_start = slack_start + slack_count;
    let total = art_start + m;

    let mut rows = vec![vec![T::zero(); total]; m];
    let mut rhs = vec![T::zero(); m];
    let mut basis = vec![0; m];
    let mut negated = vec![false; m];
    // Column that started as the identity column for each row.
    let mut identity_col = vec![0; m];
    let mut next_slack = slack_start;
    for (i, (coeffs, rel, b)) in rows_sparse.iter().enumerate() {
        for (c, a) in coeffs {
            rows[i][*c] = rows[i][*c].add(a)?;
        }
        let slack = if *rel == Relation::Le {
            rows[i][next_slack] = T::one();
            next_slack += 1;
            Some(next_slack - 1)
        } else {
            None
        };
        rhs[i] = b.clone();
        if b.is_exact_zero() || *b > T::zero() {
            // fine as is
        } else {
            negated[i] = true;
            for a in rows[i].iter_mut() {
                *a = a.neg();
            }
            rhs[i] = rhs[i].neg();
        }
        rows[i][art_start + i] = T::one();
        match slack {
            Some(s) if !negated[i] => {
                basis[i] = s;
                identity_col[i] = s;
            }
            _ => {
                basis[i] = art_start + i;
                identity_col[i] = art_start + i;
            }
        }
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis,
        reduced: vec![T::zero(); total],
        objective: T::zero(),
        structural: art_start,
        pivots: 0,
    };

    // Phase 1: drive artificials out.
    let needs_phase_one = t.basis.iter().any(|&b| b >= art_start);
    if needs_phase_one {
        let mut costs = vec![T::zero(); total];
        for c in costs.iter_mut().skip(art_start) {
            *c = T::one().neg();
        }
        t.price_out(&costs)?;
        t.run(art_start)?;
        if t.objective.is_negative() {
            return Ok(LpSolution {
                status: Status::Infeasible,
                value: T::zero(),
                assignment: vec![T::zero(); lp.variables.len()],
                duals: vec![T::zero(); lp.constraints.len()],
            });
        }
        for i in 0..m {
            if t.basis[i] < art_start {
                continue;
            }
            // Degenerate artificial; swap in any structural column. Rows with
            // none are redundant and keep their artificial at zero.
            if let Some(c) = (0..art_start).find(|&j| !t.rows[i][j].is_negligible()) {
                t.pivot(i, c)?;
            }
        }
    }

    // Phase 2 in maximization form.
    let mut costs = vec![T::zero(); total];
    for (v, map) in lp.variables.iter().zip(&maps) {
        let c = match lp.sense {
            Sense::Maximize => v.cost.clone(),
            Sense::Minimize => v.cost.neg(),
        };
        match *map {
            ColumnMap::Single(j) => costs[j] = c,
            ColumnMap::Split(p, n) => {
                costs[n] = c.neg();
                costs[p] = c;
            }
        }
    }
    t.price_out(&costs)?;
    let bounded = t.run(t.structural)?;
    if !bounded {
        return Ok(LpSolution {
            status: Status::Unbounded,
            value: T::zero(),
            assignment: vec![T::zero(); lp.variables.len()],
            duals: vec![T::zero(); lp.constraints.len()],
        });
    }

    let mut column_values = vec![T::zero(); total];
    for (i, &b) in t.basis.iter().enumerate() {
        column_values[b] = t.rhs[i].clone();
    }
    let assignment = maps
        .iter()
        .map(|map| match *map {
            ColumnMap::Single(j) => Ok(column_values[j].clone()),
            ColumnMap::Split(p, n) => column_values[p].sub(&column_values[n]),
        })
        .collect::<Result<Vec<T>, _>>()?;
    let value = lp.objective_at(&assignment)?;

    let mut duals = Vec::with_capacity(lp.constraints.len());
    for i in 0..lp.constraints.len() {
        let mut y = t.reduced[identity_col[i]].neg();
        if negated[i] {
            y = y.neg();
        }
        if lp.sense == Sense::Minimize {
            y = y.neg();
        }
        duals.push(y);
    }

    Ok(LpSolution {
        status: Status::Optimal,
        value,
        assignment,
        duals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        let x = lp.add_variable(LowerBound::Zero, None, 1.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 3.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert_eq!(s.value, 3.0);
        assert_eq!(s.duals, vec![1.0]);
    }

    #[test]
    fn degenerate_equality() {
        let mut lp = LinearProgram::<Rational>::new(Sense::Maximize);
        let x = lp.add_variable(LowerBound::Zero, None, r(1, 1));
        let y = lp.add_variable(LowerBound::Zero, None, r(1, 1));
        lp.add_constraint(vec![(x, r(1, 1)), (y, r(1, 1))], Relation::Eq, r(1, 1));
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert_eq!(s.value, r(1, 1));
        assert_eq!(lp.max_violation(&s.assignment).unwrap(), r(0, 1));
    }

    #[test]
    fn k2_transport_polytope() {
        // Entries (a,a), (a,b), (b,a), (b,b) with costs 1, 0, 0, 1.
        let mut lp = LinearProgram::<Rational>::new(Sense::Maximize);
        let v: Vec<usize> = [1, 0, 0, 1]
            .iter()
            .map(|&c| lp.add_variable(LowerBound::Zero, None, r(c, 1)))
            .collect();
        lp.add_constraint(vec![(v[2], r(1, 1)), (v[3], r(1, 1))], Relation::Eq, r(1, 1));
        lp.add_constraint(vec![(v[0], r(1, 1)), (v[2], r(1, 1))], Relation::Eq, r(1, 1));
        let s = solve(&lp).unwrap();
        assert_eq!(s.value, r(2, 1));
        assert_eq!(s.assignment[2], r(0, 1));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        let x = lp.add_variable(LowerBound::Zero, None, 1.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, -1.0);
        assert_eq!(solve(&lp).unwrap().status, Status::Infeasible);

        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        let x = lp.add_variable(LowerBound::Zero, None, 1.0);
        let y = lp.add_variable(LowerBound::Zero, None, 0.0);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve(&lp).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn free_variables_and_upper_bounds() {
        // min x s.t. x >= -2 written as -x <= 2, x free, x <= 5.
        let mut lp = LinearProgram::<Rational>::new(Sense::Minimize);
        let x = lp.add_variable(LowerBound::Free, Some(r(5, 1)), r(1, 1));
        lp.add_constraint(vec![(x, r(-1, 1))], Relation::Le, r(2, 1));
        let s = solve(&lp).unwrap();
        assert_eq!(s.value, r(-2, 1));
        assert_eq!(s.assignment, vec![r(-2, 1)]);
        // Strong duality through the reported price.
        assert_eq!(s.duals[0].mul(&r(2, 1)).unwrap(), s.value);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        lp.add_variable(LowerBound::Zero, None, 1.0);
        lp.add_constraint(vec![(3, 1.0)], Relation::Le, 1.0);
        assert!(matches!(
            solve(&lp),
            Err(LpError::DimensionMismatch { index: 3, .. })
        ));
        lp.constraints[0].coefficients[0] = (0, f64::NAN);
        assert!(matches!(solve(&lp), Err(LpError::NonFinite(_))));
    }

    #[test]
    fn overflow_is_reported() {
        let huge = Rational::from_integer(i128::MAX / 3);
        let mut lp = LinearProgram::<Rational>::new(Sense::Maximize);
        let x = lp.add_variable(LowerBound::Zero, None, huge);
        let y = lp.add_variable(LowerBound::Zero, None, huge);
        lp.add_constraint(vec![(x, huge), (y, r(1, 1))], Relation::Le, huge);
        lp.add_constraint(vec![(x, r(1, 1)), (y, huge)], Relation::Le, huge);
        assert!(matches!(solve(&lp), Err(LpError::Numeric(NumericError::Overflow))));
    }

    #[test]
    fn dump_layout() {
        let mut lp = LinearProgram::<Rational>::new(Sense::Minimize);
        let x = lp.add_variable(LowerBound::Free, None, r(1, 2));
        lp.add_constraint(vec![(x, r(1, 1))], Relation::Eq, r(3, 1));
        let text = lp.dump();
        assert!(text.starts_with("MINIMIZE 1 VARIABLES 1 CONSTRAINTS\n"));
        assert!(text.contains("LOWER   -inf"));
        assert!(text.contains("ROW     0 ="));
    }

    /// Random bounded LP: maximize c·x, A x <= b with b >= 0, x in [0, 4].
    fn random_lp(
        costs: &[i64],
        a: &[Vec<i64>],
        b: &[i64],
        den: i64,
    ) -> (LinearProgram<f64>, LinearProgram<Rational>) {
        let mut f = LinearProgram::<f64>::new(Sense::Maximize);
        let mut q = LinearProgram::<Rational>::new(Sense::Maximize);
        let frac = |v: i64| Rational::new(v as i128, den as i128);
        for &c in costs {
            f.add_variable(LowerBound::Zero, Some(4.0), c as f64 / den as f64);
            q.add_variable(LowerBound::Zero, Some(r(4, 1)), frac(c));
        }
        for (row, &bi) in a.iter().zip(b) {
            f.add_constraint(
                row.iter().enumerate().map(|(j, &v)| (j, v as f64 / den as f64)).collect(),
                Relation::Le,
                bi as f64 / den as f64,
            );
            q.add_constraint(
                row.iter().enumerate().map(|(j, &v)| (j, frac(v))).collect(),
                Relation::Le,
                frac(bi),
            );
        }
        (f, q)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn float_and_rational_agree_and_dominate_feasible_points(
            n in 1usize..5,
            seed in proptest::collection::vec(-8i64..=8, 40),
            rhs in proptest::collection::vec(0i64..=16, 4),
            den in 1i64..=64,
            probe in proptest::collection::vec(0u32..=4, 5),
        ) {
            let m = 3;
            let costs: Vec<i64> = seed[..n].to_vec();
            let a: Vec<Vec<i64>> = (0..m).map(|i| seed[10 + i * 5..10 + i * 5 + n].to_vec()).collect();
            let b: Vec<i64> = rhs[..m].to_vec();
            let (f, q) = random_lp(&costs, &a, &b, den);
            let sf = solve(&f).unwrap();
            let sq = solve(&q).unwrap();
            prop_assert_eq!(sf.status, Status::Optimal);
            prop_assert_eq!(sq.status, Status::Optimal);
            prop_assert!((sf.value - sq.value.to_f64()).abs() <= 1e-9);
            prop_assert!(f.max_violation(&sf.assignment).unwrap() <= 1e-9);
            prop_assert_eq!(q.max_violation(&sq.assignment).unwrap(), r(0, 1));

            // Weak duality: a feasible probe point never beats the optimum.
            let x: Vec<Rational> = probe[..n].iter().map(|&p| r(p as i128, 1)).collect();
            if q.max_violation(&x).unwrap() == r(0, 1) {
                prop_assert!(q.objective_at(&x).unwrap() <= sq.value);
            }
        }
    }
}
