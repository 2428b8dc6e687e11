//! Small dense routines over [`Scalar`].

use crate::scalar::{NumericError, Scalar};

/// Rank by Gaussian elimination with the backend's zero test.
pub fn rank<T: Scalar>(mut rows: Vec<Vec<T>>) -> Result<usize, NumericError> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        // Largest magnitude pivot keeps the float path stable.
        let pivot = (rank..rows.len())
            .filter(|&i| !rows[i][c].is_negligible())
            .max_by(|&a, &b| {
                rows[a][c]
                    .abs()
                    .partial_cmp(&rows[b][c].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        for i in rank + 1..rows.len() {
            if rows[i][c].is_exact_zero() {
                continue;
            }
            let f = rows[i][c].div(&rows[rank][c])?;
            for j in c..ncols {
                let v = rows[i][j].sub(&f.mul(&rows[rank][j])?)?;
                rows[i][j] = v;
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// Positive semidefiniteness of a symmetric matrix by symmetric elimination.
/// Exact for rationals; uses the 1e-9 tolerance for floats.
pub fn is_positive_semidefinite<T: Scalar>(mut a: Vec<Vec<T>>) -> Result<bool, NumericError> {
    let n = a.len();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        // Pick any positive diagonal pivot among the remaining indices.
        let pivot = active.iter().copied().find(|&k| a[k][k].is_positive());
        let Some(k) = pivot else {
            // All remaining diagonals are ~0 or negative: PSD iff the whole
            // remaining block vanishes and no diagonal is negative.
            for &i in &active {
                if a[i][i].is_negative() {
                    return Ok(false);
                }
                for &j in &active {
                    if !a[i][j].is_negligible() {
                        return Ok(false);
                    }
                }
            }
            return Ok(true);
        };
        active.retain(|&i| i != k);
        for &i in &active {
            if a[i][k].is_exact_zero() {
                continue;
            }
            let f = a[i][k].div(&a[k][k])?;
            for &j in &active {
                let v = a[i][j].sub(&f.mul(&a[k][j])?)?;
                a[i][j] = v;
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x as i128)).collect())
            .collect()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank(q(&[&[1, 2], &[2, 4]])).unwrap(), 1);
        assert_eq!(rank(q(&[&[1, 0], &[0, 1]])).unwrap(), 2);
        assert_eq!(rank(q(&[&[0, 0], &[0, 0]])).unwrap(), 0);
        assert_eq!(rank(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-15]]).unwrap(), 1);
    }

    #[test]
    fn psd_detection() {
        assert!(is_positive_semidefinite(q(&[&[2, -1], &[-1, 2]])).unwrap());
        assert!(is_positive_semidefinite(q(&[&[1, 1], &[1, 1]])).unwrap());
        assert!(!is_positive_semidefinite(q(&[&[1, 2], &[2, 1]])).unwrap());
        assert!(!is_positive_semidefinite(q(&[&[0, 1], &[1, 0]])).unwrap());
        assert!(!is_positive_semidefinite(q(&[&[-1]])).unwrap());
        assert!(is_positive_semidefinite(q(&[&[0, 0], &[0, 3]])).unwrap());
    }
}
