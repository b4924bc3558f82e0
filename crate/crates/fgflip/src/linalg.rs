//! Small exact linear-algebra kernels over big rationals.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::skewspace::Q;

pub fn to_big(q: &Q) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

/// Converts back to a machine rational. Panics on overflow, which would mean
/// an intermediate blew up far beyond anything the triangle spaces produce.
pub fn from_big(q: &BigRational) -> Q {
    let n: i64 = q.numer().try_into().expect("numerator overflow");
    let d: i64 = q.denom().try_into().expect("denominator overflow");
    Q::new(n, d)
}

pub type Matrix = Vec<Vec<BigRational>>;

pub fn to_big_matrix(m: &[Vec<Q>]) -> Matrix {
    m.iter().map(|r| r.iter().map(to_big).collect()).collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut b = to_big_matrix(m);
    rref(&mut b).len()
}

/// Basis of the right null space {x | m x = 0}.
pub fn nullspace(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut b = to_big_matrix(m);
    let pivots = rref(&mut b);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = -b[row][f].clone();
            }
            x.iter().map(from_big).collect()
        })
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<Q>]) -> BigRational {
    let n = m.len();
    if n == 0 {
        return BigRational::one();
    }
    // Clear denominators row by row, then run Bareiss over the integers.
    let mut scale = BigRational::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in m {
        let l = row
            .iter()
            .fold(BigInt::one(), |acc, q| num::integer::lcm(acc, BigInt::from(*q.denom())));
        scale = scale / BigRational::from_integer(l.clone());
        a.push(row.iter().map(|q| BigInt::from(*q.numer()) * (&l / BigInt::from(*q.denom()))).collect());
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigRational::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = &sign * &a[n - 1][n - 1];
    BigRational::from_integer(det) * scale
}

/// Inverse of a square matrix, or `None` if singular.
pub fn inverse(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut aug: Matrix = to_big_matrix(m)
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.iter().map(|row| row[n..].iter().map(from_big).collect()).collect())
}

pub fn is_nonzero(q: &BigRational) -> bool {
    !q.is_zero() && (q.is_positive() || q.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    #[test]
    fn det_of_cartan_a3() {
        let m = vec![vec![q(2), q(-1), q(0)], vec![q(-1), q(2), q(-1)], vec![q(0), q(-1), q(2)]];
        assert_eq!(determinant(&m), BigRational::from_integer(4.into()));
    }

    #[test]
    fn det_with_fractions_and_pivoting() {
        let m = vec![vec![q(0), Q::new(1, 2)], vec![Q::new(-1, 2), q(0)]];
        assert_eq!(from_big(&determinant(&m)), Q::new(1, 4));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = vec![vec![q(2), q(-1)], vec![q(-1), q(2)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![Q::new(2, 3), Q::new(1, 3)], vec![Q::new(1, 3), Q::new(2, 3)]]);
        assert!(inverse(&[vec![q(1), q(1)], vec![q(1), q(1)]]).is_none());
    }

    #[test]
    fn nullspace_basic() {
        let m = vec![vec![q(1), q(1), q(0)], vec![q(0), q(0), q(1)]];
        let ns = nullspace(&m, 3);
        assert_eq!(ns, vec![vec![q(-1), q(1), q(0)]]);
    }
}
