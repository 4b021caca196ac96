//! Exact solution of square rational linear systems by fraction-free
//! (Bareiss) Gaussian elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::ChainError;

/// Solves `a · x = b`. Each row is scaled to integers by the lcm of its
/// denominators; elimination then stays in ℤ, every division being exact.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Result<Vec<BigRational>, ChainError> {
    let n = a.len();
    assert_eq!(b.len(), n, "right-hand side length");
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), n, "matrix must be square");
            integer_row(row.iter().chain(std::iter::once(rhs)))
        })
        .collect();

    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n)
            .find(|&r| !m[r][k].is_zero())
            .ok_or(ChainError::SingularSystem)?;
        m.swap(k, pivot);
        let (upper, lower) = m.split_at_mut(k + 1);
        let pivot_row = &upper[k];
        for row in lower.iter_mut() {
            for j in k + 1..=n {
                let v = &pivot_row[k] * &row[j] - &row[k] * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }

    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= BigRational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / BigRational::from_integer(m[i][i].clone());
    }
    Ok(x)
}

fn integer_row<'a>(entries: impl Iterator<Item = &'a BigRational> + Clone) -> Vec<BigInt> {
    let lcm = entries
        .clone()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    entries
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    // Plain Gauss-Jordan over ℚ, independent of the integer elimination.
    fn gauss_jordan(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
        let n = a.len();
        let mut m: Vec<Vec<BigRational>> = a
            .iter()
            .zip(b)
            .map(|(r, v)| r.iter().cloned().chain([v.clone()]).collect())
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !m[r][c].is_zero())?;
            m.swap(c, p);
            let inv = m[c][c].clone();
            for j in 0..=n {
                m[c][j] = &m[c][j] / &inv;
            }
            for r in 0..n {
                if r != c && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    for j in 0..=n {
                        let v = &m[c][j] * &f;
                        m[r][j] -= v;
                    }
                }
            }
        }
        Some(m.into_iter().map(|r| r[n].clone()).collect())
    }

    #[test]
    fn two_by_two_by_cramer() {
        // 2x + 3y = 8, x - y = -1  =>  x = 1, y = 2
        let a = vec![vec![q(2, 1), q(3, 1)], vec![q(1, 1), q(-1, 1)]];
        let b = vec![q(8, 1), q(-1, 1)];
        assert_eq!(solve(&a, &b).unwrap(), vec![q(1, 1), q(2, 1)]);
    }

    #[test]
    fn needs_pivoting() {
        let a = vec![vec![q(0, 1), q(1, 2)], vec![q(1, 3), q(0, 1)]];
        let b = vec![q(1, 1), q(1, 1)];
        assert_eq!(solve(&a, &b).unwrap(), vec![q(3, 1), q(2, 1)]);
    }

    #[test]
    fn hitting_time_of_geometric_loop() {
        // k = 1 + (1 - ε) k  with ε = 1/4  =>  k = 4
        let a = vec![vec![q(1, 4)]];
        assert_eq!(solve(&a, &[q(1, 1)]).unwrap(), vec![q(4, 1)]);
    }

    #[test]
    fn singular_is_reported() {
        let a = vec![vec![q(1, 2), q(1, 1)], vec![q(1, 4), q(1, 2)]];
        assert_eq!(solve(&a, &[q(1, 1), q(1, 1)]), Err(ChainError::SingularSystem));
        assert_eq!(solve(&[vec![q(0, 1)]], &[q(0, 1)]), Err(ChainError::SingularSystem));
    }

    #[test]
    fn empty_system() {
        assert!(solve(&[], &[]).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn agrees_with_gauss_jordan(
            n in 1usize..6,
            entries in proptest::collection::vec((-9i64..10, 1i64..7), 42),
        ) {
            let mut it = entries.into_iter().map(|(a, b)| q(a, b));
            let a: Vec<Vec<_>> = (0..n).map(|_| (0..n).map(|_| it.next().unwrap()).collect()).collect();
            let b: Vec<_> = (0..n).map(|_| it.next().unwrap()).collect();
            match gauss_jordan(&a, &b) {
                Some(x) => prop_assert_eq!(solve(&a, &b).unwrap(), x),
                None => prop_assert_eq!(solve(&a, &b), Err(ChainError::SingularSystem)),
            }
        }
    }
}
