//! Exact integer linear algebra by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Determinant of a square integer matrix.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Rank of an integer matrix of any shape.
pub fn rank(m: &[Vec<BigInt>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let rows = a.len();
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[i][j] * &a[r][c] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].abs();
        if prev.is_zero() {
            prev = BigInt::one();
        }
        r += 1;
    }
    r
}

/// Rank of a matrix given as `i64` rows.
pub fn rank_i64(m: &[Vec<i64>]) -> usize {
    rank(&to_big(m))
}

pub fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_det(m: &[Vec<i64>]) -> i128 {
        let n = m.len();
        if n == 1 {
            return m[0][0] as i128;
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, &x)| x).collect()).collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] as i128 * naive_det(&minor)
            })
            .sum()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(det(&to_big(&[vec![1, 1], vec![2, 4]])), BigInt::from(2));
        assert_eq!(det(&to_big(&[vec![0, 1], vec![1, 0]])), BigInt::from(-1));
        assert_eq!(det(&to_big(&[vec![1, 2, 3], vec![1, 2, 3], vec![4, 5, 7]])), BigInt::zero());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_i64(&[vec![1, 2], vec![1, 2], vec![1, 2]]), 1);
        assert_eq!(rank_i64(&[vec![0, 0, 0]]), 0);
        assert_eq!(rank_i64(&[vec![1, 0, 0], vec![0, 0, 1], vec![1, 0, 1], vec![0, 3, 0]]), 3);
        assert_eq!(rank_i64(&[vec![0, 2, 4], vec![0, 1, 2], vec![3, 0, 0]]), 2);
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(entries in proptest::collection::vec(-9i64..10, 16)) {
            let m: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            prop_assert_eq!(det(&to_big(&m)), BigInt::from(naive_det(&m)));
        }

        #[test]
        fn rank_full_iff_det_nonzero(entries in proptest::collection::vec(-3i64..4, 9)) {
            let m: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let full = rank_i64(&m) == 3;
            prop_assert_eq!(full, !det(&to_big(&m)).is_zero());
        }
    }
}
