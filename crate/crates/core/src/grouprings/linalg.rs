//! Dense Gaussian elimination over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut acc = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        let pivot = m[c][c].clone();
        acc *= &pivot;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &pivot;
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
        }
    }
    acc
}

/// Solves `m x = rhs` for square nonsingular `m`.
pub fn solve(mut m: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        rhs.swap(p, c);
        let inv = m[c][c].recip();
        for k in c..n {
            m[c][k] *= &inv;
        }
        rhs[c] *= &inv;
        for r in 0..n {
            if r == c || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone();
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
            let v = &f * &rhs[c];
            rhs[r] -= v;
        }
    }
    Some(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn small_det_and_solve() {
        let m = vec![vec![q(0), q(2)], vec![q(3), q(1)]];
        assert_eq!(det(m.clone()), q(-6));
        let x = solve(m, vec![q(4), q(5)]).unwrap();
        assert_eq!(x, vec![q(1), q(2)]);
        assert!(solve(vec![vec![q(1), q(2)], vec![q(2), q(4)]], vec![q(0), q(1)]).is_none());
    }
}
