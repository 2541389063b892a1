use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest group order accepted; group algebra elements are dense-ish maps
/// and the regular representation is `|H| x |H|`.
pub const MAX_ORDER: usize = 1 << 16;

/// `Z/d1 + ... + Z/dr` with `d1 | d2 | ... | dr`, each `di >= 2`.
///
/// Elements are indexed in mixed radix with the first coordinate least
/// significant, so index 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    divisors: Vec<u64>,
    strides: Vec<usize>,
    order: usize,
}

impl FiniteAbelianGroup {
    pub fn new(divisors: Vec<u64>) -> Result<Self> {
        let mut order: usize = 1;
        let mut strides = Vec::with_capacity(divisors.len());
        for (k, &d) in divisors.iter().enumerate() {
            if d < 2 {
                return Err(Error::InvalidGroup(format!("divisor {d} < 2")));
            }
            if k > 0 && d % divisors[k - 1] != 0 {
                return Err(Error::InvalidGroup(format!(
                    "{} does not divide {d}",
                    divisors[k - 1]
                )));
            }
            strides.push(order);
            order = order
                .checked_mul(d as usize)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| Error::InvalidGroup("group too large".into()))?;
        }
        Ok(FiniteAbelianGroup {
            divisors,
            strides,
            order,
        })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            divisors: Vec::new(),
            strides: Vec::new(),
            order: 1,
        }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 1 {
            Ok(Self::trivial())
        } else {
            Self::new(vec![n])
        }
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn digits(&self, h: usize) -> Vec<u64> {
        self.divisors
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| ((h / s) as u64) % d)
            .collect()
    }

    /// Index of the element with the given exponents, reduced mod the divisors.
    pub fn element(&self, exps: &[i64]) -> usize {
        assert_eq!(exps.len(), self.rank(), "exponent vector length");
        self.divisors
            .iter()
            .zip(&self.strides)
            .zip(exps)
            .map(|((&d, &s), &e)| (e.rem_euclid(d as i64) as usize) * s)
            .sum()
    }

    /// The k-th standard generator.
    pub fn basis(&self, k: usize) -> usize {
        self.strides[k]
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for (&d, &s) in self.divisors.iter().zip(&self.strides) {
            let d = d as usize;
            out += ((a / s % d + b / s % d) % d) * s;
        }
        out
    }

    pub fn neg(&self, a: usize) -> usize {
        let mut out = 0;
        for (&d, &s) in self.divisors.iter().zip(&self.strides) {
            let d = d as usize;
            out += ((d - a / s % d) % d) * s;
        }
        out
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn scale(&self, a: usize, k: i64) -> usize {
        let digits: Vec<i64> = self.digits(a).into_iter().map(|e| e as i64 * k).collect();
        self.element(&digits)
    }

    /// Lexicographic order of exponent vectors (first coordinate most significant).
    pub fn lex_cmp(&self, a: usize, b: usize) -> Ordering {
        self.digits(a).cmp(&self.digits(b))
    }

    pub fn variable_name(k: usize) -> String {
        const NAMES: [&str; 4] = ["x", "y", "z", "w"];
        NAMES
            .get(k)
            .map(|s| s.to_string())
            .unwrap_or_else(|| format!("g{}", k + 1))
    }

    /// Monomial rendering such as `x^2y`; the identity renders as `1`.
    pub fn format_element(&self, h: usize) -> String {
        let mut s = String::new();
        for (k, e) in self.digits(h).into_iter().enumerate() {
            match e {
                0 => {}
                1 => s.push_str(&Self::variable_name(k)),
                _ => s.push_str(&format!("{}^{e}", Self::variable_name(k))),
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.divisors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.divisors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Automorphism of a finite abelian group given by an integer matrix acting
/// on exponent column vectors: `kappa(e_j) = sum_i matrix[i][j] e_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAut {
    group: Arc<FiniteAbelianGroup>,
    matrix: Vec<Vec<i64>>,
    perm: Vec<usize>,
    inverse: Vec<usize>,
    order: usize,
    orbit_rep: Vec<usize>,
}

impl GroupAut {
    pub fn new(group: Arc<FiniteAbelianGroup>, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let r = group.rank();
        if matrix.len() != r || matrix.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidAutomorphism(format!("matrix must be {r}x{r}")));
        }
        let d = group.divisors();
        // column j must be killed by d_j for the map to be well defined
        for j in 0..r {
            for i in 0..r {
                if (d[j] as i128 * matrix[i][j] as i128).rem_euclid(d[i] as i128) != 0 {
                    return Err(Error::InvalidAutomorphism(format!(
                        "column {} is not of order dividing {}",
                        j + 1,
                        d[j]
                    )));
                }
            }
        }
        let mut reduced = matrix.clone();
        for (i, row) in reduced.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v = v.rem_euclid(d[i] as i64);
            }
        }
        let perm: Vec<usize> = group
            .elements()
            .map(|h| {
                let e = group.digits(h);
                let img: Vec<i64> = (0..r)
                    .map(|i| {
                        (0..r)
                            .map(|j| (reduced[i][j] as i128 * e[j] as i128) % d[i] as i128)
                            .sum::<i128>() as i64
                    })
                    .collect();
                group.element(&img)
            })
            .collect();
        let mut inverse = vec![usize::MAX; group.order()];
        for (h, &k) in perm.iter().enumerate() {
            if inverse[k] != usize::MAX {
                return Err(Error::InvalidAutomorphism("matrix is not bijective on H".into()));
            }
            inverse[k] = h;
        }
        Ok(Self::from_parts(group, reduced, perm, inverse))
    }

    pub fn identity(group: Arc<FiniteAbelianGroup>) -> Self {
        let r = group.rank();
        let matrix = (0..r)
            .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
            .collect();
        let perm: Vec<usize> = group.elements().collect();
        Self::from_parts(group, matrix, perm.clone(), perm)
    }

    fn from_parts(
        group: Arc<FiniteAbelianGroup>,
        matrix: Vec<Vec<i64>>,
        perm: Vec<usize>,
        inverse: Vec<usize>,
    ) -> Self {
        let mut order = 1;
        let mut cur = perm.clone();
        while cur.iter().enumerate().any(|(h, &k)| h != k) {
            cur = cur.iter().map(|&k| perm[k]).collect();
            order += 1;
        }
        let mut orbit_rep: Vec<usize> = vec![usize::MAX; group.order()];
        for h in group.elements() {
            if orbit_rep[h] != usize::MAX {
                continue;
            }
            let mut orbit = vec![h];
            let mut k = perm[h];
            while k != h {
                orbit.push(k);
                k = perm[k];
            }
            let best = *orbit
                .iter()
                .min_by(|a, b| group.lex_cmp(**a, **b))
                .expect("nonempty orbit");
            for k in orbit {
                orbit_rep[k] = best;
            }
        }
        GroupAut {
            group,
            matrix,
            perm,
            inverse,
            order,
            orbit_rep,
        }
    }

    pub fn group(&self) -> &Arc<FiniteAbelianGroup> {
        &self.group
    }

    /// Matrix with entries reduced mod the row divisor.
    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, h: usize) -> usize {
        self.perm[h]
    }

    pub fn apply_inverse(&self, h: usize) -> usize {
        self.inverse[h]
    }

    /// `kappa^n(h)` for any integer `n`.
    pub fn apply_pow(&self, h: usize, n: i64) -> usize {
        let n = n.rem_euclid(self.order as i64);
        let mut k = h;
        for _ in 0..n {
            k = self.perm[k];
        }
        k
    }

    /// Permutation table of `kappa^n`.
    pub fn power_table(&self, n: i64) -> Vec<usize> {
        self.group.elements().map(|h| self.apply_pow(h, n)).collect()
    }

    /// Least `N >= 1` with `kappa^N = id`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1
    }

    /// Lexicographically least member of the orbit of `h`.
    pub fn orbit_rep(&self, h: usize) -> usize {
        self.orbit_rep[h]
    }

    pub fn same_group(&self, g: &FiniteAbelianGroup) -> bool {
        *self.group == *g
    }
}

/// Order of an automorphism.
pub fn aut_order(kappa: &GroupAut) -> usize {
    kappa.order()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_basics() {
        let g = FiniteAbelianGroup::new(vec![4, 4]).unwrap();
        assert_eq!(g.order(), 16);
        let x = g.element(&[1, 0]);
        let y = g.element(&[0, 1]);
        assert_eq!(g.format_element(g.add(g.scale(x, 2), y)), "x^2y");
        assert_eq!(g.neg(x), g.element(&[3, 0]));
        assert_eq!(g.to_string(), "Z/4 + Z/4");
        assert_eq!(FiniteAbelianGroup::trivial().to_string(), "0");
        assert!(FiniteAbelianGroup::new(vec![2, 3]).is_err());
        assert!(FiniteAbelianGroup::new(vec![1]).is_err());
    }

    #[test]
    fn aut_orders() {
        let z5 = Arc::new(FiniteAbelianGroup::cyclic(5).unwrap());
        let neg = GroupAut::new(z5.clone(), vec![vec![-1]]).unwrap();
        assert_eq!(aut_order(&neg), 2);
        assert_eq!(neg.apply(1), 4);
        let g = Arc::new(FiniteAbelianGroup::new(vec![4, 4]).unwrap());
        let k = GroupAut::new(g.clone(), vec![vec![2, -1], vec![-1, 1]]).unwrap();
        assert_eq!(aut_order(&k), 3);
        let x = g.element(&[1, 0]);
        assert_eq!(g.format_element(k.apply(x)), "x^2y^3");
        assert_eq!(aut_order(&GroupAut::identity(g)), 1);
        assert!(GroupAut::new(z5, vec![vec![0]]).is_err());
    }

    #[test]
    fn ill_defined_matrix_rejected() {
        let g = Arc::new(FiniteAbelianGroup::new(vec![2, 4]).unwrap());
        // sending the order-2 generator to an order-4 element is not a homomorphism
        assert!(GroupAut::new(g, vec![vec![1, 0], vec![1, 1]]).is_err());
    }

    #[test]
    fn orbit_reps_are_lex_least() {
        let z5 = Arc::new(FiniteAbelianGroup::cyclic(5).unwrap());
        let neg = GroupAut::new(z5, vec![vec![-1]]).unwrap();
        let reps: Vec<usize> = (0..5).map(|h| neg.orbit_rep(h)).collect();
        assert_eq!(reps, vec![0, 1, 2, 2, 1]);
    }
}
