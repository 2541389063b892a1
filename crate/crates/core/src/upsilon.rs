//! The block map `Upsilon: A_kappa((tau)) -> Mat(N x N, A[t, t^-1])`, the
//! commutative determinant, and the metafinite polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cover::MetaRep;
use crate::error::{Error, Result};
use crate::grouprings::{FiniteAbelianGroup, GroupAlgebraElem};
use crate::k1core::{build_fox_matrix, NovikovMatrix};
use crate::novikov::{NovikovSeries, DEFAULT_PRECISION};
use crate::presentation::MeridianPresentation;

/// Laurent polynomial in a central variable `t` over `Q[H]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPolyGA {
    group: Arc<FiniteAbelianGroup>,
    terms: BTreeMap<i64, GroupAlgebraElem>,
}

impl LaurentPolyGA {
    pub fn zero(group: &Arc<FiniteAbelianGroup>) -> Self {
        LaurentPolyGA {
            group: group.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(group: &Arc<FiniteAbelianGroup>) -> Self {
        Self::monomial(GroupAlgebraElem::one(group), 0)
    }

    /// `a t^d`.
    pub fn monomial(a: GroupAlgebraElem, d: i64) -> Self {
        let mut out = Self::zero(a.group());
        out.add_term(d, a);
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, GroupAlgebraElem)>>(
        group: &Arc<FiniteAbelianGroup>,
        terms: I,
    ) -> Self {
        let mut out = Self::zero(group);
        for (d, a) in terms {
            out.add_term(d, a);
        }
        out
    }

    pub fn add_term(&mut self, d: i64, a: GroupAlgebraElem) {
        if a.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&d) {
            Some(b) => &b + &a,
            None => a,
        };
        if !sum.is_zero() {
            self.terms.insert(d, sum);
        }
    }

    pub fn group(&self) -> &Arc<FiniteAbelianGroup> {
        &self.group
    }

    pub fn terms(&self) -> &BTreeMap<i64, GroupAlgebraElem> {
        &self.terms
    }

    pub fn coeff(&self, d: i64) -> GroupAlgebraElem {
        self.terms
            .get(&d)
            .cloned()
            .unwrap_or_else(|| GroupAlgebraElem::zero(&self.group))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `max_degree - min_degree`, zero for the zero polynomial.
    pub fn span(&self) -> i64 {
        match (self.min_degree(), self.max_degree()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    /// Multiplication by `t^a`.
    pub fn shift(&self, a: i64) -> Self {
        LaurentPolyGA {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(d, c)| (d + a, c.clone())).collect(),
        }
    }

    /// Multiplication by the group element `h`.
    pub fn translate(&self, h: usize) -> Self {
        LaurentPolyGA {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(d, c)| (*d, c.translate(h))).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_terms(&self.group, self.terms.iter().map(|(d, a)| (*d, a.scale(c))))
    }

    /// Value at `t = s` for a nonzero rational `s`.
    pub fn evaluate(&self, s: &BigRational) -> GroupAlgebraElem {
        let mut out = GroupAlgebraElem::zero(&self.group);
        for (d, a) in &self.terms {
            let p = if *d >= 0 {
                num_traits::pow(s.clone(), *d as usize)
            } else {
                num_traits::pow(s.recip(), d.unsigned_abs() as usize)
            };
            out = &out + &a.scale(&p);
        }
        out
    }

    /// Image under the augmentation `Q[H] -> Q`.
    pub fn augment(&self) -> BTreeMap<i64, BigRational> {
        self.terms
            .iter()
            .map(|(d, a)| (*d, a.augmentation()))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// Relabels group elements by a table (for comparisons across bases).
    pub fn permute_group(&self, table: &[usize]) -> Self {
        LaurentPolyGA {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(d, a)| (*d, a.permute(table))).collect(),
        }
    }

    /// Parses sums of terms `c t^d g` such as `t^-2 - 3 - x + 7t^3xy`.
    pub fn parse(group: &Arc<FiniteAbelianGroup>, text: &str) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut out = Self::zero(group);
        let mut rest = cleaned.as_str();
        let err = |m: &str| Error::Syntax {
            line: 1,
            column: 1,
            message: m.to_string(),
        };
        if rest.is_empty() {
            return Err(err("empty polynomial"));
        }
        while !rest.is_empty() {
            let (neg, body) = match rest.as_bytes()[0] {
                b'-' => (true, &rest[1..]),
                b'+' => (false, &rest[1..]),
                _ => (false, rest),
            };
            let end = body[1.min(body.len())..]
                .find(['+', '-'])
                .map(|k| k + 1)
                .unwrap_or(body.len());
            // a '-' directly after '^' belongs to an exponent
            let mut end = end;
            while end < body.len() && body.as_bytes()[end - 1] == b'^' {
                end = body[end + 1..].find(['+', '-']).map(|k| k + end + 1).unwrap_or(body.len());
            }
            let term = &body[..end];
            rest = &body[end..];
            let (deg, coeff_text) = split_t_power(term).ok_or_else(|| err("bad t exponent"))?;
            let coeff_text = if coeff_text.is_empty() { "1".to_string() } else { coeff_text };
            let mut a = GroupAlgebraElem::parse(group, &coeff_text)?;
            if neg {
                a = -&a;
            }
            out.add_term(deg, a);
        }
        Ok(out)
    }
}

/// Splits `3t^2xy` into `(2, "3xy")`.
fn split_t_power(term: &str) -> Option<(i64, String)> {
    let Some(pos) = term.find('t') else {
        return Some((0, term.to_string()));
    };
    let (before, after) = (&term[..pos], &term[pos + 1..]);
    let (deg, tail) = if let Some(stripped) = after.strip_prefix('^') {
        let digits_end = stripped
            .char_indices()
            .find(|(k, c)| !(c.is_ascii_digit() || (*k == 0 && *c == '-')))
            .map(|(k, _)| k)
            .unwrap_or(stripped.len());
        (stripped[..digits_end].parse().ok()?, &stripped[digits_end..])
    } else {
        (1, after)
    };
    Some((deg, format!("{before}{tail}")))
}

impl Add for &LaurentPolyGA {
    type Output = LaurentPolyGA;
    fn add(self, rhs: &LaurentPolyGA) -> LaurentPolyGA {
        let mut out = self.clone();
        for (d, a) in &rhs.terms {
            out.add_term(*d, a.clone());
        }
        out
    }
}

impl Sub for &LaurentPolyGA {
    type Output = LaurentPolyGA;
    fn sub(self, rhs: &LaurentPolyGA) -> LaurentPolyGA {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPolyGA {
    type Output = LaurentPolyGA;
    fn neg(self) -> LaurentPolyGA {
        LaurentPolyGA {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(d, a)| (*d, -a)).collect(),
        }
    }
}

impl Mul for &LaurentPolyGA {
    type Output = LaurentPolyGA;
    fn mul(self, rhs: &LaurentPolyGA) -> LaurentPolyGA {
        let mut out = LaurentPolyGA::zero(&self.group);
        for (d, a) in &self.terms {
            for (e, b) in &rhs.terms {
                out.add_term(d + e, a * b);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPolyGA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, a) in &self.terms {
            for (h, c) in a.coeffs() {
                let neg = c.is_negative();
                if first {
                    if neg {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, "{}", if neg { " - " } else { " + " })?;
                }
                first = false;
                let mag = c.abs();
                let t = match d {
                    0 => String::new(),
                    1 => "t".to_string(),
                    _ => format!("t^{d}"),
                };
                let g = if *h == 0 {
                    String::new()
                } else {
                    self.group.format_element(*h)
                };
                let mono = format!("{t}{g}");
                if mono.is_empty() {
                    write!(f, "{mag}")?;
                } else if mag.is_one() {
                    write!(f, "{mono}")?;
                } else if mag.is_integer() {
                    write!(f, "{mag}{mono}")?;
                } else {
                    write!(f, "{mag}·{mono}")?;
                }
            }
        }
        Ok(())
    }
}

/// Square matrix over `Q[H][t, t^-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpsilonMatrix {
    size: usize,
    entries: Vec<LaurentPolyGA>,
}

impl UpsilonMatrix {
    pub fn from_entries(size: usize, entries: Vec<LaurentPolyGA>) -> Self {
        assert_eq!(entries.len(), size * size, "entry count");
        UpsilonMatrix { size, entries }
    }

    pub fn identity(group: &Arc<FiniteAbelianGroup>, size: usize) -> Self {
        let entries = (0..size * size)
            .map(|k| {
                if k / size == k % size {
                    LaurentPolyGA::one(group)
                } else {
                    LaurentPolyGA::zero(group)
                }
            })
            .collect();
        UpsilonMatrix { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPolyGA {
        &self.entries[i * self.size + j]
    }

    pub fn mul(&self, other: &UpsilonMatrix) -> UpsilonMatrix {
        let n = self.size;
        assert_eq!(n, other.size, "dimension mismatch");
        let g = self.entries.first().map(|e| e.group().clone());
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = LaurentPolyGA::zero(g.as_ref().expect("nonempty"));
                for k in 0..n {
                    acc = &acc + &(self.get(i, k) * other.get(k, j));
                }
                entries.push(acc);
            }
        }
        UpsilonMatrix { size: n, entries }
    }

    pub fn add(&self, other: &UpsilonMatrix) -> UpsilonMatrix {
        UpsilonMatrix {
            size: self.size,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<LaurentPolyGA>> {
        self.entries.chunks(self.size).map(|r| r.to_vec()).collect()
    }
}

/// `Upsilon(a)` for a finitely supported series, as an `N x N` block.
///
/// `a tau^l` goes to `D(a) P^l t^l` where `D(a) = diag(kappa^N a, ...,
/// kappa a)` and `P` is the cyclic shift `e_i -> e_(i+1 mod N)`; the entry in
/// row `r = i + l mod N`, column `i` is `kappa^(N - r)(a) t^l`.
pub fn upsilon_elem(a: &NovikovSeries, n: usize) -> Result<UpsilonMatrix> {
    if !a.is_exact() {
        return Err(Error::InfiniteSupport);
    }
    let ring = a.ring();
    if n == 0 || !n.is_multiple_of(ring.kappa_order()) {
        return Err(Error::BadCoverDegree(n));
    }
    let g = ring.group();
    let mut entries = vec![LaurentPolyGA::zero(g); n * n];
    for (l, c) in a.terms() {
        for i in 0..n {
            let r = (i as i64 + l).rem_euclid(n as i64) as usize;
            let v = ring.twist(c, (n - r) as i64);
            entries[r * n + i].add_term(l, v);
        }
    }
    Ok(UpsilonMatrix { size: n, entries })
}

/// Entrywise `Upsilon`, entry `(i, j)` becoming block `(i, j)`.
pub fn upsilon_matrix(mx: &NovikovMatrix, n: usize) -> Result<UpsilonMatrix> {
    let m = mx.size();
    let size = m * n;
    let g = mx.ring().group();
    let mut entries = vec![LaurentPolyGA::zero(g); size * size];
    for bi in 0..m {
        for bj in 0..m {
            let block = upsilon_elem(mx.get(bi, bj), n)?;
            for r in 0..n {
                for c in 0..n {
                    entries[(bi * n + r) * size + bj * n + c] = block.get(r, c).clone();
                }
            }
        }
    }
    Ok(UpsilonMatrix { size, entries })
}

/// Division-free (Berkowitz) determinant over `Q[H][t, t^-1]`.
pub fn det_commutative(u: &UpsilonMatrix) -> LaurentPolyGA {
    let n = u.size();
    let g = match u.entries.first() {
        Some(e) => e.group().clone(),
        None => Arc::new(FiniteAbelianGroup::trivial()),
    };
    if n == 0 {
        return LaurentPolyGA::one(&g);
    }
    // move each row into nonnegative degrees
    let mut shift_total = 0i64;
    let mut a: Vec<Vec<LaurentPolyGA>> = Vec::with_capacity(n);
    for row in u.rows() {
        let lo = row.iter().filter_map(LaurentPolyGA::min_degree).min().unwrap_or(0);
        shift_total += lo;
        a.push(row.iter().map(|e| e.shift(-lo)).collect());
    }
    berkowitz(&a, &g).shift(shift_total)
}

fn berkowitz(a: &[Vec<LaurentPolyGA>], g: &Arc<FiniteAbelianGroup>) -> LaurentPolyGA {
    let n = a.len();
    let zero = LaurentPolyGA::zero(g);
    // coefficients of the characteristic polynomial of the leading r x r block
    let mut c: Vec<LaurentPolyGA> = vec![LaurentPolyGA::one(g)];
    for r in 0..n {
        let mut t: Vec<LaurentPolyGA> = vec![LaurentPolyGA::one(g), -&a[r][r]];
        let mut v: Vec<LaurentPolyGA> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 0..r {
            let rv = (0..r).fold(zero.clone(), |acc, i| &acc + &(&a[r][i] * &v[i]));
            t.push(-&rv);
            v = (0..r)
                .map(|i| (0..r).fold(zero.clone(), |acc, k| &acc + &(&a[i][k] * &v[k])))
                .collect();
        }
        let next: Vec<LaurentPolyGA> = (0..r + 2)
            .map(|i| {
                (0..=i.min(r)).fold(zero.clone(), |acc, j| &acc + &(&t[i - j] * &c[j]))
            })
            .collect();
        c = next;
    }
    if n.is_multiple_of(2) {
        c[n].clone()
    } else {
        -&c[n]
    }
}

/// Whether `p` is a unit of `Q[H]((t))`.
///
/// The norm `det R(p)` of the regular representation is a Laurent polynomial
/// of span at most `|H| * span(p)`, so it vanishes identically iff it
/// vanishes at that many plus one distinct rational points.
pub fn is_unit_laurent(p: &LaurentPolyGA) -> bool {
    if p.is_zero() {
        return false;
    }
    if p.terms.len() == 1 {
        return p.terms.values().next().expect("one term").is_unit();
    }
    let points = p.group.order() as i64 * p.span() + 1;
    (1..=points).any(|s| p.evaluate(&BigRational::from_integer(BigInt::from(s))).is_unit())
}

/// Whether `p = c t^a h q` for a rational `c != 0`, integer `a` and `h` in `H`.
pub fn poly_equiv(p: &LaurentPolyGA, q: &LaurentPolyGA) -> bool {
    if p.is_zero() || q.is_zero() {
        return p.is_zero() && q.is_zero();
    }
    if p.terms.len() != q.terms.len() || p.span() != q.span() {
        return false;
    }
    let a = p.min_degree().unwrap() - q.min_degree().unwrap();
    let shifted = q.shift(a);
    let d0 = p.min_degree().unwrap();
    let (&g0, c0) = p.coeff(d0).coeffs().iter().next().map(|(h, c)| (h, c.clone())).unwrap();
    for h in p.group.elements() {
        let cand = shifted.translate(h);
        let c1 = cand.coeff(d0).coeff(g0);
        if c1.is_zero() {
            continue;
        }
        if cand.scale(&(&c0 / &c1)) == *p {
            return true;
        }
    }
    false
}

/// Canonical representative of `p` up to `c t^a`: minimal degree
/// `-span/2` when the span is even and `0` otherwise, and a positive
/// coefficient on the lexicographically first group element of the lowest
/// term.
pub fn normalize_poly(p: &LaurentPolyGA) -> LaurentPolyGA {
    let Some(lo) = p.min_degree() else {
        return p.clone();
    };
    let span = p.span();
    let target = if span % 2 == 0 { -span / 2 } else { 0 };
    let out = p.shift(target - lo);
    let low = out.coeff(target);
    let g = &out.group;
    let first = low
        .coeffs()
        .keys()
        .min_by(|a, b| g.lex_cmp(**a, **b))
        .copied()
        .expect("nonzero lowest term");
    if low.coeff(first).is_negative() {
        -&out
    } else {
        out
    }
}

/// `det Upsilon(tau^-g A)` for the Fox matrix `A`, in canonical form.
pub fn metafinite_polynomial(p: &MeridianPresentation, r: &MetaRep) -> Result<LaurentPolyGA> {
    let m = build_fox_matrix(p, r, DEFAULT_PRECISION)?;
    let n = r.cover_degree();
    // the tau^-g factor only shifts the t-degree, which normalization removes
    Ok(normalize_poly(&det_commutative(&upsilon_matrix(&m, n)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::metabelian_rep;
    use crate::grouprings::GroupAut;
    use crate::novikov::NovikovRing;
    use crate::presentation::builtin;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn z5_neg_ring() -> Arc<NovikovRing> {
        let g = Arc::new(FiniteAbelianGroup::cyclic(5).unwrap());
        NovikovRing::new(Arc::new(GroupAut::new(g, vec![vec![-1]]).unwrap()), 8)
    }

    fn lp(g: &Arc<FiniteAbelianGroup>, s: &str) -> LaurentPolyGA {
        LaurentPolyGA::parse(g, s).unwrap()
    }

    /// Cofactor expansion along the first row; independent of Berkowitz.
    fn laplace(m: &[Vec<LaurentPolyGA>], g: &Arc<FiniteAbelianGroup>) -> LaurentPolyGA {
        let n = m.len();
        if n == 0 {
            return LaurentPolyGA::one(g);
        }
        let mut acc = LaurentPolyGA::zero(g);
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<LaurentPolyGA>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, e)| e.clone()).collect())
                .collect();
            let term = &m[0][j] * &laplace(&minor, g);
            acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    #[test]
    fn parse_and_display() {
        let g = Arc::new(FiniteAbelianGroup::cyclic(5).unwrap());
        let p = lp(&g, "t^-2 - 3 - x - x^2 - x^3 - x^4 + t^2");
        assert_eq!(p.to_string(), "t^-2 - 3 - x - x^2 - x^3 - x^4 + t^2");
        let h = Arc::new(FiniteAbelianGroup::new(vec![4, 4]).unwrap());
        let p = lp(&h, "1 + 4t^3 + 7t^3xy + 3t^3x^2y^2 + 4t^3x^3y^3 + t^6xy");
        assert_eq!(p.coeff(3), GroupAlgebraElem::parse(&h, "4 + 7xy + 3x^2y^2 + 4x^3y^3").unwrap());
        assert_eq!(p.to_string(), "1 + 4t^3 + 7t^3xy + 3t^3x^2y^2 + 4t^3x^3y^3 + t^6xy");
        let p = lp(&g, "x^-1t^-1 - 1/2");
        assert_eq!(p.coeff(-1), GroupAlgebraElem::parse(&g, "x^4").unwrap());
    }

    #[test]
    fn upsilon_three_block_shape() {
        let g = Arc::new(FiniteAbelianGroup::new(vec![4, 4]).unwrap());
        let k = Arc::new(GroupAut::new(g.clone(), vec![vec![2, -1], vec![-1, 1]]).unwrap());
        let ring = NovikovRing::new(k.clone(), 8);
        let ga = |s: &str| GroupAlgebraElem::parse(&g, s).unwrap();
        let (a, b, c) = (ga("x"), ga("y"), ga("1 + xy"));
        let s = NovikovSeries::from_terms(&ring, [(0, a.clone()), (1, b.clone()), (2, c.clone())]);
        let u = upsilon_elem(&s, 3).unwrap();
        let tw = |e: &GroupAlgebraElem, n: i64| ring.twist(e, n);
        let m = |e: &GroupAlgebraElem, d: i64| LaurentPolyGA::monomial(e.clone(), d);
        // a on the diagonal as diag(a, kappa^2 a, kappa a); b and c on the shifted diagonals
        let expected = [
            [m(&a, 0), m(&tw(&c, 3), 2), m(&tw(&b, 3), 1)],
            [m(&tw(&b, 2), 1), m(&tw(&a, 2), 0), m(&tw(&c, 2), 2)],
            [m(&tw(&c, 1), 2), m(&tw(&b, 1), 1), m(&tw(&a, 1), 0)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(u.get(i, j), &expected[i][j], "({i},{j})");
            }
        }
    }

    #[test]
    fn upsilon_small_cases() {
        let ring = z5_neg_ring();
        let g = ring.group().clone();
        let one = upsilon_elem(&NovikovSeries::one(&ring), 4).unwrap();
        assert_eq!(one, UpsilonMatrix::identity(&g, 4));
        let x = GroupAlgebraElem::element(&g, 1);
        let xt = NovikovSeries::monomial(&ring, x.clone(), 1);
        let u = upsilon_elem(&xt, 2).unwrap();
        assert!(u.get(0, 0).is_zero() && u.get(1, 1).is_zero());
        assert_eq!(u.get(1, 0), &LaurentPolyGA::monomial(GroupAlgebraElem::element(&g, 4), 1));
        assert_eq!(u.get(0, 1), &LaurentPolyGA::monomial(x.clone(), 1));
        let sq = upsilon_elem(&(&xt * &xt), 2).unwrap();
        assert_eq!(u.mul(&u), sq);
        let inv = upsilon_elem(&NovikovSeries::tau_pow(&ring, -1), 2).unwrap();
        let tau = upsilon_elem(&NovikovSeries::tau_pow(&ring, 1), 2).unwrap();
        assert_eq!(tau.mul(&inv), UpsilonMatrix::identity(&g, 2));
        assert!(matches!(
            upsilon_elem(&xt.truncate(4), 2),
            Err(Error::InfiniteSupport)
        ));
        assert!(matches!(upsilon_elem(&xt, 3), Err(Error::BadCoverDegree(3))));
    }

    #[test]
    fn shift_block_for_tau() {
        let ring = NovikovRing::rational(8);
        let m = NovikovMatrix::from_rows(&ring, vec![vec![NovikovSeries::tau_pow(&ring, 1)]]).unwrap();
        let u = upsilon_matrix(&m, 6).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let want = i == (j + 1) % 6;
                assert_eq!(!u.get(i, j).is_zero(), want);
                if want {
                    assert_eq!(u.get(i, j).min_degree(), Some(1));
                }
            }
        }
        let id = NovikovMatrix::identity(&ring, 2);
        assert_eq!(upsilon_matrix(&id, 3).unwrap(), UpsilonMatrix::identity(ring.group(), 6));
    }

    #[test]
    fn determinant_examples() {
        let g = Arc::new(FiniteAbelianGroup::cyclic(5).unwrap());
        assert_eq!(det_commutative(&UpsilonMatrix::identity(&g, 3)), LaurentPolyGA::one(&g));
        let p = lp(&g, "t^-1 + x");
        let r = lp(&g, "2 - x^2t^3");
        let z = LaurentPolyGA::zero(&g);
        let d = UpsilonMatrix::from_entries(2, vec![p.clone(), z.clone(), z, r.clone()]);
        assert_eq!(det_commutative(&d), &p * &r);
    }

    #[test]
    fn trefoil_six_fold() {
        let p = builtin("3_1").unwrap();
        let poly = metafinite_polynomial(&p, &MetaRep::trivial(2, 6)).unwrap();
        let g = poly.group().clone();
        assert!(poly_equiv(&poly, &lp(&g, "1 - 2t^6 + t^12")));
        assert_eq!(poly.to_string(), "t^-6 - 2 + t^6");
    }

    #[test]
    fn figure_eight_double_cover_poly() {
        let p = builtin("4_1").unwrap();
        let rep = metabelian_rep(&p, 2).unwrap();
        let poly = metafinite_polynomial(&p, &rep).unwrap();
        // with x = rho(x1) the polynomial reads t^-2 - 3 - x - x^2 - x^3 - x^4 + t^2
        let x = rep.images()[0];
        let g = rep.group();
        let expected = LaurentPolyGA::from_terms(
            g,
            [
                (-2, GroupAlgebraElem::one(g)),
                (0, -&(&GroupAlgebraElem::from_int(g, 2)
                    + &(0..5).fold(GroupAlgebraElem::zero(g), |acc, k| {
                        &acc + &GroupAlgebraElem::element(g, g.scale(x, k))
                    }))),
                (2, GroupAlgebraElem::one(g)),
            ],
        );
        assert!(poly_equiv(&poly, &expected), "{poly}");
        assert!(is_unit_laurent(&poly));
    }

    #[test]
    fn equivalence_examples() {
        let g = Arc::new(FiniteAbelianGroup::cyclic(5).unwrap());
        let p = lp(&g, "1 + 2x t - 3t^2x^3");
        assert!(poly_equiv(&p, &p));
        assert!(poly_equiv(&p, &p.shift(3).translate(1)));
        assert!(poly_equiv(&p, &p.scale(&q(-7))));
        let t = Arc::new(FiniteAbelianGroup::trivial());
        assert!(!poly_equiv(&lp(&t, "1 - 2t^6 + t^12"), &lp(&t, "1 - 2t^3 + t^6")));
    }

    #[test]
    fn unit_examples() {
        let g = Arc::new(FiniteAbelianGroup::cyclic(5).unwrap());
        assert!(is_unit_laurent(&lp(&g, "t^3")));
        assert!(!is_unit_laurent(&lp(&g, "1 + x + x^2 + x^3 + x^4")));
        assert!(!is_unit_laurent(&lp(&g, "t + xt + x^2t + x^3t + x^4t + 1 + x + x^2 + x^3 + x^4")));
        assert!(is_unit_laurent(&lp(&g, "1 + x + x^2 + x^3 + x^4 + t")));
        assert!(!is_unit_laurent(&LaurentPolyGA::zero(&g)));
    }

    #[test]
    fn normalization() {
        let t = Arc::new(FiniteAbelianGroup::trivial());
        let p = normalize_poly(&lp(&t, "-t^3 + t^4 + 5t^6"));
        assert_eq!(p.to_string(), "1 - t - 5t^3");
        let p = normalize_poly(&lp(&t, "t^2 - 2t^4"));
        assert_eq!(p.to_string(), "t^-1 - 2t");
    }

    fn arb_poly(g: Arc<FiniteAbelianGroup>) -> impl Strategy<Value = LaurentPolyGA> {
        let n = g.order();
        prop::collection::vec((-1i64..=2, 0..n, -3i64..=3), 0..4).prop_map(move |terms| {
            LaurentPolyGA::from_terms(
                &g,
                terms
                    .into_iter()
                    .map(|(d, h, c)| (d, GroupAlgebraElem::monomial(&g, h, q(c)))),
            )
        })
    }

    fn arb_matrix(g: Arc<FiniteAbelianGroup>, n: usize) -> impl Strategy<Value = UpsilonMatrix> {
        prop::collection::vec(arb_poly(g), n * n).prop_map(move |e| UpsilonMatrix::from_entries(n, e))
    }

    fn z3() -> Arc<FiniteAbelianGroup> {
        Arc::new(FiniteAbelianGroup::cyclic(3).unwrap())
    }

    fn arb_skew(ring: Arc<NovikovRing>) -> impl Strategy<Value = NovikovSeries> {
        prop::collection::vec((-2i64..=3, 0usize..5, -3i64..=3), 0..5).prop_map(move |terms| {
            let g = ring.group().clone();
            NovikovSeries::from_terms(
                &ring,
                terms
                    .into_iter()
                    .map(|(d, h, c)| (d, GroupAlgebraElem::monomial(&g, h, q(c)))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn upsilon_is_ring_hom(f in arb_skew(z5_neg_ring()), g in arb_skew(z5_neg_ring())) {
            for n in [2usize, 4] {
                let uf = upsilon_elem(&f, n).unwrap();
                let ug = upsilon_elem(&g, n).unwrap();
                prop_assert_eq!(upsilon_elem(&(&f * &g), n).unwrap(), uf.mul(&ug));
                prop_assert_eq!(upsilon_elem(&(&f + &g), n).unwrap(), uf.add(&ug));
            }
        }

        #[test]
        fn det_is_multiplicative(a in arb_matrix(z3(), 3), b in arb_matrix(z3(), 3)) {
            let lhs = det_commutative(&a.mul(&b));
            prop_assert_eq!(lhs, &det_commutative(&a) * &det_commutative(&b));
        }

        #[test]
        fn det_matches_laplace(a in arb_matrix(z3(), 4)) {
            prop_assert_eq!(det_commutative(&a), laplace(&a.rows(), &z3()));
        }

        #[test]
        fn det_row_operations(a in arb_matrix(z3(), 3), c in arb_poly(z3())) {
            // row 0 += c * row 1 keeps the determinant; swapping rows negates it
            let mut rows = a.rows();
            let added: Vec<LaurentPolyGA> = rows[0].iter().zip(&rows[1]).map(|(x, y)| x + &(&c * y)).collect();
            rows[0] = added;
            let b = UpsilonMatrix::from_entries(3, rows.concat());
            prop_assert_eq!(det_commutative(&b), det_commutative(&a));
            let mut rows = a.rows();
            rows.swap(0, 2);
            let s = UpsilonMatrix::from_entries(3, rows.concat());
            prop_assert_eq!(det_commutative(&s), -&det_commutative(&a));
        }
    }
}
