use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::group::{FiniteAbelianGroup, GroupAut};
use super::linalg;
use crate::error::{Error, Result};

/// Element of `Q[H]`, stored sparsely by group element index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraElem {
    group: Arc<FiniteAbelianGroup>,
    coeffs: BTreeMap<usize, BigRational>,
}

impl GroupAlgebraElem {
    pub fn zero(group: &Arc<FiniteAbelianGroup>) -> Self {
        GroupAlgebraElem {
            group: group.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(group: &Arc<FiniteAbelianGroup>) -> Self {
        Self::monomial(group, 0, BigRational::one())
    }

    pub fn monomial(group: &Arc<FiniteAbelianGroup>, h: usize, c: BigRational) -> Self {
        let mut out = Self::zero(group);
        out.add_term(h, c);
        out
    }

    pub fn element(group: &Arc<FiniteAbelianGroup>, h: usize) -> Self {
        Self::monomial(group, h, BigRational::one())
    }

    pub fn scalar(group: &Arc<FiniteAbelianGroup>, c: BigRational) -> Self {
        Self::monomial(group, 0, c)
    }

    pub fn from_int(group: &Arc<FiniteAbelianGroup>, c: i64) -> Self {
        Self::scalar(group, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn from_coeffs<I: IntoIterator<Item = (usize, BigRational)>>(
        group: &Arc<FiniteAbelianGroup>,
        terms: I,
    ) -> Self {
        let mut out = Self::zero(group);
        for (h, c) in terms {
            out.add_term(h, c);
        }
        out
    }

    pub fn add_term(&mut self, h: usize, c: BigRational) {
        use std::collections::btree_map::Entry;
        assert!(h < self.group.order(), "group element out of range");
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(h) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn group(&self) -> &Arc<FiniteAbelianGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, BigRational> {
        &self.coeffs
    }

    pub fn coeff(&self, h: usize) -> BigRational {
        self.coeffs.get(&h).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    /// `Some((h, c))` when the element is `c h`.
    pub fn as_monomial(&self) -> Option<(usize, &BigRational)> {
        if self.coeffs.len() == 1 {
            self.coeffs.iter().next().map(|(h, c)| (*h, c))
        } else {
            None
        }
    }

    pub fn augmentation(&self) -> BigRational {
        self.coeffs.values().fold(BigRational::zero(), |a, c| a + c)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let mut out = self.clone();
        for (h, c) in &other.coeffs {
            out.add_term(*h, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let mut out = Self::zero(&self.group);
        for (a, c) in &self.coeffs {
            for (b, d) in &other.coeffs {
                out.add_term(self.group.add(*a, *b), c * d);
            }
        }
        Ok(out)
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) || *self.group == *other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.group);
        }
        GroupAlgebraElem {
            group: self.group.clone(),
            coeffs: self.coeffs.iter().map(|(h, v)| (*h, v * c)).collect(),
        }
    }

    /// Multiplication by the group element `g`.
    pub fn translate(&self, g: usize) -> Self {
        GroupAlgebraElem {
            group: self.group.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(h, v)| (self.group.add(*h, g), v.clone()))
                .collect(),
        }
    }

    /// Relabels basis elements by a permutation table of `H`.
    pub fn permute(&self, table: &[usize]) -> Self {
        GroupAlgebraElem {
            group: self.group.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(h, v)| (table[*h], v.clone()))
                .collect(),
        }
    }

    pub fn apply_aut(&self, kappa: &GroupAut) -> Self {
        assert!(kappa.same_group(&self.group), "automorphism of another group");
        GroupAlgebraElem {
            group: self.group.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(h, v)| (kappa.apply(*h), v.clone()))
                .collect(),
        }
    }

    /// Regular representation: `(a b)_g = sum_k R[g][k] b_k`.
    pub fn regular_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.group.order();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for k in 0..n {
            for (h, c) in &self.coeffs {
                m[self.group.add(*h, k)][k] = c.clone();
            }
        }
        m
    }

    pub fn is_unit(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.as_monomial().is_some() {
            return true;
        }
        !linalg::det(self.regular_matrix()).is_zero()
    }

    pub fn inverse(&self) -> Option<Self> {
        if let Some((h, c)) = self.as_monomial() {
            return Some(Self::monomial(&self.group, self.group.neg(h), c.recip()));
        }
        if self.is_zero() {
            return None;
        }
        let n = self.group.order();
        let mut rhs = vec![BigRational::zero(); n];
        rhs[0] = BigRational::one();
        let sol = linalg::solve(self.regular_matrix(), rhs)?;
        Some(Self::from_coeffs(&self.group, sol.into_iter().enumerate()))
    }

    /// Parses expressions such as `(3 + 2x + x^2y^-1)/2` or `1/2 - 3/4 xy`.
    pub fn parse(group: &Arc<FiniteAbelianGroup>, text: &str) -> Result<Self> {
        Parser::new(group, text).parse()
    }
}

/// Sum of two elements of the same group algebra.
pub fn gr_add(a: &GroupAlgebraElem, b: &GroupAlgebraElem) -> Result<GroupAlgebraElem> {
    a.checked_add(b)
}

/// Product of two elements of the same group algebra.
pub fn gr_mul(a: &GroupAlgebraElem, b: &GroupAlgebraElem) -> Result<GroupAlgebraElem> {
    a.checked_mul(b)
}

pub fn gr_apply_aut(kappa: &GroupAut, a: &GroupAlgebraElem) -> GroupAlgebraElem {
    a.apply_aut(kappa)
}

pub fn gr_is_unit(a: &GroupAlgebraElem) -> bool {
    a.is_unit()
}

impl Add for &GroupAlgebraElem {
    type Output = GroupAlgebraElem;
    fn add(self, rhs: &GroupAlgebraElem) -> GroupAlgebraElem {
        self.checked_add(rhs).expect("group mismatch")
    }
}

impl Sub for &GroupAlgebraElem {
    type Output = GroupAlgebraElem;
    fn sub(self, rhs: &GroupAlgebraElem) -> GroupAlgebraElem {
        self.checked_sub(rhs).expect("group mismatch")
    }
}

impl Mul for &GroupAlgebraElem {
    type Output = GroupAlgebraElem;
    fn mul(self, rhs: &GroupAlgebraElem) -> GroupAlgebraElem {
        self.checked_mul(rhs).expect("group mismatch")
    }
}

impl Neg for &GroupAlgebraElem {
    type Output = GroupAlgebraElem;
    fn neg(self) -> GroupAlgebraElem {
        GroupAlgebraElem {
            group: self.group.clone(),
            coeffs: self.coeffs.iter().map(|(h, v)| (*h, -v)).collect(),
        }
    }
}

/// Writes `sum c_h h` with a common denominator pulled out when needed.
pub(crate) fn format_terms<'a, I>(
    f: &mut fmt::Formatter<'_>,
    terms: I,
    name: impl Fn(usize) -> String,
) -> fmt::Result
where
    I: IntoIterator<Item = (usize, &'a BigRational)> + Clone,
{
    let den = terms
        .clone()
        .into_iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut body = String::new();
    let mut count = 0;
    for (h, c) in terms {
        let num = c.numer() * (&den / c.denom());
        let mag = num.abs();
        let label = name(h);
        if count == 0 {
            if num.is_negative() {
                body.push('-');
            }
        } else {
            body.push_str(if num.is_negative() { " - " } else { " + " });
        }
        if label == "1" {
            body.push_str(&mag.to_string());
        } else if mag.is_one() {
            body.push_str(&label);
        } else {
            body.push_str(&format!("{mag}{label}"));
        }
        count += 1;
    }
    if count == 0 {
        return write!(f, "0");
    }
    if den.is_one() {
        write!(f, "{body}")
    } else if count == 1 {
        write!(f, "{body}/{den}")
    } else {
        write!(f, "({body})/{den}")
    }
}

impl fmt::Display for GroupAlgebraElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_terms(f, self.coeffs.iter().map(|(h, c)| (*h, c)), |h| {
            self.group.format_element(h)
        })
    }
}

/// Element of `A / {a - kappa(a)}`: coefficient sums over kappa-orbits, keyed
/// by the lexicographically least orbit member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClass {
    group: Arc<FiniteAbelianGroup>,
    coeffs: BTreeMap<usize, BigRational>,
}

impl OrbitClass {
    pub fn zero(group: &Arc<FiniteAbelianGroup>) -> Self {
        OrbitClass {
            group: group.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, BigRational> {
        &self.coeffs
    }

    pub fn coeff(&self, rep: usize) -> BigRational {
        self.coeffs.get(&rep).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn group(&self) -> &Arc<FiniteAbelianGroup> {
        &self.group
    }

    /// Total of all coefficients; the image under the augmentation.
    pub fn augmentation(&self) -> BigRational {
        self.coeffs.values().fold(BigRational::zero(), |a, c| a + c)
    }

    fn add_term(&mut self, rep: usize, c: BigRational) {
        let v = self.coeffs.entry(rep).or_insert_with(BigRational::zero);
        *v += c;
        if v.is_zero() {
            self.coeffs.remove(&rep);
        }
    }

    pub fn add(&self, other: &OrbitClass) -> OrbitClass {
        let mut out = self.clone();
        for (h, c) in &other.coeffs {
            out.add_term(*h, c.clone());
        }
        out
    }

    /// Orbit sums as a group algebra element supported on representatives.
    pub fn to_element(&self) -> GroupAlgebraElem {
        GroupAlgebraElem::from_coeffs(&self.group, self.coeffs.clone())
    }

    /// `{[1]: 3/2, [x]: 5/2}` style rendering.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(h, c)| format!("[{}]: {}", self.group.format_element(*h), c))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Projects `a` onto `A / {a - kappa(a)}`.
pub fn orbit_project(a: &GroupAlgebraElem, kappa: &GroupAut) -> OrbitClass {
    assert!(kappa.same_group(a.group()), "automorphism of another group");
    let mut out = OrbitClass::zero(a.group());
    for (h, c) in a.coeffs() {
        out.add_term(kappa.orbit_rep(*h), c.clone());
    }
    out
}

struct Parser<'a> {
    group: &'a Arc<FiniteAbelianGroup>,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(group: &'a Arc<FiniteAbelianGroup>, text: &str) -> Self {
        Parser {
            group,
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn err(&self, message: &str) -> Error {
        Error::Syntax {
            line: 1,
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().ok()
    }

    fn signed_integer(&mut self) -> Option<i64> {
        let neg = self.eat('-');
        let v = self.integer()?;
        let v: i64 = v.try_into().ok()?;
        Some(if neg { -v } else { v })
    }

    fn parse(mut self) -> Result<GroupAlgebraElem> {
        let value = self.sum()?;
        if self.pos != self.chars.len() {
            return Err(self.err("trailing input"));
        }
        Ok(value)
    }

    fn sum(&mut self) -> Result<GroupAlgebraElem> {
        let mut acc = GroupAlgebraElem::zero(self.group);
        let mut first = true;
        loop {
            let neg = if self.eat('-') {
                true
            } else if self.eat('+') || first {
                false
            } else {
                break;
            };
            let term = self.term()?;
            acc = &acc + &(if neg { -&term } else { term });
            first = false;
            if !matches!(self.peek(), Some('+') | Some('-')) {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<GroupAlgebraElem> {
        let mut value = if self.eat('(') {
            let inner = self.sum()?;
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            inner
        } else {
            let numeral = self.integer();
            let has_numeral = numeral.is_some();
            let mut coeff = match numeral {
                Some(n) => BigRational::from_integer(n),
                None => BigRational::one(),
            };
            if has_numeral && self.peek() == Some('/') {
                self.pos += 1;
                let d = self.integer().ok_or_else(|| self.err("expected denominator"))?;
                if d.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                coeff /= BigRational::from_integer(d);
            }
            let mut exps = vec![0i64; self.group.rank()];
            while let Some(c) = self.peek() {
                let Some(k) = (0..self.group.rank())
                    .find(|&k| FiniteAbelianGroup::variable_name(k).starts_with(c))
                else {
                    break;
                };
                self.pos += 1;
                let e = if self.eat('^') {
                    self.signed_integer().ok_or_else(|| self.err("expected exponent"))?
                } else {
                    1
                };
                exps[k] += e;
            }
            GroupAlgebraElem::monomial(self.group, self.group.element(&exps), coeff)
        };
        if self.eat('/') {
            let d = self.integer().ok_or_else(|| self.err("expected denominator"))?;
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            value = value.scale(&BigRational::new(BigInt::one(), d));
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouprings::group::aut_order;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn z5() -> Arc<FiniteAbelianGroup> {
        Arc::new(FiniteAbelianGroup::cyclic(5).unwrap())
    }

    fn p(g: &Arc<FiniteAbelianGroup>, s: &str) -> GroupAlgebraElem {
        GroupAlgebraElem::parse(g, s).unwrap()
    }

    #[test]
    fn add_examples() {
        let g = z5();
        assert!(gr_add(&p(&g, "x"), &p(&g, "-x")).unwrap().is_zero());
        assert_eq!(gr_add(&p(&g, "1+x"), &p(&g, "x")).unwrap(), p(&g, "1+2x"));
        assert_eq!(gr_add(&GroupAlgebraElem::zero(&g), &p(&g, "x^3")).unwrap(), p(&g, "x^3"));
        let other = Arc::new(FiniteAbelianGroup::cyclic(3).unwrap());
        assert_eq!(
            gr_add(&p(&g, "x"), &p(&other, "x")),
            Err(Error::GroupMismatch)
        );
    }

    #[test]
    fn mul_examples() {
        let g = z5();
        assert_eq!(gr_mul(&p(&g, "x^2"), &p(&g, "x^4")).unwrap(), p(&g, "x"));
        assert_eq!(gr_mul(&p(&g, "1+x"), &p(&g, "1-x")).unwrap(), p(&g, "1-x^2"));
        let a = p(&g, "3/2 + x - 7x^3");
        assert_eq!(gr_mul(&a, &GroupAlgebraElem::one(&g)).unwrap(), a);
    }

    #[test]
    fn aut_examples() {
        let g = z5();
        let neg = GroupAut::new(g.clone(), vec![vec![-1]]).unwrap();
        assert_eq!(gr_apply_aut(&neg, &p(&g, "x")), p(&g, "x^4"));
        let h = Arc::new(FiniteAbelianGroup::new(vec![4, 4]).unwrap());
        let k = GroupAut::new(h.clone(), vec![vec![2, -1], vec![-1, 1]]).unwrap();
        assert_eq!(gr_apply_aut(&k, &p(&h, "x")), p(&h, "x^2y^-1"));
        let id = GroupAut::identity(h.clone());
        assert_eq!(gr_apply_aut(&id, &p(&h, "1 + xy")), p(&h, "1 + xy"));
    }

    #[test]
    fn unit_examples() {
        let g = z5();
        for h in 0..5 {
            assert!(gr_is_unit(&GroupAlgebraElem::element(&g, h)));
        }
        assert!(!gr_is_unit(&p(&g, "1 + x + x^2 + x^3 + x^4")));
        assert!(!gr_is_unit(&GroupAlgebraElem::zero(&g)));
        assert!(gr_is_unit(&p(&g, "2 + x")));
        // 1 - x kills the norm element, so it is a zero divisor
        assert!(!gr_is_unit(&p(&g, "1 - x")));
    }

    #[test]
    fn unit_oracle_brute_force() {
        // a in Q[Z/5] is a unit iff its value at every 5th root of unity is
        // nonzero; for a = 1 + c x the only failure is c^5 = -1, i.e. c = -1
        let g = z5();
        for c in -3..=3i64 {
            let a = &GroupAlgebraElem::one(&g) + &GroupAlgebraElem::monomial(&g, 1, q(c, 1));
            assert_eq!(gr_is_unit(&a), c != -1, "c = {c}");
        }
    }

    #[test]
    fn orbit_examples() {
        let g = z5();
        let neg = GroupAut::new(g.clone(), vec![vec![-1]]).unwrap();
        let c = orbit_project(&p(&g, "2x + 3x^4"), &neg);
        assert_eq!(c.coeffs().len(), 1);
        assert_eq!(c.coeff(1), q(5, 1));
        let c = orbit_project(&p(&g, "(3 + 2x + x^2 + x^3 + 3x^4)/2"), &neg);
        assert_eq!(c.coeff(0), q(3, 2));
        assert_eq!(c.coeff(1), q(5, 2));
        assert_eq!(c.coeff(2), q(1, 1));
        assert_eq!(c.render(), "{[1]: 3/2, [x]: 5/2, [x^2]: 1}");
        let id = GroupAut::identity(g.clone());
        let a = p(&g, "1/3 - x^3");
        assert_eq!(orbit_project(&a, &id).to_element(), a);
    }

    #[test]
    fn display_and_parse() {
        let g = z5();
        let a = p(&g, "(3 + 2x + x^2 + x^3 + 3x^4)/2");
        assert_eq!(a.to_string(), "(3 + 2x + x^2 + x^3 + 3x^4)/2");
        assert_eq!(p(&g, "1 - x").to_string(), "1 - x");
        assert_eq!(p(&g, "-x/3").to_string(), "-x/3");
        assert_eq!(GroupAlgebraElem::zero(&g).to_string(), "0");
        let h = Arc::new(FiniteAbelianGroup::new(vec![4, 4]).unwrap());
        assert_eq!(p(&h, "7xy + 3x^2y^2").to_string(), "7xy + 3x^2y^2");
        assert!(GroupAlgebraElem::parse(&g, "1 +* x").is_err());
    }

    fn arb_elem(g: Arc<FiniteAbelianGroup>) -> impl Strategy<Value = GroupAlgebraElem> {
        let n = g.order();
        prop::collection::vec((0..n, -4i64..=4, 1i64..=3), 0..5).prop_map(move |terms| {
            GroupAlgebraElem::from_coeffs(&g, terms.into_iter().map(|(h, a, b)| (h, q(a, b))))
        })
    }

    fn grp44() -> Arc<FiniteAbelianGroup> {
        Arc::new(FiniteAbelianGroup::new(vec![4, 4]).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn ring_axioms(a in arb_elem(grp44()), b in arb_elem(grp44()), c in arb_elem(grp44())) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &GroupAlgebraElem::one(a.group()), a.clone());
        }

        #[test]
        fn aut_is_ring_hom(a in arb_elem(grp44()), b in arb_elem(grp44())) {
            let g = a.group().clone();
            let k = GroupAut::new(g, vec![vec![2, -1], vec![-1, 1]]).unwrap();
            prop_assert_eq!(gr_apply_aut(&k, &(&a * &b)), &gr_apply_aut(&k, &a) * &gr_apply_aut(&k, &b));
            let mut x = a.clone();
            for _ in 0..aut_order(&k) {
                x = gr_apply_aut(&k, &x);
            }
            prop_assert_eq!(x, a);
        }

        #[test]
        fn units_have_inverses(a in arb_elem(z5())) {
            if gr_is_unit(&a) {
                let inv = a.inverse().expect("unit has inverse");
                prop_assert!((&a * &inv).is_one());
            } else {
                prop_assert!(a.inverse().is_none());
            }
        }

        #[test]
        fn projection_kills_coboundaries(a in arb_elem(grp44())) {
            let k = GroupAut::new(a.group().clone(), vec![vec![2, -1], vec![-1, 1]]).unwrap();
            prop_assert!(orbit_project(&(&a - &gr_apply_aut(&k, &a)), &k).is_zero());
        }
    }
}
