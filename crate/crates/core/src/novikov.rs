//! Truncated skew Laurent series `Q[H]_kappa((tau))` with `tau a = kappa(a) tau`.
//!
//! A series is either exact (finitely many terms, known completely) or known
//! modulo `tau^p` for an absolute precision `p`. Sums keep the smaller
//! precision; a product `a b` is known modulo `tau^min(pa + vb, pb + va)`
//! where `v` is the valuation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::grouprings::{orbit_project, FiniteAbelianGroup, GroupAlgebraElem, GroupAut, OrbitClass};

pub const DEFAULT_PRECISION: usize = 24;

/// Coefficient ring, twist and default relative precision `K`.
#[derive(Debug)]
pub struct NovikovRing {
    kappa: Arc<GroupAut>,
    precision: usize,
    powers: Vec<Vec<usize>>,
}

impl NovikovRing {
    pub fn new(kappa: Arc<GroupAut>, precision: usize) -> Arc<Self> {
        let powers = (0..kappa.order() as i64).map(|n| kappa.power_table(n)).collect();
        Arc::new(NovikovRing {
            kappa,
            precision: precision.max(1),
            powers,
        })
    }

    /// Commutative case over the trivial group.
    pub fn rational(precision: usize) -> Arc<Self> {
        let g = Arc::new(FiniteAbelianGroup::trivial());
        Self::new(Arc::new(GroupAut::identity(g)), precision)
    }

    pub fn group(&self) -> &Arc<FiniteAbelianGroup> {
        self.kappa.group()
    }

    pub fn kappa(&self) -> &Arc<GroupAut> {
        &self.kappa
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn kappa_order(&self) -> usize {
        self.kappa.order()
    }

    /// `kappa^n(a)`.
    pub fn twist(&self, a: &GroupAlgebraElem, n: i64) -> GroupAlgebraElem {
        let k = n.rem_euclid(self.powers.len() as i64) as usize;
        if k == 0 {
            a.clone()
        } else {
            a.permute(&self.powers[k])
        }
    }

    fn compatible(&self, other: &NovikovRing) -> bool {
        *self.kappa == *other.kappa
    }
}

#[derive(Debug, Clone)]
pub struct NovikovSeries {
    ring: Arc<NovikovRing>,
    min_deg: i64,
    coeffs: Vec<GroupAlgebraElem>,
    prec: Option<i64>,
}

impl NovikovSeries {
    fn build(
        ring: &Arc<NovikovRing>,
        min_deg: i64,
        coeffs: Vec<GroupAlgebraElem>,
        prec: Option<i64>,
    ) -> Self {
        let mut s = NovikovSeries {
            ring: ring.clone(),
            min_deg,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            let keep = (p - self.min_deg).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.min_deg = self.prec.unwrap_or(0);
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.min_deg += k as i64;
                if self.prec.is_none() {
                    while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                        self.coeffs.pop();
                    }
                }
            }
        }
    }

    pub fn zero(ring: &Arc<NovikovRing>) -> Self {
        Self::build(ring, 0, Vec::new(), None)
    }

    /// Zero known only modulo `tau^prec`.
    pub fn zero_to(ring: &Arc<NovikovRing>, prec: i64) -> Self {
        Self::build(ring, prec, Vec::new(), Some(prec))
    }

    pub fn one(ring: &Arc<NovikovRing>) -> Self {
        Self::monomial(ring, GroupAlgebraElem::one(ring.group()), 0)
    }

    pub fn tau_pow(ring: &Arc<NovikovRing>, n: i64) -> Self {
        Self::monomial(ring, GroupAlgebraElem::one(ring.group()), n)
    }

    /// Exact `a tau^n`.
    pub fn monomial(ring: &Arc<NovikovRing>, a: GroupAlgebraElem, n: i64) -> Self {
        Self::build(ring, n, vec![a], None)
    }

    /// Exact Laurent polynomial from `(degree, coefficient)` pairs.
    pub fn from_terms<I: IntoIterator<Item = (i64, GroupAlgebraElem)>>(
        ring: &Arc<NovikovRing>,
        terms: I,
    ) -> Self {
        let mut map: BTreeMap<i64, GroupAlgebraElem> = BTreeMap::new();
        for (d, a) in terms {
            let slot = map
                .entry(d)
                .or_insert_with(|| GroupAlgebraElem::zero(ring.group()));
            *slot = &*slot + &a;
        }
        let Some((&lo, _)) = map.iter().next() else {
            return Self::zero(ring);
        };
        let hi = *map.keys().last().expect("nonempty");
        let coeffs = (lo..=hi)
            .map(|d| {
                map.remove(&d)
                    .unwrap_or_else(|| GroupAlgebraElem::zero(ring.group()))
            })
            .collect();
        Self::build(ring, lo, coeffs, None)
    }

    /// Series known modulo `tau^prec`, coefficients starting at `min_deg`.
    pub fn from_coeffs(
        ring: &Arc<NovikovRing>,
        min_deg: i64,
        coeffs: Vec<GroupAlgebraElem>,
        prec: Option<i64>,
    ) -> Self {
        Self::build(ring, min_deg, coeffs, prec)
    }

    pub fn ring(&self) -> &Arc<NovikovRing> {
        &self.ring
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Absolute precision `p` (the series is known modulo `tau^p`), if bounded.
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    /// Number of known coefficients from the valuation on, if bounded.
    pub fn relative_precision(&self) -> Option<i64> {
        self.prec.map(|p| p - self.min_deg)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.min_deg)
        }
    }

    /// Valuation, or the precision for a bounded zero.
    fn effective_valuation(&self) -> Option<i64> {
        if self.is_zero() {
            self.prec
        } else {
            Some(self.min_deg)
        }
    }

    pub fn leading(&self) -> Option<&GroupAlgebraElem> {
        self.coeffs.first()
    }

    /// Highest degree with a stored coefficient.
    pub fn max_degree(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.min_deg + self.coeffs.len() as i64 - 1)
        }
    }

    /// Coefficient of `tau^d`, or `None` beyond the precision window.
    pub fn coeff(&self, d: i64) -> Option<GroupAlgebraElem> {
        if self.prec.is_some_and(|p| d >= p) {
            return None;
        }
        let idx = d - self.min_deg;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            Some(GroupAlgebraElem::zero(self.ring.group()))
        } else {
            Some(self.coeffs[idx as usize].clone())
        }
    }

    fn coeff_ref(&self, d: i64) -> Option<&GroupAlgebraElem> {
        let idx = d - self.min_deg;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            None
        } else {
            let c = &self.coeffs[idx as usize];
            (!c.is_zero()).then_some(c)
        }
    }

    /// Nonzero terms in increasing degree.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &GroupAlgebraElem)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.min_deg + k as i64, c))
    }

    pub fn support(&self) -> Vec<i64> {
        self.terms().map(|(d, _)| d).collect()
    }

    /// Forgets everything from `tau^prec` on.
    pub fn truncate(&self, prec: i64) -> Self {
        let p = self.prec.map_or(prec, |q| q.min(prec));
        Self::build(&self.ring, self.min_deg, self.coeffs.clone(), Some(p))
    }

    /// Agreement on the common precision window.
    pub fn agrees_with(&self, other: &NovikovSeries) -> bool {
        let hi = match (self.prec, other.prec) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => {
                return self.min_deg == other.min_deg && self.coeffs == other.coeffs;
            }
        };
        let lo = [self.min_deg, other.min_deg, hi].into_iter().min().expect("nonempty");
        (lo..hi).all(|d| self.coeff(d) == other.coeff(d))
    }

    fn check_ring(&self, other: &NovikovSeries) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring.compatible(&other.ring) {
            Ok(())
        } else {
            Err(Error::KappaMismatch)
        }
    }

    pub fn checked_add(&self, other: &NovikovSeries) -> Result<NovikovSeries> {
        self.check_ring(other)?;
        let prec = match (self.prec, other.prec) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let (Some(_), Some(_)) = (self.valuation(), other.valuation()) else {
            let nonzero = if self.is_zero() { other } else { self };
            return Ok(Self::build(&self.ring, nonzero.min_deg, nonzero.coeffs.clone(), prec));
        };
        let lo = self.min_deg.min(other.min_deg);
        let mut hi = self.max_degree().unwrap().max(other.max_degree().unwrap());
        if let Some(p) = prec {
            hi = hi.min(p - 1);
        }
        let zero = GroupAlgebraElem::zero(self.ring.group());
        let coeffs = (lo..=hi)
            .map(|d| match (self.coeff_ref(d), other.coeff_ref(d)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => zero.clone(),
            })
            .collect();
        Ok(Self::build(&self.ring, lo, coeffs, prec))
    }

    pub fn checked_mul(&self, other: &NovikovSeries) -> Result<NovikovSeries> {
        self.check_ring(other)?;
        let ring = &self.ring;
        if (self.is_zero() && self.is_exact()) || (other.is_zero() && other.is_exact()) {
            return Ok(Self::zero(ring));
        }
        let va = self.effective_valuation().expect("nonzero or bounded");
        let vb = other.effective_valuation().expect("nonzero or bounded");
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (Some(pa), None) => Some(pa + vb),
            (None, Some(pb)) => Some(pb + va),
            (Some(pa), Some(pb)) => Some((pa + vb).min(pb + va)),
        };
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero_to(ring, prec.expect("bounded zero")));
        }
        let lo = va + vb;
        let mut hi = self.max_degree().unwrap() + other.max_degree().unwrap();
        if let Some(p) = prec {
            hi = hi.min(p - 1);
        }
        if hi < lo {
            return Ok(Self::zero_to(ring, prec.expect("empty window is bounded")));
        }
        let mut out = vec![GroupAlgebraElem::zero(ring.group()); (hi - lo + 1) as usize];
        for (i, a) in self.terms() {
            if i + vb > hi {
                break;
            }
            for (j, b) in other.terms() {
                let d = i + j;
                if d > hi {
                    break;
                }
                let prod = a * &ring.twist(b, i);
                let slot = &mut out[(d - lo) as usize];
                *slot = &*slot + &prod;
            }
        }
        Ok(Self::build(ring, lo, out, prec))
    }

    pub fn checked_sub(&self, other: &NovikovSeries) -> Result<NovikovSeries> {
        self.checked_add(&-other)
    }

    /// Multiplies every coefficient by a rational.
    pub fn scale(&self, c: &BigRational) -> NovikovSeries {
        Self::build(
            &self.ring,
            self.min_deg,
            self.coeffs.iter().map(|a| a.scale(c)).collect(),
            self.prec,
        )
    }

    /// Two-sided inverse when the leading coefficient is a unit of `Q[H]`.
    ///
    /// Exact unit monomials invert exactly; anything else is inverted to
    /// relative precision `min(K, relative precision of self)`.
    pub fn invert(&self) -> Result<NovikovSeries> {
        let ring = &self.ring;
        let Some(lead) = self.leading() else {
            return Err(Error::NoLeadingUnitInverse);
        };
        let d = self.min_deg;
        let lead_inv = lead.inverse().ok_or(Error::NoLeadingUnitInverse)?;
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Self::monomial(ring, ring.twist(&lead_inv, -d), -d));
        }
        let mut rel = ring.precision() as i64;
        if let Some(r) = self.relative_precision() {
            rel = rel.min(r);
        }
        // (a b)_n = sum_i a_i kappa^i(b_{n-i}) = [n == 0], solved degree by degree
        let mut b: Vec<GroupAlgebraElem> = Vec::with_capacity(rel as usize);
        for m in 0..rel {
            let mut acc = if m == 0 {
                GroupAlgebraElem::one(ring.group())
            } else {
                GroupAlgebraElem::zero(ring.group())
            };
            for i in 1..=m {
                if let Some(ai) = self.coeff_ref(d + i) {
                    let bj = &b[(m - i) as usize];
                    if !bj.is_zero() {
                        acc = &acc - &(ai * &ring.twist(bj, d + i));
                    }
                }
            }
            b.push(ring.twist(&(&lead_inv * &acc), -d));
        }
        Ok(Self::build(ring, -d, b, Some(-d + rel)))
    }

    /// `kappa^n` applied to every coefficient (conjugation by `tau^n`).
    pub fn twist(&self, n: i64) -> NovikovSeries {
        Self::build(
            &self.ring,
            self.min_deg,
            self.coeffs.iter().map(|a| self.ring.twist(a, n)).collect(),
            self.prec,
        )
    }

    /// Image under the augmentation `Q[H] -> Q` (commutes with `kappa`).
    pub fn augment(&self, target: &Arc<NovikovRing>) -> NovikovSeries {
        let g = target.group();
        Self::build(
            target,
            self.min_deg,
            self.coeffs
                .iter()
                .map(|a| GroupAlgebraElem::scalar(g, a.augmentation()))
                .collect(),
            self.prec,
        )
    }
}

impl Add for &NovikovSeries {
    type Output = NovikovSeries;
    fn add(self, rhs: &NovikovSeries) -> NovikovSeries {
        self.checked_add(rhs).expect("kappa mismatch")
    }
}

impl Sub for &NovikovSeries {
    type Output = NovikovSeries;
    fn sub(self, rhs: &NovikovSeries) -> NovikovSeries {
        self.checked_sub(rhs).expect("kappa mismatch")
    }
}

impl Mul for &NovikovSeries {
    type Output = NovikovSeries;
    fn mul(self, rhs: &NovikovSeries) -> NovikovSeries {
        self.checked_mul(rhs).expect("kappa mismatch")
    }
}

impl Neg for &NovikovSeries {
    type Output = NovikovSeries;
    fn neg(self) -> NovikovSeries {
        NovikovSeries {
            ring: self.ring.clone(),
            min_deg: self.min_deg,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
            prec: self.prec,
        }
    }
}

pub fn ns_add(a: &NovikovSeries, b: &NovikovSeries) -> Result<NovikovSeries> {
    a.checked_add(b)
}

pub fn ns_mul(a: &NovikovSeries, b: &NovikovSeries) -> Result<NovikovSeries> {
    a.checked_mul(b)
}

pub fn ns_invert(a: &NovikovSeries) -> Result<NovikovSeries> {
    a.invert()
}

fn tau_label(d: i64) -> String {
    match d {
        0 => String::new(),
        1 => "τ".to_string(),
        _ => format!("τ^{d}"),
    }
}

impl fmt::Display for NovikovSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (d, a) in self.terms() {
            let t = tau_label(d);
            let part = if a.is_one() && d != 0 {
                t
            } else if d == 0 {
                format!("({a})")
            } else {
                format!("({a})·{t}")
            };
            parts.push(part);
        }
        if let Some(p) = self.prec {
            parts.push(format!("O(τ^{p})"));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A series `1 + a_1 tau + a_2 tau^2 + ...`.
#[derive(Debug, Clone)]
pub struct WittVector(NovikovSeries);

impl WittVector {
    pub fn new(s: NovikovSeries) -> Result<Self> {
        if s.valuation() != Some(0) || !s.leading().is_some_and(|a| a.is_one()) {
            return Err(Error::Unsupported("not a Witt vector: constant term must be 1".into()));
        }
        Ok(WittVector(s))
    }

    pub fn one(ring: &Arc<NovikovRing>) -> Self {
        WittVector(NovikovSeries::one(ring))
    }

    pub fn series(&self) -> &NovikovSeries {
        &self.0
    }

    pub fn into_series(self) -> NovikovSeries {
        self.0
    }
}

impl fmt::Display for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Writes `a = (u tau^e) w` with `u` the leading coefficient, `e` the
/// valuation and `w` a Witt vector.
pub fn witt_normalize(a: &NovikovSeries) -> Result<(GroupAlgebraElem, i64, WittVector)> {
    let ring = a.ring();
    let u = a.leading().ok_or(Error::NoLeadingUnitInverse)?.clone();
    let u_inv = u.inverse().ok_or(Error::NoLeadingUnitInverse)?;
    let e = a.min_deg;
    let w: Vec<GroupAlgebraElem> = a
        .coeffs
        .iter()
        .map(|c| ring.twist(&(&u_inv * c), -e))
        .collect();
    let w = NovikovSeries::build(ring, 0, w, a.prec.map(|p| p - e));
    Ok((u, e, WittVector(w)))
}

/// Logarithm classes: the `tau^k` coefficient of `log w` projected to
/// `A / {a - kappa(a)}` for every `k` divisible by the order of kappa.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogClass {
    entries: BTreeMap<usize, OrbitClass>,
    window: usize,
    kappa_order: usize,
}

impl LogClass {
    pub fn entries(&self) -> &BTreeMap<usize, OrbitClass> {
        &self.entries
    }

    pub fn get(&self, k: usize) -> Option<&OrbitClass> {
        self.entries.get(&k)
    }

    /// Largest `k` that was computed.
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn kappa_order(&self) -> usize {
        self.kappa_order
    }

    pub fn is_supported(&self, k: usize) -> bool {
        k >= 1 && k.is_multiple_of(self.kappa_order) && k <= self.window
    }

    /// Entrywise sum on the common window.
    pub fn add(&self, other: &LogClass) -> LogClass {
        let window = self.window.min(other.window);
        let entries = self
            .entries
            .iter()
            .filter(|(k, _)| **k <= window)
            .filter_map(|(k, a)| other.entries.get(k).map(|b| (*k, a.add(b))))
            .collect();
        LogClass {
            entries,
            window,
            kappa_order: self.kappa_order,
        }
    }

    /// Agreement on all supported `k` up to the common window.
    pub fn agrees_with(&self, other: &LogClass) -> bool {
        let window = self.window.min(other.window);
        (1..=window)
            .filter(|k| k % self.kappa_order == 0)
            .all(|k| self.entries.get(&k) == other.entries.get(&k))
    }
}

impl fmt::Display for LogClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(k, c)| format!("Log_{k} = {}", c.to_element()))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// `log w = sum_{n >= 1} (-1)^(n-1) u^n / n` with `u = w - 1`, computed up to
/// `tau^K` (or the precision of `w`, if smaller).
pub fn ns_log(w: &WittVector) -> LogClass {
    let s = w.series();
    let ring = s.ring();
    let mut limit = ring.precision() as i64 + 1;
    if let Some(p) = s.precision() {
        limit = limit.min(p);
    }
    let u = (s - &NovikovSeries::one(ring)).truncate(limit);
    let mut acc = NovikovSeries::zero_to(ring, limit);
    let mut power = u.clone();
    let mut n: i64 = 1;
    while !power.is_zero() && n < limit {
        let c = BigRational::new(BigInt::from(if n % 2 == 1 { 1 } else { -1 }), BigInt::from(n));
        acc = &acc + &power.scale(&c);
        power = &power * &u;
        n += 1;
    }
    let order = ring.kappa_order();
    let window = (limit - 1).max(0) as usize;
    let entries = (1..=window)
        .filter(|k| k % order == 0)
        .map(|k| {
            let c = acc.coeff(k as i64).expect("inside window");
            (k, orbit_project(&c, ring.kappa()))
        })
        .collect();
    LogClass {
        entries,
        window,
        kappa_order: order,
    }
}
