//! Smith normal form and the metabelian representation coming from the
//! homology of the N-fold cyclic cover of the knot complement.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::grouprings::{FiniteAbelianGroup, GroupAut};
use crate::presentation::{validate_rep, MeridianPresentation};
use crate::words::{Generator, Word};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    fn at(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * other.get(k, j);
                    *out.at(i, j) += v;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !m.get(r, k).is_zero()) else {
                    return BigInt::zero();
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = q * self.get(src, j);
            *self.at(dst, j) += v;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = q * self.get(i, src);
            *self.at(i, dst) += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// `U A V = D` with `U`, `V` unimodular and `D` diagonal, `d1 | d2 | ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    'outer: for t in 0..m.min(n) {
        loop {
            // smallest nonzero |entry| in the trailing block, first in row-major order
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = d.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'outer;
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let q = -(d.get(i, t) / &pivot);
                if !q.is_zero() {
                    d.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                }
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = -(d.get(t, j) / &pivot);
                if !q.is_zero() {
                    d.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                }
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { u, d, v }
}

/// Integer relation matrix of `H_1` of the N-fold cyclic cover.
///
/// Rows are indexed by relation `j` and deck power `k` (index `j*N + k`),
/// columns by generator `i` and deck power `k` (index `i*N + k`). The row for
/// `t^k` times relation `j` is `sum_i eps_i(y_j) e_(i,k+1) - eps_i(z_j) e_(i,k)`.
pub fn alexander_presentation(p: &MeridianPresentation, n: usize) -> Result<IntMatrix> {
    if n == 0 {
        return Err(Error::BadCoverDegree(n));
    }
    let r = p.rank();
    let mut a = IntMatrix::zeros(r * n, r * n);
    for j in 0..r {
        for i in 0..r {
            let g = Generator::X(i as u32 + 1);
            let ey = BigInt::from(p.y()[j].exponent_sum(g));
            let ez = BigInt::from(p.z()[j].exponent_sum(g));
            for k in 0..n {
                *a.at(j * n + k, i * n + (k + 1) % n) += &ey;
                *a.at(j * n + k, i * n + k) -= &ez;
            }
        }
    }
    Ok(a)
}

/// A representation `pi -> H x| Z` sending `x_i` to `(images[i], 0)` and the
/// meridian to the generator of `Z`, which acts on `H` by `kappa`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaRep {
    group: Arc<FiniteAbelianGroup>,
    kappa: Arc<GroupAut>,
    images: Vec<usize>,
    cover_degree: usize,
    free_rank: usize,
}

impl MetaRep {
    pub fn new(
        group: Arc<FiniteAbelianGroup>,
        kappa: Arc<GroupAut>,
        images: Vec<usize>,
        cover_degree: usize,
    ) -> Result<Self> {
        if !kappa.same_group(&group) {
            return Err(Error::GroupMismatch);
        }
        if cover_degree == 0 || !cover_degree.is_multiple_of(kappa.order()) {
            return Err(Error::InvalidAutomorphism(format!(
                "kappa has order {} which does not divide N = {cover_degree}",
                kappa.order()
            )));
        }
        if images.iter().any(|&h| h >= group.order()) {
            return Err(Error::InvalidGroup("image outside H".into()));
        }
        Ok(MetaRep {
            group,
            kappa,
            images,
            cover_degree,
            free_rank: 0,
        })
    }

    /// The representation with `H` trivial, graded by an `N`-fold cover.
    pub fn trivial(rank: usize, cover_degree: usize) -> Self {
        let group = Arc::new(FiniteAbelianGroup::trivial());
        let kappa = Arc::new(GroupAut::identity(group.clone()));
        MetaRep {
            group,
            kappa,
            images: vec![0; rank],
            cover_degree: cover_degree.max(1),
            free_rank: 0,
        }
    }

    pub fn group(&self) -> &Arc<FiniteAbelianGroup> {
        &self.group
    }

    pub fn kappa(&self) -> &Arc<GroupAut> {
        &self.kappa
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn cover_degree(&self) -> usize {
        self.cover_degree
    }

    /// Rank of the free part of `H_1` of the cover, discarded from `H`.
    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn with_images(&self, images: Vec<usize>) -> MetaRep {
        MetaRep {
            images,
            ..self.clone()
        }
    }

    /// `rho(w)` for a word in the `x` generators.
    pub fn eval_word(&self, w: &Word) -> usize {
        let mut acc = self.group.identity();
        for &(g, e) in w.runs() {
            match g {
                Generator::X(i) => {
                    let img = self.images[i as usize - 1];
                    acc = self.group.add(acc, self.group.scale(img, e));
                }
                Generator::Meridian => panic!("meridian has no image in H"),
            }
        }
        acc
    }
}

/// Cap on the number of candidate splittings tried when the cover homology
/// has a free part as well as torsion.
const SPLITTING_SEARCH_CAP: u128 = 1 << 20;

pub fn metabelian_rep(p: &MeridianPresentation, n: usize) -> Result<MetaRep> {
    let a = alexander_presentation(p, n)?;
    let size = a.cols();
    let snf = smith_normal_form(&a);
    let diag = snf.diagonal();

    let mut torsion: Vec<usize> = Vec::new();
    let mut free: Vec<usize> = Vec::new();
    let mut divisors: Vec<u64> = Vec::new();
    for (k, dk) in diag.iter().enumerate() {
        if dk.is_zero() {
            free.push(k);
        } else if !dk.is_one() {
            let d = dk
                .to_u64()
                .ok_or_else(|| Error::InfiniteTorsion(format!("divisor {dk} too large")))?;
            torsion.push(k);
            divisors.push(d);
        }
    }
    free.extend(diag.len()..size);
    let group = Arc::new(FiniteAbelianGroup::new(divisors.clone())?);

    // deck action on new coordinates y = x V acting on the right: K = V^-1 S V
    let v = &snf.v;
    let v_inv = unimodular_inverse(v)?;
    let mut shifted = IntMatrix::zeros(size, size);
    for i in 0..p.rank() {
        for k in 0..n {
            let src = i * n + k;
            let dst = i * n + (k + 1) % n;
            for c in 0..size {
                shifted.set(src, c, v.get(dst, c).clone());
            }
        }
    }
    let kmat = v_inv.mul(&shifted);

    let modd = |x: &BigInt, d: u64| -> i64 { x.mod_floor(&BigInt::from(d)).to_i64().expect("small") };
    for &t in &torsion {
        for &f in &free {
            if !kmat.get(t, f).is_zero() {
                return Err(Error::InfiniteTorsion(
                    "deck action moves torsion into the free part".into(),
                ));
            }
        }
    }
    // column-action matrix on exponent vectors: M = K_TT^T
    let r = torsion.len();
    let matrix: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| modd(kmat.get(torsion[j], torsion[i]), divisors[i])).collect())
        .collect();
    let kappa = Arc::new(GroupAut::new(group.clone(), matrix)?);

    let splitting = if r > 0 && !free.is_empty() {
        find_splitting(&kmat, &torsion, &free, &divisors)?
    } else {
        vec![vec![0; r]; free.len()]
    };
    let images: Vec<usize> = (0..p.rank())
        .map(|i| {
            let row = i * n;
            let exps: Vec<i64> = (0..r)
                .map(|c| {
                    let mut e = modd(v.get(row, torsion[c]), divisors[c]);
                    for (fi, &f) in free.iter().enumerate() {
                        e += modd(v.get(row, f), divisors[c]) * splitting[fi][c];
                    }
                    e
                })
                .collect();
            group.element(&exps)
        })
        .collect();

    let mut rep = MetaRep::new(group, kappa, images, n)?;
    rep.free_rank = free.len();
    validate_rep(p, &rep)?;
    Ok(rep)
}

fn unimodular_inverse(v: &IntMatrix) -> Result<IntMatrix> {
    // V is unimodular, so its SNF is I and U_v V V_v = I gives V^-1 = V_v U_v.
    let s = smith_normal_form(v);
    if s.diagonal().iter().any(|d| !d.is_one()) {
        return Err(Error::InfiniteTorsion("change of basis is not unimodular".into()));
    }
    Ok(s.v.mul(&s.u))
}

/// Finds `S` (free x torsion, mod the divisors) with
/// `K_FT + K_FF S = S K_TT` so that projecting onto torsion commutes with
/// the deck action.
fn find_splitting(
    k: &IntMatrix,
    torsion: &[usize],
    free: &[usize],
    divisors: &[u64],
) -> Result<Vec<Vec<i64>>> {
    let (fr, tr) = (free.len(), torsion.len());
    let total: u128 = divisors
        .iter()
        .map(|&d| (d as u128).pow(fr as u32))
        .try_fold(1u128, |acc, x| acc.checked_mul(x))
        .unwrap_or(u128::MAX);
    if total > SPLITTING_SEARCH_CAP {
        return Err(Error::InfiniteTorsion(
            "no equivariant torsion projection found within the search cap".into(),
        ));
    }
    let kv = |a: usize, b: usize, d: u64| -> i64 {
        k.get(a, b).mod_floor(&BigInt::from(d)).to_i64().expect("small")
    };
    // entries of S ordered column-major: column c has fr entries mod d_c
    let mut s = vec![vec![0i64; tr]; fr];
    let mut counter = vec![0u64; fr * tr];
    loop {
        for c in 0..tr {
            for f in 0..fr {
                s[f][c] = counter[c * fr + f] as i64;
            }
        }
        let ok = (0..fr).all(|f| {
            (0..tr).all(|c| {
                let d = divisors[c];
                let mut lhs = kv(free[f], torsion[c], d);
                for (g, &fg) in free.iter().enumerate() {
                    lhs += kv(free[f], fg, d) * s[g][c];
                }
                let mut rhs = 0;
                for (e, &te) in torsion.iter().enumerate() {
                    rhs += s[f][e] * kv(te, torsion[c], d);
                }
                (lhs - rhs).rem_euclid(d as i64) == 0
            })
        });
        if ok {
            return Ok(s);
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == counter.len() {
                return Err(Error::InfiniteTorsion(
                    "deck action admits no equivariant torsion projection".into(),
                ));
            }
            counter[pos] += 1;
            if counter[pos] < divisors[pos / fr] {
                break;
            }
            counter[pos] = 0;
            pos += 1;
        }
    }
}
