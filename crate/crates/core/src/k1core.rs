//! The Fox matrix over the Novikov ring and its reduction to a diagonal.

use std::fmt;
use std::sync::Arc;

use crate::cover::MetaRep;
use crate::error::{Error, Result};
use crate::grouprings::GroupAlgebraElem;
use crate::novikov::{ns_log, witt_normalize, LogClass, NovikovRing, NovikovSeries, WittVector};
use crate::presentation::{validate_rep, MeridianPresentation};
use crate::upsilon::{det_commutative, is_unit_laurent, upsilon_matrix};
use crate::words::{fox_derivative, FreeRingElem, Generator};

/// Square matrix of series over one Novikov ring.
#[derive(Debug, Clone)]
pub struct NovikovMatrix {
    ring: Arc<NovikovRing>,
    n: usize,
    entries: Vec<NovikovSeries>,
    genus: usize,
}

impl NovikovMatrix {
    /// Builds from rows; the `tau^-g` normalization uses `g = n / 2`.
    pub fn from_rows(ring: &Arc<NovikovRing>, rows: Vec<Vec<NovikovSeries>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::RankMismatch("matrix must be square".into()));
        }
        let entries: Vec<NovikovSeries> = rows.into_iter().flatten().collect();
        for e in &entries {
            if !Arc::ptr_eq(e.ring(), ring) && e.ring().kappa() != ring.kappa() {
                return Err(Error::KappaMismatch);
            }
        }
        Ok(NovikovMatrix {
            ring: ring.clone(),
            n,
            entries,
            genus: n / 2,
        })
    }

    pub fn identity(ring: &Arc<NovikovRing>, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            NovikovSeries::one(ring)
                        } else {
                            NovikovSeries::zero(ring)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(ring, rows).expect("square")
    }

    pub fn ring(&self) -> &Arc<NovikovRing> {
        &self.ring
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn get(&self, i: usize, j: usize) -> &NovikovSeries {
        &self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: NovikovSeries) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(NovikovSeries::is_exact)
    }

    pub fn mul(&self, other: &NovikovMatrix) -> NovikovMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(NovikovSeries::zero(&self.ring), |acc, k| {
                            &acc + &(self.get(i, k) * other.get(k, j))
                        })
                    })
                    .collect()
            })
            .collect();
        let mut out = Self::from_rows(&self.ring, rows).expect("square");
        out.genus = self.genus;
        out
    }
}

impl fmt::Display for NovikovMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn rho(r: &MetaRep, e: &FreeRingElem) -> GroupAlgebraElem {
    let g = r.group();
    let mut out = GroupAlgebraElem::zero(g);
    for (w, c) in e.terms() {
        out.add_term(r.eval_word(w), num_rational::BigRational::from_integer(c.into()));
    }
    out
}

/// Row `j` (relator), column `i` (generator): `tau rho(dy_j/dx_i) - rho(dz_j/dx_i)`.
pub fn build_fox_matrix(p: &MeridianPresentation, r: &MetaRep, precision: usize) -> Result<NovikovMatrix> {
    validate_rep(p, r)?;
    let ring = NovikovRing::new(r.kappa().clone(), precision);
    let tau = NovikovSeries::tau_pow(&ring, 1);
    let rank = p.rank();
    let rows = (0..rank)
        .map(|j| {
            (0..rank)
                .map(|i| {
                    let g = Generator::X(i as u32 + 1);
                    let dy = rho(r, &fox_derivative(&p.y()[j], g));
                    let dz = rho(r, &fox_derivative(&p.z()[j], g));
                    let a = &tau * &NovikovSeries::monomial(&ring, dy, 0);
                    &a - &NovikovSeries::monomial(&ring, dz, 0)
                })
                .collect()
        })
        .collect();
    let mut m = NovikovMatrix::from_rows(&ring, rows)?;
    m.genus = p.genus();
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invertibility {
    Yes,
    No,
    Indeterminate,
}

impl Invertibility {
    pub fn as_str(&self) -> &'static str {
        match self {
            Invertibility::Yes => "invertible",
            Invertibility::No => "not-invertible",
            Invertibility::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Invertibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One pivot choice during elimination.
#[derive(Debug, Clone)]
pub struct PivotStep {
    pub stage: usize,
    /// Position of the pivot in the original numbering of rows and columns.
    pub row: usize,
    pub col: usize,
    pub degree: i64,
    pub leading: GroupAlgebraElem,
    /// True when the pivot is an exact unit monomial, inverted exactly.
    pub exact_inverse: bool,
}

#[derive(Debug, Clone)]
pub struct K1Report {
    pub invertible: Invertibility,
    pub diagonal: Vec<NovikovSeries>,
    /// `sign * tau^-g * (product of pivots)`, present when every pivot was found.
    pub delta: Option<NovikovSeries>,
    /// Sign of the row and column permutation.
    pub sign: i32,
    pub genus: usize,
    /// Leading coefficient and valuation split off by Witt normalization.
    pub unit_part: Option<(GroupAlgebraElem, i64)>,
    pub witt: Option<WittVector>,
    pub logs: Option<LogClass>,
    pub pivot_trace: Vec<PivotStep>,
}

/// Gaussian elimination over the Novikov ring.
///
/// At each stage the pivot is the entry of the trailing block with the
/// smallest leading degree among those whose leading coefficient is a unit;
/// ties prefer exact unit monomials, then row-major position. When no pivot
/// exists the verdict is `No` if `det Upsilon` of the (exact) input is not a
/// unit, else `Indeterminate`.
pub fn eliminate(mx: &NovikovMatrix) -> K1Report {
    let ring = mx.ring().clone();
    let n = mx.size();
    let mut a = mx.clone();
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut sign = 1i32;
    let mut diagonal = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);

    for k in 0..n {
        let mut best: Option<(i64, bool, usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                let e = a.get(i, j);
                let Some(lead) = e.leading() else { continue };
                if !lead.is_unit() {
                    continue;
                }
                let deg = e.valuation().expect("nonzero");
                let monomial = e.is_exact() && e.terms().count() == 1;
                let better = match best {
                    None => true,
                    Some((bd, bm, _, _)) => deg < bd || (deg == bd && monomial && !bm),
                };
                if better {
                    best = Some((deg, monomial, i, j));
                }
            }
        }
        let Some((deg, monomial, pi, pj)) = best else {
            let verdict = singular_verdict(mx);
            return K1Report {
                invertible: verdict,
                diagonal,
                delta: None,
                sign,
                genus: mx.genus(),
                unit_part: None,
                witt: None,
                logs: None,
                pivot_trace: trace,
            };
        };
        if pi != k {
            for j in 0..n {
                a.entries.swap(pi * n + j, k * n + j);
            }
            rows.swap(pi, k);
            sign = -sign;
        }
        if pj != k {
            for i in 0..n {
                a.entries.swap(i * n + pj, i * n + k);
            }
            cols.swap(pj, k);
            sign = -sign;
        }
        let pivot = a.get(k, k).clone();
        trace.push(PivotStep {
            stage: k,
            row: rows[k],
            col: cols[k],
            degree: deg,
            leading: pivot.leading().expect("nonzero").clone(),
            exact_inverse: monomial,
        });
        let inv = pivot.invert().expect("leading coefficient is a unit");
        for i in k + 1..n {
            if a.get(i, k).is_zero() && a.get(i, k).is_exact() {
                continue;
            }
            let factor = a.get(i, k) * &inv;
            for j in k + 1..n {
                let v = a.get(i, j) - &(&factor * a.get(k, j));
                a.set(i, j, v);
            }
            a.set(i, k, NovikovSeries::zero(&ring));
        }
        for j in k + 1..n {
            a.set(k, j, NovikovSeries::zero(&ring));
        }
        diagonal.push(pivot);
    }

    let mut delta = NovikovSeries::tau_pow(&ring, -(mx.genus() as i64));
    if sign < 0 {
        delta = -&delta;
    }
    for p in &diagonal {
        delta = &delta * p;
    }
    K1Report {
        invertible: Invertibility::Yes,
        diagonal,
        delta: Some(delta),
        sign,
        genus: mx.genus(),
        unit_part: None,
        witt: None,
        logs: None,
        pivot_trace: trace,
    }
}

fn singular_verdict(mx: &NovikovMatrix) -> Invertibility {
    if !mx.is_exact() {
        return Invertibility::Indeterminate;
    }
    let n = mx.ring().kappa_order();
    match upsilon_matrix(mx, n) {
        Ok(u) if !is_unit_laurent(&det_commutative(&u)) => Invertibility::No,
        _ => Invertibility::Indeterminate,
    }
}

/// Elimination plus Witt normalization and logarithms of the result.
pub fn k1_invariant(p: &MeridianPresentation, r: &MetaRep, precision: usize) -> Result<K1Report> {
    let m = build_fox_matrix(p, r, precision)?;
    let mut report = eliminate(&m);
    if let Some(delta) = &report.delta {
        let (u, e, w) = witt_normalize(delta)?;
        report.logs = Some(ns_log(&w));
        report.unit_part = Some((u, e));
        report.witt = Some(w);
    }
    Ok(report)
}

/// Invertibility of the Fox matrix for one representation.
#[derive(Debug, Clone)]
pub struct FiberVerdict {
    pub cover_degree: usize,
    pub invertible: Invertibility,
}

impl FiberVerdict {
    /// Reading of a list of verdicts: a single non-invertible matrix
    /// certifies that the knot is not fibered; nothing certifies the converse.
    pub fn summary(verdicts: &[FiberVerdict]) -> &'static str {
        if verdicts.iter().any(|v| v.invertible == Invertibility::No) {
            "non-fibered certified"
        } else {
            "no obstruction found"
        }
    }

    pub fn label(&self) -> &'static str {
        match self.invertible {
            Invertibility::Yes => "consistent-with-fibered",
            Invertibility::No => "non-fibered certified",
            Invertibility::Indeterminate => "indeterminate",
        }
    }
}

pub fn fibered_obstruction(
    p: &MeridianPresentation,
    reps: &[MetaRep],
    precision: usize,
) -> Result<Vec<FiberVerdict>> {
    reps.iter()
        .map(|r| {
            let m = build_fox_matrix(p, r, precision)?;
            Ok(FiberVerdict {
                cover_degree: r.cover_degree(),
                invertible: eliminate(&m).invertible,
            })
        })
        .collect()
}
