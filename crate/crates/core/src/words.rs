//! Free group words and the Fox free differential calculus.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A free generator: `x_i` (1-based) or the meridian `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    X(u32),
    Meridian,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::X(i) => write!(f, "x{i}"),
            Generator::Meridian => write!(f, "m"),
        }
    }
}

/// Freely reduced word, stored as runs `(generator, nonzero exponent)` with
/// no two adjacent runs on the same generator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    runs: Vec<(Generator, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word { runs: Vec::new() }
    }

    pub fn gen(g: Generator) -> Self {
        Word { runs: vec![(g, 1)] }
    }

    pub fn x(i: u32) -> Self {
        Word::gen(Generator::X(i))
    }

    pub fn power(g: Generator, e: i64) -> Self {
        Word::from_runs([(g, e)])
    }

    /// Freely reduces an arbitrary sequence of (generator, exponent) pairs.
    pub fn from_runs<I: IntoIterator<Item = (Generator, i64)>>(letters: I) -> Self {
        let mut runs: Vec<(Generator, i64)> = Vec::new();
        for (g, e) in letters {
            if e == 0 {
                continue;
            }
            match runs.last_mut() {
                Some((h, f)) if *h == g => {
                    *f += e;
                    if *f == 0 {
                        runs.pop();
                    }
                }
                _ => runs.push((g, e)),
            }
        }
        Word { runs }
    }

    pub fn runs(&self) -> &[(Generator, i64)] {
        &self.runs
    }

    /// Letters with exponent +-1, in order.
    pub fn letters(&self) -> impl Iterator<Item = (Generator, i64)> + '_ {
        self.runs
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    pub fn len(&self) -> usize {
        self.runs.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        Word::from_runs(self.runs.iter().chain(other.runs.iter()).copied())
    }

    pub fn invert(&self) -> Word {
        Word {
            runs: self.runs.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn contains_meridian(&self) -> bool {
        self.runs.iter().any(|(g, _)| *g == Generator::Meridian)
    }

    /// Exponent sum of one generator.
    pub fn exponent_sum(&self, g: Generator) -> i64 {
        self.runs.iter().filter(|(h, _)| *h == g).map(|(_, e)| e).sum()
    }

    /// Checks that every `x_i` satisfies `1 <= i <= rank`.
    pub fn check_rank(&self, rank: usize) -> Result<()> {
        for &(g, _) in &self.runs {
            if let Generator::X(i) = g {
                if i == 0 || i as usize > rank {
                    return Err(Error::UnknownGenerator { index: i, rank });
                }
            }
        }
        Ok(())
    }

    /// Replaces `x_i` by `images[i - 1]`; the meridian is kept.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::identity();
        for &(g, e) in &self.runs {
            let piece = match g {
                Generator::X(i) => images[i as usize - 1].clone(),
                Generator::Meridian => Word::gen(g),
            };
            let piece = if e < 0 { piece.invert() } else { piece };
            for _ in 0..e.unsigned_abs() {
                out = out.multiply(&piece);
            }
        }
        out
    }
}

/// Reduces a raw letter sequence, rejecting generators beyond `rank`.
pub fn reduce(letters: &[(Generator, i64)], rank: usize) -> Result<Word> {
    let w = Word::from_runs(letters.iter().copied());
    for &(g, _) in letters {
        if let Generator::X(i) = g {
            if i == 0 || i as usize > rank {
                return Err(Error::UnknownGenerator { index: i, rank });
            }
        }
    }
    Ok(w)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "1");
        }
        for (k, (g, e)) in self.runs.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Element of the integral group ring of the free group.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeRingElem {
    terms: BTreeMap<Word, i64>,
}

impl FreeRingElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        Self::monomial(1, w)
    }

    pub fn monomial(c: i64, w: Word) -> Self {
        let mut out = Self::zero();
        out.add_term(c, w);
        out
    }

    pub fn add_term(&mut self, c: i64, w: Word) {
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, c)| (w, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn substitute(&self, images: &[Word]) -> FreeRingElem {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            out.add_term(c, w.substitute(images));
        }
        out
    }

    /// Left multiplication by a word.
    pub fn word_mul(&self, w: &Word) -> FreeRingElem {
        let mut out = Self::zero();
        for (v, c) in self.terms() {
            out.add_term(c, w.multiply(v));
        }
        out
    }

    /// Image under the map sending each word to an element of some ring.
    pub fn map_sum<T, F>(&self, zero: T, mut f: F) -> T
    where
        T: Add<Output = T>,
        F: FnMut(&Word, i64) -> T,
    {
        self.terms().fold(zero, |acc, (w, c)| acc + f(w, c))
    }
}

impl Add for &FreeRingElem {
    type Output = FreeRingElem;
    fn add(self, rhs: &FreeRingElem) -> FreeRingElem {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(c, w.clone());
        }
        out
    }
}

impl Neg for &FreeRingElem {
    type Output = FreeRingElem;
    fn neg(self) -> FreeRingElem {
        FreeRingElem {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

impl Sub for &FreeRingElem {
    type Output = FreeRingElem;
    fn sub(self, rhs: &FreeRingElem) -> FreeRingElem {
        self + &(-rhs)
    }
}

impl Mul for &FreeRingElem {
    type Output = FreeRingElem;
    fn mul(self, rhs: &FreeRingElem) -> FreeRingElem {
        let mut out = FreeRingElem::zero();
        for (a, c) in self.terms() {
            for (b, d) in rhs.terms() {
                out.add_term(c * d, a.multiply(b));
            }
        }
        out
    }
}

impl fmt::Display for FreeRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if k == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if a != 1 {
                write!(f, "{a}")?;
                if !w.is_identity() {
                    write!(f, " {w}")?;
                }
            } else {
                write!(f, "{w}")?;
            }
        }
        Ok(())
    }
}

/// Fox derivative `d w / d g`, left convention:
/// `d(hk) = dh + h dk`, `d(g^-1)/dg = -g^-1`.
pub fn fox_derivative(w: &Word, g: Generator) -> FreeRingElem {
    let mut out = FreeRingElem::zero();
    let mut prefix = Word::identity();
    for (h, e) in w.letters() {
        let letter = Word::power(h, e);
        if h == g {
            if e > 0 {
                out.add_term(1, prefix.clone());
            } else {
                out.add_term(-1, prefix.multiply(&letter));
            }
        }
        prefix = prefix.multiply(&letter);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(i: u32) -> Generator {
        Generator::X(i)
    }

    fn w(runs: &[(u32, i64)]) -> Word {
        Word::from_runs(runs.iter().map(|&(i, e)| (x(i), e)))
    }

    #[test]
    fn reduce_examples() {
        assert!(reduce(&[(x(1), 1), (x(1), -1)], 2).unwrap().is_identity());
        assert_eq!(
            reduce(&[(x(1), 1), (x(2), 1), (x(2), -1), (x(2), 1)], 2).unwrap(),
            w(&[(1, 1), (2, 1)])
        );
        assert_eq!(reduce(&[(x(1), -1), (x(1), 1), (x(1), 1)], 2).unwrap(), w(&[(1, 1)]));
        assert_eq!(
            reduce(&[(x(3), 1)], 2),
            Err(Error::UnknownGenerator { index: 3, rank: 2 })
        );
    }

    #[test]
    fn multiply_and_invert() {
        let a = w(&[(1, 1), (2, 1)]);
        let b = w(&[(2, -1), (3, 1)]);
        assert_eq!(a.multiply(&b), w(&[(1, 1), (3, 1)]));
        assert!(a.multiply(&a.invert()).is_identity());
        assert_eq!(Word::identity().multiply(&a), a);
        assert_eq!(a.invert(), w(&[(2, -1), (1, -1)]));
        assert_eq!(Word::identity().invert(), Word::identity());
        assert_eq!(w(&[(1, -1)]).invert(), w(&[(1, 1)]));
    }

    #[test]
    fn fox_examples() {
        assert_eq!(fox_derivative(&w(&[(1, 1)]), x(1)), FreeRingElem::one());
        assert_eq!(
            fox_derivative(&w(&[(1, 1), (2, 1)]), x(2)),
            FreeRingElem::from_word(w(&[(1, 1)]))
        );
        assert_eq!(
            fox_derivative(&w(&[(1, -1)]), x(1)),
            FreeRingElem::monomial(-1, w(&[(1, -1)]))
        );
        let rel = Word::gen(Generator::Meridian).multiply(&w(&[(1, 1)]));
        assert_eq!(fox_derivative(&rel, Generator::Meridian), FreeRingElem::one());
    }

    #[test]
    fn display() {
        assert_eq!(w(&[(1, 1), (2, -1)]).to_string(), "x1 x2^-1");
        assert_eq!(Word::identity().to_string(), "1");
        let e = &FreeRingElem::one() - &FreeRingElem::monomial(2, w(&[(1, 1)]));
        assert_eq!(e.to_string(), "1 - 2 x1");
    }

    fn arb_word(rank: u32, max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((1..=rank, prop::bool::ANY), 0..=max_len).prop_map(|v| {
            Word::from_runs(v.into_iter().map(|(i, s)| (Generator::X(i), if s { 1 } else { -1 })))
        })
    }

    fn fundamental_lhs(word: &Word, rank: u32) -> FreeRingElem {
        let mut acc = FreeRingElem::zero();
        for i in 1..=rank {
            let xi = &FreeRingElem::from_word(Word::x(i)) - &FreeRingElem::one();
            acc = &acc + &(&fox_derivative(word, x(i)) * &xi);
        }
        acc
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn fox_fundamental_identity(word in arb_word(4, 30)) {
            let rhs = &FreeRingElem::from_word(word.clone()) - &FreeRingElem::one();
            prop_assert_eq!(fundamental_lhs(&word, 4), rhs);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn reduce_is_idempotent(word in arb_word(3, 30)) {
            prop_assert_eq!(Word::from_runs(word.runs().iter().copied()), word.clone());
            prop_assert!(word.multiply(&word.invert()).is_identity());
        }

        #[test]
        fn fox_product_rule(h in arb_word(3, 15), k in arb_word(3, 15), i in 1u32..=3) {
            let lhs = fox_derivative(&h.multiply(&k), x(i));
            let rhs = &fox_derivative(&h, x(i)) + &fox_derivative(&k, x(i)).word_mul(&h);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn fox_chain_rule(
            y in arb_word(3, 10),
            subs in prop::collection::vec(arb_word(3, 5), 3),
            i in 1u32..=3,
        ) {
            let lhs = fox_derivative(&y.substitute(&subs), x(i));
            let mut rhs = FreeRingElem::zero();
            for k in 1..=3u32 {
                let outer = fox_derivative(&y, x(k)).substitute(&subs);
                let inner = fox_derivative(&subs[k as usize - 1], x(i));
                rhs = &rhs + &(&outer * &inner);
            }
            prop_assert_eq!(lhs, rhs);
        }
    }
}
