//! Meridian presentations `<x1..x2g, m | m y_i m^-1 = z_i>`.

use std::fmt;

use crate::cover::MetaRep;
use crate::error::{Error, Result};
use crate::words::{Generator, Word};

pub const BUILTIN_NAMES: [&str; 3] = ["3_1", "4_1", "5_2"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeridianPresentation {
    genus: usize,
    y: Vec<Word>,
    z: Vec<Word>,
    name: Option<String>,
}

impl MeridianPresentation {
    pub fn new(genus: usize, y: Vec<Word>, z: Vec<Word>) -> Result<Self> {
        if genus == 0 {
            return Err(Error::RankMismatch("genus must be positive".into()));
        }
        let rank = 2 * genus;
        if y.len() != rank || z.len() != rank {
            return Err(Error::RankMismatch(format!(
                "expected {rank} relations, got |y| = {}, |z| = {}",
                y.len(),
                z.len()
            )));
        }
        for w in y.iter().chain(&z) {
            if w.contains_meridian() {
                return Err(Error::MeridianInWord);
            }
            w.check_rank(rank)?;
        }
        Ok(MeridianPresentation {
            genus,
            y,
            z,
            name: None,
        })
    }

    pub fn with_name(mut self, name: Option<String>) -> Self {
        self.name = name;
        self
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Number of `x` generators, `2g`.
    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    pub fn y(&self) -> &[Word] {
        &self.y
    }

    pub fn z(&self) -> &[Word] {
        &self.z
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Relator `m y_i m^-1 z_i^-1` (0-based `i`).
    pub fn relator(&self, i: usize) -> Word {
        let m = Word::gen(Generator::Meridian);
        m.multiply(&self.y[i])
            .multiply(&m.invert())
            .multiply(&self.z[i].invert())
    }
}

impl fmt::Display for MeridianPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "genus {}", self.genus)?;
        for (i, (y, z)) in self.y.iter().zip(&self.z).enumerate() {
            writeln!(f, "y{} = {} ; z{} = {}", i + 1, y, i + 1, z)?;
        }
        Ok(())
    }
}

pub fn builtin(name: &str) -> Result<MeridianPresentation> {
    let x = |i: u32, e: i64| (Generator::X(i), e);
    let w = |runs: &[(Generator, i64)]| Word::from_runs(runs.iter().copied());
    let (y, z) = match name {
        "3_1" => (
            vec![w(&[x(1, 1), x(2, -1)]), w(&[x(2, 1)])],
            vec![w(&[x(1, 1)]), w(&[x(2, 1), x(1, -1)])],
        ),
        "4_1" => (
            vec![w(&[x(1, 1), x(2, 1)]), w(&[x(2, 1), x(1, 1), x(2, 1)])],
            vec![w(&[x(1, 1)]), w(&[x(2, 1)])],
        ),
        "5_2" => (
            vec![w(&[x(1, -2)]), w(&[x(1, -1), x(2, 1)])],
            vec![w(&[x(2, 1), x(1, -2)]), w(&[x(2, 1)])],
        ),
        _ => return Err(Error::UnknownKnot(name.to_string())),
    };
    Ok(MeridianPresentation::new(1, y, z)?.with_name(Some(name.to_string())))
}

struct LineCursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl LineCursor {
    fn new(src: &str, line: usize) -> Self {
        LineCursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        self.skip_ws();
        let end = self.pos + kw.chars().count();
        if end <= self.chars.len() && self.chars[self.pos..end].iter().copied().eq(kw.chars()) {
            self.pos = end;
            Ok(())
        } else {
            Err(self.err(format!("expected '{kw}'")))
        }
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| Error::Syntax {
            line: self.line,
            column: start + 1,
            message: "integer too large".into(),
        })
    }

    fn signed(&mut self) -> Result<i64> {
        let neg = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            if self.peek() == Some('+') {
                self.pos += 1;
            }
            false
        };
        let v = self.uint()? as i64;
        Ok(if neg { -v } else { v })
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// `word := atom+ | "1"`, terminated by `;` or end of line.
    fn word(&mut self, rank: usize) -> Result<Word> {
        match self.peek() {
            Some('1') => {
                self.pos += 1;
                return Ok(Word::identity());
            }
            None | Some(';') => return Err(self.err("empty word")),
            _ => {}
        }
        let mut runs = Vec::new();
        while let Some(c) = self.peek() {
            match c {
                ';' => break,
                'm' => return Err(Error::MeridianInWord),
                'x' => {
                    self.pos += 1;
                    let i = self.uint()?;
                    if i == 0 || i as usize > rank {
                        return Err(Error::UnknownGenerator {
                            index: i.min(u32::MAX as u64) as u32,
                            rank,
                        });
                    }
                    let e = if self.peek() == Some('^') {
                        self.pos += 1;
                        self.signed()?
                    } else {
                        1
                    };
                    runs.push((Generator::X(i as u32), e));
                }
                _ => return Err(self.err(format!("unexpected character '{c}'"))),
            }
        }
        Ok(Word::from_runs(runs))
    }
}

pub fn parse_presentation(text: &str) -> Result<MeridianPresentation> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
    let Some((hline, header)) = lines.next() else {
        return Err(Error::Syntax {
            line: 1,
            column: 1,
            message: "missing genus header".into(),
        });
    };
    let mut cur = LineCursor::new(header, hline);
    cur.keyword("genus")?;
    let genus = cur.uint()? as usize;
    if !cur.at_end() {
        return Err(cur.err("trailing input after genus"));
    }
    if genus == 0 {
        return Err(Error::Syntax {
            line: hline,
            column: 7,
            message: "genus must be positive".into(),
        });
    }
    let rank = 2 * genus;
    let mut y: Vec<Option<Word>> = vec![None; rank];
    let mut z: Vec<Option<Word>> = vec![None; rank];
    for (ln, src) in lines {
        let mut cur = LineCursor::new(src, ln);
        for (side, slots) in [('y', &mut y), ('z', &mut z)] {
            if side == 'z' {
                cur.expect(';')?;
            }
            cur.expect(side)?;
            let idx = cur.uint()? as usize;
            if idx == 0 || idx > rank {
                return Err(Error::RankMismatch(format!(
                    "line {ln}: index {side}{idx} outside 1..{rank}"
                )));
            }
            cur.expect('=')?;
            let w = cur.word(rank)?;
            if slots[idx - 1].replace(w).is_some() {
                return Err(Error::RankMismatch(format!(
                    "line {ln}: {side}{idx} given twice"
                )));
            }
        }
        if !cur.at_end() {
            return Err(cur.err("trailing input"));
        }
    }
    let collect = |side: char, v: Vec<Option<Word>>| -> Result<Vec<Word>> {
        v.into_iter()
            .enumerate()
            .map(|(k, w)| {
                w.ok_or_else(|| Error::RankMismatch(format!("{side}{} missing", k + 1)))
            })
            .collect()
    };
    MeridianPresentation::new(genus, collect('y', y)?, collect('z', z)?)
}

/// Elementary Nielsen transformation of the basis `x1..x2g` (1-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NielsenMove {
    /// `x_i' = x_j`, `x_j' = x_i`
    Swap(usize, usize),
    /// `x_i' = x_i^-1`
    Invert(usize),
    /// `x_i' = x_j x_i`
    LeftMultiply(usize, usize),
    /// `x_i' = x_i x_j`
    RightMultiply(usize, usize),
}

impl NielsenMove {
    fn check(&self, rank: usize) {
        let ok = |i: usize| (1..=rank).contains(&i);
        let valid = match *self {
            NielsenMove::Invert(i) => ok(i),
            NielsenMove::Swap(i, j)
            | NielsenMove::LeftMultiply(i, j)
            | NielsenMove::RightMultiply(i, j) => ok(i) && ok(j) && i != j,
        };
        assert!(valid, "invalid Nielsen move {self:?} for rank {rank}");
    }

    /// New generators written in the old ones.
    pub fn new_in_old(&self, rank: usize) -> Vec<Word> {
        self.check(rank);
        let mut out: Vec<Word> = (1..=rank as u32).map(Word::x).collect();
        let x = |i: usize| Word::x(i as u32);
        match *self {
            NielsenMove::Swap(i, j) => out.swap(i - 1, j - 1),
            NielsenMove::Invert(i) => out[i - 1] = x(i).invert(),
            NielsenMove::LeftMultiply(i, j) => out[i - 1] = x(j).multiply(&x(i)),
            NielsenMove::RightMultiply(i, j) => out[i - 1] = x(i).multiply(&x(j)),
        }
        out
    }

    /// Old generators written in the new ones.
    pub fn old_in_new(&self, rank: usize) -> Vec<Word> {
        self.check(rank);
        let mut out: Vec<Word> = (1..=rank as u32).map(Word::x).collect();
        let x = |i: usize| Word::x(i as u32);
        match *self {
            NielsenMove::Swap(i, j) => out.swap(i - 1, j - 1),
            NielsenMove::Invert(i) => out[i - 1] = x(i).invert(),
            NielsenMove::LeftMultiply(i, j) => out[i - 1] = x(j).invert().multiply(&x(i)),
            NielsenMove::RightMultiply(i, j) => out[i - 1] = x(i).multiply(&x(j).invert()),
        }
        out
    }

    /// A sequence of moves undoing this one.
    pub fn inverse(&self) -> Vec<NielsenMove> {
        match *self {
            NielsenMove::Swap(..) | NielsenMove::Invert(_) => vec![*self],
            NielsenMove::LeftMultiply(_, j) | NielsenMove::RightMultiply(_, j) => {
                vec![NielsenMove::Invert(j), *self, NielsenMove::Invert(j)]
            }
        }
    }

    /// The representation expressed on the new basis.
    pub fn transport(&self, rep: &MetaRep) -> MetaRep {
        let images = self
            .new_in_old(rep.images().len())
            .iter()
            .map(|w| rep.eval_word(w))
            .collect();
        rep.with_images(images)
    }
}

pub fn apply_nielsen(p: &MeridianPresentation, mv: NielsenMove) -> MeridianPresentation {
    let sub = mv.old_in_new(p.rank());
    MeridianPresentation {
        genus: p.genus,
        y: p.y.iter().map(|w| w.substitute(&sub)).collect(),
        z: p.z.iter().map(|w| w.substitute(&sub)).collect(),
        name: p.name.clone(),
    }
}

/// Changes the meridian to `h m h^-1`: every `y_i`, `z_i` is conjugated by `h`.
pub fn conjugate_presentation(p: &MeridianPresentation, h: &Word) -> MeridianPresentation {
    let conj = |w: &Word| h.multiply(w).multiply(&h.invert());
    MeridianPresentation {
        genus: p.genus,
        y: p.y.iter().map(conj).collect(),
        z: p.z.iter().map(conj).collect(),
        name: p.name.clone(),
    }
}

/// Checks `kappa(rho(y_i)) = rho(z_i)` for every relation.
pub fn validate_rep(p: &MeridianPresentation, r: &MetaRep) -> Result<()> {
    if r.images().len() != p.rank() {
        return Err(Error::RankMismatch(format!(
            "presentation has {} generators, representation has {} images",
            p.rank(),
            r.images().len()
        )));
    }
    for (i, (y, z)) in p.y.iter().zip(&p.z).enumerate() {
        if r.kappa().apply(r.eval_word(y)) != r.eval_word(z) {
            return Err(Error::RepViolation { index: i + 1 });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::metabelian_rep;
    use crate::grouprings::{FiniteAbelianGroup, GroupAut};
    use std::sync::Arc;

    fn x(i: u32, e: i64) -> (Generator, i64) {
        (Generator::X(i), e)
    }

    #[test]
    fn parse_examples() {
        let p = parse_presentation("genus 1\ny1 = x1 x2^-1 ; z1 = x1\ny2 = x2 ; z2 = x2 x1^-1")
            .unwrap();
        assert_eq!(p, builtin("3_1").unwrap().with_name(None));
        let p = parse_presentation("genus 1\ny1 = x1 x2 ; z1 = x1\ny2 = x2 x1 x2 ; z2 = x2").unwrap();
        assert_eq!(p, builtin("4_1").unwrap().with_name(None));
        assert_eq!(
            parse_presentation("genus 1\ny1 = x3 ; z1 = x1\ny2 = x2 ; z2 = x2"),
            Err(Error::UnknownGenerator { index: 3, rank: 2 })
        );
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_presentation("genus 1\ny1 = x1 ; z1 = x1"),
            Err(Error::RankMismatch(_))
        ));
        assert_eq!(
            parse_presentation("genus 1\ny1 = x1 m ; z1 = x1\ny2 = x2 ; z2 = x2"),
            Err(Error::MeridianInWord)
        );
        match parse_presentation("genus 1\ny1 = x1 ; z1 = x1\ny2 = x2 ? z2 = x2") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 9)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_presentation(""), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse_presentation("genus 1\ny1 = x1 ; z1 = x1\ny1 = x2 ; z2 = x2"),
            Err(Error::RankMismatch(_))
        ));
    }

    #[test]
    fn compact_whitespace_and_comments() {
        let p = parse_presentation("# trefoil\ngenus 1\n\ny1=x1x2^-1;z1=x1\ny2=x2;z2=x2x1^-1\n").unwrap();
        assert_eq!(p, builtin("3_1").unwrap().with_name(None));
    }

    #[test]
    fn builtins_match_table() {
        let p = builtin("5_2").unwrap();
        assert_eq!(p.y()[0], Word::from_runs([x(1, -2)]));
        assert_eq!(p.y()[1], Word::from_runs([x(1, -1), x(2, 1)]));
        assert_eq!(p.z()[0], Word::from_runs([x(2, 1), x(1, -2)]));
        assert_eq!(p.z()[1], Word::x(2));
        assert_eq!(builtin("6_1"), Err(Error::UnknownKnot("6_1".into())));
    }

    #[test]
    fn serialize_round_trip() {
        for name in BUILTIN_NAMES {
            let p = builtin(name).unwrap();
            let q = parse_presentation(&p.to_string()).unwrap().with_name(p.name().map(String::from));
            assert_eq!(q, p);
        }
    }

    #[test]
    fn nielsen_examples() {
        let p = builtin("3_1").unwrap();
        let q = apply_nielsen(&p, NielsenMove::Invert(1));
        assert_eq!(q.y()[0], Word::from_runs([x(1, -1), x(2, -1)]));
        let s = apply_nielsen(&apply_nielsen(&p, NielsenMove::Swap(1, 2)), NielsenMove::Swap(1, 2));
        assert_eq!(s, p);
        let mv = NielsenMove::LeftMultiply(1, 2);
        let mut r = apply_nielsen(&p, mv);
        for m in mv.inverse() {
            r = apply_nielsen(&r, m);
        }
        assert_eq!(r, p);
        let mv = NielsenMove::RightMultiply(2, 1);
        let mut r = apply_nielsen(&p, mv);
        for m in mv.inverse() {
            r = apply_nielsen(&r, m);
        }
        assert_eq!(r, p);
    }

    #[test]
    fn conjugation_examples() {
        let p = builtin("3_1").unwrap();
        assert_eq!(conjugate_presentation(&p, &Word::identity()), p);
        let h = Word::x(1);
        let q = conjugate_presentation(&p, &h);
        assert_eq!(q.y()[0], Word::from_runs([x(1, 2), x(2, -1), x(1, -1)]));
        assert_eq!(conjugate_presentation(&q, &h.invert()), p);
    }

    #[test]
    fn validate_examples() {
        let p = builtin("4_1").unwrap();
        let rep = metabelian_rep(&p, 2).unwrap();
        assert_eq!(validate_rep(&p, &rep), Ok(()));
        assert_eq!(validate_rep(&p, &MetaRep::trivial(2, 2)), Ok(()));
        // perturb rho(x1) by each non-fixed element of Z/5 and check that
        // the first relation always fails
        for delta in 1..5usize {
            let mut images = rep.images().to_vec();
            images[0] = rep.group().add(images[0], delta);
            let bad = rep.with_images(images);
            assert_eq!(validate_rep(&p, &bad), Err(Error::RepViolation { index: 1 }));
        }
        assert!(matches!(
            validate_rep(&p, &MetaRep::trivial(4, 2)),
            Err(Error::RankMismatch(_))
        ));
    }

    #[test]
    fn nielsen_transport_keeps_rep_valid() {
        let p = builtin("4_1").unwrap();
        let rep = metabelian_rep(&p, 3).unwrap();
        for mv in [
            NielsenMove::Swap(1, 2),
            NielsenMove::Invert(2),
            NielsenMove::LeftMultiply(2, 1),
            NielsenMove::RightMultiply(1, 2),
        ] {
            assert_eq!(validate_rep(&apply_nielsen(&p, mv), &mv.transport(&rep)), Ok(()));
        }
        let g = Arc::new(FiniteAbelianGroup::cyclic(5).unwrap());
        let k = Arc::new(GroupAut::new(g.clone(), vec![vec![-1]]).unwrap());
        let r = MetaRep::new(g, k, vec![1, 2], 2).unwrap();
        assert!(validate_rep(&p, &r).is_err());
    }
}
