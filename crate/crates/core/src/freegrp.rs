//! Words in a free group of rank `k`, free and cyclic reduction, canonical
//! conjugacy-class keys and graded enumeration of classes.
//!
//! Letters are ordered `g₁ < g₁⁻¹ < g₂ < g₂⁻¹ < …`. Words print over the
//! alphabet `a, A, b, B, …` with uppercase for inverses.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn gen(generator: usize) -> Self {
        Self {
            generator,
            inverse: false,
        }
    }

    pub fn inv(generator: usize) -> Self {
        Self {
            generator,
            inverse: true,
        }
    }

    pub fn inverted(self) -> Self {
        Self {
            inverse: !self.inverse,
            ..self
        }
    }

    /// Position in the order `g₁ < g₁⁻¹ < g₂ < …`.
    pub fn key(self) -> usize {
        2 * self.generator + usize::from(self.inverse)
    }

    pub fn from_key(key: usize) -> Self {
        Self {
            generator: key / 2,
            inverse: key % 2 == 1,
        }
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.generator as u8) as char;
        if self.inverse {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

/// Free reduction by a single left-to-right stack pass.
pub fn reduce(letters: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverted()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index used plus one.
    pub fn rank_needed(&self) -> usize {
        self.0.iter().map(|l| l.generator + 1).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverted()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        reduce(&v)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        reduce(&v)
    }

    /// `v w v⁻¹`.
    pub fn conjugate_by(&self, v: &Word) -> Word {
        v.concat(self).concat(&v.inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(f), Some(l)) => self.0.len() == 1 || *f != l.inverted(),
            _ => true,
        }
    }

    /// Strips inverse pairs from the two ends.
    pub fn cyclically_reduce(&self) -> Word {
        let s = &self.0;
        let (mut i, mut j) = (0, s.len());
        while j - i >= 2 && s[i] == s[j - 1].inverted() {
            i += 1;
            j -= 1;
        }
        Word(s[i..j].to_vec())
    }

    /// Rotation starting at letter `start`.
    pub fn rotation(&self, start: usize) -> Word {
        let mut v = self.0[start..].to_vec();
        v.extend_from_slice(&self.0[..start]);
        Word(v)
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        reduce(&letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let letters = s
            .chars()
            .map(|c| {
                if c.is_ascii_lowercase() {
                    Ok(Letter::gen((c as u8 - b'a') as usize))
                } else if c.is_ascii_uppercase() {
                    Ok(Letter::inv((c as u8 - b'A') as usize))
                } else {
                    Err(Error::InvalidArgument(format!(
                        "bad letter {c:?} in word {s:?}"
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(reduce(&letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A conjugacy class of nontrivial elements, keyed by its lexicographically
/// least cyclically reduced representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConjClass(Word);

impl ConjClass {
    pub fn rep(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> ConjClass {
        conj_class(&self.0.inverse()).expect("inverse of a nontrivial class is nontrivial")
    }

    /// Ordering used by enumeration: by length, then lexicographically.
    pub fn graded_cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn conj_class(w: &Word) -> Result<ConjClass> {
    let core = w.cyclically_reduce();
    if core.is_empty() {
        return Err(Error::EmptyWord);
    }
    let best = (1..core.len())
        .map(|i| core.rotation(i))
        .fold(
            core.clone(),
            |best, rot| if rot < best { rot } else { best },
        );
    Ok(ConjClass(best))
}

fn is_least_rotation(s: &[usize]) -> bool {
    let n = s.len();
    (1..n).all(|i| {
        for k in 0..n {
            let (x, y) = (s[(i + k) % n], s[k]);
            if x != y {
                return x > y;
            }
        }
        true
    })
}

/// All conjugacy classes of cyclically reduced length `1..=max_len` in the
/// free group of rank `rank`, sorted by length and then lexicographically.
/// A class and its inverse are listed separately.
pub fn enumerate_classes(rank: usize, max_len: usize) -> Vec<ConjClass> {
    let mut out = Vec::new();
    let alphabet = 2 * rank;
    let mut buf = Vec::with_capacity(max_len);
    for n in 1..=max_len {
        for first in 0..alphabet {
            buf.clear();
            buf.push(first);
            extend_necklaces(&mut buf, n, alphabet, &mut out);
        }
    }
    out
}

fn extend_necklaces(buf: &mut Vec<usize>, n: usize, alphabet: usize, out: &mut Vec<ConjClass>) {
    if buf.len() == n {
        let (first, last) = (buf[0], buf[n - 1]);
        if (n == 1 || first != last ^ 1) && is_least_rotation(buf) {
            out.push(ConjClass(Word(
                buf.iter().map(|&k| Letter::from_key(k)).collect(),
            )));
        }
        return;
    }
    let prev = *buf.last().expect("nonempty");
    // a least rotation starts with its smallest letter
    for next in buf[0]..alphabet {
        if next == prev ^ 1 {
            continue;
        }
        buf.push(next);
        extend_necklaces(buf, n, alphabet, out);
        buf.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert!(reduce(&[Letter::gen(0), Letter::inv(0)]).is_empty());
        let r = reduce(&[
            Letter::gen(0),
            Letter::gen(1),
            Letter::inv(1),
            Letter::gen(0),
        ]);
        assert_eq!(r.to_string(), "aa");
        assert_eq!(w("abBAc").to_string(), "c");
    }

    #[test]
    fn class_examples() {
        assert_eq!(conj_class(&w("abA")).unwrap().to_string(), "b");
        assert_eq!(conj_class(&w("ba")).unwrap().to_string(), "ab");
        assert_eq!(conj_class(&w("")).unwrap_err(), Error::EmptyWord);
        assert_eq!(conj_class(&w("aA")).unwrap_err(), Error::EmptyWord);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("a1".parse::<Word>().is_err());
    }

    #[test]
    fn length_one_classes() {
        let c: Vec<String> = enumerate_classes(2, 1)
            .iter()
            .map(|c| c.to_string())
            .collect();
        assert_eq!(c, vec!["a", "A", "b", "B"]);
    }

    #[test]
    fn length_two_classes_rank_two() {
        let c: Vec<String> = enumerate_classes(2, 2)
            .iter()
            .map(|c| c.to_string())
            .collect();
        assert_eq!(
            c,
            vec!["a", "A", "b", "B", "aa", "ab", "aB", "AA", "Ab", "AB", "bb", "BB"]
        );
    }

    #[test]
    fn inverse_class() {
        let c = conj_class(&w("aab")).unwrap();
        assert_eq!(c.inverse().to_string(), "AAB");
    }

    #[test]
    fn cyclic_reduction_keeps_single_letter() {
        assert_eq!(w("a").cyclically_reduce().to_string(), "a");
        assert_eq!(w("abaA").to_string(), "ab");
        assert_eq!(w("abcA").cyclically_reduce().to_string(), "bc");
    }
}
