//! Words over the generator alphabet and the skew product they drive.
//!
//! A [`Word`] is stored first-applied-first: `(w1, ..., wn)` acts on a
//! point as `f_wn ∘ ... ∘ f_w1`.

mod orbit;
mod tree;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::rational::{Derivative, Metric, Point, RationalMap};
use crate::{Error, Result};

pub use orbit::sample_backward_orbit;
pub(crate) use orbit::orbit_with_rng;
pub use tree::{build_frontier, LevelProfile, LevelSums, PreimageNode, PreimageTree, PruningPolicy, TreeDiagnostics};

/// Finite word; symbols are 1-based generator indices.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(SmallVec<[u8; 16]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    /// Builds a word from 1-based symbols without range checks beyond `1..=255`.
    pub fn from_symbols(symbols: &[usize]) -> Result<Self> {
        symbols
            .iter()
            .map(|&s| {
                if (1..=255).contains(&s) {
                    Ok(s as u8)
                } else {
                    Err(Error::SymbolOutOfRange { symbol: s, generators: 255 })
                }
            })
            .collect::<Result<SmallVec<_>>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&s| s as usize)
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().map(|&s| s as usize)
    }

    /// Left shift `σ`.
    pub fn shift(&self) -> Word {
        Word(self.0.iter().skip(1).copied().collect())
    }

    /// `jω`: the word refining `ω` by a preimage step under `f_j`.
    pub fn prepend(&self, symbol: usize) -> Word {
        let mut v: SmallVec<[u8; 16]> = SmallVec::with_capacity(self.0.len() + 1);
        v.push(symbol as u8);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// `self` followed by `other`: `other` acts after `self`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0.iter().take(n).copied().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// An ordered tuple of at least two non-constant rational maps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiMap {
    generators: Vec<RationalMap>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMultiMap {
    generators: Vec<RationalMap>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

impl<'de> Deserialize<'de> for MultiMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMultiMap::deserialize(d)?;
        let mut m = MultiMap::new(raw.generators).map_err(serde::de::Error::custom)?;
        if let Some(labels) = raw.labels {
            m = m.with_labels(labels).map_err(serde::de::Error::custom)?;
        }
        Ok(m)
    }
}

impl MultiMap {
    pub fn new(generators: Vec<RationalMap>) -> Result<Self> {
        if generators.len() < 2 {
            return Err(Error::TooFewGenerators(generators.len()));
        }
        if generators.len() > 255 {
            return Err(Error::InvalidArgument("at most 255 generators".into()));
        }
        Ok(MultiMap { generators, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.generators.len() {
            return Err(Error::InvalidArgument("one label per generator".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn generators(&self) -> &[RationalMap] {
        &self.generators
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Number of generators `u`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `f_j` for a 1-based symbol `j`.
    pub fn generator(&self, symbol: usize) -> Result<&RationalMap> {
        symbol
            .checked_sub(1)
            .and_then(|i| self.generators.get(i))
            .ok_or(Error::SymbolOutOfRange { symbol, generators: self.len() })
    }

    /// `Σ_j deg f_j`, the branching factor of the backward tree.
    pub fn total_degree(&self) -> usize {
        self.generators.iter().map(RationalMap::degree).sum()
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        for s in w.symbols() {
            self.generator(s)?;
        }
        Ok(())
    }

    /// `f_ω(z) = f_{ω_n} ∘ ... ∘ f_{ω_1}(z)`.
    pub fn compose_apply(&self, word: &Word, z: Point) -> Result<Point> {
        word.symbols()
            .try_fold(z, |acc, s| Ok(self.generator(s)?.eval(acc)))
    }

    /// Chain-rule derivative `Π f'_{ω_k}(f_{ω|k-1}(z))`.
    pub fn word_derivative(&self, word: &Word, z: Point, metric: Metric) -> Result<Derivative> {
        let mut acc = Derivative { value: Some(Complex64::new(1.0, 0.0)), norm: 1.0 };
        let mut point = z;
        for s in word.symbols() {
            let g = self.generator(s)?;
            let d = g.derivative(point, metric)?;
            acc.norm *= d.norm;
            acc.value = match (acc.value, d.value) {
                (Some(a), Some(b)) => Some(a * b),
                _ => None,
            };
            point = g.eval(point);
        }
        Ok(acc)
    }

    /// One step of the skew product: `(ω, z) ↦ (σω, f_{ω_1}(z))`.
    pub fn skew_step(&self, word: &Word, z: Point) -> Result<(Word, Point)> {
        let first = word.first().ok_or(Error::EmptyWord)?;
        Ok((word.shift(), self.generator(first)?.eval(z)))
    }

    /// Finite critical values of every generator.
    pub fn critical_values(&self) -> Result<Vec<Complex64>> {
        let mut out = Vec::new();
        for g in &self.generators {
            out.extend(g.finite_critical_values()?);
        }
        Ok(out)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn pm2() -> MultiMap {
        MultiMap::new(vec![
            RationalMap::from_real_poly(&[2.0, 0.0, 1.0]).unwrap(),
            RationalMap::from_real_poly(&[-2.0, 0.0, 1.0]).unwrap(),
        ])
        .unwrap()
    }

    fn linear3() -> MultiMap {
        MultiMap::new(vec![
            RationalMap::from_real_poly(&[0.0, 3.0]).unwrap(),
            RationalMap::from_real_poly(&[-2.0, 3.0]).unwrap(),
        ])
        .unwrap()
    }

    fn w(s: &[usize]) -> Word {
        Word::from_symbols(s).unwrap()
    }

    #[test]
    fn compose_apply_examples() {
        let f = pm2();
        assert_eq!(f.compose_apply(&w(&[1, 2]), Point::from(0.0)).unwrap(), Point::from(2.0));
        let z = Point::from(Complex64::new(0.3, 0.1));
        assert_eq!(f.compose_apply(&Word::empty(), z).unwrap(), z);
    }

    #[test]
    fn word_derivative_examples() {
        let f = pm2();
        let d = f.word_derivative(&w(&[1, 2]), Point::from(0.0), Metric::Euclidean).unwrap();
        assert_eq!(d.norm, 0.0);
        let d1 = f.word_derivative(&w(&[1]), Point::from(1.0), Metric::Euclidean).unwrap();
        assert_eq!(d1.norm, 2.0);
        let g = linear3();
        for n in 0..6 {
            let word = w(&vec![2; n]);
            let d = g.word_derivative(&word, Point::from(0.37), Metric::Euclidean).unwrap();
            assert_eq!(d.norm, 3f64.powi(n as i32));
        }
    }

    #[test]
    fn skew_step_examples() {
        let f = pm2();
        let (rest, z) = f.skew_step(&w(&[1, 2, 1]), Point::from(0.0)).unwrap();
        assert_eq!(rest, w(&[2, 1]));
        assert_eq!(z, Point::from(2.0));
        let (rest, z) = f.skew_step(&w(&[2]), Point::from(1.0)).unwrap();
        assert!(rest.is_empty());
        assert_eq!(z, Point::from(-1.0));
        assert_eq!(f.skew_step(&Word::empty(), Point::from(1.0)), Err(Error::EmptyWord));
    }

    #[test]
    fn iterated_skew_steps_equal_compose_apply() {
        let f = pm2();
        let word = w(&[2, 1, 1, 2]);
        let z0 = Point::from(Complex64::new(0.1, 0.7));
        let (mut rest, mut z) = (word.clone(), z0);
        while !rest.is_empty() {
            (rest, z) = f.skew_step(&rest, z).unwrap();
        }
        assert_eq!(z, f.compose_apply(&word, z0).unwrap());
    }

    #[test]
    fn needs_two_generators() {
        let g = RationalMap::from_real_poly(&[0.0, 3.0]).unwrap();
        assert_eq!(MultiMap::new(vec![g]), Err(Error::TooFewGenerators(1)));
    }

    #[test]
    fn symbols_are_range_checked() {
        let f = pm2();
        assert!(f.compose_apply(&w(&[3]), Point::from(0.0)).is_err());
        assert!(Word::from_symbols(&[0]).is_err());
    }

    #[test]
    fn word_display_and_prepend() {
        assert_eq!(w(&[1, 2]).prepend(2).to_string(), "2.1.2");
        assert_eq!(Word::empty().to_string(), "");
    }

    #[test]
    fn multimap_json_round_trip() {
        let f = pm2().with_labels(vec!["a".into(), "b".into()]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: MultiMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<MultiMap>(r#"{"generators":[],"extra":1}"#).is_err());
    }
}
