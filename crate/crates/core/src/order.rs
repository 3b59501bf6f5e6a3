//! Finite binary relations.
//!
//! A [`Relation`] is a set of ordered pairs over an ordered universe. The
//! universe order is the canonical order for every iteration, so all outputs
//! are reproducible. Membership is kept in a dense bit matrix; universes here
//! stay small (a few hundred items at most).

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a consequence (an element of the set being ordered).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ElementId(String);

impl ElementId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidInput("element id must be non-empty".into()));
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ElementId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        ElementId::new(value)
    }
}

impl TryFrom<&str> for ElementId {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        ElementId::new(value)
    }
}

impl From<ElementId> for String {
    fn from(value: ElementId) -> Self {
        value.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Square boolean matrix with row-major `u64` words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// `row(dst) |= row(src)`; returns whether anything changed.
    fn or_row_into(&mut self, src: usize, dst: usize) -> bool {
        let mut changed = false;
        for w in 0..self.words {
            let s = self.bits[src * self.words + w];
            let d = &mut self.bits[dst * self.words + w];
            let merged = *d | s;
            changed |= merged != *d;
            *d = merged;
        }
        changed
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Reflexive-transitive closure (Warshall over bit rows).
    pub fn closure(&self) -> BitMatrix {
        let mut m = self.clone();
        for i in 0..m.n {
            m.set(i, i, true);
        }
        for k in 0..m.n {
            for i in 0..m.n {
                if i != k && m.get(i, k) {
                    m.or_row_into(k, i);
                }
            }
        }
        m
    }

    /// True if some `c` outside `{i, j}` satisfies `(i, c)` and `(c, j)`.
    fn has_intermediate(&self, i: usize, j: usize, excluded: &[u64]) -> bool {
        // candidates: row(i) minus excluded, tested against column j
        let ri = self.row(i);
        for w in 0..self.words {
            let mut cand = ri[w] & !excluded[w];
            while cand != 0 {
                let b = cand.trailing_zeros() as usize;
                let c = w * 64 + b;
                if c != i && c != j && self.get(c, j) {
                    return true;
                }
                cand &= cand - 1;
            }
        }
        false
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    list.entry(&(i, j));
                }
            }
        }
        list.finish()
    }
}

/// A binary relation over an ordered universe of items.
#[derive(Clone, Debug)]
pub struct Relation<T = ElementId> {
    universe: Vec<T>,
    index: HashMap<T, usize>,
    matrix: BitMatrix,
}

impl<T: Clone + Eq + Hash> PartialEq for Relation<T> {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.matrix == other.matrix
    }
}

impl<T: Clone + Eq + Hash + fmt::Debug> Relation<T> {
    /// Empty relation over `universe`. Duplicate universe items are rejected.
    pub fn empty(universe: Vec<T>) -> Result<Self> {
        let mut index = HashMap::with_capacity(universe.len());
        for (i, item) in universe.iter().enumerate() {
            if index.insert(item.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate universe item {item:?}"
                )));
            }
        }
        let matrix = BitMatrix::new(universe.len());
        Ok(Self {
            universe,
            index,
            matrix,
        })
    }

    pub fn from_pairs<'a, I>(universe: Vec<T>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a T, &'a T)>,
        T: 'a,
    {
        let mut rel = Self::empty(universe)?;
        for (a, b) in pairs {
            rel.insert(a, b)?;
        }
        Ok(rel)
    }

    pub(crate) fn from_matrix(universe: Vec<T>, matrix: BitMatrix) -> Result<Self> {
        assert_eq!(universe.len(), matrix.size());
        let mut rel = Self::empty(universe)?;
        rel.matrix = matrix;
        Ok(rel)
    }

    pub fn insert(&mut self, a: &T, b: &T) -> Result<()> {
        let i = self.position(a)?;
        let j = self.position(b)?;
        self.matrix.set(i, j, true);
        Ok(())
    }

    pub fn insert_index(&mut self, i: usize, j: usize) {
        self.matrix.set(i, j, true);
    }

    pub fn position(&self, item: &T) -> Result<usize> {
        self.index
            .get(item)
            .copied()
            .ok_or_else(|| Error::UnknownElement(format!("{item:?}")))
    }

    pub fn index_of(&self, item: &T) -> Option<usize> {
        self.index.get(item).copied()
    }

    pub fn universe(&self) -> &[T] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.matrix.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn contains(&self, a: &T, b: &T) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.matrix.get(i, j),
            _ => false,
        }
    }

    #[inline]
    pub fn contains_index(&self, i: usize, j: usize) -> bool {
        self.matrix.get(i, j)
    }

    /// Index pairs in canonical (row-major universe) order.
    pub fn index_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.universe.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.matrix.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn pairs(&self) -> Vec<(T, T)> {
        self.index_pairs()
            .into_iter()
            .map(|(i, j)| (self.universe[i].clone(), self.universe[j].clone()))
            .collect()
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.universe.len()).all(|i| self.matrix.get(i, i))
    }

    pub fn is_transitive(&self) -> bool {
        self.matrix.closure() == self.with_diagonal().matrix
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.universe.len();
        (0..n).all(|i| (i + 1..n).all(|j| !(self.matrix.get(i, j) && self.matrix.get(j, i))))
    }

    pub fn is_partial_order(&self) -> bool {
        self.is_preorder() && self.is_antisymmetric()
    }

    fn with_diagonal(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.universe.len() {
            out.matrix.set(i, i, true);
        }
        out
    }

    /// Smallest reflexive and transitive superset.
    pub fn reflexive_transitive_closure(&self) -> Self {
        Self {
            universe: self.universe.clone(),
            index: self.index.clone(),
            matrix: self.matrix.closure(),
        }
    }

    /// Splits a preorder into its strict part and its indifference part.
    pub fn strict_and_indifference_parts(&self) -> Result<(Self, Self)> {
        if !self.is_preorder() {
            return Err(Error::NotPreorder);
        }
        let n = self.universe.len();
        let mut strict = BitMatrix::new(n);
        let mut indiff = BitMatrix::new(n);
        for i in 0..n {
            for j in 0..n {
                if self.matrix.get(i, j) {
                    if self.matrix.get(j, i) {
                        indiff.set(i, j, true);
                    } else {
                        strict.set(i, j, true);
                    }
                }
            }
        }
        Ok((
            Self::from_matrix(self.universe.clone(), strict)?,
            Self::from_matrix(self.universe.clone(), indiff)?,
        ))
    }

    /// Covering pairs of a partial order.
    pub fn hasse_edges(&self) -> Result<Vec<(T, T)>> {
        if !self.is_antisymmetric() {
            return Err(Error::NotPartialOrder);
        }
        Ok(covering_pairs(&self.matrix, None)
            .into_iter()
            .map(|(i, j)| (self.universe[i].clone(), self.universe[j].clone()))
            .collect())
    }
}

/// Covering pairs `(i, j)`, `i != j`, of the relation in `m`: no `c` outside
/// `{i, j}` has `(i, c)` and `(c, j)`. If `skip` is given, items marked there
/// are never used as intermediates nor as endpoints.
pub(crate) fn covering_pairs(m: &BitMatrix, skip: Option<&[bool]>) -> Vec<(usize, usize)> {
    let n = m.size();
    let words = n.div_ceil(64).max(1);
    let mut excluded = vec![0u64; words];
    if let Some(skip) = skip {
        for (i, &s) in skip.iter().enumerate() {
            if s {
                excluded[i / 64] |= 1 << (i % 64);
            }
        }
    }
    let skipped = |i: usize| skip.is_some_and(|s| s[i]);
    let mut out = Vec::new();
    for i in 0..n {
        if skipped(i) {
            continue;
        }
        for j in 0..n {
            if i == j || skipped(j) || !m.get(i, j) {
                continue;
            }
            if !m.has_intermediate(i, j, &excluded) {
                out.push((i, j));
            }
        }
    }
    out
}
