//! Similarity constructs: Jaccard over baskets, `1 - normalized Euclidean
//! distance` over profiles, and cosine / Pearson over explicit ratings.
//!
//! All actor-by-actor matrices use packed upper-triangle storage, so symmetry
//! holds by construction. Builders fill rows in parallel; each row is written
//! by exactly one worker, which keeps the output independent of the worker
//! count.

mod io;
mod jaccard;
mod profile;
mod ratings;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

pub use io::{read_matrix, write_matrix};
pub use jaccard::{item_jaccard_matrix, jaccard_matrix};
pub use profile::{distance_to_similarity, normalize_distances, profile_distance_matrix, profile_similarity_matrix};
pub use ratings::{
    cosine_item_matrix, cosine_item_similarity, pearson_item_similarity, pearson_user_similarity, RatingsMatrix,
};

use crate::corpus::Axis;
use crate::error::{Error, Result};

/// Which signal a similarity matrix was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimTag {
    Brand,
    Type,
    Category,
    Activity,
    Profile,
    Hybrid,
}

impl SimTag {
    pub const ALL: [SimTag; 6] = [
        SimTag::Brand,
        SimTag::Type,
        SimTag::Category,
        SimTag::Activity,
        SimTag::Profile,
        SimTag::Hybrid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SimTag::Brand => "brand",
            SimTag::Type => "type",
            SimTag::Category => "category",
            SimTag::Activity => "activity",
            SimTag::Profile => "profile",
            SimTag::Hybrid => "hybrid",
        }
    }
}

impl From<Axis> for SimTag {
    fn from(axis: Axis) -> Self {
        match axis {
            Axis::Brand => SimTag::Brand,
            Axis::Type => SimTag::Type,
            Axis::Category => SimTag::Category,
            Axis::Activity => SimTag::Activity,
        }
    }
}

impl fmt::Display for SimTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SimTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SimTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| Error::UnknownAxis(s.trim().to_string()))
    }
}

/// Bidirectional map between string keys and dense indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeyIndex {
    keys: Vec<String>,
    positions: HashMap<String, usize>,
}

impl KeyIndex {
    pub fn new(keys: Vec<String>) -> Result<Self> {
        let mut positions = HashMap::with_capacity(keys.len());
        for (i, k) in keys.iter().enumerate() {
            if positions.insert(k.clone(), i).is_some() {
                return Err(Error::Invariant(format!("duplicate key `{k}` in index")));
            }
        }
        Ok(KeyIndex { keys, positions })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn key(&self, i: usize) -> &str {
        &self.keys[i]
    }

    pub fn position(&self, key: &str) -> Option<usize> {
        self.positions.get(key).copied()
    }
}

fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

fn row_offset(n: usize, i: usize) -> usize {
    i * (2 * n - i + 1) / 2
}

/// Fills a packed upper triangle. `fill(i, row)` receives the slice holding
/// columns `i..n` of row `i`.
fn build_packed<F>(n: usize, fill: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    build_packed_with(n, || (), |_, i, row| fill(i, row))
}

/// Like [`build_packed`] with per-worker scratch state.
fn build_packed_with<S, I, F>(n: usize, init: I, fill: F) -> Vec<f64>
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize, &mut [f64]) + Sync + Send,
{
    let mut data = vec![0.0; packed_len(n)];
    let mut rows: Vec<(usize, &mut [f64])> = Vec::with_capacity(n);
    let mut rest = data.as_mut_slice();
    for i in 0..n {
        let (row, tail) = rest.split_at_mut(n - i);
        rows.push((i, row));
        rest = tail;
    }
    rows.into_par_iter()
        .for_each_init(&init, |state, (i, row)| fill(state, i, row));
    data
}

#[derive(Debug, Clone, PartialEq)]
struct Packed {
    n: usize,
    data: Vec<f64>,
}

impl Packed {
    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.data[row_offset(self.n, a) + (b - a)]
    }
}

/// Dense symmetric actor-by-actor similarity.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    index: Arc<KeyIndex>,
    tag: SimTag,
    store: Packed,
}

impl SimilarityMatrix {
    /// Builds from a function evaluated on the upper triangle `i <= j`.
    pub fn from_fn<F>(index: Arc<KeyIndex>, tag: SimTag, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let n = index.len();
        let data = build_packed(n, |i, row| {
            for (off, slot) in row.iter_mut().enumerate() {
                *slot = f(i, i + off);
            }
        });
        SimilarityMatrix {
            index,
            tag,
            store: Packed { n, data },
        }
    }

    /// From a full square matrix; only the upper triangle is read.
    pub fn from_rows(keys: Vec<String>, tag: SimTag, rows: &[Vec<f64>]) -> Result<Self> {
        let index = Arc::new(KeyIndex::new(keys)?);
        if rows.len() != index.len() || rows.iter().any(|r| r.len() != index.len()) {
            return Err(Error::IndexMismatch);
        }
        Ok(Self::from_fn(index, tag, |i, j| rows[i][j]))
    }

    pub(crate) fn from_packed(index: Arc<KeyIndex>, tag: SimTag, data: Vec<f64>) -> Result<Self> {
        let n = index.len();
        if data.len() != packed_len(n) {
            return Err(Error::Invariant("packed length does not match index".into()));
        }
        Ok(SimilarityMatrix {
            index,
            tag,
            store: Packed { n, data },
        })
    }

    pub fn len(&self) -> usize {
        self.store.n
    }

    pub fn is_empty(&self) -> bool {
        self.store.n == 0
    }

    pub fn tag(&self) -> SimTag {
        self.tag
    }

    pub fn with_tag(mut self, tag: SimTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn index(&self) -> &Arc<KeyIndex> {
        &self.index
    }

    pub fn keys(&self) -> &[String] {
        self.index.keys()
    }

    pub fn position(&self, key: &str) -> Option<usize> {
        self.index.position(key)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.store.get(i, j)
    }

    pub fn get_by_key(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.get(self.position(a)?, self.position(b)?))
    }

    /// Raw packed upper triangle, row-major.
    pub fn packed(&self) -> &[f64] {
        &self.store.data
    }

    pub fn same_index(&self, other: &SimilarityMatrix) -> bool {
        Arc::ptr_eq(&self.index, &other.index) || self.index.keys() == other.index.keys()
    }
}

/// Dense symmetric distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    index: Arc<KeyIndex>,
    store: Packed,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.store.n
    }

    pub fn is_empty(&self) -> bool {
        self.store.n == 0
    }

    pub fn index(&self) -> &Arc<KeyIndex> {
        &self.index
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.store.get(i, j)
    }

    pub fn from_rows(keys: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let index = Arc::new(KeyIndex::new(keys)?);
        let n = index.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::IndexMismatch);
        }
        let data = build_packed(n, |i, row| {
            for (off, slot) in row.iter_mut().enumerate() {
                *slot = rows[i][i + off];
            }
        });
        Ok(DistanceMatrix {
            index,
            store: Packed { n, data },
        })
    }
}
