use std::collections::BTreeMap;
use std::sync::Arc;

use super::{KeyIndex, SimTag, SimilarityMatrix};
use crate::corpus::Triples;
use crate::error::{Error, Result};

/// Sparse explicit ratings `r[u][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingsMatrix {
    actors: KeyIndex,
    items: KeyIndex,
    /// Per actor, `(item, rating)` sorted by item.
    rows: Vec<Vec<(usize, f64)>>,
    /// Per item, `(actor, rating)` sorted by actor.
    cols: Vec<Vec<(usize, f64)>>,
}

impl RatingsMatrix {
    /// Actors and items are indexed in ascending key order. A repeated
    /// `(actor, item)` keeps the last rating.
    pub fn from_entries<A, I>(entries: impl IntoIterator<Item = (A, I, f64)>) -> Self
    where
        A: Into<String>,
        I: Into<String>,
    {
        let map: BTreeMap<(String, String), f64> = entries
            .into_iter()
            .map(|(a, i, r)| ((a.into(), i.into()), r))
            .collect();
        Self::from_map(map, Vec::new())
    }

    /// Like [`from_entries`](Self::from_entries) but also indexes `extra_actors`
    /// that may have no ratings.
    pub fn with_actors<A, I>(entries: impl IntoIterator<Item = (A, I, f64)>, extra_actors: &[String]) -> Self
    where
        A: Into<String>,
        I: Into<String>,
    {
        let map: BTreeMap<(String, String), f64> = entries
            .into_iter()
            .map(|(a, i, r)| ((a.into(), i.into()), r))
            .collect();
        Self::from_map(map, extra_actors.to_vec())
    }

    /// Quantities as ratings.
    pub fn from_triples(triples: &Triples) -> Self {
        Self::from_entries(
            triples
                .iter()
                .map(|t| (t.actor.clone(), t.item.clone(), t.quantity as f64)),
        )
    }

    fn from_map(map: BTreeMap<(String, String), f64>, mut actor_keys: Vec<String>) -> Self {
        actor_keys.extend(map.keys().map(|(a, _)| a.clone()));
        actor_keys.sort_unstable();
        actor_keys.dedup();
        let mut item_keys: Vec<String> = map.keys().map(|(_, i)| i.clone()).collect();
        item_keys.sort_unstable();
        item_keys.dedup();
        let actors = KeyIndex::new(actor_keys).expect("deduplicated");
        let items = KeyIndex::new(item_keys).expect("deduplicated");
        let mut rows = vec![Vec::new(); actors.len()];
        let mut cols = vec![Vec::new(); items.len()];
        for ((a, i), r) in map {
            let (a, i) = (actors.position(&a).unwrap(), items.position(&i).unwrap());
            rows[a].push((i, r));
            cols[i].push((a, r));
        }
        for c in &mut cols {
            c.sort_unstable_by_key(|&(a, _)| a);
        }
        RatingsMatrix {
            actors,
            items,
            rows,
            cols,
        }
    }

    pub fn actors(&self) -> &KeyIndex {
        &self.actors
    }

    pub fn items(&self) -> &KeyIndex {
        &self.items
    }

    pub fn actor(&self, key: &str) -> Result<usize> {
        self.actors
            .position(key)
            .ok_or_else(|| Error::UnknownActor(key.to_string()))
    }

    pub fn item(&self, key: &str) -> Result<usize> {
        self.items
            .position(key)
            .ok_or_else(|| Error::UnknownItem(key.to_string()))
    }

    pub fn row(&self, actor: usize) -> &[(usize, f64)] {
        &self.rows[actor]
    }

    pub fn column(&self, item: usize) -> &[(usize, f64)] {
        &self.cols[item]
    }

    pub fn rating(&self, actor: usize, item: usize) -> Option<f64> {
        let row = &self.rows[actor];
        row.binary_search_by_key(&item, |&(i, _)| i).ok().map(|p| row[p].1)
    }

    /// Mean over the actor's stored ratings.
    pub fn actor_mean(&self, actor: usize) -> Option<f64> {
        mean(self.rows[actor].iter().map(|&(_, r)| r))
    }

    /// Mean over the actor's stored ratings, leaving out one item.
    pub fn actor_mean_excluding(&self, actor: usize, item: usize) -> Option<f64> {
        mean(self.rows[actor].iter().filter(|&&(i, _)| i != item).map(|&(_, r)| r))
    }

    /// Mean over the item's stored ratings.
    pub fn item_mean(&self, item: usize) -> Option<f64> {
        mean(self.cols[item].iter().map(|&(_, r)| r))
    }

    pub fn global_mean(&self) -> Option<f64> {
        mean(self.rows.iter().flatten().map(|&(_, r)| r))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Pairs of values sharing a key in two key-sorted sparse vectors.
fn common(a: &[(usize, f64)], b: &[(usize, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push((a[i].1, b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Pearson correlation of paired samples with means over the pairs.
/// Fewer than two pairs or a zero variance yields 0.
fn correlation(pairs: &[(f64, f64)]) -> f64 {
    if pairs.len() < 2 {
        return 0.0;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

fn cosine(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let dot: f64 = common(a, b).iter().map(|(x, y)| x * y).sum();
    let na = a.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Cosine of the angle between two item columns, missing ratings counted as
/// zero. A zero column yields 0.
pub fn cosine_item_similarity(ratings: &RatingsMatrix, i: &str, j: &str) -> Result<f64> {
    let (i, j) = (ratings.item(i)?, ratings.item(j)?);
    Ok(cosine(ratings.column(i), ratings.column(j)))
}

/// Pearson correlation between two actors over their co-rated items.
pub fn pearson_user_similarity(ratings: &RatingsMatrix, u: &str, v: &str) -> Result<f64> {
    let (u, v) = (ratings.actor(u)?, ratings.actor(v)?);
    Ok(correlation(&common(ratings.row(u), ratings.row(v))))
}

/// Mean-centred correlation between two items over their common raters
/// (adjusted cosine in correlation form).
pub fn pearson_item_similarity(ratings: &RatingsMatrix, i: &str, j: &str) -> Result<f64> {
    let (i, j) = (ratings.item(i)?, ratings.item(j)?);
    Ok(correlation(&common(ratings.column(i), ratings.column(j))))
}

/// Item-by-item cosine matrix, tagged `tag`.
pub fn cosine_item_matrix(ratings: &RatingsMatrix, tag: SimTag) -> SimilarityMatrix {
    let index = Arc::new(ratings.items.clone());
    SimilarityMatrix::from_fn(index, tag, |i, j| {
        if i == j {
            1.0
        } else {
            cosine(ratings.column(i), ratings.column(j))
        }
    })
}
