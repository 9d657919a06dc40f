//! Neighbourhoods, rating prediction, and Top-N recommendation for users and
//! families alike.
//!
//! Every ranking breaks ties by ascending key, so results are reproducible
//! across runs, platforms and worker counts.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use crate::corpus::{Axis, Triples};
use crate::error::{Error, Result};
use crate::simcore::{KeyIndex, RatingsMatrix, SimilarityMatrix};

/// Default neighbourhood size.
pub const DEFAULT_K: usize = 50;

/// Item sets per actor, with actors and items indexed in ascending key
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct Baskets {
    axis: Axis,
    actors: KeyIndex,
    items: KeyIndex,
    sets: Vec<Vec<u32>>,
}

impl Baskets {
    pub fn from_triples(triples: &Triples) -> Self {
        let mut actor_keys: Vec<String> = triples.iter().map(|t| t.actor.clone()).collect();
        actor_keys.dedup();
        let mut item_keys: Vec<String> = triples.iter().map(|t| t.item.clone()).collect();
        item_keys.sort_unstable();
        item_keys.dedup();
        let actors = KeyIndex::new(actor_keys).expect("triples are sorted by actor");
        let items = KeyIndex::new(item_keys).expect("deduplicated");
        let mut sets = vec![Vec::new(); actors.len()];
        for t in triples.iter() {
            let a = actors.position(&t.actor).unwrap();
            sets[a].push(items.position(&t.item).unwrap() as u32);
        }
        for s in &mut sets {
            s.sort_unstable();
        }
        Baskets {
            axis: triples.axis(),
            actors,
            items,
            sets,
        }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn items(&self) -> &KeyIndex {
        &self.items
    }

    pub fn actors(&self) -> &KeyIndex {
        &self.actors
    }

    /// Item indices of `actor`'s basket; empty for unknown actors.
    pub fn basket(&self, actor: &str) -> &[u32] {
        self.actors.position(actor).map_or(&[], |a| &self.sets[a])
    }

    pub fn item_keys(&self, actor: &str) -> BTreeSet<String> {
        self.basket(actor)
            .iter()
            .map(|&i| self.items.key(i as usize).to_string())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub key: String,
    pub weight: f64,
}

/// The `k` most similar other actors with positive similarity, most similar
/// first.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub target: String,
    pub neighbors: Vec<Neighbor>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationList {
    pub target: String,
    pub items: Vec<(String, f64)>,
    pub n: usize,
}

impl RecommendationList {
    pub fn item_keys(&self) -> Vec<&str> {
        self.items.iter().map(|(k, _)| k.as_str()).collect()
    }
}

fn by_score_then_key<'a>(keys: impl Fn(usize) -> &'a str) -> impl Fn(&(usize, f64), &(usize, f64)) -> Ordering {
    move |a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| keys(a.0).cmp(keys(b.0)))
    }
}

/// Sorts `(index, score)` descending by score, ascending by key, keeping the
/// first `n`.
fn top_by_score<'a>(mut scored: Vec<(usize, f64)>, n: usize, keys: impl Fn(usize) -> &'a str + Copy) -> Vec<(usize, f64)> {
    let cmp = by_score_then_key(keys);
    if scored.len() > n && n > 0 {
        scored.select_nth_unstable_by(n - 1, &cmp);
        scored.truncate(n);
    }
    scored.sort_unstable_by(&cmp);
    scored.truncate(n);
    scored
}

/// Index-level neighbour selection.
pub(crate) fn nearest(w: &SimilarityMatrix, target: usize, k: usize) -> Vec<(usize, f64)> {
    let candidates: Vec<(usize, f64)> = (0..w.len())
        .filter(|&j| j != target)
        .map(|j| (j, w.get(target, j)))
        .filter(|&(_, s)| s > 0.0 && s.is_finite())
        .collect();
    top_by_score(candidates, k, |i| w.index().key(i))
}

fn position(w: &SimilarityMatrix, target: &str) -> Result<usize> {
    w.position(target)
        .ok_or_else(|| Error::UnknownActor(target.to_string()))
}

pub fn k_nearest_neighbors(w: &SimilarityMatrix, target: &str, k: usize) -> Result<Neighborhood> {
    let t = position(w, target)?;
    Ok(Neighborhood {
        target: target.to_string(),
        neighbors: nearest(w, t, k)
            .into_iter()
            .map(|(j, weight)| Neighbor {
                key: w.index().key(j).to_string(),
                weight,
            })
            .collect(),
        k,
    })
}

/// A rating estimate, or the fallback used when no neighbour rated the item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction {
    Predicted(f64),
    Fallback(f64),
}

impl Prediction {
    pub fn value(self) -> f64 {
        match self {
            Prediction::Predicted(v) | Prediction::Fallback(v) => v,
        }
    }

    pub fn is_fallback(self) -> bool {
        matches!(self, Prediction::Fallback(_))
    }
}

/// `(r_{u,i}, mean_u, w_{k,u})` for every neighbour that rated `item`.
fn rated_neighbors(
    ratings: &RatingsMatrix,
    w: &SimilarityMatrix,
    target: &str,
    item: usize,
    k: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    let hood = k_nearest_neighbors(w, target, k)?;
    Ok(hood
        .neighbors
        .iter()
        .filter_map(|n| {
            let u = ratings.actors().position(&n.key)?;
            let r = ratings.rating(u, item)?;
            Some((r, ratings.actor_mean(u).expect("has a rating"), n.weight))
        })
        .collect())
}

fn global_mean(ratings: &RatingsMatrix) -> f64 {
    ratings.global_mean().unwrap_or(0.0)
}

/// `mean_k + Σ (r_{u,i} - mean_u) w_{k,u} / Σ |w_{k,u}|` over the
/// neighbourhood members that rated `item`. `mean_k` is the target's mean
/// over its other rated items (global mean if it has none).
pub fn predict_rating_mean_centered(
    ratings: &RatingsMatrix,
    w: &SimilarityMatrix,
    target: &str,
    item: &str,
    k: usize,
) -> Result<Prediction> {
    let i = ratings.item(item)?;
    let base = ratings
        .actors()
        .position(target)
        .and_then(|t| ratings.actor_mean_excluding(t, i))
        .unwrap_or_else(|| global_mean(ratings));
    let raters = rated_neighbors(ratings, w, target, i, k)?;
    if raters.is_empty() {
        return Ok(Prediction::Fallback(base));
    }
    let num: f64 = raters.iter().map(|(r, m, w)| (r - m) * w).sum();
    let den: f64 = raters.iter().map(|(_, _, w)| w.abs()).sum();
    Ok(Prediction::Predicted(base + num / den))
}

/// `Σ r_{u,i} w_{k,u} / Σ |w_{k,u}|` over the neighbourhood members that
/// rated `item`; global mean when none did.
pub fn predict_rating_simple(
    ratings: &RatingsMatrix,
    w: &SimilarityMatrix,
    target: &str,
    item: &str,
    k: usize,
) -> Result<Prediction> {
    let i = ratings.item(item)?;
    let raters = rated_neighbors(ratings, w, target, i, k)?;
    if raters.is_empty() {
        return Ok(Prediction::Fallback(global_mean(ratings)));
    }
    let num: f64 = raters.iter().map(|(r, _, w)| r * w).sum();
    let den: f64 = raters.iter().map(|(_, _, w)| w.abs()).sum();
    Ok(Prediction::Predicted(num / den))
}

/// User-based scorer over one similarity matrix and one set of baskets, with
/// the matrix-to-basket actor mapping resolved once.
pub struct UserBasedScorer<'a> {
    w: &'a SimilarityMatrix,
    baskets: &'a Baskets,
    basket_of: Vec<Option<usize>>,
}

impl<'a> UserBasedScorer<'a> {
    pub fn new(w: &'a SimilarityMatrix, baskets: &'a Baskets) -> Self {
        let basket_of = w.keys().iter().map(|k| baskets.actors.position(k)).collect();
        UserBasedScorer { w, baskets, basket_of }
    }

    fn basket(&self, actor: usize) -> &[u32] {
        self.basket_of[actor].map_or(&[], |b| &self.baskets.sets[b])
    }

    /// `score(i) = Σ w(target, v)` over neighbours `v` owning `i`, for items
    /// outside the target's basket. Neighbours are visited in rank order.
    pub fn scores(&self, target: usize, k: usize) -> Vec<(usize, f64)> {
        let own = self.basket(target);
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (v, weight) in nearest(self.w, target, k) {
            for &item in self.basket(v) {
                if own.binary_search(&item).is_err() {
                    *acc.entry(item as usize).or_insert(0.0) += weight;
                }
            }
        }
        acc.into_iter().filter(|&(_, s)| s > 0.0).collect()
    }

    pub fn top_n(&self, target: usize, n: usize, k: usize) -> Vec<(usize, f64)> {
        top_by_score(self.scores(target, k), n, |i| self.baskets.items.key(i))
    }

    pub fn item_key(&self, item: usize) -> &str {
        self.baskets.items.key(item)
    }
}

/// Implicit-feedback item scores for `target` from its `k` nearest
/// neighbours.
pub fn score_items_implicit(
    baskets: &Baskets,
    w: &SimilarityMatrix,
    target: &str,
    k: usize,
) -> Result<BTreeMap<String, f64>> {
    let t = position(w, target)?;
    let scorer = UserBasedScorer::new(w, baskets);
    Ok(scorer
        .scores(t, k)
        .into_iter()
        .map(|(i, s)| (baskets.items.key(i).to_string(), s))
        .collect())
}

pub fn top_n_user_based(
    baskets: &Baskets,
    w: &SimilarityMatrix,
    target: &str,
    n: usize,
    k: usize,
) -> Result<RecommendationList> {
    let t = position(w, target)?;
    let scorer = UserBasedScorer::new(w, baskets);
    Ok(RecommendationList {
        target: target.to_string(),
        items: scorer
            .top_n(t, n, k)
            .into_iter()
            .map(|(i, s)| (baskets.items.key(i).to_string(), s))
            .collect(),
        n,
    })
}

/// Item-based Top-N: candidates are the union of each owned item's `k` most
/// similar items minus the owned set; each candidate scores the sum of its
/// similarities to all owned items.
pub fn top_n_item_based(
    baskets: &Baskets,
    item_similarity: &SimilarityMatrix,
    target: &str,
    n: usize,
    k: usize,
) -> Result<RecommendationList> {
    let owned: Vec<usize> = baskets
        .item_keys(target)
        .iter()
        .filter_map(|key| item_similarity.position(key))
        .collect();
    let owned_keys = baskets.item_keys(target);
    let mut candidates = BTreeSet::new();
    for &o in &owned {
        for (c, _) in nearest(item_similarity, o, k) {
            if !owned_keys.contains(item_similarity.index().key(c)) {
                candidates.insert(c);
            }
        }
    }
    let scored: Vec<(usize, f64)> = candidates
        .into_iter()
        .map(|c| (c, owned.iter().map(|&o| item_similarity.get(o, c)).sum()))
        .collect();
    let keys = |i: usize| item_similarity.index().key(i);
    Ok(RecommendationList {
        target: target.to_string(),
        items: top_by_score(scored, n, keys)
            .into_iter()
            .map(|(i, s)| (keys(i).to_string(), s))
            .collect(),
        n,
    })
}

/// User-based Top-N with families as actors.
pub fn recommend_for_family(
    family_baskets: &Baskets,
    family_similarity: &SimilarityMatrix,
    family: &str,
    n: usize,
    k: usize,
) -> Result<RecommendationList> {
    if family_similarity.position(family).is_none() {
        return Err(Error::UnknownActor(format!("family {family}")));
    }
    top_n_user_based(family_baskets, family_similarity, family, n, k)
}

/// Writes `actor_id,rank,item_id,score` rows, ranks starting at 1.
pub fn write_recommendations(out: impl Write, lists: &[RecommendationList]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["actor_id", "rank", "item_id", "score"])?;
    for list in lists {
        for (rank, (item, score)) in list.items.iter().enumerate() {
            w.write_record([&list.target, &(rank + 1).to_string(), item, &score.to_string()])?;
        }
    }
    w.flush()
}
