use std::collections::HashMap;
use std::sync::Arc;

use super::{build_packed_with, KeyIndex, SimTag, SimilarityMatrix};
use crate::corpus::Triples;
use crate::error::{Error, Result};

/// Item sets per actor as sorted, deduplicated item indices, plus the
/// inverted owner lists.
struct Incidence {
    baskets: Vec<Vec<u32>>,
    owners: Vec<Vec<u32>>,
}

impl Incidence {
    fn build(pairs: impl Iterator<Item = (usize, usize)>, actors: usize, items: usize) -> Self {
        let mut baskets = vec![Vec::new(); actors];
        let mut owners = vec![Vec::new(); items];
        for (a, i) in pairs {
            baskets[a].push(i as u32);
            owners[i].push(a as u32);
        }
        for b in baskets.iter_mut().chain(owners.iter_mut()) {
            b.sort_unstable();
            b.dedup();
        }
        Incidence { baskets, owners }
    }

    /// `W[a][b] = |N_a ∩ N_b| / |N_a ∪ N_b|`, 0 when either set is empty,
    /// diagonal 1.
    fn matrix(&self, index: Arc<KeyIndex>, tag: SimTag) -> SimilarityMatrix {
        let n = self.baskets.len();
        let data = build_packed_with(
            n,
            || (vec![0u32; n], Vec::<u32>::new()),
            |(counts, touched), i, row| {
                row[0] = 1.0;
                let basket = &self.baskets[i];
                if basket.is_empty() {
                    return;
                }
                for &item in basket {
                    for &other in &self.owners[item as usize] {
                        if (other as usize) > i {
                            if counts[other as usize] == 0 {
                                touched.push(other);
                            }
                            counts[other as usize] += 1;
                        }
                    }
                }
                for &other in touched.iter() {
                    let j = other as usize;
                    let common = counts[j] as usize;
                    let union = basket.len() + self.baskets[j].len() - common;
                    row[j - i] = common as f64 / union as f64;
                    counts[j] = 0;
                }
                touched.clear();
            },
        );
        SimilarityMatrix::from_packed(index, tag, data).expect("packed size matches index")
    }
}

/// Jaccard similarity between the item sets of `actors`. Quantities are
/// ignored. Actors without triples have empty sets and score 0 against
/// everyone else. Every triple's actor must be listed.
pub fn jaccard_matrix(triples: &Triples, actors: &[String]) -> Result<SimilarityMatrix> {
    let index = Arc::new(KeyIndex::new(actors.to_vec())?);
    let mut items: HashMap<&str, usize> = HashMap::new();
    let mut pairs = Vec::with_capacity(triples.len());
    for t in triples.iter() {
        let a = index
            .position(&t.actor)
            .ok_or_else(|| Error::UnknownActor(t.actor.clone()))?;
        let next = items.len();
        let i = *items.entry(t.item.as_str()).or_insert(next);
        pairs.push((a, i));
    }
    let incidence = Incidence::build(pairs.into_iter(), index.len(), items.len());
    Ok(incidence.matrix(index, triples.axis().into()))
}

/// Item-by-item Jaccard over the sets of actors owning each item. Items are
/// indexed in ascending key order.
pub fn item_jaccard_matrix(triples: &Triples) -> SimilarityMatrix {
    let mut item_keys: Vec<String> = triples.iter().map(|t| t.item.clone()).collect();
    item_keys.sort_unstable();
    item_keys.dedup();
    let index = Arc::new(KeyIndex::new(item_keys).expect("deduplicated"));
    let mut actors: HashMap<&str, usize> = HashMap::new();
    let pairs: Vec<(usize, usize)> = triples
        .iter()
        .map(|t| {
            let next = actors.len();
            let a = *actors.entry(t.actor.as_str()).or_insert(next);
            (index.position(&t.item).expect("indexed above"), a)
        })
        .collect();
    let incidence = Incidence::build(pairs.into_iter(), index.len(), actors.len());
    incidence.matrix(index, triples.axis().into())
}
