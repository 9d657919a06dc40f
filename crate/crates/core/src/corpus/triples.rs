use std::collections::BTreeMap;

use super::{Axis, Corpus};

/// `(actor, item, quantity)`: one implicit-feedback observation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InteractionTriple {
    pub actor: String,
    pub item: String,
    pub quantity: u64,
}

impl InteractionTriple {
    pub fn new(actor: impl Into<String>, item: impl Into<String>, quantity: u64) -> Self {
        InteractionTriple {
            actor: actor.into(),
            item: item.into(),
            quantity,
        }
    }
}

/// Triples on a single axis, one per `(actor, item)` key, sorted by key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triples {
    axis: Axis,
    entries: Vec<InteractionTriple>,
}

impl Triples {
    /// Sums quantities of repeated `(actor, item)` keys. Zero quantities are
    /// dropped.
    pub fn aggregate(axis: Axis, raw: impl IntoIterator<Item = InteractionTriple>) -> Self {
        let mut sums: BTreeMap<(String, String), u64> = BTreeMap::new();
        for t in raw {
            if t.quantity == 0 {
                continue;
            }
            *sums.entry((t.actor, t.item)).or_insert(0) += t.quantity;
        }
        Triples {
            axis,
            entries: sums
                .into_iter()
                .map(|((actor, item), quantity)| InteractionTriple {
                    actor,
                    item,
                    quantity,
                })
                .collect(),
        }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn entries(&self) -> &[InteractionTriple] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_quantity(&self) -> u64 {
        self.entries.iter().map(|t| t.quantity).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &InteractionTriple> {
        self.entries.iter()
    }
}

/// One triple per `(member, item)` on `axis`, quantities summed. The activity
/// axis counts participations.
pub fn extract_triples(corpus: &Corpus, axis: Axis) -> Triples {
    match axis {
        Axis::Activity => Triples::aggregate(
            axis,
            corpus
                .participations
                .iter()
                .map(|p| InteractionTriple::new(p.member_id.clone(), p.activity_id.clone(), 1)),
        ),
        _ => Triples::aggregate(
            axis,
            corpus
                .transactions
                .iter()
                .filter(|t| !t.member_id.is_empty())
                .filter_map(|t| {
                    t.item(axis).map(|item| {
                        InteractionTriple::new(t.member_id.clone(), item, u64::from(t.quantity))
                    })
                }),
        ),
    }
}
