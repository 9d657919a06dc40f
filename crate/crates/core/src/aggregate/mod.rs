//! Hybrid blending of similarity matrices, user-to-family lifting, and group
//! preference aggregation.

mod group;

use std::collections::{HashMap, HashSet};

pub use group::{
    aggregate_rating_predictions, aggregate_recommendation_lists, group_rating, GroupRatingInput, GroupStrategy,
};

use crate::corpus::{FamilyGroup, InteractionTriple, ProfileVector, Triples};
use crate::error::{Error, Result};
use crate::simcore::{SimTag, SimilarityMatrix};

/// Per-axis blend weights. Weights are normalized to sum to one when applied.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendSpec {
    weights: Vec<(SimTag, f64)>,
}

impl BlendSpec {
    pub fn new(weights: Vec<(SimTag, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for &(tag, w) in &weights {
            if !seen.insert(tag) {
                return Err(Error::DuplicateAxis(tag.to_string()));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::BadWeights);
            }
        }
        if !weights.iter().any(|&(_, w)| w > 0.0) {
            return Err(Error::BadWeights);
        }
        Ok(BlendSpec { weights })
    }

    pub fn uniform(tags: &[SimTag]) -> Result<Self> {
        Self::new(tags.iter().map(|&t| (t, 1.0)).collect())
    }

    pub fn weights(&self) -> &[(SimTag, f64)] {
        &self.weights
    }

    pub fn weight(&self, tag: SimTag) -> Option<f64> {
        self.weights.iter().find(|(t, _)| *t == tag).map(|&(_, w)| w)
    }

    /// Keeps only `tags`, in that order, with weights taken from `self`
    /// (1.0 where `self` has none).
    pub fn restricted_to(&self, tags: &[SimTag]) -> Result<Self> {
        Self::new(tags.iter().map(|&t| (t, self.weight(t).unwrap_or(1.0))).collect())
    }
}

/// Elementwise weighted mean of same-indexed matrices, tagged `hybrid`.
/// Matrices whose tag `spec` gives no weight are ignored.
pub fn blend_matrices(matrices: &[&SimilarityMatrix], spec: &BlendSpec) -> Result<SimilarityMatrix> {
    let mut by_tag: HashMap<SimTag, &SimilarityMatrix> = HashMap::new();
    for m in matrices {
        if by_tag.insert(m.tag(), m).is_some() {
            return Err(Error::DuplicateAxis(m.tag().to_string()));
        }
    }
    let total: f64 = spec.weights.iter().map(|&(_, w)| w).sum();
    let mut parts: Vec<(&SimilarityMatrix, f64)> = Vec::new();
    for &(tag, w) in &spec.weights {
        let m = by_tag.get(&tag).ok_or_else(|| Error::MissingAxis(tag.to_string()))?;
        if w > 0.0 {
            parts.push((m, w / total));
        }
    }
    let first = parts[0].0;
    if parts.iter().any(|(m, _)| !m.same_index(first)) {
        return Err(Error::IndexMismatch);
    }
    Ok(SimilarityMatrix::from_fn(first.index().clone(), SimTag::Hybrid, |i, j| {
        let mut acc = 0.0;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (m, w) in &parts {
            let v = m.get(i, j);
            acc += w * v;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        // a convex combination stays inside the input range
        acc.clamp(lo, hi)
    }))
}

/// The given families plus one singleton family (id = member id) for every
/// member of `members` that no family lists. Sorted by family id.
pub fn resolve_families(families: &[FamilyGroup], members: &[String]) -> Result<Vec<FamilyGroup>> {
    let mut covered = HashSet::new();
    let mut ids = HashSet::new();
    for f in families {
        if f.member_ids.is_empty() {
            return Err(Error::EmptyFamily(f.family_id.clone()));
        }
        ids.insert(f.family_id.as_str());
        covered.extend(f.member_ids.iter().map(String::as_str));
    }
    let mut out = families.to_vec();
    for m in members {
        if covered.contains(m.as_str()) {
            continue;
        }
        if ids.contains(m.as_str()) {
            return Err(Error::FamilyIdCollision(m.clone()));
        }
        out.push(FamilyGroup {
            family_id: m.clone(),
            member_ids: vec![m.clone()],
        });
    }
    out.sort_by(|a, b| a.family_id.cmp(&b.family_id));
    Ok(out)
}

/// Re-keys member triples by family: item sets are unioned and quantities
/// summed. Actors no family lists keep their own id as a singleton family.
pub fn lift_triples_to_family(triples: &Triples, families: &[FamilyGroup]) -> Triples {
    let owner: HashMap<&str, &str> = families
        .iter()
        .flat_map(|f| f.member_ids.iter().map(move |m| (m.as_str(), f.family_id.as_str())))
        .collect();
    Triples::aggregate(
        triples.axis(),
        triples.iter().map(|t| {
            let family = owner.get(t.actor.as_str()).copied().unwrap_or(&t.actor);
            InteractionTriple::new(family, t.item.clone(), t.quantity)
        }),
    )
}

fn sum_members<'a>(
    family: &FamilyGroup,
    lookup: impl Fn(&str) -> Option<&'a ProfileVector>,
) -> Result<ProfileVector> {
    let mut members: Vec<&String> = family.member_ids.iter().collect();
    members.sort();
    let mut vectors = members
        .iter()
        .map(|m| lookup(m).ok_or_else(|| Error::MissingProfile((*m).clone())));
    let first = vectors.next().ok_or_else(|| Error::EmptyFamily(family.family_id.clone()))??;
    let mut values = first.values.clone();
    for v in vectors {
        let v = v?;
        if v.layout != first.layout || v.values.len() != values.len() {
            return Err(Error::LayoutMismatch);
        }
        for (acc, x) in values.iter_mut().zip(&v.values) {
            *acc += x;
        }
    }
    Ok(ProfileVector {
        actor_id: family.family_id.clone(),
        values,
        layout: first.layout.clone(),
    })
}

/// Componentwise sum of the members' vectors. Members are summed in id
/// order, so the result does not depend on how the family lists them.
pub fn family_profile_vector(vectors: &[ProfileVector], family: &FamilyGroup) -> Result<ProfileVector> {
    sum_members(family, |m| vectors.iter().find(|v| v.actor_id == m))
}

/// [`family_profile_vector`] for every family.
pub fn family_profile_vectors(vectors: &[ProfileVector], families: &[FamilyGroup]) -> Result<Vec<ProfileVector>> {
    let lookup: HashMap<&str, &ProfileVector> = vectors.iter().map(|v| (v.actor_id.as_str(), v)).collect();
    families
        .iter()
        .map(|f| sum_members(f, |m| lookup.get(m).copied()))
        .collect()
}
