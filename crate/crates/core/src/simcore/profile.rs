use std::sync::Arc;

use super::{build_packed, DistanceMatrix, KeyIndex, Packed, SimTag, SimilarityMatrix};
use crate::corpus::ProfileVector;
use crate::error::{Error, Result};

/// Pairwise Euclidean distances. All vectors must share one layout.
pub fn profile_distance_matrix(vectors: &[ProfileVector]) -> Result<DistanceMatrix> {
    if let Some(first) = vectors.first() {
        for v in vectors {
            let same = Arc::ptr_eq(&v.layout, &first.layout) || v.layout == first.layout;
            if !same || v.values.len() != first.values.len() || v.values.len() != v.layout.len() {
                return Err(Error::LayoutMismatch);
            }
        }
    }
    let index = Arc::new(KeyIndex::new(vectors.iter().map(|v| v.actor_id.clone()).collect())?);
    let n = vectors.len();
    let data = build_packed(n, |i, row| {
        let a = &vectors[i].values;
        for (off, slot) in row.iter_mut().enumerate().skip(1) {
            let b = &vectors[i + off].values;
            *slot = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
        }
    });
    Ok(DistanceMatrix {
        index,
        store: Packed { n, data },
    })
}

/// Divides every off-diagonal entry by the largest one. An all-zero matrix
/// stays all zero.
pub fn normalize_distances(d: &DistanceMatrix) -> Result<DistanceMatrix> {
    let n = d.len();
    if n < 2 {
        return Err(Error::TooFewActors(n));
    }
    let max = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| d.get(i, j))
        .fold(0.0_f64, f64::max);
    let data = build_packed(n, |i, row| {
        for (off, slot) in row.iter_mut().enumerate().skip(1) {
            *slot = if max > 0.0 { d.get(i, i + off) / max } else { 0.0 };
        }
    });
    Ok(DistanceMatrix {
        index: Arc::clone(&d.index),
        store: Packed { n, data },
    })
}

/// `W = 1 - D` on a normalized distance matrix, tagged `profile`.
pub fn distance_to_similarity(d: &DistanceMatrix) -> Result<SimilarityMatrix> {
    if let Some(&bad) = d.store.data.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::DistanceOutOfRange(bad));
    }
    let data = d.store.data.iter().map(|x| 1.0 - x).collect();
    SimilarityMatrix::from_packed(Arc::clone(&d.index), SimTag::Profile, data)
}

/// Distance, normalization and conversion in one step.
pub fn profile_similarity_matrix(vectors: &[ProfileVector]) -> Result<SimilarityMatrix> {
    distance_to_similarity(&normalize_distances(&profile_distance_matrix(vectors)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{BlockKind, LayoutBlock, ProfileLayout};

    fn vectors(raw: &[&[f64]]) -> Vec<ProfileVector> {
        let mut layout = ProfileLayout::default();
        layout.blocks.push(LayoutBlock {
            name: "x",
            range: 0..raw[0].len(),
            kind: BlockKind::Scaled,
        });
        let layout = Arc::new(layout);
        raw.iter()
            .enumerate()
            .map(|(i, v)| ProfileVector {
                actor_id: format!("u{i}"),
                values: v.to_vec(),
                layout: Arc::clone(&layout),
            })
            .collect()
    }

    fn keys(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("u{i}")).collect()
    }

    #[test]
    fn three_four_five() {
        let v = vectors(&[&[0.0, 0.0], &[3.0, 4.0], &[3.0, 4.0]]);
        let d = profile_distance_matrix(&v).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(1, 2), 0.0);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn layout_mismatch() {
        let mut v = vectors(&[&[0.0], &[1.0]]);
        v[1].values.push(2.0);
        assert!(matches!(profile_distance_matrix(&v), Err(Error::LayoutMismatch)));
    }

    #[test]
    fn divide_by_max() {
        let d = DistanceMatrix::from_rows(
            keys(3),
            &[vec![0.0, 2.0, 4.0], vec![2.0, 0.0, 0.0], vec![4.0, 0.0, 0.0]],
        )
        .unwrap();
        let n = normalize_distances(&d).unwrap();
        assert_eq!((n.get(0, 1), n.get(0, 2), n.get(1, 2), n.get(0, 0)), (0.5, 1.0, 0.0, 0.0));
        let w = distance_to_similarity(&n).unwrap();
        assert_eq!((w.get(0, 1), w.get(0, 2), w.get(1, 2), w.get(2, 2)), (0.5, 0.0, 1.0, 1.0));
        assert_eq!(w.tag(), SimTag::Profile);
    }

    #[test]
    fn all_zero_stays_zero() {
        let d = DistanceMatrix::from_rows(keys(2), &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(normalize_distances(&d).unwrap().get(0, 1), 0.0);
        let single = DistanceMatrix::from_rows(keys(1), &[vec![0.0]]).unwrap();
        assert!(matches!(normalize_distances(&single), Err(Error::TooFewActors(1))));
    }

    #[test]
    fn quarter_distance() {
        let d = DistanceMatrix::from_rows(keys(2), &[vec![0.0, 0.25], vec![0.25, 0.0]]).unwrap();
        assert_eq!(distance_to_similarity(&d).unwrap().get(0, 1), 0.75);
        let bad = DistanceMatrix::from_rows(keys(2), &[vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap();
        assert!(matches!(distance_to_similarity(&bad), Err(Error::DistanceOutOfRange(_))));
    }
}
