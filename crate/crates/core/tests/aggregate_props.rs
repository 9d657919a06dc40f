use std::collections::{BTreeMap, BTreeSet};

use famrec_core::aggregate::{
    blend_matrices, family_profile_vector, family_profile_vectors, group_rating, lift_triples_to_family, BlendSpec,
    GroupRatingInput, GroupStrategy,
};
use famrec_core::corpus::{clean_missing, encode_profiles, parse_timestamp, Axis, FamilyGroup, InteractionTriple, Triples};
use famrec_core::eval::{Experiment, ModelKind, ModelSpec};
use famrec_core::simcore::{SimTag, SimilarityMatrix};
use famrec_core::synth::{generate, SynthConfig};
use proptest::prelude::*;

fn ratings() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..12)
}

fn input(values: &[f64]) -> GroupRatingInput {
    GroupRatingInput::new(values.iter().enumerate().map(|(i, &r)| (format!("m{i}"), r)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn misery_average_pleasure_are_ordered(values in ratings()) {
        let g = input(&values);
        let lm = group_rating(&g, GroupStrategy::LeastMisery).unwrap();
        let avg = group_rating(&g, GroupStrategy::Average).unwrap();
        let mp = group_rating(&g, GroupStrategy::MostPleasure).unwrap();
        prop_assert!(lm <= avg && avg <= mp);
        prop_assert_eq!(lm, values.iter().copied().fold(f64::INFINITY, f64::min));
        prop_assert_eq!(mp, values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }

    #[test]
    fn threshold_at_minimum_keeps_every_rating(values in ratings()) {
        let mut g = input(&values);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        g.misery_threshold = Some(lo);
        let awm = group_rating(&g, GroupStrategy::AverageWithoutMisery).unwrap();
        prop_assert_eq!(awm, group_rating(&g, GroupStrategy::Average).unwrap());
    }

    #[test]
    fn respected_member_decides(values in ratings(), pick in 0usize..12) {
        let mut g = input(&values);
        let who = pick % values.len();
        g.respected = Some(format!("m{who}"));
        prop_assert_eq!(group_rating(&g, GroupStrategy::MostRespected).unwrap(), values[who]);
    }

    #[test]
    fn singletons_coincide(r in -5.0f64..5.0) {
        let mut g = input(&[r]);
        g.respected = Some("m0".into());
        g.misery_threshold = Some(r);
        for s in GroupStrategy::ALL {
            prop_assert_eq!(group_rating(&g, s).unwrap(), r);
        }
    }
}

/// Members `m0..mN` owning item indices, and a partition into families.
fn household() -> impl Strategy<Value = (Vec<BTreeSet<usize>>, Vec<usize>)> {
    (1usize..20).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::btree_set(0usize..15, 0..6), n),
            prop::collection::vec(0usize..6, n),
        )
    })
}

fn families_of(assign: &[usize]) -> Vec<FamilyGroup> {
    let mut by: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (m, &f) in assign.iter().enumerate() {
        by.entry(f).or_default().push(format!("m{m}"));
    }
    by.into_iter()
        .map(|(f, member_ids)| FamilyGroup {
            family_id: format!("f{f}"),
            member_ids,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn lifted_baskets_are_member_unions((baskets, assign) in household()) {
        let triples = Triples::aggregate(
            Axis::Category,
            baskets.iter().enumerate().flat_map(|(m, b)| {
                b.iter().map(move |&i| InteractionTriple::new(format!("m{m}"), format!("c{i:02}"), 2))
            }),
        );
        let families = families_of(&assign);
        let lifted = lift_triples_to_family(&triples, &families);
        let mut got: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for t in lifted.iter() {
            got.entry(t.actor.clone()).or_default().insert(t.item.clone());
        }
        for f in &families {
            let union: BTreeSet<String> = f
                .member_ids
                .iter()
                .flat_map(|m| baskets[m[1..].parse::<usize>().unwrap()].iter().map(|i| format!("c{i:02}")))
                .collect();
            prop_assert_eq!(got.get(&f.family_id).cloned().unwrap_or_default(), union);
        }
        prop_assert_eq!(lifted.total_quantity(), triples.total_quantity());
    }
}

#[test]
fn family_vectors_are_sums_in_any_member_order() {
    let corpus = generate(&SynthConfig {
        seed: 5,
        ..SynthConfig::scaled(60, 25, 400)
    })
    .unwrap();
    let (corpus, _) = clean_missing(corpus).unwrap();
    let vectors = encode_profiles(&corpus).unwrap();
    let summed = family_profile_vectors(&vectors, &corpus.families).unwrap();
    for (family, v) in corpus.families.iter().zip(&summed) {
        assert_eq!(v.actor_id, family.family_id);
        for (c, &x) in v.values.iter().enumerate() {
            let mut members = family.member_ids.clone();
            members.sort();
            let expected: f64 = members
                .iter()
                .map(|m| vectors.iter().find(|p| &p.actor_id == m).unwrap().values[c])
                .sum();
            assert_eq!(x, expected);
        }
        let mut reversed = family.clone();
        reversed.member_ids.reverse();
        assert_eq!(family_profile_vector(&vectors, &reversed).unwrap().values, v.values);
    }
}

#[test]
fn all_singleton_families_reproduce_the_member_model() {
    let mut corpus = generate(&SynthConfig {
        seed: 9,
        ..SynthConfig::scaled(200, 80, 1600)
    })
    .unwrap();
    // with no families listed every member becomes a singleton keyed by its own id
    corpus.families.clear();
    let (corpus, _) = clean_missing(corpus).unwrap();
    let experiment = Experiment::prepare(&corpus, parse_timestamp("2016-07-15 00:00:00").unwrap()).unwrap();
    let user = experiment.run(&ModelSpec::new(ModelKind::HybridUser)).unwrap();
    let family = experiment.run(&ModelSpec::new(ModelKind::HybridFamily)).unwrap();
    assert_eq!(user.len(), family.len());
    for (a, b) in user.rows.iter().zip(&family.rows) {
        assert_eq!((a.axis, a.n, a.population), (b.axis, b.n, b.population));
        assert_eq!(a.recall.to_bits(), b.recall.to_bits());
        assert_eq!(a.precision.to_bits(), b.precision.to_bits());
    }
}

fn random_matrix(n: usize, raw: &[f64]) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            rows[i][j] = raw[i * n + j];
            rows[j][i] = raw[i * n + j];
        }
    }
    rows
}

fn blend_inputs() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (2usize..12).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(0.0f64..=1.0, n * n),
            prop::collection::vec(0.0f64..=1.0, n * n),
            prop::collection::vec(0.0f64..5.0, 3),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn blends_stay_symmetric_and_bounded((n, a, b, w) in blend_inputs(), scale in 0.01f64..100.0) {
        let keys: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
        let ma = SimilarityMatrix::from_rows(keys.clone(), SimTag::Brand, &random_matrix(n, &a)).unwrap();
        let mb = SimilarityMatrix::from_rows(keys.clone(), SimTag::Profile, &random_matrix(n, &b)).unwrap();
        // an identical matrix under another tag
        let mc = ma.clone().with_tag(SimTag::Activity);
        let w0 = w[0] + 0.1;
        let spec = BlendSpec::new(vec![(SimTag::Brand, w0), (SimTag::Profile, w[1])]).unwrap();
        let scaled = BlendSpec::new(vec![(SimTag::Brand, w0 * scale), (SimTag::Profile, w[1] * scale)]).unwrap();
        let h = blend_matrices(&[&ma, &mb], &spec).unwrap();
        let hs = blend_matrices(&[&ma, &mb], &scaled).unwrap();
        let same = BlendSpec::new(vec![(SimTag::Brand, w0), (SimTag::Activity, w[2])]).unwrap();
        let hself = blend_matrices(&[&ma, &mc], &same).unwrap();
        prop_assert_eq!(h.tag(), SimTag::Hybrid);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((h.get(i, j) - h.get(j, i)).abs() <= 1e-12);
                prop_assert!((0.0..=1.0).contains(&h.get(i, j)));
                prop_assert!((h.get(i, j) - hs.get(i, j)).abs() <= 1e-12);
                prop_assert!((hself.get(i, j) - ma.get(i, j)).abs() <= 1e-12);
            }
        }
    }
}
