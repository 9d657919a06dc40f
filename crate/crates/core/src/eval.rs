//! The User / Hybrid User / Hybrid Family comparison: train on transactions
//! before a split point, recommend Top-n on each product axis, and score the
//! lists against the test partition with pooled recall and precision.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::aggregate::{blend_matrices, family_profile_vectors, lift_triples_to_family, resolve_families, BlendSpec};
use crate::corpus::{encode_profiles, extract_triples, temporal_split, Axis, Corpus, FamilyGroup, SplitDataset, Timestamp, Triples};
use crate::error::{Error, Result};
use crate::recommend::{Baskets, UserBasedScorer, DEFAULT_K};
use crate::simcore::{jaccard_matrix, profile_similarity_matrix, SimTag, SimilarityMatrix};

pub const DEFAULT_N_MAX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    User,
    HybridUser,
    HybridFamily,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::User, ModelKind::HybridUser, ModelKind::HybridFamily];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::User => "user",
            ModelKind::HybridUser => "hybrid_user",
            ModelKind::HybridFamily => "hybrid_family",
        }
    }

    /// Matrices blended to recommend on `axis`.
    pub fn blended_tags(self, axis: Axis) -> Vec<SimTag> {
        match self {
            ModelKind::User => vec![axis.into(), SimTag::Activity, SimTag::Profile],
            ModelKind::HybridUser | ModelKind::HybridFamily => vec![
                SimTag::Brand,
                SimTag::Type,
                SimTag::Category,
                SimTag::Activity,
                SimTag::Profile,
            ],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| Error::UnknownModel(s.trim().to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Weights per source matrix; tags a model does not blend are ignored.
    pub weights: BlendSpec,
    pub k: usize,
    pub n_max: usize,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        ModelSpec {
            kind,
            weights: BlendSpec::uniform(&[
                SimTag::Brand,
                SimTag::Type,
                SimTag::Category,
                SimTag::Activity,
                SimTag::Profile,
            ])
            .expect("positive weights"),
            k: DEFAULT_K,
            n_max: DEFAULT_N_MAX,
        }
    }

    pub fn blend_for(&self, axis: Axis) -> Result<BlendSpec> {
        self.weights.restricted_to(&self.kind.blended_tags(axis))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub model: ModelKind,
    pub axis: Axis,
    pub n: usize,
    pub recall: f64,
    pub precision: f64,
    pub population: usize,
}

/// One row per (model, axis, n), in that order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<ReportRow>,
}

impl EvalReport {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, model: ModelKind, axis: Axis, n: usize) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.model == model && r.axis == axis && r.n == n)
    }

    /// Unweighted mean over the product axes present for `(model, n)`, as
    /// `(recall, precision)`.
    pub fn axis_mean(&self, model: ModelKind, n: usize) -> Option<(f64, f64)> {
        let rows: Vec<&ReportRow> = self.rows.iter().filter(|r| r.model == model && r.n == n).collect();
        if rows.is_empty() {
            return None;
        }
        let c = rows.len() as f64;
        Some((
            rows.iter().map(|r| r.recall).sum::<f64>() / c,
            rows.iter().map(|r| r.precision).sum::<f64>() / c,
        ))
    }

    pub fn models(&self) -> Vec<ModelKind> {
        let set: BTreeSet<ModelKind> = self.rows.iter().map(|r| r.model).collect();
        set.into_iter().collect()
    }

    pub fn n_values(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.rows.iter().map(|r| r.n).collect();
        set.into_iter().collect()
    }

    /// Recall must not drop as `n` grows, and both metrics stay in `[0, 1]`.
    pub fn check_invariants(&self) -> Result<()> {
        let mut last: HashMap<(ModelKind, Axis), (usize, f64)> = HashMap::new();
        for r in &self.rows {
            if !(0.0..=1.0).contains(&r.recall) || !(0.0..=1.0).contains(&r.precision) {
                return Err(Error::Invariant(format!(
                    "{} {} n={}: metric outside [0,1]",
                    r.model, r.axis, r.n
                )));
            }
            if let Some(&(n, recall)) = last.get(&(r.model, r.axis)) {
                if r.n > n && r.recall < recall {
                    return Err(Error::Invariant(format!(
                        "{} {}: recall fell from {recall} at n={n} to {} at n={}",
                        r.model, r.axis, r.recall, r.n
                    )));
                }
            }
            last.insert((r.model, r.axis), (r.n, r.recall));
        }
        Ok(())
    }
}

/// `(Σ|R∩T|, Σ|R|, Σ|T|)` over actors with a nonempty test basket.
fn pooled_counts(
    recommendations: &BTreeMap<String, Vec<String>>,
    test: &BTreeMap<String, BTreeSet<String>>,
) -> (usize, usize, usize) {
    let mut hits = 0;
    let mut recommended = 0;
    let mut relevant = 0;
    for (actor, truth) in test.iter().filter(|(_, t)| !t.is_empty()) {
        let recs: BTreeSet<&String> = recommendations.get(actor).into_iter().flatten().collect();
        hits += recs.iter().filter(|i| truth.contains(i.as_str())).count();
        recommended += recs.len();
        relevant += truth.len();
    }
    (hits, recommended, relevant)
}

/// `Σ|R(u) ∩ T(u)| / Σ|T(u)|`.
pub fn recall_at(
    recommendations: &BTreeMap<String, Vec<String>>,
    test: &BTreeMap<String, BTreeSet<String>>,
) -> Result<f64> {
    let (hits, _, relevant) = pooled_counts(recommendations, test);
    if relevant == 0 {
        return Err(Error::EmptyDenominator("total test basket size"));
    }
    Ok(hits as f64 / relevant as f64)
}

/// `Σ|R(u) ∩ T(u)| / Σ|R(u)|`.
pub fn precision_at(
    recommendations: &BTreeMap<String, Vec<String>>,
    test: &BTreeMap<String, BTreeSet<String>>,
) -> Result<f64> {
    let (hits, recommended, _) = pooled_counts(recommendations, test);
    if recommended == 0 {
        return Err(Error::EmptyDenominator("total recommendation count"));
    }
    Ok(hits as f64 / recommended as f64)
}

/// Similarity matrices, baskets and test sets for one actor population.
struct Level {
    actors: Vec<String>,
    matrices: HashMap<SimTag, SimilarityMatrix>,
    train: HashMap<Axis, Baskets>,
    test: HashMap<Axis, BTreeMap<String, BTreeSet<String>>>,
}

impl Level {
    fn build(
        actors: Vec<String>,
        profile: SimilarityMatrix,
        train: impl Fn(Axis) -> Triples,
        test: impl Fn(Axis) -> Triples,
    ) -> Result<Level> {
        let mut matrices = HashMap::new();
        for axis in Axis::ALL {
            let triples = train(axis);
            matrices.insert(axis.into(), jaccard_matrix(&triples, &actors)?);
        }
        matrices.insert(SimTag::Profile, profile);
        let mut train_baskets = HashMap::new();
        let mut test_sets = HashMap::new();
        for axis in Axis::PRODUCT {
            train_baskets.insert(axis, Baskets::from_triples(&train(axis)));
            let mut sets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
            for t in test(axis).iter() {
                sets.entry(t.actor.clone()).or_default().insert(t.item.clone());
            }
            test_sets.insert(axis, sets);
        }
        Ok(Level {
            actors,
            matrices,
            train: train_baskets,
            test: test_sets,
        })
    }

    fn blend(&self, spec: &BlendSpec) -> Result<SimilarityMatrix> {
        let parts: Vec<&SimilarityMatrix> = spec
            .weights()
            .iter()
            .filter_map(|(t, _)| self.matrices.get(t))
            .collect();
        blend_matrices(&parts, spec)
    }

    /// Pooled hit/list/test counts for every `n` in `1..=n_max`.
    fn evaluate(&self, w: &SimilarityMatrix, axis: Axis, k: usize, n_max: usize) -> Result<Vec<(usize, usize, usize)>> {
        let baskets = &self.train[&axis];
        let test = &self.test[&axis];
        let scorer = UserBasedScorer::new(w, baskets);
        let population: Vec<(usize, &BTreeSet<String>)> = test
            .iter()
            .filter(|(_, t)| !t.is_empty())
            .map(|(actor, t)| {
                w.position(actor)
                    .map(|i| (i, t))
                    .ok_or_else(|| Error::UnknownActor(actor.clone()))
            })
            .collect::<Result<_>>()?;
        let per_actor: Vec<(Vec<usize>, usize, usize)> = population
            .par_iter()
            .map(|&(target, truth)| {
                let list = scorer.top_n(target, n_max, k);
                let mut hits = Vec::with_capacity(n_max);
                let mut running = 0;
                for n in 0..n_max {
                    if let Some(&(item, _)) = list.get(n) {
                        if truth.contains(scorer.item_key(item)) {
                            running += 1;
                        }
                    }
                    hits.push(running);
                }
                (hits, list.len(), truth.len())
            })
            .collect();
        let relevant: usize = per_actor.iter().map(|a| a.2).sum();
        Ok((1..=n_max)
            .map(|n| {
                let hits = per_actor.iter().map(|a| a.0[n - 1]).sum();
                let listed = per_actor.iter().map(|a| a.1.min(n)).sum();
                (hits, listed, relevant)
            })
            .collect())
    }
}

/// Train/test state shared by every model run on one corpus and split.
pub struct Experiment {
    split: Option<SplitDataset>,
    users: Level,
    families: Level,
    family_groups: Vec<FamilyGroup>,
}

impl Experiment {
    /// Builds user and family matrices from the training partition only.
    /// The corpus must already be cleaned.
    pub fn prepare(corpus: &Corpus, split_point: Timestamp) -> Result<Self> {
        let split = temporal_split(&corpus.transactions, split_point)?;
        let test = Corpus {
            transactions: split.test.clone(),
            ..Corpus::default()
        };
        Self::build(corpus, &corpus.before(split_point), &test, Some(split))
    }

    /// Trains on the whole corpus with an empty test partition, for serving
    /// recommendations rather than evaluating them.
    pub fn prepare_full(corpus: &Corpus) -> Result<Self> {
        Self::build(corpus, corpus, &Corpus::default(), None)
    }

    fn build(corpus: &Corpus, train: &Corpus, test: &Corpus, split: Option<SplitDataset>) -> Result<Self> {
        let members = corpus.member_ids();
        let vectors = encode_profiles(train)?;
        let users = Level::build(
            members.clone(),
            profile_similarity_matrix(&vectors)?,
            |axis| extract_triples(train, axis),
            |axis| extract_triples(test, axis),
        )?;
        let family_groups = resolve_families(&corpus.families, &members)?;
        let families = Level::build(
            family_groups.iter().map(|f| f.family_id.clone()).collect(),
            profile_similarity_matrix(&family_profile_vectors(&vectors, &family_groups)?)?,
            |axis| lift_triples_to_family(&extract_triples(train, axis), &family_groups),
            |axis| lift_triples_to_family(&extract_triples(test, axis), &family_groups),
        )?;
        Ok(Experiment {
            split,
            users,
            families,
            family_groups,
        })
    }

    /// The train/test partition, absent for [`prepare_full`](Self::prepare_full).
    pub fn split(&self) -> Option<&SplitDataset> {
        self.split.as_ref()
    }

    /// Families including singleton wrappers, sorted by id.
    pub fn family_groups(&self) -> &[FamilyGroup] {
        &self.family_groups
    }

    fn level(&self, kind: ModelKind) -> Result<&Level> {
        match kind {
            ModelKind::HybridFamily => Ok(&self.families),
            _ => Ok(&self.users),
        }
    }

    /// The blended matrix `spec` recommends with on `axis`.
    pub fn similarity(&self, spec: &ModelSpec, axis: Axis) -> Result<SimilarityMatrix> {
        self.level(spec.kind)?.blend(&spec.blend_for(axis)?)
    }

    /// Per-source matrices of the level `kind` runs on.
    pub fn source_matrix(&self, kind: ModelKind, tag: SimTag) -> Result<&SimilarityMatrix> {
        self.level(kind)?
            .matrices
            .get(&tag)
            .ok_or_else(|| Error::MissingAxis(tag.to_string()))
    }

    pub fn actors(&self, kind: ModelKind) -> Result<&[String]> {
        Ok(&self.level(kind)?.actors)
    }

    pub fn train_baskets(&self, kind: ModelKind, axis: Axis) -> Result<&Baskets> {
        self.level(kind)?
            .train
            .get(&axis)
            .ok_or_else(|| Error::UnknownAxis(axis.to_string()))
    }

    pub fn test_baskets(&self, kind: ModelKind, axis: Axis) -> Result<&BTreeMap<String, BTreeSet<String>>> {
        self.level(kind)?
            .test
            .get(&axis)
            .ok_or_else(|| Error::UnknownAxis(axis.to_string()))
    }

    pub fn run(&self, spec: &ModelSpec) -> Result<EvalReport> {
        if spec.n_max == 0 {
            return Err(Error::ZeroLength);
        }
        let level = self.level(spec.kind)?;
        let hybrid = match spec.kind {
            ModelKind::User => None,
            _ => Some(level.blend(&spec.blend_for(Axis::Brand)?)?),
        };
        let mut rows = Vec::new();
        for axis in Axis::PRODUCT {
            let per_axis;
            let w = match &hybrid {
                Some(w) => w,
                None => {
                    per_axis = level.blend(&spec.blend_for(axis)?)?;
                    &per_axis
                }
            };
            let population = level.test[&axis].values().filter(|t| !t.is_empty()).count();
            for (n, (hits, listed, relevant)) in (1..).zip(level.evaluate(w, axis, spec.k, spec.n_max)?) {
                if relevant == 0 {
                    return Err(Error::EmptyDenominator("total test basket size"));
                }
                if listed == 0 {
                    return Err(Error::EmptyDenominator("total recommendation count"));
                }
                rows.push(ReportRow {
                    model: spec.kind,
                    axis,
                    n,
                    recall: hits as f64 / relevant as f64,
                    precision: hits as f64 / listed as f64,
                    population,
                });
            }
        }
        Ok(EvalReport { rows })
    }

    pub fn run_all(&self, specs: &[ModelSpec]) -> Result<EvalReport> {
        let mut report = EvalReport::default();
        for spec in specs {
            report.rows.extend(self.run(spec)?.rows);
        }
        Ok(report)
    }
}

/// Trains on the partition before `split_point` and evaluates `model` on
/// every product axis.
pub fn run_experiment(corpus: &Corpus, split_point: Timestamp, model: &ModelSpec) -> Result<EvalReport> {
    Experiment::prepare(corpus, split_point)?.run(model)
}

pub const REPORT_HEADER: [&str; 6] = ["model", "axis", "n", "recall", "precision", "population"];

/// Writes the report as delimited text after checking its invariants.
pub fn emit_report(report: &EvalReport, out: impl Write) -> Result<()> {
    if report.is_empty() {
        return Err(Error::EmptyReport);
    }
    report.check_invariants()?;
    let io = |e: csv::Error| Error::Csv {
        path: "<report>".into(),
        source: e,
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER).map_err(io)?;
    for r in &report.rows {
        w.write_record([
            r.model.as_str(),
            r.axis.as_str(),
            &r.n.to_string(),
            &r.recall.to_string(),
            &r.precision.to_string(),
            &r.population.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("<report>", e))
}

pub fn parse_report(input: impl Read) -> Result<EvalReport> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers().map_err(|e| Error::BadReport {
        line: 1,
        reason: e.to_string(),
    })?;
    if headers.iter().collect::<Vec<_>>() != REPORT_HEADER {
        return Err(Error::BadReport {
            line: 1,
            reason: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::BadReport {
            line: 0,
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |reason: &str| Error::BadReport {
            line,
            reason: reason.to_string(),
        };
        rows.push(ReportRow {
            model: rec[0].parse().map_err(|_| bad("model"))?,
            axis: rec[1].parse().map_err(|_| bad("axis"))?,
            n: rec[2].parse().map_err(|_| bad("n"))?,
            recall: rec[3].parse().map_err(|_| bad("recall"))?,
            precision: rec[4].parse().map_err(|_| bad("precision"))?,
            population: rec[5].parse().map_err(|_| bad("population"))?,
        });
    }
    Ok(EvalReport { rows })
}
