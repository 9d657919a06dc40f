use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupStrategy {
    Average,
    MostPleasure,
    LeastMisery,
    AverageWithoutMisery,
    MostRespected,
}

impl GroupStrategy {
    pub const ALL: [GroupStrategy; 5] = [
        GroupStrategy::Average,
        GroupStrategy::MostPleasure,
        GroupStrategy::LeastMisery,
        GroupStrategy::AverageWithoutMisery,
        GroupStrategy::MostRespected,
    ];
}

/// Member ratings of one item. `respected` and `misery_threshold` are only
/// read by the strategies that need them.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRatingInput {
    pub ratings: Vec<(String, f64)>,
    pub respected: Option<String>,
    pub misery_threshold: Option<f64>,
}

impl GroupRatingInput {
    pub fn new(ratings: Vec<(String, f64)>) -> Self {
        GroupRatingInput {
            ratings,
            respected: None,
            misery_threshold: None,
        }
    }
}

fn bounded_mean(values: impl Iterator<Item = f64> + Clone) -> Option<f64> {
    let (sum, n, lo, hi) = values.fold((0.0, 0usize, f64::INFINITY, f64::NEG_INFINITY), |(s, n, lo, hi), v| {
        (s + v, n + 1, lo.min(v), hi.max(v))
    });
    // rounding in the sum must not push the mean past min or max
    (n > 0).then(|| (sum / n as f64).clamp(lo, hi))
}

pub fn group_rating(input: &GroupRatingInput, strategy: GroupStrategy) -> Result<f64> {
    if input.ratings.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let values = input.ratings.iter().map(|&(_, r)| r);
    match strategy {
        GroupStrategy::Average => Ok(bounded_mean(values).expect("nonempty")),
        GroupStrategy::MostPleasure => Ok(values.fold(f64::NEG_INFINITY, f64::max)),
        GroupStrategy::LeastMisery => Ok(values.fold(f64::INFINITY, f64::min)),
        GroupStrategy::AverageWithoutMisery => {
            let threshold = input
                .misery_threshold
                .ok_or(Error::MissingStrategyInput("a misery threshold"))?;
            bounded_mean(values.filter(move |&r| r >= threshold)).ok_or(Error::NoRatingAboveThreshold(threshold))
        }
        GroupStrategy::MostRespected => {
            let who = input
                .respected
                .as_deref()
                .ok_or(Error::MissingStrategyInput("a respected member"))?;
            input
                .ratings
                .iter()
                .find(|(m, _)| m == who)
                .map(|&(_, r)| r)
                .ok_or_else(|| Error::RespectedNotInGroup(who.to_string()))
        }
    }
}

/// Merges per-member ranked lists by positional score: with `L` the longest
/// list, rank `p` (0-based) earns `L - p`. Returns the `n` best, ties broken
/// by ascending item key.
pub fn aggregate_recommendation_lists(lists: &[Vec<String>], n: usize) -> Result<Vec<String>> {
    if n == 0 {
        return Err(Error::ZeroLength);
    }
    if lists.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let longest = lists.iter().map(Vec::len).max().unwrap_or(0);
    let mut scores: HashMap<&str, usize> = HashMap::new();
    for list in lists {
        for (p, item) in list.iter().enumerate() {
            *scores.entry(item.as_str()).or_insert(0) += longest - p;
        }
    }
    let mut ranked: Vec<(&str, usize)> = scores.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(ranked.into_iter().take(n).map(|(i, _)| i.to_string()).collect())
}

/// Rating-level aggregation: each item's member predictions are combined
/// with `strategy`. Items no member rated are absent; items where the
/// strategy has no answer (e.g. every rating below the misery threshold, or
/// the respected member did not rate it) are dropped.
pub fn aggregate_rating_predictions(
    member_predictions: &[(String, BTreeMap<String, f64>)],
    strategy: GroupStrategy,
    respected: Option<&str>,
    misery_threshold: Option<f64>,
) -> Result<BTreeMap<String, f64>> {
    if member_predictions.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut per_item: BTreeMap<&str, Vec<(String, f64)>> = BTreeMap::new();
    for (member, preds) in member_predictions {
        for (item, &r) in preds {
            per_item.entry(item).or_default().push((member.clone(), r));
        }
    }
    let mut out = BTreeMap::new();
    for (item, ratings) in per_item {
        let input = GroupRatingInput {
            ratings,
            respected: respected.map(str::to_string),
            misery_threshold,
        };
        match group_rating(&input, strategy) {
            Ok(r) => {
                out.insert(item.to_string(), r);
            }
            Err(Error::NoRatingAboveThreshold(_) | Error::RespectedNotInGroup(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
