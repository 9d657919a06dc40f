use super::{ClientProfile, Corpus, Sex, UNKNOWN_LEVEL};
use crate::error::{Error, Result};

/// How many values each cleaning action touched.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleaningReport {
    pub ages_imputed: usize,
    pub incomes_imputed: usize,
    pub sex_unknown: usize,
    pub neighborhoods_unknown: usize,
    pub register_sources_unknown: usize,
    pub transactions_deleted: usize,
    pub transaction_fields_unknown: usize,
}

fn column_mean(
    profiles: &[ClientProfile],
    name: &'static str,
    get: impl Fn(&ClientProfile) -> Option<f64>,
) -> Result<Option<f64>> {
    if profiles.is_empty() {
        return Ok(None);
    }
    let (sum, count) = profiles
        .iter()
        .filter_map(&get)
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        return Err(Error::NoMean(name));
    }
    Ok(Some(sum / count as f64))
}

fn fill_unknown(field: &mut String, counter: &mut usize) {
    if field.trim().is_empty() {
        *field = UNKNOWN_LEVEL.to_string();
        *counter += 1;
    }
}

/// Numeric gaps get the column mean over present values, categorical gaps
/// get the `unknown` level, and transactions without a member are dropped.
/// Idempotent.
pub fn clean_missing(mut corpus: Corpus) -> Result<(Corpus, CleaningReport)> {
    let mut report = CleaningReport::default();
    let age_mean = column_mean(&corpus.profiles, "age", |p| p.age)?;
    let income_mean = column_mean(&corpus.profiles, "income", |p| p.income)?;

    for p in &mut corpus.profiles {
        if p.age.is_none() {
            p.age = age_mean;
            report.ages_imputed += 1;
        }
        if p.income.is_none() {
            p.income = income_mean;
            report.incomes_imputed += 1;
        }
        if p.sex.is_none() {
            p.sex = Some(Sex::Unknown);
            report.sex_unknown += 1;
        }
        if p.neighborhood.is_none() {
            p.neighborhood = Some(UNKNOWN_LEVEL.to_string());
            report.neighborhoods_unknown += 1;
        }
        if p.register_source.is_none() {
            p.register_source = Some(UNKNOWN_LEVEL.to_string());
            report.register_sources_unknown += 1;
        }
    }

    let before = corpus.transactions.len();
    corpus.transactions.retain(|t| !t.member_id.is_empty());
    report.transactions_deleted = before - corpus.transactions.len();
    for t in &mut corpus.transactions {
        fill_unknown(&mut t.product_brand, &mut report.transaction_fields_unknown);
        fill_unknown(&mut t.product_type, &mut report.transaction_fields_unknown);
        fill_unknown(&mut t.main_category, &mut report.transaction_fields_unknown);
    }
    Ok((corpus, report))
}
