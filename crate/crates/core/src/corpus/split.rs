use super::{Timestamp, Transaction};
use crate::error::{Error, Result};

/// Transactions partitioned around `split_point`: train strictly before it,
/// test at or after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitDataset {
    pub train: Vec<Transaction>,
    pub test: Vec<Transaction>,
    pub split_point: Timestamp,
}

impl SplitDataset {
    pub fn train_fraction(&self) -> f64 {
        self.train.len() as f64 / (self.train.len() + self.test.len()) as f64
    }

    pub fn test_fraction(&self) -> f64 {
        self.test.len() as f64 / (self.train.len() + self.test.len()) as f64
    }
}

pub fn temporal_split(transactions: &[Transaction], split_point: Timestamp) -> Result<SplitDataset> {
    let (train, test): (Vec<_>, Vec<_>) = transactions
        .iter()
        .cloned()
        .partition(|t| t.timestamp < split_point);
    if train.is_empty() {
        return Err(Error::EmptyPartition {
            split_point,
            side: "train",
        });
    }
    if test.is_empty() {
        return Err(Error::EmptyPartition {
            split_point,
            side: "test",
        });
    }
    Ok(SplitDataset {
        train,
        test,
        split_point,
    })
}

/// Earliest transaction timestamp whose induced test share does not exceed
/// `test_fraction`.
pub fn split_point_for_test_fraction(transactions: &[Transaction], test_fraction: f64) -> Result<Timestamp> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::BadFraction(test_fraction));
    }
    let mut stamps: Vec<Timestamp> = transactions.iter().map(|t| t.timestamp).collect();
    stamps.sort_unstable();
    let n = stamps.len();
    let budget = (test_fraction * n as f64 + 1e-9).floor() as usize;
    // `stamps[i]` as split point puts everything from the first occurrence
    // of that timestamp onward into test.
    let mut i = 0;
    while i < n {
        if i > 0 && stamps[i] == stamps[i - 1] {
            i += 1;
            continue;
        }
        if n - i <= budget {
            return Ok(stamps[i]);
        }
        i += 1;
    }
    Err(Error::BadFraction(test_fraction))
}
