//! Dataset schemas, parsing, cleaning, triple extraction, profile encoding
//! and the temporal train/test split.

mod clean;
mod parse;
mod profile;
mod split;
mod triples;

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDateTime;

pub use clean::{clean_missing, CleaningReport};
pub use parse::{parse_corpus, write_corpus, CorpusPaths, ParseOptions, ParseReport, RejectedRow};
pub use profile::{encode_profiles, BlockKind, LayoutBlock, ProfileLayout, ProfileVector};
pub use split::{split_point_for_test_fraction, temporal_split, SplitDataset};
pub use triples::{extract_triples, InteractionTriple, Triples};

use crate::error::Error;

pub type Timestamp = NaiveDateTime;

/// Wire format for every timestamp column.
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

/// Level used for categoricals that were missing in the input.
pub const UNKNOWN_LEVEL: &str = "unknown";

pub fn parse_timestamp(s: &str) -> Option<Timestamp> {
    NaiveDateTime::parse_from_str(s.trim(), TIMESTAMP_FORMAT).ok()
}

pub fn format_timestamp(ts: &Timestamp) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sex {
    Female,
    Male,
    Unknown,
}

impl Sex {
    pub fn as_str(self) -> &'static str {
        match self {
            Sex::Female => "female",
            Sex::Male => "male",
            Sex::Unknown => UNKNOWN_LEVEL,
        }
    }
}

impl FromStr for Sex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "female" | "f" => Ok(Sex::Female),
            "male" | "m" => Ok(Sex::Male),
            "unknown" => Ok(Sex::Unknown),
            other => Err(format!("unrecognized sex `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClientProfile {
    pub member_id: String,
    pub join_days: u32,
    pub sex: Option<Sex>,
    pub age: Option<f64>,
    pub phone_present: bool,
    pub email_present: bool,
    pub neighborhood: Option<String>,
    pub register_source: Option<String>,
    pub income: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    /// Empty until cleaning deletes the row.
    pub member_id: String,
    pub timestamp: Timestamp,
    pub product_brand: String,
    pub product_type: String,
    pub main_category: String,
    pub quantity: u32,
}

impl Transaction {
    pub fn item(&self, axis: Axis) -> Option<&str> {
        match axis {
            Axis::Brand => Some(&self.product_brand),
            Axis::Type => Some(&self.product_type),
            Axis::Category => Some(&self.main_category),
            Axis::Activity => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Visit {
    pub member_id: String,
    pub check_in: Timestamp,
    pub check_out: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Participation {
    pub member_id: String,
    pub activity_id: String,
    pub timestamp: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyGroup {
    pub family_id: String,
    pub member_ids: Vec<String>,
}

/// The five input collections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub profiles: Vec<ClientProfile>,
    pub transactions: Vec<Transaction>,
    pub visits: Vec<Visit>,
    pub participations: Vec<Participation>,
    pub families: Vec<FamilyGroup>,
}

impl Corpus {
    /// Member ids in profile order.
    pub fn member_ids(&self) -> Vec<String> {
        self.profiles.iter().map(|p| p.member_id.clone()).collect()
    }

    /// Copy of the corpus whose transactions and participations all happen
    /// strictly before `split_point`.
    pub fn before(&self, split_point: Timestamp) -> Corpus {
        Corpus {
            profiles: self.profiles.clone(),
            transactions: self
                .transactions
                .iter()
                .filter(|t| t.timestamp < split_point)
                .cloned()
                .collect(),
            visits: self
                .visits
                .iter()
                .filter(|v| v.check_in < split_point)
                .cloned()
                .collect(),
            participations: self
                .participations
                .iter()
                .filter(|p| p.timestamp < split_point)
                .cloned()
                .collect(),
            families: self.families.clone(),
        }
    }
}

/// Item axis a triple collection lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Brand,
    Type,
    Category,
    Activity,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::Brand, Axis::Type, Axis::Category, Axis::Activity];
    /// Axes that can be recommended.
    pub const PRODUCT: [Axis; 3] = [Axis::Brand, Axis::Type, Axis::Category];

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Brand => "brand",
            Axis::Type => "type",
            Axis::Category => "category",
            Axis::Activity => "activity",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "brand" => Ok(Axis::Brand),
            "type" => Ok(Axis::Type),
            "category" => Ok(Axis::Category),
            "activity" => Ok(Axis::Activity),
            other => Err(Error::UnknownAxis(other.to_string())),
        }
    }
}
