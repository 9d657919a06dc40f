use std::collections::HashSet;
use std::ops::Range;
use std::sync::Arc;

use super::{ClientProfile, Corpus, Sex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockKind {
    /// Min-max scaled to `[0, 1]`.
    Scaled,
    /// 0/1 presence indicator.
    Flag,
    /// One-hot block; position `i` is `levels[i]`.
    OneHot { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutBlock {
    pub name: &'static str,
    pub range: Range<usize>,
    pub kind: BlockKind,
}

/// Column layout shared by every vector of one encoding.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProfileLayout {
    pub blocks: Vec<LayoutBlock>,
}

impl ProfileLayout {
    pub fn len(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.range.end)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block(&self, name: &str) -> Option<&LayoutBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }

    fn push(&mut self, name: &'static str, width: usize, kind: BlockKind) {
        let start = self.len();
        self.blocks.push(LayoutBlock {
            name,
            range: start..start + width,
            kind,
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileVector {
    pub actor_id: String,
    pub values: Vec<f64>,
    pub layout: Arc<ProfileLayout>,
}

impl ProfileVector {
    pub fn block(&self, name: &str) -> Option<&[f64]> {
        self.layout.block(name).map(|b| &self.values[b.range.clone()])
    }
}

/// Levels in order of first appearance.
fn levels<'a>(values: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in values {
        if seen.insert(v) {
            out.push(v.to_string());
        }
    }
    out
}

struct MinMax {
    min: f64,
    max: f64,
}

impl MinMax {
    fn over(values: impl Iterator<Item = f64>) -> MinMax {
        values.fold(
            MinMax {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            },
            |acc, v| MinMax {
                min: acc.min.min(v),
                max: acc.max.max(v),
            },
        )
    }

    fn scale(&self, v: f64) -> f64 {
        let range = self.max - self.min;
        if range > 0.0 {
            ((v - self.min) / range).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

fn require<T: Copy>(p: &ClientProfile, v: Option<T>, field: &'static str) -> Result<T> {
    v.ok_or_else(|| Error::NotCleaned {
        member: p.member_id.clone(),
        field,
    })
}

fn require_str<'a>(p: &'a ClientProfile, v: &'a Option<String>, field: &'static str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::NotCleaned {
        member: p.member_id.clone(),
        field,
    })
}

/// Encodes every client profile of a cleaned corpus.
///
/// Layout: `join_days`, `sex` (male, female), `age`, `phone`, `email`,
/// `neighborhood` one-hot, `register_source` one-hot, `income`. Sex keeps the
/// fixed two-slot block, so an `unknown` sex encodes as all zeros. The other
/// categoricals order their levels by first occurrence in profile order.
pub fn encode_profiles(corpus: &Corpus) -> Result<Vec<ProfileVector>> {
    let profiles = &corpus.profiles;
    for p in profiles {
        require(p, p.age, "age")?;
        require(p, p.income, "income")?;
        require(p, p.sex, "sex")?;
        require_str(p, &p.neighborhood, "neighborhood")?;
        require_str(p, &p.register_source, "register_source")?;
    }

    let join = MinMax::over(profiles.iter().map(|p| f64::from(p.join_days)));
    let age = MinMax::over(profiles.iter().filter_map(|p| p.age));
    let income = MinMax::over(profiles.iter().filter_map(|p| p.income));
    let neighborhoods = levels(profiles.iter().filter_map(|p| p.neighborhood.as_deref()));
    let sources = levels(profiles.iter().filter_map(|p| p.register_source.as_deref()));

    let mut layout = ProfileLayout::default();
    layout.push("join_days", 1, BlockKind::Scaled);
    layout.push(
        "sex",
        2,
        BlockKind::OneHot {
            levels: vec![Sex::Male.as_str().into(), Sex::Female.as_str().into()],
        },
    );
    layout.push("age", 1, BlockKind::Scaled);
    layout.push("phone", 1, BlockKind::Flag);
    layout.push("email", 1, BlockKind::Flag);
    layout.push(
        "neighborhood",
        neighborhoods.len(),
        BlockKind::OneHot {
            levels: neighborhoods.clone(),
        },
    );
    layout.push(
        "register_source",
        sources.len(),
        BlockKind::OneHot {
            levels: sources.clone(),
        },
    );
    layout.push("income", 1, BlockKind::Scaled);
    let width = layout.len();
    let layout = Arc::new(layout);

    let one_hot = |out: &mut Vec<f64>, levels: &[String], value: &str| {
        out.extend(levels.iter().map(|l| if l == value { 1.0 } else { 0.0 }));
    };

    profiles
        .iter()
        .map(|p| {
            let mut values = Vec::with_capacity(width);
            values.push(join.scale(f64::from(p.join_days)));
            match p.sex {
                Some(Sex::Male) => values.extend([1.0, 0.0]),
                Some(Sex::Female) => values.extend([0.0, 1.0]),
                _ => values.extend([0.0, 0.0]),
            }
            values.push(age.scale(require(p, p.age, "age")?));
            values.push(if p.phone_present { 1.0 } else { 0.0 });
            values.push(if p.email_present { 1.0 } else { 0.0 });
            one_hot(&mut values, &neighborhoods, require_str(p, &p.neighborhood, "neighborhood")?);
            one_hot(&mut values, &sources, require_str(p, &p.register_source, "register_source")?);
            values.push(income.scale(require(p, p.income, "income")?));
            debug_assert_eq!(values.len(), width);
            Ok(ProfileVector {
                actor_id: p.member_id.clone(),
                values,
                layout: Arc::clone(&layout),
            })
        })
        .collect()
}
