//! Seeded synthetic corpora with family-correlated tastes.
//!
//! Every family draws a latent preference distribution per axis from Zipf
//! popularity, a taste segment and family noise. Each member mixes that
//! latent with an individual draw: `m = ρ·family + (1 − ρ)·individual`.
//! Purchases and participations sample from the member's distributions.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::corpus::{
    Axis, ClientProfile, Corpus, FamilyGroup, Participation, Sex, Timestamp, Transaction, Visit,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub users: usize,
    /// Families including single-member ones; every user belongs to exactly one.
    pub families: usize,
    pub brands: usize,
    pub types: usize,
    pub categories: usize,
    pub activities: usize,
    pub neighborhoods: usize,
    pub register_sources: usize,
    /// Popularity of the item with rank `r` (1-based) is `r^-s`.
    pub zipf_exponent: f64,
    /// Weight of the family latent in each member's preferences.
    pub rho: f64,
    pub segments: usize,
    /// Log-scale spread of segment, family and individual taste noise.
    pub taste_spread: f64,
    /// Relative frequency of family sizes 1, 2, 3 and 4.
    pub family_size_weights: [f64; 4],
    pub transactions: usize,
    pub participations: usize,
    pub visits: usize,
    /// Probability that each optional profile field is left empty.
    pub missing_rate: f64,
    pub start: Timestamp,
    pub end: Timestamp,
}

fn midnight(y: i32, m: u32, d: u32) -> Timestamp {
    NaiveDate::from_ymd_opt(y, m, d)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid date")
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            users: 4505,
            families: 1802,
            brands: 400,
            types: 80,
            categories: 20,
            activities: 40,
            neighborhoods: 12,
            register_sources: 5,
            zipf_exponent: 0.9,
            rho: 0.7,
            segments: 8,
            taste_spread: 1.5,
            family_size_weights: [0.25, 0.3, 0.25, 0.2],
            transactions: 25550,
            participations: 9000,
            visits: 60427,
            missing_rate: 0.02,
            start: midnight(2016, 1, 1),
            end: midnight(2016, 9, 2),
        }
    }
}

impl SynthConfig {
    /// Default catalog and time range with the population and volumes
    /// rescaled; participations and visits scale with transactions.
    pub fn scaled(users: usize, families: usize, transactions: usize) -> Self {
        let base = SynthConfig::default();
        let ratio = transactions as f64 / base.transactions as f64;
        SynthConfig {
            users,
            families,
            transactions,
            participations: (base.participations as f64 * ratio).round() as usize,
            visits: (base.visits as f64 * ratio).round() as usize,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::BadSynthConfig(m.to_string()));
        let counts = [
            self.users,
            self.families,
            self.brands,
            self.types,
            self.categories,
            self.activities,
            self.neighborhoods,
            self.register_sources,
            self.segments,
        ];
        if counts.contains(&0) {
            return bad("counts must be positive");
        }
        if self.families > self.users {
            return bad("more families than users; every family needs a member");
        }
        let weights = &self.family_size_weights;
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || weights.iter().sum::<f64>() <= 0.0 {
            return bad("family size weights must be nonnegative with a positive sum");
        }
        let max_size = weights.iter().rposition(|&w| w > 0.0).unwrap() + 1;
        let min_size = weights.iter().position(|&w| w > 0.0).unwrap() + 1;
        if self.users > self.families * max_size || self.users < self.families * min_size {
            return bad("users cannot be partitioned into families of the allowed sizes");
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad("rho must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.missing_rate) {
            return bad("missing rate must lie in [0, 1]");
        }
        if !self.zipf_exponent.is_finite() || self.zipf_exponent < 0.0 {
            return bad("zipf exponent must be nonnegative");
        }
        if !self.taste_spread.is_finite() || self.taste_spread < 0.0 {
            return bad("taste spread must be nonnegative");
        }
        if self.start >= self.end {
            return bad("time range is empty");
        }
        Ok(())
    }

    fn item_count(&self, axis: Axis) -> usize {
        match axis {
            Axis::Brand => self.brands,
            Axis::Type => self.types,
            Axis::Category => self.categories,
            Axis::Activity => self.activities,
        }
    }
}

pub fn item_name(axis: Axis, i: usize) -> String {
    let prefix = match axis {
        Axis::Brand => "BR",
        Axis::Type => "TY",
        Axis::Category => "CA",
        Axis::Activity => "AC",
    };
    format!("{prefix}{:04}", i + 1)
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// `base ⊙ exp(spread·z)` renormalized, with `z` standard normal per item.
fn perturb(rng: &mut ChaCha8Rng, base: &[f64], spread: f64) -> Vec<f64> {
    normalize(
        base.iter()
            .map(|&b| {
                let z: f64 = rng.sample(StandardNormal);
                b * (spread * z).exp()
            })
            .collect(),
    )
}

/// Per-axis distributions in `Axis::ALL` order.
pub type Preferences = [Vec<f64>; 4];

/// A generated corpus with the latent preferences behind it.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub corpus: Corpus,
    pub family_latents: BTreeMap<String, Preferences>,
    pub individual: BTreeMap<String, Preferences>,
    pub member: BTreeMap<String, Preferences>,
}

fn family_sizes(rng: &mut ChaCha8Rng, config: &SynthConfig) -> Vec<usize> {
    let weights = &config.family_size_weights;
    let pick = WeightedIndex::new(weights).expect("validated weights");
    let min_size = weights.iter().position(|&w| w > 0.0).unwrap() + 1;
    let max_size = weights.iter().rposition(|&w| w > 0.0).unwrap() + 1;
    let allowed = |s: usize| (min_size..=max_size).contains(&s);
    let mut sizes: Vec<usize> = (0..config.families).map(|_| pick.sample(rng) + 1).collect();
    let mut total: usize = sizes.iter().sum();
    // walk random families up or down until the sizes cover every user
    while total != config.users {
        let f = rng.gen_range(0..sizes.len());
        let next = if total < config.users { sizes[f] + 1 } else { sizes[f] - 1 };
        if allowed(next) {
            sizes[f] = next;
            total = if total < config.users { total + 1 } else { total - 1 };
        }
    }
    sizes
}

fn uniform_instant(rng: &mut ChaCha8Rng, config: &SynthConfig) -> Timestamp {
    let span = (config.end - config.start).num_seconds();
    config.start + Duration::seconds(rng.gen_range(0..span))
}

pub fn generate(config: &SynthConfig) -> Result<Corpus> {
    Ok(generate_detailed(config)?.corpus)
}

pub fn generate_detailed(config: &SynthConfig) -> Result<Synthetic> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let spread = config.taste_spread;

    let popularity: Vec<Vec<f64>> = Axis::ALL
        .iter()
        .map(|&a| {
            normalize(
                (1..=config.item_count(a))
                    .map(|r| (r as f64).powf(-config.zipf_exponent))
                    .collect(),
            )
        })
        .collect();
    let segment_taste: Vec<Vec<Vec<f64>>> = (0..config.segments)
        .map(|_| popularity.iter().map(|p| perturb(&mut rng, p, spread)).collect())
        .collect();
    let segment_income: Vec<f64> = (0..config.segments)
        .map(|_| 3000.0 * (0.4 * rng.sample::<f64, _>(StandardNormal)).exp())
        .collect();

    let sources = WeightedIndex::new((1..=config.register_sources).map(|r| 1.0 / r as f64)).expect("positive");
    let quantity = WeightedIndex::new([0.75, 0.17, 0.06, 0.02]).expect("positive");

    let sizes = family_sizes(&mut rng, config);
    let mut corpus = Corpus::default();
    let mut family_latents = BTreeMap::new();
    let mut individual = BTreeMap::new();
    let mut member_prefs = BTreeMap::new();
    let mut activity_weight = Vec::with_capacity(config.users);
    let mut next_member = 0;
    for (f, &size) in sizes.iter().enumerate() {
        let family_id = format!("F{:05}", f + 1);
        let segment = rng.gen_range(0..config.segments);
        let latent: Preferences = std::array::from_fn(|a| perturb(&mut rng, &segment_taste[segment][a], spread));
        let home = if rng.gen_bool(0.6) {
            segment % config.neighborhoods
        } else {
            rng.gen_range(0..config.neighborhoods)
        };
        let family_income = segment_income[segment] * (0.3 * rng.sample::<f64, _>(StandardNormal)).exp();
        let mut member_ids = Vec::with_capacity(size);
        let mut first_age = 0.0;
        let mut first_sex = Sex::Female;
        for m in 0..size {
            next_member += 1;
            let member_id = format!("M{:05}", next_member);
            let own: Preferences = std::array::from_fn(|a| perturb(&mut rng, &popularity[a], spread));
            let mixed: Preferences = std::array::from_fn(|a| {
                latent[a]
                    .iter()
                    .zip(&own[a])
                    .map(|(l, o)| config.rho * l + (1.0 - config.rho) * o)
                    .collect()
            });

            let (sex, age) = match m {
                0 => {
                    first_sex = if rng.gen_bool(0.5) { Sex::Female } else { Sex::Male };
                    first_age = rng.gen_range(25..=65) as f64;
                    (first_sex, first_age)
                }
                1 => {
                    let sex = match (first_sex, rng.gen_bool(0.85)) {
                        (Sex::Female, true) => Sex::Male,
                        (Sex::Male, true) => Sex::Female,
                        (s, _) => s,
                    };
                    (sex, (first_age + rng.gen_range(-5.0_f64..=5.0).round()).max(18.0))
                }
                _ => {
                    let sex = if rng.gen_bool(0.5) { Sex::Female } else { Sex::Male };
                    (sex, rng.gen_range(0..=((first_age - 18.0).max(0.0) as u32)) as f64)
                }
            };
            let shares_home = rng.gen_bool(config.rho);
            let neighborhood = if shares_home {
                home
            } else {
                rng.gen_range(0..config.neighborhoods)
            };
            let income = if shares_home {
                family_income * (0.2 * rng.sample::<f64, _>(StandardNormal)).exp()
            } else {
                segment_income[rng.gen_range(0..config.segments)] * (0.3 * rng.sample::<f64, _>(StandardNormal)).exp()
            };
            let join_days = rng.gen_range(0..3000);
            let phone_present = rng.gen_bool(0.85);
            let email_present = rng.gen_bool(0.45);
            let register_source = Some(format!("S{}", sources.sample(&mut rng) + 1));
            let mut missing = || rng.gen_bool(config.missing_rate);
            let profile = ClientProfile {
                member_id: member_id.clone(),
                join_days,
                sex: (!missing()).then_some(sex),
                age: (!missing()).then_some(age),
                phone_present,
                email_present,
                neighborhood: (!missing()).then(|| format!("N{:02}", neighborhood + 1)),
                register_source,
                income: (!missing()).then_some((income * 100.0).round() / 100.0),
            };
            corpus.profiles.push(profile);
            activity_weight.push((0.8 * rng.sample::<f64, _>(StandardNormal)).exp());
            family_latents.entry(family_id.clone()).or_insert_with(|| latent.clone());
            individual.insert(member_id.clone(), own);
            member_prefs.insert(member_id.clone(), mixed);
            member_ids.push(member_id);
        }
        corpus.families.push(FamilyGroup { family_id, member_ids });
    }

    let samplers: Vec<[WeightedIndex<f64>; 4]> = corpus
        .profiles
        .iter()
        .map(|p| {
            let prefs = &member_prefs[&p.member_id];
            std::array::from_fn(|a| WeightedIndex::new(&prefs[a]).expect("positive preferences"))
        })
        .collect();
    let who = WeightedIndex::new(&activity_weight).expect("positive weights");
    for _ in 0..config.transactions {
        let m = who.sample(&mut rng);
        let s = &samplers[m];
        corpus.transactions.push(Transaction {
            member_id: corpus.profiles[m].member_id.clone(),
            timestamp: uniform_instant(&mut rng, config),
            product_brand: item_name(Axis::Brand, s[0].sample(&mut rng)),
            product_type: item_name(Axis::Type, s[1].sample(&mut rng)),
            main_category: item_name(Axis::Category, s[2].sample(&mut rng)),
            quantity: quantity.sample(&mut rng) as u32 + 1,
        });
    }
    for _ in 0..config.participations {
        let m = rng.gen_range(0..config.users);
        corpus.participations.push(Participation {
            member_id: corpus.profiles[m].member_id.clone(),
            activity_id: item_name(Axis::Activity, samplers[m][3].sample(&mut rng)),
            timestamp: uniform_instant(&mut rng, config),
        });
    }
    for _ in 0..config.visits {
        let m = rng.gen_range(0..config.users);
        let check_in = uniform_instant(&mut rng, config);
        corpus.visits.push(Visit {
            member_id: corpus.profiles[m].member_id.clone(),
            check_in,
            check_out: check_in + Duration::minutes(rng.gen_range(10..=240)),
        });
    }
    corpus.transactions.sort_by_key(|a| a.timestamp);
    corpus.participations.sort_by_key(|a| a.timestamp);
    corpus.visits.sort_by_key(|a| a.check_in);

    Ok(Synthetic {
        corpus,
        family_latents,
        individual,
        member: member_prefs,
    })
}

/// Item frequency table per axis: `(item, records)` by descending count,
/// ties by ascending item. Product axes count transactions; activity counts
/// participations.
pub fn describe(corpus: &Corpus) -> Vec<(Axis, Vec<(String, u64)>)> {
    Axis::ALL
        .iter()
        .map(|&axis| {
            let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
            if axis == Axis::Activity {
                for p in &corpus.participations {
                    *counts.entry(&p.activity_id).or_default() += 1;
                }
            } else {
                for t in &corpus.transactions {
                    if let Some(item) = t.item(axis) {
                        *counts.entry(item).or_default() += 1;
                    }
                }
            }
            let mut rows: Vec<(String, u64)> = counts.into_iter().map(|(k, c)| (k.to_string(), c)).collect();
            rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            (axis, rows)
        })
        .collect()
}
