//! Run configuration: a line-oriented `section.key = value` file, overridden
//! by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use famrec_core::aggregate::BlendSpec;
use famrec_core::corpus::{parse_timestamp, Timestamp};
use famrec_core::eval::{ModelKind, DEFAULT_N_MAX};
use famrec_core::recommend::DEFAULT_K;
use famrec_core::simcore::SimTag;
use famrec_core::synth::SynthConfig;

/// A configuration problem; always maps to the usage exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitChoice {
    Point(Timestamp),
    TestFraction(f64),
}

/// Source matrices that take a blend weight.
pub const WEIGHTED_TAGS: [SimTag; 5] = [
    SimTag::Brand,
    SimTag::Type,
    SimTag::Category,
    SimTag::Activity,
    SimTag::Profile,
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_dir: Option<PathBuf>,
    pub delimiter: u8,
    pub synth: SynthConfig,
    pub weights: BlendSpec,
    pub k: usize,
    pub split: SplitChoice,
    pub models: Vec<ModelKind>,
    pub n_max: usize,
    pub out: PathBuf,
    pub cache: bool,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_dir: None,
            delimiter: b',',
            synth: SynthConfig::default(),
            weights: BlendSpec::uniform(&WEIGHTED_TAGS).expect("positive"),
            k: DEFAULT_K,
            split: SplitChoice::TestFraction(0.2),
            models: ModelKind::ALL.to_vec(),
            n_max: DEFAULT_N_MAX,
            out: PathBuf::from("out"),
            cache: false,
            workers: None,
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .or_else(|_| err(format!("`{key}`: cannot parse `{value}`")))
}

fn boolean(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => err(format!("`{key}`: expected a boolean, got `{value}`")),
    }
}

fn timestamp(key: &str, value: &str) -> Result<Timestamp, ConfigError> {
    parse_timestamp(value)
        .map_or_else(|| err(format!("`{key}`: expected `YYYY-MM-DD HH:MM:SS`, got `{value}`")), Ok)
}

/// Parses `axis=w[,axis=w...]` on top of `base`; unnamed axes keep their weight.
pub fn parse_weights(value: &str, base: &BlendSpec) -> Result<BlendSpec, ConfigError> {
    let mut weights: Vec<(SimTag, f64)> = base.weights().to_vec();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((axis, w)) = part.split_once('=') else {
            return err(format!("weights: expected axis=weight, got `{part}`"));
        };
        let tag: SimTag = axis
            .trim()
            .parse()
            .or_else(|_| err(format!("weights: unknown axis `{}`", axis.trim())))?;
        if !WEIGHTED_TAGS.contains(&tag) {
            return err(format!("weights: `{tag}` cannot be weighted"));
        }
        let w: f64 = number("weights", w.trim())?;
        match weights.iter_mut().find(|(t, _)| *t == tag) {
            Some(slot) => slot.1 = w,
            None => weights.push((tag, w)),
        }
    }
    BlendSpec::new(weights).map_err(|e| ConfigError(format!("weights: {e}")))
}

impl RunConfig {
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "data.dir" => self.data_dir = Some(PathBuf::from(value)),
            "data.delimiter" => {
                let bytes = value.as_bytes();
                if bytes.len() != 1 {
                    return err("`data.delimiter` must be a single byte");
                }
                self.delimiter = bytes[0];
            }
            "model.k" => {
                self.k = number(key, value)?;
                if self.k == 0 {
                    return err("`model.k` must be positive");
                }
            }
            "model.weights" => self.weights = parse_weights(value, &self.weights)?,
            "model.kinds" => {
                self.models = value
                    .split(',')
                    .map(|m| m.trim().parse().map_err(|e| ConfigError(format!("{e}"))))
                    .collect::<Result<_, _>>()?;
                if self.models.is_empty() {
                    return err("`model.kinds` is empty");
                }
            }
            "split.point" => self.split = SplitChoice::Point(timestamp(key, value)?),
            "split.test_fraction" => {
                let f: f64 = number(key, value)?;
                if !(f > 0.0 && f < 1.0) {
                    return err("`split.test_fraction` must lie strictly between 0 and 1");
                }
                self.split = SplitChoice::TestFraction(f);
            }
            "eval.n_max" => {
                self.n_max = number(key, value)?;
                if !(1..=100).contains(&self.n_max) {
                    return err("`eval.n_max` must lie in 1..=100");
                }
            }
            "output.dir" => self.out = PathBuf::from(value),
            "output.cache" => self.cache = boolean(key, value)?,
            "run.workers" => {
                let w: usize = number(key, value)?;
                if w == 0 {
                    return err("`run.workers` must be positive");
                }
                self.workers = Some(w);
            }
            "synth.seed" => self.synth.seed = number(key, value)?,
            "synth.users" => self.synth.users = number(key, value)?,
            "synth.families" => self.synth.families = number(key, value)?,
            "synth.brands" => self.synth.brands = number(key, value)?,
            "synth.types" => self.synth.types = number(key, value)?,
            "synth.categories" => self.synth.categories = number(key, value)?,
            "synth.activities" => self.synth.activities = number(key, value)?,
            "synth.neighborhoods" => self.synth.neighborhoods = number(key, value)?,
            "synth.register_sources" => self.synth.register_sources = number(key, value)?,
            "synth.zipf_exponent" => self.synth.zipf_exponent = number(key, value)?,
            "synth.rho" => self.synth.rho = number(key, value)?,
            "synth.segments" => self.synth.segments = number(key, value)?,
            "synth.taste_spread" => self.synth.taste_spread = number(key, value)?,
            "synth.transactions" => self.synth.transactions = number(key, value)?,
            "synth.participations" => self.synth.participations = number(key, value)?,
            "synth.visits" => self.synth.visits = number(key, value)?,
            "synth.missing_rate" => self.synth.missing_rate = number(key, value)?,
            "synth.start" => self.synth.start = timestamp(key, value)?,
            "synth.end" => self.synth.end = timestamp(key, value)?,
            "synth.family_size_weights" => {
                let parts: Vec<f64> = value
                    .split(',')
                    .map(|p| number(key, p.trim()))
                    .collect::<Result<_, _>>()?;
                self.synth.family_size_weights = parts
                    .try_into()
                    .or_else(|_| err("`synth.family_size_weights` needs four values"))?;
            }
            _ => return err(format!("unknown setting `{key}`")),
        }
        Ok(())
    }

    /// Applies every setting of a config file. Lines are `key = value`;
    /// a `[section]` line prefixes later keys with `section.`; `#` starts a
    /// comment.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        let mut section = String::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("{origin}:{}: expected `key = value`", no + 1));
            };
            let key = key.trim();
            let key = if section.is_empty() || key.contains('.') {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            self.apply(&key, value)
                .map_err(|e| ConfigError(format!("{origin}:{}: {e}", no + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .or_else(|e| err(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Settings that determine matrix contents, in a stable textual form.
    pub fn matrix_settings(&self) -> String {
        let split = match self.split {
            SplitChoice::Point(t) => format!("point={t}"),
            SplitChoice::TestFraction(f) => format!("fraction={f}"),
        };
        let weights: Vec<String> = self
            .weights
            .weights()
            .iter()
            .map(|(t, w)| format!("{t}={w}"))
            .collect();
        format!(
            "delimiter={};split={split};weights={};synth={:?}",
            self.delimiter,
            weights.join(","),
            self.data_dir.is_none().then_some(&self.synth)
        )
    }
}
