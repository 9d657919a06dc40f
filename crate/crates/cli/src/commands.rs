use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use famrec_core::corpus::{
    clean_missing, parse_corpus, split_point_for_test_fraction, write_corpus, Axis, Corpus, CorpusPaths,
    ParseOptions, Timestamp,
};
use famrec_core::eval::{emit_report, EvalReport, Experiment, ModelKind, ModelSpec};
use famrec_core::recommend::{top_n_user_based, write_recommendations};
use famrec_core::simcore::{SimTag, SimilarityMatrix};
use famrec_core::synth::{describe as describe_corpus, generate as generate_corpus};
use famrec_core::{Error, ErrorKind};

use crate::cache::{matrix_bytes, sha256_hex, MatrixCache};
use crate::config::{ConfigError, RunConfig, SplitChoice, WEIGHTED_TAGS};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Core(Error),
    Output { path: PathBuf, source: io::Error },
    Internal(String),
}

impl CliError {
    /// 1 usage or config, 2 data, 3 internal invariant.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Data => 2,
                ErrorKind::Internal => 3,
            },
            CliError::Output { .. } => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Output { path, source } => write!(f, "cannot write {}: {source}", path.display()),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn output(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    }
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(output(parent))?;
    }
    Ok(BufWriter::new(fs::File::create(path).map_err(output(path))?))
}

fn parse_options(cfg: &RunConfig) -> ParseOptions {
    ParseOptions {
        delimiter: cfg.delimiter,
        ..ParseOptions::default()
    }
}

/// The corpus as read (or generated), plus bytes identifying its source.
fn load_raw(cfg: &RunConfig) -> Result<(Corpus, Vec<u8>), CliError> {
    match &cfg.data_dir {
        Some(dir) => {
            if !dir.is_dir() {
                return Err(ConfigError(format!("data directory {} does not exist", dir.display())).into());
            }
            let paths = CorpusPaths::in_dir(dir);
            let (corpus, report) = parse_corpus(&paths, &parse_options(cfg))?;
            for r in &report.rejected {
                eprintln!("rejected {} line {}: {}", r.dataset, r.line, r.reason);
            }
            let mut identity = Vec::new();
            for p in paths.all() {
                identity.extend(fs::read(p).map_err(|e| Error::Io {
                    path: p.to_path_buf(),
                    source: e,
                })?);
            }
            Ok((corpus, identity))
        }
        None => Ok((generate_corpus(&cfg.synth)?, format!("{:?}", cfg.synth).into_bytes())),
    }
}

fn load_clean(cfg: &RunConfig) -> Result<(Corpus, Vec<u8>), CliError> {
    let (corpus, identity) = load_raw(cfg)?;
    let (corpus, _) = clean_missing(corpus)?;
    Ok((corpus, identity))
}

fn split_point(cfg: &RunConfig, corpus: &Corpus) -> Result<Timestamp, CliError> {
    Ok(match cfg.split {
        SplitChoice::Point(t) => t,
        SplitChoice::TestFraction(f) => split_point_for_test_fraction(&corpus.transactions, f)?,
    })
}

fn spec(cfg: &RunConfig, kind: ModelKind) -> ModelSpec {
    ModelSpec {
        kind,
        weights: cfg.weights.clone(),
        k: cfg.k,
        n_max: cfg.n_max,
    }
}

pub fn generate(cfg: &RunConfig) -> Result<(), CliError> {
    let corpus = generate_corpus(&cfg.synth)?;
    fs::create_dir_all(&cfg.out).map_err(output(&cfg.out))?;
    write_corpus(&corpus, &CorpusPaths::in_dir(&cfg.out), &parse_options(cfg))?;
    println!(
        "wrote {} profiles, {} transactions, {} visits, {} participations, {} families to {}",
        corpus.profiles.len(),
        corpus.transactions.len(),
        corpus.visits.len(),
        corpus.participations.len(),
        corpus.families.len(),
        cfg.out.display()
    );
    Ok(())
}

fn build_matrices(cfg: &RunConfig, corpus: &Corpus) -> Result<Vec<(String, SimilarityMatrix)>, CliError> {
    let experiment = Experiment::prepare(corpus, split_point(cfg, corpus)?)?;
    let mut out = Vec::new();
    for (level, kind) in [("user", ModelKind::HybridUser), ("family", ModelKind::HybridFamily)] {
        for tag in WEIGHTED_TAGS {
            out.push((format!("{level}_{tag}"), experiment.source_matrix(kind, tag)?.clone()));
        }
        let hybrid = experiment.similarity(&spec(cfg, kind), Axis::Brand)?;
        out.push((format!("{level}_{}", SimTag::Hybrid), hybrid));
    }
    Ok(out)
}

pub fn similarity(cfg: &RunConfig) -> Result<(), CliError> {
    let (corpus, identity) = load_clean(cfg)?;
    let mut hasher_input = identity;
    hasher_input.extend(cfg.matrix_settings().into_bytes());
    let fingerprint = sha256_hex(&hasher_input);
    let cache = MatrixCache::new(cfg.out.join("matrices"));
    let cached = if cfg.cache { cache.load(&fingerprint) } else { None };
    let (matrices, origin) = match cached {
        Some(m) => (m, "cache"),
        None => {
            let m = build_matrices(cfg, &corpus)?;
            cache
                .store(&fingerprint, &m)
                .map_err(output(&cfg.out.join("matrices")))?;
            (m, "built")
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let io_err = output(Path::new("<stdout>"));
    let lines: Vec<String> = matrices
        .iter()
        .map(|(name, m)| format!("{name}\t{}\t{}\t{origin}", m.len(), sha256_hex(&matrix_bytes(m))))
        .collect();
    writeln!(out, "matrix\tactors\tsha256\tsource\n{}", lines.join("\n")).map_err(io_err)
}

pub fn recommend(cfg: &RunConfig, actor: &str, model: &str, axis: &str, n: usize) -> Result<(), CliError> {
    let kind: ModelKind = model.parse()?;
    let axis: Axis = axis.parse()?;
    if !Axis::PRODUCT.contains(&axis) {
        return Err(Error::UnknownAxis(format!("{axis} is not a product axis")).into());
    }
    if n == 0 {
        return Err(Error::ZeroLength.into());
    }
    let (corpus, _) = load_clean(cfg)?;
    let experiment = Experiment::prepare_full(&corpus)?;
    let w = experiment.similarity(&spec(cfg, kind), axis)?;
    let list = top_n_user_based(experiment.train_baskets(kind, axis)?, &w, actor, n, cfg.k)?;
    write_recommendations(io::stdout().lock(), &[list]).map_err(output(Path::new("<stdout>")))
}

fn write_summary(report: &EvalReport, out: impl Write) -> io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "model,n,recall_mean,precision_mean")?;
    for model in report.models() {
        for n in report.n_values() {
            if let Some((r, p)) = report.axis_mean(model, n) {
                writeln!(w, "{model},{n},{r},{p}")?;
            }
        }
    }
    w.flush()
}

pub fn evaluate(cfg: &RunConfig) -> Result<(), CliError> {
    let (corpus, _) = load_clean(cfg)?;
    let point = split_point(cfg, &corpus)?;
    let experiment = Experiment::prepare(&corpus, point)?;
    let specs: Vec<ModelSpec> = cfg.models.iter().map(|&m| spec(cfg, m)).collect();
    let report = experiment.run_all(&specs)?;

    let report_path = cfg.out.join("report.csv");
    let mut file = create_file(&report_path)?;
    emit_report(&report, &mut file)?;
    file.flush().map_err(output(&report_path))?;
    let summary_path = cfg.out.join("summary.csv");
    write_summary(&report, create_file(&summary_path)?).map_err(output(&summary_path))?;

    let split = experiment.split().expect("evaluation runs on a split");
    println!(
        "split at {point}: {} train / {} test transactions; {} rows in {}",
        split.train.len(),
        split.test.len(),
        report.len(),
        report_path.display()
    );
    write_summary(&report, io::stdout().lock()).map_err(output(Path::new("<stdout>")))
}

pub fn describe(cfg: &RunConfig, top: usize) -> Result<(), CliError> {
    let (corpus, _) = load_raw(cfg)?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let io_err = |e| CliError::Output {
        path: "<stdout>".into(),
        source: e,
    };
    writeln!(out, "axis,rank,item,count").map_err(io_err)?;
    for (axis, rows) in describe_corpus(&corpus) {
        for (rank, (item, count)) in rows.iter().take(top).enumerate() {
            writeln!(out, "{axis},{},{item},{count}", rank + 1).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}
