use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::path::{Path, PathBuf};

use csv::{ReaderBuilder, StringRecord, WriterBuilder};

use super::{
    format_timestamp, parse_timestamp, ClientProfile, Corpus, FamilyGroup, Participation, Sex,
    Transaction, Visit,
};
use crate::error::{Error, Result};

pub const PROFILE_HEADER: [&str; 9] = [
    "member_id",
    "join_days",
    "sex",
    "age",
    "phone",
    "email",
    "neighborhood",
    "register_source",
    "income",
];
pub const TRANSACTION_HEADER: [&str; 6] = [
    "member_id",
    "timestamp",
    "product_brand",
    "product_type",
    "main_category",
    "quantity",
];
pub const VISIT_HEADER: [&str; 3] = ["member_id", "check_in", "check_out"];
pub const PARTICIPATION_HEADER: [&str; 3] = ["member_id", "activity_id", "timestamp"];
pub const FAMILY_HEADER: [&str; 2] = ["family_id", "members"];

/// Locations of the five input tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorpusPaths {
    pub profiles: PathBuf,
    pub transactions: PathBuf,
    pub visits: PathBuf,
    pub participation: PathBuf,
    pub families: PathBuf,
}

impl CorpusPaths {
    /// Conventional file names inside one directory.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        CorpusPaths {
            profiles: dir.join("profiles.csv"),
            transactions: dir.join("transactions.csv"),
            visits: dir.join("visits.csv"),
            participation: dir.join("participation.csv"),
            families: dir.join("families.csv"),
        }
    }

    pub fn all(&self) -> [&Path; 5] {
        [
            &self.profiles,
            &self.transactions,
            &self.visits,
            &self.participation,
            &self.families,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub delimiter: u8,
    /// Separates member ids inside the family file's `members` column.
    pub member_delimiter: char,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            delimiter: b',',
            member_delimiter: '|',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    pub dataset: &'static str,
    pub line: u64,
    pub reason: String,
}

/// Rows that were skipped during parsing, with the line they came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub rejected: Vec<RejectedRow>,
}

impl ParseReport {
    fn reject(&mut self, dataset: &'static str, line: u64, reason: impl Into<String>) {
        self.rejected.push(RejectedRow {
            dataset,
            line,
            reason: reason.into(),
        });
    }
}

fn open_reader(path: &Path, opts: &ParseOptions, expected: &[&str]) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let headers = reader.headers().map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let found: Vec<&str> = headers.iter().map(str::trim).collect();
    if found != expected {
        return Err(Error::HeaderMismatch {
            path: path.to_path_buf(),
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(reader)
}

/// Iterates data rows as `(line, record)`, rejecting rows with the wrong
/// field count.
fn for_each_row(
    path: &Path,
    opts: &ParseOptions,
    dataset: &'static str,
    expected: &[&str],
    report: &mut ParseReport,
    mut f: impl FnMut(u64, &StringRecord, &mut ParseReport) -> Result<()>,
) -> Result<()> {
    let mut reader = open_reader(path, opts, expected)?;
    let mut record = StringRecord::new();
    loop {
        let more = reader.read_record(&mut record).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != expected.len() {
            report.reject(
                dataset,
                line,
                format!("expected {} fields, found {}", expected.len(), record.len()),
            );
            continue;
        }
        f(line, &record, report)?;
    }
    Ok(())
}

fn field(record: &StringRecord, i: usize) -> &str {
    record.get(i).unwrap_or("").trim()
}

fn optional(s: &str) -> Option<String> {
    (!s.is_empty()).then(|| s.to_string())
}

fn parse_nonneg(s: &str, name: &str) -> std::result::Result<Option<f64>, String> {
    if s.is_empty() {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
        _ => Err(format!("{name} `{s}` is not a nonnegative number")),
    }
}

fn parse_flag(s: &str, name: &str) -> std::result::Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "" | "0" | "false" | "no" => Ok(false),
        "1" | "true" | "yes" => Ok(true),
        _ => Err(format!("{name} `{s}` is not a 0/1 flag")),
    }
}

fn parse_profile(record: &StringRecord) -> std::result::Result<ClientProfile, String> {
    let member_id = field(record, 0);
    if member_id.is_empty() {
        return Err("empty member_id".into());
    }
    let join_days = field(record, 1)
        .parse::<u32>()
        .map_err(|_| format!("join_days `{}` is not a nonnegative integer", field(record, 1)))?;
    let sex = match field(record, 2) {
        "" => None,
        s => Some(s.parse::<Sex>()?),
    };
    Ok(ClientProfile {
        member_id: member_id.to_string(),
        join_days,
        sex,
        age: parse_nonneg(field(record, 3), "age")?,
        phone_present: parse_flag(field(record, 4), "phone")?,
        email_present: parse_flag(field(record, 5), "email")?,
        neighborhood: optional(field(record, 6)),
        register_source: optional(field(record, 7)),
        income: parse_nonneg(field(record, 8), "income")?,
    })
}

fn parse_transaction(
    record: &StringRecord,
    members: &HashSet<String>,
) -> std::result::Result<Transaction, String> {
    let member_id = field(record, 0);
    if !member_id.is_empty() && !members.contains(member_id) {
        return Err(format!("unknown member_id `{member_id}`"));
    }
    let timestamp = parse_timestamp(field(record, 1))
        .ok_or_else(|| format!("bad timestamp `{}`", field(record, 1)))?;
    let quantity = match field(record, 5).parse::<u32>() {
        Ok(q) if q >= 1 => q,
        _ => return Err(format!("quantity `{}` is not a positive integer", field(record, 5))),
    };
    Ok(Transaction {
        member_id: member_id.to_string(),
        timestamp,
        product_brand: field(record, 2).to_string(),
        product_type: field(record, 3).to_string(),
        main_category: field(record, 4).to_string(),
        quantity,
    })
}

fn parse_visit(record: &StringRecord, members: &HashSet<String>) -> std::result::Result<Visit, String> {
    let member_id = field(record, 0);
    if !members.contains(member_id) {
        return Err(format!("unknown member_id `{member_id}`"));
    }
    let check_in = parse_timestamp(field(record, 1))
        .ok_or_else(|| format!("bad check_in `{}`", field(record, 1)))?;
    let check_out = parse_timestamp(field(record, 2))
        .ok_or_else(|| format!("bad check_out `{}`", field(record, 2)))?;
    if check_in > check_out {
        return Err("check_in after check_out".into());
    }
    Ok(Visit {
        member_id: member_id.to_string(),
        check_in,
        check_out,
    })
}

fn parse_participation(
    record: &StringRecord,
    members: &HashSet<String>,
) -> std::result::Result<Participation, String> {
    let member_id = field(record, 0);
    if !members.contains(member_id) {
        return Err(format!("unknown member_id `{member_id}`"));
    }
    let activity_id = field(record, 1);
    if activity_id.is_empty() {
        return Err("empty activity_id".into());
    }
    let timestamp = parse_timestamp(field(record, 2))
        .ok_or_else(|| format!("bad timestamp `{}`", field(record, 2)))?;
    Ok(Participation {
        member_id: member_id.to_string(),
        activity_id: activity_id.to_string(),
        timestamp,
    })
}

/// Reads the five tables. Rows that violate a per-row invariant are skipped
/// and listed in the returned [`ParseReport`]; structural problems (missing
/// file, wrong header, duplicate member or family membership) are errors.
pub fn parse_corpus(paths: &CorpusPaths, opts: &ParseOptions) -> Result<(Corpus, ParseReport)> {
    let mut report = ParseReport::default();
    let mut corpus = Corpus::default();

    let mut members = HashSet::new();
    for_each_row(&paths.profiles, opts, "profiles", &PROFILE_HEADER, &mut report, |line, rec, report| {
        match parse_profile(rec) {
            Ok(profile) => {
                if !members.insert(profile.member_id.clone()) {
                    return Err(Error::DuplicateMember {
                        member: profile.member_id,
                        line,
                    });
                }
                corpus.profiles.push(profile);
            }
            Err(reason) => report.reject("profiles", line, reason),
        }
        Ok(())
    })?;

    for_each_row(
        &paths.transactions,
        opts,
        "transactions",
        &TRANSACTION_HEADER,
        &mut report,
        |line, rec, report| {
            match parse_transaction(rec, &members) {
                Ok(t) => corpus.transactions.push(t),
                Err(reason) => report.reject("transactions", line, reason),
            }
            Ok(())
        },
    )?;

    for_each_row(&paths.visits, opts, "visits", &VISIT_HEADER, &mut report, |line, rec, report| {
        match parse_visit(rec, &members) {
            Ok(v) => corpus.visits.push(v),
            Err(reason) => report.reject("visits", line, reason),
        }
        Ok(())
    })?;

    for_each_row(
        &paths.participation,
        opts,
        "participation",
        &PARTICIPATION_HEADER,
        &mut report,
        |line, rec, report| {
            match parse_participation(rec, &members) {
                Ok(p) => corpus.participations.push(p),
                Err(reason) => report.reject("participation", line, reason),
            }
            Ok(())
        },
    )?;

    let mut owner: HashMap<String, String> = HashMap::new();
    let mut family_ids = HashSet::new();
    for_each_row(&paths.families, opts, "families", &FAMILY_HEADER, &mut report, |line, rec, report| {
        let family_id = field(rec, 0);
        if family_id.is_empty() {
            report.reject("families", line, "empty family_id");
            return Ok(());
        }
        let member_ids: Vec<String> = field(rec, 1)
            .split(opts.member_delimiter)
            .map(str::trim)
            .filter(|m| !m.is_empty())
            .map(str::to_string)
            .collect();
        if member_ids.is_empty() {
            report.reject("families", line, format!("family `{family_id}` has no members"));
            return Ok(());
        }
        let distinct: HashSet<&String> = member_ids.iter().collect();
        if distinct.len() != member_ids.len() {
            report.reject("families", line, format!("family `{family_id}` repeats a member"));
            return Ok(());
        }
        if !family_ids.insert(family_id.to_string()) {
            return Err(Error::DuplicateFamily(family_id.to_string()));
        }
        for m in &member_ids {
            if !members.contains(m) {
                return Err(Error::UnknownFamilyMember {
                    family: family_id.to_string(),
                    member: m.clone(),
                });
            }
            if let Some(first) = owner.insert(m.clone(), family_id.to_string()) {
                return Err(Error::DuplicateMembership {
                    member: m.clone(),
                    first,
                    second: family_id.to_string(),
                });
            }
        }
        corpus.families.push(FamilyGroup {
            family_id: family_id.to_string(),
            member_ids,
        });
        Ok(())
    })?;

    Ok((corpus, report))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Writes the corpus in the format [`parse_corpus`] reads.
pub fn write_corpus(corpus: &Corpus, paths: &CorpusPaths, opts: &ParseOptions) -> Result<()> {
    fn writer(path: &Path, opts: &ParseOptions) -> Result<csv::Writer<File>> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(WriterBuilder::new().delimiter(opts.delimiter).from_writer(file))
    }
    fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
        move |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        }
    }

    let path = &paths.profiles;
    let mut w = writer(path, opts)?;
    w.write_record(PROFILE_HEADER).map_err(csv_err(path))?;
    for p in &corpus.profiles {
        w.write_record([
            p.member_id.clone(),
            p.join_days.to_string(),
            p.sex.map(|s| s.as_str().to_string()).unwrap_or_default(),
            fmt_opt(p.age),
            flag(p.phone_present).to_string(),
            flag(p.email_present).to_string(),
            p.neighborhood.clone().unwrap_or_default(),
            p.register_source.clone().unwrap_or_default(),
            fmt_opt(p.income),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let path = &paths.transactions;
    let mut w = writer(path, opts)?;
    w.write_record(TRANSACTION_HEADER).map_err(csv_err(path))?;
    for t in &corpus.transactions {
        w.write_record([
            t.member_id.as_str(),
            &format_timestamp(&t.timestamp),
            &t.product_brand,
            &t.product_type,
            &t.main_category,
            &t.quantity.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let path = &paths.visits;
    let mut w = writer(path, opts)?;
    w.write_record(VISIT_HEADER).map_err(csv_err(path))?;
    for v in &corpus.visits {
        w.write_record([
            v.member_id.as_str(),
            &format_timestamp(&v.check_in),
            &format_timestamp(&v.check_out),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let path = &paths.participation;
    let mut w = writer(path, opts)?;
    w.write_record(PARTICIPATION_HEADER).map_err(csv_err(path))?;
    for p in &corpus.participations {
        w.write_record([
            p.member_id.as_str(),
            &p.activity_id,
            &format_timestamp(&p.timestamp),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let path = &paths.families;
    let mut w = writer(path, opts)?;
    w.write_record(FAMILY_HEADER).map_err(csv_err(path))?;
    let sep = opts.member_delimiter.to_string();
    for f in &corpus.families {
        w.write_record([f.family_id.as_str(), &f.member_ids.join(&sep)])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
