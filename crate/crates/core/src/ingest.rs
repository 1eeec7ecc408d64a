//! Exported Satake parameter records: loading, empirical `S(r)` proportions,
//! comparison with the density bounds, and a small paged HTTP fetcher.
//!
//! Proportions are natural proportions over primes up to `x_max`. They stand
//! in for lower Dirichlet densities, which agree with them whenever the
//! natural density exists but are not the same quantity in general.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::{m_of_r, theorem_bound, Theorem, TheoremOptions};
use crate::class::{pair, SatakeClass, Scalar};
use crate::error::{contract, Error, Result};

/// Modulus slack used when testing membership of exported parameters.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Default slack before a shortfall against a bound counts as a violation.
pub const EPS_STAT: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatakeRecord {
    pub object_label: String,
    pub degree: usize,
    pub field_label: String,
    pub prime_norm: u64,
    #[serde(with = "pair::vec")]
    pub satake: Vec<Scalar>,
}

impl SatakeRecord {
    pub fn validate(&self) -> Result<()> {
        if self.satake.len() != self.degree {
            return Err(contract(format!(
                "degree {} but {} Satake parameters",
                self.degree,
                self.satake.len()
            )));
        }
        if self.prime_norm < 2 {
            return Err(contract(format!(
                "prime_norm must be at least 2, got {}",
                self.prime_norm
            )));
        }
        if let Some(z) = self
            .satake
            .iter()
            .find(|z| !z.is_finite() || z.norm() == 0.0)
        {
            return Err(contract(format!("invalid Satake parameter {z}")));
        }
        Ok(())
    }

    pub fn to_class(&self) -> Result<SatakeClass> {
        SatakeClass::with_prime(
            self.satake.clone(),
            Some(self.prime_norm.to_string()),
            self.prime_norm as f64,
        )
    }

    /// Membership in `S(r)` with the given modulus slack.
    pub fn in_s_r(&self, r: f64, tol: f64) -> Result<bool> {
        if !(r >= 1.0) {
            return Err(contract(format!("S(r) needs r >= 1, got {r}")));
        }
        let (lo, hi) = (1.0 / r - tol, r + tol);
        Ok(self.satake.iter().all(|z| (lo..=hi).contains(&z.norm())))
    }
}

/// Parses JSONL records; blank lines are skipped and errors carry 1-based line numbers.
pub fn parse_records(reader: impl BufRead) -> Result<Vec<SatakeRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let rec: SatakeRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        rec.validate().map_err(|e| parse_err(e.to_string()))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<SatakeRecord>> {
    parse_records(BufReader::new(fs::File::open(path)?))
}

/// Writes one record per line. Floats use shortest round-trip formatting, so
/// reading the file back gives identical records.
pub fn write_records(path: impl AsRef<Path>, records: &[SatakeRecord]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub object_label: String,
    pub degree: usize,
    pub r: f64,
    pub primes_counted: u64,
    pub in_s_r_count: u64,
    pub proportion: f64,
    pub x_max: u64,
    pub note: String,
}

const PROPORTION_NOTE: &str =
    "natural proportion of primes up to x_max; a finite proxy for lower Dirichlet density";

/// Proportion of records with `prime_norm ≤ x_max` whose class lies in `S(r)`.
pub fn empirical_density(records: &[SatakeRecord], r: f64, x_max: u64) -> Result<EmpiricalReport> {
    empirical_density_with_tol(records, r, x_max, MEMBERSHIP_TOL)
}

pub fn empirical_density_with_tol(
    records: &[SatakeRecord],
    r: f64,
    x_max: u64,
    tol: f64,
) -> Result<EmpiricalReport> {
    if !(r >= 1.0) {
        return Err(contract(format!("r must be at least 1, got {r}")));
    }
    let first = records
        .first()
        .ok_or_else(|| contract("no records to analyse"))?;
    if let Some(other) = records
        .iter()
        .find(|x| x.object_label != first.object_label)
    {
        return Err(contract(format!(
            "records mix objects {:?} and {:?}",
            first.object_label, other.object_label
        )));
    }
    if records.iter().any(|x| x.degree != first.degree) {
        return Err(contract("records mix degrees"));
    }
    let kept: Vec<&SatakeRecord> = records.iter().filter(|x| x.prime_norm <= x_max).collect();
    if kept.is_empty() {
        return Err(contract(format!("no records with prime_norm <= {x_max}")));
    }
    let mut inside = 0u64;
    for rec in &kept {
        if rec.in_s_r(r, tol)? {
            inside += 1;
        }
    }
    let counted = kept.len() as u64;
    Ok(EmpiricalReport {
        object_label: first.object_label.clone(),
        degree: first.degree,
        r,
        primes_counted: counted,
        in_s_r_count: inside,
        proportion: inside as f64 / counted as f64,
        x_max,
        note: PROPORTION_NOTE.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub object_label: String,
    pub theorem: Theorem,
    /// Radius of the empirical set.
    pub r: f64,
    /// Radius at which the theorem was evaluated.
    pub theorem_r: f64,
    pub proportion: f64,
    pub lower_bound: f64,
    pub margin: f64,
    pub eps_stat: f64,
    pub violation: bool,
}

/// The theorem radius whose guaranteed set is `S(r)`.
///
/// The GL(3) statement bounds parameters by `x` with `x + 1/x = r_T + 1`, so
/// `S(r)` corresponds to `r_T = r + 1/r - 1`. The other statements are about
/// `S(r)` itself, or about `S(1) ⊆ S(r)`.
pub fn theorem_radius(theorem: Theorem, r: f64) -> f64 {
    match theorem {
        Theorem::T4 => m_of_r(r) - 1.0,
        Theorem::T1 | Theorem::T2 => r,
        Theorem::T3 | Theorem::GL3SelfDual | Theorem::CorollaryQuarter => 1.0,
    }
}

pub fn compare_bounds(
    report: &EmpiricalReport,
    theorem: Theorem,
    opts: &TheoremOptions,
    eps_stat: f64,
) -> Result<Comparison> {
    if report.degree != theorem.degree() {
        return Err(contract(format!(
            "{theorem} concerns degree {} but the records have degree {}",
            theorem.degree(),
            report.degree
        )));
    }
    if !(eps_stat >= 0.0) {
        return Err(contract("eps_stat must be non-negative"));
    }
    let theorem_r = theorem_radius(theorem, report.r);
    let bound = theorem_bound(theorem, theorem_r, opts)?;
    let margin = report.proportion - bound.lower_bound;
    Ok(Comparison {
        object_label: report.object_label.clone(),
        theorem,
        r: report.r,
        theorem_r,
        proportion: report.proportion,
        lower_bound: bound.lower_bound,
        margin,
        eps_stat,
        violation: margin < -eps_stat,
    })
}

/// How parameter values are stored in the remote response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleConvention {
    /// Angles `θ` in turns; the parameter is `exp(2πiθ)`.
    Unit,
    /// `[re, im]` pairs.
    Raw,
}

/// Names of the JSON fields holding each piece of a remote record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMapping {
    pub prime_field: String,
    pub satake_field: String,
    pub angle_convention: AngleConvention,
    #[serde(default = "default_label_field")]
    pub label_field: String,
    #[serde(default = "default_field_label_field")]
    pub field_label_field: String,
    /// Key of the record array when the response is an object.
    #[serde(default = "default_data_field")]
    pub data_field: String,
    /// Field label used when a record does not carry one.
    #[serde(default = "default_field_label")]
    pub default_field_label: String,
}

fn default_label_field() -> String {
    "label".into()
}
fn default_field_label_field() -> String {
    "field_label".into()
}
fn default_data_field() -> String {
    "data".into()
}
fn default_field_label() -> String {
    "1.1.1.1".into()
}

impl FieldMapping {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Converts one response item. `fallback_label` names objects without a label field.
    pub fn record(&self, item: &Value, fallback_label: &str) -> Result<SatakeRecord> {
        let bad = |what: &str| Error::Transport(format!("malformed record: {what}"));
        let prime_norm = item
            .get(&self.prime_field)
            .and_then(Value::as_u64)
            .ok_or_else(|| bad(&format!("missing integer field {:?}", self.prime_field)))?;
        let raw = item
            .get(&self.satake_field)
            .and_then(Value::as_array)
            .ok_or_else(|| bad(&format!("missing array field {:?}", self.satake_field)))?;
        let satake = raw
            .iter()
            .map(|v| match self.angle_convention {
                AngleConvention::Unit => v
                    .as_f64()
                    .map(|theta| Scalar::from_polar(1.0, TAU * theta))
                    .ok_or_else(|| bad("angle is not a number")),
                AngleConvention::Raw => serde_json::from_value::<[f64; 2]>(v.clone())
                    .map(|[re, im]| Scalar::new(re, im))
                    .map_err(|_| bad("parameter is not a [re, im] pair")),
            })
            .collect::<Result<Vec<_>>>()?;
        let text = |field: &str, default: &str| {
            item.get(field)
                .and_then(Value::as_str)
                .unwrap_or(default)
                .to_owned()
        };
        let rec = SatakeRecord {
            object_label: text(&self.label_field, fallback_label),
            degree: satake.len(),
            field_label: text(&self.field_label_field, &self.default_field_label),
            prime_norm,
            satake,
        };
        rec.validate().map_err(|e| bad(&e.to_string()))?;
        Ok(rec)
    }
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub limit: usize,
    pub page_size: usize,
    /// Requests in flight at once.
    pub concurrency: usize,
    pub attempts: u32,
    /// Delay before the first retry; doubled on each further retry.
    pub backoff: Duration,
    pub timeout: Duration,
    pub cache_dir: PathBuf,
    pub mapping: FieldMapping,
}

impl FetchOptions {
    pub fn new(mapping: FieldMapping, cache_dir: impl Into<PathBuf>, limit: usize) -> Self {
        Self {
            limit,
            page_size: 100,
            concurrency: 4,
            attempts: 3,
            backoff: Duration::from_millis(200),
            timeout: Duration::from_secs(30),
            cache_dir: cache_dir.into(),
            mapping,
        }
    }
}

fn page_url(base_url: &str, query: &str, offset: usize, size: usize) -> String {
    let sep = if base_url.contains('?') { '&' } else { '?' };
    let q = query.trim_start_matches(['?', '&']);
    if q.is_empty() {
        format!("{base_url}{sep}_offset={offset}&_limit={size}")
    } else {
        format!("{base_url}{sep}{q}&_offset={offset}&_limit={size}")
    }
}

fn get_json(agent: &ureq::Agent, url: &str) -> std::result::Result<Value, String> {
    let body = agent
        .get(url)
        .call()
        .map_err(|e| e.to_string())?
        .into_string()
        .map_err(|e| e.to_string())?;
    serde_json::from_str(&body).map_err(|e| format!("bad JSON from {url}: {e}"))
}

fn fetch_page(agent: &ureq::Agent, url: &str, opts: &FetchOptions) -> Result<Vec<Value>> {
    let mut delay = opts.backoff;
    let mut last = String::new();
    for attempt in 0..opts.attempts.max(1) {
        if attempt > 0 {
            thread::sleep(delay);
            delay *= 2;
        }
        match get_json(agent, url) {
            Ok(Value::Array(items)) => return Ok(items),
            Ok(Value::Object(mut obj)) => match obj.remove(&opts.mapping.data_field) {
                Some(Value::Array(items)) => return Ok(items),
                Some(Value::Null) | None => return Ok(Vec::new()),
                Some(_) => last = format!("field {:?} is not an array", opts.mapping.data_field),
            },
            Ok(_) => last = "response is neither an array nor an object".into(),
            Err(e) => last = e,
        }
    }
    Err(Error::Transport(format!(
        "{url}: giving up after {} attempts: {last}",
        opts.attempts.max(1)
    )))
}

/// Fetches up to `opts.limit` records page by page, with `opts.concurrency`
/// pages in flight, and caches them as `cache_dir/<object_label>.jsonl`.
///
/// Records are returned sorted by object label and then prime norm.
pub fn fetch_remote(base_url: &str, query: &str, opts: &FetchOptions) -> Result<Vec<SatakeRecord>> {
    if opts.page_size == 0 || opts.concurrency == 0 {
        return Err(contract("page size and concurrency must be positive"));
    }
    let agent = ureq::AgentBuilder::new().timeout(opts.timeout).build();
    let fallback = if query.is_empty() { "remote" } else { query };
    let mut items: Vec<Value> = Vec::new();
    let mut offset = 0;
    'pages: while items.len() < opts.limit {
        let offsets: Vec<usize> = (0..opts.concurrency)
            .map(|k| offset + k * opts.page_size)
            .take_while(|&o| o < opts.limit)
            .collect();
        let pages: Vec<Result<Vec<Value>>> = thread::scope(|s| {
            let handles: Vec<_> = offsets
                .iter()
                .map(|&o| {
                    let url = page_url(base_url, query, o, opts.page_size);
                    let agent = &agent;
                    s.spawn(move || fetch_page(agent, &url, opts))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .unwrap_or_else(|_| Err(Error::Transport("fetch thread panicked".into())))
                })
                .collect()
        });
        for page in pages {
            let page = page?;
            let short = page.len() < opts.page_size;
            items.extend(page);
            if short {
                break 'pages;
            }
        }
        offset += offsets.len() * opts.page_size;
    }
    items.truncate(opts.limit);

    let mut records = items
        .iter()
        .map(|item| opts.mapping.record(item, fallback))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| {
        a.object_label
            .cmp(&b.object_label)
            .then(a.prime_norm.cmp(&b.prime_norm))
    });

    let mut by_label: BTreeMap<&str, Vec<SatakeRecord>> = BTreeMap::new();
    for rec in &records {
        by_label
            .entry(&rec.object_label)
            .or_default()
            .push(rec.clone());
    }
    if !by_label.is_empty() {
        fs::create_dir_all(&opts.cache_dir)?;
    }
    for (label, recs) in by_label {
        write_records(opts.cache_dir.join(cache_file_name(label)), &recs)?;
    }
    Ok(records)
}

/// `<label>.jsonl`, with path separators replaced.
pub fn cache_file_name(label: &str) -> String {
    let safe: String = label
        .chars()
        .map(|c| {
            if matches!(c, '/' | '\\' | ':') {
                '_'
            } else {
                c
            }
        })
        .collect();
    format!("{safe}.jsonl")
}
