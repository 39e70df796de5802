//! Verification manifests, result rows and deterministic reports.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predicates::SampleSpec;

use super::checks::{run_check, validate_check, Series};
use super::construct::{Builder, Built, ConstructionSpec};

/// Expected outcome of a manifest entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expected {
    Flag(bool),
    Value(f64),
    /// Closed interval; `null` ends are unbounded.
    Interval(Option<f64>, Option<f64>),
}

impl std::fmt::Display for Expected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let end = |v: &Option<f64>, inf: &str| v.map_or(inf.to_string(), |x| x.to_string());
        match self {
            Expected::Flag(b) => write!(f, "{b}"),
            Expected::Value(v) => write!(f, "{v}"),
            Expected::Interval(lo, hi) => write!(f, "[{};{}]", end(lo, "-inf"), end(hi, "inf")),
        }
    }
}

/// How attained values are compared with the expectation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Within a relative tolerance: `v ∈ [e/(1+t), e·(1+t)]`.
    Ratio,
    /// Within an absolute tolerance: `|v − e| <= t`.
    Absolute,
    /// The check's own pass/fail verdict must equal the expected flag.
    Flag,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Ratio => "ratio",
            Mode::Absolute => "absolute",
            Mode::Flag => "flag",
        })
    }
}

/// One line of a manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub construction: String,
    pub check: String,
    pub expected: Expected,
    pub mode: Mode,
    #[serde(default)]
    pub tolerance: f64,
    /// Name of the statement the entry instantiates.
    #[serde(default)]
    pub paper_ref: String,
    /// Where the expected value comes from (stated constant, derived
    /// oracle, trivial case).
    #[serde(default)]
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Absolute radius range; the estimator default applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
}

/// A verification manifest.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyManifest {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub entries: Vec<Entry>,
}

impl VerifyManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: VerifyManifest =
            serde_json::from_str(text).map_err(|e| Error::Usage(format!("malformed manifest: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    /// Checks names, constructions and mode/expectation consistency.
    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            let ctx = |msg: String| Error::Usage(format!("entry {i}: {msg}"));
            validate_check(&e.check).map_err(|err| ctx(err.to_string()))?;
            e.construction.parse::<ConstructionSpec>().map_err(|err| ctx(err.to_string()))?;
            let flag = matches!(e.expected, Expected::Flag(_));
            if flag != (e.mode == Mode::Flag) {
                return Err(ctx(format!("mode {} does not fit expectation {}", e.mode, e.expected)));
            }
            if !(e.tolerance >= 0.0 && e.tolerance.is_finite()) {
                return Err(ctx(format!("tolerance {} must be finite and >= 0", e.tolerance)));
            }
            if let (Some(lo), Some(hi)) = (e.r_min, e.r_max) {
                if !(lo > 0.0 && lo <= hi) {
                    return Err(ctx(format!("radius range [{lo}, {hi}] is invalid")));
                }
            }
        }
        Ok(())
    }

    /// Seed of entry `index`: word `index` of the manifest seed's stream.
    pub fn entry_seed(&self, index: usize) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng.next_u64()
    }
}

/// One result row.  Rows are keyed by `(construction, check, seed)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub construction: String,
    pub check: String,
    pub seed: u64,
    /// Attained value (`inf` for unbounded, `NaN` when the check errored).
    #[serde(with = "float_text")]
    pub value: f64,
    pub expected: String,
    pub mode: String,
    pub samples: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub paper_ref: String,
    pub provenance: String,
    /// `pass`, `fail`, or `n/a` when nothing was expected.
    pub pass: String,
    pub note: String,
}

impl Row {
    pub fn key(&self) -> (String, String, u64) {
        (self.construction.clone(), self.check.clone(), self.seed)
    }

    pub fn passed(&self) -> bool {
        self.pass != "fail"
    }
}

/// Floats as text so that `inf` and `NaN` survive JSON.
mod float_text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::fmt_f64(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_f64(&text).ok_or_else(|| serde::de::Error::custom(format!("bad number {text:?}")))
    }
}

/// Shortest round-trip decimal text, `inf`/`-inf`/`NaN` for non-finite values.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

pub fn parse_f64(text: &str) -> Option<f64> {
    match text {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}

/// Compares an attained value with an entry's expectation.
pub fn judge(expected: &Expected, mode: Mode, tol: f64, value: f64, flag: bool) -> bool {
    match (expected, mode) {
        (Expected::Flag(want), _) => flag == *want,
        (Expected::Value(e), Mode::Absolute) => (value - e).abs() <= tol,
        (Expected::Value(e), _) => {
            if *e == 0.0 {
                value == 0.0
            } else {
                let (lo, hi) = if *e > 0.0 { (e / (1.0 + tol), e * (1.0 + tol)) } else { (e * (1.0 + tol), e / (1.0 + tol)) };
                value >= lo && value <= hi
            }
        }
        (Expected::Interval(lo, hi), Mode::Absolute) => {
            lo.map_or(true, |lo| value >= lo - tol) && hi.map_or(true, |hi| value <= hi + tol)
        }
        (Expected::Interval(lo, hi), _) => {
            let down = |x: f64| if x >= 0.0 { x / (1.0 + tol) } else { x * (1.0 + tol) };
            let up = |x: f64| if x >= 0.0 { x * (1.0 + tol) } else { x / (1.0 + tol) };
            lo.map_or(true, |lo| value >= down(lo)) && hi.map_or(true, |hi| value <= up(hi))
        }
    }
}

/// Rows plus plot series of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<Row>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<Series>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(Row::passed)
    }

    /// Sorts rows and series by key.
    pub fn sort(&mut self) {
        self.rows.sort_by_key(Row::key);
        self.series.sort_by(|a, b| (&a.construction, &a.check, a.seed).cmp(&(&b.construction, &b.check, b.seed)));
    }

    pub fn to_csv(&self) -> Result<String> {
        rows_to_csv(&self.rows)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("report does not match the schema: {e}")))
    }
}

/// CSV with a header line; floats in shortest round-trip form.
pub fn rows_to_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "construction",
        "check",
        "seed",
        "value",
        "expected",
        "mode",
        "samples",
        "r_min",
        "r_max",
        "paper_ref",
        "provenance",
        "pass",
        "note",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.construction.as_str(),
            &r.check,
            &r.seed.to_string(),
            &fmt_f64(r.value),
            &r.expected,
            &r.mode,
            &r.samples.to_string(),
            &fmt_f64(r.r_min),
            &fmt_f64(r.r_max),
            &r.paper_ref,
            &r.provenance,
            &r.pass,
            &r.note,
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Usage(format!("csv: {e}"))
}

/// Sampling schedule for an entry.
pub fn sample_spec(seed: u64, samples: Option<usize>, r_min: Option<f64>, r_max: Option<f64>) -> SampleSpec {
    let mut spec = SampleSpec::default().with_seed(seed);
    if let Some(n) = samples {
        spec = spec.with_samples(n);
    }
    if let (Some(lo), Some(hi)) = (r_min, r_max) {
        spec = spec.with_absolute_radii(lo, hi);
    }
    spec
}

/// Builds the entry's construction and runs its check; see [`run_on`].
pub fn run_entry(builder: &Builder, entry: &Entry, seed: u64) -> (Row, Option<Series>) {
    let built = entry.construction.parse::<ConstructionSpec>().and_then(|c| builder.build(&c));
    run_on(built.as_ref().map_err(|e| e.to_string()), entry, seed)
}

/// Runs one check on an already built construction and fills a row.  Errors
/// raised by the construction or the check become failing rows carrying the
/// message.
pub fn run_on(built: std::result::Result<&Built, String>, entry: &Entry, seed: u64) -> (Row, Option<Series>) {
    let spec = sample_spec(seed, entry.samples, entry.r_min, entry.r_max);
    let outcome = built
        .map_err(Error::Input)
        .and_then(|built| run_check(built, &entry.check, &spec));
    let mut row = Row {
        construction: entry.construction.clone(),
        check: entry.check.clone(),
        seed,
        value: f64::NAN,
        expected: entry.expected.to_string(),
        mode: entry.mode.to_string(),
        samples: 0,
        r_min: 0.0,
        r_max: 0.0,
        paper_ref: entry.paper_ref.clone(),
        provenance: entry.provenance.clone(),
        pass: "fail".into(),
        note: String::new(),
    };
    let mut series = None;
    match outcome {
        Ok(o) => {
            row.value = o.value;
            row.samples = o.samples;
            row.r_min = o.r_min;
            row.r_max = o.r_max;
            if row.paper_ref.is_empty() {
                row.paper_ref = o.reference.clone();
            }
            row.note = o.note.clone();
            let ok = judge(&entry.expected, entry.mode, entry.tolerance, o.value, o.flag);
            row.pass = if ok { "pass" } else { "fail" }.into();
            if let Some((radii, masses, slope)) = o.series {
                series = Some(Series {
                    construction: entry.construction.clone(),
                    check: entry.check.clone(),
                    seed,
                    radii,
                    masses,
                    slope,
                });
            }
        }
        Err(e) => row.note = e.to_string(),
    }
    (row, series)
}

/// Runs every entry and returns the sorted report.  Each distinct
/// construction is built once; constructions are processed one at a time (to
/// bound memory) and their checks in parallel.
pub fn verify(manifest: &VerifyManifest, builder: &Builder) -> Result<Report> {
    manifest.validate()?;
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in manifest.entries.iter().enumerate() {
        groups.entry(e.construction.as_str()).or_default().push(i);
    }
    let mut report = Report::default();
    for (construction, indices) in groups {
        let built = construction.parse::<ConstructionSpec>().and_then(|c| builder.build(&c));
        let built = built.as_ref().map_err(|e| e.to_string());
        let results: Vec<(Row, Option<Series>)> = indices
            .par_iter()
            .map(|&i| run_on(built.clone(), &manifest.entries[i], manifest.entry_seed(i)))
            .collect();
        for (row, series) in results {
            report.rows.push(row);
            report.series.extend(series);
        }
    }
    report.sort();
    Ok(report)
}

/// Merges reports: rows keyed by `(construction, check, seed)`, identical
/// duplicates collapsed, conflicting duplicates rejected.
pub fn merge_reports(inputs: &[Report]) -> Result<Report> {
    let mut rows: BTreeMap<(String, String, u64), Row> = BTreeMap::new();
    let mut series: BTreeMap<(String, String, u64), Series> = BTreeMap::new();
    for input in inputs {
        for r in &input.rows {
            match rows.get(&r.key()) {
                Some(old) if !same_row(old, r) => {
                    return Err(Error::Usage(format!(
                        "conflicting rows for ({}, {}, {})",
                        r.construction, r.check, r.seed
                    )))
                }
                Some(_) => {}
                None => {
                    rows.insert(r.key(), r.clone());
                }
            }
        }
        for s in &input.series {
            series.entry((s.construction.clone(), s.check.clone(), s.seed)).or_insert_with(|| s.clone());
        }
    }
    Ok(Report { rows: rows.into_values().collect(), series: series.into_values().collect() })
}

/// Row equality with `NaN` values treated as equal.
fn same_row(a: &Row, b: &Row) -> bool {
    let value_eq = a.value == b.value || (a.value.is_nan() && b.value.is_nan());
    value_eq && Row { value: 0.0, ..a.clone() } == Row { value: 0.0, ..b.clone() }
}
