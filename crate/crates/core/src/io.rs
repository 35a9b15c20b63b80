//! Text interchange formats for curves, histograms and comparison reports.
//!
//! CSV files carry `# key: value` metadata lines followed by a mandatory
//! header row. JSON files are the serde form of the corresponding struct.
//! Everything here works on strings; file handling is left to callers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{de::DeserializeOwned, Serialize};

use crate::error::{Error, Result};
use crate::kernel::OrientationMode;
use crate::limit::{CurveKind, CurveMeta, DistributionCurve};
use crate::montecarlo::{Binning, ComparisonReport, FieldHistogram, StreamingMoments};

pub const CURVE_COLUMNS: [&str; 2] = ["g", "density"];
pub const HISTOGRAM_COLUMNS: [&str; 4] = ["bin_left", "bin_right", "count", "normalized_height"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    /// JSON if the text starts with '{', CSV otherwise.
    pub fn sniff(text: &str) -> Self {
        if text.trim_start().starts_with('{') {
            Format::Json
        } else {
            Format::Csv
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format '{other}' (expected csv or json)"))),
        }
    }
}

/// `# key: value` lines and the data section after them.
struct Sections<'a> {
    meta: BTreeMap<String, String>,
    body: &'a str,
}

fn split_metadata(text: &str) -> Sections<'_> {
    let mut meta = BTreeMap::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            offset += line.len();
        } else if trimmed.is_empty() {
            offset += line.len();
        } else {
            break;
        }
    }
    Sections {
        meta,
        body: &text[offset..],
    }
}

fn meta_value<T: FromStr>(meta: &BTreeMap<String, String>, key: &str) -> Result<T> {
    let raw = meta
        .get(key)
        .ok_or_else(|| Error::Parse(format!("missing metadata '{key}'")))?;
    raw.parse()
        .map_err(|_| Error::Parse(format!("metadata '{key}': cannot parse '{raw}'")))
}

fn meta_optional<T: FromStr>(meta: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match meta.get(key) {
        None => Ok(None),
        Some(raw) if raw == "none" => Ok(None),
        Some(_) => meta_value(meta, key).map(Some),
    }
}

/// Reads the data rows, checking the header against `columns`.
fn read_rows(body: &str, columns: &[&str]) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("unreadable header row: {e}")))?
        .clone();
    for (i, want) in columns.iter().enumerate() {
        match headers.get(i) {
            Some(h) if h == *want => {}
            Some(h) => {
                return Err(Error::Parse(format!(
                    "column {} is '{h}', expected '{want}'",
                    i + 1
                )))
            }
            None => return Err(Error::Parse(format!("missing column '{want}'"))),
        }
    }
    if headers.len() > columns.len() {
        return Err(Error::Parse(format!(
            "unexpected column '{}'",
            &headers[columns.len()]
        )));
    }
    let mut rows = Vec::new();
    for (n, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("row {}: {e}", n + 1)))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(rows)
}

fn cell<T: FromStr>(row: &[String], index: usize, column: &str, line: usize) -> Result<T> {
    row[index]
        .parse()
        .map_err(|_| Error::Parse(format!("column '{column}', row {line}: '{}' is not a valid value", row[index])))
}

fn mode_text(mode: Option<OrientationMode>) -> &'static str {
    mode.map_or("none", OrientationMode::as_str)
}

pub fn curve_to_csv(curve: &DistributionCurve) -> String {
    let m = &curve.meta;
    let mut out = String::new();
    let _ = writeln!(out, "# kind: {}", m.kind.as_str());
    let _ = writeln!(out, "# mode: {}", mode_text(m.mode));
    let _ = writeln!(out, "# epsilon: {}", m.epsilon);
    let _ = writeln!(out, "# center: {}", m.center);
    let _ = writeln!(out, "# grid_step: {}", m.grid_step);
    let _ = writeln!(out, "# tolerance: {}", m.tolerance);
    let _ = writeln!(out, "# cutoff: {}", m.cutoff);
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(CURVE_COLUMNS);
    for (g, p) in curve.g.iter().zip(&curve.density) {
        let _ = w.write_record([g.to_string(), p.to_string()]);
    }
    out.push_str(&String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default());
    out
}

pub fn curve_from_csv(text: &str) -> Result<DistributionCurve> {
    let s = split_metadata(text);
    let rows = read_rows(s.body, &CURVE_COLUMNS)?;
    let mut g = Vec::with_capacity(rows.len());
    let mut density = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        g.push(cell::<f64>(row, 0, "g", i + 1)?);
        density.push(cell::<f64>(row, 1, "density", i + 1)?);
    }
    let step = if g.len() > 1 { g[1] - g[0] } else { 0.0 };
    let meta = CurveMeta {
        kind: meta_optional(&s.meta, "kind")?.unwrap_or(CurveKind::Inverted),
        mode: meta_optional(&s.meta, "mode")?,
        epsilon: meta_optional(&s.meta, "epsilon")?.unwrap_or(0.0),
        center: meta_optional(&s.meta, "center")?.unwrap_or(0.0),
        grid_step: meta_optional(&s.meta, "grid_step")?.unwrap_or(step),
        tolerance: meta_optional(&s.meta, "tolerance")?.unwrap_or(0.0),
        cutoff: meta_optional(&s.meta, "cutoff")?.unwrap_or(0.0),
    };
    DistributionCurve::new(g, density, meta).map_err(|e| Error::Parse(e.to_string()))
}

pub fn histogram_to_csv(h: &FieldHistogram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# mode: {}", h.mode);
    let _ = writeln!(out, "# epsilon: {}", h.epsilon);
    let _ = writeln!(out, "# n_dipoles: {}", h.n_dipoles);
    let _ = writeln!(out, "# realizations: {}", h.realizations);
    let _ = writeln!(out, "# seed: {}", h.seed);
    let _ = writeln!(out, "# bins: {}", h.binning);
    let _ = writeln!(out, "# underflow: {}", h.underflow);
    let _ = writeln!(out, "# overflow: {}", h.overflow);
    let _ = writeln!(out, "# mean: {}", h.moments.mean);
    let _ = writeln!(out, "# m2: {}", h.moments.m2);
    let _ = writeln!(out, "# variance: {}", h.variance());
    let _ = writeln!(out, "# variance_converged: {}", h.variance_converged());
    let _ = writeln!(out, "# angular_count: {}", h.angular.count);
    let _ = writeln!(out, "# angular_mean: {}", h.angular.mean);
    let _ = writeln!(out, "# angular_m2: {}", h.angular.m2);
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(HISTOGRAM_COLUMNS);
    let heights = h.normalized_heights();
    for (i, (&c, height)) in h.counts.iter().zip(heights).enumerate() {
        let _ = w.write_record([
            h.binning.edge(i).to_string(),
            h.binning.edge(i + 1).to_string(),
            c.to_string(),
            height.to_string(),
        ]);
    }
    out.push_str(&String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default());
    out
}

pub fn histogram_from_csv(text: &str) -> Result<FieldHistogram> {
    let s = split_metadata(text);
    let rows = read_rows(s.body, &HISTOGRAM_COLUMNS)?;
    if rows.len() < 2 {
        return Err(Error::Parse("histogram needs at least 2 bins".into()));
    }
    let mut counts = Vec::with_capacity(rows.len());
    let mut lefts = Vec::with_capacity(rows.len());
    let mut right = 0.0;
    for (i, row) in rows.iter().enumerate() {
        lefts.push(cell::<f64>(row, 0, "bin_left", i + 1)?);
        right = cell::<f64>(row, 1, "bin_right", i + 1)?;
        counts.push(cell::<u64>(row, 2, "count", i + 1)?);
        cell::<f64>(row, 3, "normalized_height", i + 1)?;
    }
    let binning = Binning::new(lefts[0], right, rows.len()).map_err(|e| Error::Parse(e.to_string()))?;
    let tol = 1e-9 * binning.width();
    if let Some(i) = (0..rows.len()).find(|&i| (lefts[i] - binning.edge(i)).abs() > tol) {
        return Err(Error::Parse(format!("column 'bin_left', row {}: bins are not uniform", i + 1)));
    }
    let h = FieldHistogram {
        binning,
        counts,
        underflow: meta_value(&s.meta, "underflow")?,
        overflow: meta_value(&s.meta, "overflow")?,
        realizations: meta_value(&s.meta, "realizations")?,
        moments: StreamingMoments {
            count: meta_value(&s.meta, "realizations")?,
            mean: meta_value(&s.meta, "mean")?,
            m2: meta_value(&s.meta, "m2")?,
        },
        angular: StreamingMoments {
            count: meta_optional(&s.meta, "angular_count")?.unwrap_or(0),
            mean: meta_optional(&s.meta, "angular_mean")?.unwrap_or(0.0),
            m2: meta_optional(&s.meta, "angular_m2")?.unwrap_or(0.0),
        },
        mode: meta_value(&s.meta, "mode")?,
        epsilon: meta_value(&s.meta, "epsilon")?,
        n_dipoles: meta_value(&s.meta, "n_dipoles")?,
        seed: meta_value(&s.meta, "seed")?,
    };
    h.check_consistent().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(h)
}

pub fn report_to_csv(r: &ComparisonReport) -> String {
    let mut out = String::from("key,value\n");
    let rows: [(&str, String); 12] = [
        ("verdict", r.verdict.to_string()),
        ("max_z", r.max_z.to_string()),
        ("max_z_at", r.max_z_at.to_string()),
        ("chi2", r.chi2.to_string()),
        ("dof", r.dof.to_string()),
        ("chi2_per_dof", r.chi2_per_dof().to_string()),
        ("sup_norm", r.sup_norm.to_string()),
        ("included_bins", r.included_bins.to_string()),
        ("excluded_bins", r.excluded_bins.to_string()),
        ("threshold", r.options.threshold.to_string()),
        ("chi2_band", format!("{}..{}", r.options.chi2_band.0, r.options.chi2_band.1)),
        ("min_expected", r.options.min_expected.to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).unwrap_or_default()
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("JSON: {e}")))
}

/// Reads a curve in either format.
pub fn parse_curve(text: &str) -> Result<DistributionCurve> {
    match Format::sniff(text) {
        Format::Csv => curve_from_csv(text),
        Format::Json => {
            let c: DistributionCurve = from_json(text)?;
            DistributionCurve::new(c.g, c.density, c.meta).map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

/// Reads a histogram in either format.
pub fn parse_histogram(text: &str) -> Result<FieldHistogram> {
    match Format::sniff(text) {
        Format::Csv => histogram_from_csv(text),
        Format::Json => {
            let h: FieldHistogram = from_json(text)?;
            h.binning.validate().map_err(|e| Error::Parse(e.to_string()))?;
            h.check_consistent().map_err(|e| Error::Parse(e.to_string()))?;
            Ok(h)
        }
    }
}

pub fn render_curve(curve: &DistributionCurve, format: Format) -> String {
    match format {
        Format::Csv => curve_to_csv(curve),
        Format::Json => to_json(curve),
    }
}

pub fn render_histogram(h: &FieldHistogram, format: Format) -> String {
    match format {
        Format::Csv => histogram_to_csv(h),
        Format::Json => to_json(h),
    }
}

pub fn render_report(r: &ComparisonReport, format: Format) -> String {
    match format {
        Format::Csv => report_to_csv(r),
        Format::Json => to_json(r),
    }
}
