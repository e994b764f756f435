//! Network CSV input and JSON result output.
//!
//! Triadic CSV, full mode: header `i,j,k,y,x1,…,xP`, 1-based indices, one
//! row per triad. Compact mode: header `i,j,k`, one row per formed
//! hyperedge, covariates from a generator. Dyadic CSV: `i,j,y,x1,…,xP`.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::alt::DyadicNetwork;
use crate::error::{Error, Result};
use crate::inference::WaldSummary;
use crate::network::{Covariates, Triad, TriadicNetwork};
use crate::result::EstimationResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsvMode {
    Full,
    Compact,
}

#[derive(Clone, Default)]
pub struct ParseOptions {
    /// Part size; defaults to the largest index seen.
    pub n: Option<u32>,
    /// Required for compact files.
    pub covariates: Option<Covariates>,
}

pub struct ParsedNetwork {
    pub network: TriadicNetwork,
    pub mode: CsvMode,
    /// Rows read from the data section.
    pub rows: usize,
    pub warnings: Vec<String>,
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            line,
            msg: format!("{other:?}"),
        },
    }
}

fn parse_index(field: &str, name: &str, line: usize) -> Result<u32> {
    match field.parse::<u32>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::Parse {
            line,
            msg: format!("{name} must be a positive integer, got `{field}`"),
        }),
    }
}

fn parse_y(field: &str, line: usize) -> Result<bool> {
    match field {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::Parse {
            line,
            msg: format!("y must be 0 or 1, got `{other}`"),
        }),
    }
}

fn parse_x(field: &str, line: usize) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            msg: format!("covariate must be a finite number, got `{field}`"),
        }),
    }
}

/// Checks the header against `expected` leading columns followed by
/// `x1..xP`; returns `P`.
fn covariate_width(header: &csv::StringRecord, expected: &[&str]) -> Result<usize> {
    let names: Vec<&str> = header.iter().collect();
    if names.len() < expected.len() || names[..expected.len()] != *expected {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header must start with `{}`", expected.join(",")),
        });
    }
    for (d, name) in names[expected.len()..].iter().enumerate() {
        if *name != format!("x{}", d + 1) {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected column `x{}`, got `{name}`", d + 1),
            });
        }
    }
    Ok(names.len() - expected.len())
}

fn resolve_n(max_seen: u32, requested: Option<u32>) -> Result<u32> {
    match requested {
        Some(n) if n < max_seen => Err(Error::InvalidArgument(format!(
            "--n {n} is smaller than the largest index {max_seen} in the file"
        ))),
        Some(0) => Err(Error::InvalidArgument("n must be positive".into())),
        Some(n) => Ok(n),
        None => Ok(max_seen.max(1)),
    }
}

/// Reads a triadic network CSV.
pub fn parse_network_csv(path: &Path, opts: &ParseOptions) -> Result<ParsedNetwork> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let names: Vec<&str> = header.iter().collect();
    let mode = if names == ["i", "j", "k"] {
        CsvMode::Compact
    } else {
        CsvMode::Full
    };
    let p = match mode {
        CsvMode::Compact => 0,
        CsvMode::Full => covariate_width(&header, &["i", "j", "k", "y"])?,
    };
    if mode == CsvMode::Full && p == 0 {
        return Err(Error::Parse {
            line: 1,
            msg: "at least one covariate column x1 is required".into(),
        });
    }
    if mode == CsvMode::Compact && opts.covariates.is_none() {
        return Err(Error::InvalidArgument(
            "compact CSV (header i,j,k) needs a covariate generator".into(),
        ));
    }
    let width = if mode == CsvMode::Full { 4 + p } else { 3 };

    // (i, j, k, y, x) with 1-based indices.
    let mut rows: Vec<(u32, u32, u32, bool, Vec<f64>)> = Vec::new();
    let mut seen = HashSet::new();
    let mut max_seen = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width {
            return Err(Error::Parse {
                line,
                msg: format!("expected {width} fields, got {}", record.len()),
            });
        }
        let i = parse_index(&record[0], "i", line)?;
        let j = parse_index(&record[1], "j", line)?;
        let k = parse_index(&record[2], "k", line)?;
        if !seen.insert((i, j, k)) {
            return Err(Error::DuplicateTriad { line, i, j, k });
        }
        let (y, x) = match mode {
            CsvMode::Compact => (true, Vec::new()),
            CsvMode::Full => (
                parse_y(&record[3], line)?,
                (4..width).map(|c| parse_x(&record[c], line)).collect::<Result<_>>()?,
            ),
        };
        max_seen = max_seen.max(i).max(j).max(k);
        rows.push((i, j, k, y, x));
    }
    let n = resolve_n(max_seen, opts.n)?;
    let mut warnings = Vec::new();
    let edges: Vec<Triad> = rows
        .iter()
        .filter(|r| r.3)
        .map(|&(i, j, k, ..)| Triad::new(i - 1, j - 1, k - 1))
        .collect();
    let covariates = match mode {
        CsvMode::Compact => opts.covariates.clone().expect("checked above"),
        CsvMode::Full => {
            let cells = (n as usize).pow(3);
            if rows.len() < cells {
                warnings.push(format!(
                    "{} of {cells} triads listed; the rest are taken as unformed with zero covariates",
                    rows.len()
                ));
            }
            let mut values = vec![0.0; cells * p];
            for (i, j, k, _, x) in &rows {
                let idx = Triad::new(i - 1, j - 1, k - 1).index_unchecked(n);
                values[idx * p..(idx + 1) * p].copy_from_slice(x);
            }
            Covariates::dense(p, values)
        }
    };
    let network = TriadicNetwork::new(n, edges, covariates)?;
    Ok(ParsedNetwork {
        network,
        mode,
        rows: rows.len(),
        warnings,
    })
}

/// Reads a dyadic CSV (`i,j,y,x1..xP`); unlisted dyads are unformed with
/// zero covariates.
pub fn parse_dyadic_csv(path: &Path, n: Option<u32>) -> Result<(DyadicNetwork, Vec<String>)> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let p = covariate_width(&header, &["i", "j", "y"])?;
    if p == 0 {
        return Err(Error::Parse {
            line: 1,
            msg: "at least one covariate column x1 is required".into(),
        });
    }
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    let mut max_seen = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 + p {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, got {}", 3 + p, record.len()),
            });
        }
        let i = parse_index(&record[0], "i", line)?;
        let j = parse_index(&record[1], "j", line)?;
        if !seen.insert((i, j)) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate dyad ({i},{j})"),
            });
        }
        let y = parse_y(&record[2], line)?;
        let x: Vec<f64> = (3..3 + p).map(|c| parse_x(&record[c], line)).collect::<Result<_>>()?;
        max_seen = max_seen.max(i).max(j);
        rows.push((i, j, y, x));
    }
    let n = resolve_n(max_seen, n)?;
    let cells = (n as usize).pow(2);
    let mut warnings = Vec::new();
    if rows.len() < cells {
        warnings.push(format!(
            "{} of {cells} dyads listed; the rest are taken as unformed with zero covariates",
            rows.len()
        ));
    }
    let mut values = vec![0.0; cells * p];
    let mut edges = Vec::new();
    for (i, j, y, x) in rows {
        let idx = ((i - 1) * n + (j - 1)) as usize;
        values[idx * p..(idx + 1) * p].copy_from_slice(&x);
        if y {
            edges.push((i - 1, j - 1));
        }
    }
    Ok((DyadicNetwork::new(n, edges, p, values)?, warnings))
}

/// One numeric column of a CSV file, by header name.
pub fn read_csv_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let idx = header.iter().position(|h| h == column).ok_or_else(|| Error::Parse {
        line: 1,
        msg: format!("missing column `{column}`"),
    })?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = record.get(idx).ok_or_else(|| Error::Parse {
            line,
            msg: format!("missing field `{column}`"),
        })?;
        out.push(parse_x(field, line)?);
    }
    Ok(out)
}

/// Writes every triad in full mode.
pub fn write_network_csv(net: &TriadicNetwork, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let p = net.p();
    let io = |e| Error::io(path, e);
    let mut header = String::from("i,j,k,y");
    for d in 1..=p {
        header.push_str(&format!(",x{d}"));
    }
    writeln!(w, "{header}").map_err(io)?;
    let n = net.n();
    let mut x = vec![0.0; p];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let t = Triad::new(i, j, k);
                net.covariates().write(t, n, &mut x);
                write!(w, "{},{},{},{}", i + 1, j + 1, k + 1, net.contains(t) as u8).map_err(io)?;
                for v in &x {
                    // Debug formatting is the shortest exact round trip.
                    write!(w, ",{v:?}").map_err(io)?;
                }
                writeln!(w).map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)
}

/// Estimation output: the result plus Wald intervals and optional timing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    #[serde(flatten)]
    pub result: EstimationResult,
    pub level: f64,
    /// Per-coefficient intervals at `level`; absent without a covariance.
    pub ci: Option<Vec<[f64; 2]>>,
    /// 95% intervals, always reported alongside `ci`.
    pub ci95: Option<Vec<[f64; 2]>>,
    /// Two-sided p-values for `β_p = 0`.
    pub wald_p: Option<Vec<f64>>,
    pub timing_seconds: Option<f64>,
    pub warnings: Vec<String>,
}

impl EstimateReport {
    pub fn new(result: EstimationResult, level: f64) -> Result<Self> {
        let null = vec![0.0; result.beta_hat.len()];
        let intervals = |w: &WaldSummary| w.ci.iter().map(|&(lo, hi)| [lo, hi]).collect();
        let (ci, ci95, wald_p) = match &result.se {
            Some(se) if se.iter().all(|&s| s > 0.0) => {
                let at = crate::inference::wald_from(&result.beta_hat, se, level, &null)?;
                let w95 = crate::inference::wald_from(&result.beta_hat, se, 0.95, &null)?;
                (Some(intervals(&at)), Some(intervals(&w95)), Some(w95.p_values))
            }
            _ => (None, None, None),
        };
        Ok(EstimateReport {
            result,
            level,
            ci,
            ci95,
            wald_p,
            timing_seconds: None,
            warnings: Vec::new(),
        })
    }
}

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same bits.
pub fn write_result_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_result_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
