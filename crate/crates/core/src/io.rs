//! Text formats for masks and fields, and the record writers.
//!
//! `PLAP-MASK v1`:
//!
//! ```text
//! plap-mask 1
//! dim 2
//! h 0.0625
//! size 5 4
//! origin -0.125 -0.0625      (optional, all zeros when absent)
//! label square               (optional)
//! 00000
//! 01110
//! 01110
//! 00000
//! ```
//!
//! One row of `0`/`1` characters per lattice line along axis 0, lines ordered
//! by axis 1 and then by axis 2 (slice-major). Blank lines are ignored.
//! `PLAP-FIELD v1` starts with `plap-field 1`, repeats the mask header and
//! rows, then a `values` line followed by one whitespace-separated line of
//! decimals per mask row, in the same order. Every float is written in its
//! shortest round-trip form, so reading reproduces the bits.

use crate::eigen::{EigenResult, SolverConfig};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{parse_length, GridDomain, Point};
use crate::trend::TrendReport;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

const MASK_MAGIC: &str = "plap-mask 1";
const FIELD_MAGIC: &str = "plap-field 1";

fn write_header(out: &mut String, domain: &GridDomain) {
    let dim = domain.dim();
    let shape = domain.shape();
    let origin = domain.origin();
    let join = |v: &[String]| v.join(" ");
    writeln!(out, "dim {dim}").unwrap();
    writeln!(out, "h {:?}", domain.h()).unwrap();
    writeln!(out, "size {}", join(&shape[..dim].iter().map(|n| n.to_string()).collect::<Vec<_>>())).unwrap();
    if origin[..dim].iter().any(|&o| o.to_bits() != 0) {
        writeln!(out, "origin {}", join(&origin[..dim].iter().map(|o| format!("{o:?}")).collect::<Vec<_>>())).unwrap();
    }
    if !domain.label().is_empty() {
        writeln!(out, "label {}", domain.label()).unwrap();
    }
    for row in domain.mask().chunks(shape[0]) {
        out.extend(row.iter().map(|&b| if b { '1' } else { '0' }));
        out.push('\n');
    }
}

/// Serializes `domain` as `PLAP-MASK v1`.
pub fn mask_to_string(domain: &GridDomain) -> String {
    let mut out = format!("{MASK_MAGIC}\n");
    write_header(&mut out, domain);
    out
}

/// Serializes `field` as `PLAP-FIELD v1`.
pub fn field_to_string(field: &ScalarField) -> String {
    let domain = field.domain();
    let mut out = format!("{FIELD_MAGIC}\n");
    write_header(&mut out, domain);
    out.push_str("values\n");
    for row in field.values().chunks(domain.shape()[0]) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Non-blank lines with their 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> =
            Box::new(text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()));
        Self { inner: it.peekable(), last: 0 }
    }

    fn next(&mut self) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(Error::Parse { line: self.last + 1, msg: "unexpected end of file".into() }),
        }
    }

    fn peek_key(&mut self) -> Option<&'a str> {
        self.inner.peek().map(|(_, l)| l.split_whitespace().next().unwrap_or(""))
    }

    /// The remainder of the next line, which must start with `key`.
    fn keyed(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (n, l) = self.next()?;
        match l.split_once(char::is_whitespace) {
            Some((k, rest)) if k == key => Ok((n, rest.trim())),
            _ => Err(Error::Parse { line: n, msg: format!("expected `{key} ...`") }),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_mask_body(lines: &mut Lines<'_>) -> Result<GridDomain> {
    let (n, d) = lines.keyed("dim")?;
    let dim: usize = d.parse().map_err(|_| parse_err(n, format!("bad dimension `{d}`")))?;
    if !(1..=3).contains(&dim) {
        return Err(parse_err(n, format!("dimension {dim} not in 1..=3")));
    }
    let (n, hs) = lines.keyed("h")?;
    let h = parse_length(hs).map_err(|_| parse_err(n, format!("bad spacing `{hs}`")))?;
    let (n, sz) = lines.keyed("size")?;
    let sizes: Vec<usize> = sz
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| parse_err(n, format!("bad size `{s}`"))))
        .collect::<Result<_>>()?;
    if sizes.len() != dim || sizes.contains(&0) {
        return Err(parse_err(n, format!("expected {dim} positive sizes")));
    }
    let mut shape = [1usize; 3];
    shape[..dim].copy_from_slice(&sizes);
    let mut origin: Point = [0.0; 3];
    if lines.peek_key() == Some("origin") {
        let (n, o) = lines.keyed("origin")?;
        let v: Vec<f64> = o
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| parse_err(n, format!("bad origin `{s}`"))))
            .collect::<Result<_>>()?;
        if v.len() != dim {
            return Err(parse_err(n, format!("expected {dim} origin coordinates")));
        }
        origin[..dim].copy_from_slice(&v);
    }
    let mut label = String::new();
    if lines.peek_key() == Some("label") {
        label = lines.keyed("label")?.1.to_string();
    }
    let rows = shape[1] * shape[2];
    let mut mask = Vec::with_capacity(rows * shape[0]);
    for _ in 0..rows {
        let (n, row) = lines.next()?;
        if row.len() != shape[0] {
            return Err(parse_err(n, format!("row has {} cells, expected {}", row.len(), shape[0])));
        }
        for c in row.chars() {
            match c {
                '0' => mask.push(false),
                '1' => mask.push(true),
                _ => return Err(parse_err(n, format!("unexpected character `{c}` in mask row"))),
            }
        }
    }
    GridDomain::new(dim, h, origin, shape, mask, label)
}

/// Parses `PLAP-MASK v1`.
pub fn parse_mask(text: &str) -> Result<GridDomain> {
    let mut lines = Lines::new(text);
    let (n, magic) = lines.next()?;
    if magic != MASK_MAGIC {
        return Err(parse_err(n, format!("expected `{MASK_MAGIC}`")));
    }
    let domain = parse_mask_body(&mut lines)?;
    if let Ok((n, _)) = lines.next() {
        return Err(parse_err(n, "trailing content after the mask"));
    }
    Ok(domain)
}

/// Parses `PLAP-FIELD v1`.
pub fn parse_field(text: &str) -> Result<ScalarField> {
    let mut lines = Lines::new(text);
    let (n, magic) = lines.next()?;
    if magic != FIELD_MAGIC {
        return Err(parse_err(n, format!("expected `{FIELD_MAGIC}`")));
    }
    let domain = Arc::new(parse_mask_body(&mut lines)?);
    let (n, key) = lines.next()?;
    if key != "values" {
        return Err(parse_err(n, "expected `values`"));
    }
    let mut values = Vec::with_capacity(domain.len());
    while values.len() < domain.len() {
        let (n, row) = lines.next()?;
        for s in row.split_whitespace() {
            values.push(s.parse::<f64>().map_err(|_| parse_err(n, format!("bad value `{s}`")))?);
        }
    }
    if values.len() != domain.len() {
        return Err(parse_err(lines.last, format!("{} values, expected {}", values.len(), domain.len())));
    }
    if let Ok((n, _)) = lines.next() {
        return Err(parse_err(n, "trailing content after the values"));
    }
    ScalarField::new(domain, values)
}

pub fn write_mask(path: &Path, domain: &GridDomain) -> Result<()> {
    Ok(fs::write(path, mask_to_string(domain))?)
}

pub fn read_mask(path: &Path) -> Result<GridDomain> {
    parse_mask(&fs::read_to_string(path)?)
}

pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    Ok(fs::write(path, field_to_string(field))?)
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    parse_field(&fs::read_to_string(path)?)
}

/// Flat record of one eigenpair computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub label: String,
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub h: f64,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

impl EigenRecord {
    pub fn new(label: impl Into<String>, result: &EigenResult) -> Self {
        let domain = result.eigenfunction.domain();
        Self {
            label: label.into(),
            dim: domain.dim(),
            p: result.p,
            h: domain.h(),
            lambda: result.lambda,
            iterations: result.iterations,
            converged: result.converged,
            gradient_norm: result.gradient_norm,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// CSV with a header row taken from the field names of `T`.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// `h,value` series of a trend report.
pub fn trend_csv(trend: &TrendReport) -> Result<String> {
    #[derive(Serialize)]
    struct Row {
        h: f64,
        value: f64,
    }
    let rows: Vec<Row> = trend.h.iter().zip(&trend.values).map(|(&h, &value)| Row { h, value }).collect();
    to_csv(&rows)
}

/// Length given either as a number or as a string such as `"1/128"`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Number(f64),
    Text(String),
}

impl Length {
    pub fn value(&self) -> Result<f64> {
        match self {
            Length::Number(v) => Ok(*v),
            Length::Text(s) => parse_length(s),
        }
    }
}

/// One `[[sweep]]` section of a sweep file.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub name: String,
    /// Named family, see [`crate::harness::named_family`] ...
    pub family: Option<String>,
    /// ... or explicit domain descriptors such as `ball:1`.
    #[serde(default)]
    pub domains: Vec<String>,
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: Vec<f64>,
    pub h: Vec<Length>,
}

/// Sweep file: shared solver overrides and any number of sweeps.
///
/// ```toml
/// [solver]
/// seed = 7
///
/// [[sweep]]
/// name = "planar"
/// family = "adversarial"
/// N = 2
/// p = [1.5, 3]
/// h = ["1/64"]
/// ```
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(rename = "sweep")]
    pub sweeps: Vec<SweepSection>,
}

impl SweepFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: SweepFile = toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("sweep file: {e}")))?;
        file.solver.validate()?;
        for s in &file.sweeps {
            if s.family.is_some() == !s.domains.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "sweep `{}`: give exactly one of `family` and `domains`",
                    s.name
                )));
            }
            if s.p.is_empty() || s.h.is_empty() {
                return Err(Error::InvalidArgument(format!("sweep `{}`: empty p or h list", s.name)));
            }
            for h in &s.h {
                let v = h.value()?;
                if !(v > 0.0) {
                    return Err(Error::InvalidArgument(format!("sweep `{}`: spacing {v} is not positive", s.name)));
                }
            }
        }
        Ok(file)
    }
}
