//! CSV interchange: critical points, counts and probability summaries.
//!
//! Numbers are printed with 9 significant digits, `.` as decimal separator
//! and LF line endings so output is stable across runs and platforms.
//! Summary files carry `m` and `gamma` in a leading `# m=<m> gamma=<gamma>`
//! comment line.

use std::io::{Read, Write};

use crate::critical::{CriticalType, TypeCounts};
use crate::error::{Error, Result};
use crate::grid::GridTopology;
use crate::stats::{ConfidenceLevel, IntervalEstimate, ProbabilitySummary};

pub const SUMMARY_HEADER: &str = "i,j,min_hat,min_lo,min_hi,max_hat,max_lo,max_hi,sad_hat,sad_lo,sad_hi";
pub const COUNTS_HEADER: &str = "i,j,c_min,c_max,c_saddle,m";
pub const CLASSIFY_HEADER: &str = "i,j,type";

/// `v` rounded to 9 significant digits, trailing zeros removed.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".to_owned() } else { v.to_string() };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".to_owned();
    }
    s
}

pub fn write_classification(mut sink: impl Write, topology: &GridTopology, types: &[CriticalType]) -> Result<()> {
    writeln!(sink, "{CLASSIFY_HEADER}")?;
    for (k, t) in types.iter().enumerate() {
        if t.is_critical() {
            let v = topology.vertex(k);
            writeln!(sink, "{},{},{}", v.i, v.j, t.as_str())?;
        }
    }
    Ok(())
}

pub fn write_counts(mut sink: impl Write, topology: &GridTopology, counts: &[TypeCounts]) -> Result<()> {
    writeln!(sink, "{COUNTS_HEADER}")?;
    for (k, c) in counts.iter().enumerate() {
        let v = topology.vertex(k);
        writeln!(sink, "{},{},{},{},{},{}", v.i, v.j, c.min, c.max, c.saddle, c.m)?;
    }
    Ok(())
}

pub fn write_summaries(mut sink: impl Write, topology: &GridTopology, summaries: &[ProbabilitySummary]) -> Result<()> {
    if summaries.len() != topology.vertex_count() {
        return Err(Error::input("summary count does not match grid"));
    }
    if let Some(first) = summaries.first() {
        writeln!(sink, "# m={} gamma={}", first.m(), format_sig9(first.level.gamma()))?;
    }
    writeln!(sink, "{SUMMARY_HEADER}")?;
    for (k, s) in summaries.iter().enumerate() {
        let v = topology.vertex(k);
        write!(sink, "{},{}", v.i, v.j)?;
        for e in [&s.minimum, &s.maximum, &s.saddle] {
            for p in [e.p_hat, e.p_lower, e.p_upper] {
                write!(sink, ",{}", format_sig9(p))?;
            }
        }
        writeln!(sink)?;
    }
    Ok(())
}

/// One parsed summary row. `fields` keeps the nine probability strings as
/// they appear in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub i: usize,
    pub j: usize,
    pub values: [f64; 9],
    pub fields: [String; 9],
}

impl SummaryRow {
    pub fn is_degenerate(&self) -> bool {
        self.values.chunks(3).all(|t| t[0] == t[1] && t[1] == t[2])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub topology: GridTopology,
    pub m: Option<usize>,
    pub gamma: Option<f64>,
    /// Rows in linear vertex order.
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn row(&self, i: usize, j: usize) -> Result<&SummaryRow> {
        let (nx, ny) = (self.topology.nx(), self.topology.ny());
        if i >= nx || j >= ny {
            return Err(Error::input(format!(
                "vertex ({i}, {j}) out of range: i must be in 0..{nx}, j in 0..{ny}"
            )));
        }
        Ok(&self.rows[j * nx + i])
    }

    /// Summaries for rendering. Counts are reconstructed from `m` when known.
    pub fn summaries(&self) -> Result<Vec<ProbabilitySummary>> {
        let m = self.m.unwrap_or(1);
        let level = match self.gamma {
            Some(g) => ConfidenceLevel::new(g)?,
            None => ConfidenceLevel::default(),
        };
        let estimate = |t: &[f64]| IntervalEstimate {
            p_hat: t[0],
            p_lower: t[1],
            p_upper: t[2],
            c: (t[0] * m as f64).round() as usize,
            m,
        };
        Ok(self
            .rows
            .iter()
            .map(|r| ProbabilitySummary {
                minimum: estimate(&r.values[0..3]),
                maximum: estimate(&r.values[3..6]),
                saddle: estimate(&r.values[6..9]),
                level,
            })
            .collect())
    }
}

fn parse_metadata(line: &str, m: &mut Option<usize>, gamma: &mut Option<f64>) {
    for token in line.trim_start_matches('#').split_whitespace() {
        if let Some(v) = token.strip_prefix("m=") {
            *m = v.parse().ok();
        } else if let Some(v) = token.strip_prefix("gamma=") {
            *gamma = v.parse().ok();
        }
    }
}

pub fn read_summaries(mut source: impl Read) -> Result<SummaryTable> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let (mut m, mut gamma) = (None, None);
    for line in text.lines().filter(|l| l.starts_with('#')) {
        parse_metadata(line, &mut m, &mut gamma);
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header_line = |r: &csv::StringRecord| r.position().map_or(0, |p| p.line() as usize);
    let headers = reader.headers().map_err(|e| Error::parse(1, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>().join(",") != SUMMARY_HEADER {
        return Err(Error::parse(
            header_line(headers),
            format!("expected header `{SUMMARY_HEADER}`"),
        ));
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = header_line(&record);
        let index = |k: usize| -> Result<usize> {
            record[k]
                .trim()
                .parse()
                .map_err(|_| Error::parse(line, format!("bad vertex coordinate `{}`", &record[k])))
        };
        let (i, j) = (index(0)?, index(1)?);
        let mut values = [0.0; 9];
        let mut fields: [String; 9] = Default::default();
        for k in 0..9 {
            let raw = record[k + 2].trim();
            let v: f64 = raw
                .parse()
                .map_err(|_| Error::parse(line, format!("bad probability `{raw}`")))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::parse(line, format!("probability `{raw}` outside [0, 1]")));
            }
            values[k] = v;
            fields[k] = raw.to_owned();
        }
        rows.push((line, SummaryRow { i, j, values, fields }));
    }
    if rows.is_empty() {
        return Err(Error::parse(1, "summary file has no rows"));
    }

    let nx = rows.iter().map(|(_, r)| r.i).max().unwrap_or(0) + 1;
    let ny = rows.iter().map(|(_, r)| r.j).max().unwrap_or(0) + 1;
    let topology = GridTopology::new(nx, ny)?;
    if rows.len() != topology.vertex_count() {
        return Err(Error::input(format!(
            "{} rows for an inferred {nx}x{ny} grid",
            rows.len()
        )));
    }
    for (k, (line, r)) in rows.iter().enumerate() {
        let v = topology.vertex(k);
        if (r.i, r.j) != (v.i, v.j) {
            return Err(Error::parse(
                *line,
                format!("expected vertex ({}, {}) in row-major order", v.i, v.j),
            ));
        }
    }
    Ok(SummaryTable {
        topology,
        m,
        gamma,
        rows: rows.into_iter().map(|(_, r)| r).collect(),
    })
}
