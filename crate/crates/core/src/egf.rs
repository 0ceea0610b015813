//! Text formats for ensembles (`EGF1`) and moment models (`MMF1`).
//!
//! Both start with a magic line, then a line of three integers, then blocks
//! of `ny` lines with `nx` reals each (row `j = 0` first). Lines starting with
//! `#` are ignored. Values are written in the shortest representation that
//! parses back to the same `f64`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::{Ensemble, GridTopology, ScalarField};
use crate::synth::MomentModel;

const ENSEMBLE_MAGIC: &str = "EGF1";
const MODEL_MAGIC: &str = "MMF1";

struct Lines<R> {
    inner: R,
    line: usize,
    buf: String,
}

impl<R: BufRead> Lines<R> {
    fn new(inner: R) -> Self {
        Lines {
            inner,
            line: 0,
            buf: String::new(),
        }
    }

    /// Next content line (comments and blank lines skipped), with CR/LF trimmed.
    fn next(&mut self) -> Result<Option<&str>> {
        loop {
            self.buf.clear();
            if self.inner.read_line(&mut self.buf)? == 0 {
                return Ok(None);
            }
            self.line += 1;
            let trimmed = self.buf.trim_end_matches(['\n', '\r']);
            if trimmed.starts_with('#') || trimmed.trim().is_empty() {
                continue;
            }
            let len = trimmed.len();
            return Ok(Some(&self.buf[..len]));
        }
    }

    fn expect(&mut self, what: &str) -> Result<(usize, String)> {
        let line = self.line + 1;
        match self.next()?.map(str::to_owned) {
            Some(s) => Ok((self.line, s)),
            None => Err(Error::parse(line, format!("unexpected end of file, expected {what}"))),
        }
    }

    fn header(&mut self, magic: &str) -> Result<(usize, usize, usize)> {
        let (line, first) = self.expect("magic line")?;
        if first != magic {
            return Err(Error::parse(line, format!("expected magic `{magic}`, found `{first}`")));
        }
        let (line, dims) = self.expect("dimension line")?;
        let parsed: Vec<usize> = dims
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(line, format!("bad dimension line `{dims}`: {e}")))?;
        match parsed[..] {
            [a, b, c] => Ok((a, b, c)),
            _ => Err(Error::parse(line, format!("expected three integers, found `{dims}`"))),
        }
    }

    fn block(&mut self, topology: &GridTopology, what: &str) -> Result<Vec<f64>> {
        let mut values = Vec::with_capacity(topology.vertex_count());
        for j in 0..topology.ny() {
            let (line, text) = self.expect(&format!("row {j} of {what}"))?;
            let before = values.len();
            for token in text.split_whitespace() {
                let v: f64 = token
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad number `{token}`")))?;
                if !v.is_finite() {
                    return Err(Error::parse(line, format!("non-finite value `{token}`")));
                }
                values.push(v);
            }
            let got = values.len() - before;
            if got != topology.nx() {
                return Err(Error::parse(
                    line,
                    format!("expected {} values in row {j} of {what}, found {got}", topology.nx()),
                ));
            }
        }
        Ok(values)
    }

    fn finish(&mut self) -> Result<()> {
        match self.next()? {
            None => Ok(()),
            Some(_) => Err(Error::parse(self.line, "trailing content after last block")),
        }
    }
}

fn topology_at(line: usize, nx: usize, ny: usize) -> Result<GridTopology> {
    GridTopology::new(nx, ny).map_err(|e| Error::parse(line, e.to_string()))
}

pub fn load_ensemble(source: impl BufRead) -> Result<Ensemble> {
    let mut lines = Lines::new(source);
    let (nx, ny, m) = lines.header(ENSEMBLE_MAGIC)?;
    let topology = topology_at(lines.line, nx, ny)?;
    if m == 0 {
        return Err(Error::parse(lines.line, "ensemble size must be at least 1"));
    }
    let mut members = Vec::with_capacity(m);
    for k in 0..m {
        let values = lines.block(&topology, &format!("member {k}"))?;
        members.push(ScalarField::new(values)?);
    }
    lines.finish()?;
    Ensemble::new(topology, members)
}

fn write_block(sink: &mut impl Write, topology: &GridTopology, values: &[f64]) -> Result<()> {
    for row in values.chunks(topology.nx()) {
        let mut first = true;
        for v in row {
            if !first {
                sink.write_all(b" ")?;
            }
            write!(sink, "{v}")?;
            first = false;
        }
        sink.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_ensemble(e: &Ensemble, mut sink: impl Write) -> Result<()> {
    let t = e.topology();
    writeln!(sink, "{ENSEMBLE_MAGIC}")?;
    writeln!(sink, "{} {} {}", t.nx(), t.ny(), e.len())?;
    for member in e.members() {
        write_block(&mut sink, t, member.values())?;
    }
    sink.flush()?;
    Ok(())
}

pub fn load_model(source: impl BufRead) -> Result<MomentModel> {
    let mut lines = Lines::new(source);
    let (nx, ny, r) = lines.header(MODEL_MAGIC)?;
    let topology = topology_at(lines.line, nx, ny)?;
    if r == 0 {
        return Err(Error::parse(lines.line, "factor needs at least one column"));
    }
    let mean = lines.block(&topology, "mean")?;
    let mut columns = Vec::with_capacity(r);
    for k in 0..r {
        columns.push(lines.block(&topology, &format!("factor column {k}"))?);
    }
    lines.finish()?;
    MomentModel::new(topology, mean, columns)
}

pub fn save_model(model: &MomentModel, mut sink: impl Write) -> Result<()> {
    let t = model.topology();
    writeln!(sink, "{MODEL_MAGIC}")?;
    writeln!(sink, "{} {} {}", t.nx(), t.ny(), model.rank())?;
    write_block(&mut sink, t, model.mean())?;
    for column in model.columns() {
        write_block(&mut sink, t, column)?;
    }
    sink.flush()?;
    Ok(())
}
