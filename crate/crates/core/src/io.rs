//! Text formats for chains and measurement series.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::lattice::Chain;
use crate::mc::SampleRun;
use crate::toric::{Sector, TimeBoundary};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainFormat {
    /// Sorted cell indices, one per line.
    #[default]
    Indices,
    /// Packed bit vector as hexadecimal words.
    Hex,
}

impl std::str::FromStr for ChainFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indices" => Ok(ChainFormat::Indices),
            "hex" => Ok(ChainFormat::Hex),
            _ => Err(Error::Parse(format!("unknown chain format {s:?}"))),
        }
    }
}

pub fn format_chain(c: &Chain, format: ChainFormat) -> String {
    match format {
        ChainFormat::Indices => {
            let mut s = String::new();
            for i in c.indices() {
                writeln!(s, "{i}").unwrap();
            }
            s
        }
        ChainFormat::Hex => format!("{}\n", c.bits().to_hex()),
    }
}

/// Parses a chain of `len` cells of rank `rank`.
pub fn parse_chain(text: &str, rank: usize, len: usize, format: ChainFormat) -> Result<Chain> {
    match format {
        ChainFormat::Indices => {
            let mut idx = Vec::new();
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let i: usize = line
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: expected a cell index, got {line:?}", n + 1)))?;
                if i >= len {
                    return Err(Error::Parse(format!("line {}: index {i} out of range (< {len})", n + 1)));
                }
                if idx.last().is_some_and(|&prev| prev >= i) {
                    return Err(Error::Parse(format!("line {}: indices must be strictly increasing", n + 1)));
                }
                idx.push(i);
            }
            Ok(Chain::from_indices(rank, len, idx))
        }
        ChainFormat::Hex => {
            let body: String = text
                .lines()
                .filter(|l| !l.trim_start().starts_with('#'))
                .collect::<Vec<_>>()
                .concat();
            Ok(Chain::from_bits(rank, BitVec::from_hex(len, &body)?))
        }
    }
}

/// Identifies where a serialized error or syndrome chain lives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainHeader {
    pub l: usize,
    /// Noisy rounds; 0 for a purely spatial chain.
    pub rounds: usize,
    pub sector: Sector,
    pub time: TimeBoundary,
    pub rank: usize,
    pub cells: usize,
    pub format: ChainFormat,
}

/// Writes the header as a leading `# {json}` comment line followed by the chain.
pub fn format_spacetime_chain(header: &ChainHeader, chain: &Chain) -> Result<String> {
    if chain.len() != header.cells || chain.rank() != header.rank {
        return Err(Error::DimensionMismatch("header does not describe the chain".into()));
    }
    Ok(format!(
        "# {}\n{}",
        serde_json::to_string(header)?,
        format_chain(chain, header.format)
    ))
}

pub fn parse_spacetime_chain(text: &str) -> Result<(ChainHeader, Chain)> {
    let first = text.lines().next().unwrap_or_default();
    let json = first
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing header line".into()))?;
    let header: ChainHeader =
        serde_json::from_str(json.trim()).map_err(|e| Error::Parse(format!("header: {e}")))?;
    let body = &text[first.len()..];
    let chain = parse_chain(body, header.rank, header.cells, header.format)?;
    Ok((header, chain))
}

/// Writes every measurement row of an ensemble to one CSV, prefixed by the
/// sample index, rung and inverse temperature.
pub fn write_series_csv(path: &Path, runs: &[SampleRun]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let Some(first) = runs.first().and_then(|r| r.series.first()) else {
        return Err(Error::Precondition("no series to write".into()));
    };
    let mut header = vec!["sample".to_string(), "rung".into(), "beta".into(), "record".into()];
    header.extend(first.columns.iter().cloned());
    w.write_record(&header)?;
    for run in runs {
        for (rung, s) in run.series.iter().enumerate() {
            for (k, row) in s.rows.iter().enumerate() {
                let mut rec = vec![run.index.to_string(), rung.to_string(), s.beta.to_string(), k.to_string()];
                rec.extend(row.iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Generic CSV of named columns.
pub fn write_table_csv(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// `foo.csv` → `foo.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}
