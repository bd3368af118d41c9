//! Price CSV and grouping file formats.

use std::fs;
use std::io::Write;
use std::path::Path;

use erep_core::{Grouping, MarketSeries};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// What the numeric cells of a price file hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataMode {
    /// Price levels; relatives are ratios of consecutive rows.
    #[default]
    RawPrices,
    /// Relatives, taken verbatim.
    Relatives,
}

impl std::str::FromStr for DataMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "raw_prices" => Ok(DataMode::RawPrices),
            "relatives" => Ok(DataMode::Relatives),
            other => Err(format!("unknown data mode `{other}`")),
        }
    }
}

/// Loads a CSV with a header of tickers. A first column named `date` is read as labels.
pub fn load_prices_csv(path: &Path, mode: DataMode) -> Result<MarketSeries> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_prices(&text, mode).map_err(|msg| match msg {
        ParseFailure::Format(m) => CliError::parse(path, m),
        ParseFailure::Core(e) => CliError::from(e),
    })
}

enum ParseFailure {
    Format(String),
    Core(erep_core::Error),
}

fn parse_prices(text: &str, mode: DataMode) -> std::result::Result<MarketSeries, ParseFailure> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| ParseFailure::Format(format!("bad header: {e}")))?
        .clone();
    let dated = header
        .get(0)
        .is_some_and(|h| h.eq_ignore_ascii_case("date"));
    let skip = usize::from(dated);
    let names: Vec<String> = header.iter().skip(skip).map(str::to_string).collect();
    if names.is_empty() {
        return Err(ParseFailure::Format("header has no stock columns".into()));
    }

    let mut rows = Vec::new();
    let mut dates = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        // 1-based line number, counting the header
        let line = r + 2;
        let record = record.map_err(|e| ParseFailure::Format(format!("row {line}: {e}")))?;
        if record.len() != names.len() + skip {
            return Err(ParseFailure::Format(format!(
                "row {line}: expected {} cells, found {}",
                names.len() + skip,
                record.len()
            )));
        }
        if dated {
            dates.push(record[0].to_string());
        }
        let mut row = Vec::with_capacity(names.len());
        for (c, cell) in record.iter().enumerate().skip(skip) {
            let v: f64 = cell.parse().map_err(|_| {
                ParseFailure::Format(format!(
                    "row {line}, column {} ({}): `{cell}` is not a number",
                    c + 1,
                    header.get(c).unwrap_or("?")
                ))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    let dates = dated.then_some(dates);
    match mode {
        DataMode::Relatives => MarketSeries::new(names, rows, dates),
        DataMode::RawPrices => MarketSeries::from_prices(names, &rows, dates),
    }
    .map_err(ParseFailure::Core)
}

/// Writes relatives with shortest round-trip formatting, so reloading is bit-exact.
pub fn write_relatives_csv(path: &Path, market: &MarketSeries) -> Result<()> {
    let mut out = String::new();
    if market.dates().is_some() {
        out.push_str("date,");
    }
    out.push_str(&market.names().join(","));
    out.push('\n');
    for (t, row) in market.days().enumerate() {
        if let Some(d) = market.date(t) {
            out.push_str(d);
            out.push(',');
        }
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}

/// Loads `Name: t1,t2,...` lines; `#` starts a comment line.
pub fn load_grouping(path: &Path, names: &[String]) -> Result<Grouping> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let groups = parse_grouping(&text).map_err(|m| CliError::parse(path, m))?;
    Grouping::from_named(names, &groups).map_err(|e| CliError::parse(path, e.to_string()))
}

fn parse_grouping(text: &str) -> std::result::Result<Vec<(String, Vec<String>)>, String> {
    let mut groups = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, members) = line
            .split_once(':')
            .ok_or_else(|| format!("line {}: expected `Name: t1,t2,...`", i + 1))?;
        let members: Vec<String> = members
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        groups.push((name.trim().to_string(), members));
    }
    Ok(groups)
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| CliError::io(path, e))
}
