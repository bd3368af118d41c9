//! Market data: relative-price series and stock groupings.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Day-by-day relative prices `x_i^t = close_t / close_{t-1}` for `n` stocks over `T` days.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketSeries {
    names: Vec<String>,
    relatives: Matrix,
    dates: Option<Vec<String>>,
}

impl MarketSeries {
    pub fn new(
        names: Vec<String>,
        rows: Vec<Vec<f64>>,
        dates: Option<Vec<String>>,
    ) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::data("market has no stocks"));
        }
        if rows.is_empty() {
            return Err(Error::data("market has no trading days"));
        }
        for (t, row) in rows.iter().enumerate() {
            if row.len() != names.len() {
                return Err(Error::data(format!(
                    "day {t} has {} values, expected {}",
                    row.len(),
                    names.len()
                )));
            }
            if let Some(i) = row.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::data(format!(
                    "relative price of {} on day {t} is {} (must be finite and > 0)",
                    names[i], row[i]
                )));
            }
        }
        if let Some(d) = &dates {
            if d.len() != rows.len() {
                return Err(Error::data(format!(
                    "{} date labels for {} days",
                    d.len(),
                    rows.len()
                )));
            }
        }
        let relatives = Matrix::from_rows(&rows)?;
        Ok(MarketSeries {
            names,
            relatives,
            dates,
        })
    }

    /// Converts consecutive price rows into relatives; the output has one row fewer.
    ///
    /// Date labels, if present, must cover the price rows; the first label is dropped.
    pub fn from_prices(
        names: Vec<String>,
        prices: &[Vec<f64>],
        dates: Option<Vec<String>>,
    ) -> Result<Self> {
        if prices.len() < 2 {
            return Err(Error::data(format!(
                "need at least 2 price rows to form relatives, found {}",
                prices.len()
            )));
        }
        for (t, row) in prices.iter().enumerate() {
            if let Some(i) = row.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::data(format!(
                    "price in column {i} on row {t} is {} (must be finite and > 0)",
                    row[i]
                )));
            }
        }
        let rows = prices
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(p1, p0)| p1 / p0).collect())
            .collect();
        let dates = dates.map(|mut d| {
            if !d.is_empty() {
                d.remove(0);
            }
            d
        });
        Self::new(names, rows, dates)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_stocks(&self) -> usize {
        self.names.len()
    }

    pub fn n_days(&self) -> usize {
        self.relatives.rows()
    }

    pub fn day(&self, t: usize) -> &[f64] {
        self.relatives.row(t)
    }

    pub fn days(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_days()).map(move |t| self.day(t))
    }

    pub fn dates(&self) -> Option<&[String]> {
        self.dates.as_deref()
    }

    pub fn date(&self, t: usize) -> Option<&str> {
        self.dates.as_ref().map(|d| d[t].as_str())
    }

    pub fn relatives(&self) -> &Matrix {
        &self.relatives
    }

    /// First `len` days.
    pub fn prefix(&self, len: usize) -> Result<MarketSeries> {
        if len == 0 || len > self.n_days() {
            return Err(Error::param(format!(
                "prefix length {len} outside 1..={}",
                self.n_days()
            )));
        }
        let rows = (0..len).map(|t| self.day(t).to_vec()).collect();
        let dates = self.dates.as_ref().map(|d| d[..len].to_vec());
        MarketSeries::new(self.names.clone(), rows, dates)
    }

    /// Largest single-day `max_i x_i / min_i x_i` over the series.
    pub fn max_dispersion(&self) -> f64 {
        self.days()
            .map(|x| {
                let hi = x.iter().copied().fold(f64::MIN, f64::max);
                let lo = x.iter().copied().fold(f64::MAX, f64::min);
                hi / lo
            })
            .fold(1.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub name: String,
    pub indices: Vec<usize>,
}

/// Named index sets over `{0..dim}`. Groups may overlap; every coordinate must be covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping {
    dim: usize,
    groups: Vec<Group>,
    partition: bool,
}

impl Grouping {
    pub fn new(dim: usize, groups: Vec<Group>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::grouping("no groups"));
        }
        let mut cover = vec![0usize; dim];
        for g in &groups {
            if g.indices.is_empty() {
                return Err(Error::grouping(format!("group '{}' is empty", g.name)));
            }
            let mut seen = vec![false; dim];
            for &i in &g.indices {
                if i >= dim {
                    return Err(Error::grouping(format!(
                        "group '{}' refers to index {i}, dimension is {dim}",
                        g.name
                    )));
                }
                if seen[i] {
                    return Err(Error::grouping(format!(
                        "group '{}' lists index {i} twice",
                        g.name
                    )));
                }
                seen[i] = true;
                cover[i] += 1;
            }
        }
        if let Some(i) = cover.iter().position(|&c| c == 0) {
            return Err(Error::grouping(format!(
                "index {i} is not covered by any group"
            )));
        }
        let partition = cover.iter().all(|&c| c == 1);
        Ok(Grouping {
            dim,
            groups,
            partition,
        })
    }

    /// Groups given as index lists, named `g0`, `g1`, ...
    pub fn from_indices(dim: usize, sets: &[&[usize]]) -> Result<Self> {
        let groups = sets
            .iter()
            .enumerate()
            .map(|(j, s)| Group {
                name: format!("g{j}"),
                indices: s.to_vec(),
            })
            .collect();
        Self::new(dim, groups)
    }

    /// Resolves groups of identifiers against `names`.
    pub fn from_named<S: AsRef<str>>(
        names: &[S],
        groups: &[(String, Vec<String>)],
    ) -> Result<Self> {
        let mut resolved = Vec::with_capacity(groups.len());
        for (gname, members) in groups {
            let mut indices = Vec::with_capacity(members.len());
            for m in members {
                let i = names.iter().position(|n| n.as_ref() == m).ok_or_else(|| {
                    Error::grouping(format!("group '{gname}' names unknown stock '{m}'"))
                })?;
                indices.push(i);
            }
            resolved.push(Group {
                name: gname.clone(),
                indices,
            });
        }
        let mut covered = vec![false; names.len()];
        for g in &resolved {
            for &i in &g.indices {
                covered[i] = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::grouping(format!(
                "stock '{}' is not covered by any group",
                names[i].as_ref()
            )));
        }
        Self::new(names.len(), resolved)
    }

    /// A single group containing every coordinate.
    pub fn single(dim: usize) -> Self {
        Self::new(
            dim,
            vec![Group {
                name: "all".into(),
                indices: (0..dim).collect(),
            }],
        )
        .expect("single group over a nonempty dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn is_partition(&self) -> bool {
        self.partition
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group(&self, j: usize) -> &Group {
        &self.groups[j]
    }

    /// Per-group ℓ1 mass of `v`.
    pub fn group_masses(&self, v: &[f64]) -> Vec<f64> {
        self.groups
            .iter()
            .map(|g| g.indices.iter().map(|&i| v[i].abs()).sum())
            .collect()
    }

    /// Group index of each coordinate. Only meaningful for partitions.
    pub fn membership(&self) -> Vec<usize> {
        let mut m = vec![usize::MAX; self.dim];
        for (j, g) in self.groups.iter().enumerate() {
            for &i in &g.indices {
                if m[i] == usize::MAX {
                    m[i] = j;
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn named(gs: &[(&str, &[&str])]) -> Vec<(String, Vec<String>)> {
        gs.iter().map(|(g, m)| (g.to_string(), names(m))).collect()
    }

    #[test]
    fn prices_to_relatives() {
        let m = MarketSeries::from_prices(
            names(&["a", "b"]),
            &[vec![100.0, 50.0], vec![110.0, 45.0]],
            None,
        )
        .unwrap();
        assert_eq!(m.n_days(), 1);
        assert!((m.day(0)[0] - 1.1).abs() < 1e-15);
        assert!((m.day(0)[1] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn constant_prices_give_unit_relatives() {
        let p = vec![vec![3.0, 7.0]; 3];
        let m = MarketSeries::from_prices(names(&["a", "b"]), &p, None).unwrap();
        assert_eq!(m.n_days(), 2);
        assert!(m.days().all(|x| x.iter().all(|&v| v == 1.0)));
    }

    #[test]
    fn zero_relative_rejected() {
        let e = MarketSeries::new(names(&["a", "b"]), vec![vec![1.0, 0.0]], None).unwrap_err();
        assert!(e.is_data_violation());
    }

    #[test]
    fn single_price_row_is_insufficient() {
        assert!(MarketSeries::from_prices(names(&["a"]), &[vec![1.0]], None).is_err());
    }

    #[test]
    fn disjoint_cover_is_partition() {
        let g = Grouping::from_named(
            &names(&["s1", "s2", "s3"]),
            &named(&[("A", &["s1", "s2"]), ("B", &["s3"])]),
        )
        .unwrap();
        assert!(g.is_partition());
    }

    #[test]
    fn overlap_is_not_partition() {
        let g = Grouping::from_named(
            &names(&["s1", "s2", "s3"]),
            &named(&[("A", &["s1", "s2"]), ("B", &["s2", "s3"])]),
        )
        .unwrap();
        assert!(!g.is_partition());
    }

    #[test]
    fn uncovered_stock_is_named() {
        let e = Grouping::from_named(&names(&["s1", "s2"]), &named(&[("A", &["s1"])])).unwrap_err();
        assert!(e.to_string().contains("s2"), "{e}");
    }

    #[test]
    fn unknown_stock_is_named() {
        let e = Grouping::from_named(&names(&["s1"]), &named(&[("A", &["s1", "zz"])])).unwrap_err();
        assert!(e.to_string().contains("zz"), "{e}");
    }

    #[test]
    fn empty_group_rejected() {
        assert!(Grouping::from_indices(2, &[&[0, 1], &[]]).is_err());
    }
}
