use std::io::{Read, Write};

use crate::error::{Error, Result};

/// `n` replicate observations of `v` variables, stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    n: usize,
    v: usize,
    columns: Vec<f64>,
    col_sq: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from replicate rows.
    pub fn from_rows(v: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if v == 0 {
            return Err(Error::InvalidData("a dataset needs at least one variable".into()));
        }
        if rows.is_empty() {
            return Err(Error::InvalidData("a dataset needs at least one replicate".into()));
        }
        let n = rows.len();
        let mut columns = vec![0.0; n * v];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != v {
                return Err(Error::InvalidData(format!("row {} has {} values, expected {v}", r + 1, row.len())));
            }
            for (i, &y) in row.iter().enumerate() {
                if !y.is_finite() {
                    return Err(Error::InvalidData(format!("non-finite value in row {}", r + 1)));
                }
                columns[i * n + r] = y;
            }
        }
        Ok(Self::from_columns(n, v, columns))
    }

    pub(crate) fn from_columns(n: usize, v: usize, columns: Vec<f64>) -> Self {
        let col_sq = columns.chunks(n).map(|c| c.iter().map(|y| y * y).sum()).collect();
        Self { n, v, columns, col_sq }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i * self.n..(i + 1) * self.n]
    }

    pub fn value(&self, r: usize, i: usize) -> f64 {
        self.columns[i * self.n + r]
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        (0..self.v).map(|i| self.value(r, i)).collect()
    }

    /// `Σ_r (y_i^(r))²` for column `i`.
    pub fn column_square_sum(&self, i: usize) -> f64 {
        self.col_sq[i]
    }

    /// `Σ_r (y^(r))ᵀ y^(r)`.
    pub fn total_square_sum(&self) -> f64 {
        self.col_sq.iter().sum()
    }

    /// Reads CSV with one replicate per row. A non-numeric first row is
    /// taken as a header; lines starting with `#` are ignored.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse { line: k + 1, message: e.to_string() })?;
            let line = rec.position().map_or(k + 1, |p| p.line() as usize);
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if rows.is_empty() && k == 0 => continue,
                Err(e) => return Err(Error::Parse { line, message: e.to_string() }),
            }
        }
        let v = rows.first().map_or(0, Vec::len);
        Self::from_rows(v, &rows)
    }

    /// Writes CSV with a `y0,y1,…` header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidData(e.to_string());
        let mut w = csv::Writer::from_writer(writer);
        w.write_record((0..self.v).map(|i| format!("y{i}"))).map_err(io)?;
        for r in 0..self.n {
            w.write_record(self.row(r).iter().map(|y| format!("{y}"))).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidData(e.to_string()))
    }
}
