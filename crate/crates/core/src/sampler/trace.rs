use std::io::{self, Write};

use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub sweep: u64,
    pub log_target: f64,
    pub n_edges: usize,
    pub n_cliques: usize,
    pub accepted: bool,
    pub params: Vec<f64>,
}

/// Thinned chain output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    pub param_names: Vec<&'static str>,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn new(param_names: Vec<&'static str>) -> Self {
        Self { param_names, records: Vec::new() }
    }

    pub fn push(&mut self, r: TraceRecord) {
        self.records.push(r);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn header(&self) -> String {
        let mut h = String::from("sweep,log_target,n_edges,n_cliques,accepted");
        for name in &self.param_names {
            h.push(',');
            h.push_str(name);
        }
        h
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.header())?;
        for r in &self.records {
            write!(w, "{},{},{},{},{}", r.sweep, r.log_target, r.n_edges, r.n_cliques, r.accepted as u8)?;
            for p in &r.params {
                write!(w, ",{p}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Mean of parameter column `k` over records with `sweep > after`.
    pub fn param_mean(&self, k: usize, after: u64) -> Option<f64> {
        let vals: Vec<f64> = self.records.iter().filter(|r| r.sweep > after).map(|r| r.params[k]).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// Running count of how often each vertex pair is an edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeFrequencies {
    v: usize,
    counts: Vec<u64>,
    draws: u64,
}

impl EdgeFrequencies {
    pub fn new(v: usize) -> Self {
        Self { v, counts: vec![0; v * v], draws: 0 }
    }

    pub fn record(&mut self, g: &Graph) {
        for (i, j) in g.edges() {
            self.counts[i * self.v + j] += 1;
        }
        self.draws += 1;
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn frequency(&self, i: usize, j: usize) -> f64 {
        if self.draws == 0 || i == j {
            return 0.0;
        }
        let (a, b) = (i.min(j), i.max(j));
        self.counts[a * self.v + b] as f64 / self.draws as f64
    }

    /// Symmetric `v × v` matrix, one row per line, comma separated.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for i in 0..self.v {
            let row: Vec<String> = (0..self.v).map(|j| format!("{}", self.frequency(i, j))).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}
