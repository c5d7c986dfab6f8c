//! On-disk link tables, keyed by scenario hash, IRS variant, seed and n_mc.
//!
//! CSV columns: `u,m,ergodic_rate,avg_snr_db,covered_20,covered_30`; rows
//! with an empty `m` hold the AP-only link of UE `u`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{IrsVariant, TOOL_VERSION};
use crate::error::{Error, Result};
use crate::link::LinkMetrics;
use crate::planner::{McSettings, MetricTable};

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy)]
pub struct CacheKey<'a> {
    pub scenario_hash: &'a str,
    pub variant: IrsVariant,
    pub mc: McSettings,
}

impl CacheKey<'_> {
    pub fn file_name(&self) -> String {
        format!(
            "{}-{}-{}-s{}-n{}.csv",
            &self.scenario_hash[..16.min(self.scenario_hash.len())],
            self.variant.mode,
            self.variant.elements,
            self.mc.seed,
            self.mc.n_mc
        )
    }

    fn header(&self) -> Vec<String> {
        vec![
            format!("# format {FORMAT_VERSION}"),
            format!("# tool irsplan {TOOL_VERSION}"),
            format!("# scenario_hash {}", self.scenario_hash),
            format!("# variant {}-{}", self.variant.mode, self.variant.elements),
            format!("# seed {}", self.mc.seed),
            format!("# n_mc {}", self.mc.n_mc),
        ]
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    u: usize,
    m: Option<usize>,
    ergodic_rate: f64,
    avg_snr_db: f64,
    covered_20: u8,
    covered_30: u8,
}

impl Row {
    fn new(u: usize, m: Option<usize>, l: &LinkMetrics) -> Self {
        Self {
            u,
            m,
            ergodic_rate: l.ergodic_rate,
            avg_snr_db: l.avg_snr_db,
            covered_20: l.covered(20.0) as u8,
            covered_30: l.covered(30.0) as u8,
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Cache(e.to_string())
}

pub fn write_table(path: &Path, key: &CacheKey<'_>, table: &MetricTable) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for line in key.header() {
        writeln!(out, "{line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for (u, l) in table.ap_only.iter().enumerate() {
        w.serialize(Row::new(u, None, l)).map_err(csv_err)?;
    }
    for u in 0..table.n_ues {
        for m in 0..table.n_spots {
            w.serialize(Row::new(u, Some(m), table.get(u, m))).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Loads a table written by [`write_table`]; fails on any key or shape mismatch.
pub fn read_table(path: &Path, key: &CacheKey<'_>, n_ues: usize, n_spots: usize) -> Result<MetricTable> {
    let mut reader = BufReader::new(File::open(path)?);
    for expected in key.header() {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        if line.trim_end() != expected {
            return Err(Error::Cache(format!(
                "header mismatch: `{}` vs `{expected}`",
                line.trim_end()
            )));
        }
    }
    let mut ap_only = vec![None; n_ues];
    let mut pairs = vec![None; n_ues * n_spots];
    for rec in csv::Reader::from_reader(reader).deserialize::<Row>() {
        let r = rec.map_err(csv_err)?;
        let l = LinkMetrics {
            ergodic_rate: r.ergodic_rate,
            avg_snr_db: r.avg_snr_db,
            mc_samples: key.mc.n_mc,
        };
        let slot = match r.m {
            None if r.u < n_ues => &mut ap_only[r.u],
            Some(m) if r.u < n_ues && m < n_spots => &mut pairs[r.u * n_spots + m],
            _ => return Err(Error::Cache(format!("row ({}, {:?}) out of range", r.u, r.m))),
        };
        *slot = Some(l);
    }
    let collect = |v: Vec<Option<LinkMetrics>>| {
        v.into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Cache("table is incomplete".into()))
    };
    Ok(MetricTable {
        n_ues,
        n_spots,
        pairs: collect(pairs)?,
        ap_only: collect(ap_only)?,
        mc: key.mc,
    })
}
