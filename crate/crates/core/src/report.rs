//! CSV and JSON emitters for analysis results.
//!
//! Everything here is deterministic for a given input: rows follow the
//! already-sorted result order and floats use the shortest round-trip form.

use std::io::Write;

use serde::Serialize;

use crate::analysis::{AblationSweep, GrowthSeries};
use crate::metrics::{DegreeDistribution, HubRanking, NetworkStats};

pub fn write_degree_distribution<W: Write>(d: &DegreeDistribution, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["degree", "fraction"])?;
    for p in &d.points {
        w.write_record([p.degree.to_string(), p.fraction.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_hubs<W: Write>(h: &HubRanking, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "id", "name", "degree"])?;
    for (i, hub) in h.entries.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            hub.id.clone(),
            hub.name.clone(),
            hub.degree.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_growth<W: Write>(g: &GrowthSeries, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["year", "nodes", "gc_size"])?;
    for p in &g.points {
        w.write_record([p.year.to_string(), p.nodes.to_string(), p.gc_size.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub const ABLATION_COLUMNS: [&str; 5] =
    ["role", "omitted_edges", "omitted_fraction", "gc_size", "gc_fraction"];

/// One row per role, most impactful first.
pub fn write_ablation<W: Write>(s: &AblationSweep, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ABLATION_COLUMNS)?;
    for r in &s.results {
        w.write_record([
            r.omitted_role.to_string(),
            r.omitted_edges.to_string(),
            r.omitted_fraction.to_string(),
            r.giant_component_size.to_string(),
            r.giant_component_fraction.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct StatsReport<'a> {
    pub mode: &'a str,
    #[serde(flatten)]
    pub stats: &'a NetworkStats,
    pub degree_skewness: Option<f64>,
    pub growth_pearson_r: Option<f64>,
    pub notices: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct AblationSummary<'a> {
    pub mode: &'a str,
    pub role_count: usize,
    pub base_edge_count: usize,
    pub base_giant_component_size: usize,
    pub descriptive: &'a crate::analysis::SweepDescriptives,
    pub pearson_omitted_edges_vs_gc_size: Option<f64>,
}

impl<'a> AblationSummary<'a> {
    pub fn new(s: &'a AblationSweep) -> Self {
        AblationSummary {
            mode: s.mode.as_str(),
            role_count: s.results.len(),
            base_edge_count: s.base_stats.edge_count,
            base_giant_component_size: s.base_stats.giant_component_size,
            descriptive: &s.descriptive,
            pearson_omitted_edges_vs_gc_size: s.pearson_r,
        }
    }
}

pub fn write_json<W: Write, T: Serialize>(value: &T, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")
}
