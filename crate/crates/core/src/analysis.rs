//! Temporal giant-component growth and the per-role ablation sweep.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{BipartiteGraph, Mode};
use crate::metrics::{components, compute_stats, MetricsError, NetworkStats};
use crate::rolenorm::RoleLabel;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("correlation undefined: a series has zero variance")]
    ZeroVariance,
    #[error("growth analysis needs at least two distinct release years, found {0}")]
    InsufficientYears(usize),
    #[error("no roles to ablate")]
    NoRoles,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(AnalysisError::TooFewPoints(n));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalysisError::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GrowthPoint {
    pub year: i32,
    pub nodes: usize,
    pub gc_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSeries {
    pub mode: Mode,
    pub points: Vec<GrowthPoint>,
    /// Correlation of `nodes` with `gc_size`; absent when either is constant.
    pub pearson_r: Option<f64>,
    /// Albums without a release year, left out of every snapshot.
    pub excluded_albums: usize,
}

/// One snapshot per release year: the network of all albums released up to
/// and including that year, together with their collaborators.
pub fn growth_series(b: &BipartiteGraph, mode: Mode) -> Result<GrowthSeries, AnalysisError> {
    let years: BTreeSet<i32> = b.albums().iter().filter_map(|a| a.release_year).collect();
    if years.len() < 2 {
        return Err(AnalysisError::InsufficientYears(years.len()));
    }
    let excluded_albums = b.albums().iter().filter(|a| a.release_year.is_none()).count();

    let points: Vec<GrowthPoint> = years
        .par_iter()
        .map(|&year| {
            let snapshot = b.restrict_albums(|a| a.release_year.is_some_and(|y| y <= year));
            let g = snapshot.project(mode);
            GrowthPoint {
                year,
                nodes: g.node_count(),
                gc_size: components(g.adjacency()).giant_size(),
            }
        })
        .collect();

    let nodes: Vec<f64> = points.iter().map(|p| p.nodes as f64).collect();
    let sizes: Vec<f64> = points.iter().map(|p| p.gc_size as f64).collect();
    Ok(GrowthSeries {
        mode,
        pearson_r: pearson(&nodes, &sizes).ok(),
        points,
        excluded_albums,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationResult {
    pub omitted_role: RoleLabel,
    pub omitted_edges: usize,
    pub omitted_fraction: f64,
    pub edge_count: usize,
    pub density: f64,
    pub giant_component_size: usize,
    /// Relative to the base network's node count.
    pub giant_component_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Descriptive {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub std_dev: f64,
}

impl Descriptive {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Descriptive {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            std_dev: var.sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepDescriptives {
    pub omitted_edges: Descriptive,
    pub edge_count: Descriptive,
    pub giant_component_size: Descriptive,
    pub density: Descriptive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationSweep {
    pub mode: Mode,
    pub base_stats: NetworkStats,
    /// Most impactful first.
    pub results: Vec<AblationResult>,
    pub descriptive: SweepDescriptives,
    /// Correlation of omitted edges with giant-component size; absent when either is constant.
    pub pearson_r: Option<f64>,
}

/// Ablates every role in turn, reprojects, and measures the giant component.
pub fn ablation_sweep(b: &BipartiteGraph, mode: Mode) -> Result<AblationSweep, AnalysisError> {
    let roles: Vec<RoleLabel> = b.role_labels().into_iter().collect();
    if roles.is_empty() {
        return Err(AnalysisError::NoRoles);
    }
    let base = b.project(mode);
    let base_stats = compute_stats(&base)?;
    let n = base.node_count();
    let base_edges = base.edge_count();
    let pair_count = if n < 2 { 0.0 } else { n as f64 * (n - 1) as f64 / 2.0 };

    let mut results: Vec<AblationResult> = roles
        .par_iter()
        .map(|role| {
            let g = b.ablate(role).graph.project(mode);
            let gc = components(g.adjacency()).giant_size();
            let m = g.edge_count();
            let omitted = base_edges - m;
            AblationResult {
                omitted_role: role.clone(),
                omitted_edges: omitted,
                omitted_fraction: if base_edges == 0 {
                    0.0
                } else {
                    omitted as f64 / base_edges as f64
                },
                edge_count: m,
                density: if pair_count == 0.0 { 0.0 } else { m as f64 / pair_count },
                giant_component_size: gc,
                giant_component_fraction: gc as f64 / n as f64,
            }
        })
        .collect();

    results.sort_by(|a, b| {
        a.giant_component_size
            .cmp(&b.giant_component_size)
            .then_with(|| b.omitted_fraction.total_cmp(&a.omitted_fraction))
            .then_with(|| a.omitted_role.cmp(&b.omitted_role))
    });

    let column = |f: fn(&AblationResult) -> f64| -> Vec<f64> { results.iter().map(f).collect() };
    let omitted = column(|r| r.omitted_edges as f64);
    let edges = column(|r| r.edge_count as f64);
    let sizes = column(|r| r.giant_component_size as f64);
    let densities = column(|r| r.density);

    let descriptive = SweepDescriptives {
        omitted_edges: Descriptive::of(&omitted).expect("non-empty"),
        edge_count: Descriptive::of(&edges).expect("non-empty"),
        giant_component_size: Descriptive::of(&sizes).expect("non-empty"),
        density: Descriptive::of(&densities).expect("non-empty"),
    };

    Ok(AblationSweep {
        mode,
        base_stats,
        pearson_r: pearson(&omitted, &sizes).ok(),
        results,
        descriptive,
    })
}
