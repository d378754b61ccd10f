//! Whole-graph statistics, degree distributions and hub rankings.
//!
//! Path-based statistics (diameter, average path length) are exact: one
//! breadth-first search per giant-component node, run in parallel. Edge
//! weights are ignored for paths and clustering; they only enter the
//! average weighted degree.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Adjacency, ProjectedGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("graph has no nodes")]
    EmptyGraph,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub density: f64,
    /// Longest shortest path inside the giant component, in hops.
    pub diameter: u32,
    pub average_degree: f64,
    pub average_weighted_degree: f64,
    pub average_clustering: f64,
    /// Mean hop distance over ordered pairs of distinct giant-component nodes.
    pub average_path_length: f64,
    pub component_count: usize,
    pub giant_component_size: usize,
    /// The giant component is a single node, so path statistics are zero by convention.
    pub path_length_degenerate: bool,
}

/// Connected-component labelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component id per node; ids follow the smallest node index they contain.
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// Largest component; ties go to the one holding the smallest node index.
    pub fn giant(&self) -> Option<u32> {
        let mut best: Option<(usize, u32)> = None;
        for (id, &size) in self.sizes.iter().enumerate() {
            if best.is_none_or(|(s, _)| size > s) {
                best = Some((size, id as u32));
            }
        }
        best.map(|(_, id)| id)
    }

    pub fn giant_size(&self) -> usize {
        self.giant().map_or(0, |id| self.sizes[id as usize])
    }

    pub fn members(&self, component: u32) -> Vec<u32> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == component)
            .map(|(v, _)| v as u32)
            .collect()
    }
}

pub fn components(g: &Adjacency) -> Components {
    let n = g.node_count();
    let mut labels = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if labels[start] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        labels[start] = id;
        stack.push(start as u32);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in g.neighbors(v as usize) {
                if labels[w as usize] == u32::MAX {
                    labels[w as usize] = id;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    Components { labels, sizes }
}

/// Sum of distances to every reachable node and the eccentricity of `source`.
fn bfs_from(g: &Adjacency, source: u32, dist: &mut [u32], queue: &mut Vec<u32>) -> (u64, u32) {
    queue.clear();
    dist[source as usize] = 0;
    queue.push(source);
    let mut head = 0;
    let mut total = 0u64;
    let mut ecc = 0u32;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        let d = dist[v as usize];
        total += d as u64;
        ecc = ecc.max(d);
        for &w in g.neighbors(v as usize) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = d + 1;
                queue.push(w);
            }
        }
    }
    for &v in queue.iter() {
        dist[v as usize] = u32::MAX;
    }
    (total, ecc)
}

/// Exact (diameter, sum of ordered-pair distances) over `nodes`, which must
/// form one connected component.
pub fn all_pairs_path_totals(g: &Adjacency, nodes: &[u32]) -> (u32, u64) {
    let n = g.node_count();
    nodes
        .par_iter()
        .map_init(
            || (vec![u32::MAX; n], Vec::with_capacity(n)),
            |(dist, queue), &s| bfs_from(g, s, dist, queue),
        )
        .fold(|| (0u32, 0u64), |(d, t), (sum, ecc)| (d.max(ecc), t + sum))
        .reduce(|| (0, 0), |a, b| (a.0.max(b.0), a.1 + b.1))
}

fn count_common(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    common
}

/// Local clustering coefficient per node; nodes of degree < 2 get 0.
pub fn local_clustering(g: &Adjacency) -> Vec<f64> {
    (0..g.node_count())
        .into_par_iter()
        .map(|v| {
            let nbrs = g.neighbors(v);
            let d = nbrs.len();
            if d < 2 {
                return 0.0;
            }
            let twice_links: usize = nbrs
                .iter()
                .map(|&w| count_common(nbrs, g.neighbors(w as usize)))
                .sum();
            twice_links as f64 / (d * (d - 1)) as f64
        })
        .collect()
}

pub fn compute_stats<G: AsRef<Adjacency>>(g: &G) -> Result<NetworkStats, MetricsError> {
    let g = g.as_ref();
    let n = g.node_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let m = g.edge_count();
    let comps = components(g);
    let giant = comps.giant().expect("non-empty graph has a component");
    let giant_nodes = comps.members(giant);
    let gc = giant_nodes.len();

    let (diameter, average_path_length) = if gc >= 2 {
        let (diameter, total) = all_pairs_path_totals(g, &giant_nodes);
        (diameter, total as f64 / (gc as f64 * (gc - 1) as f64))
    } else {
        (0, 0.0)
    };

    // Sequential sum keeps the result independent of thread count.
    let clustering_sum: f64 = local_clustering(g).iter().sum();

    Ok(NetworkStats {
        node_count: n,
        edge_count: m,
        density: if n < 2 {
            0.0
        } else {
            2.0 * m as f64 / (n as f64 * (n - 1) as f64)
        },
        diameter,
        average_degree: 2.0 * m as f64 / n as f64,
        average_weighted_degree: 2.0 * g.total_weight() as f64 / n as f64,
        average_clustering: clustering_sum / n as f64,
        average_path_length,
        component_count: comps.count(),
        giant_component_size: gc,
        path_length_degenerate: gc < 2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreePoint {
    pub degree: usize,
    pub count: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeDistribution {
    /// Ascending by degree; only degrees that occur.
    pub points: Vec<DegreePoint>,
    /// Absent below three nodes or when every degree is equal.
    pub skewness: Option<f64>,
}

/// Fisher-Pearson moment coefficient g1 = m3 / m2^(3/2), biased moments.
pub fn skewness(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 3 || values.iter().all(|&v| v == values[0]) {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let (mut m2, mut m3) = (0.0, 0.0);
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n as f64;
    m3 /= n as f64;
    if m2 == 0.0 {
        return None;
    }
    Some(m3 / m2.powf(1.5))
}

pub fn degree_distribution<G: AsRef<Adjacency>>(g: &G) -> Result<DegreeDistribution, MetricsError> {
    let g = g.as_ref();
    let n = g.node_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; max + 1];
    for &d in &degrees {
        counts[d] += 1;
    }
    let points = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(degree, &count)| DegreePoint {
            degree,
            count,
            fraction: count as f64 / n as f64,
        })
        .collect();
    let as_f64: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
    Ok(DegreeDistribution {
        points,
        skewness: skewness(&as_f64),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hub {
    pub id: String,
    pub name: String,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HubRanking {
    pub entries: Vec<Hub>,
}

/// Top `k` nodes by unweighted degree, ties by id ascending.
pub fn top_hubs(g: &ProjectedGraph, k: usize) -> HubRanking {
    let adj = g.adjacency();
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| {
        adj.degree(b)
            .cmp(&adj.degree(a))
            .then_with(|| g.node_ids[a].cmp(&g.node_ids[b]))
    });
    HubRanking {
        entries: order
            .into_iter()
            .take(k)
            .map(|v| Hub {
                id: g.node_ids[v].clone(),
                name: g.node_labels[v].clone(),
                degree: adj.degree(v),
            })
            .collect(),
    }
}
