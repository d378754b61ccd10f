//! Brute-force reference implementations shared by the integration suites.
//!
//! Nothing in here goes through the library's projection, ablation or
//! metrics code: each oracle recomputes its answer from raw triples or raw
//! edge lists with nested loops.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use collabnet::{AssociationRecord, Dataset, Mode, ProjectedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn album_id(i: usize) -> String {
    format!("a{i:03}")
}

pub fn collaborator_id(i: usize) -> String {
    format!("c{i:03}")
}

/// Raw bipartite fixture: (album, collaborator, canonical roles).
#[derive(Debug, Clone)]
pub struct RawBipartite {
    pub albums: usize,
    pub collaborators: usize,
    pub links: Vec<(usize, usize, BTreeSet<String>)>,
    pub years: Vec<Option<i32>>,
}

pub const ROLE_POOL: [&str; 5] = ["producer", "engineer", "mastered", "photography", "main artist"];

impl RawBipartite {
    pub fn random(rng: &mut ChaCha8Rng, max_albums: usize, max_collaborators: usize, p: f64) -> Self {
        let albums = rng.random_range(1..=max_albums);
        let collaborators = rng.random_range(1..=max_collaborators);
        let mut links = Vec::new();
        for a in 0..albums {
            for c in 0..collaborators {
                if rng.random_bool(p) {
                    let mut roles = BTreeSet::new();
                    roles.insert(ROLE_POOL[rng.random_range(0..ROLE_POOL.len())].to_string());
                    while rng.random_bool(0.3) {
                        roles.insert(ROLE_POOL[rng.random_range(0..ROLE_POOL.len())].to_string());
                    }
                    links.push((a, c, roles));
                }
            }
        }
        let years = (0..albums).map(|_| Some(rng.random_range(1960..1966))).collect();
        RawBipartite {
            albums,
            collaborators,
            links,
            years,
        }
    }

    /// Records for every link; albums/collaborators without links do not appear.
    pub fn dataset(&self) -> Dataset {
        Dataset::from_records(self.links.iter().flat_map(|(a, c, roles)| {
            roles.iter().map(move |r| AssociationRecord {
                album_id: album_id(*a),
                album_title: format!("Album {a}"),
                main_artist: format!("Artist {a}"),
                release_year: self.years[*a],
                collaborator_id: collaborator_id(*c),
                collaborator_name: format!("Person {c}"),
                role_raw: r.clone(),
            })
        }))
    }

    pub fn linked_albums(&self) -> BTreeSet<usize> {
        self.links.iter().map(|l| l.0).collect()
    }

    pub fn linked_collaborators(&self) -> BTreeSet<usize> {
        self.links.iter().map(|l| l.1).collect()
    }

    /// The same fixture with `role` removed from every link and empty links dropped.
    pub fn without_role(&self, role: &str) -> RawBipartite {
        let links = self
            .links
            .iter()
            .filter_map(|(a, c, roles)| {
                let rest: BTreeSet<String> = roles.iter().filter(|r| *r != role).cloned().collect();
                (!rest.is_empty()).then_some((*a, *c, rest))
            })
            .collect();
        RawBipartite {
            links,
            ..self.clone()
        }
    }
}

/// Pairwise-intersection projection keyed by node ids.
pub fn brute_projection(raw: &RawBipartite, mode: Mode) -> BTreeMap<(String, String), usize> {
    let linked = |a: usize, c: usize| raw.links.iter().any(|l| l.0 == a && l.1 == c);
    let mut edges = BTreeMap::new();
    match mode {
        Mode::Album => {
            for x in 0..raw.albums {
                for y in x + 1..raw.albums {
                    let shared = (0..raw.collaborators)
                        .filter(|&c| linked(x, c) && linked(y, c))
                        .count();
                    if shared > 0 {
                        edges.insert((album_id(x), album_id(y)), shared);
                    }
                }
            }
        }
        Mode::Collaborator => {
            for x in 0..raw.collaborators {
                for y in x + 1..raw.collaborators {
                    let shared = (0..raw.albums).filter(|&a| linked(a, x) && linked(a, y)).count();
                    if shared > 0 {
                        edges.insert((collaborator_id(x), collaborator_id(y)), shared);
                    }
                }
            }
        }
    }
    edges
}

pub fn projected_by_id(g: &ProjectedGraph) -> BTreeMap<(String, String), usize> {
    g.edges
        .iter()
        .map(|e| {
            (
                (g.node_ids[e.u as usize].clone(), g.node_ids[e.v as usize].clone()),
                e.weight() as usize,
            )
        })
        .collect()
}

/// Largest component size over `n` nodes with the given undirected pairs.
pub fn brute_giant_size(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut label: Vec<usize> = (0..n).collect();
    // Repeated relaxation until labels settle.
    loop {
        let mut changed = false;
        for &(u, v) in edges {
            let m = label[u].min(label[v]);
            if label[u] != m || label[v] != m {
                label[u] = m;
                label[v] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut sizes = BTreeMap::new();
    for l in label {
        *sizes.entry(l).or_insert(0usize) += 1;
    }
    sizes.values().copied().max().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub density: f64,
    pub diameter: u32,
    pub average_degree: f64,
    pub average_weighted_degree: f64,
    pub average_clustering: f64,
    pub average_path_length: f64,
    pub component_count: usize,
    pub giant_component_size: usize,
}

/// Floyd-Warshall distances, triple-loop triangles, everything from scratch.
pub fn naive_stats(n: usize, edges: &[(u32, u32, u32)]) -> NaiveStats {
    const INF: u32 = u32::MAX / 4;
    let mut dist = vec![vec![INF; n]; n];
    let mut adj = vec![vec![false; n]; n];
    let mut wsum = 0u64;
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v, w) in edges {
        let (u, v) = (u as usize, v as usize);
        adj[u][v] = true;
        adj[v][u] = true;
        dist[u][v] = 1;
        dist[v][u] = 1;
        wsum += w as u64;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }

    // Components: the smallest reachable index is the representative.
    let rep: Vec<usize> = (0..n).map(|i| (0..n).find(|&j| dist[i][j] < INF).unwrap()).collect();
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &rep {
        *sizes.entry(r).or_default() += 1;
    }
    let max = sizes.values().copied().max().unwrap_or(0);
    let giant_rep = sizes.iter().find(|(_, &s)| s == max).map(|(&r, _)| r).unwrap();
    let members: Vec<usize> = (0..n).filter(|&i| rep[i] == giant_rep).collect();

    let mut diameter = 0;
    let mut total = 0u64;
    for &i in &members {
        for &j in &members {
            if i != j {
                diameter = diameter.max(dist[i][j]);
                total += dist[i][j] as u64;
            }
        }
    }
    let g = members.len();
    let apl = if g >= 2 {
        total as f64 / (g * (g - 1)) as f64
    } else {
        0.0
    };

    let mut clustering = 0.0;
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
        let d = nb.len();
        if d < 2 {
            continue;
        }
        let mut links = 0;
        for i in 0..d {
            for j in i + 1..d {
                if adj[nb[i]][nb[j]] {
                    links += 1;
                }
            }
        }
        clustering += links as f64 / (d * (d - 1) / 2) as f64;
    }

    let m = edges.len();
    NaiveStats {
        node_count: n,
        edge_count: m,
        density: if n < 2 { 0.0 } else { 2.0 * m as f64 / (n * (n - 1)) as f64 },
        diameter,
        average_degree: 2.0 * m as f64 / n as f64,
        average_weighted_degree: 2.0 * wsum as f64 / n as f64,
        average_clustering: clustering / n as f64,
        average_path_length: apl,
        component_count: sizes.len(),
        giant_component_size: g,
    }
}

/// Returns a description of the first mismatch, if any. Integers must match
/// exactly, ratios within `tol`.
pub fn stats_mismatch(got: &collabnet::NetworkStats, want: &NaiveStats, tol: f64) -> Option<String> {
    let ints = [
        ("node_count", got.node_count, want.node_count),
        ("edge_count", got.edge_count, want.edge_count),
        ("diameter", got.diameter as usize, want.diameter as usize),
        ("component_count", got.component_count, want.component_count),
        ("giant_component_size", got.giant_component_size, want.giant_component_size),
    ];
    for (name, a, b) in ints {
        if a != b {
            return Some(format!("{name}: {a} != {b}"));
        }
    }
    let ratios = [
        ("density", got.density, want.density),
        ("average_degree", got.average_degree, want.average_degree),
        ("average_weighted_degree", got.average_weighted_degree, want.average_weighted_degree),
        ("average_clustering", got.average_clustering, want.average_clustering),
        ("average_path_length", got.average_path_length, want.average_path_length),
    ];
    for (name, a, b) in ratios {
        if (a - b).abs() > tol {
            return Some(format!("{name}: {a} != {b}"));
        }
    }
    None
}

/// G(n, p) with weights in 1..=3.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(u32, u32, u32)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u as u32, v as u32, rng.random_range(1..=3)));
            }
        }
    }
    edges
}

pub fn is_connected(n: usize, edges: &[(u32, u32, u32)]) -> bool {
    let pairs: Vec<(usize, usize)> = edges.iter().map(|&(u, v, _)| (u as usize, v as usize)).collect();
    brute_giant_size(n, &pairs) == n
}

pub type EdgeList = Vec<(u32, u32, u32)>;

/// Every connected labelled graph on up to 6 nodes, plus `per_size` random
/// connected graphs on 7 and 8 nodes.
pub fn connected_catalog(rng: &mut ChaCha8Rng, per_size: usize) -> Vec<(usize, EdgeList)> {
    let mut catalog = Vec::new();
    for n in 1..=6usize {
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(u32, u32, u32)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(i, &(u, v))| (u, v, 1 + (i as u32 % 3)))
                .collect();
            if is_connected(n, &edges) {
                catalog.push((n, edges));
            }
        }
    }
    for n in 7..=8 {
        let mut found = 0;
        while found < per_size {
            let p = rng.random_range(0.2..0.8);
            let edges = random_graph(rng, n, p);
            if is_connected(n, &edges) {
                catalog.push((n, edges));
                found += 1;
            }
        }
    }
    catalog
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}
