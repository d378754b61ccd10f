//! Bipartite album/collaborator graph, its one-mode projections, and
//! role-ablated derivations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Dataset;
use crate::rolenorm::{normalize_role, RoleLabel};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown projection mode `{0}` (expected `album` or `collaborator`)")]
    UnknownMode(String),
    #[error("graphs have different projection modes")]
    ModeMismatch,
    #[error("base graph has no edges; omitted fraction is undefined")]
    NoBaseEdges,
    #[error("ablated graph has more edges ({ablated}) than its base ({base})")]
    NotDerived { base: usize, ablated: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Album,
    Collaborator,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Album, Mode::Collaborator];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Album => "album",
            Mode::Collaborator => "collaborator",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "album" | "albums" => Ok(Mode::Album),
            "collaborator" | "collaborators" | "social" => Ok(Mode::Collaborator),
            other => Err(GraphError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlbumNode {
    pub id: String,
    pub title: String,
    pub main_artist: String,
    pub release_year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollaboratorNode {
    pub id: String,
    pub name: String,
}

/// One collaborator's participation in one album.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Association {
    pub album: u32,
    pub collaborator: u32,
    pub roles: BTreeSet<RoleLabel>,
}

/// Albums and collaborators, each indexed in ascending id order, joined by
/// role-labelled associations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BipartiteGraph {
    albums: Vec<AlbumNode>,
    collaborators: Vec<CollaboratorNode>,
    /// Sorted by (album, collaborator); at most one per pair.
    associations: Vec<Association>,
}

#[derive(Debug, Clone)]
pub struct Ablated {
    pub graph: BipartiteGraph,
    /// The role did not occur in any association.
    pub unknown_role: bool,
}

impl BipartiteGraph {
    /// Builds the graph with the standard role cleaning.
    pub fn from_dataset(d: &Dataset) -> Self {
        build_bipartite(d, |raw| normalize_role(raw).label)
    }

    pub fn albums(&self) -> &[AlbumNode] {
        &self.albums
    }

    pub fn collaborators(&self) -> &[CollaboratorNode] {
        &self.collaborators
    }

    pub fn associations(&self) -> &[Association] {
        &self.associations
    }

    /// Distinct role labels carried by at least one association.
    pub fn role_labels(&self) -> BTreeSet<RoleLabel> {
        self.associations
            .iter()
            .flat_map(|a| a.roles.iter().cloned())
            .collect()
    }

    /// Collaborator indices per album, ascending.
    pub fn album_members(&self) -> Vec<Vec<u32>> {
        let mut members = vec![Vec::new(); self.albums.len()];
        for a in &self.associations {
            members[a.album as usize].push(a.collaborator);
        }
        members
    }

    /// Album indices per collaborator, ascending.
    pub fn collaborator_albums(&self) -> Vec<Vec<u32>> {
        let mut albums = vec![Vec::new(); self.collaborators.len()];
        for a in &self.associations {
            albums[a.collaborator as usize].push(a.album);
        }
        albums
    }

    /// Removes `role` from every association and drops associations left
    /// without roles. Node sets are unchanged.
    pub fn ablate(&self, role: &RoleLabel) -> Ablated {
        let mut seen = false;
        let associations = self
            .associations
            .iter()
            .filter_map(|a| {
                if !a.roles.contains(role) {
                    return Some(a.clone());
                }
                seen = true;
                let mut roles = a.roles.clone();
                roles.remove(role);
                (!roles.is_empty()).then(|| Association { roles, ..a.clone() })
            })
            .collect();
        Ablated {
            graph: BipartiteGraph {
                albums: self.albums.clone(),
                collaborators: self.collaborators.clone(),
                associations,
            },
            unknown_role: !seen,
        }
    }

    /// Sub-graph of the albums accepted by `keep` and the collaborators
    /// incident to them.
    pub fn restrict_albums<F>(&self, keep: F) -> BipartiteGraph
    where
        F: Fn(&AlbumNode) -> bool,
    {
        let mut album_map = vec![None; self.albums.len()];
        let mut albums = Vec::new();
        for (i, album) in self.albums.iter().enumerate() {
            if keep(album) {
                album_map[i] = Some(albums.len() as u32);
                albums.push(album.clone());
            }
        }

        let mut used = vec![false; self.collaborators.len()];
        for a in &self.associations {
            if album_map[a.album as usize].is_some() {
                used[a.collaborator as usize] = true;
            }
        }
        let mut collab_map = vec![None; self.collaborators.len()];
        let mut collaborators = Vec::new();
        for (i, c) in self.collaborators.iter().enumerate() {
            if used[i] {
                collab_map[i] = Some(collaborators.len() as u32);
                collaborators.push(c.clone());
            }
        }

        let associations = self
            .associations
            .iter()
            .filter_map(|a| {
                Some(Association {
                    album: album_map[a.album as usize]?,
                    collaborator: collab_map[a.collaborator as usize]?,
                    roles: a.roles.clone(),
                })
            })
            .collect();

        BipartiteGraph {
            albums,
            collaborators,
            associations,
        }
    }

    pub fn project(&self, mode: Mode) -> ProjectedGraph {
        project(self, mode)
    }
}

/// One association per distinct (album, collaborator) carrying the union of
/// its normalized roles. Album metadata comes from the first record seen.
pub fn build_bipartite<N>(d: &Dataset, normalizer: N) -> BipartiteGraph
where
    N: Fn(&str) -> RoleLabel,
{
    let mut albums: BTreeMap<&str, AlbumNode> = BTreeMap::new();
    let mut collaborators: BTreeMap<&str, CollaboratorNode> = BTreeMap::new();
    for r in &d.records {
        albums.entry(&r.album_id).or_insert_with(|| AlbumNode {
            id: r.album_id.clone(),
            title: r.album_title.clone(),
            main_artist: r.main_artist.clone(),
            release_year: r.release_year,
        });
        collaborators
            .entry(&r.collaborator_id)
            .or_insert_with(|| CollaboratorNode {
                id: r.collaborator_id.clone(),
                name: r.collaborator_name.clone(),
            });
    }

    let album_index: HashMap<&str, u32> = albums
        .keys()
        .enumerate()
        .map(|(i, id)| (*id, i as u32))
        .collect();
    let collab_index: HashMap<&str, u32> = collaborators
        .keys()
        .enumerate()
        .map(|(i, id)| (*id, i as u32))
        .collect();

    let mut roles: BTreeMap<(u32, u32), BTreeSet<RoleLabel>> = BTreeMap::new();
    for r in &d.records {
        let key = (
            album_index[r.album_id.as_str()],
            collab_index[r.collaborator_id.as_str()],
        );
        roles.entry(key).or_default().insert(normalizer(&r.role_raw));
    }

    BipartiteGraph {
        albums: albums.into_values().collect(),
        collaborators: collaborators.into_values().collect(),
        associations: roles
            .into_iter()
            .map(|((album, collaborator), roles)| Association {
                album,
                collaborator,
                roles,
            })
            .collect(),
    }
}

/// Compressed sorted-neighbour adjacency of a weighted simple graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<u32>,
}

impl Adjacency {
    /// Builds from undirected edges `(u, v, weight)`.
    ///
    /// Panics on self-loops, parallel edges or out-of-range endpoints.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, u32)>,
    {
        let edges: Vec<(u32, u32, u32)> = edges.into_iter().collect();
        let mut degree = vec![0usize; node_count];
        for &(u, v, _) in &edges {
            assert!(u != v, "self-loop on node {u}");
            assert!(
                (u as usize) < node_count && (v as usize) < node_count,
                "edge ({u}, {v}) out of range"
            );
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut slots = vec![(0u32, 0u32); offsets[node_count]];
        for &(u, v, w) in &edges {
            slots[fill[u as usize]] = (v, w);
            fill[u as usize] += 1;
            slots[fill[v as usize]] = (u, w);
            fill[v as usize] += 1;
        }
        for v in 0..node_count {
            let list = &mut slots[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            assert!(
                list.windows(2).all(|p| p[0].0 != p[1].0),
                "parallel edges at node {v}"
            );
        }
        Adjacency {
            offsets,
            targets: slots.iter().map(|s| s.0).collect(),
            weights: slots.iter().map(|s| s.1).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn neighbor_weights(&self, v: usize) -> &[u32] {
        &self.weights[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum::<u64>() / 2
    }
}

impl AsRef<Adjacency> for Adjacency {
    fn as_ref(&self) -> &Adjacency {
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedEdge {
    pub u: u32,
    pub v: u32,
    /// Shared entities justifying the edge, ascending.
    pub support: Vec<u32>,
}

impl ProjectedEdge {
    pub fn weight(&self) -> u32 {
        self.support.len() as u32
    }
}

/// One-mode projection. Every node of the mode is present, isolated or not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedGraph {
    pub mode: Mode,
    pub node_ids: Vec<String>,
    pub node_labels: Vec<String>,
    /// Sorted by (u, v) with u < v.
    pub edges: Vec<ProjectedEdge>,
    adjacency: Adjacency,
}

impl ProjectedGraph {
    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn weight(&self, a: u32, b: u32) -> Option<u32> {
        let key = (a.min(b), a.max(b));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .map(|i| self.edges[i].weight())
    }
}

impl AsRef<Adjacency> for ProjectedGraph {
    fn as_ref(&self) -> &Adjacency {
        &self.adjacency
    }
}

/// Projects `members` (atoms per node, ascending) through `inverse` (nodes
/// per atom, ascending) into weighted edges with their support atoms.
fn project_through(members: &[Vec<u32>], inverse: &[Vec<u32>]) -> Vec<ProjectedEdge> {
    let mut slot = vec![usize::MAX; members.len()];
    let mut edges = Vec::new();
    let mut local: Vec<(u32, Vec<u32>)> = Vec::new();
    for (u, atoms) in members.iter().enumerate() {
        for &atom in atoms {
            let others = &inverse[atom as usize];
            let start = others.partition_point(|&v| v as usize <= u);
            for &v in &others[start..] {
                let s = &mut slot[v as usize];
                if *s == usize::MAX {
                    *s = local.len();
                    local.push((v, Vec::new()));
                }
                local[*s].1.push(atom);
            }
        }
        local.sort_unstable_by_key(|(v, _)| *v);
        for (v, support) in local.drain(..) {
            slot[v as usize] = usize::MAX;
            edges.push(ProjectedEdge {
                u: u as u32,
                v,
                support,
            });
        }
    }
    edges
}

pub fn project(b: &BipartiteGraph, mode: Mode) -> ProjectedGraph {
    let album_members = b.album_members();
    let collab_albums = b.collaborator_albums();
    let (edges, node_ids, node_labels) = match mode {
        Mode::Album => (
            project_through(&album_members, &collab_albums),
            b.albums.iter().map(|a| a.id.clone()).collect(),
            b.albums.iter().map(album_label).collect(),
        ),
        Mode::Collaborator => (
            project_through(&collab_albums, &album_members),
            b.collaborators.iter().map(|c| c.id.clone()).collect(),
            b.collaborators
                .iter()
                .map(|c| if c.name.is_empty() { c.id.clone() } else { c.name.clone() })
                .collect(),
        ),
    };
    let node_ids: Vec<String> = node_ids;
    let adjacency = Adjacency::from_edges(node_ids.len(), edges.iter().map(|e| (e.u, e.v, e.weight())));
    ProjectedGraph {
        mode,
        node_ids,
        node_labels,
        edges,
        adjacency,
    }
}

fn album_label(a: &AlbumNode) -> String {
    match (a.main_artist.is_empty(), a.title.is_empty()) {
        (false, false) => format!("{} - {}", a.main_artist, a.title),
        (true, false) => a.title.clone(),
        (false, true) => a.main_artist.clone(),
        (true, true) => a.id.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmittedEdges {
    pub omitted_edges: usize,
    pub omitted_fraction: f64,
}

pub fn omitted_edge_stats(
    base: &ProjectedGraph,
    ablated: &ProjectedGraph,
) -> Result<OmittedEdges, GraphError> {
    if base.mode != ablated.mode {
        return Err(GraphError::ModeMismatch);
    }
    let (b, a) = (base.edge_count(), ablated.edge_count());
    if b == 0 {
        return Err(GraphError::NoBaseEdges);
    }
    if a > b {
        return Err(GraphError::NotDerived { base: b, ablated: a });
    }
    Ok(OmittedEdges {
        omitted_edges: b - a,
        omitted_fraction: (b - a) as f64 / b as f64,
    })
}

/// `source_id,target_id,weight`, one row per edge in canonical order.
pub fn write_edge_list_csv<W: Write>(g: &ProjectedGraph, out: W) -> Result<(), GraphError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["source_id", "target_id", "weight"])?;
    for e in &g.edges {
        writer.write_record([
            g.node_ids[e.u as usize].as_str(),
            g.node_ids[e.v as usize].as_str(),
            &e.weight().to_string(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `album_id,collaborator_id,roles` with roles joined by `;`.
pub fn write_bipartite_csv<W: Write>(b: &BipartiteGraph, out: W) -> Result<(), GraphError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["album_id", "collaborator_id", "roles"])?;
    for a in &b.associations {
        let roles: Vec<&str> = a.roles.iter().map(RoleLabel::as_str).collect();
        writer.write_record([
            b.albums[a.album as usize].id.as_str(),
            b.collaborators[a.collaborator as usize].id.as_str(),
            &roles.join(";"),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}
