//! Bipartite album/collaborator networks.
//!
//! Records of (album, collaborator, role) are ingested, roles are cleaned into
//! canonical labels, and the resulting bipartite graph is projected onto
//! albums or onto collaborators. On top of the projections sit exact network
//! statistics, temporal giant-component growth and a per-role ablation sweep
//! that measures how much each role holds the network together.

pub mod analysis;
pub mod cli;
pub mod discogs;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod rolenorm;

pub use analysis::{ablation_sweep, growth_series, pearson, AblationResult, AblationSweep, GrowthSeries};
pub use graph::{build_bipartite, omitted_edge_stats, project, Adjacency, BipartiteGraph, Mode, ProjectedGraph};
pub use ingest::{dataset_summary, parse_records, AssociationRecord, Dataset, InputFormat};
pub use metrics::{compute_stats, degree_distribution, top_hubs, DegreeDistribution, HubRanking, NetworkStats};
pub use rolenorm::{normalize_role, role_inventory, RoleLabel};
