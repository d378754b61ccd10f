//! Subcommand implementations behind the `collabnet` binary.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{ablation_sweep, growth_series};
use crate::discogs::{Clock, FetchPlan, FetchReport, Fetcher, Transport};
use crate::graph::{write_bipartite_csv, write_edge_list_csv, BipartiteGraph, Mode};
use crate::ingest::{dataset_summary, parse_records, write_csv, Dataset, InputFormat};
use crate::metrics::{degree_distribution, top_hubs};
use crate::report::{self, AblationSummary, StatsReport};
use crate::rolenorm::{role_inventory, write_inventory_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "collabnet", version, about = "Album/collaborator network analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fetch master releases from Discogs into a records CSV.
    Fetch(FetchArgs),
    /// Print the normalized role inventory as CSV.
    Roles(RolesArgs),
    /// Build both projections and write the full report bundle.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => InputFormat::Csv,
            FormatArg::Jsonl => InputFormat::JsonLines,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeSelection {
    Album,
    Collaborator,
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> Vec<Mode> {
        match self {
            ModeSelection::Album => vec![Mode::Album],
            ModeSelection::Collaborator => vec![Mode::Collaborator],
            ModeSelection::Both => Mode::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// File with one master-release id per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub cache_dir: PathBuf,
    /// Directory receiving records.csv and fetch_report.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Maximum requests per minute.
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u32).range(1..))]
    pub rate_limit: u32,
    #[arg(long, default_value = crate::discogs::DEFAULT_BASE_URL)]
    pub api_base: String,
}

#[derive(Debug, Args)]
pub struct RolesArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeSelection::Both)]
    pub mode: ModeSelection,
    /// Length of the hub table.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub top_k: u64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub input_format: InputFormat,
    pub output_dir: PathBuf,
    pub mode: ModeSelection,
    pub top_k: usize,
}

impl From<&AnalyzeArgs> for RunConfig {
    fn from(a: &AnalyzeArgs) -> Self {
        RunConfig {
            input_path: a.input.clone(),
            input_format: a.format.into(),
            output_dir: a.out.clone(),
            mode: a.mode,
            top_k: a.top_k as usize,
        }
    }
}

pub fn load_dataset(path: &Path, format: InputFormat) -> Result<Dataset> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let d = parse_records(file, format).with_context(|| format!("cannot parse {}", path.display()))?;
    if d.duplicates_collapsed > 0 {
        log::warn!("collapsed {} duplicate rows", d.duplicates_collapsed);
    }
    Ok(d)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

pub fn run_roles<W: Write>(input: &Path, format: InputFormat, out: W) -> Result<()> {
    let d = load_dataset(input, format)?;
    write_inventory_csv(&role_inventory(&d), out)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct DatasetReport {
    album_count: usize,
    collaborator_count: usize,
    association_count: usize,
    role_instance_count: usize,
    duplicates_collapsed: usize,
    distinct_roles: usize,
    collaborators_per_album: f64,
    roles_per_collaborator_in_album: f64,
}

/// Writes `<out>/summary.json`, `<out>/bipartite.csv` and one report
/// directory per selected mode.
pub fn run_analyze(config: &RunConfig) -> Result<()> {
    if config.top_k == 0 {
        bail!("top-k must be at least 1");
    }
    let d = load_dataset(&config.input_path, config.input_format)?;
    let summary = dataset_summary(&d).context("nothing to analyze")?;
    let b = BipartiteGraph::from_dataset(&d);

    fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("cannot create {}", config.output_dir.display()))?;
    let out = &config.output_dir;

    report::write_json(
        &DatasetReport {
            album_count: d.album_count,
            collaborator_count: d.collaborator_count,
            association_count: d.association_count,
            role_instance_count: d.role_instance_count,
            duplicates_collapsed: d.duplicates_collapsed,
            distinct_roles: b.role_labels().len(),
            collaborators_per_album: summary.collaborators_per_album,
            roles_per_collaborator_in_album: summary.roles_per_collaborator_in_album,
        },
        create(&out.join("summary.json"))?,
    )?;
    let mut w = create(&out.join("bipartite.csv"))?;
    write_bipartite_csv(&b, &mut w)?;
    w.flush()?;

    for mode in config.mode.modes() {
        analyze_mode(&b, mode, config.top_k, &out.join(mode.as_str()))?;
    }
    Ok(())
}

fn analyze_mode(b: &BipartiteGraph, mode: Mode, top_k: usize, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let g = b.project(mode);
    let mut notices = Vec::new();

    let sweep = ablation_sweep(b, mode)?;
    let degrees = degree_distribution(&g)?;
    if degrees.skewness.is_none() {
        notices.push("degree skewness undefined (fewer than 3 nodes or zero variance)".into());
    }

    let growth = match growth_series(b, mode) {
        Ok(series) => {
            let mut w = create(&dir.join("growth.csv"))?;
            report::write_growth(&series, &mut w)?;
            w.flush()?;
            if series.excluded_albums > 0 {
                notices.push(format!(
                    "{} albums without release year excluded from growth",
                    series.excluded_albums
                ));
            }
            series.pearson_r
        }
        Err(e) => {
            notices.push(format!("growth outputs omitted: {e}"));
            None
        }
    };

    report::write_json(
        &StatsReport {
            mode: mode.as_str(),
            stats: &sweep.base_stats,
            degree_skewness: degrees.skewness,
            growth_pearson_r: growth,
            notices,
        },
        create(&dir.join("stats.json"))?,
    )?;

    let mut w = create(&dir.join("degree_distribution.csv"))?;
    report::write_degree_distribution(&degrees, &mut w)?;
    w.flush()?;

    let mut w = create(&dir.join("hubs.csv"))?;
    report::write_hubs(&top_hubs(&g, top_k), &mut w)?;
    w.flush()?;

    let mut w = create(&dir.join("ablation.csv"))?;
    report::write_ablation(&sweep, &mut w)?;
    w.flush()?;

    report::write_json(&AblationSummary::new(&sweep), create(&dir.join("ablation_summary.json"))?)?;

    let mut w = create(&dir.join("edges.csv"))?;
    write_edge_list_csv(&g, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_id_list(path: &Path) -> Result<Vec<String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read id list {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

/// Runs a fetch and writes `records.csv` plus `fetch_report.json`.
/// Returns the report; the caller maps failures to [`EXIT_PARTIAL`].
pub fn run_fetch(
    args: &FetchArgs,
    transport: &mut dyn Transport,
    clock: &dyn Clock,
) -> Result<FetchReport> {
    let ids = read_id_list(&args.input)?;
    let plan = FetchPlan {
        release_ids: ids,
        cache_dir: args.cache_dir.clone(),
        requests_per_minute: args.rate_limit,
        auth_token: None,
    };
    let mut fetcher = Fetcher::new(transport, clock);
    fetcher.base_url = args.api_base.clone();
    let (dataset, report) = fetcher.fetch_releases(&plan)?;

    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut w = create(&args.out.join("records.csv"))?;
    write_csv(&dataset, &mut w)?;
    w.flush()?;
    report::write_json(&report, create(&args.out.join("fetch_report.json"))?)?;
    Ok(report)
}

pub fn fetch_exit_code(report: &FetchReport) -> i32 {
    if report.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    }
}
