mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hsti::bench::gen::{generate, write_csv, Distribution};
use hsti::bench::ingest::ingest;
use hsti::bench::{run_bench, BenchConfig, DEFAULT_CLUSTER_SIZE, DEFAULT_INTERVAL_WIDTH, DEFAULT_K, DEFAULT_SPATIAL_REGION, SWEEP_CLUSTER_SIZES, SWEEP_KS};
use hsti::query::{knn_search_with, SearchOptions};
use hsti::zoctree::{DEFAULT_DEPTH, DEFAULT_XI};
use hsti::zorder::DEFAULT_GRID_DEPTH;
use hsti::{build_cluster, GridConfig, QuerySpec, STObject, TimeInterval, WorldBounds, ZOctreeConfig};

use crate::config::{parse_list, ConfigFile};

#[derive(Parser)]
#[command(name = "hsti", version, about = "Spatio-temporal kNN index: data generation, ingestion checks, queries and benchmarks")]
struct Cli {
    /// Flat key=value file supplying defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct WorldArgs {
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    y_max: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct DataArgs {
    /// CSV file of `oid,x,y,t` rows; synthetic data is generated when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// `uniform` or `clustered`.
    #[arg(long)]
    distribution: Option<String>,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone, Default)]
struct IndexArgs {
    /// Octree split threshold.
    #[arg(long)]
    xi: Option<usize>,
    /// Deepest octree level L.
    #[arg(long)]
    depth_l: Option<u32>,
    /// Z-order grid depth g (2^g cells per axis).
    #[arg(long)]
    grid_g: Option<u32>,
    #[arg(long)]
    no_mbr_pruning: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV.
    GenData {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        world: WorldArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and normalize a CSV file, reporting accepted and rejected rows.
    IngestCheck {
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        world: WorldArgs,
    },
    /// Sweep k and cluster size, comparing the index against a full scan.
    Bench {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        world: WorldArgs,
        #[command(flatten)]
        index: IndexArgs,
        /// Comma-separated k values.
        #[arg(long)]
        k: Option<String>,
        /// Comma-separated cluster sizes.
        #[arg(long)]
        cluster_size: Option<String>,
        #[arg(long)]
        interval_width: Option<f64>,
        #[arg(long)]
        queries: Option<usize>,
        /// Recorded in the report only; kNN queries ignore it.
        #[arg(long)]
        spatial_region: Option<f64>,
        /// JSON-lines output file (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one kNN query and print the result list as JSON.
    Query {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        world: WorldArgs,
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        t_start: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        cluster_size: Option<usize>,
    },
}

fn world(args: &WorldArgs, cfg: &ConfigFile) -> Result<WorldBounds> {
    let d = WorldBounds::default();
    Ok(WorldBounds::new(
        cfg.get_or(args.x_max, "x-max", d.x_max)?,
        cfg.get_or(args.y_max, "y-max", d.y_max)?,
        cfg.get_or(args.t_max, "t-max", d.t_max)?,
    )?)
}

fn distribution(args: &DataArgs, cfg: &ConfigFile) -> Result<Distribution> {
    let name: String = cfg.get_or(args.distribution.clone(), "distribution", "uniform".into())?;
    match name.as_str() {
        "uniform" => Ok(Distribution::Uniform),
        "clustered" => Ok(Distribution::Clustered {
            clusters: cfg.get_or(args.clusters, "clusters", 10)?,
            sigma: cfg.get_or(args.sigma, "sigma", 250.0)?,
        }),
        other => bail!("unknown distribution {other:?} (expected uniform or clustered)"),
    }
}

/// Loads `--input` if given, else generates synthetic data. Returns the
/// objects and a dataset label.
fn dataset(args: &DataArgs, world: &WorldBounds, cfg: &ConfigFile) -> Result<(Vec<STObject>, String)> {
    if let Some(path) = cfg.get(args.input.clone(), "input")? {
        let report = ingest(&path, world)?;
        for r in &report.rejected {
            eprintln!("{}:{}: rejected: {}", path.display(), r.line, r.reason);
        }
        let label = Path::new(&path).file_stem().map_or("input".into(), |s| s.to_string_lossy().into_owned());
        return Ok((report.objects, label));
    }
    let dist = distribution(args, cfg)?;
    let n = cfg.get_or(args.n, "n", 100_000)?;
    let seed = cfg.get_or(args.seed, "seed", 1)?;
    Ok((generate(n, dist, world, seed)?, format!("{}-{n}", dist.name())))
}

fn index_config(args: &IndexArgs, world: WorldBounds, cfg: &ConfigFile) -> Result<(GridConfig, ZOctreeConfig, bool)> {
    let grid = GridConfig::new(cfg.get_or(args.grid_g, "grid-g", DEFAULT_GRID_DEPTH)?, world)?;
    let octree = ZOctreeConfig::new(cfg.get_or(args.depth_l, "depth-l", DEFAULT_DEPTH)?, cfg.get_or(args.xi, "xi", DEFAULT_XI)?)?;
    let pruning = !args.no_mbr_pruning && cfg.get_or(None, "mbr-pruning", true)?;
    Ok((grid, octree, pruning))
}

fn output(path: Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::GenData { data, world: w, out } => {
            let world = world(&w, &cfg)?;
            let n = cfg.get(data.n, "n")?.context("gen-data needs --n")?;
            let objects = generate(n, distribution(&data, &cfg)?, &world, cfg.get_or(data.seed, "seed", 1)?)?;
            write_csv(&objects, output(cfg.get(out, "out")?)?)?;
        }
        Command::IngestCheck { input, world: w } => {
            let path: PathBuf = cfg.get(input, "input")?.context("ingest-check needs --input")?;
            let report = ingest(&path, &world(&w, &cfg)?)?;
            let summary = json!({
                "input": path.display().to_string(),
                "rows": report.rows(),
                "rejected": report.rejected.len(),
                "rejections": report.rejected,
            });
            println!("{summary}");
        }
        Command::Bench { data, world: w, index, k, cluster_size, interval_width, queries, spatial_region, out } => {
            let world = world(&w, &cfg)?;
            let (objects, label) = dataset(&data, &world, &cfg)?;
            let (grid, octree, mbr_pruning) = index_config(&index, world, &cfg)?;
            let ks = match cfg.get(k, "k")? {
                Some(s) => parse_list(&s)?,
                None => SWEEP_KS.to_vec(),
            };
            let cluster_sizes = match cfg.get(cluster_size, "cluster-size")? {
                Some(s) => parse_list(&s)?,
                None => SWEEP_CLUSTER_SIZES.to_vec(),
            };
            let bench = BenchConfig {
                dataset: label,
                ks,
                cluster_sizes,
                interval_width: cfg.get_or(interval_width, "interval-width", DEFAULT_INTERVAL_WIDTH)?,
                queries: cfg.get_or(queries, "queries", 100)?,
                seed: cfg.get_or(data.seed, "seed", 1)?,
                grid,
                octree,
                mbr_pruning,
                spatial_region: cfg.get_or(spatial_region, "spatial-region", DEFAULT_SPATIAL_REGION)?,
            };
            let mut sink = output(cfg.get(out, "out")?)?;
            let report = run_bench(&objects, &bench, |rec| {
                let line = serde_json::to_string(rec).expect("record serializes");
                writeln!(sink, "{line}")?;
                Ok(())
            })?;
            sink.flush()?;
            for b in &report.builds {
                eprintln!(
                    "build cluster_size={} n={} {:.1} ms, index {} bytes",
                    b.cluster_size, b.n, b.build_ms, b.index_bytes
                );
            }
            for s in report.summarize() {
                eprintln!(
                    "cluster_size={} k={} hsti {:.3} ms / {:.0} rows, fullscan {:.3} ms / {:.0} rows",
                    s.cluster_size, s.k, s.hsti_mean_ms, s.hsti_mean_rows, s.fullscan_mean_ms, s.fullscan_mean_rows
                );
            }
        }
        Command::Query { data, world: w, index, x, y, t_start, t_end, k, cluster_size } => {
            let world = world(&w, &cfg)?;
            let (objects, _) = dataset(&data, &world, &cfg)?;
            let (grid, octree, mbr_pruning) = index_config(&index, world, &cfg)?;
            let cluster = build_cluster(&objects, cfg.get_or(cluster_size, "cluster-size", DEFAULT_CLUSTER_SIZE)?, grid, octree)?;
            let interval = TimeInterval::new(
                cfg.get_or(t_start, "t-start", 0.0)?,
                cfg.get_or(t_end, "t-end", world.t_max)?,
            )?;
            let q = QuerySpec::new(
                cfg.get(x, "x")?.context("query needs --x")?,
                cfg.get(y, "y")?.context("query needs --y")?,
                interval,
                cfg.get_or(k, "k", DEFAULT_K)?,
                &world,
            )?;
            let (results, stats) = knn_search_with(&cluster, &q, SearchOptions { mbr_pruning, ..Default::default() });
            let out = json!({
                "query": q,
                "results": results.iter().map(|n| json!({
                    "oid": n.object.oid,
                    "x": n.object.x,
                    "y": n.object.y,
                    "t": n.object.t,
                    "distance": n.distance,
                })).collect::<Vec<_>>(),
                "stats": stats,
            });
            println!("{out}");
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
