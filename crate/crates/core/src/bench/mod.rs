//! Benchmark harness: synthetic data, CSV ingestion and parameter sweeps that
//! compare the index against a full scan of every region.

pub mod gen;
pub mod ingest;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HstiError, Result};
use crate::geo::{QuerySpec, STObject, TimeInterval, WorldBounds};
use crate::meta::{build_cluster, SimCluster};
use crate::query::{full_scan_knn, knn_search_with, ResultList, SearchOptions, SearchStats};
use crate::zoctree::ZOctreeConfig;
use crate::zorder::GridConfig;

pub const SWEEP_KS: [usize; 6] = [10, 20, 50, 100, 200, 500];
pub const SWEEP_CLUSTER_SIZES: [usize; 4] = [2, 4, 6, 8];
pub const DEFAULT_K: usize = 100;
pub const DEFAULT_CLUSTER_SIZE: usize = 4;
pub const DEFAULT_INTERVAL_WIDTH: f64 = 200.0;
pub const DEFAULT_SPATIAL_REGION: f64 = 200.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub dataset: String,
    pub ks: Vec<usize>,
    pub cluster_sizes: Vec<usize>,
    pub interval_width: f64,
    pub queries: usize,
    pub seed: u64,
    pub grid: GridConfig,
    pub octree: ZOctreeConfig,
    pub mbr_pruning: bool,
    /// Carried into reports for reference; kNN queries do not use it.
    pub spatial_region: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            dataset: "dataset".into(),
            ks: SWEEP_KS.to_vec(),
            cluster_sizes: SWEEP_CLUSTER_SIZES.to_vec(),
            interval_width: DEFAULT_INTERVAL_WIDTH,
            queries: 100,
            seed: 1,
            grid: GridConfig::default(),
            octree: ZOctreeConfig::default(),
            mbr_pruning: true,
            spatial_region: DEFAULT_SPATIAL_REGION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRun {
    pub method: String,
    pub wall_ms: f64,
    pub visited_rows: u64,
    pub visited_leaves: u64,
    pub pruned_leaves: u64,
    pub region_rows: Vec<u64>,
    pub checksum: String,
}

impl MethodRun {
    fn new(method: &str, wall_ms: f64, result: &ResultList, stats: SearchStats) -> Self {
        Self {
            method: method.into(),
            wall_ms,
            visited_rows: stats.visited_rows,
            visited_leaves: stats.visited_leaves,
            pruned_leaves: stats.pruned_leaves,
            region_rows: stats.rows_per_region,
            checksum: format!("{:016x}", result.checksum()),
        }
    }
}

/// One query at one sweep point, measured with both methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub n: usize,
    pub cluster_size: usize,
    pub k: usize,
    pub interval_width: f64,
    pub query: usize,
    pub x_q: f64,
    pub y_q: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub results: usize,
    pub hsti: MethodRun,
    pub fullscan: MethodRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildRecord {
    pub dataset: String,
    pub n: usize,
    pub cluster_size: usize,
    pub build_ms: f64,
    pub index_bytes: usize,
    pub payload_bytes: usize,
    pub region_sizes: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub builds: Vec<BuildRecord>,
    pub records: Vec<BenchRecord>,
}

/// Per-sweep-point aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub cluster_size: usize,
    pub k: usize,
    pub queries: usize,
    pub hsti_mean_rows: f64,
    pub fullscan_mean_rows: f64,
    pub hsti_mean_ms: f64,
    pub fullscan_mean_ms: f64,
    pub hsti_mean_leaves: f64,
    /// Largest per-region mean of rows read by the index path.
    pub hottest_region_mean_rows: f64,
}

impl BenchReport {
    pub fn summarize(&self) -> Vec<SweepSummary> {
        let mut keys: Vec<(usize, usize)> = self.records.iter().map(|r| (r.cluster_size, r.k)).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|(cluster_size, k)| {
                let recs: Vec<&BenchRecord> =
                    self.records.iter().filter(|r| r.cluster_size == cluster_size && r.k == k).collect();
                let n = recs.len() as f64;
                let mean = |f: &dyn Fn(&BenchRecord) -> f64| recs.iter().map(|r| f(r)).sum::<f64>() / n;
                let hottest = (0..cluster_size)
                    .map(|i| mean(&|r| r.hsti.region_rows[i] as f64))
                    .fold(0.0, f64::max);
                SweepSummary {
                    cluster_size,
                    k,
                    queries: recs.len(),
                    hsti_mean_rows: mean(&|r| r.hsti.visited_rows as f64),
                    fullscan_mean_rows: mean(&|r| r.fullscan.visited_rows as f64),
                    hsti_mean_ms: mean(&|r| r.hsti.wall_ms),
                    fullscan_mean_ms: mean(&|r| r.fullscan.wall_ms),
                    hsti_mean_leaves: mean(&|r| r.hsti.visited_leaves as f64),
                    hottest_region_mean_rows: hottest,
                }
            })
            .collect()
    }
}

/// Query centers uniform over the plane, intervals of `width` placed
/// uniformly inside the time range.
pub fn random_queries(count: usize, width: f64, k: usize, world: &WorldBounds, seed: u64) -> Vec<QuerySpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let width = width.clamp(0.0, world.t_max);
    (0..count)
        .map(|_| {
            let x = rng.random_range(0.0..=world.x_max);
            let y = rng.random_range(0.0..=world.y_max);
            let t0 = rng.random_range(0.0..=world.t_max - width);
            let iv = TimeInterval::new(t0, t0 + width).expect("ordered interval");
            QuerySpec::new(x, y, iv, k, world).expect("query inside world")
        })
        .collect()
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn timed_build(objects: &[STObject], cluster_size: usize, cfg: &BenchConfig) -> Result<(SimCluster, BuildRecord)> {
    let start = Instant::now();
    let cluster = build_cluster(objects, cluster_size, cfg.grid, cfg.octree)?;
    let build_ms = elapsed_ms(start);
    let record = BuildRecord {
        dataset: cfg.dataset.clone(),
        n: objects.len(),
        cluster_size,
        build_ms,
        index_bytes: cluster.index_bytes(),
        payload_bytes: cluster.payload_bytes(),
        region_sizes: cluster.regions().iter().map(|r| r.len()).collect(),
    };
    Ok((cluster, record))
}

/// Runs `queries` random queries per `(cluster_size, k)` sweep point with the
/// index and with a full scan, passing each record to `sink` as it completes.
/// Aborts on the first checksum disagreement.
pub fn run_bench(
    objects: &[STObject],
    cfg: &BenchConfig,
    mut sink: impl FnMut(&BenchRecord) -> Result<()>,
) -> Result<BenchReport> {
    let world = cfg.grid.world;
    let opts = SearchOptions { mbr_pruning: cfg.mbr_pruning, ..Default::default() };
    let mut report = BenchReport::default();
    for &cluster_size in &cfg.cluster_sizes {
        let (cluster, build) = timed_build(objects, cluster_size, cfg)?;
        report.builds.push(build);
        for &k in &cfg.ks {
            for (i, q) in random_queries(cfg.queries, cfg.interval_width, k, &world, cfg.seed).iter().enumerate() {
                let start = Instant::now();
                let (hits, stats) = knn_search_with(&cluster, q, opts);
                let hsti = MethodRun::new("hsti", elapsed_ms(start), &hits, stats);

                let start = Instant::now();
                let (scan, stats) = full_scan_knn(&cluster, q);
                let fullscan = MethodRun::new("fullscan", elapsed_ms(start), &scan, stats);

                if hsti.checksum != fullscan.checksum {
                    return Err(HstiError::ChecksumMismatch(format!(
                        "dataset {} cluster_size {cluster_size} k {k} query {i} at ({}, {}) [{}, {}]: hsti {} vs fullscan {}",
                        cfg.dataset, q.x_q, q.y_q, q.interval.t_start, q.interval.t_end, hsti.checksum, fullscan.checksum
                    )));
                }
                let record = BenchRecord {
                    dataset: cfg.dataset.clone(),
                    n: objects.len(),
                    cluster_size,
                    k,
                    interval_width: cfg.interval_width,
                    query: i,
                    x_q: q.x_q,
                    y_q: q.y_q,
                    t_start: q.interval.t_start,
                    t_end: q.interval.t_end,
                    results: hits.len(),
                    hsti,
                    fullscan,
                };
                sink(&record)?;
                report.records.push(record);
            }
        }
    }
    Ok(report)
}
