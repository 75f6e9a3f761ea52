//! Browser bindings for the interactive page in `www/`. Everything crosses
//! the boundary as flat `f64` arrays so the same code runs in native tests.

use wasm_bindgen::prelude::*;

use hsti::bench::gen::{generate, Distribution};
use hsti::geo::Cube3D;
use hsti::zorder::DEFAULT_GRID_DEPTH;
use hsti::{
    brute_force_knn, build_cluster, cell_rect, knn_search_with, GridConfig, MortonCode2D, QuerySpec,
    STObject, SearchOptions, SearchStats, SimCluster, TimeInterval, WorldBounds, ZOctreeConfig,
};

/// Floats per leaf in [`Demo::leaves`].
pub const LEAF_STRIDE: usize = 7;
/// Floats per neighbour in [`Demo::knn`].
pub const NEIGHBOR_STRIDE: usize = 5;

#[wasm_bindgen]
pub struct Demo {
    objects: Vec<STObject>,
    cluster: SimCluster,
    mbr_pruning: bool,
    last: SearchStats,
    last_exact: bool,
}

#[wasm_bindgen]
impl Demo {
    /// Generates `n` objects in the default 10000 x 10000 x 5000 world and
    /// builds a cluster of `cluster_size` regions.
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, seed: u64, clustered: bool, cluster_size: usize, xi: usize) -> Result<Demo, String> {
        let world = WorldBounds::default();
        let dist = if clustered {
            Distribution::Clustered { clusters: 8, sigma: 400.0 }
        } else {
            Distribution::Uniform
        };
        let run = || -> hsti::Result<Demo> {
            let objects = generate(n, dist, &world, seed)?;
            let grid = GridConfig::new(DEFAULT_GRID_DEPTH, world)?;
            let octree = ZOctreeConfig::new(12, xi)?;
            let cluster = build_cluster(&objects, cluster_size, grid, octree)?;
            Ok(Demo { objects, cluster, mbr_pruning: true, last: SearchStats::default(), last_exact: true })
        };
        run().map_err(|e| e.to_string())
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn world_x(&self) -> f64 {
        self.cluster.world().x_max
    }

    pub fn world_y(&self) -> f64 {
        self.cluster.world().y_max
    }

    pub fn world_t(&self) -> f64 {
        self.cluster.world().t_max
    }

    pub fn region_count(&self) -> usize {
        self.cluster.regions().len()
    }

    pub fn index_bytes(&self) -> usize {
        self.cluster.index_bytes()
    }

    pub fn set_mbr_pruning(&mut self, on: bool) {
        self.mbr_pruning = on;
    }

    /// `[x, y, t]` per object.
    pub fn points(&self) -> Vec<f64> {
        self.objects.iter().flat_map(|o| [o.x, o.y, o.t]).collect()
    }

    /// `[x_lo, y_lo, x_hi, y_hi, region]` per grid cell.
    pub fn cells(&self) -> Vec<f64> {
        let grid = self.cluster.grid();
        let mut out = Vec::with_capacity(grid.cell_count() as usize * 5);
        for (region, (lo, hi)) in self.cluster.meta().ranges().enumerate() {
            for z in lo..hi {
                let r = cell_rect(MortonCode2D(z), grid);
                out.extend([r.x_lo, r.y_lo, r.x_hi, r.y_hi, region as f64]);
            }
        }
        out
    }

    /// Octree leaves whose time extent overlaps `[t0, t1]`:
    /// `[x_lo, y_lo, x_hi, y_hi, region, level, entries]` per leaf.
    pub fn leaves(&self, t0: f64, t1: f64) -> Vec<f64> {
        let (t0, t1) = (t0.min(t1), t0.max(t1));
        let mut out = Vec::new();
        for region in self.cluster.regions() {
            for leaf in region.octree().leaves() {
                let c: &Cube3D = leaf.cube();
                if c.t_hi < t0 || c.t_lo > t1 {
                    continue;
                }
                let r = c.rect;
                out.extend([
                    r.x_lo,
                    r.y_lo,
                    r.x_hi,
                    r.y_hi,
                    region.region_id() as f64,
                    leaf.level() as f64,
                    leaf.len() as f64,
                ]);
            }
        }
        out
    }

    /// Runs a kNN query and returns `[oid, x, y, t, distance]` per neighbour,
    /// nearest first. Stats for the query are available afterwards.
    pub fn knn(&mut self, x: f64, y: f64, t0: f64, t1: f64, k: usize) -> Result<Vec<f64>, String> {
        let world = *self.cluster.world();
        let iv = TimeInterval::new(t0.min(t1), t0.max(t1)).map_err(|e| e.to_string())?;
        let q = QuerySpec::new(x, y, iv, k, &world).map_err(|e| e.to_string())?;
        let opts = SearchOptions { mbr_pruning: self.mbr_pruning, ..Default::default() };
        let (res, stats) = knn_search_with(&self.cluster, &q, opts);
        self.last_exact = res.checksum() == brute_force_knn(&self.objects, &q).checksum();
        self.last = stats;
        Ok(res.iter().flat_map(|n| [n.object.oid as f64, n.object.x, n.object.y, n.object.t, n.distance]).collect())
    }

    pub fn last_visited_rows(&self) -> u64 {
        self.last.visited_rows
    }

    pub fn last_visited_leaves(&self) -> u64 {
        self.last.visited_leaves
    }

    pub fn last_pruned_leaves(&self) -> u64 {
        self.last.pruned_leaves
    }

    /// Whether the last query agreed with a brute-force scan.
    pub fn last_exact(&self) -> bool {
        self.last_exact
    }
}
