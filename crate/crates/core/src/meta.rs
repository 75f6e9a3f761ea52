//! First index layer: the META table and the simulated cluster it routes to.
//!
//! The Z-order code space `[0, 4^g)` is cut into contiguous ranges, one per
//! region, the way a sorted table is split into regions. Cut points are
//! object-count quantiles of the loaded data.

use serde::{Deserialize, Serialize};

use crate::error::{HstiError, Result};
use crate::geo::{STObject, WorldBounds};
use crate::region::RegionServer;
use crate::zoctree::ZOctreeConfig;
use crate::zorder::{cell_of, GridConfig, MortonCode2D};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaTable {
    /// First code of each region; region `i` owns `[starts[i], starts[i + 1])`.
    starts: Vec<u64>,
    limit: u64,
}

impl MetaTable {
    pub fn new(starts: Vec<u64>, limit: u64) -> Result<Self> {
        if starts.first() != Some(&0) {
            return Err(HstiError::InvalidConfig("META table must start at code 0".into()));
        }
        if !starts.windows(2).all(|w| w[0] < w[1]) || *starts.last().unwrap() >= limit {
            return Err(HstiError::InvalidConfig("META start codes must increase strictly below the limit".into()));
        }
        Ok(Self { starts, limit })
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    pub fn range(&self, region: usize) -> (u64, u64) {
        let hi = self.starts.get(region + 1).copied().unwrap_or(self.limit);
        (self.starts[region], hi)
    }

    pub fn ranges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (0..self.starts.len()).map(|i| self.range(i))
    }

    pub fn starts(&self) -> &[u64] {
        &self.starts
    }
}

/// Region owning `zn`: predecessor search over the range starts.
pub fn route(meta: &MetaTable, zn: MortonCode2D) -> Result<usize> {
    if zn.0 >= meta.limit {
        return Err(HstiError::CodeOutOfRange { code: zn.0, limit: meta.limit });
    }
    Ok(meta.starts.partition_point(|&s| s <= zn.0) - 1)
}

/// Count-balanced cut points over the sorted codes of the loaded objects.
fn partition(codes: &mut [u64], size: usize, cells: u64) -> Vec<u64> {
    codes.sort_unstable();
    let n = codes.len();
    let mut starts = Vec::with_capacity(size);
    starts.push(0);
    for i in 1..size {
        let ideal = if n == 0 { i as u64 * cells / size as u64 } else { codes[n * i / size] };
        let prev = *starts.last().unwrap();
        let latest = cells - (size - i) as u64;
        starts.push(ideal.max(prev + 1).min(latest));
    }
    starts
}

#[derive(Debug)]
pub struct SimCluster {
    grid: GridConfig,
    octree: ZOctreeConfig,
    meta: MetaTable,
    regions: Vec<RegionServer>,
}

/// Partitions the code space into `cluster_size` ranges balanced by object
/// count, routes every object to its region and freezes the regions.
pub fn build_cluster(
    objects: &[STObject],
    cluster_size: usize,
    grid: GridConfig,
    octree: ZOctreeConfig,
) -> Result<SimCluster> {
    if cluster_size == 0 {
        return Err(HstiError::InvalidConfig("cluster size must be at least 1".into()));
    }
    if cluster_size as u64 > grid.cell_count() {
        return Err(HstiError::TooManyRegions { size: cluster_size, cells: grid.cell_count() });
    }
    let codes = objects
        .iter()
        .map(|o| {
            if !grid.world.contains(o.x, o.y, o.t) {
                return Err(HstiError::OutOfBounds { x: o.x, y: o.y, t: o.t });
            }
            cell_of(o.x, o.y, &grid)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sorted: Vec<u64> = codes.iter().map(|z| z.0).collect();
    let meta = MetaTable::new(partition(&mut sorted, cluster_size, grid.cell_count()), grid.cell_count())?;
    let mut regions = meta
        .ranges()
        .enumerate()
        .map(|(id, range)| RegionServer::new(id, range, grid, octree))
        .collect::<Result<Vec<_>>>()?;
    for (obj, zn) in objects.iter().zip(codes) {
        regions[route(&meta, zn)?].put(*obj)?;
    }
    regions.iter_mut().for_each(RegionServer::freeze);
    Ok(SimCluster { grid, octree, meta, regions })
}

impl SimCluster {
    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn world(&self) -> &WorldBounds {
        &self.grid.world
    }

    pub fn octree_config(&self) -> &ZOctreeConfig {
        &self.octree
    }

    pub fn meta(&self) -> &MetaTable {
        &self.meta
    }

    pub fn regions(&self) -> &[RegionServer] {
        &self.regions
    }

    pub fn region(&self, id: usize) -> &RegionServer {
        &self.regions[id]
    }

    /// Region serving the cell `zn`.
    pub fn region_for(&self, zn: MortonCode2D) -> Result<&RegionServer> {
        Ok(&self.regions[route(&self.meta, zn)?])
    }

    pub fn len(&self) -> usize {
        self.regions.iter().map(RegionServer::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_bytes(&self) -> usize {
        self.regions.iter().map(RegionServer::index_bytes).sum::<usize>()
            + self.meta.starts.len() * std::mem::size_of::<u64>()
    }

    pub fn payload_bytes(&self) -> usize {
        self.regions.iter().map(RegionServer::payload_bytes).sum()
    }

    pub fn reset_counters(&self) {
        self.regions.iter().for_each(RegionServer::reset_counters);
    }
}
