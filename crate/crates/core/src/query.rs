//! Best-first spatio-temporal kNN search over a [`SimCluster`].
//!
//! One priority queue holds grid spaces, octree leaves ("cubes") and points,
//! keyed by their spatial lower-bound distance to the query location. Spaces
//! expand into their Moore neighbours and into the octree of the region that
//! serves them. Cubes expand into their points and their spatially adjacent
//! leaves. Points come off the queue in global `(distance, oid)` order, so
//! the first `k` of them are the answer.
//!
//! Time never enters a priority; it only filters which leaves and points are
//! considered.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::geo::{euclidean_distance, mindist_point_rect, Cube3D, Point2, QuerySpec, Rect2D, STObject};
use crate::meta::{route, SimCluster};
use crate::zoctree::{leaf_points, mbr_check, LeafRef, NodeId};
use crate::zorder::{adjacent_spaces, cell_of, cell_rect, MortonCode2D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub object: STObject,
    pub distance: f64,
}

/// Query answer ordered by `(distance, oid)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultList(pub Vec<Neighbor>);

impl ResultList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Neighbor> {
        self.0.iter()
    }

    pub fn oids(&self) -> Vec<u64> {
        self.0.iter().map(|n| n.object.oid).collect()
    }

    pub fn distances(&self) -> Vec<f64> {
        self.0.iter().map(|n| n.distance).collect()
    }

    /// FNV-1a over the `(oid, distance bits)` sequence.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for n in &self.0 {
            for b in n.object.oid.to_le_bytes().into_iter().chain(n.distance.to_bits().to_le_bytes()) {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

impl<'a> IntoIterator for &'a ResultList {
    type Item = &'a Neighbor;
    type IntoIter = std::slice::Iter<'a, Neighbor>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SearchMode {
    /// Dequeued cubes also enqueue their adjacent leaves, which makes the
    /// search exact.
    #[default]
    BestFirst,
    /// Dequeued cubes only release their points; leaves are reached solely
    /// through the covering and adjacent cubes of each visited space. This
    /// follows the published loop and can miss neighbours that sit in a leaf
    /// no space ever touches directly.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub mbr_pruning: bool,
    pub mode: SearchMode,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { mbr_pruning: true, mode: SearchMode::BestFirst }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Rows read, summed over all regions.
    pub visited_rows: u64,
    /// Leaves whose entries were scanned.
    pub visited_leaves: u64,
    /// Leaves skipped by the MBR check.
    pub pruned_leaves: u64,
    pub spaces_expanded: u64,
    pub rows_per_region: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Item {
    Space(MortonCode2D),
    Cube { region: u32, leaf: NodeId },
    Point(STObject),
}

/// Queue element. Ordered by priority, then containers before points, then
/// oid, so equal-distance points leave the queue in oid order and never
/// ahead of a container that could still hold an equally near point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PQEntry {
    pub priority: f64,
    pub item: Item,
}

impl PQEntry {
    fn key(&self) -> (u8, u64) {
        match self.item {
            Item::Space(_) | Item::Cube { .. } => (0, 0),
            Item::Point(o) => (1, o.oid),
        }
    }
}

impl PartialEq for PQEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PQEntry {}

impl PartialOrd for PQEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PQEntry {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .priority
            .total_cmp(&self.priority)
            .then_with(|| other.key().cmp(&self.key()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct MaxF64(f64);

impl Eq for MaxF64 {}

impl PartialOrd for MaxF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MaxF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

pub(crate) struct Search<'c> {
    cluster: &'c SimCluster,
    q: QuerySpec,
    origin: Point2,
    opts: SearchOptions,
    pub(crate) queue: BinaryHeap<PQEntry>,
    seen_spaces: HashSet<u64>,
    seen_cubes: HashSet<(u32, NodeId)>,
    /// The `k` smallest distances enqueued so far.
    best: BinaryHeap<MaxF64>,
    pub(crate) stats: SearchStats,
}

impl<'c> Search<'c> {
    pub(crate) fn new(cluster: &'c SimCluster, q: QuerySpec, opts: SearchOptions) -> Self {
        Self {
            cluster,
            q,
            origin: q.location(),
            opts,
            queue: BinaryHeap::new(),
            seen_spaces: HashSet::new(),
            seen_cubes: HashSet::new(),
            best: BinaryHeap::with_capacity(q.k + 1),
            stats: SearchStats { rows_per_region: vec![0; cluster.regions().len()], ..Default::default() },
        }
    }

    fn push_space(&mut self, zn: MortonCode2D) {
        if self.seen_spaces.insert(zn.0) {
            let rect = cell_rect(zn, self.cluster.grid());
            self.queue.push(PQEntry { priority: mindist_point_rect(self.origin, &rect), item: Item::Space(zn) });
        }
    }

    fn push_cube(&mut self, region: u32, leaf: &LeafRef<'_>) {
        if self.seen_cubes.insert((region, leaf.id())) {
            let priority = mindist_point_rect(self.origin, &leaf.cube().rect);
            self.queue.push(PQEntry { priority, item: Item::Cube { region, leaf: leaf.id() } });
        }
    }

    /// Spatial square of half-width equal to the current k-th candidate
    /// distance, times the query interval. Before `k` candidates exist the
    /// leaf's own footprint stands in.
    fn probe(&self, leaf: &LeafRef<'_>) -> Cube3D {
        let iv = self.q.interval;
        let rect = match self.best.peek() {
            Some(&MaxF64(r)) if self.best.len() == self.q.k => {
                Rect2D::new(self.q.x_q - r, self.q.x_q + r, self.q.y_q - r, self.q.y_q + r)
            }
            _ => leaf.cube().rect,
        };
        Cube3D::new(rect, iv.t_start, iv.t_end)
    }

    fn scan_leaf(&mut self, region: u32, leaf: &LeafRef<'_>) {
        if self.opts.mbr_pruning && !mbr_check(leaf, &self.probe(leaf)) {
            self.stats.pruned_leaves += 1;
            return;
        }
        self.stats.visited_leaves += 1;
        self.stats.visited_rows += leaf.len() as u64;
        self.stats.rows_per_region[region as usize] += leaf.len() as u64;
        let k = self.q.k;
        for o in leaf_points(leaf, self.q.interval) {
            let d = euclidean_distance(self.origin, o.location());
            self.queue.push(PQEntry { priority: d, item: Item::Point(*o) });
            if self.best.len() < k {
                self.best.push(MaxF64(d));
            } else if d < self.best.peek().unwrap().0 {
                self.best.pop();
                self.best.push(MaxF64(d));
            }
        }
    }

    /// Region-local step for one grid space: scan the stack of leaves over
    /// the space's point nearest the query, then enqueue the leaves adjacent
    /// to that stack.
    pub(crate) fn search_region(&mut self, region_id: usize, zn: MortonCode2D) {
        let region = self.cluster.region(region_id);
        if region.is_empty() {
            return;
        }
        let tree = region.octree();
        let anchor = cell_rect(zn, self.cluster.grid()).clamp(self.origin);
        let covering = tree.covering_cubes(anchor.x, anchor.y, self.q.interval);
        let rid = region_id as u32;
        for leaf in &covering {
            if self.seen_cubes.insert((rid, leaf.id())) {
                self.scan_leaf(rid, leaf);
            }
        }
        for leaf in &covering {
            for adj in tree.adjacent_cubes(leaf.cube(), self.q.interval) {
                self.push_cube(rid, &adj);
            }
        }
    }

    fn expand_cube(&mut self, region: u32, leaf: NodeId) {
        let tree = self.cluster.region(region as usize).octree();
        let leaf = tree.leaf(leaf).expect("queued cube is a leaf");
        self.scan_leaf(region, &leaf);
        if self.opts.mode == SearchMode::BestFirst {
            for adj in tree.adjacent_cubes(leaf.cube(), self.q.interval) {
                self.push_cube(region, &adj);
            }
        }
    }

    pub(crate) fn run(mut self) -> (ResultList, SearchStats) {
        let mut results = Vec::with_capacity(self.q.k);
        let grid = *self.cluster.grid();
        let Ok(seed) = cell_of(self.q.x_q, self.q.y_q, &grid) else {
            return (ResultList(results), self.stats);
        };
        self.push_space(seed);

        while let Some(entry) = self.queue.pop() {
            match entry.item {
                Item::Space(zn) => {
                    self.stats.spaces_expanded += 1;
                    for adj in adjacent_spaces(zn, &grid) {
                        self.push_space(adj);
                    }
                    let region = route(self.cluster.meta(), zn).expect("grid code routes");
                    self.search_region(region, zn);
                }
                Item::Cube { region, leaf } => self.expand_cube(region, leaf),
                Item::Point(object) => {
                    results.push(Neighbor { object, distance: entry.priority });
                    if results.len() == self.q.k {
                        break;
                    }
                }
            }
        }
        (ResultList(results), self.stats)
    }
}

/// The `k` objects with timestamps in the query interval nearest to the query
/// location, ties broken by ascending oid. Fewer than `k` are returned only
/// when fewer exist.
pub fn knn_search(cluster: &SimCluster, q: &QuerySpec) -> ResultList {
    knn_search_with(cluster, q, SearchOptions::default()).0
}

pub fn knn_search_with(cluster: &SimCluster, q: &QuerySpec, opts: SearchOptions) -> (ResultList, SearchStats) {
    Search::new(cluster, *q, opts).run()
}

/// Baseline: full scan of every region, then sort and truncate.
pub fn full_scan_knn(cluster: &SimCluster, q: &QuerySpec) -> (ResultList, SearchStats) {
    let origin = q.location();
    let mut stats = SearchStats { rows_per_region: vec![0; cluster.regions().len()], ..Default::default() };
    let mut hits: Vec<Neighbor> = Vec::new();
    for (i, region) in cluster.regions().iter().enumerate() {
        let found = region.full_scan(|o| q.interval.contains(o.t));
        stats.rows_per_region[i] = region.len() as u64;
        stats.visited_rows += region.len() as u64;
        hits.extend(found.into_iter().map(|object| Neighbor {
            distance: euclidean_distance(origin, object.location()),
            object,
        }));
    }
    hits.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.object.oid.cmp(&b.object.oid)));
    hits.truncate(q.k);
    (ResultList(hits), stats)
}
