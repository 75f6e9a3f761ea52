//! Simulated region server: a row-key ordered store plus the region's Z-Octree.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{HstiError, Result};
use crate::geo::{Cube3D, STObject};
use crate::zoctree::{ZOctree, ZOctreeConfig};
use crate::zorder::{cell_of, range_bounding_rect, GridConfig, MortonCode2D};

/// Composite row key ordered by `(zn, t, oid)`. The Z-order code is the key
/// prefix, so objects in one grid cell are stored contiguously.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RowKey {
    pub zn: u64,
    pub t: u32,
    pub oid: u64,
}

/// Renders as `zn#t#oid` with zero padding to widths 10, 5 and 10.
impl fmt::Display for RowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:010}#{:05}#{:010}", self.zn, self.t, self.oid)
    }
}

pub fn make_row_key(zn: MortonCode2D, obj: &STObject) -> RowKey {
    RowKey { zn: zn.0, t: obj.t.max(0.0).floor() as u32, oid: obj.oid }
}

#[derive(Debug)]
pub struct RegionServer {
    region_id: usize,
    key_range: (u64, u64),
    grid: GridConfig,
    store: BTreeMap<RowKey, u32>,
    octree: ZOctree,
    rows_visited: AtomicU64,
}

impl RegionServer {
    /// Creates an empty region owning codes `[lo, hi)`. Its octree spans the
    /// bounding rectangle of those cells over the full time range.
    pub fn new(region_id: usize, key_range: (u64, u64), grid: GridConfig, octree: ZOctreeConfig) -> Result<Self> {
        let (lo, hi) = key_range;
        if lo >= hi || hi > grid.cell_count() {
            return Err(HstiError::InvalidConfig(format!("bad region key range [{lo}, {hi})")));
        }
        let rect = range_bounding_rect(lo, hi, &grid).expect("non-empty range");
        let bounds = Cube3D::new(rect, 0.0, grid.world.t_max);
        Ok(Self {
            region_id,
            key_range,
            grid,
            store: BTreeMap::new(),
            octree: ZOctree::new(octree, bounds),
            rows_visited: AtomicU64::new(0),
        })
    }

    pub fn region_id(&self) -> usize {
        self.region_id
    }

    pub fn key_range(&self) -> (u64, u64) {
        self.key_range
    }

    pub fn owns(&self, zn: MortonCode2D) -> bool {
        self.key_range.0 <= zn.0 && zn.0 < self.key_range.1
    }

    pub fn octree(&self) -> &ZOctree {
        &self.octree
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    pub fn put(&mut self, obj: STObject) -> Result<RowKey> {
        let zn = cell_of(obj.x, obj.y, &self.grid)?;
        if !self.owns(zn) {
            return Err(HstiError::RoutingViolation { zn: zn.0, lo: self.key_range.0, hi: self.key_range.1 });
        }
        let key = make_row_key(zn, &obj);
        if self.store.contains_key(&key) {
            return Err(HstiError::DuplicateKey(key.to_string()));
        }
        let idx = self.octree.insert(obj)?;
        self.store.insert(key, idx);
        Ok(key)
    }

    pub fn get(&self, key: &RowKey) -> Option<&STObject> {
        self.store.get(key).map(|&i| self.octree.object(i))
    }

    /// Rows in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&RowKey, &STObject)> + '_ {
        self.store.iter().map(|(k, &i)| (k, self.octree.object(i)))
    }

    /// Visits every row, returning those accepted by `predicate`. Adds the
    /// store size to the visited-row counter.
    pub fn full_scan(&self, predicate: impl Fn(&STObject) -> bool) -> Vec<STObject> {
        self.rows_visited.fetch_add(self.store.len() as u64, Ordering::Relaxed);
        self.iter().map(|(_, o)| o).filter(|o| predicate(o)).copied().collect()
    }

    pub fn rows_visited(&self) -> u64 {
        self.rows_visited.load(Ordering::Relaxed)
    }

    pub fn reset_counters(&self) {
        self.rows_visited.store(0, Ordering::Relaxed);
    }

    /// Ends the load phase: compacts the octree and rebuilds the store from
    /// sorted rows so its nodes are densely packed.
    pub fn freeze(&mut self) {
        self.octree.freeze();
        self.store = std::mem::take(&mut self.store).into_iter().collect();
    }

    /// Approximate bytes held by index structures (row keys and octree),
    /// excluding object payloads.
    pub fn index_bytes(&self) -> usize {
        // Densely packed B-tree leaves carry 11 slots plus a small header.
        const SLOTS: usize = 11;
        let entry = std::mem::size_of::<RowKey>() + std::mem::size_of::<u32>();
        let nodes = self.store.len().div_ceil(SLOTS);
        nodes * (SLOTS * entry + 16) + self.octree.structure_bytes()
    }

    pub fn payload_bytes(&self) -> usize {
        self.octree.payload_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::WorldBounds;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn whole_region() -> RegionServer {
        let grid = GridConfig::new(3, WorldBounds::default()).unwrap();
        RegionServer::new(0, (0, 64), grid, ZOctreeConfig::new(8, 16).unwrap()).unwrap()
    }

    fn random_objects(n: usize, seed: u64) -> Vec<STObject> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| STObject::new(i as u64, rng.random_range(0.0..=1e4), rng.random_range(0.0..=1e4), rng.random_range(0.0..=5e3)))
            .collect()
    }

    #[test]
    fn row_key_format() {
        let o = STObject::new(0, 0.0, 0.0, 0.0);
        assert_eq!(make_row_key(MortonCode2D(0), &o).to_string(), "0000000000#00000#0000000000");
        let a = make_row_key(MortonCode2D(42), &STObject::new(7, 1.0, 1.0, 12.5));
        let b = make_row_key(MortonCode2D(42), &STObject::new(9, 1.0, 1.0, 4999.0));
        assert!(a.to_string().starts_with("0000000042#"));
        assert!(b.to_string().starts_with("0000000042#"));
        assert_eq!(a.to_string(), "0000000042#00012#0000000007");
    }

    #[test]
    fn rendered_keys_sort_like_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut keys: Vec<RowKey> = (0..10_000)
            .map(|_| RowKey {
                zn: rng.random_range(0..1u64 << 32),
                t: rng.random_range(0..=5000),
                oid: rng.random_range(0..10_000_000_000),
            })
            .collect();
        let mut rendered: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
        keys.sort();
        rendered.sort();
        let by_tuple: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
        assert_eq!(rendered, by_tuple);
    }

    #[test]
    fn put_then_get() {
        let mut r = whole_region();
        let o = STObject::new(3, 1234.5, 999.0, 17.0);
        let key = r.put(o).unwrap();
        assert_eq!(r.get(&key), Some(&o));
        assert_eq!(r.put(o), Err(HstiError::DuplicateKey(key.to_string())));
    }

    #[test]
    fn put_many_keeps_store_and_octree_in_step() {
        let mut r = whole_region();
        for o in random_objects(10_000, 9) {
            r.put(o).unwrap();
        }
        r.freeze();
        assert_eq!(r.len(), 10_000);
        assert_eq!(r.octree().len(), 10_000);
        let in_leaves: usize = r.octree().leaves().map(|l| l.len()).sum();
        assert_eq!(in_leaves, 10_000);
        let keys: Vec<RowKey> = r.iter().map(|(k, _)| *k).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        for (k, o) in r.iter() {
            assert_eq!(k.zn, cell_of(o.x, o.y, &GridConfig::new(3, WorldBounds::default()).unwrap()).unwrap().0);
        }
    }

    #[test]
    fn put_out_of_range_is_routing_violation() {
        let grid = GridConfig::new(3, WorldBounds::default()).unwrap();
        let mut r = RegionServer::new(1, (0, 16), grid, ZOctreeConfig::default()).unwrap();
        let err = r.put(STObject::new(0, 9000.0, 9000.0, 0.0)).unwrap_err();
        assert!(matches!(err, HstiError::RoutingViolation { zn: 63, lo: 0, hi: 16 }));
        assert!(r.is_empty());
    }

    #[test]
    fn full_scan_behaviour() {
        let r = whole_region();
        assert!(r.full_scan(|_| true).is_empty());
        assert_eq!(r.rows_visited(), 0);

        let mut r = whole_region();
        let objs = random_objects(1000, 11);
        for &o in &objs {
            r.put(o).unwrap();
        }
        assert_eq!(r.full_scan(|_| true).len(), 1000);
        assert_eq!(r.rows_visited(), 1000);

        let pred = |o: &STObject| o.x < 5000.0 && (100.0..=900.0).contains(&o.t);
        let mut got: Vec<u64> = r.full_scan(pred).iter().map(|o| o.oid).collect();
        let mut want: Vec<u64> = objs.iter().filter(|o| pred(o)).map(|o| o.oid).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(r.rows_visited(), 2000);
    }

    #[test]
    fn region_bounds_cover_its_cells() {
        let grid = GridConfig::new(3, WorldBounds::default()).unwrap();
        // Codes 16..48 are the lower-right and upper-left quadrants.
        let r = RegionServer::new(2, (16, 48), grid, ZOctreeConfig::default()).unwrap();
        let b = r.octree().bounds();
        assert_eq!((b.rect.x_lo, b.rect.x_hi, b.rect.y_lo, b.rect.y_hi), (0.0, 10_000.0, 0.0, 10_000.0));
        assert_eq!((b.t_lo, b.t_hi), (0.0, 5000.0));
    }
}
