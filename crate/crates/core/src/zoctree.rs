//! Z-Octree: the adaptive per-region octree over `(x, y, t)`.
//!
//! The root (level 1) covers the region's spatio-temporal bounds. A leaf above
//! the deepest level `L` splits into eight children as soon as it holds more
//! than `xi` entries; leaves at level `L` absorb any overflow. Each leaf is
//! labelled with the smallest Morton code among the `8^(L-1)` virtual
//! deepest-level subspaces it covers, and keeps a tight bounding box of its
//! entries for pruning.
//!
//! Nodes live in a flat arena; entries are indices into the tree's own object
//! arena.

use serde::{Deserialize, Serialize};

use crate::error::{HstiError, Result};
use crate::geo::{Cube3D, Point2, Rect2D, STObject, TimeInterval};

pub const DEFAULT_DEPTH: u32 = 16;
pub const DEFAULT_XI: usize = 200;
/// `3 * (L - 1)` bits must fit a `u64`.
pub const MAX_DEPTH: u32 = 22;

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZOctreeConfig {
    /// Deepest level `L`; the root sits at level 1.
    pub depth: u32,
    /// Split threshold: the most entries a leaf above level `L` may hold.
    pub xi: usize,
}

impl Default for ZOctreeConfig {
    fn default() -> Self {
        Self { depth: DEFAULT_DEPTH, xi: DEFAULT_XI }
    }
}

impl ZOctreeConfig {
    pub fn new(depth: u32, xi: usize) -> Result<Self> {
        if !(2..=MAX_DEPTH).contains(&depth) {
            return Err(HstiError::InvalidConfig(format!(
                "octree depth must be in 2..={MAX_DEPTH}, got {depth}"
            )));
        }
        if xi == 0 {
            return Err(HstiError::InvalidConfig("split threshold must be at least 1".into()));
        }
        Ok(Self { depth, xi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MortonCode3D(pub u64);

/// Tight bounding box of a leaf's entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mbr3D {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Mbr3D {
    pub fn of_point(o: &STObject) -> Self {
        Self { x_lo: o.x, x_hi: o.x, y_lo: o.y, y_hi: o.y, t_lo: o.t, t_hi: o.t }
    }

    pub fn extend(&mut self, o: &STObject) {
        self.x_lo = self.x_lo.min(o.x);
        self.x_hi = self.x_hi.max(o.x);
        self.y_lo = self.y_lo.min(o.y);
        self.y_hi = self.y_hi.max(o.y);
        self.t_lo = self.t_lo.min(o.t);
        self.t_hi = self.t_hi.max(o.t);
    }

    pub fn of_points<'a>(mut it: impl Iterator<Item = &'a STObject>) -> Option<Self> {
        let mut mbr = Self::of_point(it.next()?);
        it.for_each(|o| mbr.extend(o));
        Some(mbr)
    }

    pub fn intersects(&self, c: &Cube3D) -> bool {
        self.x_lo <= c.rect.x_hi
            && c.rect.x_lo <= self.x_hi
            && self.y_lo <= c.rect.y_hi
            && c.rect.y_lo <= self.y_hi
            && self.t_lo <= c.t_hi
            && c.t_lo <= self.t_hi
    }
}

#[derive(Debug, Clone)]
enum NodeKind {
    Internal([NodeId; 8]),
    Leaf { entries: Vec<u32>, mbr: Option<Mbr3D> },
}

#[derive(Debug, Clone)]
struct Node {
    cube: Cube3D,
    level: u32,
    v: u64,
    kind: NodeKind,
}

/// Octant digit `bx + 2·by + 4·bt` of a point inside `cube`; a coordinate on
/// the midpoint goes to the upper half.
pub fn octant_of(x: f64, y: f64, t: f64, cube: &Cube3D) -> Result<u8> {
    if !cube.contains(x, y, t) {
        return Err(HstiError::OutOfBounds { x, y, t });
    }
    Ok(octant_unchecked(x, y, t, cube))
}

#[inline]
fn octant_unchecked(x: f64, y: f64, t: f64, cube: &Cube3D) -> u8 {
    let (mx, my, mt) = midpoints(cube);
    (x >= mx) as u8 | ((y >= my) as u8) << 1 | ((t >= mt) as u8) << 2
}

#[inline]
fn midpoints(c: &Cube3D) -> (f64, f64, f64) {
    (
        (c.rect.x_lo + c.rect.x_hi) / 2.0,
        (c.rect.y_lo + c.rect.y_hi) / 2.0,
        (c.t_lo + c.t_hi) / 2.0,
    )
}

/// Sub-cube of `cube` selected by an octant digit.
pub fn child_cube(cube: &Cube3D, digit: u8) -> Cube3D {
    let (mx, my, mt) = midpoints(cube);
    let r = &cube.rect;
    let (x_lo, x_hi) = if digit & 1 == 0 { (r.x_lo, mx) } else { (mx, r.x_hi) };
    let (y_lo, y_hi) = if digit & 2 == 0 { (r.y_lo, my) } else { (my, r.y_hi) };
    let (t_lo, t_hi) = if digit & 4 == 0 { (cube.t_lo, mt) } else { (mt, cube.t_hi) };
    Cube3D::new(Rect2D::new(x_lo, x_hi, y_lo, y_hi), t_lo, t_hi)
}

/// Morton value of the leaf reached by `path` (octant digits from the root):
/// the smallest deepest-level virtual subspace code inside it.
pub fn leaf_morton(path: &[u8], depth: u32) -> MortonCode3D {
    assert!(path.len() < depth as usize, "path longer than the tree depth");
    let v = path
        .iter()
        .enumerate()
        .map(|(i, &d)| (d as u64) << (3 * (depth as usize - 2 - i)))
        .sum();
    MortonCode3D(v)
}

#[derive(Debug, Clone)]
pub struct ZOctree {
    config: ZOctreeConfig,
    nodes: Vec<Node>,
    objects: Vec<STObject>,
}

/// Borrowed view of one leaf.
#[derive(Clone, Copy)]
pub struct LeafRef<'a> {
    id: NodeId,
    node: &'a Node,
    tree: &'a ZOctree,
}

impl<'a> LeafRef<'a> {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn cube(&self) -> &'a Cube3D {
        &self.node.cube
    }

    pub fn level(&self) -> u32 {
        self.node.level
    }

    pub fn morton(&self) -> MortonCode3D {
        MortonCode3D(self.node.v)
    }

    pub fn mbr(&self) -> Option<&'a Mbr3D> {
        match &self.node.kind {
            NodeKind::Leaf { mbr, .. } => mbr.as_ref(),
            NodeKind::Internal(_) => unreachable!(),
        }
    }

    /// Arena indices of the entries.
    pub fn entry_indices(&self) -> &'a [u32] {
        match &self.node.kind {
            NodeKind::Leaf { entries, .. } => entries,
            NodeKind::Internal(_) => unreachable!(),
        }
    }

    pub fn len(&self) -> usize {
        self.entry_indices().len()
    }

    pub fn is_empty(&self) -> bool {
        self.entry_indices().is_empty()
    }

    pub fn objects(&self) -> impl Iterator<Item = &'a STObject> + 'a {
        let objects = &self.tree.objects;
        self.entry_indices().iter().map(move |&i| &objects[i as usize])
    }
}

impl std::fmt::Debug for LeafRef<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Leaf")
            .field("id", &self.id)
            .field("level", &self.node.level)
            .field("v", &self.node.v)
            .field("len", &self.len())
            .finish()
    }
}

/// Entries of `leaf` whose timestamp lies in the closed `interval`.
pub fn leaf_points<'a>(
    leaf: &LeafRef<'a>,
    interval: TimeInterval,
) -> impl Iterator<Item = &'a STObject> + 'a {
    leaf.objects().filter(move |o| interval.contains(o.t))
}

/// MBR pruning test: a leaf is worth scanning only if it is non-empty and its
/// bounding box meets `probe`.
pub fn mbr_check(leaf: &LeafRef<'_>, probe: &Cube3D) -> bool {
    leaf.mbr().is_some_and(|m| m.intersects(probe))
}

impl ZOctree {
    pub fn new(config: ZOctreeConfig, bounds: Cube3D) -> Self {
        let root = Node {
            cube: bounds,
            level: 1,
            v: 0,
            kind: NodeKind::Leaf { entries: Vec::new(), mbr: None },
        };
        Self { config, nodes: vec![root], objects: Vec::new() }
    }

    pub fn config(&self) -> &ZOctreeConfig {
        &self.config
    }

    pub fn bounds(&self) -> &Cube3D {
        &self.nodes[0].cube
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn object(&self, idx: u32) -> &STObject {
        &self.objects[idx as usize]
    }

    pub fn objects(&self) -> &[STObject] {
        &self.objects
    }

    pub fn root_is_leaf(&self) -> bool {
        matches!(self.nodes[0].kind, NodeKind::Leaf { .. })
    }

    pub fn leaf(&self, id: NodeId) -> Option<LeafRef<'_>> {
        let node = self.nodes.get(id as usize)?;
        matches!(node.kind, NodeKind::Leaf { .. }).then_some(LeafRef { id, node, tree: self })
    }

    /// Stores `obj` and returns its arena index.
    pub fn insert(&mut self, obj: STObject) -> Result<u32> {
        if !self.bounds().contains(obj.x, obj.y, obj.t) {
            return Err(HstiError::OutOfBounds { x: obj.x, y: obj.y, t: obj.t });
        }
        let idx = u32::try_from(self.objects.len())
            .map_err(|_| HstiError::InvalidConfig("octree holds more than u32::MAX objects".into()))?;
        self.objects.push(obj);

        let mut id: NodeId = 0;
        loop {
            let node = &mut self.nodes[id as usize];
            match &mut node.kind {
                NodeKind::Internal(children) => {
                    id = children[octant_unchecked(obj.x, obj.y, obj.t, &node.cube) as usize];
                }
                NodeKind::Leaf { entries, mbr } => {
                    entries.push(idx);
                    match mbr {
                        Some(m) => m.extend(&obj),
                        None => *mbr = Some(Mbr3D::of_point(&obj)),
                    }
                    if entries.len() > self.config.xi && node.level < self.config.depth {
                        self.split(id);
                    }
                    return Ok(idx);
                }
            }
        }
    }

    fn split(&mut self, id: NodeId) {
        let mut pending = vec![id];
        while let Some(id) = pending.pop() {
            let node = &mut self.nodes[id as usize];
            let entries = match std::mem::replace(&mut node.kind, NodeKind::Internal([0; 8])) {
                NodeKind::Leaf { entries, .. } => entries,
                NodeKind::Internal(_) => unreachable!("only leaves split"),
            };
            let (cube, level, v) = (node.cube, node.level, node.v);
            let shift = 3 * (self.config.depth - 1 - level);

            let mut buckets: [Vec<u32>; 8] = Default::default();
            for &e in &entries {
                let o = &self.objects[e as usize];
                buckets[octant_unchecked(o.x, o.y, o.t, &cube) as usize].push(e);
            }

            let first = self.nodes.len() as NodeId;
            let mut children = [0; 8];
            for (d, bucket) in buckets.into_iter().enumerate() {
                let mbr = Mbr3D::of_points(bucket.iter().map(|&e| &self.objects[e as usize]));
                let child = first + d as NodeId;
                children[d] = child;
                if bucket.len() > self.config.xi && level + 1 < self.config.depth {
                    pending.push(child);
                }
                self.nodes.push(Node {
                    cube: child_cube(&cube, d as u8),
                    level: level + 1,
                    v: v + ((d as u64) << shift),
                    kind: NodeKind::Leaf { entries: bucket, mbr },
                });
            }
            self.nodes[id as usize].kind = NodeKind::Internal(children);
        }
    }

    /// Releases spare capacity once loading is done.
    pub fn freeze(&mut self) {
        self.objects.shrink_to_fit();
        self.nodes.shrink_to_fit();
        for n in &mut self.nodes {
            if let NodeKind::Leaf { entries, .. } = &mut n.kind {
                entries.shrink_to_fit();
            }
        }
    }

    /// Leaves in depth-first octant order.
    pub fn leaves(&self) -> impl Iterator<Item = LeafRef<'_>> + '_ {
        let mut stack = vec![0 as NodeId];
        std::iter::from_fn(move || {
            while let Some(id) = stack.pop() {
                let node = &self.nodes[id as usize];
                match &node.kind {
                    NodeKind::Internal(children) => stack.extend(children.iter().rev()),
                    NodeKind::Leaf { .. } => return Some(LeafRef { id, node, tree: self }),
                }
            }
            None
        })
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Leaf { .. })).count()
    }

    /// Octant path from the root to `id`.
    pub fn path_of(&self, id: NodeId) -> Vec<u8> {
        let target = &self.nodes[id as usize].cube;
        let mut path = Vec::new();
        let mut cur = 0 as NodeId;
        while cur != id {
            let NodeKind::Internal(children) = &self.nodes[cur as usize].kind else {
                panic!("node {id} is not reachable");
            };
            let (d, &next) = children
                .iter()
                .enumerate()
                .find(|(_, &c)| {
                    let cube = &self.nodes[c as usize].cube;
                    cube.rect.contains(Point2::new(target.rect.x_lo, target.rect.y_lo))
                        && cube.rect.contains(Point2::new(target.rect.x_hi, target.rect.y_hi))
                        && cube.t_lo <= target.t_lo
                        && target.t_hi <= cube.t_hi
                })
                .expect("child containing target");
            path.push(d as u8);
            cur = next;
        }
        path
    }

    fn visit(
        &self,
        keep_node: impl Fn(&Cube3D) -> bool,
        mut keep_leaf: impl FnMut(&Cube3D) -> bool,
    ) -> Vec<LeafRef<'_>> {
        let mut out = Vec::new();
        if !keep_node(self.bounds()) {
            return out;
        }
        let mut stack = vec![0 as NodeId];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            match &node.kind {
                NodeKind::Internal(children) => stack.extend(
                    children
                        .iter()
                        .rev()
                        .filter(|&&c| keep_node(&self.nodes[c as usize].cube)),
                ),
                NodeKind::Leaf { .. } => {
                    if keep_leaf(&node.cube) {
                        out.push(LeafRef { id, node, tree: self });
                    }
                }
            }
        }
        out
    }

    /// Leaves whose footprint contains `(x, y)` and whose time range meets
    /// `interval`: the vertical stack of cubes over the location.
    pub fn covering_cubes(&self, x: f64, y: f64, interval: TimeInterval) -> Vec<LeafRef<'_>> {
        let p = Point2::new(x, y);
        self.visit(
            |c| c.rect.contains(p) && interval.overlaps_range(c.t_lo, c.t_hi),
            |_| true,
        )
    }

    /// Leaves whose footprint touches `cube`'s footprint and whose time range
    /// meets `interval`, excluding those sharing `cube`'s exact footprint.
    pub fn adjacent_cubes(&self, cube: &Cube3D, interval: TimeInterval) -> Vec<LeafRef<'_>> {
        self.visit(
            |c| c.rect.touches(&cube.rect) && interval.overlaps_range(c.t_lo, c.t_hi),
            |c| c.rect != cube.rect,
        )
    }

    /// Bytes held by the tree structure: nodes and entry lists, excluding the
    /// object payloads.
    pub fn structure_bytes(&self) -> usize {
        let entries: usize = self
            .nodes
            .iter()
            .map(|n| match &n.kind {
                NodeKind::Leaf { entries, .. } => entries.capacity() * std::mem::size_of::<u32>(),
                NodeKind::Internal(_) => 0,
            })
            .sum();
        self.nodes.capacity() * std::mem::size_of::<Node>() + entries
    }

    pub fn payload_bytes(&self) -> usize {
        self.objects.capacity() * std::mem::size_of::<STObject>()
    }
}
