//! Z-order (Morton) encoding of the uniform grid that forms the first index
//! layer. The x column index occupies the even bits of a code and the y row
//! index the odd bits.

use serde::{Deserialize, Serialize};

use crate::error::{HstiError, Result};
use crate::geo::{Rect2D, WorldBounds};

pub const MAX_GRID_DEPTH: u32 = 16;
pub const DEFAULT_GRID_DEPTH: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MortonCode2D(pub u64);

impl MortonCode2D {
    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }
}

/// A `2^g × 2^g` grid of equal cells laid over the world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub g: u32,
    pub world: WorldBounds,
}

impl GridConfig {
    pub fn new(g: u32, world: WorldBounds) -> Result<Self> {
        if !(1..=MAX_GRID_DEPTH).contains(&g) {
            return Err(HstiError::InvalidConfig(format!(
                "grid depth must be in 1..={MAX_GRID_DEPTH}, got {g}"
            )));
        }
        Ok(Self { g, world })
    }

    /// Cells per axis.
    #[inline]
    pub fn side(&self) -> u32 {
        1 << self.g
    }

    #[inline]
    pub fn cell_count(&self) -> u64 {
        1u64 << (2 * self.g)
    }

    #[inline]
    fn x_edge(&self, cx: u32) -> f64 {
        if cx >= self.side() {
            self.world.x_max
        } else {
            cx as f64 * self.world.x_max / self.side() as f64
        }
    }

    #[inline]
    fn y_edge(&self, cy: u32) -> f64 {
        if cy >= self.side() {
            self.world.y_max
        } else {
            cy as f64 * self.world.y_max / self.side() as f64
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { g: DEFAULT_GRID_DEPTH, world: WorldBounds::default() }
    }
}

#[inline]
fn spread_bits(v: u32) -> u64 {
    let mut x = v as u64;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

#[inline]
fn compact_bits(v: u64) -> u32 {
    let mut x = v & 0x5555_5555_5555_5555;
    x = (x | (x >> 1)) & 0x3333_3333_3333_3333;
    x = (x | (x >> 2)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x >> 4)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x >> 8)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x >> 16)) & 0x0000_0000_FFFF_FFFF;
    x as u32
}

pub fn encode2d(cx: u32, cy: u32, g: u32) -> Result<MortonCode2D> {
    if g > MAX_GRID_DEPTH || cx >= (1 << g) || cy >= (1 << g) {
        return Err(HstiError::CellOutOfRange { cx, cy, g });
    }
    Ok(MortonCode2D(spread_bits(cx) | (spread_bits(cy) << 1)))
}

pub fn decode2d(z: MortonCode2D, g: u32) -> Result<(u32, u32)> {
    let limit = 1u64 << (2 * g.min(MAX_GRID_DEPTH));
    if z.0 >= limit {
        return Err(HstiError::CodeOutOfRange { code: z.0, limit });
    }
    Ok((compact_bits(z.0), compact_bits(z.0 >> 1)))
}

fn axis_index(v: f64, side: u32, edge: impl Fn(u32) -> f64, max: f64) -> u32 {
    let mut c = ((v * side as f64 / max).floor() as i64).clamp(0, side as i64 - 1) as u32;
    // Keep the index consistent with the cell edges cell_rect reports.
    if c > 0 && v < edge(c) {
        c -= 1;
    } else if c + 1 < side && v >= edge(c + 1) {
        c += 1;
    }
    c
}

/// Grid cell containing `(x, y)`. Points on the world's maximum edge belong
/// to the last cell of that axis.
pub fn cell_of(x: f64, y: f64, grid: &GridConfig) -> Result<MortonCode2D> {
    if !grid.world.contains_xy(x, y) {
        return Err(HstiError::OutOfBounds { x, y, t: 0.0 });
    }
    let side = grid.side();
    let cx = axis_index(x, side, |c| grid.x_edge(c), grid.world.x_max);
    let cy = axis_index(y, side, |c| grid.y_edge(c), grid.world.y_max);
    encode2d(cx, cy, grid.g)
}

pub fn cell_rect(z: MortonCode2D, grid: &GridConfig) -> Rect2D {
    let (cx, cy) = decode2d(z, grid.g).expect("cell code out of range");
    block_rect(cx, cy, 1, grid)
}

fn block_rect(cx: u32, cy: u32, cells: u32, grid: &GridConfig) -> Rect2D {
    Rect2D::new(
        grid.x_edge(cx),
        grid.x_edge(cx + cells),
        grid.y_edge(cy),
        grid.y_edge(cy + cells),
    )
}

/// Moore neighborhood of a cell, clipped at the world boundary.
pub fn adjacent_spaces(z: MortonCode2D, grid: &GridConfig) -> Vec<MortonCode2D> {
    let (cx, cy) = decode2d(z, grid.g).expect("cell code out of range");
    let side = grid.side() as i64;
    let mut out = Vec::with_capacity(8);
    for dy in -1i64..=1 {
        for dx in -1i64..=1 {
            if dx == 0 && dy == 0 {
                continue;
            }
            let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
            if (0..side).contains(&nx) && (0..side).contains(&ny) {
                out.push(encode2d(nx as u32, ny as u32, grid.g).unwrap());
            }
        }
    }
    out
}

/// Splits the code range `[lo, hi)` into maximal dyadic-aligned blocks.
/// Each item is `(first code, level)`, covering `4^level` codes, i.e. a square
/// of `2^level` cells per side.
pub fn aligned_blocks(lo: u64, hi: u64, g: u32) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut z = lo;
    while z < hi {
        let mut level = 0;
        while level < g {
            let span = 1u64 << (2 * (level + 1));
            if !z.is_multiple_of(span) || z + span > hi {
                break;
            }
            level += 1;
        }
        out.push((z, level));
        z += 1u64 << (2 * level);
    }
    out
}

/// Bounding rectangle of all cells whose codes fall in `[lo, hi)`.
pub fn range_bounding_rect(lo: u64, hi: u64, grid: &GridConfig) -> Option<Rect2D> {
    aligned_blocks(lo, hi, grid.g)
        .into_iter()
        .map(|(start, level)| {
            let (cx, cy) = decode2d(MortonCode2D(start), grid.g).unwrap();
            block_rect(cx, cy, 1 << level, grid)
        })
        .reduce(|a, b| a.union(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Reference bit-by-bit interleave.
    fn interleave_ref(cx: u32, cy: u32, g: u32) -> u64 {
        let mut z = 0u64;
        for b in 0..g {
            z |= (((cx >> b) & 1) as u64) << (2 * b);
            z |= (((cy >> b) & 1) as u64) << (2 * b + 1);
        }
        z
    }

    fn grid(g: u32) -> GridConfig {
        GridConfig::new(g, WorldBounds::default()).unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode2d(0, 0, 3).unwrap().0, 0);
        assert_eq!(interleave_ref(3, 5, 3), 39);
        assert_eq!(encode2d(3, 5, 3).unwrap().0, 39);
        for g in 1..=MAX_GRID_DEPTH {
            let m = (1u32 << g) - 1;
            assert_eq!(encode2d(m, m, g).unwrap().0, (1u64 << (2 * g)) - 1);
        }
        assert!(encode2d(8, 0, 3).is_err());
        assert!(encode2d(0, 8, 3).is_err());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode2d(MortonCode2D(0), 3).unwrap(), (0, 0));
        assert_eq!(decode2d(MortonCode2D(39), 3).unwrap(), (3, 5));
        assert!(decode2d(MortonCode2D(64), 3).is_err());
    }

    #[test]
    fn exhaustive_roundtrip_small_grids() {
        for g in 1..=5 {
            for cx in 0..(1 << g) {
                for cy in 0..(1 << g) {
                    let z = encode2d(cx, cy, g).unwrap();
                    assert_eq!(z.0, interleave_ref(cx, cy, g));
                    assert_eq!(decode2d(z, g).unwrap(), (cx, cy));
                }
            }
        }
    }

    #[test]
    fn random_roundtrip_depth_16() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..1_000_000 {
            let (cx, cy) = (rng.random_range(0..1u32 << 16), rng.random_range(0..1u32 << 16));
            let z = encode2d(cx, cy, 16).unwrap();
            assert_eq!(decode2d(z, 16).unwrap(), (cx, cy));
        }
    }

    #[test]
    fn cell_of_examples() {
        let g2 = grid(2);
        assert_eq!(cell_of(0.0, 0.0, &g2).unwrap().0, 0);
        assert_eq!(cell_of(10_000.0, 10_000.0, &g2).unwrap().0, 15);
        assert_eq!(interleave_ref(2, 1, 2), 6);
        assert_eq!(cell_of(5000.0, 2500.0, &g2).unwrap().0, 6);
        assert!(cell_of(10_000.1, 0.0, &g2).is_err());
    }

    #[test]
    fn cell_of_agrees_with_cell_rect() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let world = WorldBounds::new(997.3, 13.7, 1.0).unwrap();
        for g in [1, 5, 9, 16] {
            let grid = GridConfig::new(g, world).unwrap();
            for _ in 0..20_000 {
                let (x, y) = (rng.random_range(0.0..=world.x_max), rng.random_range(0.0..=world.y_max));
                let z = cell_of(x, y, &grid).unwrap();
                assert!(cell_rect(z, &grid).contains(crate::geo::Point2::new(x, y)));
            }
            // Exact cell edges land in the upper cell.
            for c in 1..grid.side().min(64) {
                let x = grid.x_edge(c);
                let (cx, _) = decode2d(cell_of(x, 0.0, &grid).unwrap(), g).unwrap();
                assert_eq!(cx, c);
            }
        }
    }

    #[test]
    fn cell_rect_examples() {
        let g1 = grid(1);
        assert_eq!(cell_rect(MortonCode2D(0), &g1), Rect2D::new(0.0, 5000.0, 0.0, 5000.0));
        assert_eq!(cell_rect(MortonCode2D(3), &g1), Rect2D::new(5000.0, 10000.0, 5000.0, 10000.0));
        for g in 1..=5 {
            let grid = grid(g);
            let total: f64 = (0..grid.cell_count()).map(|z| cell_rect(MortonCode2D(z), &grid).area()).sum();
            assert!((total - 1e8).abs() < 1e-3);
        }
    }

    #[test]
    fn adjacency_counts() {
        let g = grid(3);
        assert_eq!(adjacent_spaces(encode2d(0, 0, 3).unwrap(), &g).len(), 3);
        assert_eq!(adjacent_spaces(encode2d(3, 4, 3).unwrap(), &g).len(), 8);
        assert_eq!(adjacent_spaces(encode2d(0, 4, 3).unwrap(), &g).len(), 5);
        assert_eq!(adjacent_spaces(encode2d(7, 7, 3).unwrap(), &g).len(), 3);
    }

    #[test]
    fn adjacency_is_symmetric_and_irreflexive() {
        for g in 1..=4 {
            let grid = grid(g);
            for a in 0..grid.cell_count() {
                let na = adjacent_spaces(MortonCode2D(a), &grid);
                assert!(!na.contains(&MortonCode2D(a)));
                for b in na {
                    assert!(adjacent_spaces(b, &grid).contains(&MortonCode2D(a)));
                }
            }
        }
    }

    /// Within every dyadic-aligned block, the bottom-left cell carries the
    /// smallest code and the top-right cell the largest.
    #[test]
    fn quadrant_min_max_exhaustive() {
        for g in 1..=5u32 {
            for level in 0..=g {
                let size = 1u32 << level;
                for bx in (0..1u32 << g).step_by(size as usize) {
                    for by in (0..1u32 << g).step_by(size as usize) {
                        let codes: Vec<u64> = (bx..bx + size)
                            .flat_map(|x| (by..by + size).map(move |y| (x, y)))
                            .map(|(x, y)| encode2d(x, y, g).unwrap().0)
                            .collect();
                        let min = *codes.iter().min().unwrap();
                        let max = *codes.iter().max().unwrap();
                        assert_eq!(encode2d(bx, by, g).unwrap().0, min);
                        assert_eq!(encode2d(bx + size - 1, by + size - 1, g).unwrap().0, max);
                        // The block occupies one contiguous code run.
                        assert_eq!(max - min + 1, codes.len() as u64);
                    }
                }
            }
        }
    }

    #[test]
    fn aligned_blocks_partition_range() {
        let g = 4;
        for (lo, hi) in [(0u64, 256u64), (0, 1), (3, 200), (17, 18), (64, 128), (5, 5)] {
            let blocks = aligned_blocks(lo, hi, g);
            let covered: u64 = blocks.iter().map(|&(_, l)| 1u64 << (2 * l)).sum();
            assert_eq!(covered, hi - lo);
            let mut z = lo;
            for (start, l) in blocks {
                assert_eq!(start, z);
                assert_eq!(start % (1 << (2 * l)), 0);
                z += 1 << (2 * l);
            }
        }
        assert_eq!(aligned_blocks(0, 256, 4), vec![(0, 4)]);
    }

    proptest! {
        #[test]
        fn range_rect_matches_cell_union(lo in 0u64..256, len in 1u64..256) {
            let grid = grid(4);
            let hi = (lo + len).min(256);
            prop_assume!(lo < hi);
            let expect = (lo..hi).map(|z| cell_rect(MortonCode2D(z), &grid)).reduce(|a, b| a.union(&b)).unwrap();
            prop_assert_eq!(range_bounding_rect(lo, hi, &grid).unwrap(), expect);
        }
    }
}
