//! Geometric and temporal primitives shared by every layer of the index.
//!
//! All coordinates are `f64` in normalized world units. Rectangles, cubes and
//! time intervals are closed: a point on the boundary counts as inside.

use serde::{Deserialize, Serialize};

use crate::error::{HstiError, Result};

/// Object identifier. Row keys render it as a 10-digit field, so values
/// below 10^10 keep the textual and numeric key orders identical.
pub type ObjectId = u64;

/// A single spatio-temporal record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct STObject {
    pub oid: ObjectId,
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl STObject {
    pub fn new(oid: ObjectId, x: f64, y: f64, t: f64) -> Self {
        Self { oid, x, y, t }
    }

    #[inline]
    pub fn location(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Extent of the normalized world: `[0, x_max] × [0, y_max] × [0, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldBounds {
    pub x_max: f64,
    pub y_max: f64,
    pub t_max: f64,
}

impl Default for WorldBounds {
    fn default() -> Self {
        Self {
            x_max: 10_000.0,
            y_max: 10_000.0,
            t_max: 5_000.0,
        }
    }
}

impl WorldBounds {
    pub fn new(x_max: f64, y_max: f64, t_max: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(x_max) && ok(y_max) && ok(t_max)) {
            return Err(HstiError::InvalidConfig(format!(
                "world bounds must be finite and positive, got ({x_max}, {y_max}, {t_max})"
            )));
        }
        Ok(Self { x_max, y_max, t_max })
    }

    pub fn contains(&self, x: f64, y: f64, t: f64) -> bool {
        (0.0..=self.x_max).contains(&x)
            && (0.0..=self.y_max).contains(&y)
            && (0.0..=self.t_max).contains(&t)
    }

    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        (0.0..=self.x_max).contains(&x) && (0.0..=self.y_max).contains(&y)
    }

    pub fn rect(&self) -> Rect2D {
        Rect2D::new(0.0, self.x_max, 0.0, self.y_max)
    }

    pub fn cube(&self) -> Cube3D {
        Cube3D::new(self.rect(), 0.0, self.t_max)
    }
}

/// Closed time interval `[t_start, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval {
    pub t_start: f64,
    pub t_end: f64,
}

impl TimeInterval {
    pub fn new(t_start: f64, t_end: f64) -> Result<Self> {
        if t_start.is_nan() || t_end.is_nan() || t_start > t_end {
            return Err(HstiError::InvalidConfig(format!(
                "time interval start {t_start} exceeds end {t_end}"
            )));
        }
        Ok(Self { t_start, t_end })
    }

    #[inline]
    pub fn contains(&self, t: f64) -> bool {
        self.t_start <= t && t <= self.t_end
    }

    #[inline]
    pub fn overlaps_range(&self, lo: f64, hi: f64) -> bool {
        self.t_start <= hi && lo <= self.t_end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect2D {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rect2D {
    pub const fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Self {
        Self { x_lo, x_hi, y_lo, y_hi }
    }

    #[inline]
    pub fn contains(&self, p: Point2) -> bool {
        self.x_lo <= p.x && p.x <= self.x_hi && self.y_lo <= p.y && p.y <= self.y_hi
    }

    /// Closed-set intersection: shared edges and corners count.
    #[inline]
    pub fn touches(&self, other: &Rect2D) -> bool {
        self.x_lo <= other.x_hi
            && other.x_lo <= self.x_hi
            && self.y_lo <= other.y_hi
            && other.y_lo <= self.y_hi
    }

    pub fn area(&self) -> f64 {
        (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)
    }

    pub fn union(&self, other: &Rect2D) -> Rect2D {
        Rect2D::new(
            self.x_lo.min(other.x_lo),
            self.x_hi.max(other.x_hi),
            self.y_lo.min(other.y_lo),
            self.y_hi.max(other.y_hi),
        )
    }

    /// Nearest point of the rectangle to `p`.
    #[inline]
    pub fn clamp(&self, p: Point2) -> Point2 {
        Point2::new(p.x.clamp(self.x_lo, self.x_hi), p.y.clamp(self.y_lo, self.y_hi))
    }
}

/// Axis-aligned spatio-temporal box: a spatial rectangle times a time range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cube3D {
    pub rect: Rect2D,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Cube3D {
    pub const fn new(rect: Rect2D, t_lo: f64, t_hi: f64) -> Self {
        Self { rect, t_lo, t_hi }
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64, t: f64) -> bool {
        self.rect.contains(Point2::new(x, y)) && self.t_lo <= t && t <= self.t_hi
    }

    #[inline]
    pub fn intersects(&self, other: &Cube3D) -> bool {
        self.rect.touches(&other.rect) && self.t_lo <= other.t_hi && other.t_lo <= self.t_hi
    }
}

/// A spatio-temporal kNN query: location, time interval and `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub x_q: f64,
    pub y_q: f64,
    pub interval: TimeInterval,
    pub k: usize,
}

impl QuerySpec {
    pub fn new(x_q: f64, y_q: f64, interval: TimeInterval, k: usize, world: &WorldBounds) -> Result<Self> {
        if k == 0 {
            return Err(HstiError::InvalidConfig("k must be at least 1".into()));
        }
        if !world.contains_xy(x_q, y_q) {
            return Err(HstiError::OutOfBounds { x: x_q, y: y_q, t: interval.t_start });
        }
        Ok(Self { x_q, y_q, interval, k })
    }

    #[inline]
    pub fn location(&self) -> Point2 {
        Point2::new(self.x_q, self.y_q)
    }
}

#[inline]
pub fn euclidean_distance(p1: Point2, p2: Point2) -> f64 {
    (p1.x - p2.x).hypot(p1.y - p2.y)
}

/// Minimum distance from `p` to any point of the closed rectangle `r`.
#[inline]
pub fn mindist_point_rect(p: Point2, r: &Rect2D) -> f64 {
    let dx = (r.x_lo - p.x).max(0.0).max(p.x - r.x_hi);
    let dy = (r.y_lo - p.y).max(0.0).max(p.y - r.y_hi);
    dx.hypot(dy)
}

#[inline]
pub fn interval_overlaps(a: &TimeInterval, b: &TimeInterval) -> bool {
    a.t_start <= b.t_end && b.t_start <= a.t_end
}

/// An un-normalized input row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRecord {
    pub oid: ObjectId,
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

struct AxisMap {
    min: f64,
    span: f64,
    target: f64,
}

impl AxisMap {
    fn fit(values: impl Iterator<Item = f64>, target: f64) -> Self {
        let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        Self { min, span: max - min, target }
    }

    fn apply(&self, v: f64) -> f64 {
        if self.span > 0.0 {
            ((v - self.min) / self.span * self.target).clamp(0.0, self.target)
        } else {
            self.target / 2.0
        }
    }
}

/// Min-max scales each axis of `raw` onto the world ranges. An axis on which
/// all values are equal maps to its midpoint.
pub fn normalize_dataset(raw: &[RawRecord], world: &WorldBounds) -> Result<Vec<STObject>> {
    if raw.is_empty() {
        return Err(HstiError::EmptyDataset);
    }
    if let Some(r) = raw.iter().find(|r| !(r.x.is_finite() && r.y.is_finite() && r.t.is_finite())) {
        return Err(HstiError::InvalidConfig(format!("non-finite coordinate in record {}", r.oid)));
    }
    let mx = AxisMap::fit(raw.iter().map(|r| r.x), world.x_max);
    let my = AxisMap::fit(raw.iter().map(|r| r.y), world.y_max);
    let mt = AxisMap::fit(raw.iter().map(|r| r.t), world.t_max);
    Ok(raw
        .iter()
        .map(|r| STObject::new(r.oid, mx.apply(r.x), my.apply(r.y), mt.apply(r.t)))
        .collect())
}
