//! Two-layer spatio-temporal index with best-first kNN search.
//!
//! The first layer partitions the plane into a Z-order grid whose codes prefix
//! every row key; a META table maps contiguous code ranges to simulated region
//! servers. The second layer is a Z-Octree inside each region over
//! `(x, y, t)`. Queries walk both layers best-first, ordered by MINDIST.

pub mod bench;
pub mod error;
pub mod geo;
pub mod meta;
pub mod oracle;
pub mod query;
pub mod region;
pub mod zoctree;
pub mod zorder;

pub use error::{HstiError, Result};
pub use geo::{
    euclidean_distance, interval_overlaps, mindist_point_rect, normalize_dataset, Cube3D, ObjectId,
    Point2, QuerySpec, RawRecord, Rect2D, STObject, TimeInterval, WorldBounds,
};
pub use meta::{build_cluster, route, MetaTable, SimCluster};
pub use oracle::brute_force_knn;
pub use query::{full_scan_knn, knn_search, knn_search_with, Neighbor, ResultList, SearchMode, SearchOptions, SearchStats};
pub use region::{make_row_key, RegionServer, RowKey};
pub use zoctree::{ZOctree, ZOctreeConfig};
pub use zorder::{cell_of, cell_rect, GridConfig, MortonCode2D};
