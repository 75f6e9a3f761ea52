//! Brute-force reference answers. Uses no index structure at all.

use crate::geo::{euclidean_distance, QuerySpec, STObject};
use crate::query::{Neighbor, ResultList};

/// Filters by the query interval, sorts by `(distance, oid)` and keeps `k`.
pub fn brute_force_knn(objects: &[STObject], q: &QuerySpec) -> ResultList {
    let origin = q.location();
    let mut hits: Vec<Neighbor> = objects
        .iter()
        .filter(|o| q.interval.contains(o.t))
        .map(|&object| Neighbor { object, distance: euclidean_distance(origin, object.location()) })
        .collect();
    hits.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.object.oid.cmp(&b.object.oid)));
    hits.truncate(q.k);
    ResultList(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::{TimeInterval, WorldBounds};

    fn q(k: usize, t0: f64, t1: f64) -> QuerySpec {
        QuerySpec::new(0.0, 0.0, TimeInterval::new(t0, t1).unwrap(), k, &WorldBounds::default()).unwrap()
    }

    #[test]
    fn empty_input() {
        assert!(brute_force_knn(&[], &q(3, 0.0, 10.0)).is_empty());
    }

    #[test]
    fn k_larger_than_candidates() {
        let objs = [STObject::new(1, 1.0, 0.0, 5.0), STObject::new(2, 2.0, 0.0, 50.0)];
        assert_eq!(brute_force_knn(&objs, &q(10, 0.0, 10.0)).oids(), vec![1]);
    }

    #[test]
    fn collinear_nearest_two() {
        let objs = [
            STObject::new(3, 3.0, 0.0, 1.0),
            STObject::new(1, 1.0, 0.0, 1.0),
            STObject::new(2, 0.0, 2.0, 1.0),
        ];
        let r = brute_force_knn(&objs, &q(2, 0.0, 10.0));
        assert_eq!(r.oids(), vec![1, 2]);
        assert_eq!(r.distances(), vec![1.0, 2.0]);
    }

    #[test]
    fn ties_by_oid() {
        let objs = [STObject::new(5, 1.0, 0.0, 1.0), STObject::new(4, 0.0, 1.0, 1.0)];
        assert_eq!(brute_force_knn(&objs, &q(1, 0.0, 10.0)).oids(), vec![4]);
    }
}
