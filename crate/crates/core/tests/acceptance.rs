//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::Instant;

use hsti::bench::gen::{generate, Distribution};
use hsti::bench::{random_queries, run_bench, timed_build, BenchConfig, BenchReport};
use hsti::query::{knn_search_with, SearchOptions};
use hsti::zoctree::{leaf_morton, Mbr3D, ZOctree, ZOctreeConfig};
use hsti::zorder::{decode2d, encode2d, GridConfig};
use hsti::{brute_force_knn, build_cluster, STObject, SimCluster, WorldBounds};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIST_TOL: f64 = 1e-9;
const INTERVAL_WIDTH: f64 = 200.0;
const SUITE_QUERIES: usize = 200;
const SUITE_KS: [usize; 3] = [1, 10, 100];
const LARGE_N: usize = 1_000_000;
const MAX_ROW_FRACTION: f64 = 0.20;
const MAX_TIME_FRACTION: f64 = 1.0 / 3.0;
const TREND_MARGIN: f64 = 0.05;
const MAX_BUILD_SECS: f64 = 60.0;
const LINEARITY_TOL: f64 = 0.20;

type Outcome = Result<String, String>;

fn world() -> WorldBounds {
    WorldBounds::default()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

struct Suite {
    name: String,
    objects: Vec<STObject>,
    cluster: SimCluster,
}

fn suites() -> Vec<Suite> {
    let w = world();
    let mut out = Vec::new();
    for n in [10_000, 100_000] {
        for (dist, seed) in [
            (Distribution::Uniform, 11),
            (Distribution::Clustered { clusters: 12, sigma: 250.0 }, 12),
        ] {
            let objects = generate(n, dist, &w, seed + n as u64).unwrap();
            let cluster = build_cluster(&objects, 4, GridConfig::default(), ZOctreeConfig::default()).unwrap();
            out.push(Suite { name: format!("{}-{n}", dist.name()), objects, cluster });
        }
    }
    out
}

fn criterion_1_oracle_equivalence(suites: &[Suite]) -> Outcome {
    let mut compared = 0;
    for s in suites {
        for k in SUITE_KS {
            for (i, q) in random_queries(SUITE_QUERIES, INTERVAL_WIDTH, k, &world(), 1).iter().enumerate() {
                let (got, _) = knn_search_with(&s.cluster, q, SearchOptions::default());
                let want = brute_force_knn(&s.objects, q);
                check(got.len() == want.len(), format!("{} k={k} q{i}: {} vs {} results", s.name, got.len(), want.len()))?;
                for (a, b) in got.iter().zip(&want) {
                    check(
                        a.object.oid == b.object.oid && (a.distance - b.distance).abs() <= DIST_TOL,
                        format!("{} k={k} q{i}: ({}, {}) vs oracle ({}, {})", s.name, a.object.oid, a.distance, b.object.oid, b.distance),
                    )?;
                }
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} queries identical to brute force across {} datasets", suites.len()))
}

fn criterion_2_full_scan_cross_check(suites: &[Suite]) -> Outcome {
    let mut runs = 0;
    for s in suites {
        let cfg = BenchConfig {
            dataset: s.name.clone(),
            ks: SUITE_KS.to_vec(),
            cluster_sizes: vec![4],
            queries: SUITE_QUERIES,
            interval_width: INTERVAL_WIDTH,
            ..Default::default()
        };
        let report = run_bench(&s.objects, &cfg, |_| Ok(())).map_err(|e| e.to_string())?;
        runs += report.records.len();
    }
    Ok(format!("{runs} runs with matching hsti/fullscan checksums"))
}

fn criterion_3_morton() -> Outcome {
    for g in 1..=5u32 {
        for cx in 0..1u32 << g {
            for cy in 0..1u32 << g {
                let z = encode2d(cx, cy, g).unwrap();
                check(decode2d(z, g).unwrap() == (cx, cy), format!("roundtrip g={g} ({cx},{cy})"))?;
            }
        }
        for level in 0..=g {
            let size = 1u32 << level;
            for bx in (0..1u32 << g).step_by(size as usize) {
                for by in (0..1u32 << g).step_by(size as usize) {
                    let mut lo = u64::MAX;
                    let mut hi = 0;
                    for x in bx..bx + size {
                        for y in by..by + size {
                            let z = encode2d(x, y, g).unwrap().0;
                            lo = lo.min(z);
                            hi = hi.max(z);
                        }
                    }
                    check(encode2d(bx, by, g).unwrap().0 == lo, format!("block min g={g} at ({bx},{by})"))?;
                    check(
                        encode2d(bx + size - 1, by + size - 1, g).unwrap().0 == hi,
                        format!("block max g={g} at ({bx},{by})"),
                    )?;
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = world();
    for tree_no in 0..100 {
        let depth = rng.random_range(2..=16);
        let xi = rng.random_range(1..=64);
        let mut tree = ZOctree::new(ZOctreeConfig::new(depth, xi).unwrap(), w.cube());
        for i in 0..rng.random_range(0..3000u64) {
            let o = STObject::new(i, rng.random_range(0.0..=w.x_max), rng.random_range(0.0..=w.y_max), rng.random_range(0.0..=w.t_max));
            tree.insert(o).unwrap();
        }
        let mut prev: Option<u64> = None;
        for leaf in tree.leaves() {
            let v = leaf.morton().0;
            check(prev.is_none_or(|p| v > p), format!("tree {tree_no}: leaf values not increasing"))?;
            check(leaf_morton(&tree.path_of(leaf.id()), depth).0 == v, format!("tree {tree_no}: leaf value off its path"))?;
            prev = Some(v);
        }
    }
    Ok("roundtrip and block min/max exhaustive for g<=5; leaf values increasing on 100 trees".into())
}

fn criterion_4_octree_structure() -> Outcome {
    let w = world();
    let cfg = ZOctreeConfig::new(16, 200).unwrap();
    let mut tree = ZOctree::new(cfg, w.cube());
    for o in generate(100_000, Distribution::Uniform, &w, 44).unwrap() {
        tree.insert(o).map_err(|e| e.to_string())?;
    }
    tree.freeze();
    let mut total = 0;
    let mut max_fill = 0;
    for leaf in tree.leaves() {
        total += leaf.len();
        if leaf.level() < cfg.depth {
            check(leaf.len() <= cfg.xi, format!("leaf {} holds {} > {}", leaf.id(), leaf.len(), cfg.xi))?;
            max_fill = max_fill.max(leaf.len());
        }
        for o in leaf.objects() {
            check(leaf.cube().contains(o.x, o.y, o.t), format!("object {} outside its leaf cube", o.oid))?;
        }
        check(leaf.mbr().copied() == Mbr3D::of_points(leaf.objects()), format!("leaf {} MBR stale", leaf.id()))?;
    }
    check(total == 100_000 && tree.len() == 100_000, format!("{total} entries in leaves"))?;
    Ok(format!("{} leaves, max fill {max_fill}, counts conserved", tree.leaf_count()))
}

fn criterion_5_pruning_safety(suites: &[Suite]) -> Outcome {
    let (mut with, mut without) = (0u64, 0u64);
    for s in suites {
        for k in SUITE_KS {
            for q in random_queries(SUITE_QUERIES, INTERVAL_WIDTH, k, &world(), 1) {
                let (a, sa) = knn_search_with(&s.cluster, &q, SearchOptions { mbr_pruning: true, ..Default::default() });
                let (b, sb) = knn_search_with(&s.cluster, &q, SearchOptions { mbr_pruning: false, ..Default::default() });
                check(a.checksum() == b.checksum(), format!("{} k={k}: pruning changed the answer", s.name))?;
                with += sa.visited_leaves;
                without += sb.visited_leaves;
            }
        }
    }
    check(with < without, format!("pruning did not change visited leaves ({with} vs {without})"))?;
    Ok(format!("checksums unchanged; visited leaves {with} with pruning vs {without} without"))
}

fn large_sweep(objects: &[STObject]) -> Result<BenchReport, String> {
    let cfg = BenchConfig {
        dataset: "uniform-1e6".into(),
        ks: vec![100],
        cluster_sizes: vec![2, 4, 6, 8],
        queries: SUITE_QUERIES,
        interval_width: INTERVAL_WIDTH,
        seed: 6,
        ..Default::default()
    };
    run_bench(objects, &cfg, |_| Ok(())).map_err(|e| e.to_string())
}

fn criterion_6_scan_avoidance(report: &BenchReport) -> Outcome {
    let s = report.summarize().into_iter().find(|s| s.cluster_size == 4 && s.k == 100).ok_or("no default sweep point")?;
    let rows = s.hsti_mean_rows / s.fullscan_mean_rows;
    let time = s.hsti_mean_ms / s.fullscan_mean_ms;
    let msg = format!(
        "rows {:.0} vs {:.0} ({:.2}%), time {:.3} ms vs {:.3} ms ({:.2}%)",
        s.hsti_mean_rows, s.fullscan_mean_rows, rows * 100.0, s.hsti_mean_ms, s.fullscan_mean_ms, time * 100.0
    );
    check(rows <= MAX_ROW_FRACTION && time <= MAX_TIME_FRACTION, msg.clone())?;
    Ok(msg)
}

fn criterion_7_cluster_trend(report: &BenchReport) -> Outcome {
    let hottest: Vec<(usize, f64)> = report
        .summarize()
        .into_iter()
        .map(|s| (s.cluster_size, s.hottest_region_mean_rows))
        .collect();
    let msg = hottest.iter().map(|(c, r)| format!("{c}:{r:.1}")).collect::<Vec<_>>().join(" ");
    check(hottest.len() == 4, "missing sweep points")?;
    for w in hottest.windows(2) {
        check(w[1].1 <= w[0].1 * (1.0 + TREND_MARGIN), format!("not decreasing: {msg}"))?;
    }
    Ok(format!("hottest-region mean rows {msg}"))
}

fn criterion_8_build(report: &BenchReport, large: &[STObject]) -> Outcome {
    let big = report.builds.iter().find(|b| b.cluster_size == 4).ok_or("no cluster_size 4 build")?;
    check(big.build_ms / 1e3 < MAX_BUILD_SECS, format!("build took {:.1} s", big.build_ms / 1e3))?;

    let cfg = BenchConfig::default();
    let mut per_object = Vec::new();
    for n in [100_000, 500_000] {
        let (_, rec) = timed_build(&large[..n], 4, &cfg).map_err(|e| e.to_string())?;
        per_object.push((n, rec.index_bytes as f64 / n as f64));
    }
    per_object.push((LARGE_N, big.index_bytes as f64 / LARGE_N as f64));
    let reference = per_object.last().unwrap().1;
    let msg = per_object.iter().map(|(n, b)| format!("n={n}: {b:.1} B/obj")).collect::<Vec<_>>().join(", ");
    for (_, b) in &per_object {
        check((b / reference - 1.0).abs() <= LINEARITY_TOL, format!("index size not linear: {msg}"))?;
    }
    Ok(format!("1e6 build {:.2} s; {msg}", big.build_ms / 1e3))
}

fn main() {
    // Nothing to enumerate for `cargo test -- --list`.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let started = Instant::now();
    let mut failures = 0;
    let mut report = |id: u32, name: &str, outcome: Outcome| {
        match &outcome {
            Ok(msg) => println!("criterion {id} [{name}]: PASS - {msg}"),
            Err(msg) => {
                failures += 1;
                println!("criterion {id} [{name}]: FAIL - {msg}");
            }
        }
    };

    let suites = suites();
    report(1, "oracle equivalence", criterion_1_oracle_equivalence(&suites));
    report(2, "full-scan cross-check", criterion_2_full_scan_cross_check(&suites));
    report(3, "morton correctness", criterion_3_morton());
    report(4, "octree structure", criterion_4_octree_structure());
    report(5, "pruning safety", criterion_5_pruning_safety(&suites));
    drop(suites);

    let large = generate(LARGE_N, Distribution::Uniform, &world(), 1_000_000).unwrap();
    match large_sweep(&large) {
        Ok(sweep) => {
            report(6, "scan avoidance", criterion_6_scan_avoidance(&sweep));
            report(7, "cluster-size trend", criterion_7_cluster_trend(&sweep));
            report(8, "index build", criterion_8_build(&sweep, &large));
        }
        Err(e) => {
            for (id, name) in [(6, "scan avoidance"), (7, "cluster-size trend"), (8, "index build")] {
                report(id, name, Err(format!("sweep failed: {e}")));
            }
        }
    }

    println!("acceptance: {} failed, finished in {:.1} s", failures, started.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
