//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and fails if any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lsi_core::metrics::{content_count_map, coverage};
use lsi_core::oracle::Oracle;
use lsi_core::propagation::{Hata, PowerLaw};
use lsi_core::{
    BufferReallocation, ContentPlan, EvalArea, Grid, GridSpec, Point, RadioEnv, Ratio,
    SchemeConfig, SchemeRegistry, SeReport, SinrEngine,
};
use sfn_lsi_sim::config::parse_config;
use sfn_lsi_sim::experiment::{simulate, ExperimentResults};
use sfn_lsi_sim::oracle_check::rel_error;

/// Soft band for calibrated reproductions, percentage points.
const CALIBRATION_BAND_PP: f64 = 5.0;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn table1_results() -> ExperimentResults {
    let cfg = parse_config(&configs_dir().join("paper_table1.cfg")).unwrap();
    assert_eq!(cfg.resolution, 20);
    simulate(&cfg).unwrap()
}

fn equal_plan(m: usize) -> ContentPlan {
    ContentPlan::uniform(m, 4.5e6, 300, 64, 7.1428571e-5, 10.0)
}

fn hata_env() -> RadioEnv {
    RadioEnv::new(
        10f64.powf(-15.858) * 1e-3,
        20.0,
        Arc::new(Hata::new(700.0, 200.0, 1.5).unwrap()),
    )
    .unwrap()
}

fn power_law_env() -> RadioEnv {
    RadioEnv::new(1e-22, 20.0, Arc::new(PowerLaw::new(3.5).unwrap())).unwrap()
}

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac1_se_ratios() -> Outcome {
    let grid = Grid::new(GridSpec::default()).unwrap();
    let r = SeReport::compute(&SchemeRegistry::default(), &grid, &equal_plan(3))
        .map_err(|e| e.to_string())?;
    let expect = [
        ("olsi/ps", &r.olsi_over_ps, Ratio::new(2, 3)),
        ("olsi/imo", &r.olsi_over_imo, Ratio::new(80, 112)),
        ("ps/imo", &r.ps_over_imo, Ratio::new(15, 14)),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, got, want) in expect {
        let float = *want.numer() as f64 / *want.denom() as f64;
        let rel = (got.value - float).abs() / float;
        ok &= got.exact == Some(want) && rel <= 1e-12;
        detail.push(format!(
            "{name} exact={:?} rel={rel:.1e}",
            got.exact.map(|x| format!("{x}"))
        ));
    }
    check(ok, detail.join(", "))
}

fn small_specs() -> Vec<GridSpec> {
    let mut out = Vec::new();
    for rows in 1..=2 {
        for cols in 2..=4 {
            for lsa1_cols in 1..cols {
                for b in 1..=lsa1_cols.min(cols - lsa1_cols) {
                    out.push(GridSpec {
                        rows,
                        cols,
                        isd: 1700.0,
                        lsa1_cols,
                        buffer_cols_per_side: b,
                    });
                }
            }
        }
    }
    out
}

fn ac2_oracle_equivalence() -> Outcome {
    let reg = SchemeRegistry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut comparisons = 0usize;
    for spec in small_specs() {
        let grid = Grid::new(spec.clone()).unwrap();
        for m_count in 2..=3 {
            let plan = equal_plan(m_count);
            for env in [hata_env(), power_law_env()] {
                let oracle = Oracle {
                    spec: &spec,
                    plan: &plan,
                    pathloss: env.pathloss(),
                    n0: env.n0(),
                    d_min: env.d_min(),
                };
                for name in ["olsi", "ps", "imo"] {
                    for beta in [0.0, 0.25, 0.5, 1.0] {
                        let sc = SchemeConfig::new(name, beta);
                        let tp = reg.allocate(&grid, &plan, &sc).unwrap();
                        let engine = SinrEngine::new(&grid, &plan, &tp, &env).unwrap();
                        for _ in 0..50 {
                            let p = Point::new(
                                rng.gen_range(0.0..spec.width_m()),
                                rng.gen_range(0.0..spec.height_m()),
                            );
                            for m in 1..=m_count {
                                let e = engine.sinr_at(p, m).unwrap().linear();
                                let o = oracle.sinr(name, beta, BufferReallocation::Global, m, p);
                                worst = worst.max(rel_error(e, o));
                                comparisons += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    check(
        worst <= 1e-9,
        format!("{comparisons} comparisons, max rel error {worst:.2e}"),
    )
}

fn ac3_beta_one_degeneracy() -> Outcome {
    let grid = Grid::new(GridSpec::default()).unwrap();
    let plan = equal_plan(3);
    let reg = SchemeRegistry::default();
    let area = EvalArea::a2(grid.spec(), 10);
    let mut worst: f64 = 0.0;
    for env in [hata_env(), power_law_env()] {
        let ps = reg
            .allocate(&grid, &plan, &SchemeConfig::new("ps", 1.0))
            .unwrap();
        let r1 = reg
            .allocate(&grid, &plan, &SchemeConfig::new("reuse1", 1.0))
            .unwrap();
        let a = SinrEngine::new(&grid, &plan, &ps, &env)
            .unwrap()
            .sinr_fields(&area)
            .unwrap();
        let b = SinrEngine::new(&grid, &plan, &r1, &env)
            .unwrap()
            .sinr_fields(&area)
            .unwrap();
        for (fa, fb) in a.iter().zip(&b) {
            for (x, y) in fa.values_db.iter().zip(&fb.values_db) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    check(
        worst <= 1e-12,
        format!("max |dB difference| {worst:.1e} over 3 contents x 8000 points x 2 models"),
    )
}

fn ac4_global_monotone() -> Outcome {
    let grid = Grid::new(GridSpec::default()).unwrap();
    let plan = equal_plan(3);
    let reg = SchemeRegistry::default();
    let area = EvalArea::a1(grid.spec(), 20);
    let mut violations = 0usize;
    let mut points = 0usize;
    for env in [hata_env(), power_law_env()] {
        let fields: Vec<Vec<f64>> = [1.0, 0.5, 0.25, 0.0]
            .iter()
            .map(|&b| {
                let tp = reg
                    .allocate(&grid, &plan, &SchemeConfig::new("ps", b))
                    .unwrap();
                SinrEngine::new(&grid, &plan, &tp, &env)
                    .unwrap()
                    .sinr_field(&area, 1)
                    .unwrap()
                    .values_db
            })
            .collect();
        points += fields[0].len();
        for w in fields.windows(2) {
            violations += w[0].iter().zip(&w[1]).filter(|(hi, lo)| lo < hi).count();
        }
    }
    check(
        violations == 0,
        format!("{points} A1 points, {violations} decreases"),
    )
}

fn ac5_ps_no_two_content_points(results: &ExperimentResults) -> Outcome {
    let thresholds: Vec<f64> = (-40..=100).map(|t| f64::from(t) * 0.5).collect();
    let mut bad = Vec::new();
    for s in results.schemes.iter().filter(|s| s.config.name == "ps") {
        for &t in &thresholds {
            let map = content_count_map(&s.count_fields, t).unwrap();
            if map.counts.contains(&2) {
                bad.push(format!("{}@{t}", s.id));
            }
        }
    }
    check(
        bad.is_empty(),
        format!(
            "ps maps over A2 at {} thresholds; count==2 at {bad:?}",
            thresholds.len()
        ),
    )
}

fn ac6_imo_ordering() -> Outcome {
    let thresholds: Vec<f64> = (10..=60).map(|t| f64::from(t) * 0.5).collect();
    let c2 = coverage("imo", &imo_field(2)?, &thresholds).unwrap();
    let c3 = coverage("imo", &imo_field(3)?, &thresholds).unwrap();
    let le = c2
        .covered_fraction
        .iter()
        .zip(&c3.covered_fraction)
        .all(|(a, b)| b <= a);
    let at = |t: f64| thresholds.iter().position(|&x| x == t).unwrap();
    let strict = [15.0, 20.0]
        .iter()
        .all(|&t| c3.covered_fraction[at(t)] < c2.covered_fraction[at(t)]);
    check(
        le && strict,
        format!(
            "c2/c3 at 15 dB {:.1}/{:.1}, at 20 dB {:.1}/{:.1}",
            100.0 * c2.covered_fraction[at(15.0)],
            100.0 * c3.covered_fraction[at(15.0)],
            100.0 * c2.covered_fraction[at(20.0)],
            100.0 * c3.covered_fraction[at(20.0)]
        ),
    )
}

fn imo_field(m: usize) -> Result<lsi_core::SinrField, String> {
    let grid = Grid::new(GridSpec::default()).unwrap();
    let plan = equal_plan(3);
    let tp = SchemeRegistry::default()
        .allocate(&grid, &plan, &SchemeConfig::new("imo", 1.0))
        .unwrap();
    let env = hata_env();
    SinrEngine::new(&grid, &plan, &tp, &env)
        .unwrap()
        .sinr_field(&EvalArea::a1(grid.spec(), 20), m)
        .map_err(|e| e.to_string())
}

fn ac7_table1(results: &ExperimentResults) -> Outcome {
    let imo = results.scheme("imo_b1").ok_or("imo_b1 missing")?;
    let ps = results.scheme("ps_b0.25").ok_or("ps_b0.25 missing")?;
    let r1 = results.scheme("reuse1").ok_or("reuse1 missing")?;
    // (label, ours at 15/20, reference at 15/20)
    let rows = [
        (
            "content 2, IM-LSI-O",
            [imo.summary_pct(2, 0), imo.summary_pct(2, 1)],
            [93.5, 60.1],
        ),
        (
            "content 3, IM-LSI-O",
            [imo.summary_pct(3, 0), imo.summary_pct(3, 1)],
            [64.8, 32.4],
        ),
        (
            "average IM-LSI-O",
            [imo.local_average_pct(0), imo.local_average_pct(1)],
            [79.2, 46.3],
        ),
        (
            "IM-LSI-PS beta=1/4",
            [ps.summary_pct(2, 0), ps.summary_pct(2, 1)],
            [74.5, 46.6],
        ),
        (
            "pure reuse-1",
            [r1.summary_pct(2, 0), r1.summary_pct(2, 1)],
            [74.3, 35.7],
        ),
    ];
    let mut within = true;
    let mut ordered = true;
    let mut detail = Vec::new();
    for t in 0..2 {
        for (label, ours, reference) in &rows {
            let dev = ours[t] - reference[t];
            within &= dev.abs() <= CALIBRATION_BAND_PP;
            detail.push(format!(
                "{label}@{}: {:.1} ({:+.1})",
                [15, 20][t],
                ours[t],
                dev
            ));
        }
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                if rows[i].2[t] > rows[j].2[t] {
                    ordered &= rows[i].1[t] > rows[j].1[t];
                }
            }
        }
    }
    check(
        within && ordered,
        format!(
            "orderings {} band {}; {}",
            ok_str(ordered),
            ok_str(within),
            detail.join("; ")
        ),
    )
}

fn ok_str(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn ac8_content_maps(results: &ExperimentResults) -> Outcome {
    let imo = &results.scheme("imo_b1").ok_or("imo_b1 missing")?.count_map;
    let ps = &results
        .scheme("ps_b0.25")
        .ok_or("ps_b0.25 missing")?
        .count_map;
    assert_eq!(imo.threshold_db, 15.0);
    let vals = [
        ("IMO count=3", 100.0 * imo.at_least(3), 65.5),
        ("IMO count>=2", 100.0 * imo.at_least(2), 94.2),
        ("PS count=3", 100.0 * ps.at_least(3), 74.9),
    ];
    let within = vals
        .iter()
        .all(|(_, ours, reference)| (ours - reference).abs() <= CALIBRATION_BAND_PP);
    let global = imo.at_least(1) == 1.0 && ps.at_least(1) == 1.0;
    let ordered = ps.at_least(3) > imo.at_least(3);
    let detail: Vec<String> = vals
        .iter()
        .map(|(l, o, p)| format!("{l} {o:.1} ({:+.1})", o - p))
        .collect();
    check(
        within && global && ordered,
        format!(
            "global 100% {}, PS>IMO {}, band {}; {}",
            ok_str(global),
            ok_str(ordered),
            ok_str(within),
            detail.join("; ")
        ),
    )
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(
                    path.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&path).unwrap(),
                );
            }
        }
    }
    out
}

fn ac9_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut detail = Vec::new();
    let mut ok = true;
    let mut shipped: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "cfg"))
        .collect();
    shipped.sort();
    for cfg in shipped {
        let out = tmp.path().join(cfg.file_stem().unwrap());
        let mut snaps = Vec::new();
        for threads in ["1", "4"] {
            let status = Command::new(env!("CARGO_BIN_EXE_sfn-lsi-sim"))
                .args(["run", "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .env("SFN_LSI_THREADS", threads)
                .output()
                .unwrap();
            if !status.status.success() {
                return Err(format!(
                    "{} failed: {}",
                    cfg.display(),
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            snaps.push(snapshot(&out));
        }
        let same = snaps[0] == snaps[1];
        ok &= same && !snaps[0].is_empty();
        detail.push(format!(
            "{}: {} files {}",
            cfg.file_name().unwrap().to_string_lossy(),
            snaps[0].len(),
            if same { "identical" } else { "DIFFER" }
        ));
    }
    check(ok, detail.join("; "))
}

#[test]
fn acceptance_suite() {
    let results = table1_results();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("AC1 exact SE ratios", ac1_se_ratios()),
        ("AC2 oracle equivalence", ac2_oracle_equivalence()),
        ("AC3 beta=1 degeneracy", ac3_beta_one_degeneracy()),
        ("AC4 global SINR monotone in beta", ac4_global_monotone()),
        (
            "AC5 PS never exactly two contents",
            ac5_ps_no_two_content_points(&results),
        ),
        ("AC6 IMO content 3 <= content 2", ac6_imo_ordering()),
        ("AC7 calibrated coverage reproduction", ac7_table1(&results)),
        ("AC8 content-map quantification", ac8_content_maps(&results)),
        ("AC9 determinism across threads", ac9_determinism()),
    ];
    let mut failed = Vec::new();
    for (name, outcome) in &criteria {
        match outcome {
            Ok(d) => println!("[PASS] {name}: {d}"),
            Err(d) => {
                println!("[FAIL] {name}: {d}");
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
