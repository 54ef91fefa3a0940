//! Engine-versus-brute-force comparison behind the `oracle` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use lsi_core::oracle::Oracle;
use lsi_core::{Point, SinrEngine};

use crate::config::ExperimentConfig;
use crate::experiment::{RunError, World};

/// Maximum accepted relative disagreement.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub scheme: String,
    pub points: usize,
    pub max_rel_error: f64,
    pub pass: bool,
}

/// Relative error with an absolute fallback when both values vanish.
pub fn rel_error(engine: f64, oracle: f64) -> f64 {
    let scale = engine.abs().max(oracle.abs());
    if scale == 0.0 {
        0.0
    } else {
        (engine - oracle).abs() / scale
    }
}

/// Compares engine and oracle SINR for every configured scheme and content
/// at `points` uniformly drawn locations inside the grid.
pub fn check(cfg: &ExperimentConfig, points: usize) -> Result<Vec<OracleReport>, RunError> {
    let world = World::from_config(cfg)?;
    let spec = world.grid.spec();
    let oracle = Oracle {
        spec,
        plan: &world.plan,
        pathloss: world.env.pathloss(),
        n0: world.env.n0(),
        d_min: world.env.d_min(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sample: Vec<Point> = (0..points)
        .map(|_| {
            Point::new(
                rng.gen_range(0.0..spec.width_m()),
                rng.gen_range(0.0..spec.height_m()),
            )
        })
        .collect();
    let mut out = Vec::new();
    for sc in &cfg.schemes {
        let tp = world.registry.allocate(&world.grid, &world.plan, sc)?;
        let engine = SinrEngine::new(&world.grid, &world.plan, &tp, &world.env)?;
        let mut worst: f64 = 0.0;
        for &p in &sample {
            for m in 1..=world.plan.m_count() {
                let e = engine.sinr_at(p, m)?.linear();
                let o = oracle.sinr(&sc.name, sc.beta, sc.reallocation, m, p);
                worst = worst.max(rel_error(e, o));
            }
        }
        out.push(OracleReport {
            scheme: world.scheme_id(sc)?,
            points,
            max_rel_error: worst,
            pass: worst <= ORACLE_TOLERANCE,
        });
    }
    Ok(out)
}
