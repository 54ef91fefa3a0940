//! Runs a configured experiment: allocates each scheme, samples SINR
//! fields, reduces them to coverage curves and content-count maps, and
//! writes the result files.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use lsi_core::metrics::{content_count_map, coverage};
use lsi_core::{
    BufferReallocation, ContentCountMap, ContentPlan, CoverageReport, EvalArea, Grid, LsiError,
    PathLossRegistry, RadioEnv, SchemeConfig, SchemeRegistry, SeReport, SinrEngine, SinrField,
};
use serde::Serialize;
use thiserror::Error;

use crate::config::{to_cfg_string, ConfigError, ExperimentConfig};
use crate::heatmap;
use crate::output::{area_name, sig9, write_json};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "SFN_LSI_THREADS";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] LsiError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{THREADS_ENV}: {0}")]
    Threads(String),
}

impl RunError {
    /// 1 for invalid input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Core(LsiError::Config(_)) | RunError::Threads(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Grid, content plan and radio environment built from a config.
pub struct World {
    pub grid: Grid,
    pub plan: ContentPlan,
    pub env: RadioEnv,
    pub registry: SchemeRegistry,
}

impl World {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self, RunError> {
        let grid = Grid::new(cfg.grid.clone())?;
        cfg.contents.validate()?;
        let pathloss = PathLossRegistry::default().build(&cfg.pathloss)?;
        let env = RadioEnv::new(cfg.n0_w_per_hz(), cfg.d_min_m, Arc::from(pathloss))?;
        let world = Self {
            grid,
            plan: cfg.contents.clone(),
            env,
            registry: SchemeRegistry::default(),
        };
        let mut seen = std::collections::BTreeSet::new();
        for s in &cfg.schemes {
            let id = world.scheme_id(s)?;
            if !seen.insert(id.clone()) {
                return Err(
                    LsiError::Config(format!("scheme {id:?} is listed more than once")).into(),
                );
            }
        }
        Ok(world)
    }

    pub fn scheme_id(&self, scheme: &SchemeConfig) -> Result<String, RunError> {
        let strategy = self.registry.get(&scheme.name)?;
        let mut id = scheme.id(strategy.uses_beta());
        if scheme.reallocation == BufferReallocation::None && strategy.uses_beta() {
            id.push_str("_noboost");
        }
        Ok(id)
    }
}

#[derive(Debug, Clone)]
pub struct SchemeResult {
    pub config: SchemeConfig,
    pub id: String,
    pub label: String,
    /// Per content over the coverage area, at every configured threshold.
    pub coverage: Vec<CoverageReport>,
    /// Per content over the coverage area, at the summary thresholds.
    pub summary: Vec<CoverageReport>,
    pub count_map: ContentCountMap,
    /// Per content over the count area.
    pub count_fields: Vec<SinrField>,
}

impl SchemeResult {
    /// Coverage percentage of content `m` at summary threshold index `t`.
    pub fn summary_pct(&self, m: usize, t: usize) -> f64 {
        100.0 * self.summary[m - 1].covered_fraction[t]
    }

    /// Mean local-content coverage percentage at summary threshold index `t`.
    pub fn local_average_pct(&self, t: usize) -> f64 {
        let locals = &self.summary[1..];
        100.0 * locals.iter().map(|r| r.covered_fraction[t]).sum::<f64>() / locals.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub schemes: Vec<SchemeResult>,
    pub se: SeReport,
}

impl ExperimentResults {
    pub fn scheme(&self, id: &str) -> Option<&SchemeResult> {
        self.schemes.iter().find(|s| s.id == id)
    }
}

/// Parses `SFN_LSI_THREADS`; unset or empty means the pool default.
pub fn threads_from_env() -> Result<Option<usize>, RunError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(RunError::Threads(format!(
                "{v:?} is not a positive integer"
            ))),
        },
    }
}

pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| RunError::Threads(e.to_string()))?;
    Ok(pool.install(f))
}

/// Computes every scheme's fields and reductions without touching the filesystem.
pub fn simulate(cfg: &ExperimentConfig) -> Result<ExperimentResults, RunError> {
    let world = World::from_config(cfg)?;
    let spec = world.grid.spec();
    let cov_area = EvalArea::of_kind(cfg.coverage_area, spec, cfg.resolution)?;
    let count_area = EvalArea::of_kind(cfg.count_area, spec, cfg.resolution)?;
    let mut schemes = Vec::with_capacity(cfg.schemes.len());
    for sc in &cfg.schemes {
        let id = world.scheme_id(sc)?;
        let label = world.registry.get(&sc.name)?.label().to_string();
        let tp = world.registry.allocate(&world.grid, &world.plan, sc)?;
        let engine = SinrEngine::new(&world.grid, &world.plan, &tp, &world.env)?;
        let cov_fields = engine.sinr_fields(&cov_area)?;
        let count_fields = if count_area == cov_area {
            cov_fields.clone()
        } else {
            engine.sinr_fields(&count_area)?
        };
        let curves = cov_fields
            .iter()
            .map(|f| coverage(&id, f, &cfg.thresholds_db))
            .collect::<Result<Vec<_>, _>>()?;
        let summary = cov_fields
            .iter()
            .map(|f| coverage(&id, f, &cfg.summary_thresholds_db))
            .collect::<Result<Vec<_>, _>>()?;
        let count_map = content_count_map(&count_fields, cfg.count_threshold_db)?;
        schemes.push(SchemeResult {
            config: sc.clone(),
            id,
            label,
            coverage: curves,
            summary,
            count_map,
            count_fields,
        });
    }
    let se = SeReport::compute(&world.registry, &world.grid, &world.plan)?;
    Ok(ExperimentResults { schemes, se })
}

#[derive(Serialize)]
struct CoverageRow<'a> {
    scheme: &'a str,
    label: &'a str,
    beta: f64,
    area: &'a str,
    content: usize,
    threshold_db: f64,
    covered_fraction: f64,
}

#[derive(Serialize)]
struct SummaryContent {
    content: usize,
    coverage_pct: Vec<f64>,
}

#[derive(Serialize)]
struct SummaryScheme<'a> {
    id: &'a str,
    label: &'a str,
    scheme: &'a str,
    beta: f64,
    contents: Vec<SummaryContent>,
    local_average_pct: Vec<f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    area: &'a str,
    thresholds_db: &'a [f64],
    schemes: Vec<SummaryScheme<'a>>,
}

#[derive(Serialize)]
struct CountScheme<'a> {
    id: &'a str,
    label: &'a str,
    histogram: Vec<f64>,
    at_least: Vec<f64>,
    raster: String,
}

#[derive(Serialize)]
struct CountSummary<'a> {
    area: &'a str,
    threshold_db: f64,
    m_count: usize,
    schemes: Vec<CountScheme<'a>>,
}

#[derive(Serialize)]
struct SeOutput<'a> {
    #[serde(flatten)]
    report: &'a SeReport,
    olsi_over_ps_general: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    files: Vec<String>,
    config: String,
}

/// SE report plus the general O-LSI/PS ratio, as written to `se.json`.
pub fn se_json(report: &SeReport, m_count: usize) -> Result<serde_json::Value, RunError> {
    let general = lsi_core::metrics::se_ratio_general(m_count)?;
    let out = SeOutput {
        report,
        olsi_over_ps_general: format!("{}/{}", general.numer(), general.denom()),
    };
    Ok(crate::output::rounded_json(&out))
}

/// Writes all result files under `dir` and returns their relative paths.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    results: &ExperimentResults,
    dir: &Path,
) -> Result<Vec<String>, RunError> {
    let maps = dir.join("maps");
    std::fs::create_dir_all(&maps).map_err(|e| RunError::io(&maps, e))?;
    let mut files = Vec::new();
    let cov_area = area_name(cfg.coverage_area);

    let path = dir.join("coverage.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| RunError::io(&path, e.into()))?;
    for s in &results.schemes {
        for report in &s.coverage {
            for (t, frac) in report.thresholds_db.iter().zip(&report.covered_fraction) {
                w.serialize(CoverageRow {
                    scheme: &s.id,
                    label: &s.label,
                    beta: s.config.beta,
                    area: cov_area,
                    content: report.content,
                    threshold_db: sig9(*t),
                    covered_fraction: sig9(*frac),
                })
                .map_err(|e| RunError::io(&path, e.into()))?;
            }
        }
    }
    w.flush().map_err(|e| RunError::io(&path, e))?;
    files.push("coverage.csv".to_string());

    let summary = Summary {
        area: cov_area,
        thresholds_db: &cfg.summary_thresholds_db,
        schemes: results
            .schemes
            .iter()
            .map(|s| SummaryScheme {
                id: &s.id,
                label: &s.label,
                scheme: &s.config.name,
                beta: s.config.beta,
                contents: s
                    .summary
                    .iter()
                    .map(|r| SummaryContent {
                        content: r.content,
                        coverage_pct: r.covered_fraction.iter().map(|f| 100.0 * f).collect(),
                    })
                    .collect(),
                local_average_pct: (0..cfg.summary_thresholds_db.len())
                    .map(|t| s.local_average_pct(t))
                    .collect(),
            })
            .collect(),
    };
    write_json(&dir.join("coverage_summary.json"), &summary)?;
    files.push("coverage_summary.json".to_string());

    let mut counts = CountSummary {
        area: area_name(cfg.count_area),
        threshold_db: cfg.count_threshold_db,
        m_count: cfg.contents.m_count(),
        schemes: Vec::new(),
    };
    for s in &results.schemes {
        let raster = format!("maps/{}_counts.pgm", s.id);
        let path = dir.join(&raster);
        heatmap::write_count_map(&s.count_map, &path).map_err(|e| RunError::io(&path, e))?;
        files.push(raster.clone());
        counts.schemes.push(CountScheme {
            id: &s.id,
            label: &s.label,
            histogram: s.count_map.histogram.clone(),
            at_least: (0..=s.count_map.m_count)
                .map(|k| s.count_map.at_least(k))
                .collect(),
            raster,
        });
        if cfg.emit_sinr_maps {
            for f in &s.count_fields {
                let raster = format!("maps/{}_content{}_sinr.pgm", s.id, f.content);
                let path = dir.join(&raster);
                heatmap::write_sinr_map(f, cfg.sinr_map_range_db, &path)
                    .map_err(|e| RunError::io(&path, e))?;
                files.push(raster);
                files.push(format!("maps/{}_content{}_sinr.txt", s.id, f.content));
            }
        }
    }
    write_json(&dir.join("content_counts.json"), &counts)?;
    files.push("content_counts.json".to_string());

    let se = se_json(&results.se, cfg.contents.m_count())?;
    write_json(&dir.join("se.json"), &se)?;
    files.push("se.json".to_string());

    files.push("manifest.json".to_string());
    files.sort();
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        files: files.clone(),
        config: to_cfg_string(cfg),
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(files)
}

/// Simulates and writes results to `cfg.output_dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<Vec<String>, RunError> {
    let results = with_threads(threads, || simulate(cfg))??;
    write_outputs(cfg, &results, &cfg.output_dir)
}
