//! Experiment configuration: a sectioned key-value text file (TOML syntax).
//!
//! Parsing collects every problem in the file before failing, so one
//! `validate` run reports all missing keys, unknown keys and range errors.

use std::fmt;
use std::path::{Path, PathBuf};

use lsi_core::allocation::check_beta;
use lsi_core::grid::DEFAULT_D_MIN_M;
use lsi_core::{
    AreaKind, BufferReallocation, ContentPlan, GridSpec, PathLossParams, PathLossRegistry,
    SchemeConfig, SchemeRegistry,
};
use thiserror::Error;
use toml::{Table, Value};

use crate::output::area_name;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("{} configuration error(s):\n{}", .0.len(), .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ConfigIssue>),
}

impl ConfigError {
    pub fn issues(&self) -> &[ConfigIssue] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub d_min_m: f64,
    pub contents: ContentPlan,
    pub pathloss: PathLossParams,
    pub n0_dbm_per_hz: f64,
    pub schemes: Vec<SchemeConfig>,
    pub coverage_area: AreaKind,
    pub count_area: AreaKind,
    pub resolution: usize,
    pub thresholds_db: Vec<f64>,
    pub summary_thresholds_db: Vec<f64>,
    pub count_threshold_db: f64,
    pub emit_sinr_maps: bool,
    pub sinr_map_range_db: (f64, f64),
    pub output_dir: PathBuf,
    /// Seeds the `oracle` subcommand's point draw; simulation runs are deterministic.
    pub seed: u64,
}

impl ExperimentConfig {
    /// Noise spectral density in W/Hz.
    pub fn n0_w_per_hz(&self) -> f64 {
        10f64.powf(self.n0_dbm_per_hz / 10.0) * 1e-3
    }
}

const REQUIRED: &[&str] = &[
    "grid.rows",
    "grid.cols",
    "grid.isd_m",
    "grid.lsa1_cols",
    "contents.count",
    "contents.bandwidth_hz",
    "contents.subcarriers",
    "contents.mod_order",
    "contents.t_sym_s",
    "contents.power_w",
    "propagation.model",
    "radio.n0_dbm_per_hz",
    "scheme",
    "evaluation.thresholds_db",
];

const KNOWN_SECTIONS: &[(&str, &[&str])] = &[
    (
        "grid",
        &[
            "rows",
            "cols",
            "isd_m",
            "lsa1_cols",
            "buffer_cols_per_side",
            "d_min_m",
        ],
    ),
    (
        "contents",
        &[
            "count",
            "bandwidth_hz",
            "subcarriers",
            "mod_order",
            "t_sym_s",
            "power_w",
            "power_lsa2_w",
        ],
    ),
    ("propagation", &["model", "eta", "f_mhz", "hb_m", "hm_m"]),
    ("radio", &["n0_dbm_per_hz"]),
    (
        "evaluation",
        &[
            "coverage_area",
            "count_area",
            "resolution",
            "thresholds_db",
            "summary_thresholds_db",
            "count_threshold_db",
            "emit_sinr_maps",
            "sinr_map_range_db",
        ],
    ),
    ("output", &["dir"]),
    ("run", &["seed"]),
];

const SCHEME_KEYS: &[&str] = &["name", "beta", "reallocation"];

struct Reader<'a> {
    root: &'a Table,
    issues: Vec<ConfigIssue>,
}

impl<'a> Reader<'a> {
    fn issue(&mut self, key: &str, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn lookup(&self, key: &str) -> Option<&'a Value> {
        let (section, name) = key.split_once('.')?;
        self.root.get(section)?.as_table()?.get(name)
    }

    fn float_of(&mut self, key: &str, v: &Value) -> Option<f64> {
        match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.issue(key, "expected a number");
                None
            }
        }
    }

    fn float(&mut self, key: &str, default: Option<f64>) -> Option<f64> {
        match self.lookup(key) {
            Some(v) => self.float_of(key, v),
            None => default,
        }
    }

    fn uint(&mut self, key: &str, default: Option<u64>) -> Option<u64> {
        match self.lookup(key) {
            Some(Value::Integer(i)) if *i >= 0 => Some(*i as u64),
            Some(_) => {
                self.issue(key, "expected a non-negative integer");
                None
            }
            None => default,
        }
    }

    fn string(&mut self, key: &str, default: Option<&str>) -> Option<String> {
        match self.lookup(key) {
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.issue(key, "expected a string");
                None
            }
            None => default.map(str::to_string),
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> Option<bool> {
        match self.lookup(key) {
            Some(Value::Boolean(b)) => Some(*b),
            Some(_) => {
                self.issue(key, "expected true or false");
                None
            }
            None => Some(default),
        }
    }

    fn floats(&mut self, key: &str, default: Option<Vec<f64>>) -> Option<Vec<f64>> {
        match self.lookup(key) {
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for (i, v) in items.iter().enumerate() {
                    out.push(self.float_of(&format!("{key}[{i}]"), v)?);
                }
                Some(out)
            }
            Some(_) => {
                self.issue(key, "expected an array of numbers");
                None
            }
            None => default,
        }
    }

    /// A per-content list, or a scalar applied to every content.
    fn per_content(&mut self, key: &str, count: Option<usize>) -> Option<Vec<f64>> {
        let v = self.lookup(key)?;
        match v {
            Value::Array(_) => {
                let vals = self.floats(key, None)?;
                if let Some(n) = count {
                    if vals.len() != n {
                        self.issue(
                            key,
                            format!("has {} entries, expected contents.count = {n}", vals.len()),
                        );
                        return None;
                    }
                }
                Some(vals)
            }
            _ => {
                let x = self.float_of(key, v)?;
                count.map(|n| vec![x; n])
            }
        }
    }

    fn area(&mut self, key: &str, default: AreaKind) -> Option<AreaKind> {
        match self.string(key, None).as_deref() {
            None => Some(default),
            Some("A1") => Some(AreaKind::A1),
            Some("A2") => Some(AreaKind::A2),
            Some(other) => {
                self.issue(key, format!("{other:?} is not one of \"A1\", \"A2\""));
                None
            }
        }
    }

    fn check_keys(&mut self) {
        for (section, value) in self.root {
            if section == "scheme" {
                continue;
            }
            let Some((_, known)) = KNOWN_SECTIONS.iter().find(|(s, _)| s == section) else {
                self.issue(section, "unknown section");
                continue;
            };
            let Some(table) = value.as_table() else {
                self.issue(section, "expected a [section]");
                continue;
            };
            for key in table.keys() {
                if !known.contains(&key.as_str()) {
                    self.issue(
                        &format!("{section}.{key}"),
                        format!("unknown key; accepted keys are {known:?}"),
                    );
                }
            }
        }
        for key in REQUIRED {
            let present = if *key == "scheme" {
                self.root.contains_key("scheme")
            } else {
                self.lookup(key).is_some()
            };
            if !present {
                self.issue(key, "required key is missing");
            }
        }
    }
}

fn range_issue(r: &mut Reader<'_>, key: &str, ok: bool, range: &str) {
    if !ok {
        r.issue(key, format!("out of range; accepted range is {range}"));
    }
}

fn parse_schemes(r: &mut Reader<'_>) -> Vec<SchemeConfig> {
    let registry = SchemeRegistry::default();
    let Some(value) = r.root.get("scheme") else {
        return Vec::new();
    };
    let Some(items) = value.as_array() else {
        r.issue("scheme", "expected one or more [[scheme]] tables");
        return Vec::new();
    };
    if items.is_empty() {
        r.issue("scheme", "at least one [[scheme]] is required");
    }
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let base = format!("scheme[{i}]");
        let Some(t) = item.as_table() else {
            r.issue(&base, "expected a table");
            continue;
        };
        for key in t.keys() {
            if !SCHEME_KEYS.contains(&key.as_str()) {
                r.issue(
                    &format!("{base}.{key}"),
                    format!("unknown key; accepted keys are {SCHEME_KEYS:?}"),
                );
            }
        }
        let name = match t.get("name") {
            Some(Value::String(s)) if registry.get(s).is_ok() => Some(s.clone()),
            Some(Value::String(s)) => {
                r.issue(
                    &format!("{base}.name"),
                    format!("{s:?} is not one of {:?}", registry.names()),
                );
                None
            }
            Some(_) => {
                r.issue(&format!("{base}.name"), "expected a string");
                None
            }
            None => {
                r.issue(&format!("{base}.name"), "required key is missing");
                None
            }
        };
        let beta = match t.get("beta") {
            None => Some(1.0),
            Some(v) => r.float_of(&format!("{base}.beta"), v),
        };
        if let Some(b) = beta {
            if check_beta(b).is_err() {
                r.issue(
                    &format!("{base}.beta"),
                    format!("{b} out of range; accepted range is 0 <= beta <= 1"),
                );
            }
        }
        let reallocation = match t.get("reallocation").map(|v| v.as_str()) {
            None | Some(Some("global")) => Some(BufferReallocation::Global),
            Some(Some("none")) => Some(BufferReallocation::None),
            Some(_) => {
                r.issue(
                    &format!("{base}.reallocation"),
                    "expected \"global\" or \"none\"",
                );
                None
            }
        };
        if let (Some(name), Some(beta), Some(reallocation)) = (name, beta, reallocation) {
            out.push(SchemeConfig {
                name,
                beta,
                reallocation,
            });
        }
    }
    out
}

/// Validates a parsed document into an [`ExperimentConfig`].
pub fn from_table(root: &Table) -> Result<ExperimentConfig, ConfigError> {
    let mut r = Reader {
        root,
        issues: Vec::new(),
    };
    r.check_keys();

    let rows = r.uint("grid.rows", None);
    let cols = r.uint("grid.cols", None);
    let isd = r.float("grid.isd_m", None);
    let lsa1_cols = r.uint("grid.lsa1_cols", None);
    let buffer = r.uint("grid.buffer_cols_per_side", Some(1));
    let d_min_m = r.float("grid.d_min_m", Some(DEFAULT_D_MIN_M));
    let grid = match (rows, cols, isd, lsa1_cols, buffer) {
        (Some(rows), Some(cols), Some(isd), Some(lsa1_cols), Some(b)) => {
            let spec = GridSpec {
                rows: rows as usize,
                cols: cols as usize,
                isd,
                lsa1_cols: lsa1_cols as usize,
                buffer_cols_per_side: b as usize,
            };
            if let Err(e) = spec.validate() {
                r.issue("grid", e.to_string());
            }
            Some(spec)
        }
        _ => None,
    };
    if let Some(d) = d_min_m {
        range_issue(
            &mut r,
            "grid.d_min_m",
            d.is_finite() && d > 0.0,
            "d_min_m > 0",
        );
    }

    let count = r.uint("contents.count", None).map(|c| c as usize);
    if let Some(c) = count {
        range_issue(&mut r, "contents.count", c >= 2, "count >= 2");
    }
    let bandwidth = r.per_content("contents.bandwidth_hz", count);
    let subcarriers = r.per_content("contents.subcarriers", count);
    let mod_order = r.per_content("contents.mod_order", count);
    let t_sym = r.float("contents.t_sym_s", None);
    let power = r.per_content("contents.power_w", count);
    let power2 = match r.lookup("contents.power_lsa2_w") {
        Some(_) => r.per_content("contents.power_lsa2_w", count),
        None => power.clone(),
    };
    let as_counts = |r: &mut Reader<'_>, key: &str, v: Option<Vec<f64>>| -> Option<Vec<u32>> {
        let v = v?;
        if v.iter()
            .all(|x| x.fract() == 0.0 && *x >= 0.0 && *x <= f64::from(u32::MAX))
        {
            Some(v.iter().map(|&x| x as u32).collect())
        } else {
            r.issue(key, "expected non-negative integers");
            None
        }
    };
    let subcarriers = as_counts(&mut r, "contents.subcarriers", subcarriers);
    let mod_order = as_counts(&mut r, "contents.mod_order", mod_order);
    let contents = match (bandwidth, subcarriers, mod_order, t_sym, power, power2) {
        (
            Some(bandwidth_hz),
            Some(subcarriers),
            Some(mod_order),
            Some(t_sym_s),
            Some(power_w),
            Some(power_lsa2_w),
        ) => {
            let plan = ContentPlan {
                bandwidth_hz,
                subcarriers,
                mod_order,
                t_sym_s,
                power_w,
                power_lsa2_w,
            };
            if let Err(e) = plan.validate() {
                r.issue("contents", e.to_string());
            }
            Some(plan)
        }
        _ => None,
    };

    let defaults = PathLossParams::default();
    let model = r.string("propagation.model", None);
    let eta = r.float("propagation.eta", Some(defaults.eta));
    let f_mhz = r.float("propagation.f_mhz", Some(defaults.f_mhz));
    let hb_m = r.float("propagation.hb_m", Some(defaults.hb_m));
    let hm_m = r.float("propagation.hm_m", Some(defaults.hm_m));
    let pathloss = match (model, eta, f_mhz, hb_m, hm_m) {
        (Some(model), Some(eta), Some(f_mhz), Some(hb_m), Some(hm_m)) => {
            let p = PathLossParams {
                model,
                eta,
                f_mhz,
                hb_m,
                hm_m,
            };
            if let Err(e) = PathLossRegistry::default().build(&p) {
                r.issue("propagation", e.to_string());
            }
            Some(p)
        }
        _ => None,
    };

    let n0 = r.float("radio.n0_dbm_per_hz", None);
    if let Some(n) = n0 {
        range_issue(
            &mut r,
            "radio.n0_dbm_per_hz",
            n.is_finite() && (-300.0..=0.0).contains(&n),
            "-300 <= n0_dbm_per_hz <= 0",
        );
    }

    let schemes = parse_schemes(&mut r);

    let coverage_area = r.area("evaluation.coverage_area", AreaKind::A1);
    let count_area = r.area("evaluation.count_area", AreaKind::A2);
    let resolution = r
        .uint("evaluation.resolution", Some(20))
        .map(|x| x as usize);
    if let Some(res) = resolution {
        range_issue(
            &mut r,
            "evaluation.resolution",
            (1..=1000).contains(&res),
            "1 <= resolution <= 1000",
        );
    }
    let thresholds = r.floats("evaluation.thresholds_db", None);
    if let Some(t) = &thresholds {
        range_issue(
            &mut r,
            "evaluation.thresholds_db",
            !t.is_empty() && t.iter().all(|x| x.is_finite()),
            "non-empty list of finite values",
        );
    }
    let summary = r.floats("evaluation.summary_thresholds_db", Some(vec![15.0, 20.0]));
    let count_threshold = r.float("evaluation.count_threshold_db", Some(15.0));
    let emit_sinr_maps = r.boolean("evaluation.emit_sinr_maps", false);
    let map_range = r.floats("evaluation.sinr_map_range_db", Some(vec![-10.0, 40.0]));
    let map_range = match map_range {
        Some(v) if v.len() == 2 && v[0] < v[1] => Some((v[0], v[1])),
        Some(_) => {
            r.issue(
                "evaluation.sinr_map_range_db",
                "expected [low, high] with low < high",
            );
            None
        }
        None => None,
    };
    let output_dir = r.string("output.dir", Some("out")).map(PathBuf::from);
    let seed = r.uint("run.seed", Some(0));

    if !r.issues.is_empty() {
        return Err(ConfigError::Invalid(r.issues));
    }
    // every Option is Some once no issue was recorded
    let missing = || ConfigError::Syntax("internal: incomplete config".into());
    Ok(ExperimentConfig {
        grid: grid.ok_or_else(missing)?,
        d_min_m: d_min_m.ok_or_else(missing)?,
        contents: contents.ok_or_else(missing)?,
        pathloss: pathloss.ok_or_else(missing)?,
        n0_dbm_per_hz: n0.ok_or_else(missing)?,
        schemes,
        coverage_area: coverage_area.ok_or_else(missing)?,
        count_area: count_area.ok_or_else(missing)?,
        resolution: resolution.ok_or_else(missing)?,
        thresholds_db: thresholds.ok_or_else(missing)?,
        summary_thresholds_db: summary.ok_or_else(missing)?,
        count_threshold_db: count_threshold.ok_or_else(missing)?,
        emit_sinr_maps: emit_sinr_maps.ok_or_else(missing)?,
        sinr_map_range_db: map_range.ok_or_else(missing)?,
        output_dir: output_dir.ok_or_else(missing)?,
        seed: seed.ok_or_else(missing)?,
    })
}

pub fn parse_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
    from_table(&root)
}

/// Reads a config file, or the config embedded in a run manifest (`.json`).
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if path.extension().is_some_and(|e| e == "json") {
        let manifest: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| ConfigError::Syntax(format!("manifest: {e}")))?;
        let cfg = manifest
            .get("config")
            .and_then(|c| c.as_str())
            .ok_or_else(|| ConfigError::Syntax("manifest has no \"config\" string".into()))?;
        return parse_str(cfg);
    }
    parse_str(&text)
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| Value::Float(x)).collect())
}

fn ints(v: &[u32]) -> Value {
    Value::Array(v.iter().map(|&x| Value::Integer(i64::from(x))).collect())
}

/// Serializes the fully resolved config, defaults included. Parsing the
/// result yields an equal config.
pub fn to_cfg_string(cfg: &ExperimentConfig) -> String {
    let mut root = Table::new();
    let mut section = |name: &str, entries: Vec<(&str, Value)>| {
        let t: Table = entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        root.insert(name.to_string(), Value::Table(t));
    };
    let g = &cfg.grid;
    section(
        "grid",
        vec![
            ("rows", Value::Integer(g.rows as i64)),
            ("cols", Value::Integer(g.cols as i64)),
            ("isd_m", Value::Float(g.isd)),
            ("lsa1_cols", Value::Integer(g.lsa1_cols as i64)),
            (
                "buffer_cols_per_side",
                Value::Integer(g.buffer_cols_per_side as i64),
            ),
            ("d_min_m", Value::Float(cfg.d_min_m)),
        ],
    );
    let c = &cfg.contents;
    section(
        "contents",
        vec![
            ("count", Value::Integer(c.m_count() as i64)),
            ("bandwidth_hz", floats(&c.bandwidth_hz)),
            ("subcarriers", ints(&c.subcarriers)),
            ("mod_order", ints(&c.mod_order)),
            ("t_sym_s", Value::Float(c.t_sym_s)),
            ("power_w", floats(&c.power_w)),
            ("power_lsa2_w", floats(&c.power_lsa2_w)),
        ],
    );
    let p = &cfg.pathloss;
    section(
        "propagation",
        vec![
            ("model", Value::String(p.model.clone())),
            ("eta", Value::Float(p.eta)),
            ("f_mhz", Value::Float(p.f_mhz)),
            ("hb_m", Value::Float(p.hb_m)),
            ("hm_m", Value::Float(p.hm_m)),
        ],
    );
    section(
        "radio",
        vec![("n0_dbm_per_hz", Value::Float(cfg.n0_dbm_per_hz))],
    );
    section(
        "evaluation",
        vec![
            (
                "coverage_area",
                Value::String(area_name(cfg.coverage_area).into()),
            ),
            (
                "count_area",
                Value::String(area_name(cfg.count_area).into()),
            ),
            ("resolution", Value::Integer(cfg.resolution as i64)),
            ("thresholds_db", floats(&cfg.thresholds_db)),
            ("summary_thresholds_db", floats(&cfg.summary_thresholds_db)),
            ("count_threshold_db", Value::Float(cfg.count_threshold_db)),
            ("emit_sinr_maps", Value::Boolean(cfg.emit_sinr_maps)),
            (
                "sinr_map_range_db",
                floats(&[cfg.sinr_map_range_db.0, cfg.sinr_map_range_db.1]),
            ),
        ],
    );
    section(
        "output",
        vec![(
            "dir",
            Value::String(cfg.output_dir.to_string_lossy().into_owned()),
        )],
    );
    section("run", vec![("seed", Value::Integer(cfg.seed as i64))]);
    let schemes = cfg
        .schemes
        .iter()
        .map(|s| {
            let mut t = Table::new();
            t.insert("name".into(), Value::String(s.name.clone()));
            t.insert("beta".into(), Value::Float(s.beta));
            let realloc = match s.reallocation {
                BufferReallocation::Global => "global",
                BufferReallocation::None => "none",
            };
            t.insert("reallocation".into(), Value::String(realloc.into()));
            Value::Table(t)
        })
        .collect();
    root.insert("scheme".into(), Value::Array(schemes));
    toml::to_string(&root).expect("config tables always serialize")
}
