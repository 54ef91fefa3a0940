//! Coverage fractions, content-count maps and spectral efficiency.

use num_rational::Ratio;
use serde::Serialize;

use crate::allocation::{
    AllocationStrategy, ContentPlan, SchemeConfig, SchemeRegistry, GLOBAL_CONTENT,
};
use crate::error::{LsiError, Result};
use crate::grid::{Grid, Lsa};
use crate::sinr::SinrField;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub scheme: String,
    pub content: usize,
    pub thresholds_db: Vec<f64>,
    /// Fraction of samples with SINR >= threshold, per threshold.
    pub covered_fraction: Vec<f64>,
}

/// Fraction of samples meeting each threshold. Ties count as covered.
pub fn coverage(scheme: &str, field: &SinrField, thresholds_db: &[f64]) -> Result<CoverageReport> {
    if field.is_empty() {
        return Err(LsiError::Argument("coverage of an empty field".into()));
    }
    let n = field.len() as f64;
    let covered_fraction = thresholds_db
        .iter()
        .map(|&t| field.values_db.iter().filter(|&&v| v >= t).count() as f64 / n)
        .collect();
    Ok(CoverageReport {
        scheme: scheme.to_string(),
        content: field.content,
        thresholds_db: thresholds_db.to_vec(),
        covered_fraction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContentCountMap {
    pub threshold_db: f64,
    pub m_count: usize,
    pub nx: usize,
    pub ny: usize,
    /// Decodable contents per sample point.
    pub counts: Vec<u8>,
    /// Area fraction with exactly `k` decodable contents, `k = 0..=M`.
    pub histogram: Vec<f64>,
}

impl ContentCountMap {
    /// Area fraction with at least `k` decodable contents.
    pub fn at_least(&self, k: usize) -> f64 {
        let hits = self.counts.iter().filter(|&&c| usize::from(c) >= k).count();
        hits as f64 / self.counts.len() as f64
    }
}

/// Per-point count of contents whose SINR clears `threshold_db`.
pub fn content_count_map(fields: &[SinrField], threshold_db: f64) -> Result<ContentCountMap> {
    let first = fields
        .first()
        .ok_or_else(|| LsiError::Argument("no fields given".into()))?;
    if first.is_empty() {
        return Err(LsiError::Argument(
            "content-count map of an empty field".into(),
        ));
    }
    if let Some(bad) = fields.iter().find(|f| !f.same_sampling(first)) {
        return Err(LsiError::Argument(format!(
            "field of content {} is sampled differently from content {}",
            bad.content, first.content
        )));
    }
    if fields.len() > u8::MAX as usize {
        return Err(LsiError::Argument(
            "too many contents for a count map".into(),
        ));
    }
    let counts: Vec<u8> = (0..first.len())
        .map(|i| {
            fields
                .iter()
                .filter(|f| f.values_db[i] >= threshold_db)
                .count() as u8
        })
        .collect();
    let mut bins = vec![0usize; fields.len() + 1];
    for &c in &counts {
        bins[usize::from(c)] += 1;
    }
    let n = counts.len() as f64;
    Ok(ContentCountMap {
        threshold_db,
        m_count: fields.len(),
        nx: first.nx,
        ny: first.ny,
        counts,
        histogram: bins.iter().map(|&b| b as f64 / n).collect(),
    })
}

/// Spectral efficiency of one scheme, with the per-content LSA1 cell
/// fractions it was weighted by.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEfficiency {
    pub bits_per_s_per_hz: f64,
    pub cell_fractions: Vec<Ratio<i64>>,
}

/// Weighted peak bit rate over total bandwidth. Cell fractions are counted
/// from an allocated plan and checked against the scheme's closed form.
pub fn spectral_efficiency(
    strategy: &dyn AllocationStrategy,
    grid: &Grid,
    plan: &ContentPlan,
) -> Result<SpectralEfficiency> {
    plan.validate()?;
    let tp = strategy.allocate(grid, plan, &SchemeConfig::new(strategy.name(), 1.0))?;
    let all = tp.active_cells(grid, Lsa::Lsa1, GLOBAL_CONTENT) as i64;
    if all == 0 {
        return Err(LsiError::Consistency(
            "global content carried by no LSA1 cell".into(),
        ));
    }
    let counted: Vec<Ratio<i64>> = (1..=plan.m_count())
        .map(|m| Ratio::new(tp.active_cells(grid, Lsa::Lsa1, m) as i64, all))
        .collect();
    let closed = strategy.lsa1_cell_fractions(grid, plan);
    if counted != closed {
        return Err(LsiError::Consistency(format!(
            "{}: cell fractions from plan {counted:?} differ from closed form {closed:?}",
            strategy.name()
        )));
    }
    let total_bw: f64 = plan.bandwidth_hz.iter().sum();
    let rate: f64 = counted
        .iter()
        .enumerate()
        .map(|(i, w)| {
            ratio_to_f64(*w) * f64::from(plan.subcarriers[i]) * f64::from(plan.mod_order[i]).log2()
                / plan.t_sym_s
        })
        .sum();
    Ok(SpectralEfficiency {
        bits_per_s_per_hz: rate / total_bw,
        cell_fractions: counted,
    })
}

pub fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// A ratio of two efficiencies, with its exact rational value when every
/// modulation order is a power of two.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeRatio {
    pub value: f64,
    #[serde(serialize_with = "ser_ratio")]
    pub exact: Option<Ratio<i64>>,
}

fn ser_ratio<S: serde::Serializer>(
    r: &Option<Ratio<i64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeReport {
    pub xi_olsi: f64,
    pub xi_ps: f64,
    pub xi_imo: f64,
    pub olsi_over_ps: SeRatio,
    pub olsi_over_imo: SeRatio,
    pub ps_over_imo: SeRatio,
}

// sum of w_m * |S_m| * log2(mu_m); T_sym and total bandwidth cancel in ratios
fn exact_rate(weights: &[Ratio<i64>], plan: &ContentPlan) -> Option<Ratio<i64>> {
    weights
        .iter()
        .enumerate()
        .try_fold(Ratio::from_integer(0), |acc, (i, w)| {
            let mu = plan.mod_order[i];
            mu.is_power_of_two()
                .then(|| acc + *w * i64::from(plan.subcarriers[i]) * i64::from(mu.trailing_zeros()))
        })
}

fn se_ratio(a: &SpectralEfficiency, b: &SpectralEfficiency, plan: &ContentPlan) -> SeRatio {
    let exact = match (
        exact_rate(&a.cell_fractions, plan),
        exact_rate(&b.cell_fractions, plan),
    ) {
        (Some(x), Some(y)) if *y.numer() != 0 => Some(x / y),
        _ => None,
    };
    SeRatio {
        value: a.bits_per_s_per_hz / b.bits_per_s_per_hz,
        exact,
    }
}

impl SeReport {
    pub fn compute(registry: &SchemeRegistry, grid: &Grid, plan: &ContentPlan) -> Result<Self> {
        let olsi = spectral_efficiency(registry.get("olsi")?, grid, plan)?;
        let ps = spectral_efficiency(registry.get("ps")?, grid, plan)?;
        let imo = spectral_efficiency(registry.get("imo")?, grid, plan)?;
        Ok(Self {
            xi_olsi: olsi.bits_per_s_per_hz,
            xi_ps: ps.bits_per_s_per_hz,
            xi_imo: imo.bits_per_s_per_hz,
            olsi_over_ps: se_ratio(&olsi, &ps, plan),
            olsi_over_imo: se_ratio(&olsi, &imo, plan),
            ps_over_imo: se_ratio(&ps, &imo, plan),
        })
    }
}

/// O-LSI to power-scaling efficiency ratio for `m_count` contents of equal
/// bandwidth and modulation: `(1 + ceil((M-1)/2)) / M`, which is
/// `(1 + (M-1)/2) / M` for odd `M`.
pub fn se_ratio_general(m_count: usize) -> Result<Ratio<i64>> {
    if m_count < 2 {
        return Err(LsiError::Argument(format!("M = {m_count} violates M >= 2")));
    }
    let m = m_count as i64;
    Ok(Ratio::new(1 + m / 2, m))
}
