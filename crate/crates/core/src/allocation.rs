//! Frequency and power plans for each insertion scheme.
//!
//! A [`TransmitPlan`] records, for every cell and content, whether the cell
//! transmits the content and at what power. The active entries of a plan
//! are the signal/interference cell sets the SINR engine sums over.
//! Schemes implement [`AllocationStrategy`] and are looked up by name in a
//! [`SchemeRegistry`].

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, LsiError, Result};
use crate::grid::{Grid, Lsa, Zone};

/// Contents are numbered from 1; content 1 is the global content.
pub const GLOBAL_CONTENT: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentPlan {
    /// `B_m` per content, Hz.
    pub bandwidth_hz: Vec<f64>,
    /// Subcarrier-set size per content.
    pub subcarriers: Vec<u32>,
    /// Constellation size per content.
    pub mod_order: Vec<u32>,
    /// OFDM symbol duration, seconds.
    pub t_sym_s: f64,
    /// LSA1 base power per content, W.
    pub power_w: Vec<f64>,
    /// LSA2 base power per content, W.
    pub power_lsa2_w: Vec<f64>,
}

impl ContentPlan {
    /// `m_count` contents with identical bandwidth, subcarriers, modulation
    /// and power in both LSAs.
    pub fn uniform(
        m_count: usize,
        bandwidth_hz: f64,
        subcarriers: u32,
        mod_order: u32,
        t_sym_s: f64,
        power_w: f64,
    ) -> Self {
        Self {
            bandwidth_hz: vec![bandwidth_hz; m_count],
            subcarriers: vec![subcarriers; m_count],
            mod_order: vec![mod_order; m_count],
            t_sym_s,
            power_w: vec![power_w; m_count],
            power_lsa2_w: vec![power_w; m_count],
        }
    }

    pub fn m_count(&self) -> usize {
        self.power_w.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m_count();
        if m < 2 {
            return Err(config_err(format!("contents.count = {m} violates M >= 2")));
        }
        let lens = [
            ("bandwidth_hz", self.bandwidth_hz.len()),
            ("subcarriers", self.subcarriers.len()),
            ("mod_order", self.mod_order.len()),
            ("power_lsa2_w", self.power_lsa2_w.len()),
        ];
        for (key, len) in lens {
            if len != m {
                return Err(config_err(format!(
                    "contents.{key} has {len} entries, expected {m}"
                )));
            }
        }
        for (i, b) in self.bandwidth_hz.iter().enumerate() {
            if !(b.is_finite() && *b > 0.0) {
                return Err(config_err(format!(
                    "contents.bandwidth_hz[{}] = {b} violates B_m > 0",
                    i + 1
                )));
            }
        }
        if let Some(i) = self.subcarriers.iter().position(|&s| s == 0) {
            return Err(config_err(format!(
                "contents.subcarriers[{}] must be >= 1",
                i + 1
            )));
        }
        if let Some(i) = self.mod_order.iter().position(|&q| q < 2) {
            return Err(config_err(format!(
                "contents.mod_order[{}] must be >= 2",
                i + 1
            )));
        }
        if !(self.t_sym_s.is_finite() && self.t_sym_s > 0.0) {
            return Err(config_err(format!(
                "contents.t_sym_s = {} violates T_sym > 0",
                self.t_sym_s
            )));
        }
        for (key, powers) in [
            ("power_w", &self.power_w),
            ("power_lsa2_w", &self.power_lsa2_w),
        ] {
            if let Some(i) = powers.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(config_err(format!(
                    "contents.{key}[{}] must be finite and >= 0",
                    i + 1
                )));
            }
        }
        if self.power_w[0] != self.power_lsa2_w[0] {
            return Err(config_err(
                "global content power must be equal in both LSAs (power_w[1] == power_lsa2_w[1])",
            ));
        }
        for lsa in [Lsa::Lsa1, Lsa::Lsa2] {
            if self.total_power(lsa) <= 0.0 {
                return Err(config_err("total transmit power P_t must be > 0"));
            }
        }
        Ok(())
    }

    /// Base power `S_m` (LSA1) or `S'_m` (LSA2).
    pub fn base_power(&self, lsa: Lsa, m: usize) -> f64 {
        match lsa {
            Lsa::Lsa1 => self.power_w[m - 1],
            Lsa::Lsa2 => self.power_lsa2_w[m - 1],
        }
    }

    /// `P_t` of a cell in `lsa`.
    pub fn total_power(&self, lsa: Lsa) -> f64 {
        match lsa {
            Lsa::Lsa1 => self.power_w.iter().sum(),
            Lsa::Lsa2 => self.power_lsa2_w.iter().sum(),
        }
    }

    pub fn check_content(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.m_count() {
            return Err(LsiError::Argument(format!(
                "content {m} not in 1..={}",
                self.m_count()
            )));
        }
        Ok(())
    }
}

/// LSA whose half of the local contents includes `m` when local contents
/// are split between the two LSAs: LSA1 takes `2..=ceil((M+1)/2)`.
pub fn split_home(m: usize, m_count: usize) -> Lsa {
    if m <= (m_count + 2) / 2 {
        Lsa::Lsa1
    } else {
        Lsa::Lsa2
    }
}

/// Where power freed in buffer cells goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BufferReallocation {
    /// Added to the buffer cell's global content.
    #[default]
    Global,
    /// Left unused.
    None,
}

/// A scheme selection: registry name plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub name: String,
    pub beta: f64,
    #[serde(default)]
    pub reallocation: BufferReallocation,
}

impl SchemeConfig {
    pub fn new(name: impl Into<String>, beta: f64) -> Self {
        Self {
            name: name.into(),
            beta,
            reallocation: BufferReallocation::Global,
        }
    }

    /// Stable identifier, e.g. `ps_b0.25`.
    pub fn id(&self, uses_beta: bool) -> String {
        if uses_beta {
            format!("{}_b{}", self.name, self.beta)
        } else {
            self.name.clone()
        }
    }
}

pub fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(config_err(format!(
            "beta = {beta} outside accepted range 0 <= beta <= 1"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Entry {
    pub power_w: f64,
    pub active: bool,
}

impl Entry {
    pub const OFF: Entry = Entry {
        power_w: 0.0,
        active: false,
    };

    pub fn on(power_w: f64) -> Self {
        Self {
            power_w,
            active: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmitPlan {
    scheme: SchemeConfig,
    m_count: usize,
    // cell-major: entries[cell * m_count + (m - 1)]
    entries: Vec<Entry>,
}

impl TransmitPlan {
    fn new(scheme: SchemeConfig, cells: usize, m_count: usize) -> Self {
        Self {
            scheme,
            m_count,
            entries: vec![Entry::OFF; cells * m_count],
        }
    }

    pub fn scheme(&self) -> &SchemeConfig {
        &self.scheme
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn cell_count(&self) -> usize {
        self.entries.len() / self.m_count
    }

    pub fn entry(&self, cell: usize, m: usize) -> Entry {
        self.entries[cell * self.m_count + m - 1]
    }

    pub fn set(&mut self, cell: usize, m: usize, entry: Entry) {
        self.entries[cell * self.m_count + m - 1] = entry;
    }

    pub fn cell_entries(&self, cell: usize) -> &[Entry] {
        &self.entries[cell * self.m_count..(cell + 1) * self.m_count]
    }

    /// Number of cells of `lsa` with content `m` active.
    pub fn active_cells(&self, grid: &Grid, lsa: Lsa, m: usize) -> usize {
        grid.cells_in(lsa)
            .filter(|c| self.entry(c.index, m).active)
            .count()
    }
}

/// Per-cell total transmit power.
pub fn total_power_check(tp: &TransmitPlan) -> Vec<f64> {
    (0..tp.cell_count())
        .map(|c| tp.cell_entries(c).iter().map(|e| e.power_w).sum())
        .collect()
}

/// Reuse-1 everywhere at base powers; no buffer treatment.
pub fn allocate_reuse1(grid: &Grid, plan: &ContentPlan) -> Result<TransmitPlan> {
    plan.validate()?;
    let m_count = plan.m_count();
    let mut tp = TransmitPlan::new(SchemeConfig::new("reuse1", 1.0), grid.len(), m_count);
    for cell in grid.cells() {
        for m in 1..=m_count {
            tp.set(cell.index, m, Entry::on(plan.base_power(cell.lsa, m)));
        }
    }
    Ok(tp)
}

/// Orthogonal insertion: each LSA carries only its half of the local
/// contents, in every one of its cells, at base power.
pub fn allocate_olsi(grid: &Grid, plan: &ContentPlan) -> Result<TransmitPlan> {
    plan.validate()?;
    let m_count = plan.m_count();
    let mut tp = TransmitPlan::new(SchemeConfig::new("olsi", 1.0), grid.len(), m_count);
    for cell in grid.cells() {
        tp.set(
            cell.index,
            GLOBAL_CONTENT,
            Entry::on(plan.base_power(cell.lsa, GLOBAL_CONTENT)),
        );
        for m in 2..=m_count {
            if split_home(m, m_count) == cell.lsa {
                tp.set(cell.index, m, Entry::on(plan.base_power(cell.lsa, m)));
            }
        }
    }
    Ok(tp)
}

/// Power scaling: reuse-1 for all contents, buffer local powers scaled by
/// `beta` and the freed power moved to the buffer global content.
pub fn allocate_ps(grid: &Grid, plan: &ContentPlan, beta: f64) -> Result<TransmitPlan> {
    plan.validate()?;
    check_beta(beta)?;
    let m_count = plan.m_count();
    let mut tp = TransmitPlan::new(SchemeConfig::new("ps", beta), grid.len(), m_count);
    for cell in grid.cells() {
        let lsa = cell.lsa;
        if cell.zone.is_buffer() {
            // S_1 + sum (1 - beta) S_m == P_t - sum beta S_m, and is exactly S_1 at beta = 1
            let mut global = plan.base_power(lsa, GLOBAL_CONTENT);
            for m in 2..=m_count {
                let s = plan.base_power(lsa, m);
                global += (1.0 - beta) * s;
                tp.set(cell.index, m, Entry::on(beta * s));
            }
            tp.set(cell.index, GLOBAL_CONTENT, Entry::on(global));
        } else {
            for m in 1..=m_count {
                tp.set(cell.index, m, Entry::on(plan.base_power(lsa, m)));
            }
        }
    }
    Ok(tp)
}

/// Buffer orthogonality: reuse-1 outside the buffer; inside, the left
/// buffer carries only LSA1's half of the local contents and the right
/// buffer only the complementary half, each at `beta` times base power.
pub fn allocate_imo(
    grid: &Grid,
    plan: &ContentPlan,
    beta: f64,
    reallocation: BufferReallocation,
) -> Result<TransmitPlan> {
    plan.validate()?;
    check_beta(beta)?;
    let m_count = plan.m_count();
    let scheme = SchemeConfig {
        name: "imo".into(),
        beta,
        reallocation,
    };
    let mut tp = TransmitPlan::new(scheme, grid.len(), m_count);
    for cell in grid.cells() {
        let lsa = cell.lsa;
        let carrier = match cell.zone {
            Zone::SfnInterior => None,
            Zone::LeftBuffer => Some(Lsa::Lsa1),
            Zone::RightBuffer => Some(Lsa::Lsa2),
        };
        let Some(carrier) = carrier else {
            for m in 1..=m_count {
                tp.set(cell.index, m, Entry::on(plan.base_power(lsa, m)));
            }
            continue;
        };
        let mut freed = 0.0;
        for m in 2..=m_count {
            let s = plan.base_power(lsa, m);
            if split_home(m, m_count) == carrier {
                freed += (1.0 - beta) * s;
                tp.set(cell.index, m, Entry::on(beta * s));
            } else {
                freed += s;
            }
        }
        let mut global = plan.base_power(lsa, GLOBAL_CONTENT);
        if reallocation == BufferReallocation::Global {
            global += freed;
        }
        tp.set(cell.index, GLOBAL_CONTENT, Entry::on(global));
    }
    Ok(tp)
}

/// One interchangeable insertion scheme.
pub trait AllocationStrategy: Send + Sync {
    /// Registry key.
    fn name(&self) -> &'static str;

    /// Human-readable label.
    fn label(&self) -> &'static str;

    /// Whether `beta` affects the plan.
    fn uses_beta(&self) -> bool;

    fn allocate(
        &self,
        grid: &Grid,
        plan: &ContentPlan,
        scheme: &SchemeConfig,
    ) -> Result<TransmitPlan>;

    /// Closed-form fraction of LSA1 cells transmitting each content
    /// (index 0 is content 1), used to cross-check counts from a plan.
    fn lsa1_cell_fractions(&self, grid: &Grid, plan: &ContentPlan) -> Vec<Ratio<i64>>;
}

fn all_ones(plan: &ContentPlan) -> Vec<Ratio<i64>> {
    vec![Ratio::from_integer(1); plan.m_count()]
}

pub struct Reuse1;
pub struct Olsi;
pub struct PowerScaling;
pub struct BufferOrthogonal;

impl AllocationStrategy for Reuse1 {
    fn name(&self) -> &'static str {
        "reuse1"
    }
    fn label(&self) -> &'static str {
        "Pure reuse-1"
    }
    fn uses_beta(&self) -> bool {
        false
    }
    fn allocate(&self, grid: &Grid, plan: &ContentPlan, _: &SchemeConfig) -> Result<TransmitPlan> {
        allocate_reuse1(grid, plan)
    }
    fn lsa1_cell_fractions(&self, _: &Grid, plan: &ContentPlan) -> Vec<Ratio<i64>> {
        all_ones(plan)
    }
}

impl AllocationStrategy for Olsi {
    fn name(&self) -> &'static str {
        "olsi"
    }
    fn label(&self) -> &'static str {
        "O-LSI"
    }
    fn uses_beta(&self) -> bool {
        false
    }
    fn allocate(&self, grid: &Grid, plan: &ContentPlan, _: &SchemeConfig) -> Result<TransmitPlan> {
        allocate_olsi(grid, plan)
    }
    fn lsa1_cell_fractions(&self, _: &Grid, plan: &ContentPlan) -> Vec<Ratio<i64>> {
        let m_count = plan.m_count();
        (1..=m_count)
            .map(|m| {
                let carried = m == GLOBAL_CONTENT || split_home(m, m_count) == Lsa::Lsa1;
                Ratio::from_integer(i64::from(carried))
            })
            .collect()
    }
}

impl AllocationStrategy for PowerScaling {
    fn name(&self) -> &'static str {
        "ps"
    }
    fn label(&self) -> &'static str {
        "IM-LSI-PS"
    }
    fn uses_beta(&self) -> bool {
        true
    }
    fn allocate(
        &self,
        grid: &Grid,
        plan: &ContentPlan,
        scheme: &SchemeConfig,
    ) -> Result<TransmitPlan> {
        allocate_ps(grid, plan, scheme.beta)
    }
    fn lsa1_cell_fractions(&self, _: &Grid, plan: &ContentPlan) -> Vec<Ratio<i64>> {
        all_ones(plan)
    }
}

impl AllocationStrategy for BufferOrthogonal {
    fn name(&self) -> &'static str {
        "imo"
    }
    fn label(&self) -> &'static str {
        "IM-LSI-O"
    }
    fn uses_beta(&self) -> bool {
        true
    }
    fn allocate(
        &self,
        grid: &Grid,
        plan: &ContentPlan,
        scheme: &SchemeConfig,
    ) -> Result<TransmitPlan> {
        allocate_imo(grid, plan, scheme.beta, scheme.reallocation)
    }
    fn lsa1_cell_fractions(&self, grid: &Grid, plan: &ContentPlan) -> Vec<Ratio<i64>> {
        let m_count = plan.m_count();
        let total = grid.count_in(Lsa::Lsa1) as i64;
        let interior = total - grid.count_zone(Zone::LeftBuffer) as i64;
        (1..=m_count)
            .map(|m| {
                if m == GLOBAL_CONTENT || split_home(m, m_count) == Lsa::Lsa1 {
                    Ratio::from_integer(1)
                } else {
                    Ratio::new(interior, total)
                }
            })
            .collect()
    }
}

/// Name-keyed set of insertion schemes.
pub struct SchemeRegistry {
    schemes: BTreeMap<&'static str, Box<dyn AllocationStrategy>>,
}

impl SchemeRegistry {
    pub fn empty() -> Self {
        Self {
            schemes: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, scheme: Box<dyn AllocationStrategy>) {
        self.schemes.insert(scheme.name(), scheme);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.schemes.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn AllocationStrategy> {
        self.schemes
            .get(name)
            .map(|s| s.as_ref())
            .ok_or_else(|| config_err(format!("scheme {name:?} is not one of {:?}", self.names())))
    }

    pub fn allocate(
        &self,
        grid: &Grid,
        plan: &ContentPlan,
        scheme: &SchemeConfig,
    ) -> Result<TransmitPlan> {
        let strategy = self.get(&scheme.name)?;
        let mut tp = strategy.allocate(grid, plan, scheme)?;
        tp.scheme = scheme.clone();
        Ok(tp)
    }
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(Reuse1));
        reg.register(Box::new(Olsi));
        reg.register(Box::new(PowerScaling));
        reg.register(Box::new(BufferOrthogonal));
        reg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use proptest::prelude::*;

    fn default_grid() -> Grid {
        Grid::new(GridSpec::default()).unwrap()
    }

    fn unit_plan(m: usize) -> ContentPlan {
        ContentPlan::uniform(m, 1e6, 100, 4, 1e-4, 1.0)
    }

    fn cells_with(grid: &Grid, tp: &TransmitPlan, m: usize) -> (usize, usize) {
        (
            tp.active_cells(grid, Lsa::Lsa1, m),
            tp.active_cells(grid, Lsa::Lsa2, m),
        )
    }

    #[test]
    fn olsi_m3_split() {
        let g = default_grid();
        let tp = allocate_olsi(&g, &unit_plan(3)).unwrap();
        assert_eq!(cells_with(&g, &tp, 1), (40, 40));
        assert_eq!(cells_with(&g, &tp, 2), (40, 0));
        assert_eq!(cells_with(&g, &tp, 3), (0, 40));
    }

    #[test]
    fn olsi_m2_and_m5() {
        let g = default_grid();
        let tp = allocate_olsi(&g, &unit_plan(2)).unwrap();
        assert_eq!(cells_with(&g, &tp, 2), (40, 0));
        let tp = allocate_olsi(&g, &unit_plan(5)).unwrap();
        for m in [2, 3] {
            assert_eq!(cells_with(&g, &tp, m), (40, 0));
        }
        for m in [4, 5] {
            assert_eq!(cells_with(&g, &tp, m), (0, 40));
        }
    }

    #[test]
    fn olsi_does_not_reallocate() {
        let g = default_grid();
        let tp = allocate_olsi(&g, &unit_plan(3)).unwrap();
        for total in total_power_check(&tp) {
            assert!((total - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ps_beta_one_is_reuse1() {
        let g = default_grid();
        let mut plan = unit_plan(4);
        plan.power_w = vec![1.3, 0.7, 0.1, 2.9];
        plan.power_lsa2_w = vec![1.3, 0.2, 0.9, 1.7];
        let ps = allocate_ps(&g, &plan, 1.0).unwrap();
        let r1 = allocate_reuse1(&g, &plan).unwrap();
        for c in 0..g.len() {
            assert_eq!(ps.cell_entries(c), r1.cell_entries(c));
        }
    }

    #[test]
    fn ps_beta_zero_moves_everything_to_global() {
        let g = default_grid();
        let tp = allocate_ps(&g, &unit_plan(3), 0.0).unwrap();
        for cell in g.cells().iter().filter(|c| c.zone.is_buffer()) {
            assert_eq!(tp.entry(cell.index, 2).power_w, 0.0);
            assert_eq!(tp.entry(cell.index, 3).power_w, 0.0);
            assert_eq!(tp.entry(cell.index, 1).power_w, 3.0);
        }
    }

    #[test]
    fn ps_quarter_beta_arithmetic() {
        let g = default_grid();
        let tp = allocate_ps(&g, &unit_plan(3), 0.25).unwrap();
        for cell in g.cells() {
            let e = tp.cell_entries(cell.index);
            if cell.zone.is_buffer() {
                assert_eq!(
                    [e[0].power_w, e[1].power_w, e[2].power_w],
                    [2.5, 0.25, 0.25]
                );
            } else {
                assert_eq!([e[0].power_w, e[1].power_w, e[2].power_w], [1.0, 1.0, 1.0]);
            }
        }
    }

    #[test]
    fn imo_m3_complementary_buffers() {
        let g = default_grid();
        let tp = allocate_imo(&g, &unit_plan(3), 1.0, BufferReallocation::Global).unwrap();
        for cell in g.cells() {
            let e = tp.cell_entries(cell.index);
            match cell.zone {
                Zone::LeftBuffer => {
                    assert!(e[1].active && !e[2].active);
                    assert_eq!(e[0].power_w, 2.0);
                }
                Zone::RightBuffer => {
                    assert!(!e[1].active && e[2].active);
                    assert_eq!(e[0].power_w, 2.0);
                }
                Zone::SfnInterior => assert!(e.iter().all(|x| x.active && x.power_w == 1.0)),
            }
        }
        for total in total_power_check(&tp) {
            assert!((total - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn imo_half_beta_and_no_reallocation() {
        let g = default_grid();
        let tp = allocate_imo(&g, &unit_plan(3), 0.5, BufferReallocation::Global).unwrap();
        let lb = g
            .cells()
            .iter()
            .find(|c| c.zone == Zone::LeftBuffer)
            .unwrap();
        assert_eq!(tp.entry(lb.index, 2).power_w, 0.5);
        assert_eq!(tp.entry(lb.index, 1).power_w, 2.5);
        let tp = allocate_imo(&g, &unit_plan(3), 0.5, BufferReallocation::None).unwrap();
        assert_eq!(tp.entry(lb.index, 1).power_w, 1.0);
    }

    #[test]
    fn imo_m2_one_sided() {
        let g = default_grid();
        let tp = allocate_imo(&g, &unit_plan(2), 1.0, BufferReallocation::Global).unwrap();
        for cell in g.cells() {
            match cell.zone {
                Zone::LeftBuffer => assert!(tp.entry(cell.index, 2).active),
                Zone::RightBuffer => {
                    assert!(!tp.entry(cell.index, 2).active);
                    assert_eq!(tp.entry(cell.index, 1).power_w, 2.0);
                }
                Zone::SfnInterior => {}
            }
        }
    }

    #[test]
    fn beta_range_enforced() {
        let g = default_grid();
        let err = allocate_ps(&g, &unit_plan(3), 1.5).unwrap_err().to_string();
        assert!(err.contains("0 <= beta <= 1"));
        assert!(allocate_imo(&g, &unit_plan(3), -0.1, BufferReallocation::Global).is_err());
    }

    #[test]
    fn plan_validation() {
        let mut p = unit_plan(3);
        p.power_lsa2_w[0] = 2.0;
        assert!(p.validate().is_err());
        let mut p = unit_plan(3);
        p.bandwidth_hz[1] = 0.0;
        assert!(p
            .validate()
            .unwrap_err()
            .to_string()
            .contains("bandwidth_hz[2]"));
        assert!(unit_plan(1).validate().is_err());
    }

    #[test]
    fn registry_lookup() {
        let reg = SchemeRegistry::default();
        assert_eq!(reg.names(), vec!["imo", "olsi", "ps", "reuse1"]);
        assert!(reg.get("ldm").is_err());
        let g = default_grid();
        let tp = reg
            .allocate(&g, &unit_plan(3), &SchemeConfig::new("ps", 0.5))
            .unwrap();
        assert_eq!(tp.scheme().beta, 0.5);
    }

    #[test]
    fn closed_form_fractions_match_counts() {
        let reg = SchemeRegistry::default();
        for spec in [
            GridSpec::default(),
            GridSpec {
                rows: 3,
                cols: 7,
                isd: 500.0,
                lsa1_cols: 3,
                buffer_cols_per_side: 2,
            },
        ] {
            let g = Grid::new(spec).unwrap();
            for m_count in 2..=6 {
                let plan = unit_plan(m_count);
                for name in reg.names() {
                    let s = reg.get(name).unwrap();
                    let tp = reg
                        .allocate(&g, &plan, &SchemeConfig::new(name, 0.3))
                        .unwrap();
                    let total = tp.active_cells(&g, Lsa::Lsa1, 1) as i64;
                    let counted: Vec<_> = (1..=m_count)
                        .map(|m| Ratio::new(tp.active_cells(&g, Lsa::Lsa1, m) as i64, total))
                        .collect();
                    assert_eq!(
                        counted,
                        s.lsa1_cell_fractions(&g, &plan),
                        "{name} M={m_count}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn plan_invariants(
            m_count in 2usize..6,
            beta in 0.0f64..=1.0,
            powers in proptest::collection::vec(0.01f64..10.0, 6),
            lsa1_cols in 1usize..4,
            buf in 1usize..3,
        ) {
            let cols = lsa1_cols + 3;
            let spec = GridSpec { rows: 2, cols, isd: 100.0, lsa1_cols, buffer_cols_per_side: buf.min(lsa1_cols) };
            let g = Grid::new(spec).unwrap();
            let mut plan = unit_plan(m_count);
            plan.power_w = powers[..m_count].to_vec();
            plan.power_lsa2_w = powers[..m_count].iter().rev().copied().collect();
            plan.power_lsa2_w[0] = plan.power_w[0];
            let reg = SchemeRegistry::default();
            for name in reg.names() {
                let tp = reg.allocate(&g, &plan, &SchemeConfig::new(name, beta)).unwrap();
                let totals = total_power_check(&tp);
                for cell in g.cells() {
                    prop_assert!(tp.entry(cell.index, GLOBAL_CONTENT).active);
                    for e in tp.cell_entries(cell.index) {
                        prop_assert!(e.power_w >= 0.0);
                        prop_assert!(e.active || e.power_w == 0.0);
                    }
                    let pt = plan.total_power(cell.lsa);
                    prop_assert!(totals[cell.index] <= pt + 1e-9);
                    if name == "ps" && cell.zone.is_buffer() {
                        prop_assert!((totals[cell.index] - pt).abs() <= 1e-9);
                    }
                }
                if name == "imo" {
                    for m in 2..=m_count {
                        let lb = g.cells().iter().any(|c| c.zone == Zone::LeftBuffer && tp.entry(c.index, m).active);
                        let rb = g.cells().iter().any(|c| c.zone == Zone::RightBuffer && tp.entry(c.index, m).active);
                        prop_assert!(lb ^ rb);
                    }
                }
            }
        }
    }
}
