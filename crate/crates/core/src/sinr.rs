//! Per-content SINR evaluation.
//!
//! One summation covers every scheme: for a receiver in LSA `a`, the cells
//! of `a` with content `m` active are signal and the active cells of the
//! other LSA are co-channel interference. The global content has no
//! interferers because every active cell carries the same global stream.
//! A content the receiver's LSA does not carry at all has zero SINR and no
//! interference term.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::allocation::{ContentPlan, TransmitPlan, GLOBAL_CONTENT};
use crate::error::{config_err, LsiError, Result};
use crate::grid::{distance, EvalArea, Grid, Lsa, Point, SampleLattice};
use crate::propagation::PathLoss;

/// dB value reported for a zero-power signal.
pub const SINR_DB_FLOOR: f64 = -300.0;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn to_db(linear: f64) -> f64 {
    if linear > 0.0 {
        10.0 * linear.log10()
    } else {
        SINR_DB_FLOOR
    }
}

/// Receiver noise and propagation.
#[derive(Debug, Clone)]
pub struct RadioEnv {
    n0_w_per_hz: f64,
    d_min_m: f64,
    pathloss: Arc<dyn PathLoss>,
}

impl RadioEnv {
    pub fn new(n0_w_per_hz: f64, d_min_m: f64, pathloss: Arc<dyn PathLoss>) -> Result<Self> {
        if !(n0_w_per_hz.is_finite() && n0_w_per_hz > 0.0) {
            return Err(config_err(format!(
                "radio noise density N0 = {n0_w_per_hz} W/Hz violates N0 > 0"
            )));
        }
        if !(d_min_m.is_finite() && d_min_m > 0.0) {
            return Err(config_err(format!(
                "grid.d_min_m = {d_min_m} violates d_min > 0"
            )));
        }
        Ok(Self {
            n0_w_per_hz,
            d_min_m,
            pathloss,
        })
    }

    pub fn n0(&self) -> f64 {
        self.n0_w_per_hz
    }

    pub fn d_min(&self) -> f64 {
        self.d_min_m
    }

    pub fn pathloss(&self) -> &dyn PathLoss {
        self.pathloss.as_ref()
    }

    pub fn gain(&self, tower: Point, point: Point) -> f64 {
        self.pathloss.gain(distance(tower, point, self.d_min_m))
    }
}

/// Signal, interference and noise powers at one point for one content.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sinr {
    pub signal_w: f64,
    pub interference_w: f64,
    pub noise_w: f64,
}

impl Sinr {
    pub fn linear(&self) -> f64 {
        self.signal_w / (self.interference_w + self.noise_w)
    }

    pub fn db(&self) -> f64 {
        to_db(self.linear())
    }
}

/// SINR samples of one content over an evaluation area, in sample order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinrField {
    pub content: usize,
    pub area: EvalArea,
    pub nx: usize,
    pub ny: usize,
    pub values_db: Vec<f64>,
}

impl SinrField {
    pub fn len(&self) -> usize {
        self.values_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_db.is_empty()
    }

    pub fn same_sampling(&self, other: &SinrField) -> bool {
        self.area == other.area
            && self.nx == other.nx
            && self.ny == other.ny
            && self.len() == other.len()
    }
}

/// A transmit plan bound to its grid, content plan and radio environment.
#[derive(Debug, Clone)]
pub struct SinrEngine<'a> {
    grid: &'a Grid,
    plan: &'a ContentPlan,
    tp: &'a TransmitPlan,
    env: &'a RadioEnv,
    // carried[m - 1][lsa]: some cell of the LSA has content m active
    carried: Vec<[bool; 2]>,
}

impl<'a> SinrEngine<'a> {
    pub fn new(
        grid: &'a Grid,
        plan: &'a ContentPlan,
        tp: &'a TransmitPlan,
        env: &'a RadioEnv,
    ) -> Result<Self> {
        if tp.m_count() != plan.m_count() || tp.cell_count() != grid.len() {
            return Err(LsiError::Argument(format!(
                "transmit plan ({} cells, {} contents) does not match grid ({} cells) and content plan ({} contents)",
                tp.cell_count(),
                tp.m_count(),
                grid.len(),
                plan.m_count()
            )));
        }
        let carried = (1..=plan.m_count())
            .map(|m| [Lsa::Lsa1, Lsa::Lsa2].map(|lsa| tp.active_cells(grid, lsa, m) > 0))
            .collect();
        Ok(Self {
            grid,
            plan,
            tp,
            env,
            carried,
        })
    }

    pub fn sinr_at(&self, point: Point, m: usize) -> Result<Sinr> {
        self.plan.check_content(m)?;
        let gains: Vec<f64> = self
            .grid
            .cells()
            .iter()
            .map(|c| self.env.gain(c.tower, point))
            .collect();
        Ok(self.sinr_with_gains(point, m, &gains))
    }

    /// All contents at one point, sharing the per-cell gains.
    pub fn sinr_all_at(&self, point: Point) -> Vec<Sinr> {
        let gains: Vec<f64> = self
            .grid
            .cells()
            .iter()
            .map(|c| self.env.gain(c.tower, point))
            .collect();
        (1..=self.plan.m_count())
            .map(|m| self.sinr_with_gains(point, m, &gains))
            .collect()
    }

    fn sinr_with_gains(&self, point: Point, m: usize, gains: &[f64]) -> Sinr {
        let home = self.grid.lsa_of_point(point);
        let noise_w = self.env.n0() * self.plan.bandwidth_hz[m - 1];
        if !self.carried[m - 1][home as usize] {
            // nothing to decode; other-LSA transmissions are not interference to it
            return Sinr {
                signal_w: 0.0,
                interference_w: 0.0,
                noise_w,
            };
        }
        let mut signal = CompensatedSum::default();
        let mut interference = CompensatedSum::default();
        for (cell, g) in self.grid.cells().iter().zip(gains) {
            let e = self.tp.entry(cell.index, m);
            if !e.active {
                continue;
            }
            if m == GLOBAL_CONTENT || cell.lsa == home {
                signal.add(e.power_w * g);
            } else {
                interference.add(e.power_w * g);
            }
        }
        Sinr {
            signal_w: signal.value(),
            interference_w: interference.value(),
            noise_w,
        }
    }

    pub fn sinr_field(&self, area: &EvalArea, m: usize) -> Result<SinrField> {
        self.plan.check_content(m)?;
        let lattice = crate::grid::sample_points(area, self.grid.spec())?;
        let values_db = lattice
            .points
            .par_iter()
            .map(|&p| {
                let gains: Vec<f64> = self
                    .grid
                    .cells()
                    .iter()
                    .map(|c| self.env.gain(c.tower, p))
                    .collect();
                self.sinr_with_gains(p, m, &gains).db()
            })
            .collect();
        Ok(SinrField {
            content: m,
            area: area.clone(),
            nx: lattice.nx,
            ny: lattice.ny,
            values_db,
        })
    }

    /// Fields for every content over `area`, index 0 holding content 1.
    pub fn sinr_fields(&self, area: &EvalArea) -> Result<Vec<SinrField>> {
        let lattice = crate::grid::sample_points(area, self.grid.spec())?;
        Ok(self.fields_on(area, &lattice))
    }

    fn fields_on(&self, area: &EvalArea, lattice: &SampleLattice) -> Vec<SinrField> {
        let per_point: Vec<Vec<f64>> = lattice
            .points
            .par_iter()
            .map(|&p| self.sinr_all_at(p).iter().map(Sinr::db).collect())
            .collect();
        (1..=self.plan.m_count())
            .map(|m| SinrField {
                content: m,
                area: area.clone(),
                nx: lattice.nx,
                ny: lattice.ny,
                values_db: per_point.iter().map(|v| v[m - 1]).collect(),
            })
            .collect()
    }
}

/// SINR of content `m` at `point`.
pub fn sinr_at(
    point: Point,
    m: usize,
    tp: &TransmitPlan,
    env: &RadioEnv,
    plan: &ContentPlan,
    grid: &Grid,
) -> Result<Sinr> {
    SinrEngine::new(grid, plan, tp, env)?.sinr_at(point, m)
}

/// SINR of content `m` at every sample point of `area`.
pub fn sinr_field(
    area: &EvalArea,
    m: usize,
    tp: &TransmitPlan,
    env: &RadioEnv,
    plan: &ContentPlan,
    grid: &Grid,
) -> Result<SinrField> {
    SinrEngine::new(grid, plan, tp, env)?.sinr_field(area, m)
}
