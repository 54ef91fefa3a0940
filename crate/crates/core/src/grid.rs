//! Rectangular two-LSA cell grid with buffer columns on either side of the
//! LSA boundary, plus the sampling lattices used to evaluate it.
//!
//! Cells are squares of side `isd` with the representative tower at the
//! center. LSA1 owns columns `[0, lsa1_cols)`; the rightmost
//! `buffer_cols_per_side` LSA1 columns form the left buffer and the leftmost
//! `buffer_cols_per_side` LSA2 columns form the right buffer.

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Default lower clamp on tower-to-point distance, in meters.
pub const DEFAULT_D_MIN_M: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lsa {
    Lsa1,
    Lsa2,
}

impl Lsa {
    pub fn other(self) -> Lsa {
        match self {
            Lsa::Lsa1 => Lsa::Lsa2,
            Lsa::Lsa2 => Lsa::Lsa1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Zone {
    SfnInterior,
    LeftBuffer,
    RightBuffer,
}

impl Zone {
    pub fn is_buffer(self) -> bool {
        !matches!(self, Zone::SfnInterior)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    /// Inter-site distance (cell edge length) in meters.
    pub isd: f64,
    pub lsa1_cols: usize,
    pub buffer_cols_per_side: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            rows: 8,
            cols: 10,
            isd: 1700.0,
            lsa1_cols: 5,
            buffer_cols_per_side: 1,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rows < 1 {
            return Err(config_err(format!(
                "grid.rows = {} violates rows >= 1",
                self.rows
            )));
        }
        if self.cols < 2 {
            return Err(config_err(format!(
                "grid.cols = {} violates cols >= 2",
                self.cols
            )));
        }
        if self.lsa1_cols < 1 || self.lsa1_cols >= self.cols {
            return Err(config_err(format!(
                "grid.lsa1_cols = {} violates 1 <= lsa1_cols < cols ({})",
                self.lsa1_cols, self.cols
            )));
        }
        let max_buffer = self.lsa1_cols.min(self.cols - self.lsa1_cols);
        if self.buffer_cols_per_side < 1 || self.buffer_cols_per_side > max_buffer {
            return Err(config_err(format!(
                "grid.buffer_cols_per_side = {} violates 1 <= buffer_cols_per_side <= {}",
                self.buffer_cols_per_side, max_buffer
            )));
        }
        if !(self.isd.is_finite() && self.isd > 0.0) {
            return Err(config_err(format!(
                "grid.isd = {} violates isd > 0",
                self.isd
            )));
        }
        Ok(())
    }

    pub fn width_m(&self) -> f64 {
        self.cols as f64 * self.isd
    }

    pub fn height_m(&self) -> f64 {
        self.rows as f64 * self.isd
    }

    /// x coordinate of the LSA1/LSA2 boundary.
    pub fn boundary_x(&self) -> f64 {
        self.lsa1_cols as f64 * self.isd
    }

    /// LSA and zone of a column index.
    pub fn classify_col(&self, col: usize) -> (Lsa, Zone) {
        let b = self.buffer_cols_per_side;
        if col < self.lsa1_cols {
            let zone = if col + b >= self.lsa1_cols {
                Zone::LeftBuffer
            } else {
                Zone::SfnInterior
            };
            (Lsa::Lsa1, zone)
        } else {
            let zone = if col < self.lsa1_cols + b {
                Zone::RightBuffer
            } else {
                Zone::SfnInterior
            };
            (Lsa::Lsa2, zone)
        }
    }

    /// Column containing `x`; points outside the grid map to the nearest edge column.
    pub fn col_of_x(&self, x: f64) -> usize {
        let c = (x / self.isd).floor();
        if c < 0.0 {
            0
        } else {
            (c as usize).min(self.cols - 1)
        }
    }

    /// LSA a receiver at `point` belongs to, by geometric cell membership.
    pub fn lsa_of_point(&self, point: Point) -> Lsa {
        self.classify_col(self.col_of_x(point.x)).0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub row: usize,
    pub col: usize,
    pub lsa: Lsa,
    pub zone: Zone,
    pub tower: Point,
}

/// A validated grid: the spec plus its cells in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    spec: GridSpec,
    cells: Vec<Cell>,
}

/// Builds the `rows x cols` cell list in row-major order.
pub fn build_grid(spec: &GridSpec) -> Result<Vec<Cell>> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.rows * spec.cols);
    for row in 0..spec.rows {
        for col in 0..spec.cols {
            let (lsa, zone) = spec.classify_col(col);
            cells.push(Cell {
                index: row * spec.cols + col,
                row,
                col,
                lsa,
                zone,
                tower: Point::new((col as f64 + 0.5) * spec.isd, (row as f64 + 0.5) * spec.isd),
            });
        }
    }
    Ok(cells)
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        let cells = build_grid(&spec)?;
        Ok(Self { spec, cells })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells_in(&self, lsa: Lsa) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.lsa == lsa)
    }

    pub fn count_in(&self, lsa: Lsa) -> usize {
        self.cells_in(lsa).count()
    }

    pub fn count_zone(&self, zone: Zone) -> usize {
        self.cells.iter().filter(|c| c.zone == zone).count()
    }

    pub fn lsa_of_point(&self, point: Point) -> Lsa {
        self.spec.lsa_of_point(point)
    }
}

/// Euclidean tower-to-point distance, clamped below by `d_min`.
pub fn distance(tower: Point, point: Point, d_min: f64) -> f64 {
    (tower.x - point.x).hypot(tower.y - point.y).max(d_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AreaKind {
    A1,
    A2,
    Custom,
}

/// Rectangular evaluation area sampled at `resolution` points per cell edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalArea {
    pub kind: AreaKind,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub resolution: usize,
}

impl EvalArea {
    /// The LSA1 columns only.
    pub fn a1(spec: &GridSpec, resolution: usize) -> Self {
        Self {
            kind: AreaKind::A1,
            x_range: (0.0, spec.boundary_x()),
            y_range: (0.0, spec.height_m()),
            resolution,
        }
    }

    /// Both LSAs.
    pub fn a2(spec: &GridSpec, resolution: usize) -> Self {
        Self {
            kind: AreaKind::A2,
            x_range: (0.0, spec.width_m()),
            y_range: (0.0, spec.height_m()),
            resolution,
        }
    }

    pub fn custom(x_range: (f64, f64), y_range: (f64, f64), resolution: usize) -> Self {
        Self {
            kind: AreaKind::Custom,
            x_range,
            y_range,
            resolution,
        }
    }

    pub fn of_kind(kind: AreaKind, spec: &GridSpec, resolution: usize) -> Result<Self> {
        match kind {
            AreaKind::A1 => Ok(Self::a1(spec, resolution)),
            AreaKind::A2 => Ok(Self::a2(spec, resolution)),
            AreaKind::Custom => Err(config_err("custom areas need explicit ranges")),
        }
    }
}

/// Regular row-major lattice of sample points; `points[j * nx + i]` is
/// column `i` of row `j`, rows ordered by increasing y.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleLattice {
    pub nx: usize,
    pub ny: usize,
    pub points: Vec<Point>,
}

impl SampleLattice {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn same_shape(&self, other: &SampleLattice) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.points == other.points
    }
}

/// Samples `resolution^2` points per cell footprint at sub-cell centers.
pub fn sample_points(area: &EvalArea, spec: &GridSpec) -> Result<SampleLattice> {
    if area.resolution < 1 {
        return Err(config_err("sampling resolution must be >= 1"));
    }
    if !(spec.isd.is_finite() && spec.isd > 0.0) {
        return Err(config_err(format!(
            "grid.isd = {} violates isd > 0",
            spec.isd
        )));
    }
    let step = spec.isd / area.resolution as f64;
    let count = |range: (f64, f64)| -> usize {
        let w = range.1 - range.0;
        if !w.is_finite() || w <= 0.0 {
            0
        } else {
            (w / step).round() as usize
        }
    };
    let nx = count(area.x_range);
    let ny = count(area.y_range);
    if nx == 0 || ny == 0 {
        return Err(config_err(format!(
            "evaluation area x {:?}, y {:?} contains no sample points",
            area.x_range, area.y_range
        )));
    }
    let mut points = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = area.y_range.0 + (j as f64 + 0.5) * step;
        for i in 0..nx {
            points.push(Point::new(area.x_range.0 + (i as f64 + 0.5) * step, y));
        }
    }
    Ok(SampleLattice { nx, ny, points })
}
