//! Simulation core for local service insertion in broadcast single frequency
//! networks: a two-LSA cell grid, path-loss models, per-scheme transmit
//! plans, per-content SINR fields, and coverage and spectral-efficiency
//! metrics.

pub mod allocation;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod oracle;
pub mod propagation;
pub mod sinr;

pub use allocation::{
    AllocationStrategy, BufferReallocation, ContentPlan, SchemeConfig, SchemeRegistry,
    TransmitPlan, GLOBAL_CONTENT,
};
pub use error::{LsiError, Result};
pub use grid::{AreaKind, Cell, EvalArea, Grid, GridSpec, Lsa, Point, Zone};
pub use metrics::{content_count_map, coverage, ContentCountMap, CoverageReport, SeReport};
pub use num_rational::Ratio;
pub use propagation::{PathLoss, PathLossParams, PathLossRegistry};
pub use sinr::{RadioEnv, SinrEngine, SinrField};
