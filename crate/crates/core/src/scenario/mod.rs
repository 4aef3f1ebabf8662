//! The time sweep over cities, aggregation into CDFs and heatmaps, and
//! CSV/JSON/plot-data output.

pub mod aggregate;
pub mod config;
pub mod emit;
pub mod sweep;

pub use aggregate::{EmpiricalCdf, FigureSummary, Heatmap, QuantileTable, Reducer, Summary};
pub use config::{default_cities, City, ScenarioConfig};
pub use emit::{emit, load_results_dir, Format};
pub use sweep::{run_scenario, ArrayResults, CityResults, RobustRow, ScenarioResults, SelectionRow, StepStats, Sweep};
