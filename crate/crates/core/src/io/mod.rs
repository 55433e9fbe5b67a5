//! File formats: scenario JSON, run exports, metrics CSV, SVG charts and the
//! TOPSIS matrix CSV.

mod export;
mod matrix_csv;
mod plot;
mod scenario;

pub use export::{export_report, metrics_table_csv, write_metrics_table, ExportError};
pub use matrix_csv::{parse_matrix_csv, write_topsis_csv, MatrixCsvError};
pub use plot::{emit_plot, render_svg, PlotError, PlotKind};
pub use scenario::{parse_scenario, serialize_scenario, ScenarioError};
