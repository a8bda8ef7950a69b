//! Comparing efficiency bounds through sufficient conditions on the
//! treatment and mediator distributions.

mod conditions;
mod scan;
mod verdict;

pub use conditions::{binary_interval, check_outcome_ci, diff_td_minus_bd, prop2_verdict, prop6_verdict, CI_TOL};
pub use scan::{grid_scan, ScanGrid, ScanReport, ScanRow, INTERVAL, SCAN_HEADER};
pub use verdict::{CellValue, ComparisonVerdict, Ordering};
