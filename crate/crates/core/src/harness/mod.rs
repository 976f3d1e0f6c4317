//! Manufactured solutions, error norms, convergence studies and demos.

mod convergence;
mod demo;
mod dump;
#[rustfmt::skip]
mod generated;
mod manufactured;
mod norms;

pub use convergence::{
    eoc, run_convergence, run_level, Column, ConvergenceConfig, ConvergenceError, ErrorReport, ErrorRow,
    TransportSummary,
};
pub use demo::{run_demo, run_demo_observed, solve_demo_flow, DemoConfig, DemoFlow, DemoId, DemoResult};
pub use dump::{lattice_points, sample_grid, write_field_dump, DumpField, Locator};
pub use manufactured::{
    build_case, CaseId, CaseParams, ManufacturedCase, BRINKMAN_RECT, DARCY_RECT, SELF_CHECK_TOLERANCE,
};
pub use norms::{flow_errors, l2_error, norm_exactness, transport_errors, FlowErrors};
