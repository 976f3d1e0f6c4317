use std::fmt::{self, Write as _};

use super::norms::{flow_errors, norm_exactness, transport_errors, FlowErrors};
use super::{build_case, CaseId, CaseParams, ManufacturedCase};
use crate::assembly::volume_exactness;
use crate::error::{Error, Result};
use crate::flow::{solve_flow, verify_conservation, ConservationReport, FlowSpaces};
use crate::mesh::CellKind;
use crate::transport::{DiscreteVelocity, TransportSpaces, TransportSystem};

/// Experimental order of convergence between two refinement levels.
pub fn eoc(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

/// Setup of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub case: CaseId,
    pub params: CaseParams,
    pub k: usize,
    /// Values of `1/h`, coarse to fine.
    pub ladder: Vec<usize>,
    pub cell_kind: CellKind,
    pub dt: f64,
    pub t_final: f64,
    /// Also solve the transport problem on every level.
    pub transport: bool,
}

impl ConvergenceConfig {
    pub fn new(case: CaseId) -> Self {
        Self {
            case,
            params: CaseParams::default(),
            k: 1,
            ladder: vec![2, 4, 8, 16, 32],
            cell_kind: CellKind::Quad,
            dt: 1e-3,
            t_final: 0.1,
            transport: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.ladder.is_empty() {
            return Err(Error::Config("ladder must not be empty".into()));
        }
        if self.ladder.iter().any(|&n| n < 2 || n % 2 != 0) {
            return Err(Error::Config(format!(
                "ladder entries must be even and at least 2 (1/h over the unit square), got {:?}",
                self.ladder
            )));
        }
        if self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("ladder must be increasing, got {:?}", self.ladder)));
        }
        if !(1..=3).contains(&self.k) {
            return Err(Error::Argument(format!("degree k = {} is not supported (1..=3)", self.k)));
        }
        Ok(())
    }
}

/// Stability diagnostics of one transport run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportSummary {
    pub stability_ratio: f64,
    pub max_energy_residual: f64,
    pub max_mass_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub h_inv: usize,
    pub flow: FlowErrors,
    pub c: Option<f64>,
    pub z: Option<f64>,
    pub conservation: ConservationReport,
    pub transport: Option<TransportSummary>,
    /// Largest relative change of any error when the norm quadrature is
    /// lowered to the assembly rule.
    pub quadrature_sensitivity: f64,
}

impl ErrorRow {
    pub fn h(&self) -> f64 {
        1.0 / self.h_inv as f64
    }
}

/// The error columns of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    L,
    UB,
    PB,
    UD,
    PD,
    C,
    Z,
}

impl Column {
    pub const ALL: [Column; 7] = [Column::L, Column::UB, Column::PB, Column::UD, Column::PD, Column::C, Column::Z];

    pub fn name(self) -> &'static str {
        match self {
            Column::L => "L",
            Column::UB => "uB",
            Column::PB => "pB",
            Column::UD => "uD",
            Column::PD => "pD",
            Column::C => "c",
            Column::Z => "z",
        }
    }

    pub fn value(self, row: &ErrorRow) -> Option<f64> {
        match self {
            Column::L => Some(row.flow.l),
            Column::UB => Some(row.flow.u_b),
            Column::PB => Some(row.flow.p_b),
            Column::UD => Some(row.flow.u_d),
            Column::PD => Some(row.flow.p_d),
            Column::C => row.c,
            Column::Z => row.z,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub case: CaseId,
    pub params: CaseParams,
    pub k: usize,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    /// EOC of `col` for every row; the first row has none.
    pub fn orders(&self, col: Column) -> Vec<Option<f64>> {
        let mut out = vec![None];
        for w in self.rows.windows(2) {
            let o = match (col.value(&w[0]), col.value(&w[1])) {
                (Some(a), Some(b)) => Some(eoc(a, b, w[0].h(), w[1].h())),
                _ => None,
            };
            out.push(o);
        }
        out.truncate(self.rows.len());
        out
    }

    /// EOC of `col` between the two finest levels.
    pub fn final_order(&self, col: Column) -> Option<f64> {
        self.orders(col).last().copied().flatten()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,err_L,ord_L,err_uB,ord_uB,err_pB,ord_pB,err_uD,ord_uD,err_pD,ord_pD,err_c,ord_c,err_z,ord_z,div_uB_max,iface_jump_max,div_uD_residual\n");
        let orders: Vec<_> = Column::ALL.iter().map(|&c| self.orders(c)).collect();
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(s, "1/{}", row.h_inv);
            for (j, col) in Column::ALL.iter().enumerate() {
                match col.value(row) {
                    Some(e) => {
                        let _ = write!(s, ",{e:.6e}");
                    }
                    None => s.push_str(",NA"),
                }
                match orders[j][i] {
                    Some(o) => {
                        let _ = write!(s, ",{o:.4}");
                    }
                    None => s.push_str(",NA"),
                }
            }
            let c = &row.conservation;
            let _ = writeln!(s, ",{:.3e},{:.3e},{:.3e}", c.div_ub_max, c.iface_jump_max, c.div_ud_residual);
        }
        s
    }
}

impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} k={}\n{}", self.case, self.k, self.to_csv())
    }
}

/// A failed study with the levels completed before the failure.
#[derive(Debug)]
pub struct ConvergenceError {
    pub partial: ErrorReport,
    pub source: Error,
}

impl fmt::Display for ConvergenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {} failed: {}", self.partial.rows.len() + 1, self.source)
    }
}

impl std::error::Error for ConvergenceError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

impl From<ConvergenceError> for Error {
    fn from(e: ConvergenceError) -> Self {
        e.source
    }
}

fn relative_change(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

/// Solves one level of the study.
pub fn run_level(cfg: &ConvergenceConfig, case: &ManufacturedCase, h_inv: usize) -> Result<ErrorRow> {
    let mesh = case.mesh(1.0 / h_inv as f64, cfg.cell_kind)?;
    let spaces = FlowSpaces::new(&mesh, cfg.k, false)?;
    let fp = case.flow_params();
    let bd = case.boundary_data();
    let sol = solve_flow(&mesh, &spaces, &fp, &bd)?;
    let conservation = verify_conservation(&mesh, &spaces, &fp, &bd, &sol)?;
    let hi = norm_exactness(cfg.k);
    let lo = volume_exactness(cfg.k);
    let flow = flow_errors(&mesh, &spaces, &sol, case, hi)?;
    let flow_lo = flow_errors(&mesh, &spaces, &sol, case, lo)?;
    let mut sensitivity = [
        (flow.l, flow_lo.l),
        (flow.u_b, flow_lo.u_b),
        (flow.p_b, flow_lo.p_b),
        (flow.u_d, flow_lo.u_d),
        (flow.p_d, flow_lo.p_d),
    ]
    .iter()
    .map(|&(a, b)| relative_change(a, b))
    .fold(0.0, f64::max);

    let (mut c, mut z, mut transport) = (None, None, None);
    if cfg.transport {
        let tspaces = TransportSpaces::new(&mesh, cfg.k)?;
        let tp = case.transport_params(cfg.dt, cfg.t_final);
        let velocity = DiscreteVelocity { spaces: &spaces, solution: &sol };
        let system = TransportSystem::new(&mesh, &tspaces, &tp, &velocity, &bd)?;
        let run = system.run(|_| Ok(()))?;
        let (ec, ez) = transport_errors(&mesh, &tspaces, &run.final_state, case, hi)?;
        let (ec_lo, ez_lo) = transport_errors(&mesh, &tspaces, &run.final_state, case, lo)?;
        sensitivity = sensitivity.max(relative_change(ec, ec_lo)).max(relative_change(ez, ez_lo));
        c = Some(ec);
        z = Some(ez);
        transport = Some(TransportSummary {
            stability_ratio: run.report.ratio,
            max_energy_residual: run.report.max_energy_residual(),
            max_mass_residual: run.report.max_mass_residual(),
        });
    }
    Ok(ErrorRow {
        h_inv,
        flow,
        c,
        z,
        conservation,
        transport,
        quadrature_sensitivity: sensitivity,
    })
}

/// Runs every level of the ladder, coarse to fine.
pub fn run_convergence(cfg: &ConvergenceConfig) -> std::result::Result<ErrorReport, ConvergenceError> {
    let mut report = ErrorReport {
        case: cfg.case,
        params: cfg.params,
        k: cfg.k,
        rows: Vec::new(),
    };
    let setup = cfg.validate().and_then(|_| build_case(cfg.case, cfg.params));
    let case = match setup {
        Ok(c) => c,
        Err(source) => return Err(ConvergenceError { partial: report, source }),
    };
    for &n in &cfg.ladder {
        match run_level(cfg, &case, n) {
            Ok(row) => {
                log::info!("{} k={} h=1/{n} done", cfg.case, cfg.k);
                report.rows.push(row);
            }
            Err(source) => return Err(ConvergenceError { partial: report, source }),
        }
    }
    Ok(report)
}
