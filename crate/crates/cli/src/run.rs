use std::fmt::Write as _;
use std::path::Path;

use bdflow::flow::{solve_flow, verify_conservation, ConservationReport, FlowSolution, FlowSpaces};
use bdflow::harness::{
    build_case, flow_errors, norm_exactness, run_convergence, run_demo_observed, sample_grid, solve_demo_flow,
    transport_errors, write_field_dump, CaseId, CaseParams, Column, ConvergenceConfig, DemoConfig, DemoId,
    DumpField, ErrorReport,
};
use bdflow::mesh::{ingest_primal, subdivide, BoundaryTag, CellKind, EdgeClass, PrimalMesh, StaggeredMesh, Subdomain};
use bdflow::transport::{DiscreteVelocity, StabilityReport, TransportSpaces, TransportState, TransportSystem};

use crate::config::{Case, CommandKind, RunConfig};
use crate::error::CliError;

/// Conservation residuals relative to the velocity scale.
pub const CONSERVATION_TOL: f64 = 1e-9;
/// Energy identity defect per step, relative to its terms.
pub const ENERGY_TOL: f64 = 1e-10;
/// Mass ledger defect per step.
pub const MASS_TOL: f64 = 1e-8;
/// Allowed EOC deviation for second-order columns.
pub const ORDER_TOL: f64 = 0.25;
/// Allowed EOC deviation for the Darcy pressure.
pub const PD_ORDER_TOL: f64 = 0.15;

/// What a successful run reports.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Human-readable summary lines.
    pub lines: Vec<String>,
    /// Acceptance checks as `(description, passed)`.
    pub checks: Vec<(String, bool)>,
    /// Files written, relative to the output directory.
    pub files: Vec<String>,
}

impl Outcome {
    fn check(&mut self, passed: bool, what: String) {
        self.checks.push((what, passed));
    }

    pub fn failed(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.1).map(|c| c.0.clone()).collect()
    }

    /// An error listing the failed checks, if any.
    pub fn verdict(&self) -> Result<(), CliError> {
        let failed = self.failed();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Check(failed))
        }
    }
}

fn create_out(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}

fn write_file(out: &Path, name: &str, contents: &str, outcome: &mut Outcome) -> Result<(), CliError> {
    create_out(out)?;
    let path = out.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    outcome.files.push(name.to_string());
    Ok(())
}

/// Runs the command, writing its artifacts to `cfg.out`. Failed checks are
/// recorded in the outcome, not reported as errors.
pub fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        CommandKind::Convergence => convergence(cfg),
        CommandKind::SolveFlow => solve_flow_cmd(cfg),
        CommandKind::RunTransport => run_transport(cfg),
        CommandKind::Demo => demo(cfg),
        CommandKind::CheckMesh => check_mesh(cfg),
    }
}

fn case_params(cfg: &RunConfig) -> CaseParams {
    let d = CaseParams::default();
    CaseParams {
        epsilon: cfg.epsilon.unwrap_or(d.epsilon),
        alpha: cfg.alpha.unwrap_or(d.alpha),
        k_darcy: cfg.kdarcy.unwrap_or(d.k_darcy),
        k_diff: cfg.kdiff.unwrap_or(d.k_diff),
    }
}

fn manufactured(cfg: &RunConfig) -> Result<CaseId, CliError> {
    match cfg.case {
        Some(Case::Manufactured(c)) => Ok(c),
        other => Err(CliError::config("case", format!("expected ex1 or ex2, got {other:?}"))),
    }
}

fn load_mesh(path: &Path) -> Result<PrimalMesh, CliError> {
    ingest_primal(path).map_err(|e| match e {
        bdflow::Error::Io(io) => CliError::Mesh(format!("{}: {io}", path.display())),
        e => CliError::mesh(e),
    })
}

fn demo_config(cfg: &RunConfig, id: DemoId) -> Result<DemoConfig, CliError> {
    let mut d = match id {
        DemoId::Ex3 => DemoConfig::ex3(),
        DemoId::Ex4 => {
            let path = cfg.mesh.as_ref().ok_or_else(|| CliError::config("mesh", "required by case ex4"))?;
            DemoConfig::ex4(load_mesh(path)?)
        }
    };
    d.k = cfg.k;
    if id == DemoId::Ex3 {
        d.h = 1.0 / cfg.ladder[0] as f64;
    }
    d.epsilon = cfg.epsilon;
    d.alpha = cfg.alpha;
    d.k_diff = cfg.kdiff;
    d.k_darcy = cfg.kdarcy;
    d.dt = cfg.dt;
    d.t_final = cfg.tfinal;
    d.snapshot_times.retain(|&t| t <= cfg.tfinal * (1.0 + 1e-12));
    Ok(d)
}

fn grid_size(mesh: &StaggeredMesh) -> (usize, usize) {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &mesh.points {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let aspect = (hi[1] - lo[1]) / (hi[0] - lo[0]);
    (100, ((100.0 * aspect).round() as usize).max(1))
}

fn flow_fields<'a>(spaces: &'a FlowSpaces, sol: &'a FlowSolution) -> [DumpField<'a>; 5] {
    [
        DumpField { name: "L", space: &spaces.wb, coeffs: &sol.l },
        DumpField { name: "uB", space: &spaces.hb, coeffs: &sol.u_b },
        DumpField { name: "pB", space: &spaces.qb, coeffs: &sol.p_b },
        DumpField { name: "uD", space: &spaces.hd, coeffs: &sol.u_d },
        DumpField { name: "pD", space: &spaces.qd, coeffs: &sol.p_d },
    ]
}

fn transport_fields<'a>(spaces: &'a TransportSpaces, state: &'a TransportState) -> [DumpField<'a>; 2] {
    [
        DumpField { name: "c", space: &spaces.uh, coeffs: &state.c },
        DumpField { name: "z", space: &spaces.wh, coeffs: &state.z },
    ]
}

fn conservation_csv(c: &ConservationReport) -> String {
    format!(
        "div_uB_max,iface_jump_max,gamma_b_flux_max,div_uD_residual,velocity_scale\n{:.3e},{:.3e},{:.3e},{:.3e},{:.6e}\n",
        c.div_ub_max, c.iface_jump_max, c.gamma_b_flux_max, c.div_ud_residual, c.velocity_scale
    )
}

fn conservation_checks(outcome: &mut Outcome, label: &str, c: &ConservationReport) {
    let bound = CONSERVATION_TOL * c.velocity_scale.max(1.0);
    for (name, v) in [
        ("div uB", c.div_ub_max),
        ("interface jump", c.iface_jump_max),
        ("uB.n - Pi g1", c.gamma_b_flux_max),
        ("div uD - f", c.div_ud_residual),
    ] {
        outcome.check(v <= bound, format!("{label}: {name} {v:.3e} <= {bound:.3e}"));
    }
}

fn stability_checks(outcome: &mut Outcome, label: &str, report: &StabilityReport) {
    let e = report.max_energy_residual();
    let m = report.max_mass_residual();
    outcome.check(e <= ENERGY_TOL, format!("{label}: energy identity defect {e:.3e} <= {ENERGY_TOL:.0e}"));
    outcome.check(m <= MASS_TOL, format!("{label}: mass ledger defect {m:.3e} <= {MASS_TOL:.0e}"));
}

fn order_checks(outcome: &mut Outcome, report: &ErrorReport, nominal: bool) {
    let k = report.k as f64;
    let cols: Vec<(Column, f64, f64)> = if nominal {
        Column::ALL
            .iter()
            .map(|&c| if c == Column::PD { (c, k, PD_ORDER_TOL) } else { (c, k + 1.0, ORDER_TOL) })
            .collect()
    } else {
        vec![(Column::UB, k + 1.0, ORDER_TOL), (Column::UD, k + 1.0, ORDER_TOL)]
    };
    for (col, want, tol) in cols {
        match report.final_order(col) {
            Some(o) => outcome.check(
                (o - want).abs() <= tol,
                format!("EOC {} = {o:.3}, expected {want} +- {tol}", col.name()),
            ),
            None => outcome.check(false, format!("EOC {} unavailable (needs two levels)", col.name())),
        }
    }
}

fn convergence(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let case = manufactured(cfg)?;
    let params = case_params(cfg);
    let cc = ConvergenceConfig {
        case,
        params,
        k: cfg.k,
        ladder: cfg.ladder.clone(),
        cell_kind: CellKind::Quad,
        dt: cfg.dt,
        t_final: cfg.tfinal,
        transport: true,
    };
    let mut outcome = Outcome::default();
    let name = format!("convergence_{case}_k{}.csv", cfg.k);
    let report = match run_convergence(&cc) {
        Ok(r) => r,
        Err(e) => {
            if !e.partial.rows.is_empty() {
                write_file(&cfg.out, &name, &e.partial.to_csv(), &mut outcome)?;
            }
            return Err(e.source.into());
        }
    };
    write_file(&cfg.out, &name, &report.to_csv(), &mut outcome)?;

    let mut s = String::from("h,stability_ratio,max_energy_residual,max_mass_residual,quadrature_sensitivity,gamma_b_flux_max,velocity_scale\n");
    for row in &report.rows {
        let _ = write!(s, "1/{}", row.h_inv);
        match row.transport {
            Some(t) => {
                let _ = write!(s, ",{:.6e},{:.3e},{:.3e}", t.stability_ratio, t.max_energy_residual, t.max_mass_residual);
            }
            None => s.push_str(",NA,NA,NA"),
        }
        let _ = writeln!(
            s,
            ",{:.3e},{:.3e},{:.6e}",
            row.quadrature_sensitivity, row.conservation.gamma_b_flux_max, row.conservation.velocity_scale
        );
    }
    write_file(&cfg.out, &format!("diagnostics_{case}_k{}.csv", cfg.k), &s, &mut outcome)?;

    outcome.lines.push(report.to_string().trim_end().to_string());
    let mut orders = String::from("finest-level EOC:");
    for col in Column::ALL {
        if let Some(o) = report.final_order(col) {
            let _ = write!(orders, " {} {o:.2}", col.name());
        }
    }
    outcome.lines.push(orders);

    for row in &report.rows {
        let label = format!("h=1/{}", row.h_inv);
        conservation_checks(&mut outcome, &label, &row.conservation);
        if let Some(t) = row.transport {
            outcome.check(
                t.max_energy_residual <= ENERGY_TOL,
                format!("{label}: energy identity defect {:.3e} <= {ENERGY_TOL:.0e}", t.max_energy_residual),
            );
            outcome.check(
                t.max_mass_residual <= MASS_TOL,
                format!("{label}: mass ledger defect {:.3e} <= {MASS_TOL:.0e}", t.max_mass_residual),
            );
        }
    }
    if let Some(row) = report.rows.last() {
        outcome.check(
            row.quadrature_sensitivity < 0.01,
            format!("h=1/{}: quadrature sensitivity {:.2e} < 1%", row.h_inv, row.quadrature_sensitivity),
        );
    }
    let ratios: Vec<f64> = report.rows.iter().filter_map(|r| r.transport.map(|t| t.stability_ratio)).collect();
    if let (Some(lo), Some(hi)) = (
        ratios.iter().copied().reduce(f64::min),
        ratios.iter().copied().reduce(f64::max),
    ) {
        outcome.check(hi < 2.0 * lo, format!("stability ratio in [{lo:.3e}, {hi:.3e}] varies < 2x"));
    }
    let nominal = params.epsilon == 1.0 && params.k_diff == 1.0;
    order_checks(&mut outcome, &report, nominal);
    Ok(outcome)
}

fn solve_flow_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut outcome = Outcome::default();
    let case = cfg.case.ok_or_else(|| CliError::config("case", "required"))?;
    let mut report = String::from(
        "h,err_L,err_uB,err_pB,err_uD,err_pD,div_uB_max,iface_jump_max,gamma_b_flux_max,div_uD_residual,velocity_scale,algebraic_residual\n",
    );
    let (mesh, spaces, sol, cons) = match case {
        Case::Manufactured(id) => {
            let mc = build_case(id, case_params(cfg))?;
            let n = cfg.ladder[0];
            let mesh = mc.mesh(1.0 / n as f64, CellKind::Quad)?;
            let spaces = FlowSpaces::new(&mesh, cfg.k, false)?;
            let fp = mc.flow_params();
            let bd = mc.boundary_data();
            let sol = solve_flow(&mesh, &spaces, &fp, &bd)?;
            let cons = verify_conservation(&mesh, &spaces, &fp, &bd, &sol)?;
            let e = flow_errors(&mesh, &spaces, &sol, &mc, norm_exactness(cfg.k))?;
            let _ = write!(report, "1/{n},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}", e.l, e.u_b, e.p_b, e.u_d, e.p_d);
            (mesh, spaces, sol, cons)
        }
        Case::Demo(id) => {
            let d = solve_demo_flow(&demo_config(cfg, id)?)?;
            let _ = write!(report, "{:.6e},NA,NA,NA,NA,NA", d.mesh.h);
            (d.mesh, d.flow_spaces, d.flow, d.conservation)
        }
    };
    let _ = writeln!(
        report,
        ",{:.3e},{:.3e},{:.3e},{:.3e},{:.6e},{:.3e}",
        cons.div_ub_max, cons.iface_jump_max, cons.gamma_b_flux_max, cons.div_ud_residual, cons.velocity_scale, sol.residual
    );
    write_file(&cfg.out, &format!("flow_{case}.csv"), &report, &mut outcome)?;
    let fields = flow_fields(&spaces, &sol);
    write_file(&cfg.out, &format!("flow_{case}.dump"), &write_field_dump(&mesh, 0.0, &fields), &mut outcome)?;
    let (nx, ny) = grid_size(&mesh);
    write_file(&cfg.out, &format!("flow_{case}_grid.csv"), &sample_grid(&mesh, &fields, nx, ny), &mut outcome)?;
    outcome.lines.push(format!(
        "{case} k={}: {} subtriangles, max conservation residual {:.3e} (velocity scale {:.3e})",
        cfg.k,
        mesh.tris.len(),
        cons.max_residual(),
        cons.velocity_scale
    ));
    conservation_checks(&mut outcome, case.name(), &cons);
    Ok(outcome)
}

fn dump_name(prefix: &str, step: usize) -> String {
    format!("{prefix}_step{step:07}.dump")
}

fn run_transport(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let id = manufactured(cfg)?;
    let mut outcome = Outcome::default();
    let mc = build_case(id, case_params(cfg))?;
    let n = cfg.ladder[0];
    let mesh = mc.mesh(1.0 / n as f64, CellKind::Quad)?;
    let spaces = FlowSpaces::new(&mesh, cfg.k, false)?;
    let fp = mc.flow_params();
    let bd = mc.boundary_data();
    let sol = solve_flow(&mesh, &spaces, &fp, &bd)?;
    let tspaces = TransportSpaces::new(&mesh, cfg.k)?;
    let tp = mc.transport_params(cfg.dt, cfg.tfinal);
    let velocity = DiscreteVelocity { spaces: &spaces, solution: &sol };
    let system = TransportSystem::new(&mesh, &tspaces, &tp, &velocity, &bd)?;
    let prefix = format!("transport_{id}");
    let last = tp.steps();
    create_out(&cfg.out)?;
    let mut dumps = Vec::new();
    let run = system.run(|st| {
        if st.step == last || (cfg.dump_stride > 0 && st.step % cfg.dump_stride == 0) {
            let name = dump_name(&prefix, st.step);
            std::fs::write(cfg.out.join(&name), write_field_dump(&mesh, st.t, &transport_fields(&tspaces, st)))?;
            dumps.push(name);
        }
        Ok(())
    })?;
    outcome.files.extend(dumps);
    write_file(&cfg.out, &format!("{prefix}_stability.csv"), &run.report.to_csv(), &mut outcome)?;
    let (ec, ez) = transport_errors(&mesh, &tspaces, &run.final_state, &mc, norm_exactness(cfg.k))?;
    let csv = format!(
        "h,err_c,err_z,stability_ratio,max_energy_residual,max_mass_residual\n1/{n},{ec:.6e},{ez:.6e},{:.6e},{:.3e},{:.3e}\n",
        run.report.ratio,
        run.report.max_energy_residual(),
        run.report.max_mass_residual()
    );
    write_file(&cfg.out, &format!("{prefix}_errors.csv"), &csv, &mut outcome)?;
    let (nx, ny) = grid_size(&mesh);
    let fields = transport_fields(&tspaces, &run.final_state);
    write_file(&cfg.out, &format!("{prefix}_grid.csv"), &sample_grid(&mesh, &fields, nx, ny), &mut outcome)?;
    outcome.lines.push(format!(
        "{id} k={} h=1/{n}: {last} steps, |c-c_h| {ec:.3e}, |z-z_h| {ez:.3e}, stability ratio {:.3e}",
        cfg.k, run.report.ratio
    ));
    stability_checks(&mut outcome, id.name(), &run.report);
    Ok(outcome)
}

fn time_label(t: f64) -> String {
    let s = format!("{t:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn demo(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let id = match cfg.case {
        Some(Case::Demo(id)) => id,
        other => return Err(CliError::config("case", format!("expected ex3 or ex4, got {other:?}"))),
    };
    let dc = demo_config(cfg, id)?;
    let mut outcome = Outcome::default();
    create_out(&cfg.out)?;
    let mut dumps = Vec::new();
    let result = run_demo_observed(&dc, |mesh, spaces, st| {
        if cfg.dump_stride > 0 && st.step % cfg.dump_stride == 0 {
            let name = dump_name(id.name(), st.step);
            std::fs::write(cfg.out.join(&name), write_field_dump(mesh, st.t, &transport_fields(spaces, st)))?;
            dumps.push(name);
        }
        Ok(())
    })?;
    outcome.files.extend(dumps);
    let mesh = &result.mesh;
    let flow = flow_fields(&result.flow_spaces, &result.flow);
    write_file(&cfg.out, &format!("{id}_flow.dump"), &write_field_dump(mesh, 0.0, &flow), &mut outcome)?;
    let (nx, ny) = grid_size(mesh);
    write_file(&cfg.out, &format!("{id}_flow_grid.csv"), &sample_grid(mesh, &flow, nx, ny), &mut outcome)?;
    write_file(&cfg.out, &format!("{id}_conservation.csv"), &conservation_csv(&result.conservation), &mut outcome)?;
    for st in std::iter::once(&result.initial).chain(&result.snapshots) {
        let fields = transport_fields(&result.transport_spaces, st);
        let label = time_label(st.t);
        write_file(&cfg.out, &format!("{id}_t{label}.dump"), &write_field_dump(mesh, st.t, &fields), &mut outcome)?;
        write_file(&cfg.out, &format!("{id}_t{label}_grid.csv"), &sample_grid(mesh, &fields[..1], nx, ny), &mut outcome)?;
    }
    write_file(&cfg.out, &format!("{id}_stability.csv"), &result.report.to_csv(), &mut outcome)?;
    let mut centroid = String::from("t,centroid_x\n");
    for (t, x) in &result.centroid {
        let _ = writeln!(centroid, "{t:.6},{x:.9e}");
    }
    write_file(&cfg.out, &format!("{id}_centroid.csv"), &centroid, &mut outcome)?;

    outcome.lines.push(format!(
        "{id}: {} subtriangles, {} steps, stability ratio {:.3e}, max conservation residual {:.3e}",
        mesh.tris.len(),
        result.report.rows.len().saturating_sub(1),
        result.report.ratio,
        result.conservation.max_residual()
    ));
    for st in &result.snapshots {
        let (lo, hi) = result.range(st);
        outcome.lines.push(format!("  t = {}: c in [{lo:.4}, {hi:.4}]", time_label(st.t)));
    }
    let wanted = dc.snapshot_times.len();
    outcome.check(
        result.snapshots.len() == wanted,
        format!("{id}: {} of {wanted} snapshots written", result.snapshots.len()),
    );
    conservation_checks(&mut outcome, id.name(), &result.conservation);
    stability_checks(&mut outcome, id.name(), &result.report);
    if id == DemoId::Ex3 {
        outcome.check(result.centroid_monotone(1e-9), format!("{id}: concentration centroid moves monotonically right"));
    }
    Ok(outcome)
}

fn check_mesh(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let path = cfg.mesh.as_ref().ok_or_else(|| CliError::config("mesh", "required by `check-mesh`"))?;
    let primal = load_mesh(path)?;
    let mesh = subdivide(&primal);
    let count = |sub| primal.cells.iter().filter(|c| c.subdomain == sub).count();
    let tags = |tag| primal.boundary.values().filter(|&&t| t == tag).count();
    let dual = mesh.edges_of_class(EdgeClass::Dual).count();
    let mut outcome = Outcome::default();
    outcome.lines.push(format!(
        "{}: ok, {} vertices, {} cells ({} Brinkman, {} Darcy), {} edges ({} GB, {} GD, {} IF), {} subtriangles, {} staggered edges ({} dual), h {:.4e}",
        path.display(),
        primal.vertices.len(),
        primal.cells.len(),
        count(Subdomain::Brinkman),
        count(Subdomain::Darcy),
        primal.edge_count(),
        tags(BoundaryTag::Brinkman),
        tags(BoundaryTag::Darcy),
        tags(BoundaryTag::Interface),
        mesh.tris.len(),
        mesh.edges.len(),
        dual,
        mesh.h
    ));
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{validate, FileConfig};

    fn config(kind: CommandKind, text: &str, out: &Path) -> RunConfig {
        let text = format!("{text}\nout = \"{}\"\n", out.display());
        validate(kind, FileConfig::parse(&text).unwrap()).unwrap()
    }

    fn read_all(dir: &Path, files: &[String]) -> Vec<(String, Vec<u8>)> {
        files.iter().map(|f| (f.clone(), std::fs::read(dir.join(f)).unwrap())).collect()
    }

    #[test]
    fn repeated_runs_write_identical_files() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let text = "case = \"ex1\"\nladder = [2, 4]\ntfinal = 0.01\ndt = 0.005";
        let first = dispatch(&config(CommandKind::Convergence, text, a.path())).unwrap();
        let second = dispatch(&config(CommandKind::Convergence, text, b.path())).unwrap();
        assert!(!first.files.is_empty());
        assert_eq!(first.files, second.files);
        assert_eq!(read_all(a.path(), &first.files), read_all(b.path(), &second.files));
    }

    #[test]
    fn solve_flow_writes_conservation_and_fields() {
        let dir = tempfile::tempdir().unwrap();
        let outcome = dispatch(&config(CommandKind::SolveFlow, "case = \"ex2\"\nladder = [4]", dir.path())).unwrap();
        for f in ["flow_ex2.csv", "flow_ex2.dump", "flow_ex2_grid.csv"] {
            assert!(outcome.files.iter().any(|g| g == f), "{f} missing from {:?}", outcome.files);
            assert!(dir.path().join(f).metadata().unwrap().len() > 0);
        }
    }

    #[test]
    fn check_mesh_accepts_the_step_mesh() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/ex4_step.mesh");
        let outcome = dispatch(&config(CommandKind::CheckMesh, &format!("mesh = \"{mesh}\""), dir.path())).unwrap();
        assert!(outcome.lines[0].contains(": ok,"), "{}", outcome.lines[0]);
        assert!(outcome.files.is_empty());
    }

    #[test]
    fn missing_mesh_is_a_mesh_error() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("absent.mesh");
        let err = dispatch(&config(CommandKind::CheckMesh, &format!("mesh = \"{}\"", missing.display()), dir.path())).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
    }

    #[test]
    fn failed_checks_become_an_error() {
        let mut outcome = Outcome::default();
        outcome.check(true, "fine".into());
        assert!(outcome.verdict().is_ok());
        outcome.check(false, "broken".into());
        match outcome.verdict() {
            Err(CliError::Check(f)) => assert_eq!(f, ["broken"]),
            other => panic!("{other:?}"),
        }
    }
}
