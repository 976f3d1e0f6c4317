use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{volume_rhs, Rules};
use crate::coeff::{scalar_tensor, Coefficient};
use crate::error::{Error, Result};
use crate::flow::{solve_flow, verify_conservation, ConservationReport, FlowParams, FlowSolution, FlowSpaces};
use crate::mesh::{build_uniform_primal, subdivide, CellKind, PrimalMesh, Rect, StaggeredMesh, Subdomain};
use crate::spaces::{BoundaryData, DarcyBoundary};
use crate::transport::{
    DiscreteVelocity, StabilityReport, TransportParams, TransportSpaces, TransportState, TransportSystem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DemoId {
    /// Lake over an aquifer with a disc of solute.
    Ex3,
    /// Step interface with random permeability.
    Ex4,
}

impl DemoId {
    pub fn name(self) -> &'static str {
        match self {
            DemoId::Ex3 => "ex3",
            DemoId::Ex4 => "ex4",
        }
    }
}

impl fmt::Display for DemoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DemoId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex3" => Ok(DemoId::Ex3),
            "ex4" => Ok(DemoId::Ex4),
            _ => Err(Error::Argument(format!("unknown demo `{s}` (expected ex3 or ex4)"))),
        }
    }
}

/// Setup of a demo run. `None` fields take the demo's own values.
#[derive(Debug, Clone)]
pub struct DemoConfig {
    pub id: DemoId,
    pub k: usize,
    /// Mesh size of the generated ex3 grid.
    pub h: f64,
    /// The ingested primal mesh; required for ex4.
    pub mesh: Option<PrimalMesh>,
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub k_diff: Option<f64>,
    /// Uniform Darcy permeability, replacing the demo's own.
    pub k_darcy: Option<f64>,
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_times: Vec<f64>,
    /// Seed of the ex4 permeability field.
    pub seed: u64,
    /// Steps between recorded centroids.
    pub centroid_stride: usize,
}

impl DemoConfig {
    pub fn ex3() -> Self {
        Self {
            id: DemoId::Ex3,
            k: 1,
            h: 1.0 / 16.0,
            mesh: None,
            epsilon: None,
            alpha: None,
            k_diff: None,
            k_darcy: None,
            dt: 1e-3,
            t_final: 6.0,
            snapshot_times: vec![1.0, 3.0, 6.0],
            seed: 0,
            centroid_stride: 100,
        }
    }

    pub fn ex4(mesh: PrimalMesh) -> Self {
        Self {
            id: DemoId::Ex4,
            mesh: Some(mesh),
            t_final: 20.0,
            snapshot_times: vec![1.0, 5.0, 10.0, 20.0],
            seed: 4,
            centroid_stride: 1000,
            ..Self::ex3()
        }
    }

    fn snapshot_steps(&self) -> Result<Vec<usize>> {
        self.snapshot_times
            .iter()
            .map(|&t| {
                let n = t / self.dt;
                if !(t >= 0.0 && t <= self.t_final * (1.0 + 1e-12)) || (n - n.round()).abs() > 1e-6 {
                    Err(Error::Config(format!(
                        "snapshot time {t} is not a step of dt = {} within [0, {}]",
                        self.dt, self.t_final
                    )))
                } else {
                    Ok(n.round() as usize)
                }
            })
            .collect()
    }
}

/// Everything a demo run produces.
#[derive(Debug)]
pub struct DemoResult {
    pub id: DemoId,
    pub mesh: StaggeredMesh,
    pub flow_spaces: FlowSpaces,
    pub flow: FlowSolution,
    pub conservation: ConservationReport,
    pub transport_spaces: TransportSpaces,
    pub initial: TransportState,
    pub snapshots: Vec<TransportState>,
    pub report: StabilityReport,
    /// `(t, ∫ x c / ∫ c)` every `centroid_stride` steps.
    pub centroid: Vec<(f64, f64)>,
}

impl DemoResult {
    /// Whether the concentration-weighted centroid never moves left by more
    /// than `tol`.
    pub fn centroid_monotone(&self, tol: f64) -> bool {
        self.centroid.windows(2).all(|w| w[1].1 >= w[0].1 - tol)
    }

    /// Smallest and largest concentration at quadrature points of `state`.
    pub fn range(&self, state: &TransportState) -> (f64, f64) {
        let uh = &self.transport_spaces.uh;
        let rule = Rules::for_degree(self.transport_spaces.k).map(|r| r.tri);
        let Ok(rule) = rule else { return (f64::NAN, f64::NAN) };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (t, tri) in self.mesh.tris.iter().enumerate() {
            for (x, _) in tri.simplex.quadrature(&rule) {
                let v = uh.eval(&self.mesh, t, &state.c, x)[0];
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }
}

struct Setup {
    primal: PrimalMesh,
    flow: FlowParams,
    bdata: BoundaryData,
    transport: TransportParams,
    dirichlet: bool,
}

fn ex3_setup(cfg: &DemoConfig) -> Result<Setup> {
    let primal = build_uniform_primal(
        Rect::new(0.0, 1.0, 0.5, 1.0),
        Rect::new(0.0, 1.0, 0.0, 0.5),
        cfg.h,
        CellKind::Quad,
    )?;
    let flow = FlowParams::new(
        cfg.epsilon.unwrap_or(0.1),
        Coefficient::scalar(cfg.alpha.unwrap_or(1.0)),
        Coefficient::scalar(cfg.k_darcy.unwrap_or(1e-2)),
    );
    let inflow = |x: [f64; 2]| {
        if x[0] <= 1e-12 {
            [x[1] * (1.5 - x[1]) / 5.0, 0.0]
        } else {
            [0.0, 0.0]
        }
    };
    let mut bdata = BoundaryData::homogeneous();
    bdata.brinkman_velocity = Some(Arc::new(inflow));
    bdata.g1 = Arc::new(move |x, n| {
        let u = inflow(x);
        u[0] * n[0] + u[1] * n[1]
    });
    bdata.darcy_kind = Arc::new(|x| if x[1] <= 1e-12 { DarcyBoundary::Pressure } else { DarcyBoundary::Flux });
    bdata.p_bc = Arc::new(|_| -0.05);
    let mut transport = TransportParams::new(Coefficient::scalar(cfg.k_diff.unwrap_or(1e-5)), cfg.dt, cfg.t_final);
    transport.c0 = Arc::new(|x| {
        if (x[0] - 0.1).hypot(x[1] - 0.7) < 0.1 {
            1.0
        } else {
            0.0
        }
    });
    Ok(Setup {
        primal,
        flow,
        bdata,
        transport,
        dirichlet: true,
    })
}

fn ex4_setup(cfg: &DemoConfig) -> Result<Setup> {
    let primal = cfg
        .mesh
        .clone()
        .ok_or_else(|| Error::Config("ex4 needs a mesh file (--mesh)".into()))?;
    let k_darcy = match cfg.k_darcy {
        Some(k) => Coefficient::scalar(k),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let per_cell = primal
                .cells
                .iter()
                .map(|c| match c.subdomain {
                    Subdomain::Darcy => scalar_tensor(rng.random_range(1e-6..=1e-3)),
                    Subdomain::Brinkman => scalar_tensor(1.0),
                })
                .collect();
            Coefficient::PerCell(Arc::new(per_cell))
        }
    };
    let flow = FlowParams::new(
        cfg.epsilon.unwrap_or(1.0),
        Coefficient::scalar(cfg.alpha.unwrap_or(1.0)),
        k_darcy,
    );
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y0 = f64::INFINITY;
    for v in &primal.vertices {
        x0 = x0.min(v[0]);
        x1 = x1.max(v[0]);
        y0 = y0.min(v[1]);
    }
    let tol = 1e-9 * (x1 - x0).max(1.0);
    let mut bdata = BoundaryData::homogeneous();
    bdata.g1 = Arc::new(move |x, _| {
        let q = (x[1] - 4.0) * (8.0 - x[1]);
        if (x[0] - x0).abs() <= tol {
            0.25 * q
        } else if (x[0] - x1).abs() <= tol {
            0.1875 * q
        } else {
            0.0
        }
    });
    bdata.darcy_kind = Arc::new(move |x| {
        if (x[1] - y0).abs() <= tol {
            DarcyBoundary::Pressure
        } else {
            DarcyBoundary::Flux
        }
    });
    bdata.p_bc = Arc::new(|_| -1e3);
    bdata.c_in = Arc::new(|_, _| 1.0);
    let mut transport = TransportParams::new(Coefficient::scalar(cfg.k_diff.unwrap_or(1.0)), cfg.dt, cfg.t_final);
    transport.source = Arc::new(|_, _, _| 0.01);
    Ok(Setup {
        primal,
        flow,
        bdata,
        transport,
        dirichlet: false,
    })
}

/// The solved flow of a demo together with its transport data.
pub struct DemoFlow {
    pub mesh: StaggeredMesh,
    pub flow_spaces: FlowSpaces,
    pub flow: FlowSolution,
    pub conservation: ConservationReport,
    pub bdata: BoundaryData,
    pub transport: TransportParams,
}

impl fmt::Debug for DemoFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DemoFlow")
            .field("subtriangles", &self.mesh.tris.len())
            .field("conservation", &self.conservation)
            .finish_non_exhaustive()
    }
}

/// Builds the demo mesh and solves the flow problem.
pub fn solve_demo_flow(cfg: &DemoConfig) -> Result<DemoFlow> {
    let setup = match cfg.id {
        DemoId::Ex3 => ex3_setup(cfg)?,
        DemoId::Ex4 => ex4_setup(cfg)?,
    };
    setup.transport.validate()?;
    setup.flow.validate()?;
    let mesh = subdivide(&setup.primal);
    let flow_spaces = FlowSpaces::new(&mesh, cfg.k, setup.dirichlet)?;
    let flow = solve_flow(&mesh, &flow_spaces, &setup.flow, &setup.bdata)?;
    let conservation = verify_conservation(&mesh, &flow_spaces, &setup.flow, &setup.bdata, &flow)?;
    Ok(DemoFlow {
        mesh,
        flow_spaces,
        flow,
        conservation,
        bdata: setup.bdata,
        transport: setup.transport,
    })
}

/// Solves the flow once, then advances the concentration to `t_final`.
pub fn run_demo(cfg: &DemoConfig) -> Result<DemoResult> {
    run_demo_observed(cfg, |_, _, _| Ok(()))
}

/// As [`run_demo`], calling `observer` on every state including the initial one.
pub fn run_demo_observed<F>(cfg: &DemoConfig, mut observer: F) -> Result<DemoResult>
where
    F: FnMut(&StaggeredMesh, &TransportSpaces, &TransportState) -> Result<()>,
{
    let snap_steps = cfg.snapshot_steps()?;
    if cfg.centroid_stride == 0 {
        return Err(Error::Config("centroid stride must be positive".into()));
    }
    let DemoFlow {
        mesh,
        flow_spaces,
        flow,
        conservation,
        bdata,
        transport,
    } = solve_demo_flow(cfg)?;
    let transport_spaces = TransportSpaces::new(&mesh, cfg.k)?;
    let velocity = DiscreteVelocity {
        spaces: &flow_spaces,
        solution: &flow,
    };
    let system = TransportSystem::new(&mesh, &transport_spaces, &transport, &velocity, &bdata)?;

    let uh = &transport_spaces.uh;
    let rules = Rules::for_degree(cfg.k)?;
    let all: Vec<usize> = (0..mesh.tris.len()).collect();
    let mut first_moment = vec![0.0; uh.ndofs];
    volume_rhs(&mesh, uh, &all, &rules.tri, &mut first_moment, |_, x, q| x[0] * q.v[0]);
    let mut zeroth = vec![0.0; uh.ndofs];
    volume_rhs(&mesh, uh, &all, &rules.tri, &mut zeroth, |_, _, q| q.v[0]);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut initial = None;
    let mut snapshots = Vec::new();
    let mut centroid = Vec::new();
    let last = transport.steps();
    let run = system.run(|st| {
        observer(&mesh, &transport_spaces, st)?;
        if st.step == 0 {
            initial = Some(st.clone());
        }
        if snap_steps.contains(&st.step) {
            snapshots.push(st.clone());
        }
        if st.step % cfg.centroid_stride == 0 || st.step == last {
            let m = dot(&zeroth, &st.c);
            if m != 0.0 {
                centroid.push((st.t, dot(&first_moment, &st.c) / m));
            }
        }
        Ok(())
    })?;
    let initial = initial.ok_or_else(|| Error::Solver("transport run produced no initial state".into()))?;
    log::info!(
        "{} finished: {} steps, stability ratio {:.3e}",
        cfg.id,
        last,
        run.report.ratio
    );
    Ok(DemoResult {
        id: cfg.id,
        mesh,
        flow_spaces,
        flow,
        conservation,
        transport_spaces,
        initial,
        snapshots,
        report: run.report,
        centroid,
    })
}
