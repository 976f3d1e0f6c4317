use std::borrow::Cow;
use std::fmt::Write as _;

use super::forms::{darcy_source, porosity};
use super::{assemble_transport, TransportBlocks, TransportParams, TransportSpaces, TransportState, VelocityField};
use crate::assembly::{local_dofs, Rules};
use crate::error::{Error, Result};
use crate::mesh::StaggeredMesh;
use crate::sparse::{SparseLu, SparseMatrix};
use crate::spaces::{project_l2, BoundaryData};

const SOLVE_TOLERANCE: f64 = 1e-10;
/// Largest number of flux unknowns coupled within one primal cell.
const MAX_FLUX_BLOCK: usize = 512;

/// Right-hand side and data norms at one time level.
#[derive(Debug, Clone)]
struct StepData {
    /// `(φ s, q) + (ĉ f⁺, q)`.
    source: Vec<f64>,
    /// `-(c_in u·n, q)_{Γ_in}`.
    inflow: Vec<f64>,
    s_norm2: f64,
    c_in_norm2: f64,
    c_hat_norm2: f64,
}

/// Both sides of the discrete energy identity for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    pub lhs: f64,
    pub rhs: f64,
    /// Sum of the magnitudes of all terms.
    pub scale: f64,
}

impl EnergyBalance {
    pub fn relative_residual(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).abs() / self.scale
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRow {
    pub step: usize,
    pub t: f64,
    /// `‖φ^{1/2} c_h‖`.
    pub phi_c_norm: f64,
    /// `‖K^{-1/2} z_h‖`.
    pub kinv_z_norm: f64,
    /// Mass entering through `Γ_in` per unit time.
    pub influx: f64,
    /// Mass leaving through `∂Ω` per unit time, correction terms included.
    pub outflux: f64,
    /// `∫ φ c_h`.
    pub mass: f64,
    /// Relative defect of the mass balance over the step.
    pub mass_residual: f64,
    /// Relative defect of the energy identity over the step.
    pub energy_residual: f64,
}

/// Per-step diagnostics and both sides of the stability bound.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub rows: Vec<StabilityRow>,
    /// `2Δt Σ ‖K^{-1/2} z^{n+1}‖² + ‖φ^{1/2} c^N‖²`.
    pub lhs: f64,
    /// The data side of the bound without its constant.
    pub rhs: f64,
    pub ratio: f64,
}

impl StabilityReport {
    pub fn max_energy_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.energy_residual).fold(0.0, f64::max)
    }

    pub fn max_mass_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.mass_residual).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,t,phi_c_norm,kinv_z_norm,influx,outflux,mass,mass_residual,energy_residual\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.6},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e},{:.3e}",
                r.step, r.t, r.phi_c_norm, r.kinv_z_norm, r.influx, r.outflux, r.mass, r.mass_residual, r.energy_residual
            );
        }
        s
    }
}

/// Final state of a run with its diagnostics.
#[derive(Debug, Clone)]
pub struct TransportRun {
    pub final_state: TransportState,
    pub report: StabilityReport,
}

/// The assembled and factored fully discrete scheme.
pub struct TransportSystem<'a> {
    mesh: &'a StaggeredMesh,
    spaces: &'a TransportSpaces,
    params: &'a TransportParams,
    bdata: &'a BoundaryData,
    pub blocks: TransportBlocks,
    lu: SparseLu,
    /// `M_K⁻¹ T*`: the flux of a concentration.
    flux_of: SparseMatrix,
    rules: Rules,
    steady: Option<StepData>,
    mass_one: Vec<f64>,
    reaction_one: Vec<f64>,
    boundary_one: Vec<f64>,
}

impl std::fmt::Debug for TransportSystem<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransportSystem")
            .field("uh", &self.spaces.uh.ndofs)
            .field("wh", &self.spaces.wh.ndofs)
            .finish_non_exhaustive()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<'a> TransportSystem<'a> {
    pub fn new(
        mesh: &'a StaggeredMesh,
        spaces: &'a TransportSpaces,
        params: &'a TransportParams,
        velocity: &dyn VelocityField,
        bdata: &'a BoundaryData,
    ) -> Result<Self> {
        let blocks = assemble_transport(mesh, spaces, params, velocity, bdata)?;
        let rules = Rules::for_degree(spaces.k)?;
        let dt = params.dt;
        let c_block = blocks
            .mass
            .scaled(1.0 / dt)
            .add(&blocks.reaction)
            .add(&blocks.convection)
            .add(&blocks.upwind)
            .add(&blocks.outflow)
            .add(&blocks.correction);
        // z = M_K⁻¹ T* c, with M_K block diagonal over primal cells
        let flux_of = blocks.m_kinv.block_inverse(MAX_FLUX_BLOCK)?.mul(&blocks.t_star);
        let schur = c_block.add(&blocks.t.mul(&flux_of));
        let lu = SparseLu::factor(&schur)?;
        let transpose_one = |m: &SparseMatrix| m.transpose().mul_vec(&blocks.one);
        let mass_one = transpose_one(&blocks.mass);
        let reaction_one = transpose_one(&blocks.reaction);
        let boundary_one = transpose_one(&blocks.outflow.add(&blocks.correction));
        let mut system = Self {
            mesh,
            spaces,
            params,
            bdata,
            blocks,
            lu,
            flux_of,
            rules,
            steady: None,
            mass_one,
            reaction_one,
            boundary_one,
        };
        if params.steady_data {
            system.steady = Some(system.step_data(0.0));
        }
        Ok(system)
    }

    fn step_data(&self, t: f64) -> StepData {
        let (mesh, params, uh) = (self.mesh, self.params, &self.spaces.uh);
        let mut source = vec![0.0; uh.ndofs];
        let (mut s_norm2, mut c_hat_norm2) = (0.0, 0.0);
        for (ti, tri) in mesh.tris.iter().enumerate() {
            let dofs = local_dofs(uh, ti);
            for (x, w) in tri.simplex.quadrature(&self.rules.tri) {
                let phi = porosity(params, tri.subdomain, x);
                let s = (params.source)(x, t, tri.subdomain);
                let f_plus = darcy_source(params, tri.subdomain, x).max(0.0);
                let c_hat = if f_plus > 0.0 { (params.c_hat)(x, t) } else { 0.0 };
                s_norm2 += w * phi * s * s;
                c_hat_norm2 += w * c_hat * c_hat * f_plus;
                let val = phi * s + c_hat * f_plus;
                if val == 0.0 {
                    continue;
                }
                let sh = uh.shapes(mesh, ti, x);
                for (i, gi) in dofs.iter().enumerate() {
                    if let Some(gi) = gi {
                        source[*gi] += w * val * sh.values[i][0];
                    }
                }
            }
        }
        let mut inflow = vec![0.0; uh.ndofs];
        let mut c_in_norm2 = 0.0;
        for p in self.blocks.boundary.iter().filter(|p| p.inflow) {
            let c_in = (self.bdata.c_in)(p.x, t);
            c_in_norm2 += p.weight * p.un.abs() * c_in * c_in;
            let val = -c_in * p.un * p.weight;
            if val == 0.0 {
                continue;
            }
            let sh = uh.shapes(mesh, p.tri, p.x);
            for (i, gi) in local_dofs(uh, p.tri).iter().enumerate() {
                if let Some(gi) = gi {
                    inflow[*gi] += val * sh.values[i][0];
                }
            }
        }
        StepData {
            source,
            inflow,
            s_norm2,
            c_in_norm2,
            c_hat_norm2,
        }
    }

    fn data_at(&self, t: f64) -> Cow<'_, StepData> {
        match &self.steady {
            Some(d) => Cow::Borrowed(d),
            None => Cow::Owned(self.step_data(t)),
        }
    }

    /// `c_h^0` as the L² projection of `c⁰`, with the matching flux.
    pub fn initial_state(&self) -> Result<TransportState> {
        let c0 = &self.params.c0;
        let c = project_l2(&self.spaces.uh, self.mesh, &|x| [c0(x), 0.0, 0.0, 0.0])?;
        let z = self.flux_of.mul_vec(&c);
        Ok(TransportState { step: 0, t: 0.0, c, z })
    }

    fn advance(&self, state: &TransportState, data: &StepData) -> Result<TransportState> {
        let step = state.step + 1;
        let mc = self.blocks.mass.mul_vec(&state.c);
        let rhs: Vec<f64> = mc
            .iter()
            .zip(&data.source)
            .zip(&data.inflow)
            .map(|((m, s), i)| m / self.params.dt + s + i)
            .collect();
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        let c = self.lu.solve(&rhs, SOLVE_TOLERANCE).map_err(|e| match e {
            Error::Solver(msg) if msg.contains("non-finite") => Error::NonFinite { step },
            e => e,
        })?;
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        let z = self.flux_of.mul_vec(&c);
        Ok(TransportState {
            step,
            t: step as f64 * self.params.dt,
            c,
            z,
        })
    }

    /// One backward Euler step.
    pub fn step(&self, state: &TransportState) -> Result<TransportState> {
        let data = self.data_at((state.step + 1) as f64 * self.params.dt);
        self.advance(state, &data)
    }

    fn energy(&self, prev: &TransportState, next: &TransportState, data: &StepData) -> EnergyBalance {
        let b = &self.blocks;
        let (c0, c1) = (&prev.c, &next.c);
        let d: Vec<f64> = c1.iter().zip(c0).map(|(a, b)| a - b).collect();
        let dt = self.params.dt;
        let terms = [
            b.m_kinv.bilinear(&next.z, &next.z),
            b.mass.bilinear(c1, c1) / (2.0 * dt),
            -b.mass.bilinear(c0, c0) / (2.0 * dt),
            b.mass.bilinear(&d, &d) / (2.0 * dt),
            b.div_form.bilinear(c1, c1),
            b.jump_form.bilinear(c1, c1),
            b.reaction.bilinear(c1, c1),
            b.boundary_abs.bilinear(c1, c1),
            b.primal_jump.bilinear(c1, c1),
        ];
        let rhs = dot(&data.source, c1) + dot(&data.inflow, c1);
        EnergyBalance {
            lhs: terms.iter().sum(),
            rhs,
            scale: terms.iter().map(|t| t.abs()).sum::<f64>() + rhs.abs(),
        }
    }

    fn row(&self, state: &TransportState) -> StabilityRow {
        StabilityRow {
            step: state.step,
            t: state.t,
            phi_c_norm: self.blocks.mass.bilinear(&state.c, &state.c).max(0.0).sqrt(),
            kinv_z_norm: self.blocks.m_kinv.bilinear(&state.z, &state.z).max(0.0).sqrt(),
            influx: 0.0,
            outflux: 0.0,
            mass: dot(&self.mass_one, &state.c),
            mass_residual: 0.0,
            energy_residual: 0.0,
        }
    }

    /// Runs all steps, handing every state (including the initial one) to
    /// `observer`.
    pub fn run(&self, mut observer: impl FnMut(&TransportState) -> Result<()>) -> Result<TransportRun> {
        let dt = self.params.dt;
        let mut state = self.initial_state()?;
        observer(&state)?;
        let mut rows = vec![self.row(&state)];
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for _ in 0..self.params.steps() {
            let data = self.data_at((state.step + 1) as f64 * dt);
            let next = self.advance(&state, &data)?;
            let mut row = self.row(&next);
            row.energy_residual = self.energy(&state, &next, &data).relative_residual();
            row.influx = self.blocks.one.iter().zip(&data.inflow).map(|(a, b)| a * b).sum();
            row.outflux = dot(&self.boundary_one, &next.c);
            let sources = dot(&self.blocks.one, &data.source) - dot(&self.reaction_one, &next.c);
            let prev_mass = rows.last().map_or(0.0, |r| r.mass);
            let defect = row.mass - prev_mass - dt * (row.influx - row.outflux + sources);
            let denom = row
                .mass
                .abs()
                .max(prev_mass.abs())
                .max(dt * (row.influx.abs() + row.outflux.abs() + sources.abs()));
            row.mass_residual = if denom > 0.0 { defect.abs() / denom } else { 0.0 };
            lhs += 2.0 * dt * row.kinv_z_norm.powi(2);
            rhs += dt * (data.s_norm2 + data.c_in_norm2 + data.c_hat_norm2);
            observer(&next)?;
            rows.push(row);
            state = next;
        }
        lhs += rows.last().map_or(0.0, |r| r.phi_c_norm.powi(2));
        let mut c0_norm2 = 0.0;
        for tri in &self.mesh.tris {
            for (x, w) in tri.simplex.quadrature(&self.rules.tri) {
                c0_norm2 += w * (self.params.c0)(x).powi(2);
            }
        }
        rhs += self.blocks.phi_max * c0_norm2;
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Ok(TransportRun {
            final_state: state,
            report: StabilityReport { rows, lhs, rhs, ratio },
        })
    }
}

/// One backward Euler step of an assembled system.
pub fn step_backward_euler(system: &TransportSystem<'_>, state: &TransportState) -> Result<TransportState> {
    system.step(state)
}

/// Assembles, factors and runs the scheme, keeping every state.
pub fn run_transport(
    mesh: &StaggeredMesh,
    spaces: &TransportSpaces,
    params: &TransportParams,
    velocity: &dyn VelocityField,
    bdata: &BoundaryData,
) -> Result<(Vec<TransportState>, StabilityReport)> {
    let system = TransportSystem::new(mesh, spaces, params, velocity, bdata)?;
    let mut states = Vec::new();
    let run = system.run(|s| {
        states.push(s.clone());
        Ok(())
    })?;
    Ok((states, run.report))
}
