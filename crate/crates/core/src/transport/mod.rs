//! Upwind staggered DG transport with backward Euler time stepping.

use std::fmt;
use std::sync::Arc;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::flow::{FlowSolution, FlowSpaces};
use crate::mesh::{StaggeredMesh, Subdomain};
use crate::polybasis::Point;
use crate::spaces::{build_space, divergence, FeSpace, ScalarFn, SpaceKind, VectorFn};

mod forms;
mod stepper;

pub use forms::{assemble_transport, BoundaryPoint, TransportBlocks};
pub use stepper::{
    run_transport, step_backward_euler, EnergyBalance, StabilityReport, StabilityRow, TransportRun, TransportSystem,
};

/// A function of position and time.
pub type SpaceTimeFn = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;
/// A source that may differ between the two subdomains.
pub type SourceFn = Arc<dyn Fn(Point, f64, Subdomain) -> f64 + Send + Sync>;

/// Coefficients and data of the transport equation.
///
/// The porosity `phi` and the Darcy source `f` are read on `Ω_D` only. In
/// `Ω_B` the porosity is 1 and there is no source.
#[derive(Clone)]
pub struct TransportParams {
    /// Diffusion-dispersion tensor `K`.
    pub k_diff: Coefficient,
    pub phi: ScalarFn,
    pub source: SourceFn,
    /// Injected concentration `ĉ`.
    pub c_hat: SpaceTimeFn,
    pub c0: ScalarFn,
    /// Darcy source `f`, split into `f⁺` and `f⁻` pointwise.
    pub f: ScalarFn,
    pub dt: f64,
    pub t_final: f64,
    /// Set when `s`, `ĉ` and `c_in` do not depend on time, so the right-hand
    /// side is assembled once.
    pub steady_data: bool,
}

impl fmt::Debug for TransportParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransportParams")
            .field("k_diff", &self.k_diff)
            .field("dt", &self.dt)
            .field("t_final", &self.t_final)
            .field("steady_data", &self.steady_data)
            .finish_non_exhaustive()
    }
}

impl TransportParams {
    /// Unit porosity, zero data.
    pub fn new(k_diff: Coefficient, dt: f64, t_final: f64) -> Self {
        Self {
            k_diff,
            phi: Arc::new(|_| 1.0),
            source: Arc::new(|_, _, _| 0.0),
            c_hat: Arc::new(|_, _| 0.0),
            c0: Arc::new(|_| 0.0),
            f: Arc::new(|_| 0.0),
            dt,
            t_final,
            steady_data: true,
        }
    }

    /// Number of time steps, `round(T / Δt)`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt && self.t_final.is_finite()) {
            return Err(Error::Config(format!(
                "final time {} must be at least the time step {}",
                self.t_final, self.dt
            )));
        }
        let ratio = self.t_final / self.dt;
        if (ratio - ratio.round()).abs() > 0.01 {
            return Err(Error::Config(format!(
                "T/dt = {ratio} is not within 1% of an integer"
            )));
        }
        self.k_diff.check_eigenvalues("K", true)
    }
}

/// Discrete spaces for the concentration and the diffusive flux.
#[derive(Debug, Clone)]
pub struct TransportSpaces {
    pub k: usize,
    pub uh: FeSpace,
    pub wh: FeSpace,
}

impl TransportSpaces {
    pub fn new(mesh: &StaggeredMesh, k: usize) -> Result<Self> {
        Ok(Self {
            k,
            uh: build_space(SpaceKind::UH, mesh, k)?,
            wh: build_space(SpaceKind::WH, mesh, k)?,
        })
    }
}

/// Concentration and diffusive flux at time level `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportState {
    pub step: usize,
    pub t: f64,
    pub c: Vec<f64>,
    pub z: Vec<f64>,
}

/// The advecting velocity, evaluated on one subtriangle.
pub trait VelocityField: Send + Sync {
    /// Velocity and its divergence at `x` in subtriangle `t`.
    fn eval(&self, mesh: &StaggeredMesh, t: usize, x: Point) -> (Point, f64);
}

/// `u_h` from a flow solution.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteVelocity<'a> {
    pub spaces: &'a FlowSpaces,
    pub solution: &'a FlowSolution,
}

impl VelocityField for DiscreteVelocity<'_> {
    fn eval(&self, mesh: &StaggeredMesh, t: usize, x: Point) -> (Point, f64) {
        let (space, coeffs) = match mesh.tris[t].subdomain {
            Subdomain::Brinkman => (&self.spaces.hb, &self.solution.u_b),
            Subdomain::Darcy => (&self.spaces.hd, &self.solution.u_d),
        };
        let (v, g) = space.eval_with_grad(mesh, t, coeffs, x);
        ([v[0], v[1]], divergence(space.kind, &g)[0])
    }
}

/// A velocity given in closed form.
#[derive(Clone)]
pub struct AnalyticVelocity {
    pub u: VectorFn,
    pub div: ScalarFn,
}

impl AnalyticVelocity {
    pub fn constant(u: Point) -> Self {
        Self {
            u: Arc::new(move |_| u),
            div: Arc::new(|_| 0.0),
        }
    }
}

impl VelocityField for AnalyticVelocity {
    fn eval(&self, _: &StaggeredMesh, _: usize, x: Point) -> (Point, f64) {
        ((self.u)(x), (self.div)(x))
    }
}
