use std::fmt;
use std::sync::Arc;

use crate::polybasis::Point;

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;
/// A function of position and the outward unit normal.
pub type FluxFn = Arc<dyn Fn(Point, Point) -> f64 + Send + Sync>;

/// Condition imposed on an edge of `Γ_D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DarcyBoundary {
    /// `u_D·n = g2`.
    Flux,
    /// `p_D = p_bc`.
    Pressure,
}

/// Boundary data for flow and transport.
#[derive(Clone)]
pub struct BoundaryData {
    /// `g1(x, n)`: prescribed `u_B·n` on `Γ_B`.
    pub g1: FluxFn,
    /// `g2(x, n)`: prescribed `u_D·n` on flux edges of `Γ_D`.
    pub g2: FluxFn,
    /// Condition kind on `Γ_D`, decided at edge midpoints.
    pub darcy_kind: Arc<dyn Fn(Point) -> DarcyBoundary + Send + Sync>,
    /// Darcy pressure on pressure edges.
    pub p_bc: ScalarFn,
    /// Full velocity on `Γ_B`; when present `g1` must equal its normal part.
    pub brinkman_velocity: Option<VectorFn>,
    /// Inflow concentration `c_in(x, t)`.
    pub c_in: Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryData")
            .field("brinkman_velocity", &self.brinkman_velocity.is_some())
            .finish_non_exhaustive()
    }
}

impl Default for BoundaryData {
    fn default() -> Self {
        Self::homogeneous()
    }
}

impl BoundaryData {
    /// No-flux boundaries everywhere and zero inflow concentration.
    pub fn homogeneous() -> Self {
        Self {
            g1: Arc::new(|_, _| 0.0),
            g2: Arc::new(|_, _| 0.0),
            darcy_kind: Arc::new(|_| DarcyBoundary::Flux),
            p_bc: Arc::new(|_| 0.0),
            brinkman_velocity: None,
            c_in: Arc::new(|_, _| 0.0),
        }
    }
}
