//! Primal partitions, the dual subdivision and the edge taxonomy.

mod io;
mod primal;
mod staggered;

pub use io::{ingest_primal, parse_primal, write_primal};
pub use primal::{
    build_rectangular_primal, build_uniform_primal, BoundaryTag, CellKind, PrimalCell, PrimalMesh,
    Rect, Subdomain,
};
pub use staggered::{subdivide, Edge, EdgeClass, StaggeredMesh, SubTriangle};

use crate::polybasis::{Point, QuadratureRule};

/// Inflow flags at the quadrature points of every boundary edge.
#[derive(Debug, Clone)]
pub struct FlowTagging {
    /// `(edge id, inflow flag per quadrature point)` for every edge on `∂Ω`.
    pub edges: Vec<(usize, Vec<bool>)>,
}

impl FlowTagging {
    pub fn inflow(&self, edge: usize) -> Option<&[bool]> {
        self.edges
            .binary_search_by_key(&edge, |(e, _)| *e)
            .ok()
            .map(|i| self.edges[i].1.as_slice())
    }
}

/// Marks each quadrature point on `∂Ω` as inflow (`u·n < 0`) or outflow.
pub fn classify_boundary_flow(
    mesh: &StaggeredMesh,
    normal_data: impl Fn(Point, Point) -> f64,
    rule: &QuadratureRule,
) -> FlowTagging {
    let edges = mesh
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_boundary())
        .map(|(i, e)| {
            let flags = rule
                .iter()
                .map(|(s, _)| normal_data(e.point(mesh, s[0]), e.normal) < 0.0)
                .collect();
            (i, flags)
        })
        .collect();
    FlowTagging { edges }
}
