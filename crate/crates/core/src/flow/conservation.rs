use super::{FlowParams, FlowSolution, FlowSpaces};
use crate::assembly::Rules;
use crate::error::Result;
use crate::mesh::{EdgeClass, StaggeredMesh, Subdomain};
use crate::spaces::{divergence, project_edge, BoundaryData, CellwiseProjection, SpaceKind};

use super::forms::edges_where;

/// Pointwise residuals of the strong mass conservation property.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport {
    /// `max |∇·u_{B,h} - 𝕡_h g_B|` over Brinkman subtriangles.
    pub div_ub_max: f64,
    /// `max |u_{B,h}·n - u_{D,h}·n|` on `Γ`.
    pub iface_jump_max: f64,
    /// `max |u_{B,h}·n - Π_{h,Γ_B} g1|` on `Γ_B`.
    pub gamma_b_flux_max: f64,
    /// `max |∇·u_{D,h} - 𝕡_h f|` over Darcy subtriangles.
    pub div_ud_residual: f64,
    /// Largest velocity magnitude sampled.
    pub velocity_scale: f64,
}

impl ConservationReport {
    pub fn max_residual(&self) -> f64 {
        self.div_ub_max
            .max(self.iface_jump_max)
            .max(self.gamma_b_flux_max)
            .max(self.div_ud_residual)
    }

    /// All residuals at most `tol` times the velocity scale (at least 1).
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol * self.velocity_scale.max(1.0)
    }
}

/// Samples the conservation residuals at quadrature points.
pub fn verify_conservation(
    mesh: &StaggeredMesh,
    spaces: &FlowSpaces,
    params: &FlowParams,
    bdata: &BoundaryData,
    sol: &FlowSolution,
) -> Result<ConservationReport> {
    let rules = Rules::for_degree(spaces.k)?;
    let k = spaces.k;
    let tb: Vec<usize> = mesh.tris_in(Subdomain::Brinkman).collect();
    let td: Vec<usize> = mesh.tris_in(Subdomain::Darcy).collect();
    let mut scale: f64 = 0.0;

    let gb = CellwiseProjection::new(mesh, &tb, k - 1, &*params.g_b)?;
    let mut div_ub_max: f64 = 0.0;
    for &t in &tb {
        for (x, _) in mesh.tris[t].simplex.quadrature(&rules.tri) {
            let (v, g) = spaces.hb.eval_with_grad(mesh, t, &sol.u_b, x);
            scale = scale.max(v[0].hypot(v[1]));
            let d = divergence(SpaceKind::HB, &g)[0];
            div_ub_max = div_ub_max.max((d - gb.eval(mesh, t, x)).abs());
        }
    }

    let fp = CellwiseProjection::new(mesh, &td, k - 1, &*params.f)?;
    let mut div_ud_residual: f64 = 0.0;
    for &t in &td {
        for (x, _) in mesh.tris[t].simplex.quadrature(&rules.tri) {
            let (v, g) = spaces.hd.eval_with_grad(mesh, t, &sol.u_d, x);
            scale = scale.max(v[0].hypot(v[1]));
            let d = divergence(SpaceKind::HD, &g)[0];
            div_ud_residual = div_ud_residual.max((d - fp.eval(mesh, t, x) - sol.f_shift).abs());
        }
    }

    let mut iface_jump_max: f64 = 0.0;
    for e in edges_where(mesh, |c, _| c == EdgeClass::Interface) {
        let edge = &mesh.edges[e];
        let (tb_, td_) = (edge.tris[0], edge.tris[1]);
        for (s, _) in rules.edge.iter() {
            let x = edge.point(mesh, s[0]);
            let ub = spaces.hb.eval(mesh, tb_, &sol.u_b, x);
            let ud = spaces.hd.eval(mesh, td_, &sol.u_d, x);
            let n = edge.normal;
            let jump = (ub[0] - ud[0]) * n[0] + (ub[1] - ud[1]) * n[1];
            iface_jump_max = iface_jump_max.max(jump.abs());
        }
    }

    let gb_edges = edges_where(mesh, |c, s| c == EdgeClass::PrimalBoundary && s == Some(Subdomain::Brinkman));
    let mut gamma_b_flux_max: f64 = 0.0;
    for p in project_edge(mesh, &*bdata.g1, &gb_edges, k)? {
        let edge = &mesh.edges[p.edge];
        for (s, _) in rules.edge.iter() {
            let x = edge.point(mesh, s[0]);
            let u = spaces.hb.eval(mesh, edge.tris[0], &sol.u_b, x);
            let un = u[0] * edge.normal[0] + u[1] * edge.normal[1];
            gamma_b_flux_max = gamma_b_flux_max.max((un - p.eval(s[0])).abs());
        }
    }

    Ok(ConservationReport {
        div_ub_max,
        iface_jump_max,
        gamma_b_flux_max,
        div_ud_residual,
        velocity_scale: scale,
    })
}
