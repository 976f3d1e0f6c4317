//! Flow solves with and without a gradient body force.
#![allow(dead_code)]

use std::sync::Arc;

use bdflow::flow::{solve_flow, FlowSolution, FlowSpaces};
use bdflow::harness::{build_case, CaseId, CaseParams};
use bdflow::mesh::{CellKind, StaggeredMesh};
use bdflow::polybasis::triangle_rule;
use bdflow::spaces::FeSpace;

/// `ψ = PSI_SCALE (x² + y²)`.
pub const PSI_SCALE: f64 = 1e6;

fn l2(mesh: &StaggeredMesh, space: &FeSpace, a: &[f64], b: Option<&[f64]>) -> f64 {
    let rule = triangle_rule(8).unwrap();
    let mut s = 0.0;
    for &t in &space.tris {
        for (x, w) in mesh.tris[t].simplex.quadrature(&rule) {
            let va = space.eval(mesh, t, a, x);
            let vb = b.map_or([0.0; 4], |b| space.eval(mesh, t, b, x));
            s += w * (0..space.components()).map(|c| (va[c] - vb[c]).powi(2)).sum::<f64>();
        }
    }
    s.sqrt()
}

fn solve(id: CaseId, n: usize, k: usize, gradient_force: bool) -> (StaggeredMesh, FlowSpaces, FlowSolution) {
    let case = build_case(id, CaseParams::default()).unwrap();
    let mesh = case.mesh(1.0 / n as f64, CellKind::Quad).unwrap();
    let spaces = FlowSpaces::new(&mesh, k, false).unwrap();
    let mut p = case.flow_params();
    if gradient_force {
        let (fb, fd) = (p.f_b.clone(), p.f_d.clone());
        p.f_b = Arc::new(move |x| {
            let f = fb(x);
            [f[0] + 2.0 * PSI_SCALE * x[0], f[1] + 2.0 * PSI_SCALE * x[1]]
        });
        p.f_d = Arc::new(move |x| {
            let f = fd(x);
            [f[0] + 2.0 * PSI_SCALE * x[0], f[1] + 2.0 * PSI_SCALE * x[1]]
        });
    }
    let sol = solve_flow(&mesh, &spaces, &p, &case.boundary_data()).unwrap();
    (mesh, spaces, sol)
}

/// Effect of adding `∇ψ` to the momentum sources.
#[derive(Debug, Clone, Copy)]
pub struct Shift {
    /// `‖u_{B,h}^ψ - u_{B,h}‖ / ‖u_{B,h}‖`.
    pub velocity: f64,
    /// `‖p_{B,h}^ψ - p_{B,h}‖`.
    pub pressure: f64,
}

pub fn gradient_forcing_shift(id: CaseId, n: usize, k: usize) -> Shift {
    let (mesh, spaces, base) = solve(id, n, k, false);
    let (_, _, forced) = solve(id, n, k, true);
    let u = l2(&mesh, &spaces.hb, &base.u_b, None);
    Shift {
        velocity: l2(&mesh, &spaces.hb, &forced.u_b, Some(&base.u_b)) / u,
        pressure: l2(&mesh, &spaces.qb, &forced.p_b, Some(&base.p_b)),
    }
}

/// Base problems used for the check: `(case, 1/h, k)`.
pub const LEVELS: [(CaseId, usize, usize); 3] = [(CaseId::Ex2, 4, 1), (CaseId::Ex2, 8, 1), (CaseId::Ex2, 4, 2)];
