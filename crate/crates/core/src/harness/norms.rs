use crate::error::Result;
use crate::flow::{FlowSolution, FlowSpaces};
use crate::mesh::{StaggeredMesh, Subdomain};
use crate::polybasis::{triangle_rule, Point};
use crate::spaces::{FeSpace, Value};
use crate::transport::{TransportSpaces, TransportState};

use super::ManufacturedCase;

/// Volume exactness used for error norms at degree `k`.
pub fn norm_exactness(k: usize) -> usize {
    2 * k + 4
}

/// `‖f - f_h‖_0` over `tris`, with `f_h` expanded from `coeffs`.
pub fn l2_error(
    mesh: &StaggeredMesh,
    space: &FeSpace,
    coeffs: &[f64],
    tris: &[usize],
    exactness: usize,
    exact: &dyn Fn(Point) -> Value,
) -> Result<f64> {
    let rule = triangle_rule(exactness)?;
    let nc = space.components();
    let mut acc = 0.0;
    for &t in tris {
        for (x, w) in mesh.tris[t].simplex.quadrature(&rule) {
            let v = space.eval(mesh, t, coeffs, x);
            let e = exact(x);
            acc += w * (0..nc).map(|c| (e[c] - v[c]).powi(2)).sum::<f64>();
        }
    }
    Ok(acc.sqrt())
}

/// L² errors of the flow variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowErrors {
    /// `‖ε^{-1/2}(L - L_h)‖_{0,Ω_B}`.
    pub l: f64,
    pub u_b: f64,
    pub p_b: f64,
    pub u_d: f64,
    pub p_d: f64,
}

pub fn flow_errors(
    mesh: &StaggeredMesh,
    spaces: &FlowSpaces,
    sol: &FlowSolution,
    case: &ManufacturedCase,
    exactness: usize,
) -> Result<FlowErrors> {
    let tb: Vec<usize> = mesh.tris_in(Subdomain::Brinkman).collect();
    let td: Vec<usize> = mesh.tris_in(Subdomain::Darcy).collect();
    let vec = |u: Point| [u[0], u[1], 0.0, 0.0];
    let sc = |p: f64| [p, 0.0, 0.0, 0.0];
    let l = l2_error(mesh, &spaces.wb, &sol.l, &tb, exactness, &|x| case.l(x))?;
    Ok(FlowErrors {
        l: l / case.params.epsilon.sqrt(),
        u_b: l2_error(mesh, &spaces.hb, &sol.u_b, &tb, exactness, &|x| vec(case.u_b(x)))?,
        p_b: l2_error(mesh, &spaces.qb, &sol.p_b, &tb, exactness, &|x| sc(case.p_b(x)))?,
        u_d: l2_error(mesh, &spaces.hd, &sol.u_d, &td, exactness, &|x| vec(case.u_d(x)))?,
        p_d: l2_error(mesh, &spaces.qd, &sol.p_d, &td, exactness, &|x| sc(case.p_d(x)))?,
    })
}

/// `‖c - c_h‖_0` and `‖z - z_h‖_0` at the time of `state`.
pub fn transport_errors(
    mesh: &StaggeredMesh,
    spaces: &TransportSpaces,
    state: &TransportState,
    case: &ManufacturedCase,
    exactness: usize,
) -> Result<(f64, f64)> {
    let all: Vec<usize> = (0..mesh.tris.len()).collect();
    let t = state.t;
    let c = l2_error(mesh, &spaces.uh, &state.c, &all, exactness, &|x| [case.c(x, t), 0.0, 0.0, 0.0])?;
    let z = l2_error(mesh, &spaces.wh, &state.z, &all, exactness, &|x| {
        let z = case.z(x, t);
        [z[0], z[1], 0.0, 0.0]
    })?;
    Ok((c, z))
}
