use super::{TransportParams, TransportSpaces, VelocityField};
use crate::assembly::{edge_form, edge_form_with, local_dofs, volume_form, volume_form_with, Rules};
use crate::error::{Error, Result};
use crate::mesh::{EdgeClass, StaggeredMesh, Subdomain};
use crate::polybasis::Point;
use crate::sparse::{SparseMatrix, TripletBuilder};
use crate::spaces::{interpolate, BoundaryData, DarcyBoundary, FeSpace};

/// A quadrature point on `∂Ω` with its normal velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub edge: usize,
    pub tri: usize,
    pub x: Point,
    /// Quadrature weight including the edge length.
    pub weight: f64,
    /// `u_h·n`.
    pub un_h: f64,
    /// Prescribed `u·n`, or `u_h·n` where no normal data are given.
    pub un: f64,
    pub has_data: bool,
    pub inflow: bool,
}

/// Time-independent blocks of the transport scheme, test functions as rows.
#[derive(Debug, Clone)]
pub struct TransportBlocks {
    /// `(K⁻¹ z, ψ)`: WH × WH.
    pub m_kinv: SparseMatrix,
    /// `T_h*(c, ψ)`: WH × UH.
    pub t_star: SparseMatrix,
    /// `T_h(z, q)`: UH × WH.
    pub t: SparseMatrix,
    /// `(φ c, q)`.
    pub mass: SparseMatrix,
    /// `(f⁻ c, q)`.
    pub reaction: SparseMatrix,
    /// `-(u_h c, ∇q)`.
    pub convection: SparseMatrix,
    /// `Σ_dl ∫ {c}[q] u_h·n + ½ [c][q] |u_h·n|`.
    pub upwind: SparseMatrix,
    /// `(u_h·n c, q)_{Γ_out}`.
    pub outflow: SparseMatrix,
    /// `½((u - u_h)·n c, q)_{Γ_out} - ½((u - u_h)·n c, q)_{Γ_in}`.
    pub correction: SparseMatrix,
    /// `½(∇·u_h c, q)`.
    pub div_form: SparseMatrix,
    /// `½ Σ_dl ([c][q], |u_h·n|)`.
    pub jump_form: SparseMatrix,
    /// `½(|u·n| c, q)_{∂Ω}`.
    pub boundary_abs: SparseMatrix,
    /// `-½ Σ_pr ([u_h·n] c, q)` over interior primal and interface edges.
    pub primal_jump: SparseMatrix,
    pub boundary: Vec<BoundaryPoint>,
    /// Coefficients of the constant 1 in UH.
    pub one: Vec<f64>,
    /// Largest porosity seen at quadrature points.
    pub phi_max: f64,
}

fn edges_of(mesh: &StaggeredMesh, f: impl Fn(EdgeClass) -> bool) -> Vec<usize> {
    (0..mesh.edges.len()).filter(|&e| f(mesh.edges[e].class)).collect()
}

pub(crate) fn porosity(params: &TransportParams, sub: Subdomain, x: Point) -> f64 {
    match sub {
        Subdomain::Brinkman => 1.0,
        Subdomain::Darcy => (params.phi)(x),
    }
}

pub(crate) fn darcy_source(params: &TransportParams, sub: Subdomain, x: Point) -> f64 {
    match sub {
        Subdomain::Brinkman => 0.0,
        Subdomain::Darcy => (params.f)(x),
    }
}

fn point_form(mesh: &StaggeredMesh, space: &FeSpace, points: &[BoundaryPoint], coef: impl Fn(&BoundaryPoint) -> f64) -> SparseMatrix {
    let mut b = TripletBuilder::new(space.ndofs, space.ndofs);
    for p in points {
        let c = coef(p) * p.weight;
        if c == 0.0 {
            continue;
        }
        let dofs = local_dofs(space, p.tri);
        let s = space.shapes(mesh, p.tri, p.x);
        for (i, gi) in dofs.iter().enumerate() {
            let Some(gi) = gi else { continue };
            for (j, gj) in dofs.iter().enumerate() {
                let Some(gj) = gj else { continue };
                b.push(*gi, *gj, c * s.values[i][0] * s.values[j][0]);
            }
        }
    }
    b.build()
}

fn boundary_points(
    mesh: &StaggeredMesh,
    rules: &Rules,
    velocity: &dyn VelocityField,
    bdata: &BoundaryData,
) -> Vec<BoundaryPoint> {
    let mut out = Vec::new();
    let mut missing = 0usize;
    for e in edges_of(mesh, |c| c == EdgeClass::PrimalBoundary) {
        let edge = &mesh.edges[e];
        let tri = edge.tris[0];
        let n = edge.normal;
        let kind = match mesh.tris[tri].subdomain {
            Subdomain::Brinkman => Some(&bdata.g1),
            Subdomain::Darcy => match (bdata.darcy_kind)(edge.midpoint) {
                DarcyBoundary::Flux => Some(&bdata.g2),
                DarcyBoundary::Pressure => None,
            },
        };
        if kind.is_none() {
            missing += 1;
        }
        for (s, w) in rules.edge.iter() {
            let x = edge.point(mesh, s[0]);
            let (u, _) = velocity.eval(mesh, tri, x);
            let un_h = u[0] * n[0] + u[1] * n[1];
            let un = kind.map_or(un_h, |g| g(x, n));
            out.push(BoundaryPoint {
                edge: e,
                tri,
                x,
                weight: 0.5 * edge.length * w,
                un_h,
                un,
                has_data: kind.is_some(),
                inflow: un < 0.0,
            });
        }
    }
    if missing > 0 {
        log::warn!("{missing} boundary edges carry no normal velocity data; their correction terms are set to zero");
    }
    out
}

/// Assembles every time-independent block of the transport scheme.
pub fn assemble_transport(
    mesh: &StaggeredMesh,
    spaces: &TransportSpaces,
    params: &TransportParams,
    velocity: &dyn VelocityField,
    bdata: &BoundaryData,
) -> Result<TransportBlocks> {
    params.validate()?;
    let TransportSpaces { uh, wh, .. } = spaces;
    if uh.tris.len() != mesh.tris.len() || wh.tris.len() != mesh.tris.len() {
        return Err(Error::Argument("transport spaces were built on a different mesh".into()));
    }
    let rules = Rules::for_degree(spaces.k)?;
    let all: Vec<usize> = (0..mesh.tris.len()).collect();
    let dual = edges_of(mesh, |c| c == EdgeClass::Dual);
    let primal = edges_of(mesh, EdgeClass::is_primal);
    let primal_inner = edges_of(mesh, |c| matches!(c, EdgeClass::PrimalInterior | EdgeClass::Interface));

    let mut phi_max: f64 = 0.0;
    for &t in &all {
        let sub = mesh.tris[t].subdomain;
        for (x, _) in mesh.tris[t].simplex.quadrature(&rules.tri) {
            let phi = porosity(params, sub, x);
            if !(phi > 0.0 && phi.is_finite()) {
                return Err(Error::Config(format!("porosity must be positive, got {phi} at {x:?}")));
            }
            phi_max = phi_max.max(phi);
        }
    }

    let m_kinv = volume_form(mesh, wh, wh, &all, &rules.tri, |t, x, psi, z| {
        let k = params.k_diff.eval_inverse(mesh.tris[t].parent, x);
        let kz = [k[0][0] * z.v[0] + k[0][1] * z.v[1], k[1][0] * z.v[0] + k[1][1] * z.v[1]];
        kz[0] * psi.v[0] + kz[1] * psi.v[1]
    });

    // T_h*(c, ψ) = (c, ∇·ψ) - Σ_pr (c, [ψ]·n)
    let mut t_star = volume_form(mesh, wh, uh, &all, &rules.tri, |_, _, psi, c| c.v[0] * psi.div());
    t_star = t_star.add(&edge_form(mesh, wh, uh, primal.iter().copied(), &rules.edge, |_, sp, psi, sc, c| {
        if sp.pos == sc.pos {
            -psi.dot2(sp.n_out) * c.v[0]
        } else {
            0.0
        }
    }));

    // T_h(z, q) = -(z, ∇q) + Σ_dl (z·n, [q])
    let mut t = volume_form(mesh, uh, wh, &all, &rules.tri, |_, _, q, z| {
        -(z.v[0] * q.g[0][0] + z.v[1] * q.g[0][1])
    });
    t = t.add(&edge_form(mesh, uh, wh, dual.iter().copied(), &rules.edge, |p, sq, q, sz, z| {
        sq.sign * q.v[0] * z.dot2(p.normal) / sz.count as f64
    }));

    let mass = volume_form(mesh, uh, uh, &all, &rules.tri, |t, x, q, c| {
        porosity(params, mesh.tris[t].subdomain, x) * c.v[0] * q.v[0]
    });
    let reaction = volume_form(mesh, uh, uh, &all, &rules.tri, |t, x, q, c| {
        let f = darcy_source(params, mesh.tris[t].subdomain, x);
        (-f).max(0.0) * c.v[0] * q.v[0]
    });

    let vel = |t: usize, x: Point| velocity.eval(mesh, t, x);
    let convection = volume_form_with(mesh, uh, uh, &all, &rules.tri, vel, |_, _, (u, _), q, c| {
        -(u[0] * q.g[0][0] + u[1] * q.g[0][1]) * c.v[0]
    });
    let div_form = volume_form_with(mesh, uh, uh, &all, &rules.tri, vel, |_, _, (_, d), q, c| {
        0.5 * d * c.v[0] * q.v[0]
    });

    let dual_un = |p: &crate::assembly::EdgePoint| {
        let edge = &mesh.edges[p.edge];
        let (u, _) = velocity.eval(mesh, edge.tris[0], p.x);
        u[0] * p.normal[0] + u[1] * p.normal[1]
    };
    let upwind = edge_form_with(mesh, uh, uh, dual.iter().copied(), &rules.edge, dual_un, |_, un, sq, q, sc, c| {
        sq.sign * q.v[0] * c.v[0] * (0.5 * un + 0.5 * sc.sign * un.abs())
    });
    let jump_form = edge_form_with(mesh, uh, uh, dual.iter().copied(), &rules.edge, dual_un, |_, un, sq, q, sc, c| {
        0.5 * sq.sign * sc.sign * q.v[0] * c.v[0] * un.abs()
    });

    let primal_un_jump = |p: &crate::assembly::EdgePoint| {
        let edge = &mesh.edges[p.edge];
        let (u0, _) = velocity.eval(mesh, edge.tris[0], p.x);
        let (u1, _) = velocity.eval(mesh, edge.tris[1], p.x);
        (u0[0] - u1[0]) * p.normal[0] + (u0[1] - u1[1]) * p.normal[1]
    };
    let primal_jump = edge_form_with(
        mesh,
        uh,
        uh,
        primal_inner.iter().copied(),
        &rules.edge,
        primal_un_jump,
        |_, jump, sq, q, sc, c| {
            if sq.pos == 0 && sc.pos == 0 {
                -0.5 * jump * q.v[0] * c.v[0]
            } else {
                0.0
            }
        },
    );

    let boundary = boundary_points(mesh, &rules, velocity, bdata);
    let outflow = point_form(mesh, uh, &boundary, |p| if p.inflow { 0.0 } else { p.un_h });
    let correction = point_form(mesh, uh, &boundary, |p| {
        let d = 0.5 * (p.un - p.un_h);
        if p.inflow {
            -d
        } else {
            d
        }
    });
    let boundary_abs = point_form(mesh, uh, &boundary, |p| 0.5 * p.un.abs());

    let one = interpolate(uh, mesh, &|_| [1.0, 0.0, 0.0, 0.0])?;

    Ok(TransportBlocks {
        m_kinv,
        t_star,
        t,
        mass,
        reaction,
        convection,
        upwind,
        outflow,
        correction,
        div_form,
        jump_form,
        boundary_abs,
        primal_jump,
        boundary,
        one,
        phi_max,
    })
}
