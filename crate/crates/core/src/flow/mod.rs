//! The coupled Brinkman–Darcy system: assembly, solution and conservation checks.

mod conservation;
mod forms;

use std::collections::BTreeSet;
use std::sync::Arc;

pub use conservation::{verify_conservation, ConservationReport};
pub use forms::{assemble_forms, FlowForms};

use crate::assembly::{edge_rhs, volume_rhs, Rules};
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::mesh::{EdgeClass, StaggeredMesh, Subdomain};
use crate::polybasis::{edge_rule, triangle_rule, Point};
use crate::sparse::{SparseLu, TripletBuilder};
use crate::spaces::{
    build_space, build_space_with, interpolate, project_edge, BoundaryData, CellwiseProjection,
    DarcyBoundary, FeSpace, ScalarFn, SpaceKind, SpaceOptions, VectorFn, FIELD_EXACTNESS,
};
use forms::edges_where;

/// Relative residual required of the linear solve.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

/// Coefficients and sources of the flow problem.
#[derive(Clone)]
pub struct FlowParams {
    pub epsilon: f64,
    pub alpha: Coefficient,
    pub k_darcy: Coefficient,
    pub f_b: VectorFn,
    pub f_d: VectorFn,
    /// Darcy mass source.
    pub f: ScalarFn,
    /// Brinkman divergence source (`∇·u_B`); zero for physical problems.
    pub g_b: ScalarFn,
}

impl std::fmt::Debug for FlowParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FlowParams")
            .field("epsilon", &self.epsilon)
            .field("alpha", &self.alpha)
            .field("k_darcy", &self.k_darcy)
            .finish_non_exhaustive()
    }
}

impl FlowParams {
    /// Unit coefficients and zero sources.
    pub fn new(epsilon: f64, alpha: Coefficient, k_darcy: Coefficient) -> Self {
        Self {
            epsilon,
            alpha,
            k_darcy,
            f_b: Arc::new(|_| [0.0, 0.0]),
            f_d: Arc::new(|_| [0.0, 0.0]),
            f: Arc::new(|_| 0.0),
            g_b: Arc::new(|_| 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        self.alpha.check_eigenvalues("alpha", false)?;
        self.k_darcy.check_eigenvalues("K_D", true)
    }
}

/// The five flow spaces on one mesh.
#[derive(Debug, Clone)]
pub struct FlowSpaces {
    pub k: usize,
    pub wb: FeSpace,
    pub hb: FeSpace,
    pub qb: FeSpace,
    pub hd: FeSpace,
    pub qd: FeSpace,
    /// `Γ_B` edges carrying a full velocity condition.
    pub dirichlet_edges: Vec<usize>,
    ntris: usize,
}

impl FlowSpaces {
    /// Builds the spaces; with `velocity_dirichlet` the whole of `Γ_B`
    /// carries a full velocity condition.
    pub fn new(mesh: &StaggeredMesh, k: usize, velocity_dirichlet: bool) -> Result<Self> {
        let dirichlet_edges = if velocity_dirichlet {
            edges_where(mesh, |c, s| c == EdgeClass::PrimalBoundary && s == Some(Subdomain::Brinkman))
        } else {
            Vec::new()
        };
        let opts = SpaceOptions {
            free_wb_edges: dirichlet_edges.iter().copied().collect::<BTreeSet<_>>(),
        };
        Ok(Self {
            k,
            wb: build_space_with(SpaceKind::WB, mesh, k, &opts)?,
            hb: build_space(SpaceKind::HB, mesh, k)?,
            qb: build_space(SpaceKind::QB, mesh, k)?,
            hd: build_space(SpaceKind::HD, mesh, k)?,
            qd: build_space(SpaceKind::QD, mesh, k)?,
            dirichlet_edges,
            ntris: mesh.tris.len(),
        })
    }

    pub(crate) fn check_mesh(&self, mesh: &StaggeredMesh) -> Result<()> {
        if mesh.tris.len() != self.ntris {
            return Err(Error::Argument("flow spaces were built on a different mesh".into()));
        }
        Ok(())
    }

    /// Unknown counts `[L, u_B, p_B, u_D, p_D]`.
    pub fn sizes(&self) -> [usize; 5] {
        [self.wb.ndofs, self.hb.ndofs, self.qb.ndofs, self.hd.ndofs, self.qd.ndofs]
    }
}

/// Discrete flow solution.
#[derive(Debug, Clone)]
pub struct FlowSolution {
    pub l: Vec<f64>,
    pub u_b: Vec<f64>,
    pub p_b: Vec<f64>,
    /// Includes the lifted boundary values.
    pub u_d: Vec<f64>,
    pub p_d: Vec<f64>,
    /// Multiplier of the zero-mean constraint (absent with pressure edges).
    pub lambda: Option<f64>,
    /// Relative algebraic residual.
    pub residual: f64,
    /// Constant added to `𝕡_h f` to make the discrete data compatible.
    pub f_shift: f64,
}

/// Boundary edges of `Γ_D` split by condition kind.
#[derive(Debug, Clone, Default)]
pub struct DarcyEdges {
    pub flux: Vec<usize>,
    pub pressure: Vec<usize>,
}

pub fn darcy_edges(mesh: &StaggeredMesh, bdata: &BoundaryData) -> DarcyEdges {
    let mut out = DarcyEdges::default();
    for e in edges_where(mesh, |c, s| c == EdgeClass::PrimalBoundary && s == Some(Subdomain::Darcy)) {
        match (bdata.darcy_kind)(mesh.edges[e].midpoint) {
            DarcyBoundary::Flux => out.flux.push(e),
            DarcyBoundary::Pressure => out.pressure.push(e),
        }
    }
    out
}

/// Integrals entering the compatibility condition.
#[derive(Debug, Clone, Copy)]
pub struct Compatibility {
    /// `∫_{Γ_B} g1 + ∫_{Γ_D} g2 - ∫_{Ω_D} f - ∫_{Ω_B} g_B`.
    pub residual: f64,
    /// The same four integrals taken of absolute values.
    pub scale: f64,
}

/// Evaluates the compatibility condition with high-order quadrature.
pub fn compatibility(mesh: &StaggeredMesh, params: &FlowParams, bdata: &BoundaryData) -> Result<Compatibility> {
    let er = edge_rule(FIELD_EXACTNESS + 1)?;
    let tr = triangle_rule(FIELD_EXACTNESS)?;
    let edge_int = |edges: &[usize], g: &dyn Fn(Point, Point) -> f64| -> [f64; 2] {
        let mut acc = [0.0; 2];
        for &e in edges {
            let ed = &mesh.edges[e];
            for (s, w) in er.iter() {
                let v = 0.5 * ed.length * w * g(ed.point(mesh, s[0]), ed.normal);
                acc[0] += v;
                acc[1] += v.abs();
            }
        }
        acc
    };
    let vol_int = |sub: Subdomain, f: &dyn Fn(Point) -> f64| -> [f64; 2] {
        let mut acc = [0.0; 2];
        for t in mesh.tris_in(sub) {
            for (x, w) in mesh.tris[t].simplex.quadrature(&tr) {
                let v = w * f(x);
                acc[0] += v;
                acc[1] += v.abs();
            }
        }
        acc
    };
    let gb_edges = edges_where(mesh, |c, s| c == EdgeClass::PrimalBoundary && s == Some(Subdomain::Brinkman));
    let dedges = darcy_edges(mesh, bdata);
    let i1 = edge_int(&gb_edges, &*bdata.g1);
    let i2 = edge_int(&dedges.flux, &*bdata.g2);
    let i3 = vol_int(Subdomain::Darcy, &*params.f);
    let i4 = vol_int(Subdomain::Brinkman, &*params.g_b);
    Ok(Compatibility {
        residual: i1[0] + i2[0] - i3[0] - i4[0],
        scale: i1[1] + i2[1] + i3[1] + i4[1],
    })
}

/// Assembles and solves the coupled system.
pub fn solve_flow(
    mesh: &StaggeredMesh,
    spaces: &FlowSpaces,
    params: &FlowParams,
    bdata: &BoundaryData,
) -> Result<FlowSolution> {
    params.validate()?;
    if !spaces.dirichlet_edges.is_empty() && bdata.brinkman_velocity.is_none() {
        return Err(Error::Config("velocity Dirichlet edges need a boundary velocity".into()));
    }
    let dedges = darcy_edges(mesh, bdata);
    let use_mean = dedges.pressure.is_empty();
    if use_mean {
        let c = compatibility(mesh, params, bdata)?;
        if c.residual.abs() > 1e-10 * c.scale {
            return Err(Error::Compatibility {
                residual: c.residual,
                tolerance: 1e-10 * c.scale,
            });
        }
    }
    let forms = assemble_forms(mesh, spaces, params.epsilon, &params.alpha, &params.k_darcy)?;
    let rules = Rules::for_degree(spaces.k)?;
    let k = spaces.k;
    let FlowSpaces { wb, hb, qb, hd, qd, .. } = spaces;
    let tb: Vec<usize> = mesh.tris_in(Subdomain::Brinkman).collect();
    let td: Vec<usize> = mesh.tris_in(Subdomain::Darcy).collect();

    // right-hand sides
    let mut r_l = vec![0.0; wb.ndofs];
    if let Some(ubc) = &bdata.brinkman_velocity {
        edge_rhs(mesh, wb, spaces.dirichlet_edges.iter().copied(), &rules.edge, &mut r_l, |p, _, g| {
            let gn = g.tn(p.normal);
            let u = ubc(p.x);
            gn[0] * u[0] + gn[1] * u[1]
        });
    }
    let mut r_ub = vec![0.0; hb.ndofs];
    volume_rhs(mesh, hb, &tb, &rules.tri, &mut r_ub, |_, x, v| {
        let f = (params.f_b)(x);
        f[0] * v.v[0] + f[1] * v.v[1]
    });
    let gb_edges = edges_where(mesh, |c, s| c == EdgeClass::PrimalBoundary && s == Some(Subdomain::Brinkman));
    let mut r_pb = vec![0.0; qb.ndofs];
    volume_rhs(mesh, qb, &tb, &rules.tri, &mut r_pb, |_, x, q| (params.g_b)(x) * q.v[0]);
    edge_rhs(mesh, qb, gb_edges.iter().copied(), &rules.edge, &mut r_pb, |p, s, q| {
        -(bdata.g1)(p.x, s.n_out) * q.v[0]
    });
    let mut r_ud = vec![0.0; hd.ndofs];
    volume_rhs(mesh, hd, &td, &rules.tri, &mut r_ud, |_, x, v| {
        let f = (params.f_d)(x);
        f[0] * v.v[0] + f[1] * v.v[1]
    });
    edge_rhs(mesh, hd, dedges.pressure.iter().copied(), &rules.edge, &mut r_ud, |p, s, v| {
        -v.dot2(s.n_out) * (bdata.p_bc)(p.x)
    });
    let proj_f = CellwiseProjection::new(mesh, &td, k - 1, &*params.f)?;
    let mut r_pd = vec![0.0; qd.ndofs];
    volume_rhs(mesh, qd, &td, &rules.tri, &mut r_pd, |t, x, q| proj_f.eval(mesh, t, x) * q.v[0]);

    // lifted Darcy flux values
    let mut fixed: Vec<Option<f64>> = vec![None; hd.ndofs];
    let mut lifted_flux = 0.0;
    for p in project_edge(mesh, &*bdata.g2, &dedges.flux, k)? {
        for (d, m) in hd.edge_dofs(p.edge).iter().zip(p.moments()) {
            fixed[*d] = Some(m);
        }
        lifted_flux += p.coeffs[0] * mesh.edges[p.edge].length;
    }

    // shift 𝕡_h f so the discrete data are exactly compatible
    let mut f_shift = 0.0;
    if use_mean && !td.is_empty() {
        let one_b = interpolate(qb, mesh, &|_| [1.0, 0.0, 0.0, 0.0])?;
        let one_d = interpolate(qd, mesh, &|_| [1.0, 0.0, 0.0, 0.0])?;
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let area_d = mesh.subdomain_area(Subdomain::Darcy);
        let r = dot(&r_pb, &one_b) + dot(&r_pd, &one_d) - lifted_flux;
        f_shift = -r / area_d;
        let mut shift_rhs = vec![0.0; qd.ndofs];
        volume_rhs(mesh, qd, &td, &rules.tri, &mut shift_rhs, |_, _, q| q.v[0]);
        for (a, b) in r_pd.iter_mut().zip(shift_rhs) {
            *a += f_shift * b;
        }
    }

    // global system [L, u_B, p_B, u_D, p_D, λ]
    let [nl, nub, npb, nud, npd] = spaces.sizes();
    let o = [0, nl, nl + nub, nl + nub + npb, nl + nub + npb + nud, nl + nub + npb + nud + npd];
    let n = o[5] + usize::from(use_mean);
    let mut sys = TripletBuilder::new(n, n);
    sys.push_block(o[0], o[0], &forms.m_eps);
    sys.push_block(o[0], o[1], &forms.b_star.scaled(-1.0));
    sys.push_block(o[1], o[0], &forms.b);
    sys.push_block(o[1], o[1], &forms.m_alpha);
    sys.push_block(o[1], o[2], &forms.c_star);
    sys.push_block(o[2], o[1], &forms.c.scaled(-1.0));
    sys.push_block(o[2], o[3], &forms.i.transpose().scaled(-1.0));
    sys.push_block(o[3], o[2], &forms.i);
    sys.push_block(o[3], o[3], &forms.m_k);
    sys.push_block(o[3], o[4], &forms.a.scaled(-1.0));
    sys.push_block(o[4], o[3], &forms.a.transpose());
    if use_mean {
        for (j, m) in forms.mean.iter().enumerate() {
            sys.push(o[2] + j, o[5], *m);
            sys.push(o[5], o[2] + j, *m);
        }
    }
    let full = sys.build();
    let mut rhs: Vec<f64> = [r_l, r_ub, r_pb, r_ud, r_pd].concat();
    rhs.resize(n, 0.0);

    // eliminate lifted unknowns
    let mut xfix = vec![0.0; n];
    let mut keep = vec![None; n];
    let mut nfree = 0;
    for i in 0..n {
        let fixed_val = (o[3]..o[4]).contains(&i).then(|| fixed[i - o[3]]).flatten();
        match fixed_val {
            Some(v) => xfix[i] = v,
            None => {
                keep[i] = Some(nfree);
                nfree += 1;
            }
        }
    }
    let lift = full.mul_vec(&xfix);
    let mut rr = vec![0.0; nfree];
    for i in 0..n {
        if let Some(r) = keep[i] {
            rr[r] = rhs[i] - lift[i];
        }
    }
    let reduced = full.select(&keep, &keep, nfree, nfree);
    let lu = SparseLu::factor(&reduced)?;
    let xr = lu.solve_precise(&rr, SOLVER_TOLERANCE)?;
    let residual = lu.relative_residual(&xr, &rr);
    let mut x = xfix;
    for i in 0..n {
        if let Some(r) = keep[i] {
            x[i] = xr[r];
        }
    }
    log::debug!("flow solve: {nfree} unknowns, relative residual {residual:.2e}, f shift {f_shift:.2e}");
    Ok(FlowSolution {
        l: x[o[0]..o[1]].to_vec(),
        u_b: x[o[1]..o[2]].to_vec(),
        p_b: x[o[2]..o[3]].to_vec(),
        u_d: x[o[3]..o[4]].to_vec(),
        p_d: x[o[4]..o[5]].to_vec(),
        lambda: use_mean.then(|| x[o[5]]),
        residual,
        f_shift,
    })
}
