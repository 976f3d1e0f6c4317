//! Constrained finite element spaces on the subtriangles.
//!
//! Each space is described by moment functionals attached to edges or
//! subtriangles. Functionals on a shared edge are identical from both sides,
//! so a single global unknown enforces the required continuity. On each
//! subtriangle the functionals are inverted once against an orthonormal
//! polynomial basis.

mod boundary;
mod checks;
mod project;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;

pub use checks::continuity_residual;
pub use boundary::{BoundaryData, DarcyBoundary, FluxFn, ScalarFn, VectorFn};
pub use project::{
    interpolate, interpolate_bdm, interpolate_ih, interpolate_jh, project_edge, project_l2,
    project_l2_cellwise, CellwiseProjection, EdgeProjection, FIELD_EXACTNESS,
};

use crate::error::{Error, Result};
use crate::mesh::{EdgeClass, StaggeredMesh, Subdomain};
use crate::polybasis::{
    dim_pk, edge_rule, legendre_values, triangle_rule, BubbleSpace, Point, QuadratureRule, ScalarBasis,
};

/// Field value with up to four components: scalar `[v, ..]`, vector
/// `[v_x, v_y, ..]` or row-major tensor `[G_xx, G_xy, G_yx, G_yy]`.
pub type Value = [f64; 4];

/// Component gradients `[∂x, ∂y]` in the layout of [`Value`].
pub type Gradient = [[f64; 2]; 4];

/// Largest condition number accepted for a local DOF transform.
pub const MAX_LOCAL_COND: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Brinkman velocity, `H_h^B`.
    HB,
    /// Brinkman velocity gradient, `W_h^B`.
    WB,
    /// Brinkman pressure, `Q_h^B`.
    QB,
    /// Darcy velocity (BDM), `H_h^D`.
    HD,
    /// Darcy pressure, `Q_h^D`.
    QD,
    /// Concentration, `U_h`.
    UH,
    /// Diffusive flux, `W_h`.
    WH,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 7] = [
        SpaceKind::HB,
        SpaceKind::WB,
        SpaceKind::QB,
        SpaceKind::HD,
        SpaceKind::QD,
        SpaceKind::UH,
        SpaceKind::WH,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::HB => "HB",
            SpaceKind::WB => "WB",
            SpaceKind::QB => "QB",
            SpaceKind::HD => "HD",
            SpaceKind::QD => "QD",
            SpaceKind::UH => "UH",
            SpaceKind::WH => "WH",
        }
    }

    pub fn components(self) -> usize {
        match self {
            SpaceKind::QB | SpaceKind::QD | SpaceKind::UH => 1,
            SpaceKind::HB | SpaceKind::HD | SpaceKind::WH => 2,
            SpaceKind::WB => 4,
        }
    }

    pub fn poly_degree(self, k: usize) -> usize {
        match self {
            SpaceKind::QD => k - 1,
            _ => k,
        }
    }

    fn subdomain(self) -> Option<Subdomain> {
        match self {
            SpaceKind::HB | SpaceKind::WB | SpaceKind::QB => Some(Subdomain::Brinkman),
            SpaceKind::HD | SpaceKind::QD => Some(Subdomain::Darcy),
            SpaceKind::UH | SpaceKind::WH => None,
        }
    }

    fn families(self) -> Vec<Family> {
        match self {
            SpaceKind::QB | SpaceKind::UH => vec![Family::EdgeScalar(0), Family::Interior { below: true }],
            SpaceKind::QD => vec![Family::Interior { below: false }],
            SpaceKind::HB | SpaceKind::WH => vec![
                Family::EdgeNormal(1),
                Family::EdgeNormal(2),
                Family::Interior { below: true },
            ],
            SpaceKind::WB => vec![
                Family::EdgeGn(0),
                Family::EdgeGnT(1),
                Family::EdgeGnT(2),
                Family::Interior { below: true },
            ],
            SpaceKind::HD => vec![
                Family::EdgeNormal(0),
                Family::EdgeNormal(1),
                Family::EdgeNormal(2),
                Family::GradBubble,
            ],
        }
    }
}

/// A group of moment functionals on one subtriangle. Edge indices are local.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    /// `(1/h_e) ∫_e q P_i(s)`, `i = 0..=k`.
    EdgeScalar(usize),
    /// `(1/h_e) ∫_e (v·n_e) P_i(s)`.
    EdgeNormal(usize),
    /// `(1/h_e) ∫_e (G n_e)_r P_i(s)`, `r = 0, 1`.
    EdgeGn(usize),
    /// `(1/h_e) ∫_e (G n_e)·t_e P_i(s)`.
    EdgeGnT(usize),
    /// `(1/|τ|) ∫_τ v_c q_j` against the orthonormal basis of `P^{k-1}`
    /// (`below`) or of the space's own degree.
    Interior { below: bool },
    /// `(1/|τ|) ∫_τ v·∇q_j` for non-constant `q_j ∈ P^{k-1}`, then
    /// `(1/|τ|) ∫_τ v·curl b_j` for bubbles `b_j ∈ B^{k+1}`.
    GradBubble,
}

/// Global status of a local DOF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofRef {
    Free(usize),
    /// Constrained to zero by the space definition.
    Zero,
}

/// Geometric attachment of a global DOF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attachment {
    Edge { edge: usize, moment: usize },
    Tri { tri: usize, moment: usize },
}

#[derive(Debug, Clone)]
pub struct LocalElement {
    pub dofs: Vec<DofRef>,
    /// Maps local DOF values to coefficients in the orthonormal basis,
    /// component-major.
    pub transform: DMatrix<f64>,
    pub cond: f64,
}

/// Shape function values and gradients at one point.
#[derive(Debug, Clone)]
pub struct Shapes {
    pub values: Vec<Value>,
    pub grads: Vec<Gradient>,
}

/// Options for [`build_space_with`].
#[derive(Debug, Clone, Default)]
pub struct SpaceOptions {
    /// Edges of `∂Ω_B` on which the `G n` moments of `WB` stay free
    /// (velocity Dirichlet edges).
    pub free_wb_edges: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
pub struct FeSpace {
    pub kind: SpaceKind,
    pub k: usize,
    pub ndofs: usize,
    /// Subtriangles carrying this space, ascending.
    pub tris: Vec<usize>,
    pub attachments: Vec<Attachment>,
    local: Vec<Option<LocalElement>>,
    basis: ScalarBasis,
    by_edge: BTreeMap<usize, Vec<usize>>,
}

pub fn build_space(kind: SpaceKind, mesh: &StaggeredMesh, k: usize) -> Result<FeSpace> {
    build_space_with(kind, mesh, k, &SpaceOptions::default())
}

pub fn build_space_with(kind: SpaceKind, mesh: &StaggeredMesh, k: usize, opts: &SpaceOptions) -> Result<FeSpace> {
    if k == 0 || k > 3 {
        return Err(Error::Argument(format!("degree k={k} unsupported (1..=3)")));
    }
    let ctx = Ctx::new(kind, k, 2 * k + 1, 2 * k + 2)?;
    let tris: Vec<usize> = (0..mesh.tris.len())
        .filter(|&t| kind.subdomain().is_none_or(|s| mesh.tris[t].subdomain == s))
        .collect();
    let nloc = kind.components() * dim_pk(kind.poly_degree(k));
    let mut lookup: HashMap<Attachment, usize> = HashMap::new();
    let mut attachments = Vec::new();
    let mut local = vec![None; mesh.tris.len()];

    for &t in &tris {
        let tri = &mesh.tris[t];
        let mut dofs = Vec::with_capacity(nloc);
        let mut interior = 0;
        for fam in kind.families() {
            let n = ctx.family_len(fam);
            for i in 0..n {
                let att = match fam {
                    Family::EdgeScalar(l) | Family::EdgeNormal(l) | Family::EdgeGn(l) | Family::EdgeGnT(l) => {
                        let edge = tri.edges[l];
                        if let Family::EdgeGn(_) = fam {
                            let class = mesh.edges[edge].class;
                            let on_boundary = matches!(class, EdgeClass::PrimalBoundary | EdgeClass::Interface);
                            if on_boundary && !opts.free_wb_edges.contains(&edge) {
                                dofs.push(DofRef::Zero);
                                continue;
                            }
                        }
                        Attachment::Edge { edge, moment: i }
                    }
                    Family::Interior { .. } | Family::GradBubble => {
                        interior += 1;
                        Attachment::Tri {
                            tri: t,
                            moment: interior - 1,
                        }
                    }
                };
                let id = *lookup.entry(att).or_insert_with(|| {
                    attachments.push(att);
                    attachments.len() - 1
                });
                dofs.push(DofRef::Free(id));
            }
        }
        debug_assert_eq!(dofs.len(), nloc);

        // D[i][j] = functional_i(basis_j)
        let mut d = DMatrix::<f64>::zeros(nloc, nloc);
        let basis = &ctx.basis;
        let basis_fn = |j: usize| {
            let c = j / basis.dim();
            let m = j % basis.dim();
            move |x: Point| -> Value {
                let mut v = [0.0; 4];
                v[c] = basis.eval(&tri.simplex, x)[m];
                v
            }
        };
        for j in 0..nloc {
            let f = basis_fn(j);
            let col = ctx.apply_families(mesh, t, &f);
            for (i, v) in col.into_iter().enumerate() {
                d[(i, j)] = v;
            }
        }
        let svd = d.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(cond < MAX_LOCAL_COND) {
            return Err(Error::Unisolvence {
                tri: t,
                space: kind.name(),
                cond,
            });
        }
        let transform = d.try_inverse().ok_or(Error::Unisolvence {
            tri: t,
            space: kind.name(),
            cond,
        })?;
        local[t] = Some(LocalElement { dofs, transform, cond });
    }

    let mut by_edge: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, a) in attachments.iter().enumerate() {
        if let Attachment::Edge { edge, .. } = a {
            by_edge.entry(*edge).or_default().push(i);
        }
    }
    Ok(FeSpace {
        by_edge,
        kind,
        k,
        ndofs: attachments.len(),
        tris,
        attachments,
        local,
        basis: ctx.basis.clone(),
    })
}

/// Quadrature and bases shared by the functionals of one space.
pub(crate) struct Ctx {
    kind: SpaceKind,
    k: usize,
    basis: ScalarBasis,
    lower: Option<ScalarBasis>,
    bubbles: BubbleSpace,
    edge: QuadratureRule,
    tri: QuadratureRule,
}

impl Ctx {
    pub(crate) fn new(kind: SpaceKind, k: usize, edge_exactness: usize, tri_exactness: usize) -> Result<Self> {
        Ok(Self {
            kind,
            k,
            basis: ScalarBasis::new(kind.poly_degree(k)),
            lower: (k >= 1).then(|| ScalarBasis::new(k - 1)),
            bubbles: BubbleSpace::new(k),
            edge: edge_rule(edge_exactness)?,
            tri: triangle_rule(tri_exactness)?,
        })
    }

    fn family_len(&self, fam: Family) -> usize {
        let k = self.k;
        let ncomp = self.kind.components();
        match fam {
            Family::EdgeScalar(_) | Family::EdgeNormal(_) | Family::EdgeGnT(_) => k + 1,
            Family::EdgeGn(_) => 2 * (k + 1),
            Family::Interior { below: true } => ncomp * dim_pk(k - 1),
            Family::Interior { below: false } => ncomp * self.basis.dim(),
            Family::GradBubble => dim_pk(k - 1) - 1 + self.bubbles.dim(),
        }
    }

    /// Values of every functional of the space on subtriangle `t` applied to `f`.
    pub(crate) fn apply_families(&self, mesh: &StaggeredMesh, t: usize, f: &dyn Fn(Point) -> Value) -> Vec<f64> {
        let mut out = Vec::new();
        for fam in self.kind.families() {
            self.apply(fam, mesh, t, f, &mut out);
        }
        out
    }

    fn apply(&self, fam: Family, mesh: &StaggeredMesh, t: usize, f: &dyn Fn(Point) -> Value, out: &mut Vec<f64>) {
        let tri = &mesh.tris[t];
        let k = self.k;
        let edge_moments = |l: usize, proj: &dyn Fn(&Value, Point, Point) -> f64, out: &mut Vec<f64>| {
            let e = &mesh.edges[tri.edges[l]];
            let mut m = vec![0.0; k + 1];
            for (s, w) in self.edge.iter() {
                let v = f(e.point(mesh, s[0]));
                let p = proj(&v, e.normal, e.tangent);
                for (mi, li) in m.iter_mut().zip(legendre_values(k, s[0])) {
                    *mi += 0.5 * w * p * li;
                }
            }
            out.extend(m);
        };
        match fam {
            Family::EdgeScalar(l) => edge_moments(l, &|v, _, _| v[0], out),
            Family::EdgeNormal(l) => edge_moments(l, &|v, n, _| v[0] * n[0] + v[1] * n[1], out),
            Family::EdgeGn(l) => {
                for r in 0..2 {
                    edge_moments(l, &|v, n, _| v[2 * r] * n[0] + v[2 * r + 1] * n[1], out);
                }
            }
            Family::EdgeGnT(l) => edge_moments(
                l,
                &|v, n, t| t[0] * (v[0] * n[0] + v[1] * n[1]) + t[1] * (v[2] * n[0] + v[3] * n[1]),
                out,
            ),
            Family::Interior { below } => {
                let q = if below { self.lower.as_ref().unwrap() } else { &self.basis };
                let ncomp = self.kind.components();
                let area = tri.area();
                let mut m = vec![0.0; ncomp * q.dim()];
                for (x, w) in tri.simplex.quadrature(&self.tri) {
                    let v = f(x);
                    let qv = q.eval(&tri.simplex, x);
                    for c in 0..ncomp {
                        for (j, qj) in qv.iter().enumerate() {
                            m[c * q.dim() + j] += w * v[c] * qj / area;
                        }
                    }
                }
                out.extend(m);
            }
            Family::GradBubble => {
                let q = self.lower.as_ref().unwrap();
                let area = tri.area();
                let ng = q.dim() - 1;
                let mut m = vec![0.0; ng + self.bubbles.dim()];
                for (x, w) in tri.simplex.quadrature(&self.tri) {
                    let v = f(x);
                    let g = q.grad(&tri.simplex, x);
                    for j in 0..ng {
                        m[j] += w * (v[0] * g[j + 1][0] + v[1] * g[j + 1][1]) / area;
                    }
                    for (j, c) in self.bubbles.curl(&tri.simplex, x).into_iter().enumerate() {
                        m[ng + j] += w * (v[0] * c[0] + v[1] * c[1]) / area;
                    }
                }
                out.extend(m);
            }
        }
    }
}

impl FeSpace {
    pub fn components(&self) -> usize {
        self.kind.components()
    }

    pub fn element(&self, t: usize) -> Option<&LocalElement> {
        self.local.get(t).and_then(Option::as_ref)
    }

    pub fn contains(&self, t: usize) -> bool {
        self.element(t).is_some()
    }

    /// Largest local transform condition number.
    pub fn max_cond(&self) -> f64 {
        self.local.iter().flatten().map(|e| e.cond).fold(0.0, f64::max)
    }

    pub(crate) fn functionals(&self, edge_exactness: usize, tri_exactness: usize) -> Result<Ctx> {
        Ctx::new(self.kind, self.k, edge_exactness, tri_exactness)
    }

    /// Local shape functions of subtriangle `t` at `x`.
    pub fn shapes(&self, mesh: &StaggeredMesh, t: usize, x: Point) -> Shapes {
        let el = self.element(t).expect("subtriangle not in space");
        let simplex = &mesh.tris[t].simplex;
        let b = self.basis.eval(simplex, x);
        let g = self.basis.grad(simplex, x);
        let nb = self.basis.dim();
        let ncomp = self.components();
        let n = el.dofs.len();
        let mut values = vec![[0.0; 4]; n];
        let mut grads = vec![[[0.0; 2]; 4]; n];
        for i in 0..n {
            for c in 0..ncomp {
                let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
                for j in 0..nb {
                    let a = el.transform[(c * nb + j, i)];
                    v += a * b[j];
                    gx += a * g[j][0];
                    gy += a * g[j][1];
                }
                values[i][c] = v;
                grads[i][c] = [gx, gy];
            }
        }
        Shapes { values, grads }
    }

    /// Local DOF values of a global coefficient vector on subtriangle `t`.
    pub fn local_values(&self, t: usize, coeffs: &[f64]) -> Vec<f64> {
        self.element(t)
            .expect("subtriangle not in space")
            .dofs
            .iter()
            .map(|d| match d {
                DofRef::Free(i) => coeffs[*i],
                DofRef::Zero => 0.0,
            })
            .collect()
    }

    /// Orthonormal-basis coefficients of the field on subtriangle `t`.
    pub fn local_coefficients(&self, t: usize, coeffs: &[f64]) -> Vec<f64> {
        let el = self.element(t).expect("subtriangle not in space");
        let v = nalgebra::DVector::from_vec(self.local_values(t, coeffs));
        (&el.transform * v).iter().copied().collect()
    }

    /// Evaluates the field of `coeffs` on subtriangle `t` at `x`.
    pub fn eval(&self, mesh: &StaggeredMesh, t: usize, coeffs: &[f64], x: Point) -> Value {
        self.eval_with_grad(mesh, t, coeffs, x).0
    }

    pub fn eval_with_grad(&self, mesh: &StaggeredMesh, t: usize, coeffs: &[f64], x: Point) -> (Value, Gradient) {
        let a = self.local_coefficients(t, coeffs);
        let simplex = &mesh.tris[t].simplex;
        let b = self.basis.eval(simplex, x);
        let g = self.basis.grad(simplex, x);
        let nb = self.basis.dim();
        let mut v = [0.0; 4];
        let mut gr = [[0.0; 2]; 4];
        for c in 0..self.components() {
            for j in 0..nb {
                v[c] += a[c * nb + j] * b[j];
                gr[c][0] += a[c * nb + j] * g[j][0];
                gr[c][1] += a[c * nb + j] * g[j][1];
            }
        }
        (v, gr)
    }

    /// Global DOFs attached to edge `e`, in moment order.
    pub fn edge_dofs(&self, e: usize) -> &[usize] {
        self.by_edge.get(&e).map_or(&[], Vec::as_slice)
    }
}

/// Divergence of a vector value, or row divergence of a tensor value.
pub fn divergence(kind: SpaceKind, g: &Gradient) -> [f64; 2] {
    match kind.components() {
        2 => [g[0][0] + g[1][1], 0.0],
        4 => [g[0][0] + g[1][1], g[2][0] + g[3][1]],
        _ => [0.0, 0.0],
    }
}

#[cfg(test)]
mod tests;
