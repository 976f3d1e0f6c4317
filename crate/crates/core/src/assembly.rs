//! Quadrature loops that turn local kernels into sparse blocks.

use crate::mesh::StaggeredMesh;
use crate::polybasis::{edge_rule, triangle_rule, Point, QuadratureRule};
use crate::sparse::{SparseMatrix, TripletBuilder};
use crate::spaces::{DofRef, FeSpace, Gradient, Value};
use crate::error::Result;

/// Volume exactness used for assembly at degree `k`.
pub fn volume_exactness(k: usize) -> usize {
    (2 * k + 2).max(3 * k)
}

/// Edge exactness used for assembly at degree `k`.
pub fn edge_exactness(k: usize) -> usize {
    (2 * k + 1).max(3 * k)
}

pub(crate) struct Rules {
    pub tri: QuadratureRule,
    pub edge: QuadratureRule,
}

impl Rules {
    pub fn for_degree(k: usize) -> Result<Self> {
        Ok(Self {
            tri: triangle_rule(volume_exactness(k))?,
            edge: edge_rule(edge_exactness(k))?,
        })
    }
}

/// A shape function (or field) value with its gradient.
#[derive(Clone, Copy)]
pub(crate) struct Sh<'a> {
    pub v: &'a Value,
    pub g: &'a Gradient,
}

impl Sh<'_> {
    pub fn dot2(&self, w: Point) -> f64 {
        self.v[0] * w[0] + self.v[1] * w[1]
    }

    pub fn div(&self) -> f64 {
        self.g[0][0] + self.g[1][1]
    }

    /// Row divergence of a tensor.
    pub fn row_div(&self) -> Point {
        [self.g[0][0] + self.g[1][1], self.g[2][0] + self.g[3][1]]
    }

    /// `G n` for a tensor.
    pub fn tn(&self, n: Point) -> Point {
        [self.v[0] * n[0] + self.v[1] * n[1], self.v[2] * n[0] + self.v[3] * n[1]]
    }
}

/// One side of an edge as seen by a space.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Side {
    /// Position in `edge.tris`.
    pub pos: usize,
    pub tri: usize,
    /// Number of sides present in the space.
    pub count: usize,
    /// `+1` on `tris[0]`, `-1` on `tris[1]` (the jump sign).
    pub sign: f64,
    /// Outward normal of this subtriangle.
    pub n_out: Point,
}

pub(crate) struct EdgePoint {
    pub edge: usize,
    pub x: Point,
    pub normal: Point,
    pub tangent: Point,
}

pub(crate) fn local_dofs(space: &FeSpace, t: usize) -> Vec<Option<usize>> {
    space
        .element(t)
        .expect("subtriangle not in space")
        .dofs
        .iter()
        .map(|d| match d {
            DofRef::Free(i) => Some(*i),
            DofRef::Zero => None,
        })
        .collect()
}

fn sides(mesh: &StaggeredMesh, space: &FeSpace, e: usize) -> Vec<Side> {
    let edge = &mesh.edges[e];
    let present: Vec<(usize, usize)> = edge
        .tris
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, t)| space.contains(t))
        .collect();
    let count = present.len();
    present
        .into_iter()
        .map(|(pos, tri)| {
            let sign = if pos == 0 { 1.0 } else { -1.0 };
            Side {
                pos,
                tri,
                count,
                sign,
                n_out: [sign * edge.normal[0], sign * edge.normal[1]],
            }
        })
        .collect()
}

/// `Σ_τ ∫_τ kernel(test_i, trial_j)` over the given subtriangles.
pub(crate) fn volume_form(
    mesh: &StaggeredMesh,
    test: &FeSpace,
    trial: &FeSpace,
    tris: &[usize],
    rule: &QuadratureRule,
    kernel: impl Fn(usize, Point, Sh, Sh) -> f64,
) -> SparseMatrix {
    volume_form_with(mesh, test, trial, tris, rule, |_, _| (), |t, x, _, a, c| kernel(t, x, a, c))
}

/// As [`volume_form`], with `pre` evaluated once per quadrature point.
pub(crate) fn volume_form_with<P>(
    mesh: &StaggeredMesh,
    test: &FeSpace,
    trial: &FeSpace,
    tris: &[usize],
    rule: &QuadratureRule,
    pre: impl Fn(usize, Point) -> P,
    kernel: impl Fn(usize, Point, &P, Sh, Sh) -> f64,
) -> SparseMatrix {
    let mut b = TripletBuilder::new(test.ndofs, trial.ndofs);
    for &t in tris {
        let ri = local_dofs(test, t);
        let cj = local_dofs(trial, t);
        let mut local = vec![0.0; ri.len() * cj.len()];
        for (x, w) in mesh.tris[t].simplex.quadrature(rule) {
            let st = test.shapes(mesh, t, x);
            let sr = trial.shapes(mesh, t, x);
            let pv = pre(t, x);
            for i in 0..ri.len() {
                if ri[i].is_none() {
                    continue;
                }
                let a = Sh { v: &st.values[i], g: &st.grads[i] };
                for j in 0..cj.len() {
                    if cj[j].is_none() {
                        continue;
                    }
                    let c = Sh { v: &sr.values[j], g: &sr.grads[j] };
                    local[i * cj.len() + j] += w * kernel(t, x, &pv, a, c);
                }
            }
        }
        for (i, gi) in ri.iter().enumerate() {
            for (j, gj) in cj.iter().enumerate() {
                if let (Some(gi), Some(gj)) = (gi, gj) {
                    b.push(*gi, *gj, local[i * cj.len() + j]);
                }
            }
        }
    }
    b.build()
}

/// `Σ_e ∫_e kernel(point, test side, test_i, trial side, trial_j)` over all
/// pairs of sides present in the two spaces.
pub(crate) fn edge_form(
    mesh: &StaggeredMesh,
    test: &FeSpace,
    trial: &FeSpace,
    edges: impl IntoIterator<Item = usize>,
    rule: &QuadratureRule,
    kernel: impl Fn(&EdgePoint, &Side, Sh, &Side, Sh) -> f64,
) -> SparseMatrix {
    edge_form_with(mesh, test, trial, edges, rule, |_| (), |p, _, a, u, c, v| kernel(p, a, u, c, v))
}

/// As [`edge_form`], with `pre` evaluated once per quadrature point.
pub(crate) fn edge_form_with<P>(
    mesh: &StaggeredMesh,
    test: &FeSpace,
    trial: &FeSpace,
    edges: impl IntoIterator<Item = usize>,
    rule: &QuadratureRule,
    pre: impl Fn(&EdgePoint) -> P,
    kernel: impl Fn(&EdgePoint, &P, &Side, Sh, &Side, Sh) -> f64,
) -> SparseMatrix {
    let mut b = TripletBuilder::new(test.ndofs, trial.ndofs);
    for e in edges {
        let edge = &mesh.edges[e];
        let ts = sides(mesh, test, e);
        let rs = sides(mesh, trial, e);
        if ts.is_empty() || rs.is_empty() {
            continue;
        }
        let tdofs: Vec<_> = ts.iter().map(|s| local_dofs(test, s.tri)).collect();
        let rdofs: Vec<_> = rs.iter().map(|s| local_dofs(trial, s.tri)).collect();
        for (sp, w) in rule.iter() {
            let x = edge.point(mesh, sp[0]);
            let jw = 0.5 * edge.length * w;
            let p = EdgePoint {
                edge: e,
                x,
                normal: edge.normal,
                tangent: edge.tangent,
            };
            let tsh: Vec<_> = ts.iter().map(|s| test.shapes(mesh, s.tri, x)).collect();
            let rsh: Vec<_> = rs.iter().map(|s| trial.shapes(mesh, s.tri, x)).collect();
            let pv = pre(&p);
            for (a, sa) in ts.iter().enumerate() {
                for (c, sc) in rs.iter().enumerate() {
                    for (i, gi) in tdofs[a].iter().enumerate() {
                        let Some(gi) = gi else { continue };
                        let u = Sh { v: &tsh[a].values[i], g: &tsh[a].grads[i] };
                        for (j, gj) in rdofs[c].iter().enumerate() {
                            let Some(gj) = gj else { continue };
                            let v = Sh { v: &rsh[c].values[j], g: &rsh[c].grads[j] };
                            let val = kernel(&p, &pv, sa, u, sc, v);
                            if val != 0.0 {
                                b.push(*gi, *gj, jw * val);
                            }
                        }
                    }
                }
            }
        }
    }
    b.build()
}

/// `Σ_τ ∫_τ f(test_i)` into `out`.
pub(crate) fn volume_rhs(
    mesh: &StaggeredMesh,
    test: &FeSpace,
    tris: &[usize],
    rule: &QuadratureRule,
    out: &mut [f64],
    f: impl Fn(usize, Point, Sh) -> f64,
) {
    for &t in tris {
        let ri = local_dofs(test, t);
        for (x, w) in mesh.tris[t].simplex.quadrature(rule) {
            let st = test.shapes(mesh, t, x);
            for (i, gi) in ri.iter().enumerate() {
                if let Some(gi) = gi {
                    out[*gi] += w * f(t, x, Sh { v: &st.values[i], g: &st.grads[i] });
                }
            }
        }
    }
}

/// `Σ_e ∫_e f(point, side, test_i)` into `out`.
pub(crate) fn edge_rhs(
    mesh: &StaggeredMesh,
    test: &FeSpace,
    edges: impl IntoIterator<Item = usize>,
    rule: &QuadratureRule,
    out: &mut [f64],
    f: impl Fn(&EdgePoint, &Side, Sh) -> f64,
) {
    for e in edges {
        let edge = &mesh.edges[e];
        let ts = sides(mesh, test, e);
        for (sp, w) in rule.iter() {
            let x = edge.point(mesh, sp[0]);
            let jw = 0.5 * edge.length * w;
            let p = EdgePoint {
                edge: e,
                x,
                normal: edge.normal,
                tangent: edge.tangent,
            };
            for sa in &ts {
                let st = test.shapes(mesh, sa.tri, x);
                for (i, gi) in local_dofs(test, sa.tri).iter().enumerate() {
                    if let Some(gi) = gi {
                        out[*gi] += jw * f(&p, sa, Sh { v: &st.values[i], g: &st.grads[i] });
                    }
                }
            }
        }
    }
}
