use super::{DofRef, FeSpace, SpaceKind, Value};
use crate::error::{Error, Result};
use crate::mesh::StaggeredMesh;
use crate::polybasis::{edge_rule, legendre_values, triangle_rule, Point, ScalarBasis};
use crate::sparse::{SparseLu, TripletBuilder};

/// Quadrature exactness used when moments of general fields are taken.
pub const FIELD_EXACTNESS: usize = 20;

/// Evaluates the DOF functionals of `space` on `f`.
///
/// For `QB` this is `I_h`, for `HB`/`WH` it is `J_h`, for `HD` it is
/// `Π^BDM` and for `QD` it is the cellwise L² projection.
pub fn interpolate(space: &FeSpace, mesh: &StaggeredMesh, f: &dyn Fn(Point) -> Value) -> Result<Vec<f64>> {
    let ctx = space.functionals(FIELD_EXACTNESS + 1, FIELD_EXACTNESS)?;
    let mut out = vec![0.0; space.ndofs];
    for &t in &space.tris {
        let vals = ctx.apply_families(mesh, t, f);
        for (d, v) in space.element(t).unwrap().dofs.iter().zip(vals) {
            if let DofRef::Free(i) = d {
                out[*i] = v;
            }
        }
    }
    Ok(out)
}

fn expect_kind(space: &FeSpace, kinds: &[SpaceKind], op: &str) -> Result<()> {
    if kinds.contains(&space.kind) {
        Ok(())
    } else {
        Err(Error::Argument(format!("{op} is not defined on space {}", space.kind.name())))
    }
}

/// `I_h q` into `QB` (or `UH`).
pub fn interpolate_ih(space: &FeSpace, mesh: &StaggeredMesh, q: &dyn Fn(Point) -> f64) -> Result<Vec<f64>> {
    expect_kind(space, &[SpaceKind::QB, SpaceKind::UH], "I_h")?;
    interpolate(space, mesh, &|x| [q(x), 0.0, 0.0, 0.0])
}

/// `J_h v` into `HB` (or `WH`).
pub fn interpolate_jh(space: &FeSpace, mesh: &StaggeredMesh, v: &dyn Fn(Point) -> Point) -> Result<Vec<f64>> {
    expect_kind(space, &[SpaceKind::HB, SpaceKind::WH], "J_h")?;
    interpolate(space, mesh, &|x| {
        let u = v(x);
        [u[0], u[1], 0.0, 0.0]
    })
}

/// `Π^BDM v` into `HD`.
pub fn interpolate_bdm(space: &FeSpace, mesh: &StaggeredMesh, v: &dyn Fn(Point) -> Point) -> Result<Vec<f64>> {
    expect_kind(space, &[SpaceKind::HD], "Π^BDM")?;
    interpolate(space, mesh, &|x| {
        let u = v(x);
        [u[0], u[1], 0.0, 0.0]
    })
}

/// `𝕡_h v`: cellwise L² projection into `QD`.
pub fn project_l2_cellwise(space: &FeSpace, mesh: &StaggeredMesh, v: &dyn Fn(Point) -> f64) -> Result<Vec<f64>> {
    expect_kind(space, &[SpaceKind::QD], "cellwise L2 projection")?;
    interpolate(space, mesh, &|x| [v(x), 0.0, 0.0, 0.0])
}

/// Global L² projection into any space (a mass-matrix solve).
pub fn project_l2(space: &FeSpace, mesh: &StaggeredMesh, f: &dyn Fn(Point) -> Value) -> Result<Vec<f64>> {
    let rule = triangle_rule(FIELD_EXACTNESS)?;
    let ncomp = space.components();
    let mut m = TripletBuilder::new(space.ndofs, space.ndofs);
    let mut b = vec![0.0; space.ndofs];
    for &t in &space.tris {
        let dofs = &space.element(t).unwrap().dofs;
        for (x, w) in mesh.tris[t].simplex.quadrature(&rule) {
            let s = space.shapes(mesh, t, x);
            let fx = f(x);
            for (i, di) in dofs.iter().enumerate() {
                let DofRef::Free(gi) = *di else { continue };
                b[gi] += w * (0..ncomp).map(|c| fx[c] * s.values[i][c]).sum::<f64>();
                for (j, dj) in dofs.iter().enumerate() {
                    let DofRef::Free(gj) = *dj else { continue };
                    let v: f64 = (0..ncomp).map(|c| s.values[i][c] * s.values[j][c]).sum();
                    m.push(gi, gj, w * v);
                }
            }
        }
    }
    SparseLu::factor(&m.build())?.solve(&b, 1e-10)
}

/// `Π_{h,Γ} g` on one edge: Legendre coefficients in the edge parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProjection {
    pub edge: usize,
    /// `Π g (s) = Σ coeffs[i] P_i(s)`, `s ∈ [-1, 1]` from `verts[0]` to `verts[1]`.
    pub coeffs: Vec<f64>,
}

impl EdgeProjection {
    pub fn eval(&self, s: f64) -> f64 {
        let p = legendre_values(self.coeffs.len() - 1, s);
        self.coeffs.iter().zip(p).map(|(c, p)| c * p).sum()
    }

    /// Moments `(1/h_e) ∫_e Π g P_i`, i.e. the edge DOF values.
    pub fn moments(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c / (2 * i + 1) as f64)
            .collect()
    }
}

/// Piecewise L² projection of `g(x, n_e)` onto `P^k(e)` for each edge.
pub fn project_edge(
    mesh: &StaggeredMesh,
    g: &dyn Fn(Point, Point) -> f64,
    edges: &[usize],
    k: usize,
) -> Result<Vec<EdgeProjection>> {
    let rule = edge_rule(FIELD_EXACTNESS + 1)?;
    Ok(edges
        .iter()
        .map(|&e| {
            let edge = &mesh.edges[e];
            let mut coeffs = vec![0.0; k + 1];
            for (s, w) in rule.iter() {
                let gv = g(edge.point(mesh, s[0]), edge.normal);
                for (i, p) in legendre_values(k, s[0]).into_iter().enumerate() {
                    coeffs[i] += 0.5 * (2 * i + 1) as f64 * w * gv * p;
                }
            }
            EdgeProjection { edge: e, coeffs }
        })
        .collect())
}

/// Cellwise L² projection onto `P^deg(τ)` for an arbitrary set of subtriangles.
#[derive(Debug, Clone)]
pub struct CellwiseProjection {
    basis: ScalarBasis,
    coeffs: Vec<Vec<f64>>,
}

impl CellwiseProjection {
    pub fn new(mesh: &StaggeredMesh, tris: &[usize], deg: usize, f: &dyn Fn(Point) -> f64) -> Result<Self> {
        let basis = ScalarBasis::new(deg);
        let rule = triangle_rule(FIELD_EXACTNESS)?;
        let mut coeffs = vec![Vec::new(); mesh.tris.len()];
        for &t in tris {
            let s = &mesh.tris[t].simplex;
            let mut c = vec![0.0; basis.dim()];
            for (x, w) in s.quadrature(&rule) {
                let v = f(x);
                for (cj, bj) in c.iter_mut().zip(basis.eval(s, x)) {
                    *cj += w * v * bj / s.area();
                }
            }
            coeffs[t] = c;
        }
        Ok(Self { basis, coeffs })
    }

    /// Value on subtriangle `t`; zero outside the projected set.
    pub fn eval(&self, mesh: &StaggeredMesh, t: usize, x: Point) -> f64 {
        let c = &self.coeffs[t];
        if c.is_empty() {
            return 0.0;
        }
        c.iter()
            .zip(self.basis.eval(&mesh.tris[t].simplex, x))
            .map(|(a, b)| a * b)
            .sum()
    }
}
