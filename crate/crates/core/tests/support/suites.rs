//! Property suites for the finite element spaces and projections, reporting
//! measured maxima against their tolerances.
#![allow(dead_code)]

use bdflow::coeff::Coefficient;
use bdflow::flow::{assemble_forms, FlowSpaces};
use bdflow::harness::{BRINKMAN_RECT, DARCY_RECT};
use bdflow::mesh::{build_rectangular_primal, subdivide, CellKind, EdgeClass, StaggeredMesh};
use bdflow::polybasis::dim_pk;
use bdflow::spaces::{
    build_space, continuity_residual, divergence, interpolate_bdm, interpolate_ih, interpolate_jh,
    project_edge, project_l2_cellwise, BoundaryData, SpaceKind, MAX_LOCAL_COND,
};
use bdflow::transport::{assemble_transport, AnalyticVelocity, TransportParams, TransportSpaces};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use super::{eval_edge_poly, oracle_bdm, oracle_cellwise, oracle_edge, oracle_ih, oracle_jh, LocalPoly, Point};

/// One measured quantity and the bound it must respect.
#[derive(Debug, Clone)]
pub struct Measured {
    pub what: String,
    pub value: f64,
    pub tol: f64,
}

impl Measured {
    fn new(what: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { what: what.into(), value, tol }
    }

    pub fn ok(&self) -> bool {
        self.value <= self.tol
    }
}

pub const CONTINUITY_TOL: f64 = 1e-12;
pub const ADJOINT_TOL: f64 = 1e-13;
pub const REPRODUCTION_TOL: f64 = 1e-13;
pub const ORACLE_TOL: f64 = 1e-11;
pub const COMMUTE_TOL: f64 = 1e-11;
pub const RANDOM_VECTORS: usize = 50;

/// The 4×4-per-subdomain test mesh of the unit square.
pub fn mesh4(kind: CellKind) -> StaggeredMesh {
    subdivide(&build_rectangular_primal(BRINKMAN_RECT, DARCY_RECT, 4, 4, kind).unwrap())
}

fn kind_name(kind: CellKind) -> &'static str {
    match kind {
        CellKind::Quad => "quad",
        CellKind::Triangle => "tri",
    }
}

fn verts(mesh: &StaggeredMesh, t: usize) -> [Point; 3] {
    mesh.tris[t].verts.map(|v| mesh.points[v])
}

/// Sample points strictly inside a subtriangle.
fn samples(mesh: &StaggeredMesh, t: usize) -> Vec<Point> {
    let v = verts(mesh, t);
    [[0.6, 0.2, 0.2], [0.1, 0.7, 0.2], [0.25, 0.25, 0.5], [1.0 / 3.0; 3]]
        .iter()
        .map(|l| {
            [
                l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
                l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
            ]
        })
        .collect()
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Unisolvence, continuity by construction and adjoint identities.
pub fn space_suite(k: usize) -> Vec<Measured> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(70 + k as u64);
    for cell in [CellKind::Quad, CellKind::Triangle] {
        let mesh = mesh4(cell);
        let tag = format!("{} k={k}", kind_name(cell));
        for kind in SpaceKind::ALL {
            let space = match build_space(kind, &mesh, k) {
                Ok(s) => s,
                Err(e) => {
                    out.push(Measured::new(format!("unisolvence {} {tag}: {e}", kind.name()), f64::INFINITY, 0.0));
                    continue;
                }
            };
            let nloc = kind.components() * dim_pk(kind.poly_degree(k));
            let complete = space.tris.iter().all(|&t| space.element(t).is_some_and(|el| el.dofs.len() == nloc));
            let cond = if complete { space.max_cond() } else { f64::INFINITY };
            out.push(Measured::new(format!("local condition {} {tag}", kind.name()), cond, MAX_LOCAL_COND));
            let worst = (0..RANDOM_VECTORS)
                .map(|_| continuity_residual(&space, &mesh, &random_vec(&mut rng, space.ndofs)).unwrap())
                .fold(0.0, f64::max);
            out.push(Measured::new(format!("continuity {} {tag}", kind.name()), worst, CONTINUITY_TOL));
        }
        for dirichlet in [false, true] {
            let spaces = FlowSpaces::new(&mesh, k, dirichlet).unwrap();
            let one = Coefficient::scalar(1.0);
            let f = assemble_forms(&mesh, &spaces, 1.0, &one, &one).unwrap();
            let rel = |a: &bdflow::sparse::SparseMatrix, b: &bdflow::sparse::SparseMatrix| {
                a.max_abs_diff(&b.transpose()) / a.max_abs().max(1.0)
            };
            let d = if dirichlet { " dirichlet" } else { "" };
            out.push(Measured::new(format!("adjoint B_h {tag}{d}"), rel(&f.b, &f.b_star), ADJOINT_TOL));
            out.push(Measured::new(format!("adjoint b_h {tag}{d}"), rel(&f.c, &f.c_star), ADJOINT_TOL));
        }
        let ts = TransportSpaces::new(&mesh, k).unwrap();
        let tp = TransportParams::new(Coefficient::scalar(1.0), 0.1, 1.0);
        let swirl = AnalyticVelocity {
            u: Arc::new(|x| [x[1] - 0.4, 0.3 - x[0]]),
            div: Arc::new(|_| 0.0),
        };
        let b = assemble_transport(&mesh, &ts, &tp, &swirl, &BoundaryData::homogeneous()).unwrap();
        let v = b.t.max_abs_diff(&b.t_star.transpose()) / b.t.max_abs().max(1.0);
        out.push(Measured::new(format!("adjoint transport {tag}"), v, ADJOINT_TOL));
    }
    out
}

/// Random polynomial of total degree `deg` in physical coordinates.
fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> impl Fn(Point) -> f64 + Clone {
    let coef = random_vec(rng, dim_pk(deg));
    move |x: Point| {
        let mut v = 0.0;
        let mut i = 0;
        for d in 0..=deg {
            for a in 0..=d {
                v += coef[i] * x[0].powi(a as i32) * x[1].powi((d - a) as i32);
                i += 1;
            }
        }
        v
    }
}

/// Random smooth, non-polynomial field.
fn random_smooth(rng: &mut ChaCha8Rng) -> impl Fn(Point) -> f64 + Clone {
    let (a, b, c, d) = (
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(0.0..6.0),
        rng.random_range(-1.0..1.0),
    );
    move |x: Point| (a * x[0] + b * x[1] + c).sin() * (d * (x[0] - x[1])).exp()
}

/// Worst pointwise gap between a library field and an exact or oracle field.
fn gap(
    mesh: &StaggeredMesh,
    tris: &[usize],
    ncomp: usize,
    library: &dyn Fn(usize, Point) -> [f64; 4],
    reference: &dyn Fn(usize, Point) -> Vec<f64>,
) -> f64 {
    let mut worst: f64 = 0.0;
    for &t in tris {
        for x in samples(mesh, t) {
            let a = library(t, x);
            let b = reference(t, x);
            for c in 0..ncomp {
                worst = worst.max((a[c] - b[c]).abs());
            }
        }
    }
    worst
}

/// Polynomial reproduction, oracle agreement and BDM commutativity of
/// `Π_{h,Γ}`, `I_h`, `J_h`, `Π^BDM` and `𝕡_h`.
pub fn projection_suite(k: usize) -> Vec<Measured> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(80 + k as u64);
    for cell in [CellKind::Quad, CellKind::Triangle] {
        let mesh = mesh4(cell);
        let tag = format!("{} k={k}", kind_name(cell));
        let qb = build_space(SpaceKind::QB, &mesh, k).unwrap();
        let hb = build_space(SpaceKind::HB, &mesh, k).unwrap();
        let hd = build_space(SpaceKind::HD, &mesh, k).unwrap();
        let qd = build_space(SpaceKind::QD, &mesh, k).unwrap();

        for (label, smooth) in [("reproduction", false), ("oracle", true)] {
            let tol = if smooth { ORACLE_TOL } else { REPRODUCTION_TOL };
            let field = |rng: &mut ChaCha8Rng| -> Box<dyn Fn(Point) -> f64> {
                if smooth {
                    Box::new(random_smooth(rng))
                } else {
                    Box::new(random_poly(rng, k))
                }
            };
            let (f, g) = (field(&mut rng), field(&mut rng));
            let vf = |x: Point| [f(x), g(x)];

            // I_h
            let c = interpolate_ih(&qb, &mesh, &f).unwrap();
            let reference = |t: usize, x: Point| -> Vec<f64> {
                if smooth {
                    oracle_ih(verts(&mesh, t), k, &f).eval(x)
                } else {
                    vec![f(x)]
                }
            };
            let e = gap(&mesh, &qb.tris, 1, &|t, x| qb.eval(&mesh, t, &c, x), &reference);
            out.push(Measured::new(format!("I_h {label} {tag}"), e, tol));

            // J_h
            let c = interpolate_jh(&hb, &mesh, &vf).unwrap();
            let reference = |t: usize, x: Point| -> Vec<f64> {
                if smooth {
                    oracle_jh(verts(&mesh, t), k, &vf).eval(x)
                } else {
                    vf(x).to_vec()
                }
            };
            let e = gap(&mesh, &hb.tris, 2, &|t, x| hb.eval(&mesh, t, &c, x), &reference);
            out.push(Measured::new(format!("J_h {label} {tag}"), e, tol));

            // Π^BDM
            let c = interpolate_bdm(&hd, &mesh, &vf).unwrap();
            let reference = |t: usize, x: Point| -> Vec<f64> {
                if smooth {
                    oracle_bdm(verts(&mesh, t), k, &vf).eval(x)
                } else {
                    vf(x).to_vec()
                }
            };
            let e = gap(&mesh, &hd.tris, 2, &|t, x| hd.eval(&mesh, t, &c, x), &reference);
            out.push(Measured::new(format!("BDM {label} {tag}"), e, tol));

            // 𝕡_h onto P^{k-1}
            let low: Box<dyn Fn(Point) -> f64> =
                if smooth { Box::new(random_smooth(&mut rng)) } else { Box::new(random_poly(&mut rng, k - 1)) };
            let c = project_l2_cellwise(&qd, &mesh, &low).unwrap();
            let reference = |t: usize, x: Point| -> Vec<f64> {
                if smooth {
                    oracle_cellwise(verts(&mesh, t), k - 1, &low).eval(x)
                } else {
                    vec![low(x)]
                }
            };
            let e = gap(&mesh, &qd.tris, 1, &|t, x| qd.eval(&mesh, t, &c, x), &reference);
            out.push(Measured::new(format!("cellwise L2 {label} {tag}"), e, tol));

            // Π_{h,Γ} on boundary and interface edges
            let edges: Vec<usize> = (0..mesh.edges.len())
                .filter(|&e| matches!(mesh.edges[e].class, EdgeClass::PrimalBoundary | EdgeClass::Interface))
                .collect();
            let gn = |x: Point, n: Point| f(x) * n[0] + g(x) * n[1];
            let mut worst: f64 = 0.0;
            for p in project_edge(&mesh, &gn, &edges, k).unwrap() {
                let edge = &mesh.edges[p.edge];
                let (a, b) = (mesh.points[edge.verts[0]], mesh.points[edge.verts[1]]);
                let n = edge.normal;
                let coef = oracle_edge(a, b, k, &|x| gn(x, n));
                for s in [-0.9, -0.35, 0.1, 0.8] {
                    let want = if smooth { eval_edge_poly(&coef, s) } else { gn(edge.point(&mesh, s), n) };
                    worst = worst.max((p.eval(s) - want).abs());
                }
            }
            out.push(Measured::new(format!("edge projection {label} {tag}"), worst, tol));
        }

        // ∇·Π^BDM u = 𝕡_h ∇·u, checked against the library and the oracle
        let (a, b, c0) = (rng.random_range(1.0..3.0), rng.random_range(1.0..3.0), rng.random_range(0.5..2.0));
        let u = move |x: Point| [(a * x[0]).sin() * (c0 * x[1]).exp(), x[0] * x[0] * (b * x[1]).cos()];
        let div = move |x: Point| {
            a * (a * x[0]).cos() * (c0 * x[1]).exp() - b * x[0] * x[0] * (b * x[1]).sin()
        };
        let pi = interpolate_bdm(&hd, &mesh, &u).unwrap();
        let pd = project_l2_cellwise(&qd, &mesh, &div).unwrap();
        let mut worst: f64 = 0.0;
        for &t in &hd.tris {
            let oracle: LocalPoly = oracle_bdm(verts(&mesh, t), k, &u);
            let p_oracle = oracle_cellwise(verts(&mesh, t), k - 1, &div);
            for x in samples(&mesh, t) {
                let (_, grad) = hd.eval_with_grad(&mesh, t, &pi, x);
                let d = divergence(SpaceKind::HD, &grad)[0];
                let p = qd.eval(&mesh, t, &pd, x)[0];
                worst = worst.max((d - p).abs()).max((oracle.div(x) - p_oracle.eval(x)[0]).abs());
            }
        }
        out.push(Measured::new(format!("BDM commutativity {tag}"), worst, COMMUTE_TOL));
    }
    out
}
