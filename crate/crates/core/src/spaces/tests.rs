use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::mesh::{build_rectangular_primal, subdivide, BoundaryTag, CellKind, PrimalCell, PrimalMesh, Rect};

fn single_triangle() -> StaggeredMesh {
    let p = PrimalMesh::new(
        vec![[0.0, 0.0], [1.0, 0.0], [0.2, 0.9]],
        vec![PrimalCell {
            verts: vec![0, 1, 2],
            subdomain: Subdomain::Brinkman,
        }],
        [(0, 1), (1, 2), (0, 2)]
            .into_iter()
            .map(|k| (k, BoundaryTag::Brinkman))
            .collect(),
    )
    .unwrap();
    subdivide(&p)
}

fn single_darcy_triangle() -> StaggeredMesh {
    let p = PrimalMesh::new(
        vec![[0.0, 0.0], [1.0, 0.0], [0.2, 0.9]],
        vec![PrimalCell {
            verts: vec![0, 1, 2],
            subdomain: Subdomain::Darcy,
        }],
        [(0, 1), (1, 2), (0, 2)]
            .into_iter()
            .map(|k| (k, BoundaryTag::Darcy))
            .collect(),
    )
    .unwrap();
    subdivide(&p)
}

pub(crate) fn ex1_mesh(n: usize, kind: CellKind) -> StaggeredMesh {
    let p = build_rectangular_primal(
        Rect::new(0.0, 0.5, 0.0, 1.0),
        Rect::new(0.5, 1.0, 0.0, 1.0),
        n,
        n,
        kind,
    )
    .unwrap();
    subdivide(&p)
}

#[test]
fn dof_counts_single_triangle() {
    let m = single_triangle();
    assert_eq!(build_space(SpaceKind::QB, &m, 1).unwrap().ndofs, 9);
    assert_eq!(build_space(SpaceKind::HB, &m, 1).unwrap().ndofs, 12);
    // Gn vanishes on the whole boundary: 3 dual edges x 2 + 3 x 4 interior
    assert_eq!(build_space(SpaceKind::WB, &m, 1).unwrap().ndofs, 18);
    let d = single_darcy_triangle();
    let hd = build_space(SpaceKind::HD, &d, 1).unwrap();
    // 3 primal + 3 dual edges, 2 moments each, no interior
    assert_eq!(hd.ndofs, 12);
    assert!(hd.attachments.iter().all(|a| matches!(a, Attachment::Edge { .. })));
    assert_eq!(build_space(SpaceKind::QD, &d, 1).unwrap().ndofs, 3);
}

#[test]
fn zero_degree_rejected() {
    let m = single_triangle();
    assert!(matches!(build_space(SpaceKind::QB, &m, 0), Err(Error::Argument(_))));
}

#[test]
fn unisolvent_for_all_degrees() {
    for kind_mesh in [CellKind::Triangle, CellKind::Quad] {
        let m = ex1_mesh(2, kind_mesh);
        for k in 1..=3 {
            for kind in SpaceKind::ALL {
                let s = build_space(kind, &m, k).unwrap();
                assert!(s.max_cond() < 1e8, "{} k={k} cond={}", kind.name(), s.max_cond());
                let nloc = kind.components() * dim_pk(kind.poly_degree(k));
                for &t in &s.tris {
                    assert_eq!(s.element(t).unwrap().dofs.len(), nloc);
                }
            }
        }
    }
}

#[test]
fn continuity_by_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 1..=2 {
        let m = ex1_mesh(2, CellKind::Triangle);
        for kind in SpaceKind::ALL {
            let s = build_space(kind, &m, k).unwrap();
            for _ in 0..5 {
                let c: Vec<f64> = (0..s.ndofs).map(|_| rng.random_range(-1.0..1.0)).collect();
                let r = continuity_residual(&s, &m, &c).unwrap();
                assert!(r <= 1e-12, "{} k={k}: {r}", kind.name());
            }
        }
    }
}

fn poly(k: usize, coef: &[f64], x: Point) -> f64 {
    let mut v = 0.0;
    let mut idx = 0;
    for d in 0..=k {
        for a in 0..=d {
            v += coef[idx] * x[0].powi(a as i32) * x[1].powi((d - a) as i32);
            idx += 1;
        }
    }
    v
}

#[test]
fn polynomial_reproduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = ex1_mesh(2, CellKind::Quad);
    let all_boundary: BTreeSet<usize> = m
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| matches!(e.class, EdgeClass::PrimalBoundary | EdgeClass::Interface))
        .map(|(i, _)| i)
        .collect();
    for k in 1..=3 {
        for kind in SpaceKind::ALL {
            let opts = SpaceOptions {
                free_wb_edges: all_boundary.clone(),
            };
            let s = build_space_with(kind, &m, k, &opts).unwrap();
            let deg = kind.poly_degree(k);
            let coefs: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..dim_pk(deg)).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let f = |x: Point| -> Value {
                let mut v = [0.0; 4];
                for c in 0..kind.components() {
                    v[c] = poly(deg, &coefs[c], x);
                }
                v
            };
            let dofs = interpolate(&s, &m, &f).unwrap();
            for &t in &s.tris {
                let x = m.tris[t].simplex.to_physical([0.2, 0.3]);
                let v = s.eval(&m, t, &dofs, x);
                let e = f(x);
                for c in 0..4 {
                    assert!((v[c] - e[c]).abs() < 1e-12, "{} k={k}", kind.name());
                }
            }
        }
    }
}

#[test]
fn bdm_commutes_with_divergence() {
    let m = ex1_mesh(4, CellKind::Quad);
    let hd = build_space(SpaceKind::HD, &m, 1).unwrap();
    let qd = build_space(SpaceKind::QD, &m, 1).unwrap();
    let u = |x: Point| [(3.0 * x[0]).sin() * x[1].exp(), x[0] * x[0] * (2.0 * x[1]).cos()];
    let div = |x: Point| 3.0 * (3.0 * x[0]).cos() * x[1].exp() - 2.0 * x[0] * x[0] * (2.0 * x[1]).sin();
    let pi = interpolate_bdm(&hd, &m, &u).unwrap();
    let pd = project_l2_cellwise(&qd, &m, &div).unwrap();
    for &t in &hd.tris {
        let x = m.tris[t].simplex.centroid();
        let (_, g) = hd.eval_with_grad(&m, t, &pi, x);
        let d = divergence(SpaceKind::HD, &g)[0];
        let p = qd.eval(&m, t, &pd, x)[0];
        assert!((d - p).abs() < 1e-11, "{d} vs {p}");
    }
}

#[test]
fn edge_projection_properties() {
    let m = ex1_mesh(2, CellKind::Quad);
    let edges: Vec<usize> = (0..m.edges.len()).filter(|&e| m.edges[e].is_boundary()).collect();
    // polynomial data reproduced
    let g = |x: Point, _: Point| 1.0 + 2.0 * x[0] - x[1];
    for p in project_edge(&m, &g, &edges, 1).unwrap() {
        let e = &m.edges[p.edge];
        for s in [-1.0, -0.3, 0.5, 1.0] {
            assert!((p.eval(s) - g(e.point(&m, s), e.normal)).abs() < 1e-13);
        }
    }
    // residual orthogonal to P^1(e)
    let g = |x: Point, _: Point| (5.0 * x[0] + 3.0 * x[1]).sin();
    let rule = edge_rule(25).unwrap();
    for p in project_edge(&m, &g, &edges, 1).unwrap() {
        let e = &m.edges[p.edge];
        for i in 0..2 {
            let r: f64 = rule
                .iter()
                .map(|(s, w)| w * (g(e.point(&m, s[0]), e.normal) - p.eval(s[0])) * legendre_values(1, s[0])[i])
                .sum();
            assert!(r.abs() < 1e-12);
        }
    }
}

#[test]
fn cellwise_projection_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = ex1_mesh(2, CellKind::Triangle);
    let qd = build_space(SpaceKind::QD, &m, 2).unwrap();
    let rule = triangle_rule(20).unwrap();
    for _ in 0..20 {
        let (a, b, c) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(0.0..6.0));
        let v = move |x: Point| (a * x[0] + b * x[1] + c).sin() * (x[0] - x[1]).exp();
        let p = project_l2_cellwise(&qd, &m, &v).unwrap();
        let (mut nv, mut np) = (0.0, 0.0);
        for &t in &qd.tris {
            for (x, w) in m.tris[t].simplex.quadrature(&rule) {
                nv += w * v(x).powi(2);
                np += w * qd.eval(&m, t, &p, x)[0].powi(2);
            }
        }
        assert!(np <= nv * (1.0 + 1e-14));
    }
}

#[test]
fn global_l2_projection_reproduces() {
    let m = ex1_mesh(2, CellKind::Quad);
    let uh = build_space(SpaceKind::UH, &m, 1).unwrap();
    let f = |x: Point| [1.0 - 2.0 * x[0] + 0.5 * x[1], 0.0, 0.0, 0.0];
    let c = project_l2(&uh, &m, &f).unwrap();
    let i = interpolate(&uh, &m, &f).unwrap();
    for (a, b) in c.iter().zip(&i) {
        assert!((a - b).abs() < 1e-12);
    }
}
