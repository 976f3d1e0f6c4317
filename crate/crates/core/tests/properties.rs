use std::path::Path;
use std::sync::Arc;

use bdflow::coeff::Coefficient;
use bdflow::harness::{eoc, BRINKMAN_RECT, DARCY_RECT};
use bdflow::mesh::{build_rectangular_primal, parse_primal, subdivide, write_primal, CellKind};
use bdflow::spaces::{build_space, continuity_residual, BoundaryData, SpaceKind};
use bdflow::sparse::{SparseLu, SparseMatrix, TripletBuilder};
use bdflow::transport::{AnalyticVelocity, TransportParams, TransportSpaces, TransportSystem};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn cell_kind() -> impl Strategy<Value = CellKind> {
    prop_oneof![Just(CellKind::Quad), Just(CellKind::Triangle)]
}

fn dense(a: &SparseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a.get(i, j))
}

fn sparse(rows: usize, cols: usize, entries: &[(usize, usize, f64)]) -> SparseMatrix {
    let mut b = TripletBuilder::new(rows, cols);
    for &(i, j, v) in entries {
        b.push(i % rows, j % cols, v);
    }
    b.build()
}

/// Random block-diagonal matrix with dominant diagonal, under a random
/// symmetric permutation.
fn block_matrix(blocks: &[usize], seed: &[f64], perm_seed: u64) -> (SparseMatrix, usize) {
    let n: usize = blocks.iter().sum();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut s = perm_seed;
    for i in (1..n).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        perm.swap(i, (s >> 33) as usize % (i + 1));
    }
    let mut b = TripletBuilder::new(n, n);
    let mut start = 0;
    let mut idx = 0;
    for &m in blocks {
        for i in 0..m {
            for j in 0..m {
                let v = seed[idx % seed.len()];
                idx += 1;
                let v = if i == j { 2.0 * m as f64 + v } else { v };
                b.push(perm[start + i], perm[start + j], v);
            }
        }
        start += m;
    }
    (b.build(), blocks.iter().copied().max().unwrap_or(0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eoc_recovers_power_laws(c in 1e-6f64..1e3, p in 0.5f64..4.0, h in 1e-3f64..0.5, r in 1.5f64..4.0) {
        let (hc, hf) = (h * r, h);
        let got = eoc(c * hc.powf(p), c * hf.powf(p), hc, hf);
        prop_assert!((got - p).abs() < 1e-9, "{got} vs {p}");
    }

    #[test]
    fn sparse_product_matches_dense(
        (r, m, c) in (1usize..8, 1usize..8, 1usize..8),
        a in prop::collection::vec((0usize..64, 0usize..64, -2.0f64..2.0), 0..30),
        b in prop::collection::vec((0usize..64, 0usize..64, -2.0f64..2.0), 0..30),
    ) {
        let (a, b) = (sparse(r, m, &a), sparse(m, c, &b));
        let got = dense(&a.mul(&b));
        let want = dense(&a) * dense(&b);
        prop_assert!((got - want).amax() < 1e-13);
    }

    #[test]
    fn block_inverse_matches_dense(
        blocks in prop::collection::vec(1usize..5, 1..6),
        seed in prop::collection::vec(-1.0f64..1.0, 1..40),
        perm_seed in any::<u64>(),
    ) {
        let (a, largest) = block_matrix(&blocks, &seed, perm_seed);
        let inv = a.block_inverse(largest).unwrap();
        let n = a.nrows();
        let id = dense(&a) * dense(&inv);
        prop_assert!((id - DMatrix::<f64>::identity(n, n)).amax() < 1e-12);
        if largest > 1 {
            prop_assert!(a.block_inverse(largest - 1).is_err());
        }
    }

    #[test]
    fn precise_solve_has_small_residual(
        blocks in prop::collection::vec(1usize..6, 1..8),
        seed in prop::collection::vec(-1.0f64..1.0, 1..40),
        b in prop::collection::vec(-1e3f64..1e3, 40),
    ) {
        let (a, _) = block_matrix(&blocks, &seed, 7);
        let lu = SparseLu::factor(&a).unwrap();
        let rhs = &b[..a.nrows()];
        let x = lu.solve_precise(rhs, 1e-10).unwrap();
        prop_assert!(lu.relative_residual(&x, rhs) < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mesh_text_round_trips(nx in 1usize..5, ny in 1usize..5, kind in cell_kind()) {
        let m = build_rectangular_primal(BRINKMAN_RECT, DARCY_RECT, nx, ny, kind).unwrap();
        let text = write_primal(&m);
        let back = parse_primal(&text, Path::new("round-trip")).unwrap();
        prop_assert_eq!(&back.vertices, &m.vertices);
        prop_assert_eq!(&back.boundary, &m.boundary);
        prop_assert_eq!(back.cells.len(), m.cells.len());
        prop_assert_eq!(write_primal(&back), text);
    }

    #[test]
    fn spaces_are_continuous_for_any_coefficients(
        kind in prop::sample::select(SpaceKind::ALL.to_vec()),
        k in 1usize..=3,
        cell in cell_kind(),
        seed in prop::collection::vec(-1e3f64..1e3, 1..50),
    ) {
        let mesh = subdivide(&build_rectangular_primal(BRINKMAN_RECT, DARCY_RECT, 2, 2, cell).unwrap());
        let space = build_space(kind, &mesh, k).unwrap();
        let c: Vec<f64> = (0..space.ndofs).map(|i| seed[i % seed.len()] * (1.0 + i as f64).sin()).collect();
        let scale = c.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let r = continuity_residual(&space, &mesh, &c).unwrap();
        prop_assert!(r <= 1e-12 * scale, "{} k={k}: {r:e}", kind.name());
    }

    #[test]
    fn quiescent_state_is_preserved(
        c0 in -5.0f64..5.0,
        u in (-1.0f64..1.0, -1.0f64..1.0),
        k_diff in 1e-3f64..10.0,
        cell in cell_kind(),
    ) {
        let mesh = subdivide(&build_rectangular_primal(BRINKMAN_RECT, DARCY_RECT, 2, 2, cell).unwrap());
        let u = [u.0, u.1];
        let spaces = TransportSpaces::new(&mesh, 1).unwrap();
        let mut p = TransportParams::new(Coefficient::scalar(k_diff), 0.05, 0.25);
        p.c0 = Arc::new(move |_| c0);
        let mut bd = BoundaryData::homogeneous();
        bd.g1 = Arc::new(move |_, n| u[0] * n[0] + u[1] * n[1]);
        bd.g2 = bd.g1.clone();
        bd.c_in = Arc::new(move |_, _| c0);
        let sys = TransportSystem::new(&mesh, &spaces, &p, &AnalyticVelocity::constant(u), &bd).unwrap();
        let one = sys.blocks.one.clone();
        let mut worst: f64 = 0.0;
        sys.run(|st| {
            for (a, b) in st.c.iter().zip(&one) {
                worst = worst.max((a - c0 * b).abs());
            }
            worst = worst.max(st.z.iter().fold(0.0, |m, v| m.max(v.abs())));
            Ok(())
        })
        .unwrap();
        prop_assert!(worst <= 1e-11 * c0.abs().max(1.0), "{worst:e}");
    }
}
