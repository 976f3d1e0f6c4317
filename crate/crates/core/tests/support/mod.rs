//! Brute-force oracles and published reference values shared by the
//! integration tests and the acceptance target.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

pub mod pressure;
pub mod suites;

pub type Point = [f64; 2];

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// three-term recurrence, `n ≥ 2`.
pub fn gauss(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

/// Collapsed tensor Gauss rule on a triangle (physical points, weights).
pub fn tri_quad(v: [Point; 3], n: usize) -> Vec<(Point, f64)> {
    let (xs, ws) = gauss(n);
    let det = ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
    let mut out = Vec::with_capacity(n * n);
    for (a, wa) in xs.iter().zip(&ws) {
        for (b, wb) in xs.iter().zip(&ws) {
            let u = 0.5 * (a + 1.0);
            let s = 0.5 * (b + 1.0) * (1.0 - u);
            let x = [
                v[0][0] + u * (v[1][0] - v[0][0]) + s * (v[2][0] - v[0][0]),
                v[0][1] + u * (v[1][1] - v[0][1]) + s * (v[2][1] - v[0][1]),
            ];
            out.push((x, 0.25 * wa * wb * (1.0 - u) * det));
        }
    }
    out
}

/// Gauss rule on the segment `a → b`: `(point, weight, s ∈ [-1, 1])`.
pub fn edge_quad(a: Point, b: Point, n: usize) -> Vec<(Point, f64, f64)> {
    let (xs, ws) = gauss(n);
    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    xs.iter()
        .zip(&ws)
        .map(|(&s, &w)| {
            let t = 0.5 * (1.0 + s);
            ([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], 0.5 * len * w, s)
        })
        .collect()
}

/// Scaled monomials `((x - c)/h)^a ((y - c)/h)^b`, `a + b ≤ deg`, with
/// their physical gradients.
#[derive(Debug, Clone, Copy)]
pub struct Monomials {
    pub deg: usize,
    pub center: Point,
    pub scale: f64,
}

impl Monomials {
    pub fn on(v: [Point; 3], deg: usize) -> Self {
        let center = [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0];
        let d = |a: Point, b: Point| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let scale = d(v[0], v[1]).max(d(v[1], v[2])).max(d(v[2], v[0]));
        Self { deg, center, scale }
    }

    pub fn dim(&self) -> usize {
        (self.deg + 1) * (self.deg + 2) / 2
    }

    fn exps(&self) -> impl Iterator<Item = (i32, i32)> {
        let deg = self.deg as i32;
        (0..=deg).flat_map(|d| (0..=d).map(move |a| (a, d - a)))
    }

    pub fn eval(&self, x: Point) -> Vec<f64> {
        let (u, v) = ((x[0] - self.center[0]) / self.scale, (x[1] - self.center[1]) / self.scale);
        self.exps().map(|(a, b)| u.powi(a) * v.powi(b)).collect()
    }

    pub fn grad(&self, x: Point) -> Vec<Point> {
        let (u, v) = ((x[0] - self.center[0]) / self.scale, (x[1] - self.center[1]) / self.scale);
        let p = |s: f64, e: i32| if e < 0 { 0.0 } else { s.powi(e) };
        self.exps()
            .map(|(a, b)| {
                [
                    a as f64 * p(u, a - 1) * p(v, b) / self.scale,
                    b as f64 * p(u, a) * p(v, b - 1) / self.scale,
                ]
            })
            .collect()
    }
}

/// A polynomial on one triangle: one coefficient vector per component.
#[derive(Debug, Clone)]
pub struct LocalPoly {
    pub basis: Monomials,
    pub coef: Vec<Vec<f64>>,
}

impl LocalPoly {
    pub fn eval(&self, x: Point) -> Vec<f64> {
        let m = self.basis.eval(x);
        self.coef.iter().map(|c| c.iter().zip(&m).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn div(&self, x: Point) -> f64 {
        let g = self.basis.grad(x);
        (0..2).map(|c| self.coef[c].iter().zip(&g).map(|(a, b)| a * b[c]).sum::<f64>()).sum()
    }
}

fn solve(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Vec<f64> {
    let n = rhs.len();
    assert!(rows.iter().all(|r| r.len() == n), "oracle system is not square");
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let x = a.lu().solve(&DVector::from_vec(rhs)).expect("singular oracle system");
    x.iter().copied().collect()
}

const QUAD: usize = 14;

/// Segment `a → b` with its unit normal (left of the direction).
fn normal(a: Point, b: Point) -> Point {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let l = (dx * dx + dy * dy).sqrt();
    [dy / l, -dx / l]
}

/// Rows `∫_e (weight·u) s^i`, `i ≤ k`, over the monomial unknowns of every
/// component, with right-hand sides `∫_e f s^i`.
fn edge_rows(
    a: Point,
    b: Point,
    k: usize,
    m: &Monomials,
    weight: &dyn Fn(Point) -> Vec<f64>,
    f: &dyn Fn(Point) -> f64,
    rows: &mut Vec<Vec<f64>>,
    rhs: &mut Vec<f64>,
) {
    let q = edge_quad(a, b, QUAD);
    for i in 0..=k {
        let mut row = vec![0.0; weight(a).len() * m.dim()];
        let mut r = 0.0;
        for &(x, w, s) in &q {
            let t = s.powi(i as i32);
            let mx = m.eval(x);
            for (c, wc) in weight(x).iter().enumerate() {
                for (j, mj) in mx.iter().enumerate() {
                    row[c * m.dim() + j] += w * t * wc * mj;
                }
            }
            r += w * t * f(x);
        }
        rows.push(row);
        rhs.push(r);
    }
}

/// `I_h q` on a Brinkman subtriangle `(a, b, ν)` with primal edge `a → b`.
pub fn oracle_ih(v: [Point; 3], k: usize, q: &dyn Fn(Point) -> f64) -> LocalPoly {
    let m = Monomials::on(v, k);
    let (mut rows, mut rhs) = (Vec::new(), Vec::new());
    edge_rows(v[0], v[1], k, &m, &|_| vec![1.0], q, &mut rows, &mut rhs);
    if k >= 1 {
        let test = Monomials { deg: k - 1, ..m };
        for i in 0..test.dim() {
            let mut row = vec![0.0; m.dim()];
            let mut r = 0.0;
            for (x, w) in tri_quad(v, QUAD) {
                let t = test.eval(x)[i];
                for (j, mj) in m.eval(x).iter().enumerate() {
                    row[j] += w * t * mj;
                }
                r += w * t * q(x);
            }
            rows.push(row);
            rhs.push(r);
        }
    }
    LocalPoly { basis: m, coef: vec![solve(rows, rhs)] }
}

/// Vector interior rows `∫_τ u_c p_i` against `P^{deg}`.
fn interior_vector_rows(
    v: [Point; 3],
    m: &Monomials,
    deg: usize,
    f: &dyn Fn(Point) -> Point,
    rows: &mut Vec<Vec<f64>>,
    rhs: &mut Vec<f64>,
) {
    let test = Monomials { deg, ..*m };
    let q = tri_quad(v, QUAD);
    for c in 0..2 {
        for i in 0..test.dim() {
            let mut row = vec![0.0; 2 * m.dim()];
            let mut r = 0.0;
            for &(x, w) in &q {
                let t = test.eval(x)[i];
                for (j, mj) in m.eval(x).iter().enumerate() {
                    row[c * m.dim() + j] += w * t * mj;
                }
                r += w * t * f(x)[c];
            }
            rows.push(row);
            rhs.push(r);
        }
    }
}

fn vector_poly(m: Monomials, x: Vec<f64>) -> LocalPoly {
    let n = m.dim();
    LocalPoly { basis: m, coef: vec![x[..n].to_vec(), x[n..].to_vec()] }
}

/// `J_h u` on a Brinkman subtriangle `(a, b, ν)`: normal moments on the two
/// dual edges and vector moments against `P^{k-1}`.
pub fn oracle_jh(v: [Point; 3], k: usize, u: &dyn Fn(Point) -> Point) -> LocalPoly {
    let m = Monomials::on(v, k);
    let (mut rows, mut rhs) = (Vec::new(), Vec::new());
    for (a, b) in [(v[1], v[2]), (v[2], v[0])] {
        let n = normal(a, b);
        edge_rows(a, b, k, &m, &|_| vec![n[0], n[1]], &|x| u(x)[0] * n[0] + u(x)[1] * n[1], &mut rows, &mut rhs);
    }
    if k >= 1 {
        interior_vector_rows(v, &m, k - 1, u, &mut rows, &mut rhs);
    }
    vector_poly(m, solve(rows, rhs))
}

/// `Π^BDM u` on a triangle: normal moments on all three edges, moments
/// against `∇P^{k-1}` and against `curl(λ₀λ₁λ₂ P^{k-2})`.
pub fn oracle_bdm(v: [Point; 3], k: usize, u: &dyn Fn(Point) -> Point) -> LocalPoly {
    let m = Monomials::on(v, k);
    let (mut rows, mut rhs) = (Vec::new(), Vec::new());
    for (a, b) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
        let n = normal(a, b);
        edge_rows(a, b, k, &m, &|_| vec![n[0], n[1]], &|x| u(x)[0] * n[0] + u(x)[1] * n[1], &mut rows, &mut rhs);
    }
    let q = tri_quad(v, QUAD);
    let mut tests: Vec<Box<dyn Fn(Point) -> Point>> = Vec::new();
    {
        let g = Monomials { deg: k - 1, ..m };
        for i in 1..g.dim() {
            tests.push(Box::new(move |x| g.grad(x)[i]));
        }
    }
    if k >= 2 {
        let bm = Monomials { deg: k - 2, ..m };
        let lam = barycentric(v);
        for i in 0..bm.dim() {
            let lam = lam.clone();
            tests.push(Box::new(move |x| {
                let l: Vec<f64> = lam.iter().map(|f| f.0 + f.1[0] * x[0] + f.1[1] * x[1]).collect();
                let bub = l[0] * l[1] * l[2];
                let gb = [0, 1].map(|c| {
                    lam[0].1[c] * l[1] * l[2] + l[0] * lam[1].1[c] * l[2] + l[0] * l[1] * lam[2].1[c]
                });
                let p = bm.eval(x)[i];
                let gp = bm.grad(x)[i];
                let g = [gb[0] * p + bub * gp[0], gb[1] * p + bub * gp[1]];
                [g[1], -g[0]]
            }));
        }
    }
    for t in &tests {
        let mut row = vec![0.0; 2 * m.dim()];
        let mut r = 0.0;
        for &(x, w) in &q {
            let tv = t(x);
            let ux = u(x);
            for (j, mj) in m.eval(x).iter().enumerate() {
                row[j] += w * tv[0] * mj;
                row[m.dim() + j] += w * tv[1] * mj;
            }
            r += w * (tv[0] * ux[0] + tv[1] * ux[1]);
        }
        rows.push(row);
        rhs.push(r);
    }
    vector_poly(m, solve(rows, rhs))
}

/// Affine barycentric coordinates `λ_i(x) = c_i + g_i·x`.
fn barycentric(v: [Point; 3]) -> Vec<(f64, Point)> {
    let a = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 1.0, v[0][0], v[1][0], v[2][0], v[0][1], v[1][1], v[2][1]]);
    let inv = a.try_inverse().expect("degenerate triangle");
    (0..3).map(|i| (inv[(i, 0)], [inv[(i, 1)], inv[(i, 2)]])).collect()
}

/// L² projection of `f` onto `P^deg(τ)` by a Gram solve.
pub fn oracle_cellwise(v: [Point; 3], deg: usize, f: &dyn Fn(Point) -> f64) -> LocalPoly {
    let m = Monomials::on(v, deg);
    let q = tri_quad(v, QUAD);
    let mut rows = vec![vec![0.0; m.dim()]; m.dim()];
    let mut rhs = vec![0.0; m.dim()];
    for &(x, w) in &q {
        let mx = m.eval(x);
        let fx = f(x);
        for i in 0..m.dim() {
            rhs[i] += w * mx[i] * fx;
            for j in 0..m.dim() {
                rows[i][j] += w * mx[i] * mx[j];
            }
        }
    }
    LocalPoly { basis: m, coef: vec![solve(rows, rhs)] }
}

/// L² projection of `g` onto `P^k` on the segment `a → b`, as coefficients
/// of `s^i`, `s ∈ [-1, 1]`.
pub fn oracle_edge(a: Point, b: Point, k: usize, g: &dyn Fn(Point) -> f64) -> Vec<f64> {
    let q = edge_quad(a, b, QUAD);
    let mut rows = vec![vec![0.0; k + 1]; k + 1];
    let mut rhs = vec![0.0; k + 1];
    for &(x, w, s) in &q {
        let gx = g(x);
        for i in 0..=k {
            rhs[i] += w * s.powi(i as i32) * gx;
            for j in 0..=k {
                rows[i][j] += w * s.powi((i + j) as i32);
            }
        }
    }
    solve(rows, rhs)
}

pub fn eval_edge_poly(coef: &[f64], s: f64) -> f64 {
    coef.iter().enumerate().map(|(i, c)| c * s.powi(i as i32)).sum()
}

/// Reference values of the convergence tables, coarse to fine over
/// `1/h = 2, 4, 8, 16, 32`, columns `L, u_B, p_B, u_D, p_D, c, z`.
pub mod tables {
    pub const COLUMNS: [&str; 7] = ["L", "uB", "pB", "uD", "pD", "c", "z"];

    /// Example 1, `K = 1`, `ε = 1`.
    pub const EX1_NOMINAL: [[f64; 5]; 7] = [
        [6.238e-4, 1.364e-4, 3.33e-5, 8.30e-6, 2.10e-6],
        [7.21e-5, 1.27e-5, 2.90e-6, 7.10e-7, 1.75e-7],
        [3.97e-4, 9.31e-5, 2.32e-5, 5.80e-6, 1.45e-6],
        [1.10e-2, 2.90e-3, 7.24e-4, 1.81e-4, 4.54e-5],
        [4.60e-3, 2.40e-3, 1.20e-3, 6.03e-4, 3.02e-4],
        [9.77e-4, 2.48e-4, 6.23e-5, 1.56e-5, 3.90e-6],
        [3.70e-3, 9.36e-4, 2.35e-4, 5.87e-5, 1.47e-5],
    ];
    /// Orders between `1/h = 16` and `32` in the same tables.
    pub const EX1_NOMINAL_ORDERS: [f64; 7] = [2.00, 2.01, 1.99, 1.99, 0.99, 1.99, 1.99];

    /// Example 1, `K = 10⁻³`, `ε = 10⁻⁸`.
    pub const EX1_ROBUST: [[f64; 5]; 7] = [
        [7.62e-7, 2.99e-7, 1.06e-7, 3.62e-8, 1.24e-8],
        [9.66e-4, 2.31e-4, 5.59e-5, 1.38e-5, 3.40e-6],
        [5.48e-4, 1.75e-4, 4.63e-5, 1.17e-5, 2.90e-6],
        [9.00e-3, 2.40e-3, 6.04e-4, 1.52e-4, 3.83e-5],
        [4.60e-3, 2.40e-3, 1.20e-3, 6.03e-4, 3.02e-4],
        [9.17e-4, 2.34e-4, 5.97e-5, 1.52e-5, 3.90e-6],
        [7.74e-6, 3.75e-6, 2.85e-6, 7.94e-7, 2.88e-7],
    ];

    /// Example 2, `K = 1`, `ε = 1`.
    pub const EX2_NOMINAL: [[f64; 5]; 7] = [
        [5.87e-2, 2.00e-2, 4.90e-3, 1.20e-3, 3.11e-4],
        [6.00e-3, 1.10e-3, 2.54e-4, 6.18e-5, 1.53e-5],
        [2.36e-2, 4.90e-3, 1.40e-3, 3.65e-4, 9.08e-5],
        [1.40e-1, 4.53e-2, 1.16e-2, 2.90e-3, 7.33e-4],
        [1.34e-2, 4.50e-3, 1.60e-3, 6.60e-4, 3.09e-4],
        [1.00e-3, 2.62e-4, 6.58e-5, 1.65e-5, 4.12e-6],
        [5.00e-3, 1.40e-3, 3.64e-4, 9.16e-5, 2.30e-5],
    ];

    /// Example 2, `K = 10⁻³`, `ε = 10⁻⁸`.
    pub const EX2_ROBUST: [[f64; 5]; 7] = [
        [2.79e-5, 1.05e-5, 3.73e-6, 1.28e-6, 4.45e-7],
        [3.59e-2, 7.40e-3, 1.80e-3, 4.45e-4, 1.10e-4],
        [4.90e-3, 9.23e-4, 2.37e-4, 5.97e-5, 1.49e-5],
        [1.24e-1, 4.33e-2, 1.12e-2, 2.90e-3, 7.07e-4],
        [1.08e-2, 4.00e-3, 1.50e-3, 6.45e-4, 3.07e-4],
        [2.40e-3, 8.86e-4, 3.95e-4, 7.95e-5, 1.74e-5],
        [4.13e-5, 2.99e-5, 2.16e-5, 1.13e-5, 4.28e-6],
    ];
}
