//! Polynomial bases and quadrature on triangles and edges.
//!
//! Scalar polynomials of degree `k` on a triangle are represented in a
//! hierarchical basis that is orthonormal on the reference triangle with
//! respect to the normalized measure `2 dξ`. The first `dim P^m` members span
//! `P^m` for every `m <= k`, and the first member is the constant `1`.

mod bubble;
pub mod quadrature;

pub use bubble::BubbleSpace;
pub use quadrature::{edge_rule, gauss_legendre, legendre_values, triangle_rule, QuadratureRule};

pub type Point = [f64; 2];

/// Dimension of `P^k` in two variables.
pub const fn dim_pk(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Affine image of the reference triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex {
    pub verts: [Point; 3],
    jac: [[f64; 2]; 2],
    jinv: [[f64; 2]; 2],
    det: f64,
}

impl Simplex {
    pub fn new(verts: [Point; 3]) -> Self {
        let [a, b, c] = verts;
        let jac = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let jinv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        Self {
            verts,
            jac,
            jinv,
            det,
        }
    }

    /// Signed area; positive for counter-clockwise vertex order.
    pub fn signed_area(&self) -> f64 {
        0.5 * self.det
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }

    pub fn centroid(&self) -> Point {
        let [a, b, c] = self.verts;
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn diameter(&self) -> f64 {
        let [a, b, c] = self.verts;
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        let a = self.verts[0];
        [
            a[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            a[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let a = self.verts[0];
        let d = [x[0] - a[0], x[1] - a[1]];
        [
            self.jinv[0][0] * d[0] + self.jinv[0][1] * d[1],
            self.jinv[1][0] * d[0] + self.jinv[1][1] * d[1],
        ]
    }

    /// Barycentric coordinates `(λ0, λ1, λ2)` of `x`.
    pub fn barycentric(&self, x: Point) -> [f64; 3] {
        let xi = self.to_reference(x);
        [1.0 - xi[0] - xi[1], xi[0], xi[1]]
    }

    /// Physical gradients of the barycentric coordinates.
    pub fn barycentric_gradients(&self) -> [Point; 3] {
        let g1 = [self.jinv[0][0], self.jinv[0][1]];
        let g2 = [self.jinv[1][0], self.jinv[1][1]];
        [[-g1[0] - g2[0], -g1[1] - g2[1]], g1, g2]
    }

    /// Maps a reference gradient to a physical one (`J^{-T} g`).
    pub fn push_gradient(&self, g: Point) -> Point {
        [
            self.jinv[0][0] * g[0] + self.jinv[1][0] * g[1],
            self.jinv[0][1] * g[0] + self.jinv[1][1] * g[1],
        ]
    }

    /// Quadrature points and weights mapped to this triangle.
    pub fn quadrature<'a>(&'a self, rule: &'a QuadratureRule) -> impl Iterator<Item = (Point, f64)> + 'a {
        let scale = self.det.abs();
        rule.iter().map(move |(xi, w)| (self.to_physical(xi), w * scale))
    }

    /// Smallest interior angle in degrees.
    pub fn min_angle_degrees(&self) -> f64 {
        let v = self.verts;
        (0..3)
            .map(|i| {
                let p = v[i];
                let q = v[(i + 1) % 3];
                let r = v[(i + 2) % 3];
                let u = [q[0] - p[0], q[1] - p[1]];
                let w = [r[0] - p[0], r[1] - p[1]];
                let c = (u[0] * w[0] + u[1] * w[1]) / (norm(u) * norm(w));
                c.clamp(-1.0, 1.0).acos().to_degrees()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn dist(a: Point, b: Point) -> f64 {
    norm([a[0] - b[0], a[1] - b[1]])
}

pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Hierarchical orthonormal basis of `P^k` on the reference triangle.
#[derive(Debug, Clone)]
pub struct ScalarBasis {
    degree: usize,
    exps: Vec<(i32, i32)>,
    // row i holds the monomial coefficients of basis function i
    coeffs: Vec<Vec<f64>>,
}

impl ScalarBasis {
    pub fn new(degree: usize) -> Self {
        let exps: Vec<(i32, i32)> = (0..=degree as i32)
            .flat_map(|d| (0..=d).rev().map(move |a| (a, d - a)))
            .collect();
        let n = exps.len();
        let rule = triangle_rule((2 * degree).max(1)).expect("degree within quadrature range");
        let mono: Vec<Vec<f64>> = rule
            .points
            .iter()
            .map(|p| exps.iter().map(|&(a, b)| p[0].powi(a) * p[1].powi(b)).collect())
            .collect();
        // inner product with normalized measure: 2 Σ w f g
        let inner = |u: &[f64], v: &[f64]| -> f64 {
            let mut s = 0.0;
            for (q, w) in rule.weights.iter().enumerate() {
                let fu: f64 = u.iter().zip(&mono[q]).map(|(c, m)| c * m).sum();
                let fv: f64 = v.iter().zip(&mono[q]).map(|(c, m)| c * m).sum();
                s += 2.0 * w * fu * fv;
            }
            s
        };
        let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            for _pass in 0..2 {
                for prev in &coeffs {
                    let c = inner(&v, prev);
                    for (vj, pj) in v.iter_mut().zip(prev) {
                        *vj -= c * pj;
                    }
                }
            }
            let nrm = inner(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= nrm);
            coeffs.push(v);
        }
        Self {
            degree,
            exps,
            coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    fn monomials(&self, xi: Point) -> Vec<f64> {
        self.exps
            .iter()
            .map(|&(a, b)| xi[0].powi(a) * xi[1].powi(b))
            .collect()
    }

    /// Basis values at a reference point.
    pub fn eval_reference(&self, xi: Point) -> Vec<f64> {
        let m = self.monomials(xi);
        self.coeffs
            .iter()
            .map(|c| c.iter().zip(&m).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Basis gradients with respect to reference coordinates.
    pub fn grad_reference(&self, xi: Point) -> Vec<Point> {
        let dm: Vec<Point> = self
            .exps
            .iter()
            .map(|&(a, b)| {
                let dx = if a > 0 {
                    a as f64 * xi[0].powi(a - 1) * xi[1].powi(b)
                } else {
                    0.0
                };
                let dy = if b > 0 {
                    b as f64 * xi[0].powi(a) * xi[1].powi(b - 1)
                } else {
                    0.0
                };
                [dx, dy]
            })
            .collect();
        self.coeffs
            .iter()
            .map(|c| {
                let mut g = [0.0, 0.0];
                for (ci, d) in c.iter().zip(&dm) {
                    g[0] += ci * d[0];
                    g[1] += ci * d[1];
                }
                g
            })
            .collect()
    }

    /// Basis values at a physical point of `tri`.
    pub fn eval(&self, tri: &Simplex, x: Point) -> Vec<f64> {
        self.eval_reference(tri.to_reference(x))
    }

    /// Physical basis gradients at a physical point of `tri`.
    pub fn grad(&self, tri: &Simplex, x: Point) -> Vec<Point> {
        self.grad_reference(tri.to_reference(x))
            .into_iter()
            .map(|g| tri.push_gradient(g))
            .collect()
    }
}
