use super::{dim_pk, Point, ScalarBasis, Simplex};

/// Cubic-bubble-weighted polynomials `λ0 λ1 λ2 · P^{k-2}` on a triangle.
///
/// These vanish on the triangle boundary; their curls close the interior
/// degrees of freedom of the BDM element of degree `k`.
#[derive(Debug, Clone)]
pub struct BubbleSpace {
    degree: usize,
    inner: Option<ScalarBasis>,
}

impl BubbleSpace {
    /// Bubbles of total degree `k + 1`.
    pub fn new(k: usize) -> Self {
        Self {
            degree: k + 1,
            inner: (k >= 2).then(|| ScalarBasis::new(k - 2)),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        if self.degree >= 3 {
            dim_pk(self.degree - 3)
        } else {
            0
        }
    }

    pub fn eval(&self, tri: &Simplex, x: Point) -> Vec<f64> {
        let Some(inner) = &self.inner else {
            return Vec::new();
        };
        let l = tri.barycentric(x);
        let cubic = l[0] * l[1] * l[2];
        inner.eval(tri, x).into_iter().map(|p| cubic * p).collect()
    }

    fn grad(&self, tri: &Simplex, x: Point) -> Vec<Point> {
        let Some(inner) = &self.inner else {
            return Vec::new();
        };
        let l = tri.barycentric(x);
        let gl = tri.barycentric_gradients();
        let cubic = l[0] * l[1] * l[2];
        let gc = [
            gl[0][0] * l[1] * l[2] + l[0] * gl[1][0] * l[2] + l[0] * l[1] * gl[2][0],
            gl[0][1] * l[1] * l[2] + l[0] * gl[1][1] * l[2] + l[0] * l[1] * gl[2][1],
        ];
        let p = inner.eval(tri, x);
        let gp = inner.grad(tri, x);
        p.iter()
            .zip(gp)
            .map(|(&pv, g)| [gc[0] * pv + cubic * g[0], gc[1] * pv + cubic * g[1]])
            .collect()
    }

    /// `curl b = (∂b/∂y, -∂b/∂x)` for every member.
    pub fn curl(&self, tri: &Simplex, x: Point) -> Vec<Point> {
        self.grad(tri, x).into_iter().map(|g| [g[1], -g[0]]).collect()
    }
}
