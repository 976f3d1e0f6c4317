//! Quadrature on the reference triangle and the reference interval.
//!
//! The reference triangle has vertices `(0,0)`, `(1,0)`, `(0,1)` and area 1/2.
//! The reference interval is `[-1, 1]`.

use crate::error::{Error, Result};

/// Highest polynomial exactness served by [`triangle_rule`] and [`edge_rule`].
pub const MAX_EXACTNESS: usize = 30;

/// Points and weights on the reference triangle or reference interval.
///
/// For triangle rules each point has two coordinates; for interval rules the
/// second coordinate is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Every polynomial of total degree `<= degree` is integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` with `n` points.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = if (1.0 - x * x).abs() < 1e-300 {
        // endpoint value n(n+1)/2 * x^(n+1)
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * (n * (n + 1)) as f64 / 2.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, d)
}

/// Values `P_0(s), ..., P_n(s)` of the Legendre polynomials.
pub fn legendre_values(n: usize, s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(s);
    }
    for j in 2..=n {
        let v = ((2 * j - 1) as f64 * s * out[j - 1] - (j - 1) as f64 * out[j - 2]) / j as f64;
        out.push(v);
    }
    out
}

/// Triangle rule exact for total degree at least `exactness`.
///
/// `exactness == 1` gives the one-point centroid rule. Higher exactness uses
/// the collapsed (Duffy) product of Gauss–Legendre rules, which has positive
/// weights and interior points only.
pub fn triangle_rule(exactness: usize) -> Result<QuadratureRule> {
    if exactness == 0 || exactness > MAX_EXACTNESS {
        return Err(Error::Argument(format!(
            "triangle quadrature exactness {exactness} outside 1..={MAX_EXACTNESS}"
        )));
    }
    if exactness == 1 {
        return Ok(QuadratureRule {
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![0.5],
            degree: 1,
        });
    }
    // x = u, y = (1-u) v with Jacobian (1-u): monomials of degree d become
    // degree d+1 in u, so n points give exactness 2n-2.
    let n = (exactness + 2).div_ceil(2);
    let (gx, gw) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = 0.5 * (gx[i] + 1.0);
        for j in 0..n {
            let v = 0.5 * (gx[j] + 1.0);
            points.push([u, (1.0 - u) * v]);
            weights.push(0.25 * gw[i] * gw[j] * (1.0 - u));
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        degree: 2 * n - 2,
    })
}

/// Gauss–Legendre rule on `[-1, 1]` exact for degree at least `exactness`.
pub fn edge_rule(exactness: usize) -> Result<QuadratureRule> {
    if exactness == 0 || exactness > MAX_EXACTNESS {
        return Err(Error::Argument(format!(
            "edge quadrature exactness {exactness} outside 1..={MAX_EXACTNESS}"
        )));
    }
    let n = (exactness + 1).div_ceil(2);
    let (gx, gw) = gauss_legendre(n);
    Ok(QuadratureRule {
        points: gx.into_iter().map(|s| [s, 0.0]).collect(),
        weights: gw,
        degree: 2 * n - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // ∫_T x^a y^b = a! b! / (a+b+2)! on the reference triangle
    fn monomial_integral(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn centroid_rule() {
        let r = triangle_rule(1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.points[0], [1.0 / 3.0, 1.0 / 3.0]);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn area_of_reference_triangle() {
        for d in 1..=12 {
            let r = triangle_rule(d).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - 0.5).abs() < 1e-14);
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn x2y3_matches_beta_function() {
        let r = triangle_rule(5).unwrap();
        let q: f64 = r.iter().map(|(p, w)| w * p[0].powi(2) * p[1].powi(3)).sum();
        // 2! 3! / 7! = 12/5040
        assert!((q - 12.0 / 5040.0).abs() < 1e-16);
    }

    #[test]
    fn exactness_sweep_triangle() {
        for d in 1..=14 {
            let r = triangle_rule(d).unwrap();
            assert!(r.degree >= d);
            for deg in 0..=r.degree as u32 {
                for a in 0..=deg {
                    let b = deg - a;
                    let q: f64 = r
                        .iter()
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = monomial_integral(a, b);
                    assert!(((q - exact) / exact).abs() < 1e-13, "d={d} a={a} b={b}");
                }
            }
            // the next degree must fail for at least one monomial
            let deg = r.degree as u32 + 1;
            let worst = (0..=deg)
                .map(|a| {
                    let b = deg - a;
                    let q: f64 = r
                        .iter()
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    ((q - monomial_integral(a, b)) / monomial_integral(a, b)).abs()
                })
                .fold(0.0, f64::max);
            assert!(worst > 1e-13, "rule {d} is exact beyond its declared degree");
        }
    }

    #[test]
    fn exactness_sweep_edge() {
        for d in 1..=15 {
            let r = edge_rule(d).unwrap();
            for p in 0..=r.degree as i32 {
                let q: f64 = r.iter().map(|(s, w)| w * s[0].powi(p)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p + 1) as f64 };
                assert!((q - exact).abs() < 1e-13 * exact.abs().max(1.0));
            }
            let p = r.degree as i32 + 1;
            let q: f64 = r.iter().map(|(s, w)| w * s[0].powi(p)).sum();
            assert!((q - 2.0 / (p + 1) as f64).abs() > 1e-13);
        }
    }

    #[test]
    fn two_point_rule_integrates_cubics() {
        let r = edge_rule(3).unwrap();
        assert_eq!(r.len(), 2);
        let f = |s: f64| 4.0 * s.powi(3) - 2.0 * s * s + s + 7.0;
        let q: f64 = r.iter().map(|(s, w)| w * f(s[0])).sum();
        assert!((q - (14.0 - 4.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn unsupported_exactness() {
        assert!(triangle_rule(0).is_err());
        assert!(edge_rule(MAX_EXACTNESS + 1).is_err());
    }
}
