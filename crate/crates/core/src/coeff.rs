//! Scalar and tensor coefficients that may vary in space or per cell.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polybasis::Point;

/// Row-major 2×2 matrix.
pub type Tensor2 = [[f64; 2]; 2];

pub fn scalar_tensor(a: f64) -> Tensor2 {
    [[a, 0.0], [0.0, a]]
}

pub fn tensor_inverse(t: Tensor2) -> Tensor2 {
    let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
    [[t[1][1] / det, -t[0][1] / det], [-t[1][0] / det, t[0][0] / det]]
}

pub fn tensor_apply(t: Tensor2, v: Point) -> Point {
    [t[0][0] * v[0] + t[0][1] * v[1], t[1][0] * v[0] + t[1][1] * v[1]]
}

/// Eigenvalues of the symmetric part, ascending.
pub fn sym_eigenvalues(t: Tensor2) -> [f64; 2] {
    let a = t[0][0];
    let d = t[1][1];
    let b = 0.5 * (t[0][1] + t[1][0]);
    let m = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [m - r, m + r]
}

pub type TensorField = Arc<dyn Fn(Point) -> Tensor2 + Send + Sync>;

/// A symmetric 2×2 coefficient.
#[derive(Clone)]
pub enum Coefficient {
    Const(Tensor2),
    Field(TensorField),
    /// One value per primal cell.
    PerCell(Arc<Vec<Tensor2>>),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const(t) => write!(f, "Const({t:?})"),
            Coefficient::Field(_) => write!(f, "Field(..)"),
            Coefficient::PerCell(v) => write!(f, "PerCell({} cells)", v.len()),
        }
    }
}

impl Coefficient {
    pub fn scalar(a: f64) -> Self {
        Coefficient::Const(scalar_tensor(a))
    }

    pub fn eval(&self, cell: usize, x: Point) -> Tensor2 {
        match self {
            Coefficient::Const(t) => *t,
            Coefficient::Field(f) => f(x),
            Coefficient::PerCell(v) => v[cell],
        }
    }

    pub fn eval_inverse(&self, cell: usize, x: Point) -> Tensor2 {
        tensor_inverse(self.eval(cell, x))
    }

    /// Checks eigenvalue bounds where they can be checked without sampling.
    pub fn check_eigenvalues(&self, name: &str, positive: bool) -> Result<()> {
        let check = |t: Tensor2| -> Result<()> {
            let e = sym_eigenvalues(t);
            let ok = if positive { e[0] > 0.0 } else { e[0] >= 0.0 };
            if !ok || !e[1].is_finite() || (t[0][1] - t[1][0]).abs() > 1e-12 * e[1].abs().max(1.0) {
                let want = if positive { "positive definite" } else { "positive semidefinite" };
                return Err(Error::Config(format!("{name} must be symmetric {want}, got {t:?}")));
            }
            Ok(())
        };
        match self {
            Coefficient::Const(t) => check(*t),
            Coefficient::PerCell(v) => v.iter().try_for_each(|t| check(*t)),
            Coefficient::Field(_) => Ok(()),
        }
    }
}
