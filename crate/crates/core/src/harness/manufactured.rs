use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_dual::{DualNum, HyperDual64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generated;
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::flow::FlowParams;
use crate::mesh::{build_uniform_primal, subdivide, CellKind, PrimalMesh, Rect, StaggeredMesh};
use crate::polybasis::Point;
use crate::mesh::Subdomain;
use crate::spaces::BoundaryData;
use crate::transport::TransportParams;

/// Residual bound of the build-time self-check.
pub const SELF_CHECK_TOLERANCE: f64 = 1e-9;
const SELF_CHECK_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    Ex1,
    Ex2,
}

impl CaseId {
    pub fn name(self) -> &'static str {
        match self {
            CaseId::Ex1 => "ex1",
            CaseId::Ex2 => "ex2",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex1" => Ok(CaseId::Ex1),
            "ex2" => Ok(CaseId::Ex2),
            _ => Err(Error::Argument(format!("unknown manufactured case `{s}` (expected ex1 or ex2)"))),
        }
    }
}

/// Scalar coefficients of a manufactured case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub k_darcy: f64,
    /// Transport diffusion `K`.
    pub k_diff: f64,
}

impl Default for CaseParams {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            alpha: 1.0,
            k_darcy: 1.0,
            k_diff: 1.0,
        }
    }
}

impl CaseParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v, strict) in [
            ("epsilon", self.epsilon, true),
            ("alpha", self.alpha, false),
            ("kdarcy", self.k_darcy, true),
            ("kdiff", self.k_diff, true),
        ] {
            let ok = v.is_finite() && if strict { v > 0.0 } else { v >= 0.0 };
            if !ok {
                return Err(Error::Config(format!("{name} out of range: {v}")));
            }
        }
        Ok(())
    }
}

/// Brinkman block of the manufactured domain.
pub const BRINKMAN_RECT: Rect = Rect { x0: 0.0, x1: 0.5, y0: 0.0, y1: 1.0 };
/// Darcy block of the manufactured domain.
pub const DARCY_RECT: Rect = Rect { x0: 0.5, x1: 1.0, y0: 0.0, y1: 1.0 };

/// Exact fields of Examples 1 and 2 with the sources they induce.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedCase {
    pub id: CaseId,
    pub params: CaseParams,
    /// Largest residual found by the self-check.
    pub self_check: f64,
}

fn u_b<D: DualNum<Primitive = f64> + Copy>(id: CaseId, x: D, y: D) -> [D; 2] {
    let v = match id {
        CaseId::Ex1 => {
            let a = -x + 0.5;
            let b = -y + 1.0;
            x * x * a * a * y * y * b * b
        }
        CaseId::Ex2 => {
            let a = (x * (2.0 * PI)).sin();
            let b = (y * PI).sin();
            x * x * a * a * y * y * b * b
        }
    };
    [v, v]
}

fn p_b<D: DualNum<Primitive = f64> + Copy>(x: D, y: D) -> D {
    let a = -x + 0.5;
    x * a * a * (y - 0.5)
}

fn u_d<D: DualNum<Primitive = f64> + Copy>(id: CaseId, x: D, y: D) -> [D; 2] {
    match id {
        CaseId::Ex1 => {
            let t = x * 2.0 - 1.0;
            [
                y * (y - 1.0) * (x * x * 12.0 - x * 8.0 + 1.0) * 0.25,
                x * t * t * (y * 2.0 - 1.0) * 0.25,
            ]
        }
        CaseId::Ex2 => {
            let v = (x * (2.0 * PI)).sin() * (y * (2.0 * PI)).cos();
            [v, v]
        }
    }
}

fn p_d<D: DualNum<Primitive = f64> + Copy>(x: D, y: D) -> D {
    let a = -x + 0.5;
    x * a * a * y * (-y + 1.0)
}

fn cbar<D: DualNum<Primitive = f64> + Copy>(x: D, y: D) -> D {
    ((x * PI).cos() + (y * PI).cos()) / PI
}

struct Jet {
    v: f64,
    g: [f64; 2],
    lap: f64,
}

fn jet(f: impl Fn(HyperDual64, HyperDual64) -> HyperDual64, x: Point) -> Jet {
    let c = |v: f64| HyperDual64::new(v, 0.0, 0.0, 0.0);
    let d = |v: f64| HyperDual64::new(v, 1.0, 1.0, 0.0);
    let fx = f(d(x[0]), c(x[1]));
    let fy = f(c(x[0]), d(x[1]));
    Jet {
        v: fx.re,
        g: [fx.eps1, fy.eps1],
        lap: fx.eps1eps2 + fy.eps1eps2,
    }
}

impl ManufacturedCase {
    pub fn u_b(&self, x: Point) -> Point {
        u_b(self.id, x[0], x[1])
    }

    pub fn p_b(&self, x: Point) -> f64 {
        p_b(x[0], x[1])
    }

    pub fn u_d(&self, x: Point) -> Point {
        u_d(self.id, x[0], x[1])
    }

    pub fn p_d(&self, x: Point) -> f64 {
        p_d(x[0], x[1])
    }

    /// `L = ε∇u_B`, row-major.
    pub fn l(&self, x: Point) -> [f64; 4] {
        self.grad_u_b(x).map(|g| self.params.epsilon * g)
    }

    pub fn c(&self, x: Point, t: f64) -> f64 {
        t * cbar(x[0], x[1])
    }

    /// `z = -K∇c`.
    pub fn z(&self, x: Point, t: f64) -> Point {
        let g = generated::transport::grad_cbar(x[0], x[1]);
        [-self.params.k_diff * t * g[0], -self.params.k_diff * t * g[1]]
    }

    fn grad_u_b(&self, x: Point) -> [f64; 4] {
        match self.id {
            CaseId::Ex1 => generated::ex1::grad_u_b(x[0], x[1]),
            CaseId::Ex2 => generated::ex2::grad_u_b(x[0], x[1]),
        }
    }

    fn lap_u_b(&self, x: Point) -> Point {
        match self.id {
            CaseId::Ex1 => generated::ex1::lap_u_b(x[0], x[1]),
            CaseId::Ex2 => generated::ex2::lap_u_b(x[0], x[1]),
        }
    }

    fn grad_p_b(&self, x: Point) -> Point {
        match self.id {
            CaseId::Ex1 => generated::ex1::grad_p_b(x[0], x[1]),
            CaseId::Ex2 => generated::ex2::grad_p_b(x[0], x[1]),
        }
    }

    fn grad_p_d(&self, x: Point) -> Point {
        match self.id {
            CaseId::Ex1 => generated::ex1::grad_p_d(x[0], x[1]),
            CaseId::Ex2 => generated::ex2::grad_p_d(x[0], x[1]),
        }
    }

    /// `∇·u_B`, the Brinkman divergence source.
    pub fn g_b(&self, x: Point) -> f64 {
        match self.id {
            CaseId::Ex1 => generated::ex1::div_u_b(x[0], x[1]),
            CaseId::Ex2 => generated::ex2::div_u_b(x[0], x[1]),
        }
    }

    /// `f = ∇·u_D`.
    pub fn f(&self, x: Point) -> f64 {
        match self.id {
            CaseId::Ex1 => generated::ex1::div_u_d(x[0], x[1]),
            CaseId::Ex2 => generated::ex2::div_u_d(x[0], x[1]),
        }
    }

    /// `f_B = -εΔu_B + αu_B + ∇p_B`.
    pub fn f_b(&self, x: Point) -> Point {
        let CaseParams { epsilon, alpha, .. } = self.params;
        let (lap, u, gp) = (self.lap_u_b(x), self.u_b(x), self.grad_p_b(x));
        [0, 1].map(|i| -epsilon * lap[i] + alpha * u[i] + gp[i])
    }

    /// `K_D⁻¹u_D + ∇p_D`, the Darcy momentum source in solver form.
    pub fn f_d(&self, x: Point) -> Point {
        let (u, gp) = (self.u_d(x), self.grad_p_d(x));
        [0, 1].map(|i| u[i] / self.params.k_darcy + gp[i])
    }

    pub fn in_brinkman(x: Point) -> bool {
        x[0] < 0.5
    }

    /// Exact velocity on either block; `x` on `Γ` is taken from the Brinkman side.
    pub fn velocity(&self, x: Point) -> Point {
        if Self::in_brinkman(x) || x[0] == 0.5 {
            self.u_b(x)
        } else {
            self.u_d(x)
        }
    }

    /// Transport source for `φ = 1` and `ĉ = c`.
    pub fn s(&self, x: Point, t: f64, brinkman: bool) -> f64 {
        let cb = cbar(x[0], x[1]);
        let g = generated::transport::grad_cbar(x[0], x[1]);
        let lap = generated::transport::lap_cbar(x[0], x[1]);
        let u = if brinkman { self.u_b(x) } else { self.u_d(x) };
        let mut s = cb + t * (u[0] * g[0] + u[1] * g[1]) - self.params.k_diff * t * lap;
        if brinkman {
            s += t * cb * self.g_b(x);
        }
        s
    }

    pub fn flow_params(&self) -> FlowParams {
        let mut p = FlowParams::new(
            self.params.epsilon,
            Coefficient::scalar(self.params.alpha),
            Coefficient::scalar(self.params.k_darcy),
        );
        let me = *self;
        p.f_b = Arc::new(move |x| me.f_b(x));
        p.f_d = Arc::new(move |x| me.f_d(x));
        p.f = Arc::new(move |x| me.f(x));
        p.g_b = Arc::new(move |x| me.g_b(x));
        p
    }

    /// Transport data with `φ = 1` and `ĉ = c`; the initial value is `c(·, 0) = 0`.
    pub fn transport_params(&self, dt: f64, t_final: f64) -> TransportParams {
        let me = *self;
        let mut p = TransportParams::new(Coefficient::scalar(self.params.k_diff), dt, t_final);
        p.source = Arc::new(move |x, t, sub| me.s(x, t, sub == Subdomain::Brinkman));
        p.c_hat = Arc::new(move |x, t| me.c(x, t));
        p.c0 = Arc::new(move |x| me.c(x, 0.0));
        p.f = Arc::new(move |x| me.f(x));
        p.steady_data = false;
        p
    }

    /// Normal fluxes of the exact velocities on every boundary edge and the
    /// exact concentration as inflow data.
    pub fn boundary_data(&self) -> BoundaryData {
        let me = *self;
        let mut b = BoundaryData::homogeneous();
        b.g1 = Arc::new(move |x, n| {
            let u = me.u_b(x);
            u[0] * n[0] + u[1] * n[1]
        });
        b.g2 = Arc::new(move |x, n| {
            let u = me.u_d(x);
            u[0] * n[0] + u[1] * n[1]
        });
        b.c_in = Arc::new(move |x, t| me.c(x, t));
        b
    }

    pub fn primal_mesh(&self, h: f64, kind: CellKind) -> Result<PrimalMesh> {
        build_uniform_primal(BRINKMAN_RECT, DARCY_RECT, h, kind)
    }

    pub fn mesh(&self, h: f64, kind: CellKind) -> Result<StaggeredMesh> {
        Ok(subdivide(&self.primal_mesh(h, kind)?))
    }

    /// Compares the closed-form derivatives against hyper-dual evaluation
    /// of the fields at random points, and checks the interface conditions.
    fn run_self_check(&self) -> f64 {
        let id = self.id;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut worst: f64 = 0.0;
        let mut cmp = |a: f64, b: f64| {
            worst = worst.max((a - b).abs() / (1.0 + b.abs()));
        };
        for _ in 0..SELF_CHECK_POINTS {
            let x = [rng.random::<f64>(), rng.random::<f64>()];
            let ub = [jet(|x, y| u_b(id, x, y)[0], x), jet(|x, y| u_b(id, x, y)[1], x)];
            let ud = [jet(|x, y| u_d(id, x, y)[0], x), jet(|x, y| u_d(id, x, y)[1], x)];
            let pb = jet(p_b, x);
            let pd = jet(p_d, x);
            let cj = jet(cbar, x);

            let fb = self.f_b(x);
            for i in 0..2 {
                let want = -self.params.epsilon * ub[i].lap + self.params.alpha * ub[i].v + pb.g[i];
                cmp(fb[i], want);
            }
            let l = self.l(x);
            for i in 0..2 {
                for j in 0..2 {
                    cmp(l[2 * i + j], self.params.epsilon * ub[i].g[j]);
                }
            }
            cmp(self.g_b(x), ub[0].g[0] + ub[1].g[1]);
            let fd = self.f_d(x);
            for i in 0..2 {
                cmp(fd[i] * self.params.k_darcy, ud[i].v + self.params.k_darcy * pd.g[i]);
            }
            cmp(self.f(x), ud[0].g[0] + ud[1].g[1]);

            let t = rng.random::<f64>();
            for brinkman in [true, false] {
                let (u, div) = if brinkman {
                    (self.u_b(x), ub[0].g[0] + ub[1].g[1])
                } else {
                    (self.u_d(x), ud[0].g[0] + ud[1].g[1])
                };
                // φc_t + ∇·(cu - K∇c) - ĉf⁺ + cf⁻ with ĉ = c, f = 0 in Ω_B
                let f = if brinkman { 0.0 } else { ud[0].g[0] + ud[1].g[1] };
                let c = t * cj.v;
                let want = cj.v + t * (cj.g[0] * u[0] + cj.g[1] * u[1]) + c * div
                    - self.params.k_diff * t * cj.lap
                    - c * f;
                cmp(self.s(x, t, brinkman), want);
            }
            let z = self.z(x, t);
            cmp(z[0], -self.params.k_diff * t * cj.g[0]);
            cmp(z[1], -self.params.k_diff * t * cj.g[1]);

            // interface x = 1/2 with n_B = (1, 0)
            let g = [0.5, x[1]];
            cmp(self.u_b(g)[0], self.u_d(g)[0]);
            cmp(self.p_b(g), self.p_d(g));
        }
        worst
    }
}

/// Builds a manufactured case and runs its self-check.
pub fn build_case(id: CaseId, params: CaseParams) -> Result<ManufacturedCase> {
    params.validate()?;
    let mut case = ManufacturedCase { id, params, self_check: 0.0 };
    case.self_check = case.run_self_check();
    if !(case.self_check <= SELF_CHECK_TOLERANCE) {
        return Err(Error::Config(format!(
            "{id}: manufactured sources fail the self-check (residual {:.3e})",
            case.self_check
        )));
    }
    Ok(case)
}
