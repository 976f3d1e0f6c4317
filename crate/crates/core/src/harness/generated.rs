// Generated by scripts/manufactured.py. Do not edit.
#![allow(clippy::all, unused_parens, unused_imports)]
use std::f64::consts::PI;

pub mod ex1 {
    use super::PI;
    pub fn grad_u_b(x: f64, y: f64) -> [f64; 4] {
        [x*(y).powi(2)*(2.0*x - 1.0)*(4.0*x - 1.0)*(y - 1.0).powi(2)/2.0, (x).powi(2)*y*(2.0*x - 1.0).powi(2)*(y - 1.0)*(2.0*y - 1.0)/2.0, x*(y).powi(2)*(2.0*x - 1.0)*(4.0*x - 1.0)*(y - 1.0).powi(2)/2.0, (x).powi(2)*y*(2.0*x - 1.0).powi(2)*(y - 1.0)*(2.0*y - 1.0)/2.0]
    }

    pub fn lap_u_b(x: f64, y: f64) -> [f64; 2] {
        [(x).powi(2)*(2.0*x - 1.0).powi(2)*((y).powi(2) + 4.0*y*(y - 1.0) + (y - 1.0).powi(2))/2.0 + (y).powi(2)*(y - 1.0).powi(2)*(4.0*(x).powi(2) + 8.0*x*(2.0*x - 1.0) + (2.0*x - 1.0).powi(2))/2.0, (x).powi(2)*(2.0*x - 1.0).powi(2)*((y).powi(2) + 4.0*y*(y - 1.0) + (y - 1.0).powi(2))/2.0 + (y).powi(2)*(y - 1.0).powi(2)*(4.0*(x).powi(2) + 8.0*x*(2.0*x - 1.0) + (2.0*x - 1.0).powi(2))/2.0]
    }

    pub fn div_u_b(x: f64, y: f64) -> f64 {
        x*y*(2.0*x - 1.0)*(y - 1.0)*(x*y*(2.0*x - 1.0) + 2.0*x*y*(y - 1.0) + x*(2.0*x - 1.0)*(y - 1.0) + y*(2.0*x - 1.0)*(y - 1.0))/2.0
    }

    pub fn grad_p_b(x: f64, y: f64) -> [f64; 2] {
        [(2.0*x - 1.0)*(6.0*x - 1.0)*(2.0*y - 1.0)/8.0, x*(2.0*x - 1.0).powi(2)/4.0]
    }

    pub fn div_u_d(x: f64, y: f64) -> f64 {
        x*(2.0*x - 1.0).powi(2)/2.0 + 2.0*y*(3.0*x - 1.0)*(y - 1.0)
    }

    pub fn grad_p_d(x: f64, y: f64) -> [f64; 2] {
        [y*(1.0 - 6.0*x)*(2.0*x - 1.0)*(y - 1.0)/4.0, x*(1.0 - 2.0*y)*(2.0*x - 1.0).powi(2)/4.0]
    }
}

pub mod ex2 {
    use super::PI;
    pub fn grad_u_b(x: f64, y: f64) -> [f64; 4] {
        [2.0*x*(y).powi(2)*(2.0*PI*x*(2.0*PI*x).cos() + (2.0*PI*x).sin())*(2.0*PI*x).sin()*((PI*y).sin()).powi(2), 2.0*(x).powi(2)*y*(PI*y*(PI*y).cos() + (PI*y).sin())*((2.0*PI*x).sin()).powi(2)*(PI*y).sin(), 2.0*x*(y).powi(2)*(2.0*PI*x*(2.0*PI*x).cos() + (2.0*PI*x).sin())*(2.0*PI*x).sin()*((PI*y).sin()).powi(2), 2.0*(x).powi(2)*y*(PI*y*(PI*y).cos() + (PI*y).sin())*((2.0*PI*x).sin()).powi(2)*(PI*y).sin()]
    }

    pub fn lap_u_b(x: f64, y: f64) -> [f64; 2] {
        [2.0*(x).powi(2)*((PI).powi(2)*(y).powi(2)*(2.0*PI*y).cos() + 2.0*PI*y*(2.0*PI*y).sin() + ((PI*y).sin()).powi(2))*((2.0*PI*x).sin()).powi(2) + 2.0*(y).powi(2)*(4.0*(PI).powi(2)*(x).powi(2)*(-((2.0*PI*x).sin()).powi(2) + ((2.0*PI*x).cos()).powi(2)) + 4.0*PI*x*(4.0*PI*x).sin() + ((2.0*PI*x).sin()).powi(2))*((PI*y).sin()).powi(2), 2.0*(x).powi(2)*((PI).powi(2)*(y).powi(2)*(2.0*PI*y).cos() + 2.0*PI*y*(2.0*PI*y).sin() + ((PI*y).sin()).powi(2))*((2.0*PI*x).sin()).powi(2) + 2.0*(y).powi(2)*(4.0*(PI).powi(2)*(x).powi(2)*(-((2.0*PI*x).sin()).powi(2) + ((2.0*PI*x).cos()).powi(2)) + 4.0*PI*x*(4.0*PI*x).sin() + ((2.0*PI*x).sin()).powi(2))*((PI*y).sin()).powi(2)]
    }

    pub fn div_u_b(x: f64, y: f64) -> f64 {
        x*y*(-PI*x*y*(PI*(2.0*x - y)).sin() + 3.0*PI*x*y*(PI*(2.0*x + y)).sin() + x*(PI*(2.0*x - y)).cos() - x*(PI*(2.0*x + y)).cos() + y*(PI*(2.0*x - y)).cos() - y*(PI*(2.0*x + y)).cos())*(2.0*PI*x).sin()*(PI*y).sin()
    }

    pub fn grad_p_b(x: f64, y: f64) -> [f64; 2] {
        [(2.0*x - 1.0)*(6.0*x - 1.0)*(2.0*y - 1.0)/8.0, x*(2.0*x - 1.0).powi(2)/4.0]
    }

    pub fn div_u_d(x: f64, y: f64) -> f64 {
        2.0*PI*(PI*(2.0*x + 2.0*y)).cos()
    }

    pub fn grad_p_d(x: f64, y: f64) -> [f64; 2] {
        [y*(1.0 - 6.0*x)*(2.0*x - 1.0)*(y - 1.0)/4.0, x*(1.0 - 2.0*y)*(2.0*x - 1.0).powi(2)/4.0]
    }
}

pub mod transport {
    use super::PI;
    pub fn grad_cbar(x: f64, y: f64) -> [f64; 2] {
        [-(PI*x).sin(), -(PI*y).sin()]
    }

    pub fn lap_cbar(x: f64, y: f64) -> f64 {
        -PI*((PI*x).cos() + (PI*y).cos())
    }
}
