//! Maxwellian and local-Maxwellian states and their hydrodynamic moments.

use crate::error::{Result, VmlkError};
use crate::grid::{integrate_v, VelocityGrid};
use std::f64::consts::PI;

/// Density below which moment extraction is considered degenerate.
pub const DENSITY_FLOOR: f64 = 1e-12;

/// Hydrodynamic parameters (density, bulk velocity, scalar temperature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellianParams {
    pub rho: f64,
    pub u: [f64; 3],
    pub temperature: f64,
}

impl MaxwellianParams {
    pub fn new(rho: f64, u: [f64; 3], temperature: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(VmlkError::InvalidParameter(format!(
                "rho must be positive, got {rho}"
            )));
        }
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(VmlkError::InvalidParameter(format!(
                "T must be positive, got {temperature}"
            )));
        }
        if !u.iter().all(|x| x.is_finite()) {
            return Err(VmlkError::InvalidParameter("u must be finite".into()));
        }
        Ok(Self { rho, u, temperature })
    }

    /// rho (2 pi T)^{-3/2} exp(-|v-u|^2 / 2T), strictly positive.
    pub fn density_at(&self, v: [f64; 3]) -> f64 {
        let t = self.temperature;
        let d2 = (v[0] - self.u[0]).powi(2)
            + (v[1] - self.u[1]).powi(2)
            + (v[2] - self.u[2]).powi(2);
        self.rho * (2.0 * PI * t).powf(-1.5) * (-d2 / (2.0 * t)).exp()
    }

    pub fn sample(&self, grid: &VelocityGrid) -> Vec<f64> {
        grid.sample(|v| self.density_at(v))
    }

    /// Exact closed-form conversion to log-quadratic coefficients.
    pub fn to_log_quadratic(&self) -> LogQuadParams {
        let t = self.temperature;
        let c = -1.0 / (2.0 * t);
        let b = [self.u[0] / t, self.u[1] / t, self.u[2] / t];
        let u2 = self.u[0] * self.u[0] + self.u[1] * self.u[1] + self.u[2] * self.u[2];
        let a = self.rho.ln() - 1.5 * (2.0 * PI * t).ln() - u2 / (2.0 * t);
        LogQuadParams { a, b, c }
    }
}

/// Coefficients of log f = a + b . v + c |v|^2; integrability needs c < 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogQuadParams {
    pub a: f64,
    pub b: [f64; 3],
    pub c: f64,
}

impl LogQuadParams {
    pub fn new(a: f64, b: [f64; 3], c: f64) -> Result<Self> {
        if !(c < 0.0) {
            return Err(VmlkError::InvalidParameter(format!(
                "c must be negative for integrability, got {c}"
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn density_at(&self, v: [f64; 3]) -> f64 {
        let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        (self.a + self.b[0] * v[0] + self.b[1] * v[1] + self.b[2] * v[2] + self.c * v2).exp()
    }

    /// Inverse of `MaxwellianParams::to_log_quadratic`; exact closed form.
    pub fn to_maxwellian(&self) -> Result<MaxwellianParams> {
        if !(self.c < 0.0) {
            return Err(VmlkError::InvalidParameter(
                "c must be negative to convert to Maxwellian form".into(),
            ));
        }
        let t = -1.0 / (2.0 * self.c);
        let u = [
            -self.b[0] / (2.0 * self.c),
            -self.b[1] / (2.0 * self.c),
            -self.b[2] / (2.0 * self.c),
        ];
        let u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        let rho = (self.a + u2 / (2.0 * t)).exp() * (2.0 * PI * t).powf(1.5);
        MaxwellianParams::new(rho, u, t)
    }
}

/// The equilibrium Maxwellian rho_ion (2 pi T)^{-3/2} exp(-|v|^2/2T).
pub fn equilibrium_maxwellian(rho_ion: f64, t: f64, v: [f64; 3]) -> Result<f64> {
    let p = MaxwellianParams::new(rho_ion, [0.0; 3], t)?;
    Ok(p.density_at(v))
}

/// exp(a + b.v + c|v|^2) for validated log-quadratic coefficients.
pub fn local_maxwellian(p: &LogQuadParams, v: [f64; 3]) -> f64 {
    p.density_at(v)
}

/// Density, bulk velocity and temperature of a velocity distribution:
/// rho = int f, u = int v f / rho, T = int |v-u|^2 f / (3 rho).
pub fn moments(f: &[f64], grid: &VelocityGrid) -> Result<MaxwellianParams> {
    if f.len() != grid.node_count() {
        return Err(VmlkError::GridMismatch(
            "distribution length does not match grid".into(),
        ));
    }
    let rho = integrate_v(grid, f);
    if !(rho.abs() > DENSITY_FLOOR) {
        return Err(VmlkError::DegenerateDensity {
            rho,
            floor: DENSITY_FLOOR,
        });
    }
    let coords = grid.coords();
    let mut u = [0.0; 3];
    for ax in 0..3 {
        let mut acc = 0.0;
        for (x, fv) in coords[ax].iter().zip(f) {
            acc += x * fv;
        }
        u[ax] = grid.weight() * acc / rho;
    }
    let mut acc = 0.0;
    for i in 0..f.len() {
        let d2 = (coords[0][i] - u[0]).powi(2)
            + (coords[1][i] - u[1]).powi(2)
            + (coords[2][i] - u[2]).powi(2);
        acc += d2 * f[i];
    }
    let temperature = grid.weight() * acc / (3.0 * rho);
    if !(temperature > 0.0) {
        return Err(VmlkError::InvalidParameter(format!(
            "nonpositive temperature {temperature} extracted"
        )));
    }
    Ok(MaxwellianParams {
        rho,
        u,
        temperature,
    })
}
