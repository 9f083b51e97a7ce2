//! Torus vector calculus at the PDE level: spectral divergence and curl, the
//! Gauss-law solve for E, and the harmonic-field constancy check.

use crate::error::{Result, VmlkError};
use crate::grid::{torus_partial, ScalarField, TorusGrid, VecField};
use std::f64::consts::PI;

/// Default solvability tolerance for the Gauss solve: the torus admits no
/// net-charge solutions, so mean(rho) must match rho_ion this closely.
pub const NEUTRALITY_TOL: f64 = 1e-8;

/// Spectral divergence of a vector field.
pub fn divergence(v: &VecField) -> ScalarField {
    let g = v.grid();
    let d0 = torus_partial(&v.scalar_component(0), 0);
    let d1 = torus_partial(&v.scalar_component(1), 1);
    let d2 = torus_partial(&v.scalar_component(2), 2);
    let values = (0..g.node_count())
        .map(|i| d0.values()[i] + d1.values()[i] + d2.values()[i])
        .collect();
    ScalarField::from_values(g, values).expect("divergence is finite")
}

/// Spectral curl of a vector field.
pub fn curl(v: &VecField) -> VecField {
    let g = v.grid();
    let d = |comp: usize, axis: usize| torus_partial(&v.scalar_component(comp), axis);
    let d2_1 = d(2, 1);
    let d1_2 = d(1, 2);
    let d0_2 = d(0, 2);
    let d2_0 = d(2, 0);
    let d1_0 = d(1, 0);
    let d0_1 = d(0, 1);
    let n = g.node_count();
    let mut comps = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for i in 0..n {
        comps[0].push(d2_1.values()[i] - d1_2.values()[i]);
        comps[1].push(d0_2.values()[i] - d2_0.values()[i]);
        comps[2].push(d1_0.values()[i] - d0_1.values()[i]);
    }
    VecField::from_components(g, comps).expect("curl is finite")
}

/// Result of the spectral Gauss-law solve.
#[derive(Debug, Clone)]
pub struct GaussSolveResult {
    pub e: VecField,
    pub potential: ScalarField,
    pub residual_div: f64,
    pub residual_curl: f64,
}

/// Solve div E = rho - rho_ion on the torus for the unique zero-mean,
/// curl-free field: laplacian(phi) = -(rho - rho_ion) spectrally with the
/// zero mode of phi pinned to 0, then E = -grad(phi).
pub fn solve_gauss(rho: &ScalarField, rho_ion: f64) -> Result<GaussSolveResult> {
    let g = rho.grid();
    let m = g.points_per_axis();
    let n = g.node_count();
    let source: Vec<f64> = rho.values().iter().map(|r| r - rho_ion).collect();
    let mean = source.iter().sum::<f64>() / n as f64;
    if mean.abs() > NEUTRALITY_TOL {
        return Err(VmlkError::NeutralityViolation {
            excess: mean.abs(),
            tol: NEUTRALITY_TOL,
        });
    }
    let fft = g.fft();
    let mut spec = fft.forward3(&source);
    for i0 in 0..m {
        for i1 in 0..m {
            for i2 in 0..m {
                let idx = (i0 * m + i1) * m + i2;
                if i0 == 0 && i1 == 0 && i2 == 0 {
                    spec[idx] = rustfft::num_complex::Complex64::new(0.0, 0.0);
                    continue;
                }
                let k0 = fft.wavenumber(i0) as f64;
                let k1 = fft.wavenumber(i1) as f64;
                let k2 = fft.wavenumber(i2) as f64;
                let k2sum = k0 * k0 + k1 * k1 + k2 * k2;
                spec[idx] /= 4.0 * PI * PI * k2sum;
            }
        }
    }
    let potential = ScalarField::from_values(g, fft.inverse3_real(spec))?;
    let mut comps = [Vec::new(), Vec::new(), Vec::new()];
    for (axis, c) in comps.iter_mut().enumerate() {
        *c = torus_partial(&potential, axis)
            .values()
            .iter()
            .map(|x| -x)
            .collect();
    }
    let e = VecField::from_components(g, comps)?;

    let div_e = divergence(&e);
    let mut residual_div = 0.0f64;
    for i in 0..n {
        residual_div = residual_div.max((div_e.values()[i] - source[i]).abs());
    }
    let residual_curl = curl(&e).sup_norm();
    Ok(GaussSolveResult {
        e,
        potential,
        residual_div,
        residual_curl,
    })
}

/// Outcome of the harmonic-field constancy check (proof step 7 analog).
#[derive(Debug, Clone, serde::Serialize)]
pub struct HarmonicReport {
    pub curl_norm: f64,
    pub div_norm: f64,
    /// Largest |B^(k)| over k != 0 (per component, amplitude normalization).
    pub max_nonzero_mode: f64,
    /// Bound the nonzero modes must satisfy when the field is harmonic:
    /// (div_norm + curl_norm)/(2 pi) plus rounding slack.
    pub mode_bound: f64,
    pub is_constant: bool,
    #[serde(rename = "B0")]
    pub b0: Option<[f64; 3]>,
}

/// If sup|curl B| and sup|div B| are both below `tol`, certify that every
/// nonzero Fourier mode is below the derived bound and return the mean as
/// B0. For k != 0, k x B^ = 0 and k . B^ = 0 force B^ = 0, which is the
/// discrete form of "harmonic on the torus implies constant".
pub fn harmonic_constant_check(b: &VecField, tol: f64) -> HarmonicReport {
    let curl_norm = curl(b).sup_norm();
    let div_norm = divergence(b).sup_norm();
    let fft = b.grid().fft();
    let m = b.grid().points_per_axis();
    let norm = (m * m * m) as f64;
    let mut max_mode = 0.0f64;
    for axis in 0..3 {
        let spec = fft.forward3(b.comp(axis));
        for (idx, c) in spec.iter().enumerate() {
            if idx == 0 {
                continue;
            }
            max_mode = max_mode.max(c.norm() / norm);
        }
    }
    let sup = b.sup_norm();
    let mode_bound = (div_norm + curl_norm) / (2.0 * PI) + 1e-12 * (1.0 + sup);
    let harmonic = curl_norm <= tol && div_norm <= tol;
    let is_constant = harmonic && max_mode <= mode_bound;
    HarmonicReport {
        curl_norm,
        div_norm,
        max_nonzero_mode: max_mode,
        mode_bound,
        is_constant,
        b0: if is_constant { Some(b.mean()) } else { None },
    }
}
