//! Time integration: space-homogeneous Landau relaxation (df/dt = nu Q) and
//! an electrostatic Vlasov-Poisson-Landau Strang splitting.
//!
//! The splitting per step is
//!   half-step exact x-transport (spectral phase shift)
//!   full-step velocity advection by the self-consistent E (semi-Lagrangian
//!     cubic interpolation, values outside the box treated as 0)
//!   full collision step (RK2 midpoint, per torus node)
//!   half-step x-transport again,
//! with E recomputed from Gauss's law where the density changes. The dynamic
//! mode is electrostatic: B must vanish (a time-varying B would need Faraday
//! dynamics, which the steady-state system never provides).
//!
//! There is no positivity clamping. A step that produces a nonpositive value
//! is rejected and the caller halves dt, at most ten times per run.

use crate::error::{Result, VmlkError};
use crate::fields::solve_gauss;
use crate::grid::{for_each_line, integrate_v, torus_mean, TorusGrid, VecField, VelocityGrid};
use crate::landau::{collision_q, dissipation, entropy};
use crate::maxwell::{moments, MaxwellianParams};
use crate::spectral::decompose;
use crate::vlasov::DistField;
use rustfft::num_complex::Complex64;

pub const MAX_DT_HALVINGS: u32 = 10;

/// One diagnostics row along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub entropy: f64,
    pub dissipation: f64,
    pub mass: f64,
    pub momentum: [f64; 3],
    /// Kinetic energy plus field energy, int |v|^2 f / 2 + int |E|^2 / 2.
    pub energy: f64,
    pub sup_e: f64,
    /// Relative sup-distance to the moment-matched Maxwellian target.
    pub dist_maxwellian: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str = "t,H,D,mass,p1,p2,p3,energy,supE,dist_maxw";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.t,
            self.entropy,
            self.dissipation,
            self.mass,
            self.momentum[0],
            self.momentum[1],
            self.momentum[2],
            self.energy,
            self.sup_e,
            self.dist_maxwellian
        )
    }
}

fn first_nonpositive(f: &[f64]) -> Option<(usize, f64)> {
    f.iter()
        .enumerate()
        .find(|(_, &x)| !(x > 0.0) || !x.is_finite())
        .map(|(i, &x)| (i, x))
}

/// One RK2 (midpoint) step of df/dt = nu Q(f,f). Rejects the step if either
/// the midpoint or the result loses positivity.
pub fn step_homogeneous(f: &[f64], grid: &VelocityGrid, dt: f64, nu: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(VmlkError::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let k1 = collision_q(f, grid)?;
    let half: Vec<f64> = f
        .iter()
        .zip(&k1.q)
        .map(|(x, q)| x + 0.5 * dt * nu * q)
        .collect();
    if let Some((i, x)) = first_nonpositive(&half) {
        return Err(VmlkError::StepRejected {
            dt,
            reason: format!("midpoint state nonpositive at node {i}: {x:.3e}"),
        });
    }
    let k2 = collision_q(&half, grid)?;
    let next: Vec<f64> = f
        .iter()
        .zip(&k2.q)
        .map(|(x, q)| x + dt * nu * q)
        .collect();
    if let Some((i, x)) = first_nonpositive(&next) {
        return Err(VmlkError::StepRejected {
            dt,
            reason: format!("state nonpositive at node {i}: {x:.3e}"),
        });
    }
    Ok(next)
}

fn slice_diagnostics(
    f: &[f64],
    grid: &VelocityGrid,
    t: f64,
    target: &[f64],
    target_peak: f64,
) -> Result<DiagnosticsRecord> {
    let m = moments(f, grid)?;
    let coords = grid.coords();
    let mut v2acc = 0.0;
    for i in 0..f.len() {
        let v2 =
            coords[0][i] * coords[0][i] + coords[1][i] * coords[1][i] + coords[2][i] * coords[2][i];
        v2acc += v2 * f[i];
    }
    let kinetic = 0.5 * grid.weight() * v2acc;
    let dist = f
        .iter()
        .zip(target)
        .fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()))
        / target_peak;
    Ok(DiagnosticsRecord {
        t,
        entropy: entropy(f, grid)?,
        dissipation: dissipation(f, grid)?,
        mass: m.rho,
        momentum: [m.rho * m.u[0], m.rho * m.u[1], m.rho * m.u[2]],
        energy: kinetic,
        sup_e: 0.0,
        dist_maxwellian: dist,
    })
}

/// Relax a spatially homogeneous state to equilibrium, recording diagnostics
/// every `record_every` steps (plus the initial and final states). The
/// moment-matched Maxwellian target is fixed from the initial data once;
/// conservation pins the limit.
pub fn run_homogeneous(
    f0: &[f64],
    grid: &VelocityGrid,
    nu: f64,
    dt: f64,
    t_end: f64,
    record_every: usize,
) -> Result<(Vec<DiagnosticsRecord>, Vec<f64>)> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(VmlkError::InvalidParameter(
            "dt and t_end must be positive".into(),
        ));
    }
    let target_params = moments(f0, grid)?;
    let target = target_params.sample(grid);
    let target_peak = target.iter().fold(0.0f64, |m, &x| m.max(x));

    let mut f = f0.to_vec();
    let mut t = 0.0;
    let mut dt_cur = dt;
    let mut halvings = 0u32;
    let mut step = 0usize;
    let record = record_every.max(1);
    let mut records = vec![slice_diagnostics(&f, grid, t, &target, target_peak)?];

    while t < t_end - 1e-12 * t_end {
        let step_dt = dt_cur.min(t_end - t);
        match step_homogeneous(&f, grid, step_dt, nu) {
            Ok(next) => {
                f = next;
                t += step_dt;
                step += 1;
                if step % record == 0 && t < t_end - 1e-12 * t_end {
                    records.push(slice_diagnostics(&f, grid, t, &target, target_peak)?);
                }
            }
            Err(VmlkError::StepRejected { .. }) => {
                halvings += 1;
                if halvings > MAX_DT_HALVINGS {
                    return Err(VmlkError::PositivityLoss {
                        halvings: halvings - 1,
                        dt: dt_cur,
                    });
                }
                dt_cur *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    records.push(slice_diagnostics(&f, grid, t, &target, target_peak)?);
    Ok((records, f))
}

/// Exact free-streaming transport: f(x, v) <- f(x - v dt, v) via a spectral
/// phase shift per velocity node. The Nyquist mode gets the real (cosine)
/// factor so the shifted field stays real.
pub fn stream_x(f: &DistField, dt: f64) -> DistField {
    let torus = f.torus();
    let vgrid = f.vgrid().clone();
    let m = torus.points_per_axis();
    let fft = torus.fft();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut out = DistField::zeros(torus, vgrid);
    let nv = f.vgrid().node_count();
    for v_idx in 0..nv {
        let v = f.vgrid().node(v_idx);
        let pencil = f.x_pencil(v_idx);
        let mut spec = fft.forward3(&pencil);
        for (idx, c) in spec.iter_mut().enumerate() {
            let ijk = decompose(idx, m);
            let mut phase = 0.0;
            let mut real_factor = 1.0;
            for axis in 0..3 {
                let j = ijk[axis];
                if fft.is_nyquist(j) {
                    real_factor *= (two_pi * fft.wavenumber(j) as f64 * v[axis] * dt).cos();
                } else {
                    phase -= two_pi * fft.wavenumber(j) as f64 * v[axis] * dt;
                }
            }
            *c = *c * Complex64::from_polar(1.0, phase) * real_factor;
        }
        let back = fft.inverse3_real(spec);
        let values = out.values_mut();
        for (x_idx, val) in back.iter().enumerate() {
            values[x_idx * nv + v_idx] = *val;
        }
    }
    out
}

/// Cubic Lagrange weights on the stencil {-1, 0, 1, 2} at fraction theta.
#[inline]
fn lagrange4(theta: f64) -> [f64; 4] {
    let t = theta;
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Shift a velocity slice by a constant displacement: f(v) <- f(v - dv),
/// tensor-product cubic Lagrange interpolation, zero outside the box.
pub fn shift_velocity(slice: &[f64], grid: &VelocityGrid, dv: [f64; 3]) -> Vec<f64> {
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let mut cur = slice.to_vec();
    for axis in 0..3 {
        if dv[axis] == 0.0 {
            continue;
        }
        // departure position for node i is p = i - offset = (i + b0) + t
        let offset = dv[axis] / h;
        let b0 = (-offset).floor();
        let t = -offset - b0;
        let w = lagrange4(t);
        let b0 = b0 as i64;
        let mut next = vec![0.0; cur.len()];
        let stride = match axis {
            0 => n * n,
            1 => n,
            _ => 1,
        };
        for_each_line(n, axis, |base, stride_| {
            debug_assert_eq!(stride_, stride);
            for i in 0..n {
                let floor_p = i as i64 + b0;
                let mut acc = 0.0;
                for (s, ws) in w.iter().enumerate() {
                    let src = floor_p - 1 + s as i64;
                    if src >= 0 && (src as usize) < n {
                        acc += ws * cur[base + src as usize * stride];
                    }
                }
                next[base + i * stride] = acc;
            }
        });
        cur = next;
    }
    cur
}

/// State of the electrostatic Vlasov-Poisson-Landau flow.
#[derive(Debug, Clone)]
pub struct VplState {
    pub f: DistField,
    pub e: VecField,
    pub b: VecField,
    pub t: f64,
}

/// Self-consistent field of a distribution: Gauss solve against the discrete
/// mean density, which is the neutralizing background making total torus
/// charge exactly zero (and absorbing the collision quadrature's tiny mass
/// drift over a run).
fn self_consistent_field(f: &DistField) -> Result<VecField> {
    let rho = f.density();
    let background = torus_mean(&rho);
    Ok(solve_gauss(&rho, background)?.e)
}

impl VplState {
    /// Initial state with E from Gauss's law and a static B (which must be
    /// zero in the dynamic mode).
    pub fn new(f: DistField, b: VecField) -> Result<Self> {
        if b.grid() != f.torus() {
            return Err(VmlkError::GridMismatch("B grid must match f".into()));
        }
        if b.sup_norm() > 0.0 {
            return Err(VmlkError::Precondition(
                "dynamic mode is electrostatic: B must be identically zero".into(),
            ));
        }
        f.ensure_positive()?;
        let e = self_consistent_field(&f)?;
        Ok(Self { e, b, t: 0.0, f })
    }
}

/// One Strang step of the electrostatic system.
pub fn step_vpl(state: &VplState, dt: f64, nu: f64) -> Result<VplState> {
    if !(dt > 0.0) {
        return Err(VmlkError::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let torus = state.f.torus();
    let nx = torus.node_count();

    let mut f = stream_x(&state.f, 0.5 * dt);
    if let Some((i, x)) = first_nonpositive(f.values()) {
        return Err(VmlkError::StepRejected {
            dt,
            reason: format!("transport produced nonpositive value {x:.3e} at sample {i}"),
        });
    }

    // acceleration field from the current density
    let e_mid = self_consistent_field(&f)?;

    // characteristics v' = +E: departure point v - E dt
    for x_idx in 0..nx {
        let e_x = e_mid.at(x_idx);
        let dv = [e_x[0] * dt, e_x[1] * dt, e_x[2] * dt];
        let shifted = shift_velocity(f.slice(x_idx), f.vgrid(), dv);
        f.slice_mut(x_idx).copy_from_slice(&shifted);
    }
    if let Some((i, x)) = first_nonpositive(f.values()) {
        return Err(VmlkError::StepRejected {
            dt,
            reason: format!("advection produced nonpositive value {x:.3e} at sample {i}"),
        });
    }

    if nu != 0.0 {
        let vgrid = f.vgrid().clone();
        for x_idx in 0..nx {
            let next = step_homogeneous(f.slice(x_idx), &vgrid, dt, nu)?;
            f.slice_mut(x_idx).copy_from_slice(&next);
        }
    }

    let f = stream_x(&f, 0.5 * dt);
    if let Some((i, x)) = first_nonpositive(f.values()) {
        return Err(VmlkError::StepRejected {
            dt,
            reason: format!("transport produced nonpositive value {x:.3e} at sample {i}"),
        });
    }

    let e = self_consistent_field(&f)?;
    Ok(VplState {
        f,
        e,
        b: state.b.clone(),
        t: state.t + dt,
    })
}

fn vpl_diagnostics(
    state: &VplState,
    grid: &VelocityGrid,
    target: &[f64],
    target_peak: f64,
) -> Result<DiagnosticsRecord> {
    let nx = state.f.torus().node_count() as f64;
    let coords = grid.coords();
    let mut h_acc = 0.0;
    let mut d_acc = 0.0;
    let mut mass = 0.0;
    let mut momentum = [0.0; 3];
    let mut kinetic = 0.0;
    for x_idx in 0..state.f.torus().node_count() {
        let f = state.f.slice(x_idx);
        h_acc += entropy(f, grid)?;
        d_acc += dissipation(f, grid)?;
        mass += integrate_v(grid, f);
        for ax in 0..3 {
            let mut acc = 0.0;
            for (c, fv) in coords[ax].iter().zip(f) {
                acc += c * fv;
            }
            momentum[ax] += grid.weight() * acc;
        }
        let mut v2acc = 0.0;
        for i in 0..f.len() {
            let v2 = coords[0][i] * coords[0][i]
                + coords[1][i] * coords[1][i]
                + coords[2][i] * coords[2][i];
            v2acc += v2 * f[i];
        }
        kinetic += 0.5 * grid.weight() * v2acc;
    }
    let field_energy = 0.5
        * (0..state.f.torus().node_count())
            .map(|i| {
                let e = state.e.at(i);
                e[0] * e[0] + e[1] * e[1] + e[2] * e[2]
            })
            .sum::<f64>()
        / nx;
    let avg = state.f.x_average();
    let dist = avg
        .iter()
        .zip(target)
        .fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()))
        / target_peak;
    Ok(DiagnosticsRecord {
        t: state.t,
        entropy: h_acc / nx,
        dissipation: d_acc / nx,
        mass: mass / nx,
        momentum: [momentum[0] / nx, momentum[1] / nx, momentum[2] / nx],
        energy: kinetic / nx + field_energy,
        sup_e: state.e.sup_norm(),
        dist_maxwellian: dist,
    })
}

/// Run the electrostatic flow to t_end with diagnostics; returns the record
/// series and the final state.
pub fn run_vpl(
    f0: DistField,
    b0: VecField,
    nu: f64,
    dt: f64,
    t_end: f64,
    record_every: usize,
) -> Result<(Vec<DiagnosticsRecord>, VplState)> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(VmlkError::InvalidParameter(
            "dt and t_end must be positive".into(),
        ));
    }
    let grid = f0.vgrid().clone();
    let target_params = moments(&f0.x_average(), &grid)?;
    let target = target_params.sample(&grid);
    let target_peak = target.iter().fold(0.0f64, |m, &x| m.max(x));

    let mut state = VplState::new(f0, b0)?;
    let mut dt_cur = dt;
    let mut halvings = 0u32;
    let mut step = 0usize;
    let record = record_every.max(1);
    let mut records = vec![vpl_diagnostics(&state, &grid, &target, target_peak)?];

    while state.t < t_end - 1e-12 * t_end {
        let step_dt = dt_cur.min(t_end - state.t);
        match step_vpl(&state, step_dt, nu) {
            Ok(next) => {
                state = next;
                step += 1;
                if step % record == 0 && state.t < t_end - 1e-12 * t_end {
                    records.push(vpl_diagnostics(&state, &grid, &target, target_peak)?);
                }
            }
            Err(VmlkError::StepRejected { .. }) => {
                halvings += 1;
                if halvings > MAX_DT_HALVINGS {
                    return Err(VmlkError::PositivityLoss {
                        halvings: halvings - 1,
                        dt: dt_cur,
                    });
                }
                dt_cur *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    records.push(vpl_diagnostics(&state, &grid, &target, target_peak)?);
    Ok((records, state))
}
