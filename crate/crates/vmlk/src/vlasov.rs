//! Residual evaluation of the four steady-state equations plus the Lorentz
//! force, reduced to a pass/fail report for any candidate (f, E, B, nu,
//! rho_ion).

use crate::error::{Result, VmlkError};
use crate::grid::{integrate_v, grad_v, torus_mean, ScalarField, TorusGrid, VecField, VelocityGrid};
use crate::landau::{collision_q, nullspace_tolerance};
use crate::fields::{curl, divergence};
use serde::Serialize;
use std::f64::consts::PI;

/// Positive samples of f over (torus point x velocity node); torus index
/// slowest. The slice at one torus point is a velocity distribution.
#[derive(Debug, Clone)]
pub struct DistField {
    torus: TorusGrid,
    vgrid: VelocityGrid,
    values: Vec<f64>,
}

impl DistField {
    pub fn zeros(torus: TorusGrid, vgrid: VelocityGrid) -> Self {
        let len = torus.node_count() * vgrid.node_count();
        Self {
            torus,
            vgrid,
            values: vec![0.0; len],
        }
    }

    pub fn from_fn(
        torus: TorusGrid,
        vgrid: VelocityGrid,
        mut f: impl FnMut([f64; 3], [f64; 3]) -> f64,
    ) -> Self {
        let mut out = Self::zeros(torus, vgrid);
        let nv = out.vgrid.node_count();
        for x_idx in 0..torus.node_count() {
            let x = torus.node(x_idx);
            for v_idx in 0..nv {
                let v = out.vgrid.node(v_idx);
                out.values[x_idx * nv + v_idx] = f(x, v);
            }
        }
        out
    }

    /// Same velocity distribution at every torus point.
    pub fn from_uniform_slice(
        torus: TorusGrid,
        vgrid: VelocityGrid,
        slice: &[f64],
    ) -> Result<Self> {
        if slice.len() != vgrid.node_count() {
            return Err(VmlkError::GridMismatch(
                "slice length does not match velocity grid".into(),
            ));
        }
        let mut values = Vec::with_capacity(torus.node_count() * slice.len());
        for _ in 0..torus.node_count() {
            values.extend_from_slice(slice);
        }
        Ok(Self {
            torus,
            vgrid,
            values,
        })
    }

    pub fn torus(&self) -> TorusGrid {
        self.torus
    }

    pub fn vgrid(&self) -> &VelocityGrid {
        &self.vgrid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn slice(&self, x_idx: usize) -> &[f64] {
        let nv = self.vgrid.node_count();
        &self.values[x_idx * nv..(x_idx + 1) * nv]
    }

    pub fn slice_mut(&mut self, x_idx: usize) -> &mut [f64] {
        let nv = self.vgrid.node_count();
        &mut self.values[x_idx * nv..(x_idx + 1) * nv]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn ensure_positive(&self) -> Result<()> {
        let min = self.min_value();
        if !(min > 0.0) || !min.is_finite() {
            return Err(VmlkError::NonpositiveDistribution(format!(
                "min f = {min}"
            )));
        }
        Ok(())
    }

    /// rho(x) = int f dv.
    pub fn density(&self) -> ScalarField {
        let values = (0..self.torus.node_count())
            .map(|x| integrate_v(&self.vgrid, self.slice(x)))
            .collect();
        ScalarField::from_values(self.torus, values).expect("density finite")
    }

    /// J(x) = int v f dv.
    pub fn current(&self) -> VecField {
        let coords = self.vgrid.coords();
        let w = self.vgrid.weight();
        let n = self.torus.node_count();
        let mut comps = [
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        ];
        for x in 0..n {
            let f = self.slice(x);
            for ax in 0..3 {
                let mut acc = 0.0;
                for (c, fv) in coords[ax].iter().zip(f) {
                    acc += c * fv;
                }
                comps[ax].push(w * acc);
            }
        }
        VecField::from_components(self.torus, comps).expect("current finite")
    }

    /// Mean over torus points, one velocity distribution.
    pub fn x_average(&self) -> Vec<f64> {
        let nv = self.vgrid.node_count();
        let nx = self.torus.node_count();
        let mut avg = vec![0.0; nv];
        for x in 0..nx {
            for (a, v) in avg.iter_mut().zip(self.slice(x)) {
                *a += v;
            }
        }
        for a in avg.iter_mut() {
            *a /= nx as f64;
        }
        avg
    }

    /// Values of f at a fixed velocity node, as a torus scalar field.
    pub fn x_pencil(&self, v_idx: usize) -> Vec<f64> {
        let nv = self.vgrid.node_count();
        (0..self.torus.node_count())
            .map(|x| self.values[x * nv + v_idx])
            .collect()
    }
}

/// Lorentz force E + v x B with the right-handed cross product.
pub fn lorentz(e: [f64; 3], b: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [
        e[0] + v[1] * b[2] - v[2] * b[1],
        e[1] + v[2] * b[0] - v[0] * b[2],
        e[2] + v[0] * b[1] - v[1] * b[0],
    ]
}

fn check_same_torus(f: &DistField, e: &VecField, b: &VecField) -> Result<()> {
    if e.grid() != f.torus() || b.grid() != f.torus() {
        return Err(VmlkError::GridMismatch(
            "E, B and f must share one torus grid".into(),
        ));
    }
    Ok(())
}

/// Pointwise residual of the steady Vlasov equation,
/// v . grad_x f + (E + v x B) . grad_v f - nu Q(f,f),
/// over every (torus point, velocity node); layout matches `DistField`.
///
/// grad_x is spectral per fixed velocity node; grad_v and Q use the velocity
/// stencils of `grid` and `landau`. When nu = 0 the collision term is
/// identically zero and is skipped.
pub fn vlasov_residual(f: &DistField, e: &VecField, b: &VecField, nu: f64) -> Result<Vec<f64>> {
    check_same_torus(f, e, b)?;
    f.ensure_positive()?;
    let nv = f.vgrid().node_count();
    let nx = f.torus().node_count();
    let mut residual = vec![0.0; nx * nv];

    // transport term, one spectral gradient per velocity node
    let fft = f.torus().fft();
    for v_idx in 0..nv {
        let v = f.vgrid().node(v_idx);
        let pencil = f.x_pencil(v_idx);
        for axis in 0..3 {
            if v[axis] == 0.0 {
                continue;
            }
            let d = fft.partial(&pencil, axis);
            for x_idx in 0..nx {
                residual[x_idx * nv + v_idx] += v[axis] * d[x_idx];
            }
        }
    }

    // force and collision terms, per torus point
    for x_idx in 0..nx {
        let slice = f.slice(x_idx);
        let grad = grad_v(f.vgrid(), slice);
        let e_x = e.at(x_idx);
        let b_x = b.at(x_idx);
        let out = &mut residual[x_idx * nv..(x_idx + 1) * nv];
        for v_idx in 0..nv {
            let v = f.vgrid().node(v_idx);
            let force = lorentz(e_x, b_x, v);
            out[v_idx] += force[0] * grad[0][v_idx]
                + force[1] * grad[1][v_idx]
                + force[2] * grad[2][v_idx];
        }
        if nu != 0.0 {
            let coll = collision_q(slice, f.vgrid())?;
            for (r, q) in out.iter_mut().zip(&coll.q) {
                *r -= nu * q;
            }
        }
    }
    Ok(residual)
}

/// Residual fields of the three Maxwell constraints, plus curl E as a derived
/// diagnostic (Faraday at equilibrium is a conclusion, never an input).
#[derive(Debug, Clone)]
pub struct MaxwellResiduals {
    pub ampere: VecField,
    pub gauss: ScalarField,
    pub divb: ScalarField,
    pub curle: VecField,
}

pub fn maxwell_residuals(
    f: &DistField,
    e: &VecField,
    b: &VecField,
    rho_ion: f64,
) -> Result<MaxwellResiduals> {
    check_same_torus(f, e, b)?;
    let torus = f.torus();
    let j = f.current();
    let curl_b = curl(b);
    let mut ampere_comps = [Vec::new(), Vec::new(), Vec::new()];
    for (axis, c) in ampere_comps.iter_mut().enumerate() {
        *c = curl_b
            .comp(axis)
            .iter()
            .zip(j.comp(axis))
            .map(|(cb, jj)| cb - jj)
            .collect();
    }
    let ampere = VecField::from_components(torus, ampere_comps)?;

    let rho = f.density();
    let div_e = divergence(e);
    let gauss = ScalarField::from_values(
        torus,
        div_e
            .values()
            .iter()
            .zip(rho.values())
            .map(|(d, r)| d - (r - rho_ion))
            .collect(),
    )?;

    Ok(MaxwellResiduals {
        ampere,
        gauss,
        divb: divergence(b),
        curle: curl(e),
    })
}

/// Per-equation tolerances. Spectral equations default to 1e-6; the Vlasov
/// tolerance is derived from the collision nullspace residue and the
/// B-dependent force-stencil error at the grid's resolution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub vlasov: f64,
    pub ampere: f64,
    pub gauss: f64,
    pub divb: f64,
    pub curle: f64,
}

/// Ceiling for the (v x B) . grad_v error on Maxwellian data: the stencil
/// error of grad_v breaks the exact (v x B) . v = 0 cancellation at O(h^2).
pub fn lorentz_discretization_tolerance(
    vgrid: &VelocityGrid,
    b_sup: f64,
    rho: f64,
    t: f64,
) -> f64 {
    let f_peak = rho * (2.0 * PI * t).powf(-1.5);
    let h_rel2 = vgrid.spacing() * vgrid.spacing() / t;
    0.12 * b_sup * f_peak * h_rel2 / t.sqrt()
}

impl Tolerances {
    pub const SPECTRAL: f64 = 1e-6;

    /// Defaults for a scenario with reference density/temperature and a
    /// magnetic field bounded by `b_sup`.
    pub fn for_scenario(vgrid: &VelocityGrid, nu: f64, rho_ion: f64, t_ref: f64, b_sup: f64) -> Self {
        Self {
            vlasov: nullspace_tolerance(nu.max(1.0), rho_ion, t_ref)
                + lorentz_discretization_tolerance(vgrid, b_sup, rho_ion, t_ref),
            ampere: Self::SPECTRAL,
            gauss: Self::SPECTRAL,
            divb: Self::SPECTRAL,
            curle: Self::SPECTRAL,
        }
    }
}

/// Norms and verdicts for one steady-state candidate.
#[derive(Debug, Clone, Serialize)]
pub struct SteadyStateReport {
    pub vlasov_sup: f64,
    pub vlasov_l2: f64,
    pub ampere_sup: f64,
    pub ampere_l2: f64,
    pub gauss_sup: f64,
    pub gauss_l2: f64,
    pub divb_sup: f64,
    pub divb_l2: f64,
    pub curle_sup: f64,
    pub curle_l2: f64,
    pub vlasov_pass: bool,
    pub ampere_pass: bool,
    pub gauss_pass: bool,
    pub divb_pass: bool,
    pub curle_pass: bool,
    pub pass: bool,
    pub tolerances: Tolerances,
}

impl SteadyStateReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Run both residual evaluations, reduce to norms, apply tolerances.
pub fn steady_state_report(
    f: &DistField,
    e: &VecField,
    b: &VecField,
    nu: f64,
    rho_ion: f64,
    tol: &Tolerances,
) -> Result<SteadyStateReport> {
    let residual = vlasov_residual(f, e, b, nu)?;
    let vlasov_sup = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let nx = f.torus().node_count() as f64;
    let vlasov_l2 =
        (residual.iter().map(|r| r * r).sum::<f64>() * f.vgrid().weight() / nx).sqrt();

    let mr = maxwell_residuals(f, e, b, rho_ion)?;
    let report = SteadyStateReport {
        vlasov_sup,
        vlasov_l2,
        ampere_sup: mr.ampere.sup_norm(),
        ampere_l2: mr.ampere.l2_norm(),
        gauss_sup: mr.gauss.sup_norm(),
        gauss_l2: mr.gauss.l2_norm(),
        divb_sup: mr.divb.sup_norm(),
        divb_l2: mr.divb.l2_norm(),
        curle_sup: mr.curle.sup_norm(),
        curle_l2: mr.curle.l2_norm(),
        vlasov_pass: vlasov_sup <= tol.vlasov,
        ampere_pass: mr.ampere.sup_norm() <= tol.ampere,
        gauss_pass: mr.gauss.sup_norm() <= tol.gauss,
        divb_pass: mr.divb.sup_norm() <= tol.divb,
        curle_pass: mr.curle.sup_norm() <= tol.curle,
        pass: false,
        tolerances: *tol,
    };
    Ok(SteadyStateReport {
        pass: report.vlasov_pass
            && report.ampere_pass
            && report.gauss_pass
            && report.divb_pass
            && report.curle_pass,
        ..report
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{drift_candidate, equilibrium_candidate};
    use crate::maxwell::MaxwellianParams;
    use crate::rng::SplitMix64;

    fn grids(m: usize, n: usize) -> (TorusGrid, VelocityGrid) {
        (TorusGrid::new(m).unwrap(), VelocityGrid::new(6.0, n).unwrap())
    }

    #[test]
    fn lorentz_cross_product_table() {
        let f = lorentz([0.0; 3], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]);
        assert_eq!(f, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn lorentz_magnetic_force_does_no_work() {
        let mut rng = SplitMix64::new(50);
        for _ in 0..100 {
            let v = [rng.range(-3.0, 3.0), rng.range(-3.0, 3.0), rng.range(-3.0, 3.0)];
            let b = [rng.range(-3.0, 3.0), rng.range(-3.0, 3.0), rng.range(-3.0, 3.0)];
            let f = lorentz([0.0; 3], b, v);
            let dot = f[0] * v[0] + f[1] * v[1] + f[2] * v[2];
            assert!(dot.abs() < 1e-14 * (1.0 + v.iter().map(|x| x * x).sum::<f64>()));
        }
    }

    #[test]
    fn lorentz_without_field_is_electric() {
        let e = [0.3, -0.1, 2.0];
        assert_eq!(lorentz(e, [0.0; 3], [5.0, -2.0, 1.0]), e);
    }

    #[test]
    fn equilibrium_vlasov_residual_within_nullspace_tolerance() {
        let (torus, vgrid) = grids(4, 12);
        let c = equilibrium_candidate(torus, &vgrid, 1.0, 1.0, [0.0, 0.0, 1.0]).unwrap();
        let r = vlasov_residual(&c.f, &c.e, &c.b, 1.0).unwrap();
        let sup = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = Tolerances::for_scenario(&vgrid, 1.0, 1.0, 1.0, 1.0);
        assert!(sup <= tol.vlasov, "sup {sup} tol {}", tol.vlasov);
    }

    #[test]
    fn transport_residual_matches_closed_form() {
        let (torus, vgrid) = grids(8, 8);
        let m = MaxwellianParams::new(1.0, [0.0; 3], 1.0).unwrap();
        let f = DistField::from_fn(torus, vgrid.clone(), |x, v| {
            m.density_at(v) * (1.0 + 0.5 * (2.0 * PI * x[0]).sin())
        });
        let e = VecField::constant(torus, [0.0; 3]);
        let b = VecField::constant(torus, [0.0; 3]);
        let r = vlasov_residual(&f, &e, &b, 0.0).unwrap();
        let nv = vgrid.node_count();
        for x_idx in 0..torus.node_count() {
            let x = torus.node(x_idx);
            for v_idx in 0..nv {
                let v = vgrid.node(v_idx);
                let expect = v[0] * PI * (2.0 * PI * x[0]).cos() * m.density_at(v);
                assert!((r[x_idx * nv + v_idx] - expect).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn constant_state_with_no_fields_has_zero_residual() {
        let (torus, vgrid) = grids(4, 8);
        let f = DistField::from_fn(torus, vgrid, |_, _| 0.4);
        let e = VecField::constant(torus, [0.0; 3]);
        let b = VecField::constant(torus, [0.0; 3]);
        let r = vlasov_residual(&f, &e, &b, 0.0).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn residual_rejects_nonpositive_f() {
        let (torus, vgrid) = grids(4, 8);
        let f = DistField::zeros(torus, vgrid);
        let e = VecField::constant(torus, [0.0; 3]);
        let b = VecField::constant(torus, [0.0; 3]);
        assert!(vlasov_residual(&f, &e, &b, 1.0).is_err());
    }

    #[test]
    fn residual_rejects_grid_mismatch() {
        let (torus, vgrid) = grids(4, 8);
        let other = TorusGrid::new(8).unwrap();
        let c = equilibrium_candidate(torus, &vgrid, 1.0, 1.0, [0.0; 3]).unwrap();
        let e = VecField::constant(other, [0.0; 3]);
        assert!(vlasov_residual(&c.f, &e, &c.b, 1.0).is_err());
    }

    #[test]
    fn maxwell_residuals_on_equilibrium_triple() {
        let (torus, vgrid) = grids(8, 16);
        let c = equilibrium_candidate(torus, &vgrid, 1.0, 1.0, [0.0, 0.0, 2.0]).unwrap();
        let mr = maxwell_residuals(&c.f, &c.e, &c.b, 1.0).unwrap();
        assert!(mr.ampere.sup_norm() <= 1e-6);
        assert!(mr.gauss.sup_norm() <= 1e-6);
        assert!(mr.divb.sup_norm() <= 1e-6);
        assert!(mr.curle.sup_norm() <= 1e-6);
    }

    #[test]
    fn ampere_residual_sees_single_mode_field() {
        let (torus, vgrid) = grids(8, 8);
        let c = equilibrium_candidate(torus, &vgrid, 1.0, 1.0, [0.0; 3]).unwrap();
        let b = torus.sample_vec(|x| [(2.0 * PI * x[2]).sin(), 0.0, 0.0]);
        let mr = maxwell_residuals(&c.f, &c.e, &b, 1.0).unwrap();
        assert!((mr.ampere.sup_norm() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn mean_ampere_residual_is_minus_mean_current() {
        let (torus, vgrid) = grids(4, 16);
        let mut rng = SplitMix64::new(51);
        let c = drift_candidate(torus, &vgrid, 1.0, 1.0, [0.3, 0.0, 0.0], [0.0; 3]).unwrap();
        let b = crate::fixtures::random_band_limited_vec(torus, &mut rng, 1, 1.0);
        let mr = maxwell_residuals(&c.f, &c.e, &b, 1.0).unwrap();
        let mean = [
            torus_mean(&mr.ampere.scalar_component(0)),
            torus_mean(&mr.ampere.scalar_component(1)),
            torus_mean(&mr.ampere.scalar_component(2)),
        ];
        assert!((mean[0] + 0.3).abs() < 1e-5);
        assert!(mean[1].abs() < 1e-5);
        assert!(mean[2].abs() < 1e-5);
    }

    #[test]
    fn report_passes_equilibrium_and_fails_inserted_field() {
        let (torus, vgrid) = grids(4, 12);
        let c = equilibrium_candidate(torus, &vgrid, 1.0, 1.0, [0.0, 0.0, 1.0]).unwrap();
        let tol = Tolerances::for_scenario(&vgrid, 1.0, 1.0, 1.0, 1.0);
        let rep = steady_state_report(&c.f, &c.e, &c.b, 1.0, 1.0, &tol).unwrap();
        assert!(rep.pass, "{}", rep.to_json());

        let e = torus.sample_vec(|x| [0.01 * (2.0 * PI * x[0]).sin(), 0.0, 0.0]);
        let rep = steady_state_report(&c.f, &e, &c.b, 1.0, 1.0, &tol).unwrap();
        assert!(!rep.gauss_pass);
        assert!(rep.ampere_pass && rep.divb_pass && rep.curle_pass && rep.vlasov_pass);
        assert!(!rep.pass);
    }

    #[test]
    fn zero_tolerances_fail_perturbed_candidate() {
        let (torus, vgrid) = grids(4, 8);
        let m = MaxwellianParams::new(1.0, [0.1, 0.0, 0.0], 1.1).unwrap();
        let f = DistField::from_fn(torus, vgrid, |x, v| {
            m.density_at(v) * (1.0 + 0.05 * (2.0 * PI * x[1]).cos())
        });
        let e = torus.sample_vec(|x| [0.0, 0.001 * (2.0 * PI * x[0]).sin(), 0.0]);
        let b = torus.sample_vec(|x| [0.0, 0.0, 1.0 + 0.01 * (2.0 * PI * x[2]).sin()]);
        let zero = Tolerances {
            vlasov: 0.0,
            ampere: 0.0,
            gauss: 0.0,
            divb: 0.0,
            curle: 0.0,
        };
        let rep = steady_state_report(&f, &e, &b, 1.0, 1.0, &zero).unwrap();
        assert!(!rep.vlasov_pass);
        assert!(!rep.ampere_pass);
        assert!(!rep.gauss_pass);
        assert!(!rep.divb_pass);
        assert!(!rep.curle_pass);
    }

    #[test]
    fn divergence_free_insertion_leaves_gauss_unchanged() {
        let (torus, vgrid) = grids(8, 8);
        let c = equilibrium_candidate(torus, &vgrid, 1.0, 1.0, [0.0; 3]).unwrap();
        let base = maxwell_residuals(&c.f, &c.e, &c.b, 1.0).unwrap();
        let e2 = torus.sample_vec(|x| [(2.0 * PI * x[1]).sin(), 0.0, 0.0]);
        let perturbed = maxwell_residuals(&c.f, &e2, &c.b, 1.0).unwrap();
        for i in 0..torus.node_count() {
            assert!((base.gauss.values()[i] - perturbed.gauss.values()[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn report_json_has_stable_keys() {
        let (torus, vgrid) = grids(4, 8);
        let c = equilibrium_candidate(torus, &vgrid, 1.0, 1.0, [0.0; 3]).unwrap();
        let tol = Tolerances::for_scenario(&vgrid, 1.0, 1.0, 1.0, 0.0);
        let rep = steady_state_report(&c.f, &c.e, &c.b, 1.0, 1.0, &tol).unwrap();
        let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        for key in ["vlasov_sup", "ampere_sup", "gauss_sup", "divb_sup", "curle_sup", "pass"] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
    }
}
