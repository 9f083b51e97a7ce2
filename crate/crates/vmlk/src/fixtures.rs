//! Reproducible candidate states and random fields, generated from a config
//! seed via the fixed-constant generator in `rng`.
//!
//! These are the canonical inputs of the `check` and `pipeline` subcommands
//! and of the test suites: the constructed equilibrium triple and the three
//! defect candidates that the audit pipeline must catch at its designated
//! steps.

use crate::error::Result;
use crate::grid::{ScalarField, TorusGrid, VecField, VelocityGrid};
use crate::maxwell::MaxwellianParams;
use crate::rng::SplitMix64;
use crate::vlasov::DistField;
use std::f64::consts::PI;

/// Band-limited scalar field with independent uniform amplitudes on every
/// mode with |k|_inf <= kmax.
pub fn random_band_limited_scalar(
    grid: TorusGrid,
    rng: &mut SplitMix64,
    kmax: i64,
    amplitude: f64,
) -> ScalarField {
    let mut modes = Vec::new();
    for k0 in -kmax..=kmax {
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                modes.push((
                    [k0 as f64, k1 as f64, k2 as f64],
                    rng.range(-amplitude, amplitude),
                    rng.range(-amplitude, amplitude),
                ));
            }
        }
    }
    grid.sample(|x| {
        modes
            .iter()
            .map(|(k, a, b)| {
                let ph = 2.0 * PI * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
                a * ph.cos() + b * ph.sin()
            })
            .sum()
    })
}

pub fn random_band_limited_vec(
    grid: TorusGrid,
    rng: &mut SplitMix64,
    kmax: i64,
    amplitude: f64,
) -> VecField {
    let c0 = random_band_limited_scalar(grid, rng, kmax, amplitude);
    let c1 = random_band_limited_scalar(grid, rng, kmax, amplitude);
    let c2 = random_band_limited_scalar(grid, rng, kmax, amplitude);
    VecField::from_components(
        grid,
        [
            c0.values().to_vec(),
            c1.values().to_vec(),
            c2.values().to_vec(),
        ],
    )
    .expect("components share the grid")
}

/// Random positive mixture of a few Maxwellians; smooth, decaying, strictly
/// positive.
pub fn random_mixture(grid: &VelocityGrid, rng: &mut SplitMix64, components: usize) -> Vec<f64> {
    let mut f = vec![0.0; grid.node_count()];
    for _ in 0..components.max(1) {
        let m = MaxwellianParams::new(
            rng.range(0.2, 1.0),
            [
                rng.range(-1.0, 1.0),
                rng.range(-1.0, 1.0),
                rng.range(-1.0, 1.0),
            ],
            rng.range(0.7, 1.5),
        )
        .expect("parameters in range");
        for (x, v) in f.iter_mut().zip(m.sample(grid)) {
            *x += v;
        }
    }
    f
}

/// Symmetric two-beam state: half Maxwellian drifting at +u e1, half at -u e1.
pub fn bi_maxwellian(grid: &VelocityGrid, rho: f64, drift: f64, t: f64) -> Vec<f64> {
    let a = MaxwellianParams::new(rho, [drift, 0.0, 0.0], t)
        .expect("valid parameters")
        .sample(grid);
    let b = MaxwellianParams::new(rho, [-drift, 0.0, 0.0], t)
        .expect("valid parameters")
        .sample(grid);
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

/// A full steady-state candidate (f, E, B).
#[derive(Debug, Clone)]
pub struct Candidate {
    pub f: DistField,
    pub e: VecField,
    pub b: VecField,
}

/// The equilibrium triple: spatially uniform Maxwellian, E = 0, constant B.
pub fn equilibrium_candidate(
    torus: TorusGrid,
    vgrid: &VelocityGrid,
    rho_ion: f64,
    t: f64,
    b0: [f64; 3],
) -> Result<Candidate> {
    let slice = MaxwellianParams::new(rho_ion, [0.0; 3], t)?.sample(vgrid);
    let f = DistField::from_uniform_slice(torus, vgrid.clone(), &slice)?;
    Ok(Candidate {
        f,
        e: VecField::constant(torus, [0.0; 3]),
        b: VecField::constant(torus, b0),
    })
}

/// Locally Maxwellian everywhere but with T(x) = t (1 + amp sin 2 pi x1):
/// passes the pointwise nullspace checks, fails temperature uniformity.
pub fn varying_temperature_candidate(
    torus: TorusGrid,
    vgrid: &VelocityGrid,
    rho_ion: f64,
    t: f64,
    amp: f64,
    b0: [f64; 3],
) -> Result<Candidate> {
    let mut f = DistField::zeros(torus, vgrid.clone());
    for x_idx in 0..torus.node_count() {
        let x = torus.node(x_idx);
        let t_local = t * (1.0 + amp * (2.0 * PI * x[0]).sin());
        let slice = MaxwellianParams::new(rho_ion, [0.0; 3], t_local)?.sample(vgrid);
        f.slice_mut(x_idx).copy_from_slice(&slice);
    }
    Ok(Candidate {
        f,
        e: VecField::constant(torus, [0.0; 3]),
        b: VecField::constant(torus, b0),
    })
}

/// Uniform drifting Maxwellian: survives the local checks and the Killing
/// step, fails the zero-current closure.
pub fn drift_candidate(
    torus: TorusGrid,
    vgrid: &VelocityGrid,
    rho_ion: f64,
    t: f64,
    drift: [f64; 3],
    b0: [f64; 3],
) -> Result<Candidate> {
    let slice = MaxwellianParams::new(rho_ion, drift, t)?.sample(vgrid);
    let f = DistField::from_uniform_slice(torus, vgrid.clone(), &slice)?;
    Ok(Candidate {
        f,
        e: VecField::constant(torus, [0.0; 3]),
        b: VecField::constant(torus, b0),
    })
}

/// Equilibrium distribution with a non-harmonic magnetic field
/// B = B0 + amp (sin 2 pi x2) e1: everything passes until the harmonic check.
pub fn nonharmonic_b_candidate(
    torus: TorusGrid,
    vgrid: &VelocityGrid,
    rho_ion: f64,
    t: f64,
    amp: f64,
    b0: [f64; 3],
) -> Result<Candidate> {
    let mut c = equilibrium_candidate(torus, vgrid, rho_ion, t, b0)?;
    c.b = torus.sample_vec(|x| {
        [
            b0[0] + amp * (2.0 * PI * x[1]).sin(),
            b0[1],
            b0[2],
        ]
    });
    Ok(c)
}
