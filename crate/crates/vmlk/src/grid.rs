//! Velocity and torus grids with the quadrature and derivative machinery
//! used by every other module.
//!
//! Velocity space is a truncated cell-centered Cartesian box: nodes
//! v_i = -L + (i + 1/2) h per axis with h = 2L/N and even N, so the node set
//! is exactly symmetric under v -> -v and the origin is never a node.
//! Quadrature is the midpoint rule with uniform weight h^3.
//!
//! The torus is the unit cube with periodic wrap; its derivatives are
//! spectral (see `spectral`), while velocity derivatives are second-order
//! finite differences: central stencils inside, one-sided stencils on the
//! two boundary faces per axis.

use crate::error::{Result, VmlkError};
use crate::spectral::{decompose, TorusFft};
use std::io::{BufRead, Write};

/// Truncated cell-centered velocity grid with midpoint quadrature weights.
#[derive(Debug, Clone)]
pub struct VelocityGrid {
    half_width: f64,
    points_per_axis: usize,
    spacing: f64,
    axis: Vec<f64>,
    coords: [Vec<f64>; 3],
}

impl VelocityGrid {
    /// Build a grid with half-width `L` and an even number `N >= 4` of
    /// points per axis.
    pub fn new(half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(VmlkError::InvalidGrid(format!(
                "L must be positive, got {half_width}"
            )));
        }
        if points_per_axis < 4 || points_per_axis % 2 != 0 {
            return Err(VmlkError::InvalidGrid(format!(
                "N must be even >= 4, got {points_per_axis}"
            )));
        }
        let n = points_per_axis;
        let spacing = 2.0 * half_width / n as f64;
        let axis: Vec<f64> = (0..n)
            .map(|i| -half_width + (i as f64 + 0.5) * spacing)
            .collect();
        let total = n * n * n;
        let mut coords = [
            Vec::with_capacity(total),
            Vec::with_capacity(total),
            Vec::with_capacity(total),
        ];
        for &v0 in &axis {
            for &v1 in &axis {
                for &v2 in &axis {
                    coords[0].push(v0);
                    coords[1].push(v1);
                    coords[2].push(v2);
                }
            }
        }
        Ok(Self {
            half_width,
            points_per_axis,
            spacing,
            axis,
            coords,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Quadrature weight per node, h^3.
    pub fn weight(&self) -> f64 {
        self.spacing * self.spacing * self.spacing
    }

    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(3)
    }

    pub fn axis_nodes(&self) -> &[f64] {
        &self.axis
    }

    /// Per-node coordinate arrays (structure of arrays), row-major with the
    /// first axis slowest.
    pub fn coords(&self) -> [&[f64]; 3] {
        [&self.coords[0], &self.coords[1], &self.coords[2]]
    }

    pub fn node(&self, idx: usize) -> [f64; 3] {
        [
            self.coords[0][idx],
            self.coords[1][idx],
            self.coords[2][idx],
        ]
    }

    #[inline]
    pub fn index_of(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.points_per_axis + j) * self.points_per_axis + k
    }

    /// Index of the node at -v. Cell-centered layout with even N makes this
    /// an exact bijection.
    pub fn reflect_index(&self, idx: usize) -> usize {
        let n = self.points_per_axis;
        let [i, j, k] = decompose(idx, n);
        self.index_of(n - 1 - i, n - 1 - j, n - 1 - k)
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.half_width == other.half_width && self.points_per_axis == other.points_per_axis
    }

    /// Sample a function of velocity on every node.
    pub fn sample(&self, mut f: impl FnMut([f64; 3]) -> f64) -> Vec<f64> {
        (0..self.node_count()).map(|i| f(self.node(i))).collect()
    }
}

/// Midpoint quadrature over the truncated velocity box. Fixed ascending
/// summation order, so results are bit-identical regardless of threading.
pub fn integrate_v(grid: &VelocityGrid, g: &[f64]) -> f64 {
    debug_assert_eq!(g.len(), grid.node_count());
    let mut acc = 0.0;
    for &x in g {
        acc += x;
    }
    grid.weight() * acc
}

pub(crate) fn for_each_line(n: usize, axis: usize, mut f: impl FnMut(usize, usize)) {
    let stride = match axis {
        0 => n * n,
        1 => n,
        _ => 1,
    };
    for a in 0..n {
        for b in 0..n {
            let base = match axis {
                0 => a * n + b,
                1 => a * n * n + b,
                _ => (a * n + b) * n,
            };
            f(base, stride);
        }
    }
}

/// Partial derivative of velocity samples along one axis: central differences
/// inside, second-order one-sided stencils on the boundary faces.
pub fn partial_v(grid: &VelocityGrid, g: &[f64], axis: usize) -> Vec<f64> {
    debug_assert_eq!(g.len(), grid.node_count());
    let n = grid.points_per_axis;
    let inv2h = 1.0 / (2.0 * grid.spacing);
    let mut out = vec![0.0; g.len()];
    for_each_line(n, axis, |base, stride| {
        let at = |i: usize| g[base + i * stride];
        out[base] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
        for i in 1..n - 1 {
            out[base + i * stride] = (at(i + 1) - at(i - 1)) * inv2h;
        }
        out[base + (n - 1) * stride] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv2h;
    });
    out
}

/// Velocity gradient, all three axes.
pub fn grad_v(grid: &VelocityGrid, g: &[f64]) -> [Vec<f64>; 3] {
    [
        partial_v(grid, g, 0),
        partial_v(grid, g, 1),
        partial_v(grid, g, 2),
    ]
}

/// Divergence of a velocity-space vector field with the same stencils as
/// `grad_v`.
pub fn div_v(grid: &VelocityGrid, f: &[Vec<f64>; 3]) -> Vec<f64> {
    let mut out = partial_v(grid, &f[0], 0);
    for (axis, comp) in f.iter().enumerate().skip(1) {
        let d = partial_v(grid, comp, axis);
        for (o, x) in out.iter_mut().zip(d) {
            *o += x;
        }
    }
    out
}

/// Uniform periodic grid on the unit torus, nodes x_j = j/M per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    points_per_axis: usize,
}

impl TorusGrid {
    pub fn new(points_per_axis: usize) -> Result<Self> {
        if points_per_axis < 2 {
            return Err(VmlkError::InvalidGrid(format!(
                "M must be >= 2, got {points_per_axis}"
            )));
        }
        Ok(Self { points_per_axis })
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(3)
    }

    pub fn node(&self, idx: usize) -> [f64; 3] {
        let m = self.points_per_axis;
        let [i, j, k] = decompose(idx, m);
        let s = 1.0 / m as f64;
        [i as f64 * s, j as f64 * s, k as f64 * s]
    }

    #[inline]
    pub fn index_of(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.points_per_axis;
        (i * m + j) * m + k
    }

    pub fn sample(&self, mut f: impl FnMut([f64; 3]) -> f64) -> ScalarField {
        let values = (0..self.node_count()).map(|i| f(self.node(i))).collect();
        ScalarField { grid: *self, values }
    }

    pub fn sample_vec(&self, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> VecField {
        let mut comps = [
            Vec::with_capacity(self.node_count()),
            Vec::with_capacity(self.node_count()),
            Vec::with_capacity(self.node_count()),
        ];
        for i in 0..self.node_count() {
            let v = f(self.node(i));
            comps[0].push(v[0]);
            comps[1].push(v[1]);
            comps[2].push(v[2]);
        }
        VecField { grid: *self, comps }
    }

    pub(crate) fn fft(&self) -> TorusFft {
        TorusFft::new(self.points_per_axis)
    }
}

/// Real scalar field on a torus grid, row-major with x1 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(VmlkError::GridMismatch(format!(
                "scalar field has {} values, grid has {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(VmlkError::InvalidParameter(
                "scalar field contains non-finite values".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.node_count()],
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        let n = self.values.len() as f64;
        (self.values.iter().map(|v| v * v).sum::<f64>() / n).sqrt()
    }

    /// CSV with header `x1,x2,x3,value`, nodes in row-major order,
    /// 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "x1,x2,x3,value")?;
        for (i, v) in self.values.iter().enumerate() {
            let x = self.grid.node(i);
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", x[0], x[1], x[2], v)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(grid: TorusGrid, r: R) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.node_count());
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if lineno == 0 {
                continue; // header
            }
            let last = line.rsplit(',').next().ok_or(VmlkError::Config {
                line: lineno + 1,
                msg: "empty CSV row".into(),
            })?;
            let v: f64 = last.trim().parse().map_err(|_| VmlkError::Config {
                line: lineno + 1,
                msg: format!("bad value {last:?}"),
            })?;
            values.push(v);
        }
        Self::from_values(grid, values)
    }
}

/// Three-component real field on a torus grid. Components share one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VecField {
    grid: TorusGrid,
    comps: [Vec<f64>; 3],
}

impl VecField {
    pub fn from_components(grid: TorusGrid, comps: [Vec<f64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != grid.node_count() {
                return Err(VmlkError::GridMismatch(
                    "vector field component length mismatch".into(),
                ));
            }
            if !c.iter().all(|v| v.is_finite()) {
                return Err(VmlkError::InvalidParameter(
                    "vector field contains non-finite values".into(),
                ));
            }
        }
        Ok(Self { grid, comps })
    }

    pub fn constant(grid: TorusGrid, c: [f64; 3]) -> Self {
        Self {
            grid,
            comps: [
                vec![c[0]; grid.node_count()],
                vec![c[1]; grid.node_count()],
                vec![c[2]; grid.node_count()],
            ],
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn comp(&self, axis: usize) -> &[f64] {
        &self.comps[axis]
    }

    pub fn comp_mut(&mut self, axis: usize) -> &mut [f64] {
        &mut self.comps[axis]
    }

    pub fn at(&self, idx: usize) -> [f64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn scalar_component(&self, axis: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.comps[axis].clone(),
        }
    }

    /// Sup over nodes of the Euclidean norm.
    pub fn sup_norm(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.grid.node_count() {
            let v = self.at(i);
            m = m.max((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
        }
        m
    }

    pub fn l2_norm(&self) -> f64 {
        let n = self.grid.node_count() as f64;
        let s: f64 = (0..self.grid.node_count())
            .map(|i| {
                let v = self.at(i);
                v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
            })
            .sum();
        (s / n).sqrt()
    }

    /// Componentwise mean.
    pub fn mean(&self) -> [f64; 3] {
        let n = self.grid.node_count() as f64;
        [
            self.comps[0].iter().sum::<f64>() / n,
            self.comps[1].iter().sum::<f64>() / n,
            self.comps[2].iter().sum::<f64>() / n,
        ]
    }

    /// CSV with header `x1,x2,x3,v1,v2,v3`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "x1,x2,x3,v1,v2,v3")?;
        for i in 0..self.grid.node_count() {
            let x = self.grid.node(i);
            let v = self.at(i);
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                x[0], x[1], x[2], v[0], v[1], v[2]
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(grid: TorusGrid, r: R) -> Result<Self> {
        let mut comps = [Vec::new(), Vec::new(), Vec::new()];
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if lineno == 0 {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(VmlkError::Config {
                    line: lineno + 1,
                    msg: format!("expected 6 columns, got {}", cols.len()),
                });
            }
            for a in 0..3 {
                let v: f64 = cols[3 + a].trim().parse().map_err(|_| VmlkError::Config {
                    line: lineno + 1,
                    msg: format!("bad value {:?}", cols[3 + a]),
                })?;
                comps[a].push(v);
            }
        }
        Self::from_components(grid, comps)
    }
}

/// Spectral partial derivative of a torus scalar field. The Nyquist mode's
/// derivative is zeroed so the result is real.
pub fn torus_partial(s: &ScalarField, axis: usize) -> ScalarField {
    let fft = s.grid.fft();
    ScalarField {
        grid: s.grid,
        values: fft.partial(&s.values, axis),
    }
}

/// Arithmetic mean over nodes; equals the integral over the unit torus for
/// the discrete measure.
pub fn torus_mean(s: &ScalarField) -> f64 {
    s.values.iter().sum::<f64>() / s.values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use std::f64::consts::PI;

    fn maxwellian(v: [f64; 3], rho: f64, u: [f64; 3], t: f64) -> f64 {
        let d2 = (v[0] - u[0]).powi(2) + (v[1] - u[1]).powi(2) + (v[2] - u[2]).powi(2);
        rho * (2.0 * PI * t).powf(-1.5) * (-d2 / (2.0 * t)).exp()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(VelocityGrid::new(1.0, 2).is_err());
        assert!(VelocityGrid::new(1.0, 7).is_err());
        assert!(VelocityGrid::new(0.0, 8).is_err());
        assert!(VelocityGrid::new(-2.0, 8).is_err());
    }

    #[test]
    fn node_layout_l1_n4() {
        let g = VelocityGrid::new(1.0, 4).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.axis_nodes(), &[-0.75, -0.25, 0.25, 0.75]);
    }

    #[test]
    fn weights_sum_to_box_volume() {
        let g = VelocityGrid::new(6.0, 16).unwrap();
        assert_eq!(g.spacing(), 0.75);
        assert_eq!(g.node_count(), 4096);
        let total = g.weight() * g.node_count() as f64;
        assert_eq!(total, 1728.0);
    }

    #[test]
    fn node_reflection_is_exact() {
        let g = VelocityGrid::new(6.0, 16).unwrap();
        for idx in [0, 1, 77, 4095] {
            let r = g.reflect_index(idx);
            let a = g.node(idx);
            let b = g.node(r);
            for ax in 0..3 {
                assert_eq!(a[ax], -b[ax]);
            }
        }
    }

    #[test]
    fn integrate_constant() {
        let g = VelocityGrid::new(1.0, 4).unwrap();
        let ones = vec![1.0; g.node_count()];
        assert_eq!(integrate_v(&g, &ones), 8.0);
    }

    #[test]
    fn integrate_maxwellian_mass() {
        let g = VelocityGrid::new(6.0, 16).unwrap();
        let f = g.sample(|v| maxwellian(v, 1.0, [0.0; 3], 1.0));
        assert!((integrate_v(&g, &f) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn integrate_odd_function_vanishes() {
        let g = VelocityGrid::new(6.0, 16).unwrap();
        let f = g.sample(|v| v[0] * maxwellian(v, 1.0, [0.0; 3], 1.0));
        assert!(integrate_v(&g, &f).abs() < 1e-12);
    }

    #[test]
    fn quadrature_exact_on_multilinear() {
        let g = VelocityGrid::new(2.0, 6).unwrap();
        let f = g.sample(|v| 2.0 + 3.0 * v[0] - v[1] + 0.5 * v[0] * v[1] * v[2]);
        let exact = 2.0 * 64.0; // odd terms integrate to zero over the box
        assert!((integrate_v(&g, &f) - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn integrate_symmetric_under_reflection() {
        let g = VelocityGrid::new(3.0, 8).unwrap();
        let mut rng = SplitMix64::new(7);
        let f: Vec<f64> = (0..g.node_count()).map(|_| rng.range(0.1, 2.0)).collect();
        let reflected: Vec<f64> = (0..g.node_count()).map(|i| f[g.reflect_index(i)]).collect();
        let a = integrate_v(&g, &f);
        let b = integrate_v(&g, &reflected);
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn gradient_exact_on_linear() {
        let g = VelocityGrid::new(6.0, 16).unwrap();
        let f = g.sample(|v| v[1]);
        let d = grad_v(&g, &f);
        for i in 0..g.node_count() {
            assert!((d[1][i] - 1.0).abs() < 1e-13);
            assert!(d[0][i].abs() < 1e-13);
            assert!(d[2][i].abs() < 1e-13);
        }
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = VelocityGrid::new(2.0, 8).unwrap();
        let f = vec![3.25; g.node_count()];
        let d = grad_v(&g, &f);
        for ax in 0..3 {
            assert!(d[ax].iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn maxwellian_gradient_identity_refines_quadratically() {
        // grad M = -v M analytically; the residual of the discrete gradient
        // should shrink ~4x when h halves (checked on the bulk).
        let err = |n: usize| {
            let g = VelocityGrid::new(6.0, n).unwrap();
            let f = g.sample(|v| maxwellian(v, 1.0, [0.0; 3], 1.0));
            let d = grad_v(&g, &f);
            let mut sup = 0.0f64;
            for i in 0..g.node_count() {
                let v = g.node(i);
                if v.iter().any(|c| c.abs() > 3.0) {
                    continue;
                }
                for ax in 0..3 {
                    sup = sup.max((d[ax][i] + v[ax] * f[i]).abs());
                }
            }
            sup
        };
        let e32 = err(32);
        let e64 = err(64);
        let ratio = e32 / e64;
        assert!(
            (3.2..5.0).contains(&ratio),
            "expected ~4x error reduction, got {ratio} ({e32} -> {e64})"
        );
    }

    #[test]
    fn torus_partial_of_constant_is_zero() {
        let g = TorusGrid::new(8).unwrap();
        let s = ScalarField::constant(g, 4.7);
        let d = torus_partial(&s, 0);
        assert!(d.sup_norm() < 1e-14);
    }

    #[test]
    fn torus_partial_single_mode() {
        let g = TorusGrid::new(8).unwrap();
        let s = g.sample(|x| (2.0 * PI * x[0]).sin());
        let d = torus_partial(&s, 0);
        for i in 0..g.node_count() {
            let x = g.node(i);
            let exact = 2.0 * PI * (2.0 * PI * x[0]).cos();
            assert!((d.values()[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_partial_product_modes() {
        let g = TorusGrid::new(16).unwrap();
        let s = g.sample(|x| (2.0 * PI * x[0]).sin() * (2.0 * PI * 2.0 * x[1]).cos());
        let d = torus_partial(&s, 1);
        for i in 0..g.node_count() {
            let x = g.node(i);
            let exact =
                -(2.0 * PI * 2.0) * (2.0 * PI * x[0]).sin() * (2.0 * PI * 2.0 * x[1]).sin();
            assert!((d.values()[i] - exact).abs() < 1e-10);
        }
    }

    fn random_band_limited(g: TorusGrid, rng: &mut SplitMix64, kmax: i64) -> ScalarField {
        let mut modes = Vec::new();
        for k0 in -kmax..=kmax {
            for k1 in -kmax..=kmax {
                for k2 in -kmax..=kmax {
                    modes.push(([k0, k1, k2], rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)));
                }
            }
        }
        g.sample(|x| {
            modes
                .iter()
                .map(|([k0, k1, k2], a, b)| {
                    let ph = 2.0 * PI * (*k0 as f64 * x[0] + *k1 as f64 * x[1] + *k2 as f64 * x[2]);
                    a * ph.cos() + b * ph.sin()
                })
                .sum()
        })
    }

    #[test]
    fn torus_partials_commute() {
        let g = TorusGrid::new(8).unwrap();
        let mut rng = SplitMix64::new(3);
        let s = random_band_limited(g, &mut rng, 2);
        let d12 = torus_partial(&torus_partial(&s, 0), 1);
        let d21 = torus_partial(&torus_partial(&s, 1), 0);
        for (a, b) in d12.values().iter().zip(d21.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn torus_partial_is_linear() {
        let g = TorusGrid::new(8).unwrap();
        let mut rng = SplitMix64::new(11);
        let s = random_band_limited(g, &mut rng, 2);
        let t = random_band_limited(g, &mut rng, 2);
        let (alpha, beta) = (1.7, -0.3);
        let combo = ScalarField::from_values(
            g,
            s.values()
                .iter()
                .zip(t.values())
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
        .unwrap();
        let lhs = torus_partial(&combo, 2);
        let ds = torus_partial(&s, 2);
        let dt = torus_partial(&t, 2);
        for i in 0..g.node_count() {
            let rhs = alpha * ds.values()[i] + beta * dt.values()[i];
            assert!((lhs.values()[i] - rhs).abs() < 1e-11);
        }
    }

    #[test]
    fn torus_mean_basics() {
        let g = TorusGrid::new(8).unwrap();
        assert_eq!(torus_mean(&ScalarField::constant(g, 2.5)), 2.5);
        let s = g.sample(|x| (2.0 * PI * x[1]).sin());
        assert!(torus_mean(&s).abs() < 1e-14);
    }

    #[test]
    fn derivative_kills_the_mean() {
        let g = TorusGrid::new(8).unwrap();
        let mut rng = SplitMix64::new(5);
        let s = random_band_limited(g, &mut rng, 3);
        for axis in 0..3 {
            assert!(torus_mean(&torus_partial(&s, axis)).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_csv_round_trip() {
        let g = TorusGrid::new(4).unwrap();
        let mut rng = SplitMix64::new(9);
        let s = g.sample(|_| rng.range(-5.0, 5.0));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2,x3,value\n"));
        let back = ScalarField::read_csv(g, &buf[..]).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn vec_csv_round_trip() {
        let g = TorusGrid::new(4).unwrap();
        let mut rng = SplitMix64::new(10);
        let v = g.sample_vec(|_| [rng.range(-1.0, 1.0), rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)]);
        let mut buf = Vec::new();
        v.write_csv(&mut buf).unwrap();
        let back = VecField::read_csv(g, &buf[..]).unwrap();
        assert_eq!(v, back);
    }
}
