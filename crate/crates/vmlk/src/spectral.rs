//! Pencil FFT machinery for periodic torus fields.
//!
//! Fields are real, stored row-major with x1 slowest. Derivative multipliers
//! use integer wavenumbers k in {-M/2+1, .., M/2} scaled by 2*pi; the Nyquist
//! mode (k = M/2 for even M) gets a zero derivative so that derivatives of
//! real fields stay real.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub(crate) struct TorusFft {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl TorusFft {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Integer wavenumber of mode index j.
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j <= self.m / 2 {
            j as i64
        } else {
            j as i64 - self.m as i64
        }
    }

    pub fn is_nyquist(&self, j: usize) -> bool {
        self.m % 2 == 0 && j == self.m / 2
    }

    fn apply_along_axis(&self, data: &mut [Complex64], axis: usize, plan: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        debug_assert_eq!(data.len(), m * m * m);
        let stride = match axis {
            0 => m * m,
            1 => m,
            _ => 1,
        };
        let mut pencil = vec![Complex64::default(); m];
        for a in 0..m {
            for b in 0..m {
                let base = match axis {
                    0 => a * m + b,
                    1 => a * m * m + b,
                    _ => (a * m + b) * m,
                };
                for (i, p) in pencil.iter_mut().enumerate() {
                    *p = data[base + i * stride];
                }
                plan.process(&mut pencil);
                for (i, p) in pencil.iter().enumerate() {
                    data[base + i * stride] = *p;
                }
            }
        }
    }

    /// Forward 3D transform of a real field (unnormalized).
    pub fn forward3(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for axis in 0..3 {
            self.apply_along_axis(&mut data, axis, &self.forward);
        }
        data
    }

    /// Inverse 3D transform, normalized, real part.
    pub fn inverse3_real(&self, mut data: Vec<Complex64>) -> Vec<f64> {
        for axis in 0..3 {
            self.apply_along_axis(&mut data, axis, &self.inverse);
        }
        let scale = 1.0 / (self.m * self.m * self.m) as f64;
        data.iter().map(|c| c.re * scale).collect()
    }

    /// In-place 3D transforms on an existing complex buffer.
    pub fn forward3_inplace(&self, data: &mut [Complex64]) {
        for axis in 0..3 {
            self.apply_along_axis(data, axis, &self.forward);
        }
    }

    pub fn inverse3_inplace_normalized(&self, data: &mut [Complex64]) {
        for axis in 0..3 {
            self.apply_along_axis(data, axis, &self.inverse);
        }
        let scale = 1.0 / (self.m * self.m * self.m) as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }

    /// Spectral partial derivative along one axis of a real field.
    pub fn partial(&self, values: &[f64], axis: usize) -> Vec<f64> {
        let m = self.m;
        let mut data = self.forward3(values);
        let two_pi = 2.0 * std::f64::consts::PI;
        for i0 in 0..m {
            for i1 in 0..m {
                for i2 in 0..m {
                    let j = [i0, i1, i2][axis];
                    let idx = (i0 * m + i1) * m + i2;
                    if self.is_nyquist(j) {
                        data[idx] = Complex64::new(0.0, 0.0);
                    } else {
                        let k = self.wavenumber(j) as f64;
                        data[idx] *= Complex64::new(0.0, two_pi * k);
                    }
                }
            }
        }
        self.inverse3_real(data)
    }
}

/// Flat index decomposition helpers for M^3 cubes.
#[inline]
pub(crate) fn decompose(idx: usize, m: usize) -> [usize; 3] {
    [idx / (m * m), (idx / m) % m, idx % m]
}
