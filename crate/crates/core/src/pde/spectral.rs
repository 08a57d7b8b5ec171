//! FFT plumbing: 2D transforms over square grids, spectral derivatives and
//! zero-padded linear convolution.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid1D;

/// Forward and inverse transforms of length `n`, applied along rows and
/// columns of an `n × n` row-major buffer. The inverse is normalized.
pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    transposed: Vec<C64>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            n,
            fwd,
            inv,
            scratch: vec![C64::default(); scratch_len],
            transposed: vec![C64::default(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn transpose_into(n: usize, src: &[C64], dst: &mut [C64]) {
        const BLOCK: usize = 16;
        for ib in (0..n).step_by(BLOCK) {
            for jb in (0..n).step_by(BLOCK) {
                for i in ib..(ib + BLOCK).min(n) {
                    for j in jb..(jb + BLOCK).min(n) {
                        dst[j * n + i] = src[i * n + j];
                    }
                }
            }
        }
    }

    fn apply(&mut self, data: &mut [C64], forward: bool) {
        let n = self.n;
        assert_eq!(data.len(), n * n);
        let plan = if forward { &self.fwd } else { &self.inv };
        plan.process_with_scratch(data, &mut self.scratch);
        Self::transpose_into(n, data, &mut self.transposed);
        plan.process_with_scratch(&mut self.transposed, &mut self.scratch);
        Self::transpose_into(n, &self.transposed, data);
        if !forward {
            let s = 1.0 / (n * n) as f64;
            data.iter_mut().for_each(|z| *z *= s);
        }
    }

    pub fn forward(&mut self, data: &mut [C64]) {
        self.apply(data, true);
    }

    pub fn inverse(&mut self, data: &mut [C64]) {
        self.apply(data, false);
    }

    /// 1D transform of a length-`n` vector.
    pub fn forward_1d(&mut self, data: &mut [C64]) {
        self.fwd.process_with_scratch(data, &mut self.scratch);
    }

    pub fn inverse_1d(&mut self, data: &mut [C64]) {
        self.inv.process_with_scratch(data, &mut self.scratch);
        let s = 1.0 / self.n as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}

/// `∂ψ/∂x₁` and `∂ψ/∂x₂` by spectral differentiation.
pub fn gradient(fft: &mut Fft2, grid: &Grid1D, amps: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let n = grid.n();
    let k = grid.wavenumbers();
    let mut hat = amps.to_vec();
    fft.forward(&mut hat);
    let mut d1 = hat.clone();
    let mut d2 = hat;
    for a in 0..n {
        for b in 0..n {
            // The Nyquist mode has no well-defined derivative on a real grid.
            let k1 = if a == n / 2 { 0.0 } else { k[a] };
            let k2 = if b == n / 2 { 0.0 } else { k[b] };
            d1[a * n + b] *= C64::new(0.0, k1);
            d2[a * n + b] *= C64::new(0.0, k2);
        }
    }
    fft.inverse(&mut d1);
    fft.inverse(&mut d2);
    (d1, d2)
}

/// Linear (non-periodic) convolution `(ρ ⋆ K)(xᵢ) = Σⱼ ρⱼ K(xᵢ − xⱼ) dx`
/// of a grid function with an even kernel, via a zero-padded FFT of
/// length `2n`.
pub struct KernelConvolution {
    n: usize,
    dx: f64,
    kernel_hat: Vec<C64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl KernelConvolution {
    pub fn new(grid: &Grid1D, kernel: impl Fn(f64) -> f64) -> Self {
        let n = grid.n();
        let dx = grid.dx();
        let m = 2 * n;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let mut kernel_hat = vec![C64::default(); m];
        for j in 0..n {
            kernel_hat[j] = C64::new(kernel(j as f64 * dx), 0.0);
        }
        for j in 1..n {
            kernel_hat[m - j] = C64::new(kernel(-(j as f64) * dx), 0.0);
        }
        fwd.process(&mut kernel_hat);
        Self { n, dx, kernel_hat, fwd, inv }
    }

    pub fn apply(&self, rho: &[f64]) -> Vec<f64> {
        assert_eq!(rho.len(), self.n);
        let m = 2 * self.n;
        let mut buf = vec![C64::default(); m];
        for (b, r) in buf.iter_mut().zip(rho) {
            *b = C64::new(*r, 0.0);
        }
        self.fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inv.process(&mut buf);
        let s = self.dx / m as f64;
        buf[..self.n].iter().map(|z| z.re * s).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fft2_round_trip() {
        let n = 64;
        let mut f = Fft2::new(n);
        let data: Vec<C64> = (0..n * n).map(|i| C64::new((i % 7) as f64, (i % 5) as f64 - 2.0)).collect();
        let mut d = data.clone();
        f.forward(&mut d);
        f.inverse(&mut d);
        for (a, b) in d.iter().zip(&data) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let g = Grid1D::new(128, 10.0).unwrap();
        let mut fft = Fft2::new(128);
        let psi: Vec<C64> = (0..128 * 128)
            .map(|i| {
                let (x1, x2) = (g.x(i / 128), g.x(i % 128));
                C64::new((-(x1 * x1) - 0.5 * x2 * x2).exp(), 0.0)
            })
            .collect();
        let (d1, d2) = gradient(&mut fft, &g, &psi);
        for i in (0..128 * 128).step_by(97) {
            let (x1, x2) = (g.x(i / 128), g.x(i % 128));
            assert_relative_eq!(d1[i].re, -2.0 * x1 * psi[i].re, epsilon = 1e-10);
            assert_relative_eq!(d2[i].re, -x2 * psi[i].re, epsilon = 1e-10);
        }
    }

    #[test]
    fn padded_convolution_matches_direct_sum() {
        let g = Grid1D::new(64, 5.0).unwrap();
        let eps = 0.3;
        let kern = |r: f64| 1.0 / (r * r + eps * eps).sqrt();
        let conv = KernelConvolution::new(&g, kern);
        let rho: Vec<f64> = (0..64).map(|i| ((i * 13) % 9) as f64 * 0.1).collect();
        let fast = conv.apply(&rho);
        for i in 0..64 {
            let direct: f64 = (0..64).map(|j| rho[j] * kern(g.x(i) - g.x(j)) * g.dx()).sum();
            assert_relative_eq!(fast[i], direct, max_relative = 1e-12);
        }
    }
}
