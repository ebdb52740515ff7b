//! Quadratic-phase sums on affine grids, evaluated with the chirp-z (Bluestein) factorization.
//!
//! For an input axis `t_k = t0 + k dt` and an output axis `s_j = s0 + j ds` the plan computes
//!
//! ```text
//! G_j = Σ_k f_k exp(i α t_k s_j)
//! ```
//!
//! in `O((N + M) log(N + M))`. Writing `α t_k s_j` out and using `jk = (j² + k² − (j−k)²)/2`
//! turns the sum into chirp · linear convolution · chirp, and the convolution runs through FFTs.
//! This single primitive realizes the continuum ħ-Fourier transform at arbitrary uniform output
//! points, band-limited interpolation, and the Wigner autocorrelation transform.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Axis;

pub struct ChirpZ {
    n_in: usize,
    n_out: usize,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

#[inline]
fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

impl ChirpZ {
    pub fn new(input: Axis, output: Axis, alpha: f64) -> Self {
        let n_in = input.len;
        let n_out = output.len;
        let m = (n_in + n_out - 1).next_power_of_two();
        let beta = alpha * input.step * output.step;

        let pre = (0..n_in)
            .map(|k| {
                let kf = k as f64;
                cis(alpha * input.step * output.start * kf + 0.5 * beta * kf * kf)
            })
            .collect();
        let post = (0..n_out)
            .map(|j| {
                let jf = j as f64;
                cis(alpha * input.start * output.start
                    + alpha * input.start * output.step * jf
                    + 0.5 * beta * jf * jf)
            })
            .collect();

        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(m);
        let ifft = planner.plan_fft_inverse(m);

        // h_d = exp(-i β d² / 2) for d in [-(n_in - 1), n_out - 1], stored circularly.
        let mut kernel_hat = vec![Complex64::new(0.0, 0.0); m];
        for d in 0..n_out {
            let df = d as f64;
            kernel_hat[d] = cis(-0.5 * beta * df * df);
        }
        for d in 1..n_in {
            let df = d as f64;
            kernel_hat[m - d] = cis(-0.5 * beta * df * df);
        }
        fft.process(&mut kernel_hat);
        let inv_m = 1.0 / m as f64;
        for v in kernel_hat.iter_mut() {
            *v *= inv_m;
        }

        Self {
            n_in,
            n_out,
            pre,
            post,
            kernel_hat,
            fft,
            ifft,
        }
    }

    pub fn input_len(&self) -> usize {
        self.n_in
    }

    pub fn output_len(&self) -> usize {
        self.n_out
    }

    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_out];
        let mut buf = Vec::new();
        self.apply_into(f, &mut out, &mut buf);
        out
    }

    /// Like [`apply`](Self::apply) but reuses `buf` as FFT workspace.
    pub fn apply_into(&self, f: &[Complex64], out: &mut [Complex64], buf: &mut Vec<Complex64>) {
        assert_eq!(f.len(), self.n_in, "chirp-z input length");
        assert_eq!(out.len(), self.n_out, "chirp-z output length");
        let m = self.kernel_hat.len();
        buf.clear();
        buf.extend(f.iter().zip(&self.pre).map(|(a, b)| a * b));
        buf.resize(m, Complex64::new(0.0, 0.0));
        self.fft.process(buf);
        for (a, h) in buf.iter_mut().zip(&self.kernel_hat) {
            *a *= h;
        }
        self.ifft.process(buf);
        for (j, o) in out.iter_mut().enumerate() {
            *o = buf[j] * self.post[j];
        }
    }
}
