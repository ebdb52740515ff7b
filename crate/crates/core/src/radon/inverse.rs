use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::TomogramSet;
use crate::error::{Error, Result};
use crate::numerics::Axis;
use crate::wigner::WignerMap;

/// Fewer angles than this are rejected.
pub const MIN_ANGLES: usize = 8;
/// Below this many angles the reconstruction is flagged as under-sampled.
pub const RECOMMENDED_ANGLES: usize = 64;

/// Knobs of the filtered back-projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbpOptions {
    /// Fraction of the Nyquist frequency where the raised-cosine taper of the ramp begins.
    pub taper_start: f64,
    /// Sub-sample refinement of each filtered projection before linear interpolation.
    pub upsample: usize,
    /// Zero-padding factor of the filtering FFT.
    pub padding: usize,
    /// Multiplies the reconstruction constant; 1 is the correct value.
    pub constant_scale: f64,
}

impl Default for FbpOptions {
    fn default() -> Self {
        Self {
            taper_start: 0.8,
            upsample: 8,
            padding: 4,
            constant_scale: 1.0,
        }
    }
}

/// Ramp-filtered projection sampled at `t = X_0 + (l_0 + i/U) dX`.
struct Filtered {
    origin: f64,
    step: f64,
    values: Vec<f64>,
}

impl Filtered {
    #[inline]
    fn at(&self, t: f64) -> f64 {
        let f = (t - self.origin) / self.step;
        if !(f >= 0.0) {
            return 0.0;
        }
        let i = f.floor() as usize;
        if i + 1 >= self.values.len() {
            return 0.0;
        }
        let a = f - i as f64;
        (1.0 - a) * self.values[i] + a * self.values[i + 1]
    }
}

fn taper(frac: f64, start: f64) -> f64 {
    if frac <= start {
        1.0
    } else if frac >= 1.0 {
        0.0
    } else {
        0.5 * (1.0 + (PI * (frac - start) / (1.0 - start)).cos())
    }
}

/// `Q(t) = (2πħ)⁻¹ ∫ |r| w(r) R̃(r) exp(−irt/ħ) dr` with `R̃(r) = ∫ R(X) exp(irX/ħ) dX`.
fn filter_projection(values: &[f64], axis: Axis, hbar: f64, opts: &FbpOptions, planner: &mut FftPlanner<f64>) -> Filtered {
    let n = values.len();
    let m = opts.padding.max(2) * n;
    let up = opts.upsample.max(1);
    let dx = axis.step;

    let mut spectrum: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    spectrum.resize(m, Complex64::new(0.0, 0.0));
    planner.plan_fft_inverse(m).process(&mut spectrum);

    let freqs: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let signed = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
            let r = 2.0 * PI * hbar * signed / (m as f64 * dx);
            let weight = r.abs() * taper(signed.abs() / (m / 2) as f64, opts.taper_start);
            (r, weight)
        })
        .collect();

    // Circular convolution is exact for t between X_0 - (m/2 - n) dX and X_0 + (m/2) dX.
    let before = m / 2 - n;
    let after = m / 2;
    let span = before + after;
    let mut out = vec![0.0; span * up];
    let fft = planner.plan_fft_forward(m);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for u in 0..up {
        let delta = u as f64 * dx / up as f64;
        for (b, (s, (r, w))) in buf.iter_mut().zip(spectrum.iter().zip(&freqs)) {
            *b = s * Complex64::from_polar(*w, -r * delta / hbar);
        }
        fft.process(&mut buf);
        for l in 0..span {
            let idx = (l + m - before) % m;
            out[l * up + u] = buf[idx].re / m as f64;
        }
    }
    Filtered {
        origin: axis.start - before as f64 * dx,
        step: dx / up as f64,
        values: out,
    }
}

/// Filtered back-projection `W(x,p) = (2πħ)⁻¹ ∫₀^π Q_θ(x cos θ + p sin θ) dθ` with the default
/// options.
pub fn inverse_radon(set: &TomogramSet, x_axis: Axis, p_axis: Axis) -> Result<WignerMap> {
    inverse_radon_with(set, x_axis, p_axis, &FbpOptions::default())
}

pub fn inverse_radon_with(set: &TomogramSet, x_axis: Axis, p_axis: Axis, opts: &FbpOptions) -> Result<WignerMap> {
    let count = set.len();
    if count < MIN_ANGLES {
        return Err(Error::Domain(format!(
            "inversion needs at least {MIN_ANGLES} angles (got {count})"
        )));
    }
    let axis = set.axis();
    if axis.step <= 0.0 || axis.len < 4 {
        return Err(Error::Config("tomogram axis must be increasing with at least 4 points".into()));
    }
    let hbar = set.hbar();

    let filtered: Vec<(f64, f64, Filtered)> = set
        .tomograms()
        .par_iter()
        .map_init(FftPlanner::new, |planner, t| {
            let theta = t.params().theta();
            (theta.cos(), theta.sin(), filter_projection(t.values(), axis, hbar, opts, planner))
        })
        .collect();

    let weight = opts.constant_scale * (PI / count as f64) / (2.0 * PI * hbar);
    let mut values = vec![0.0; x_axis.len * p_axis.len];
    values.par_chunks_mut(p_axis.len).enumerate().for_each(|(i, row)| {
        let x = x_axis.point(i);
        for (c, s, q) in &filtered {
            let t0 = x * c + p_axis.start * s;
            let dt = p_axis.step * s;
            for (j, w) in row.iter_mut().enumerate() {
                *w += q.at(t0 + j as f64 * dt);
            }
        }
        row.iter_mut().for_each(|w| *w *= weight);
    });

    let edge = set.tomograms().iter().any(|t| {
        let v = t.values();
        let peak = v.iter().fold(0.0f64, |m, a| m.max(*a));
        let k = v.len().min(4);
        v[..k].iter().chain(&v[v.len() - k..]).any(|a| *a > 1e-10 * peak)
    });
    Ok(WignerMap::new(x_axis, p_axis, hbar, values)?.with_flags(0.0, edge || count < RECOMMENDED_ANGLES))
}
