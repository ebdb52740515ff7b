//! Wigner distribution of a sampled pure state and its marginals.
//!
//! With the substitution `y = 2u` the defining integral becomes
//! `W(x,p) = (πħ)^{-1} ∫ exp(-2ipu/ħ) ψ(x+u) conj(ψ(x-u)) du`, so for a grid point `x_k` the
//! autocorrelation only needs samples `ψ_{k±m}` that already sit on the grid. Each row is one
//! chirp-z transform evaluated on the requested momentum axis.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{f64_block, fmt_f64, read_f64_block, write_atomic};
use crate::numerics::{hbar_fourier_at, Axis, ChirpZ, Direction, SampledWavefunction};

/// Samples of `W(x,p)` on a rectangular grid, stored row-major with one row per `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMap {
    x_axis: Axis,
    p_axis: Axis,
    hbar: f64,
    values: Vec<f64>,
    imag_residue: f64,
    edge_warning: bool,
}

/// JSON header written next to the binary block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WignerHeader {
    pub hbar: f64,
    pub x_axis: Axis,
    pub p_axis: Axis,
    /// Always `"row-major-f64le"`.
    pub layout: String,
    pub data_file: String,
    pub imag_residue: f64,
    pub edge_warning: bool,
}

const LAYOUT: &str = "row-major-f64le";

/// Relative edge amplitude above which a state counts as truncated by its grid.
pub const EDGE_DECAY: f64 = 1e-12;

impl WignerMap {
    pub fn new(x_axis: Axis, p_axis: Axis, hbar: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != x_axis.len * p_axis.len {
            return Err(Error::Shape(format!(
                "{} values for a {}x{} map",
                values.len(),
                x_axis.len,
                p_axis.len
            )));
        }
        if !(hbar > 0.0) {
            return Err(Error::Config(format!("hbar must be positive (got {hbar})")));
        }
        Ok(Self {
            x_axis,
            p_axis,
            hbar,
            values,
            imag_residue: 0.0,
            edge_warning: false,
        })
    }

    /// Tabulates a closed-form `f(x, p)`.
    pub fn from_fn(x_axis: Axis, p_axis: Axis, hbar: f64, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let mut values = vec![0.0; x_axis.len * p_axis.len];
        values
            .par_chunks_mut(p_axis.len)
            .enumerate()
            .for_each(|(i, row)| {
                let x = x_axis.point(i);
                for (j, w) in row.iter_mut().enumerate() {
                    *w = f(x, p_axis.point(j));
                }
            });
        Self {
            x_axis,
            p_axis,
            hbar,
            values,
            imag_residue: 0.0,
            edge_warning: false,
        }
    }

    pub fn x_axis(&self) -> Axis {
        self.x_axis
    }

    pub fn p_axis(&self) -> Axis {
        self.p_axis
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest |Im W| produced by the transform before the real part was kept.
    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    /// Set when the source state had not decayed at the grid edges.
    pub fn edge_warning(&self) -> bool {
        self.edge_warning
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p_axis.len + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.p_axis.len;
        &self.values[i * n..(i + 1) * n]
    }

    /// `dx dp Σ W`.
    pub fn total_mass(&self) -> f64 {
        self.x_axis.step.abs() * self.p_axis.step.abs() * self.values.iter().sum::<f64>()
    }

    /// Bilinear sample at an arbitrary phase-space point; zero outside the tabulated rectangle.
    pub fn bilinear(&self, x: f64, p: f64) -> f64 {
        let fx = (x - self.x_axis.start) / self.x_axis.step;
        let fp = (p - self.p_axis.start) / self.p_axis.step;
        let (nx, np) = (self.x_axis.len, self.p_axis.len);
        if !(fx >= 0.0 && fp >= 0.0) || fx > (nx - 1) as f64 || fp > (np - 1) as f64 {
            return 0.0;
        }
        let i = (fx.floor() as usize).min(nx - 2);
        let j = (fp.floor() as usize).min(np - 2);
        let a = fx - i as f64;
        let b = fp - j as f64;
        let w00 = self.get(i, j);
        let w01 = self.get(i, j + 1);
        let w10 = self.get(i + 1, j);
        let w11 = self.get(i + 1, j + 1);
        (1.0 - a) * ((1.0 - b) * w00 + b * w01) + a * ((1.0 - b) * w10 + b * w11)
    }

    /// Four-point Lagrange (bicubic) sample; neighbours outside the rectangle count as zero and
    /// points outside it return zero.
    pub fn bicubic(&self, x: f64, p: f64) -> f64 {
        let fx = (x - self.x_axis.start) / self.x_axis.step;
        let fp = (p - self.p_axis.start) / self.p_axis.step;
        let (nx, np) = (self.x_axis.len as isize, self.p_axis.len as isize);
        if !(fx >= 0.0 && fp >= 0.0) || fx > (nx - 1) as f64 || fp > (np - 1) as f64 {
            return 0.0;
        }
        let i = fx.floor() as isize;
        let j = fp.floor() as isize;
        let wx = lagrange4(fx - i as f64);
        let wp = lagrange4(fp - j as f64);
        let mut acc = 0.0;
        for (a, wa) in wx.iter().enumerate() {
            let ii = i - 1 + a as isize;
            if ii < 0 || ii >= nx {
                continue;
            }
            let row = self.row(ii as usize);
            let mut inner = 0.0;
            for (b, wb) in wp.iter().enumerate() {
                let jj = j - 1 + b as isize;
                if jj >= 0 && jj < np {
                    inner += wb * row[jj as usize];
                }
            }
            acc += wa * inner;
        }
        acc
    }

    /// L∞ distance to another map on the same axes.
    pub fn linf_distance(&self, other: &WignerMap) -> Result<f64> {
        self.check_same_axes(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn check_same_axes(&self, other: &WignerMap) -> Result<()> {
        if self.x_axis.approx_eq(&other.x_axis, 1e-12) && self.p_axis.approx_eq(&other.p_axis, 1e-12) {
            Ok(())
        } else {
            Err(Error::Shape("Wigner maps are sampled on different grids".into()))
        }
    }

    /// Pointwise affine combination `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &WignerMap, b: f64) -> Result<WignerMap> {
        self.check_same_axes(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(WignerMap {
            values,
            imag_residue: self.imag_residue.max(other.imag_residue),
            edge_warning: self.edge_warning || other.edge_warning,
            ..*self
        })
    }

    pub(crate) fn with_flags(mut self, imag_residue: f64, edge_warning: bool) -> Self {
        self.imag_residue = imag_residue;
        self.edge_warning = edge_warning;
        self
    }

    /// Long-format CSV `x,p,W`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,p,W")?;
        for i in 0..self.x_axis.len {
            let x = fmt_f64(self.x_axis.point(i));
            for j in 0..self.p_axis.len {
                writeln!(w, "{},{},{}", x, fmt_f64(self.p_axis.point(j)), fmt_f64(self.get(i, j)))?;
            }
        }
        Ok(())
    }

    pub fn header(&self, data_file: &str) -> WignerHeader {
        WignerHeader {
            hbar: self.hbar,
            x_axis: self.x_axis,
            p_axis: self.p_axis,
            layout: LAYOUT.to_string(),
            data_file: data_file.to_string(),
            imag_residue: self.imag_residue,
            edge_warning: self.edge_warning,
        }
    }

    pub fn to_binary(&self) -> Vec<u8> {
        f64_block(&self.values)
    }

    pub fn from_header_and_block(header: &WignerHeader, block: &[u8]) -> Result<Self> {
        if header.layout != LAYOUT {
            return Err(Error::Format(format!("unknown layout {:?}", header.layout)));
        }
        let values = read_f64_block(block)?;
        let map = WignerMap::new(header.x_axis, header.p_axis, header.hbar, values)
            .map_err(|e| Error::Format(e.to_string()))?;
        Ok(map.with_flags(header.imag_residue, header.edge_warning))
    }

    /// Writes `<stem>.json` and `<stem>.f64` into `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        let data_file = format!("{stem}.f64");
        write_atomic(&dir.join(&data_file), &self.to_binary())?;
        let header = serde_json::to_string_pretty(&self.header(&data_file))?;
        write_atomic(&dir.join(format!("{stem}.json")), header.as_bytes())
    }

    /// Loads a map from its JSON header; the binary block is resolved relative to the header.
    pub fn load(header_path: &Path) -> Result<Self> {
        let header: WignerHeader = serde_json::from_str(&std::fs::read_to_string(header_path)?)
            .map_err(|e| Error::Format(format!("{}: {e}", header_path.display())))?;
        let dir = header_path.parent().unwrap_or(Path::new("."));
        let block = std::fs::read(dir.join(&header.data_file))?;
        Self::from_header_and_block(&header, &block)
    }
}

/// Wigner transform on the momentum axis that coincides with the position axis.
/// Weights of the cubic through nodes `-1, 0, 1, 2` evaluated at `t ∈ [0, 1)`.
fn lagrange4(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

pub fn wigner_transform(psi: &SampledWavefunction) -> WignerMap {
    wigner_transform_on(psi, psi.grid().axis())
}

/// Wigner transform evaluated on an arbitrary uniform momentum axis.
pub fn wigner_transform_on(psi: &SampledWavefunction, p_axis: Axis) -> WignerMap {
    let grid = *psi.grid();
    let n = grid.n_points();
    let dx = grid.dx();
    let hbar = grid.hbar();
    let half = n / 2;
    let lag_axis = Axis {
        start: -(half as f64) * dx,
        step: dx,
        len: n,
    };
    let plan = ChirpZ::new(lag_axis, p_axis, -2.0 / hbar);
    let prefactor = dx / (PI * hbar);
    let psi_v = psi.values();
    let zero = Complex64::new(0.0, 0.0);

    let mut values = vec![0.0; n * p_axis.len];
    let imag_residue = values
        .par_chunks_mut(p_axis.len)
        .enumerate()
        .map_init(
            || (vec![zero; n], vec![zero; p_axis.len], Vec::new()),
            |(corr, out, buf), (k, row)| {
                // Symmetric lag window keeps the autocorrelation Hermitian, so W is real.
                let reach = k.min(n - 1 - k).min(half - 1);
                corr.iter_mut().for_each(|c| *c = zero);
                for m in 0..=reach {
                    let c = psi_v[k + m] * psi_v[k - m].conj();
                    corr[half + m] = c;
                    corr[half - m] = c.conj();
                }
                plan.apply_into(corr, out, buf);
                let mut residue: f64 = 0.0;
                for (w, v) in row.iter_mut().zip(out.iter()) {
                    *w = prefactor * v.re;
                    residue = residue.max((prefactor * v.im).abs());
                }
                residue
            },
        )
        .reduce(|| 0.0, f64::max);

    WignerMap {
        x_axis: grid.axis(),
        p_axis,
        hbar,
        values,
        imag_residue,
        edge_warning: psi.edge_amplitude() > EDGE_DECAY,
    }
}

/// Position density `∫ W dp` and momentum density `∫ W dx` by Riemann sums over the map.
pub fn marginals(w: &WignerMap) -> (Vec<f64>, Vec<f64>) {
    let dp = w.p_axis.step.abs();
    let dx = w.x_axis.step.abs();
    let position = (0..w.x_axis.len)
        .map(|i| w.row(i).iter().sum::<f64>() * dp)
        .collect();
    let mut momentum = vec![0.0; w.p_axis.len];
    for i in 0..w.x_axis.len {
        for (m, v) in momentum.iter_mut().zip(w.row(i)) {
            *m += v;
        }
    }
    for m in momentum.iter_mut() {
        *m *= dx;
    }
    (position, momentum)
}

/// `|ψ̂(p)|²` on the map's momentum axis, for comparison with [`marginals`].
pub fn momentum_density(psi: &SampledWavefunction, p_axis: Axis) -> Vec<f64> {
    hbar_fourier_at(psi, Direction::Forward, p_axis)
        .iter()
        .map(|v| v.norm_sqr())
        .collect()
}
