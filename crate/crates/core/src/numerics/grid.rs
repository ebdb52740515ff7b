use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{fmt_f64, parse_csv_row};

/// A uniform set of sample points `start + k * step`, `k = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step.is_finite() && step != 0.0) || !start.is_finite() {
            return Err(Error::Config(format!(
                "axis needs a finite non-zero step and finite start (start={start}, step={step})"
            )));
        }
        if len == 0 {
            return Err(Error::Config("axis must contain at least one point".into()));
        }
        Ok(Self { start, step, len })
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.point(k)).collect()
    }

    pub fn last(&self) -> f64 {
        self.point(self.len - 1)
    }

    /// The axis with every point multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Axis {
        Axis {
            start: self.start * s,
            step: self.step * s,
            len: self.len,
        }
    }

    /// Equality up to a relative tolerance on start and step.
    pub fn approx_eq(&self, other: &Axis, rel: f64) -> bool {
        let scale = self.step.abs().max(other.step.abs());
        self.len == other.len
            && (self.start - other.start).abs() <= rel * scale * self.len as f64
            && (self.step - other.step).abs() <= rel * scale
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GridHeader {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    hbar: f64,
}

/// Uniform position grid `x_k = x_min + k dx`, `dx = (x_max - x_min) / n_points`, carrying ħ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridHeader", into = "GridHeader")]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    hbar: f64,
}

impl TryFrom<GridHeader> for Grid1D {
    type Error = Error;
    fn try_from(h: GridHeader) -> Result<Self> {
        make_grid(h.x_min, h.x_max, h.n_points, h.hbar)
    }
}

impl From<Grid1D> for GridHeader {
    fn from(g: Grid1D) -> Self {
        GridHeader {
            x_min: g.x_min,
            x_max: g.x_max,
            n_points: g.n_points,
            hbar: g.hbar,
        }
    }
}

/// Builds a validated grid. `n_points` must be a power of two no smaller than 8.
pub fn make_grid(x_min: f64, x_max: f64, n_points: usize, hbar: f64) -> Result<Grid1D> {
    if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
        return Err(Error::Config(format!(
            "grid bounds must satisfy x_max > x_min (got {x_min}, {x_max})"
        )));
    }
    if n_points < 8 || !n_points.is_power_of_two() {
        return Err(Error::Config(format!(
            "n_points must be a power of two >= 8 (got {n_points})"
        )));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::Config(format!("hbar must be positive (got {hbar})")));
    }
    Ok(Grid1D {
        x_min,
        x_max,
        n_points,
        hbar,
    })
}

impl Grid1D {
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    /// Spacing of the FFT-dual momentum grid, `2πħ / (N dx)`.
    pub fn dual_dp(&self) -> f64 {
        2.0 * PI * self.hbar / (self.n_points as f64 * self.dx())
    }

    /// The FFT-dual momentum grid, monotone and centred on zero: `p_j = (j - N/2) dp`.
    pub fn momentum_grid(&self) -> Axis {
        let dp = self.dual_dp();
        Axis {
            start: -(self.n_points as f64 / 2.0) * dp,
            step: dp,
            len: self.n_points,
        }
    }

    /// The position samples as an [`Axis`].
    pub fn axis(&self) -> Axis {
        Axis {
            start: self.x_min,
            step: self.dx(),
            len: self.n_points,
        }
    }

    pub fn point(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        self.axis().points()
    }

    /// Same sampling with a different ħ.
    pub fn with_hbar(&self, hbar: f64) -> Result<Grid1D> {
        make_grid(self.x_min, self.x_max, self.n_points, hbar)
    }

    /// True when `x_{N/2} = 0`, so that `x_{N-k} = -x_k` and parity is an index reversal.
    pub fn is_symmetric(&self) -> bool {
        let centre = self.point(self.n_points / 2);
        centre.abs() <= 1e-12 * self.dx()
    }
}

/// Complex samples of a wavefunction on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWavefunction {
    grid: Grid1D,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct WavefunctionFile {
    grid: Grid1D,
    /// Interleaved real and imaginary parts.
    values: Vec<f64>,
}

impl SampledWavefunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::Shape(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain("wavefunction samples must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub(crate) fn from_parts(grid: Grid1D, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn hbar(&self) -> f64 {
        self.grid.hbar()
    }

    /// `dx Σ |ψ_k|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Domain("cannot normalize a zero wavefunction".into()));
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v / n).collect(),
        })
    }

    /// Largest modulus among the four outermost samples on each side, relative to the peak.
    pub fn edge_amplitude(&self) -> f64 {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.values.len();
        let w = 4.min(n / 2);
        let edge = self.values[..w]
            .iter()
            .chain(&self.values[n - w..])
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        edge / peak
    }

    /// `|ψ(x_k)|²`.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `dx Σ conj(a_k) b_k`.
    pub fn inner(&self, other: &SampledWavefunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::Shape("inner product of states on different grids".into()));
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.dx())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = WavefunctionFile {
            grid: self.grid,
            values: self.values.iter().flat_map(|v| [v.re, v.im]).collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WavefunctionFile = serde_json::from_str(text)?;
        if file.values.len() != 2 * file.grid.n_points() {
            return Err(Error::Format(format!(
                "expected {} interleaved values, found {}",
                2 * file.grid.n_points(),
                file.values.len()
            )));
        }
        let values = file
            .values
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        Self::new(file.grid, values)
    }

    /// CSV with columns `x,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,re,im")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                fmt_f64(self.grid.point(k)),
                fmt_f64(v.re),
                fmt_f64(v.im)
            )?;
        }
        Ok(())
    }

    /// Reads the `x,re,im` CSV; the grid is recovered from the first two abscissae.
    pub fn read_csv<R: BufRead>(r: R, hbar: f64) -> Result<Self> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let row = parse_csv_row(&line, 3, i + 1)?;
            xs.push(row[0]);
            values.push(Complex64::new(row[1], row[2]));
        }
        if xs.len() < 2 {
            return Err(Error::Format("wavefunction CSV has fewer than two rows".into()));
        }
        let dx = xs[1] - xs[0];
        let grid = make_grid(xs[0], xs[0] + dx * xs.len() as f64, xs.len(), hbar)?;
        Self::new(grid, values)
    }
}
