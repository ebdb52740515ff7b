use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::Args;
use symtomo::gaussian::{gaussian_wavefunction, GaussianState};
use symtomo::numerics::{make_grid, Grid1D, SampledWavefunction};
use symtomo::{Error, Result};

/// What the `--state` flag names.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// `gaussian:σxx,σxp` or `gaussian:σxx,σxp,σpp`.
    Gaussian {
        sigma_xx: f64,
        sigma_xp: f64,
        sigma_pp: Option<f64>,
    },
    File(PathBuf),
}

impl std::str::FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(StateSpec::File(PathBuf::from(path)));
        }
        let Some(params) = s.strip_prefix("gaussian:") else {
            return Err(format!("expected gaussian:SXX,SXP or file:PATH, got {s:?}"));
        };
        let nums = params
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        match nums[..] {
            [sigma_xx, sigma_xp] => Ok(StateSpec::Gaussian {
                sigma_xx,
                sigma_xp,
                sigma_pp: None,
            }),
            [sigma_xx, sigma_xp, sigma_pp] => Ok(StateSpec::Gaussian {
                sigma_xx,
                sigma_xp,
                sigma_pp: Some(sigma_pp),
            }),
            _ => Err(format!("gaussian state takes 2 or 3 numbers, got {}", nums.len())),
        }
    }
}

/// `MIN:MAX:N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected MIN:MAX:N, got {s:?}"));
        };
        Ok(GridSpec {
            x_min: a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?,
            x_max: b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?,
            n_points: n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Reduced Planck constant.
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Position grid as MIN:MAX:N (N a power of two, at least 8).
    #[arg(long, default_value = "-16:16:1024", allow_hyphen_values = true)]
    pub grid: GridSpec,
    /// gaussian:SXX,SXP[,SPP] or file:PATH (.json wavefunction, or .csv with columns x,re,im).
    #[arg(long)]
    pub state: StateSpec,
}

impl StateArgs {
    pub fn grid(&self) -> Result<Grid1D> {
        make_grid(self.grid.x_min, self.grid.x_max, self.grid.n_points, self.hbar)
    }

    /// The Gaussian named by `--state`; files are rejected.
    pub fn gaussian(&self) -> Result<GaussianState> {
        match self.state {
            StateSpec::Gaussian {
                sigma_xx,
                sigma_xp,
                sigma_pp: None,
            } => GaussianState::pure(sigma_xx, sigma_xp, self.hbar),
            StateSpec::Gaussian {
                sigma_xx,
                sigma_xp,
                sigma_pp: Some(sigma_pp),
            } => GaussianState::new(sigma_xx, sigma_pp, sigma_xp, self.hbar),
            StateSpec::File(_) => Err(Error::Config("this command needs a gaussian:... state".into())),
        }
    }

    /// Samples the state; warns on stderr when it has not decayed at the grid edges.
    pub fn wavefunction(&self) -> Result<SampledWavefunction> {
        let psi = match &self.state {
            StateSpec::File(path) => read_wavefunction(path, self.hbar)?,
            StateSpec::Gaussian { .. } => {
                let state = self.gaussian()?;
                let grid = self.grid()?;
                if !state.fits_grid(&grid) {
                    eprintln!("warning: grid spans less than 8 sqrt(sigma_xx); results may be truncated");
                }
                gaussian_wavefunction(&state, grid)?
            }
        };
        if psi.edge_amplitude() > 1e-7 {
            eprintln!(
                "warning: state has relative amplitude {:.1e} at the grid edges",
                psi.edge_amplitude()
            );
        }
        Ok(psi)
    }
}

fn read_wavefunction(path: &Path, hbar: f64) -> Result<SampledWavefunction> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        SampledWavefunction::read_csv(BufReader::new(File::open(path)?), hbar)
    } else {
        SampledWavefunction::from_json(&std::fs::read_to_string(path)?)
    }
}
