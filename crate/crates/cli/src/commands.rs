use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use symtomo::checks::{run_checks, CheckOptions};
use symtomo::gaussian::{gaussian_wavefunction, pauli_reconstruct, tomogram_moments, CovarianceSign, GaussianState};
use symtomo::io::write_atomic;
use symtomo::numerics::{Axis, SampledWavefunction};
use symtomo::radon::{
    inverse_radon, load_tomograms, radon_chirp_fft, radon_chirp_fft_on, radon_line_integral, radon_metaplectic,
    radon_metaplectic_on, save_tomograms, BlockFormat, Route, Tomogram, TomogramSet, MIN_ANGLES, RECOMMENDED_ANGLES,
};
use symtomo::wigner::{wigner_transform, WignerMap};
use symtomo::{Error, Result};

use crate::config::{GridSpec, StateArgs};

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_atomic(path, format!("{text}\n").as_bytes())
}

/// Writes `<stem>.csv` (long format), `<stem>.json` and `<stem>.f64`.
fn save_map(map: &WignerMap, dir: &Path, stem: &str) -> Result<()> {
    let mut csv = BufWriter::new(Vec::new());
    map.write_csv(&mut csv)?;
    let bytes = csv.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(&dir.join(format!("{stem}.csv")), &bytes)?;
    map.save(dir, stem)
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct WignerSummary {
    files: [String; 3],
    peak: f64,
    peak_x: f64,
    peak_p: f64,
    total_mass: f64,
    imag_residue: f64,
    edge_warning: bool,
}

pub fn wigner(args: &WignerArgs) -> Result<()> {
    let psi = args.state.wavefunction()?;
    ensure_dir(&args.out)?;
    let map = wigner_transform(&psi);
    save_map(&map, &args.out, "wigner")?;
    let (mut best, mut at) = (f64::NEG_INFINITY, (0, 0));
    for i in 0..map.x_axis().len {
        for (j, v) in map.row(i).iter().enumerate() {
            if *v > best {
                best = *v;
                at = (i, j);
            }
        }
    }
    let summary = WignerSummary {
        files: ["wigner.csv".into(), "wigner.json".into(), "wigner.f64".into()],
        peak: best,
        peak_x: map.x_axis().point(at.0),
        peak_p: map.p_axis().point(at.1),
        total_mass: map.total_mass(),
        imag_residue: map.imag_residue(),
        edge_warning: map.edge_warning(),
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Metaplectic,
    ChirpFft,
    LineIntegral,
}

impl RouteArg {
    fn route(self) -> Route {
        match self {
            RouteArg::Metaplectic => Route::Metaplectic,
            RouteArg::ChirpFft => Route::ChirpFft,
            RouteArg::LineIntegral => Route::LineIntegral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    F64le,
}

#[derive(Debug, Args)]
pub struct TomogramArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Position coefficient of the observable mu x + nu p.
    #[arg(long, allow_negative_numbers = true, requires = "nu", conflicts_with = "angles")]
    pub mu: Option<f64>,
    /// Momentum coefficient of the observable mu x + nu p.
    #[arg(long, allow_negative_numbers = true, requires = "mu")]
    pub nu: Option<f64>,
    /// Sweep this many equispaced angles over [0, pi) instead of a single direction.
    #[arg(long)]
    pub angles: Option<usize>,
    #[arg(long, value_enum, default_value_t = RouteArg::Metaplectic)]
    pub route: RouteArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

fn single_tomogram(psi: &SampledWavefunction, mu: f64, nu: f64, route: RouteArg) -> Result<Tomogram> {
    match route {
        RouteArg::Metaplectic => radon_metaplectic(psi, mu, nu),
        RouteArg::ChirpFft => radon_chirp_fft(psi, mu, nu),
        RouteArg::LineIntegral => {
            let lambda = mu.hypot(nu);
            radon_line_integral(&wigner_transform(psi), mu, nu, psi.grid().axis().scaled(lambda))
        }
    }
}

pub fn tomogram(args: &TomogramArgs) -> Result<()> {
    let tomos = match (args.mu, args.nu, args.angles) {
        (Some(mu), Some(nu), None) => {
            if mu == 0.0 && nu == 0.0 {
                return Err(Error::Domain("(mu, nu) = (0, 0) defines no direction".into()));
            }
            if args.route == RouteArg::ChirpFft && nu == 0.0 {
                return Err(Error::Unsupported(
                    "the chirp-fft route needs nu != 0; use --route metaplectic for nu = 0".into(),
                ));
            }
            let psi = args.state.wavefunction()?;
            vec![single_tomogram(&psi, mu, nu, args.route)?]
        }
        (None, None, Some(count)) => {
            let psi = args.state.wavefunction()?;
            TomogramSet::from_state(&psi, count, args.route.route())?.tomograms().to_vec()
        }
        _ => {
            return Err(Error::Config("give either --mu and --nu, or --angles".into()));
        }
    };
    if tomos.iter().any(|t| t.warning()) {
        eprintln!("warning: at least one tomogram carries an accuracy warning");
    }
    ensure_dir(&args.out)?;
    let format = match args.format {
        FormatArg::Csv => BlockFormat::Csv,
        FormatArg::F64le => BlockFormat::F64le,
    };
    let path = save_tomograms(&args.out, "tomogram", &tomos, format)?;
    println!("{}", path.display());
    Ok(())
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Tomogram manifest written by `tomogram --angles`.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Header of a reference Wigner map (as written by `wigner`) to measure the residual against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Output phase-space axis as MIN:MAX:N for both x and p; defaults to the tomogram X axis.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
}

#[derive(Serialize)]
struct InvertReport {
    angles: usize,
    x_axis: Axis,
    p_axis: Axis,
    hbar: f64,
    under_sampled: bool,
    edge_warning: bool,
    reference: Option<String>,
    residual_linf: Option<f64>,
}

pub fn invert(args: &InvertArgs) -> Result<()> {
    let (_, tomos) = load_tomograms(&args.input)?;
    let set = TomogramSet::new(tomos)?;
    if set.len() < MIN_ANGLES {
        return Err(Error::Domain(format!(
            "inversion needs at least {MIN_ANGLES} angles (got {})",
            set.len()
        )));
    }
    if set.len() < RECOMMENDED_ANGLES {
        eprintln!("warning: {} angles is fewer than the recommended {RECOMMENDED_ANGLES}", set.len());
    }
    let axis = match args.grid {
        Some(g) => Axis::new(g.x_min, (g.x_max - g.x_min) / g.n_points as f64, g.n_points)?,
        None => set.axis(),
    };
    let reference = args.reference.as_deref().map(WignerMap::load).transpose()?;
    if let Some(r) = &reference {
        if !r.x_axis().approx_eq(&axis, 1e-12) || !r.p_axis().approx_eq(&axis, 1e-12) {
            return Err(Error::Shape("reference map is sampled on a different grid".into()));
        }
    }
    let map = inverse_radon(&set, axis, axis)?;
    let residual = reference.as_ref().map(|r| map.linf_distance(r)).transpose()?;
    ensure_dir(&args.out)?;
    save_map(&map, &args.out, "reconstruction")?;
    let report = InvertReport {
        angles: set.len(),
        x_axis: axis,
        p_axis: axis,
        hbar: set.hbar(),
        under_sampled: set.len() < RECOMMENDED_ANGLES,
        edge_warning: map.edge_warning(),
        reference: args.reference.as_ref().map(|p| p.display().to_string()),
        residual_linf: residual,
    };
    write_json(&args.out.join("report.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

#[derive(Debug, Args)]
pub struct PauliArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Direction of the extra tomogram.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub nu: f64,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Covariances {
    sigma_xx: f64,
    sigma_pp: f64,
    sigma_xp: f64,
}

impl From<&GaussianState> for Covariances {
    fn from(s: &GaussianState) -> Self {
        Self {
            sigma_xx: s.sigma_xx(),
            sigma_pp: s.sigma_pp(),
            sigma_xp: s.sigma_xp(),
        }
    }
}

#[derive(Serialize)]
struct Ambiguity {
    twin: Covariances,
    /// L∞ distance between the position tomograms of the state and its twin.
    position_tomogram_difference: f64,
    momentum_tomogram_difference: f64,
    /// Variances of the extra tomogram for the state and for its twin.
    extra_variance_state: f64,
    extra_variance_twin: f64,
}

#[derive(Serialize)]
struct Resolution {
    mu: f64,
    nu: f64,
    recovered: Covariances,
    sign: CovarianceSign,
    sign_moot: bool,
    observed_extra_variance: f64,
    predicted_plus: f64,
    predicted_minus: f64,
    sign_margin: f64,
    tolerance: f64,
    margin_over_tolerance: f64,
    errors: Covariances,
}

#[derive(Serialize)]
struct PauliDemoReport {
    hbar: f64,
    input: Covariances,
    ambiguity: Ambiguity,
    resolution: Resolution,
    note: String,
}

pub fn pauli_demo(args: &PauliArgs) -> Result<()> {
    let state = args.state.gaussian()?;
    if args.mu * args.nu == 0.0 {
        return Err(Error::Domain("the extra tomogram needs mu * nu != 0".into()));
    }
    let grid = args.state.grid()?;
    if !state.fits_grid(&grid) {
        eprintln!("warning: grid spans less than 8 sqrt(sigma_xx); results may be truncated");
    }
    let twin = state.twin();
    let psi = gaussian_wavefunction(&state, grid)?;
    let psi_twin = gaussian_wavefunction(&twin, grid)?;
    let axis = grid.axis();
    let tx = radon_metaplectic_on(&psi, 1.0, 0.0, axis)?;
    let tp = radon_chirp_fft_on(&psi, 0.0, 1.0, axis)?;
    let te = radon_chirp_fft_on(&psi, args.mu, args.nu, axis)?;
    let twin_x = radon_metaplectic_on(&psi_twin, 1.0, 0.0, axis)?;
    let twin_p = radon_chirp_fft_on(&psi_twin, 0.0, 1.0, axis)?;
    let twin_e = radon_chirp_fft_on(&psi_twin, args.mu, args.nu, axis)?;

    let ambiguity = Ambiguity {
        twin: Covariances::from(&twin),
        position_tomogram_difference: tx.linf_distance(&twin_x)?,
        momentum_tomogram_difference: tp.linf_distance(&twin_p)?,
        extra_variance_state: tomogram_moments(&te)?.variance,
        extra_variance_twin: tomogram_moments(&twin_e)?.variance,
    };
    let r = pauli_reconstruct(&tx, &tp, &te)?;
    let moot = r.sign == CovarianceSign::Moot;
    let resolution = Resolution {
        mu: args.mu,
        nu: args.nu,
        recovered: Covariances::from(&r.state),
        sign: r.sign,
        sign_moot: moot,
        observed_extra_variance: r.observed_extra,
        predicted_plus: r.predicted_plus,
        predicted_minus: r.predicted_minus,
        sign_margin: r.sign_margin,
        tolerance: r.tolerance,
        margin_over_tolerance: r.sign_margin / r.tolerance,
        errors: Covariances {
            sigma_xx: (r.state.sigma_xx() - state.sigma_xx()).abs(),
            sigma_pp: (r.state.sigma_pp() - state.sigma_pp()).abs(),
            sigma_xp: (r.state.sigma_xp() - state.sigma_xp()).abs(),
        },
    };
    let note = if moot {
        "sign moot: sigma_xp = 0, the state is its own twin".to_string()
    } else {
        format!(
            "position and momentum tomograms agree for sigma_xp = {:+} and {:+}; the ({}, {}) tomogram selects {:+}",
            state.sigma_xp(),
            twin.sigma_xp(),
            args.mu,
            args.nu,
            r.state.sigma_xp()
        )
    };
    let report = PauliDemoReport {
        hbar: state.hbar(),
        input: Covariances::from(&state),
        ambiguity,
        resolution,
        note,
    };
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(path) = &args.out {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            ensure_dir(dir)?;
        }
        write_atomic(path, format!("{text}\n").as_bytes())?;
    }
    println!("{text}");
    Ok(())
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Seed of the random draws.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Angles in the round-trip sweep.
    #[arg(long, default_value_t = 360)]
    pub angles: usize,
    /// Multiplies the back-projection constant (negative control).
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub inject_fbp_constant: f64,
    /// Also write the results as JSON to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Returns whether every check passed.
pub fn check(args: &CheckArgs) -> Result<bool> {
    let report = run_checks(&CheckOptions {
        seed: args.seed,
        fbp_constant_scale: args.inject_fbp_constant,
        angles: args.angles,
    });
    let mut out = std::io::stdout().lock();
    out.write_all(report.table().as_bytes())?;
    if let Some(path) = &args.json {
        write_json(path, &report)?;
    }
    Ok(report.all_passed())
}
