//! Uniform grids, wavefunction samples and the ħ-scaled Fourier, chirp and scaling operators.

pub mod chirpz;
pub mod fourier;
pub mod grid;

pub use chirpz::ChirpZ;
pub use fourier::{
    bandlimited_eval, chirp_multiply, hbar_fourier, hbar_fourier_at, parity, scale, Direction,
};
pub use grid::{make_grid, Axis, Grid1D, SampledWavefunction};
