//! Symplectic matrices, generating forms and their metaplectic (quadratic Fourier) operators.

pub mod qft;
pub mod symplectic;

pub use qft::{metaplectic_rotation, metaplectic_rotation_at, quadratic_fourier, quadratic_fourier_at};
pub use symplectic::{
    blocks, column_conditions, from_blocks, generating_form, is_symplectic, rotation_from_mu_nu,
    row_conditions, standard_j, FreeSymplectic, GeneratingForm, RotationParams, SymplecticMatrix,
    SymplecticReport,
};
