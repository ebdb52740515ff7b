pub mod checks;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod lagrangian;
pub mod metaplectic;
pub mod numerics;
pub mod radon;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;
