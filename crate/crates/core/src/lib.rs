//! Numerical toolkit for Herglotz–Nevanlinna functions.

pub mod cmath;
pub mod error;
pub mod extensions;
pub mod herglotz;
pub mod io;
pub mod linalg;
pub mod livsic;
pub mod measures;
pub mod ode;
pub mod perturbation;
pub mod quadrature;
pub mod registry;
pub mod schrodinger;
pub mod testing;

pub use error::{Error, Result};
