//! Numerical laboratory for the first Dirichlet eigenvalue of the p-Laplacian
//! on grid domains, together with inradii, variational p-capacities and the
//! lower/upper bounds relating them.

pub mod capacity;
pub mod eigen;
pub mod error;
pub mod field;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod trend;
pub mod variational;

pub use error::{Error, Result};
