//! Riemannian geometry of unitarily evolving finite-dimensional mixed
//! quantum states.
//!
//! The crate models the purification bundle over a unitary orbit of
//! isospectral density operators: spectra, states, purifications, and
//! tangent vectors live in [`state_space`]; the bundle projection, the
//! mechanical connection, and the two metrics live in [`bundle_geometry`];
//! observable fields and uncertainty bounds in [`observables`]; von
//! Neumann dynamics, horizontal lifts, minimal-dispersion Hamiltonian
//! synthesis, and distance estimates in [`evolution`]; and the comparison
//! against the Bures metric in [`bures_compare`]. JSON interchange lives
//! in [`io`], shared configuration in [`config`].

pub mod bundle_geometry;
pub mod bures_compare;
pub mod config;
pub mod error;
pub mod evolution;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod state_space;

pub use config::{RunConfig, Tolerances};
pub use error::{Error, Result};
pub use linalg::{C64, CMatrix, CVector};
