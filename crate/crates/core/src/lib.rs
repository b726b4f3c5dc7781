//! Metrisability of projective structures given by `y'' = A3 y'^3 + A2 y'^2 + A1 y' + A0`.

pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod integrals;
pub mod linalg;
pub mod metrisability;
pub mod mobility;
pub mod ode;
pub mod projective;
pub mod pvi;

pub use error::{CoreError, Result};
pub use projective::{
    connection_to_coeffs, is_projectively_flat, levi_civita, liouville_invariants, projective_shift,
    representative_connection, Connection, Flatness, Metric2D, OdeCoeffs, OneForm,
};
