//! Quantum fidelity (Loschmidt echo) of the time-periodic singular harmonic
//! oscillator `H_g(t) = P^2/2 + f(t) Q^2/2 + g^2/Q^2`.
//!
//! Modules:
//! - [`hill`]: complex Hill solutions, phase coordinates, Floquet analysis.
//! - [`states`]: reference states and their Hermite coefficients.
//! - [`fidelity`]: closed-form fidelity, lower bounds, recurrences.
//! - [`oracle`]: grid propagation, closed-form evolved states and the
//!   factorized propagator, used to cross-check the closed forms.
//! - [`classical`]: paired classical trajectories and the Ermakov-Pinney
//!   equation.

pub mod classical;
pub mod error;
pub mod fidelity;
pub mod hill;
pub mod ode;
pub mod oracle;
pub mod quadrature;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
