//! Multi-slit chordal Loewner flows driven by interacting multiple-SLE drivers.
//!
//! The crate integrates the coupled driver SDE, pushes points of the upper
//! half-plane through the resulting Loewner flow, and checks the large-N
//! limit objects (complex Burgers equation, semicircle law, `F = L∘G`,
//! escape of heavy atoms, Dyck-path scaling, quadratic-differential
//! characteristics) against closed forms.
//!
//! Module map:
//!
//! * [`measures`] atomic measures, weight profiles, Cauchy transforms.
//! * [`drivers`] driver dynamics and the adaptive Heun integrator.
//! * [`loewner`] forward flow, swallow times, capacity fits, tip tracing.
//! * [`burgers`] closed-form Burgers solutions and residual checks.
//! * [`dyck`] configurations, Dyck paths, Catalan numbers, sampling.
//! * [`scenarios`] builtin experiments and the quadratic-differential field.
//! * [`figures`] SVG output for driver bundles and stream fields.
//! * [`verify`] the acceptance checks shared by the CLI and the test suite.

pub mod burgers;
pub mod drivers;
pub mod dyck;
pub mod error;
pub mod figures;
pub mod loewner;
pub mod measures;
pub mod noise;
pub mod output;
pub mod scenarios;
pub mod verify;

pub use error::{Error, Result};

/// Complex numbers used throughout.
pub type C64 = num_complex::Complex64;
