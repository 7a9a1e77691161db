//! Bound states of the isotropic Dunkl oscillator in the plane, solved in
//! polar coordinates, together with its rational extensions: X_m-Laguerre
//! deformations of the radial equation and the X_1-Jacobi deformation of the
//! angular equation. Every constructed object ships with independent
//! numerical verification (Gauss quadrature Gram matrices, pointwise operator
//! residuals, finite-difference and grid-diagonalization oracles).

pub mod error;
pub mod params;
pub mod orthopoly;
pub(crate) mod ratpoly;
pub(crate) mod linalg;
pub mod quasiforms;
pub mod basestates;
pub mod radial_ext;
pub mod angular_ext;
pub mod verify;
pub mod suite;

pub use error::{Error, Result};
pub use params::{ExtensionSpec, ExtensionType, Parameters, QuantumNumbers, SectorLabel};
pub use orthopoly::Polynomial;
pub use quasiforms::{AngularForm, RadialForm};
pub use basestates::BoundState;
pub use radial_ext::{ExtendedRadialState, GFactor};
pub use angular_ext::ExtendedAngularState;
pub use verify::{QuadratureRule, VerificationReport, WeightFamily};
pub use suite::{run_full_suite, SuiteBundle, SuiteConfig, Tolerances};
