//! Thrust on a rotating chiral sphere from fluctuating electromagnetic fields.
//!
//! The crate evaluates the axial force on a small chiral particle spinning
//! in a thermal vacuum, resolved into three contributions: the dipole
//! fluctuation term and the two interference terms between electric and
//! magnetic dipoles and fields. See [`force::compute_force`] for the entry
//! point.

pub mod bessel;
pub mod constants;
pub mod double_double;
pub mod error;
pub mod force;
pub mod materials;
pub mod numerics;
pub mod output;
pub mod polarizability;
pub mod precise;
pub mod quadrature;
pub mod sweep;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use materials::{DampingConvention, DispersionSample, LorentzResonance, MaterialModel};
pub use polarizability::{
    polarizability_at, MieDipoleCoefficients, ParticleSpec, PolarizabilityModel,
    PolarizabilitySet,
};
pub use force::{compute_force, DiffMode, EvaluationMode, ForceBreakdown, RunContext, SpectralSample};
pub use quadrature::QuadratureSettings;
pub use sweep::{run_sweep, SweepSpec, SweepVariable};
