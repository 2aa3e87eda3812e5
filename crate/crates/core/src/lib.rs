//! Strain-limiting implicit constitutive relations at small but finite strain.

pub mod analysis;
pub mod cli;
pub mod energy;
pub mod error;
pub mod families;
pub mod kinematics;
pub mod scalar1d;
pub mod solver;
pub mod symtensor;

pub use error::{Error, Result};
pub use families::{BaseProfile, FamilyKind, FamilySpec};
pub use kinematics::RotationSpec;
pub use symtensor::{SymTensor, Tensor3};
