//! Sullivan minimal models of differential graded operads over ℚ.
//!
//! The crate is organised bottom-up:
//!
//! - [`exactla`]: exact rational linear algebra (row reduction, kernels, cohomology);
//! - [`perm`], [`symmod`]: permutations, graded Σ-modules and restriction maps;
//! - [`freeop`]: free graded operads on canonical decorated trees, principal extensions;
//! - [`dgoperad`]: finite target operads given by structure constants, and morphisms into them;
//! - [`kan`]: face families and fillers for operads with a unitary multiplication;
//! - [`sullivan`]: the arity-by-arity construction of the minimal model and its verification.

pub mod dgoperad;
pub mod error;
pub mod exactla;
pub mod freeop;
pub mod kan;
pub mod perm;
pub mod report;
pub mod sullivan;
pub mod symmod;

pub use dgoperad::{Builtin, FiniteDgOperad, StageMorphism};
pub use error::{Error, Result};
pub use exactla::{Matrix, Scalar, Vector};
pub use freeop::{FreeStage, GenId, Tree, TreeVector};
pub use perm::Perm;
pub use report::Report;
pub use sullivan::{minimal_model, verify_minimal_model, MinimalModel, Mode, StagedModel};
