//! Exact computation of cylinder-separation profiles of iterated function
//! systems, exact-overlap detection for parameterised families, and
//! construction and independent verification of finite-stage certificates
//! of super-exponentially close cylinders without exact overlaps.

pub mod error;
pub mod exactnum;
pub mod simcore;
pub mod deltasearch;
pub mod families;
pub mod certificate;
pub mod constructor;
pub mod certverify;

pub use error::{Error, Result};
