//! Discovery and verification of affine metamorphic relations for a
//! surface-ocean kinetic energy computation.
//!
//! The crate has five parts:
//!
//! - [`model`]: the function under test — sea level in, kinetic energy
//!   series out — in a correct (cyclic boundary) and a defective
//!   (non-cyclic boundary) variant.
//! - [`layout`] and [`mr`]: the flattened input vector and affine input
//!   mappings g(x) = Γ·x + β over it, including the structured catalogue
//!   of manually identified relations.
//! - [`search`]: the cost function and the Monte-Carlo mutation search
//!   that grows a set of relations outward from the identity map.
//! - [`analysis`]: variance analysis over discovered relation parameters,
//!   attribute-targeted re-search, and catalogue matching.
//! - [`harness`]: MR test campaigns over both model variants, with
//!   pass/fail verdicts and exportable reports.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod layout;
pub mod model;
pub mod mr;
pub mod search;

pub use error::{Error, Result};
