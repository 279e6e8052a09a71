//! Greedy approximation with respect to finite bases.
//!
//! The crate works with norms on `R^d` written in the canonical basis and
//! provides the thresholding, weak and branch greedy algorithms, exact best
//! m-term error functionals by enumeration, democracy-type and greedy-type
//! constants, and a harness that checks the standard inequalities relating
//! them.
//!
//! Indices are 0-based in the API and 1-based in text formats.

pub mod constants;
pub mod corpus;
pub mod error;
pub mod functionals;
pub mod greedy;
pub mod lp;
pub mod minimize;
pub mod space;
pub mod vector;
pub mod verify;

pub use constants::{ConstWitness, ConstantEstimate, Exactness, GreedyKind};
pub use error::{Error, Result};
pub use functionals::{ErrorValue, Functional, Side};
pub use greedy::{BranchRule, BranchSelectorSpec, GreedySelection, WeakPolicy};
pub use space::{NormSpec, NormedSpace, SpaceSpec};
pub use vector::{IndexSet, Vector};
