//! Globally valued fields at desk scale: places and valuations of Q, number
//! fields and F_p(t), integrals of tropical terms against the standard
//! measures, lattice divisors, LP feasibility of functionals, and point search.

pub mod algebra;
pub mod divisors;
pub mod error;
pub mod exec;
pub mod feasibility;
pub mod gvf;
pub mod places;
pub mod search;
pub mod tropical;

pub use error::{Error, Result};
