//! Exact cluster algebras with finite group actions.
//!
//! The crate covers orbit quivers and potentials, triangulated surfaces and
//! orbifolds, generalized exchange polynomials, orbit mutation in a covering
//! surface, and exchange-graph enumeration.

pub mod algebra;
pub mod quiver;
pub mod potential;
pub mod surface;
pub mod cluster;
pub mod orbit;
pub mod explore;
pub mod fixtures;
