//! Simulation and analysis of building HVAC operation under incentive schemes.
//!
//! The pipeline runs from a hybrid thermal model ([`dynamics`]) through a
//! Monte Carlo reduction to a static operating model ([`static_model`]), then
//! solves the building manager's and owner's problems over that model
//! ([`param_opt`], [`agents`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod param_opt;
pub mod static_model;
pub mod verify;

pub use error::{Error, Result};
pub use static_model::{KeyPoints, OperatingPoint, StaticModel};
