//! Command-line front end for the `entropic` realization toolkit.

pub mod autoscale;
pub mod certificate;
pub mod commands;
pub mod document;
pub mod error;
pub mod verify;
