//! Ext over the (motivic) dual Steenrod algebra and its quotients, the
//! Burklund-Xu spectral sequence in Chow degrees zero and one, and tooling to
//! ingest, filter and chart the resulting data.

pub mod bx;
pub mod chart;
pub mod charts;
pub mod cobar;
pub mod error;
pub mod f2linalg;
pub mod hopf;
pub mod ingest;
pub mod names;
pub mod oracle;
pub mod resolution;
pub mod verify;

pub use error::{Error, Result};
