//! Concentration measures for directed ownership networks.
//!
//! In- and out-degree laws are coupled through copulas on their discrete
//! supports; the resulting joint laws are compared with observed data by
//! Euclidean distance and ranked by Shannon entropy (low entropy: a polarized
//! market, high entropy: a spread-out one).
//!
//! Modules, bottom-up:
//! - [`net`]: edge lists and degree extraction
//! - [`marginals`]: degree laws and their fits
//! - [`copulas`]: the six copulas
//! - [`sklar`]: joint laws from marginals and a copula
//! - [`measures`]: entropy, distance, extremal arrangements
//! - [`calibrate`]: scans and parameter calibration
//! - [`report`], [`io`]: bundled analyses and file formats

pub mod calibrate;
pub mod copulas;
pub mod error;
pub mod io;
pub mod marginals;
pub mod measures;
pub mod net;
pub mod optim;
pub mod report;
pub mod sklar;

pub use copulas::{CopulaSpec, Family};
pub use error::{Error, Result};
pub use marginals::{DiscretePmf, MarginalSpec};
pub use measures::Goal;
pub use sklar::JointPmf;
