//! Density-evolution analysis of spatially coupled LDPC ensembles under
//! windowed decoding on the binary erasure channel.
//!
//! The crate is organised bottom-up:
//!
//! - [`poly`]: degree-distribution polynomials (node and edge perspective).
//! - [`scalar`]: density evolution and the potential function of the
//!   uncoupled ensemble, thresholds and the critical-point landscape.
//! - [`window`]: the windowed density-evolution engine for the coupled chain.
//! - [`coupled`]: the potential function of a window configuration and its
//!   first-order Taylor objects.
//! - [`speed`]: steady-state detection, propagation-speed measurement and
//!   the two upper bounds on that speed.
//! - [`export`]: CSV emission for landscapes, trajectories and speed reports.

pub mod coupled;
pub mod error;
pub mod export;
pub mod numeric;
pub mod poly;
pub mod scalar;
pub mod speed;
pub mod window;

pub use coupled::{AlphaCheck, CoupledPotentialContext};
pub use error::{Error, Result};
pub use poly::{DegreePolynomial, Perspective};
pub use scalar::{DeRun, PotentialLandscape, UncoupledEnsemble};
pub use speed::{SpeedOptions, SpeedReport, SteadyState, Th2Bound};
pub use window::{
    CoupledSpec, DEState, RecordPolicy, RunOptions, ScheduleVariant, SuccessPolicy, Trajectory,
    WindowSchedule,
};
