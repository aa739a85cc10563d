//! Optimal unambiguous filtering of one pure quantum state against a set of
//! two others, and its realization as a four-mode linear-optical multiport.
//!
//! The pipeline is
//!
//! 1. [`filter::solve`]: closed-form optimal failure probabilities,
//! 2. [`designer::design`]: success/failure vectors and the 4x4 unitary,
//! 3. [`multiport::decompose`]: beam-splitter mesh realizing the unitary,
//! 4. [`simulator::sample`]: single-photon detection statistics,
//!
//! with [`oracle`] providing brute-force and stationarity cross-checks and
//! [`cli`] the JSON/CSV file formats behind the `qfilter` binary.

pub mod cli;
pub mod designer;
pub mod error;
pub mod filter;
pub mod instances;
pub mod linalg;
pub mod multiport;
pub mod oracle;
pub mod random;
pub mod simulator;
pub mod states;

pub use designer::{design, MeasurementDesign, Placement};
pub use error::{Error, Result};
pub use filter::{solve, FilterSolution, Regime};
pub use multiport::{decompose, recompose, BeamSplitterLayer, MeshProgram};
pub use simulator::{sample, SimulationReport};
pub use states::{Ensemble, OverlapSet, StateVector};
