//! Exact simulation of a five-context three-path interferometer.
//!
//! The crate evaluates the noncontextual path inequality
//! `P(f) <= P(D1) + P(D2)` for arbitrary single-photon inputs, both
//! directly from interior path probabilities and from output statistics
//! with and without an absorber in path `f`, and provides the phase and
//! transmittance scans, Poisson counting and visibility fits used to
//! analyze the corresponding experiment.
//!
//! ```
//! use ctxscope::{build_network, witness_report, NamedState};
//!
//! let net = build_network();
//! let r = witness_report(&net, &NamedState::Nf.state()).unwrap();
//! assert!((r.witness_direct - 1.0 / 9.0).abs() < 1e-12);
//! assert!((r.gain - 7.0 / 27.0).abs() < 1e-12);
//! ```

pub mod check;
pub mod contexts;
pub mod csvio;
pub mod error;
pub mod fixtures;
pub mod interferometer;
pub mod linalg;
pub mod reproduce;
pub mod states;
pub mod stats;
pub mod sweep;

pub use contexts::{canonical_paths, max_witness, path_probability, witness_direct, PathBasis, PathLabel};
pub use error::{Error, Result};
pub use interferometer::{
    build_network, counterfactual_gain, phase_scan, run, transmittance_scan, witness_from_outputs,
    witness_report, Modifier, Network, OutputDistribution, WitnessReport,
};
pub use linalg::{inner, StateVector, TransferOperator};
pub use states::{NamedState, StateSpec, SweepGrid};
pub use stats::{fit_fringe, noisy_fringe, sample_counts, FitResult, FringeDataset, FringeModel};
