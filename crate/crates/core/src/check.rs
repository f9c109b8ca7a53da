//! Self-check of every structural invariant of the path basis and network.

use std::fmt;

use serde::Serialize;

use crate::contexts::{orthogonality_edges, path_probability, PathBasis, PathLabel, CONTEXTS};
use crate::interferometer::{run, witness_report, Modifier, Network, STAGE_REFLECTIVITIES};
use crate::linalg::{gram_deviation, OUTPUT_TOL};
use crate::states::{haar_states, NamedState};

/// Haar states used by the identity check.
pub const IDENTITY_SAMPLES: usize = 10_000;
pub const IDENTITY_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    /// Worst observed deviation.
    pub deviation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| !e.passed)
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    fn push(&mut self, name: impl Into<String>, deviation: f64, tolerance: f64) {
        self.entries.push(CheckEntry {
            name: name.into(),
            passed: deviation <= tolerance,
            deviation,
            tolerance,
        });
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let mark = if e.passed { "ok  " } else { "FAIL" };
            writeln!(f, "{mark} {:<40} max deviation {:.3e} (tol {:.0e})", e.name, e.deviation, e.tolerance)?;
        }
        match self.first_failure() {
            None => write!(f, "all checks passed"),
            Some(e) => write!(f, "check failed: {}", e.name),
        }
    }
}

fn context_name(k: usize) -> String {
    let names: Vec<&str> = CONTEXTS[k].iter().map(|l| l.name()).collect();
    format!("{{{}}}", names.join(","))
}

/// Run all checks against `basis`. `samples` Haar states feed the
/// output-witness identity.
pub fn run_checks(basis: &PathBasis, samples: usize) -> CheckReport {
    let mut report = CheckReport { entries: Vec::new() };

    for (k, ctx) in CONTEXTS.iter().enumerate() {
        let dev = gram_deviation(&basis.context_vectors(ctx));
        report.push(format!("orthogonality context {}", context_name(k)), dev, OUTPUT_TOL);
    }
    let edge_dev = orthogonality_edges()
        .into_iter()
        .map(|(a, b)| basis.vector(a).inner(&basis.vector(b)).norm())
        .fold(0.0, f64::max);
    report.push("orthogonality edges", edge_dev, OUTPUT_TOL);

    let nf = NamedState::Nf.state();
    let nf_dev = (path_probability(basis, &nf, PathLabel::F) - 1.0 / 9.0)
        .abs()
        .max(path_probability(basis, &nf, PathLabel::D1))
        .max(path_probability(basis, &nf, PathLabel::D2));
    report.push("Nf path probabilities", nf_dev, OUTPUT_TOL);

    let network = match Network::from_basis(basis.clone()) {
        Ok(n) => n,
        Err(_) => {
            report.push("network construction", f64::INFINITY, 0.0);
            return report;
        }
    };

    report.push("telescoping product", network.total_transfer().identity_deviation(), OUTPUT_TOL);
    for stage in network.stages() {
        let k = stage.index;
        let refl = (stage.reflectivity() - STAGE_REFLECTIVITIES[k]).abs();
        let unit = stage.transfer.unitarity_deviation();
        let pass = stage.passthrough_deviation();
        report.push(format!("stage {} unitarity", k + 1), unit, OUTPUT_TOL);
        report.push(format!("stage {} reflectivity", k + 1), refl.max(pass), OUTPUT_TOL);
    }

    let states = haar_states(IDENTITY_SEED, samples);
    let mut identity_dev: f64 = 0.0;
    let mut survival_dev: f64 = 0.0;
    for psi in &states {
        let r = witness_report(&network, psi).expect("Haar states are normalized");
        identity_dev = identity_dev.max((r.witness_direct - r.witness_from_outputs).abs());
        survival_dev = survival_dev.max((r.free.survival - 1.0).abs());
    }
    report.push(format!("output witness identity ({samples} states)"), identity_dev, OUTPUT_TOL);
    report.push("survival without absorber", survival_dev, OUTPUT_TOL);

    let mut block_dev: f64 = 0.0;
    for psi in states.iter().take(500) {
        for label in PathLabel::INTERIOR {
            let d = run(&network, psi, &[Modifier::block(label)]).expect("valid modifier");
            block_dev = block_dev.max((d.survival - (1.0 - path_probability(basis, psi, label))).abs());
        }
    }
    report.push("survival with absorber", block_dev, OUTPUT_TOL);

    report
}
