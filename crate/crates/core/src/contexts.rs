//! The ten path states of the interferometer and its five measurement
//! contexts.
//!
//! Component values are fixed by the context orthogonality relations plus
//! `⟨D1|N_f⟩ = ⟨D2|N_f⟩ = 0` and `|⟨f|N_f⟩|² = 1/9`. Each vector carries a
//! free sign; observables depend only on magnitudes, so the signs below are
//! a convention (real, first nonzero component positive where not forced).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram_deviation, hermitian_eigenvalues, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PathLabel {
    In1,
    In2,
    In3,
    F,
    D1,
    D2,
    S1,
    S2,
    P1,
    P2,
}

impl PathLabel {
    pub const ALL: [PathLabel; 10] = [
        PathLabel::In1,
        PathLabel::In2,
        PathLabel::In3,
        PathLabel::F,
        PathLabel::D1,
        PathLabel::D2,
        PathLabel::S1,
        PathLabel::S2,
        PathLabel::P1,
        PathLabel::P2,
    ];

    pub const INTERIOR: [PathLabel; 7] = [
        PathLabel::F,
        PathLabel::D1,
        PathLabel::D2,
        PathLabel::S1,
        PathLabel::S2,
        PathLabel::P1,
        PathLabel::P2,
    ];

    fn index(self) -> usize {
        self as usize
    }

    /// Input/output ports 1, 2, 3 are not interior.
    pub fn is_interior(self) -> bool {
        !matches!(self, PathLabel::In1 | PathLabel::In2 | PathLabel::In3)
    }

    pub fn name(self) -> &'static str {
        match self {
            PathLabel::In1 => "1",
            PathLabel::In2 => "2",
            PathLabel::In3 => "3",
            PathLabel::F => "f",
            PathLabel::D1 => "D1",
            PathLabel::D2 => "D2",
            PathLabel::S1 => "S1",
            PathLabel::S2 => "S2",
            PathLabel::P1 => "P1",
            PathLabel::P2 => "P2",
        }
    }
}

impl fmt::Display for PathLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PathLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let label = match s.trim() {
            "1" | "P1IN" => PathLabel::In1,
            "2" | "P2IN" => PathLabel::In2,
            "3" | "P3IN" => PathLabel::In3,
            "f" | "F" => PathLabel::F,
            "D1" | "d1" => PathLabel::D1,
            "D2" | "d2" => PathLabel::D2,
            "S1" | "s1" => PathLabel::S1,
            "S2" | "s2" => PathLabel::S2,
            "P1" | "p1" => PathLabel::P1,
            "P2" | "p2" => PathLabel::P2,
            other => return Err(Error::UnknownLabel(other.to_string())),
        };
        Ok(label)
    }
}

/// An ordered orthonormal triple of path labels.
pub type Context = [PathLabel; 3];

/// The five contexts in propagation order. Consecutive entries (cyclically)
/// share exactly one label.
pub const CONTEXTS: [Context; 5] = [
    [PathLabel::In1, PathLabel::In2, PathLabel::In3],
    [PathLabel::In1, PathLabel::D1, PathLabel::S1],
    [PathLabel::F, PathLabel::P1, PathLabel::S1],
    [PathLabel::F, PathLabel::P2, PathLabel::S2],
    [PathLabel::In2, PathLabel::D2, PathLabel::S2],
];

/// Labels shared by two contexts, i.e. the orthogonality graph edges.
pub fn orthogonality_edges() -> Vec<(PathLabel, PathLabel)> {
    let mut edges = Vec::new();
    for ctx in CONTEXTS {
        for i in 0..3 {
            for j in (i + 1)..3 {
                let pair = (ctx[i].min(ctx[j]), ctx[i].max(ctx[j]));
                if !edges.contains(&pair) {
                    edges.push(pair);
                }
            }
        }
    }
    edges
}

/// Path label to state vector (input coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct PathBasis {
    vectors: [StateVector; 10],
}

impl PathBasis {
    pub fn vector(&self, label: PathLabel) -> StateVector {
        self.vectors[label.index()]
    }

    /// Replace one vector. Used to inject faults when exercising checks.
    pub fn with_vector(mut self, label: PathLabel, v: StateVector) -> Self {
        self.vectors[label.index()] = v;
        self
    }

    pub fn context_vectors(&self, ctx: &Context) -> [StateVector; 3] {
        ctx.map(|l| self.vector(l))
    }

    /// Largest Gram deviation over the five contexts.
    pub fn max_context_deviation(&self) -> f64 {
        CONTEXTS
            .iter()
            .map(|ctx| gram_deviation(&self.context_vectors(ctx)))
            .fold(0.0, f64::max)
    }
}

/// The canonical real representative of the ten path states.
pub fn canonical_paths() -> PathBasis {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let v = StateVector::from_real;
    PathBasis {
        vectors: [
            v(1.0, 0.0, 0.0),
            v(0.0, 1.0, 0.0),
            v(0.0, 0.0, 1.0),
            v(1.0 / s3, 1.0 / s3, -1.0 / s3),
            v(0.0, 1.0 / s2, -1.0 / s2),
            v(1.0 / s2, 0.0, -1.0 / s2),
            v(0.0, 1.0 / s2, 1.0 / s2),
            v(1.0 / s2, 0.0, 1.0 / s2),
            v(2.0 / s6, -1.0 / s6, 1.0 / s6),
            v(1.0 / s6, -2.0 / s6, -1.0 / s6),
        ],
    }
}

/// `|⟨p|ψ⟩|²`.
pub fn path_probability(basis: &PathBasis, psi: &StateVector, label: PathLabel) -> f64 {
    basis.vector(label).inner(psi).norm_sqr()
}

/// Same as [`path_probability`] with the label given by name.
pub fn path_probability_named(basis: &PathBasis, psi: &StateVector, label: &str) -> Result<f64> {
    Ok(path_probability(basis, psi, label.parse()?))
}

/// `P(f) - P(D1) - P(D2)`. Positive values are impossible for any
/// noncontextual assignment of paths.
pub fn witness_direct(basis: &PathBasis, psi: &StateVector) -> f64 {
    path_probability(basis, psi, PathLabel::F)
        - path_probability(basis, psi, PathLabel::D1)
        - path_probability(basis, psi, PathLabel::D2)
}

/// The Hermitian witness operator `|f⟩⟨f| - |D1⟩⟨D1| - |D2⟩⟨D2|`.
pub fn witness_operator(basis: &PathBasis) -> [[Complex64; 3]; 3] {
    let terms = [
        (basis.vector(PathLabel::F), 1.0),
        (basis.vector(PathLabel::D1), -1.0),
        (basis.vector(PathLabel::D2), -1.0),
    ];
    std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            terms
                .iter()
                .map(|(v, w)| v.amplitude(r) * v.amplitude(c).conj() * *w)
                .sum()
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxWitness {
    pub value: f64,
    pub state: StateVector,
}

/// Largest eigenvalue of the witness operator and its eigenvector.
///
/// For the canonical basis the value is `(√33 - 3)/12`.
pub fn max_witness(basis: &PathBasis) -> MaxWitness {
    let m = witness_operator(basis);
    let value = hermitian_eigenvalues(&m)[0];
    // Null vector of (M - λI) from the largest cross product of its rows.
    let rows: [[Complex64; 3]; 3] = std::array::from_fn(|r| {
        std::array::from_fn(|c| if r == c { m[r][c] - value } else { m[r][c] })
    });
    let cross = |a: &[Complex64; 3], b: &[Complex64; 3]| {
        // Bilinear cross product: rows · x = 0 for both rows.
        StateVector::new(
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        )
    };
    let state = [
        cross(&rows[0], &rows[1]),
        cross(&rows[0], &rows[2]),
        cross(&rows[1], &rows[2]),
    ]
    .into_iter()
    .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
    .and_then(|v| v.normalized().ok())
    .unwrap_or_else(|| StateVector::basis(0));
    MaxWitness {
        value,
        state: fix_phase(state),
    }
}

/// Rotate the global phase so the first non-negligible amplitude is real
/// and positive.
fn fix_phase(s: StateVector) -> StateVector {
    let lead = s
        .amplitudes()
        .into_iter()
        .find(|a| a.norm() > 1e-9)
        .unwrap_or(Complex64::new(1.0, 0.0));
    s.scale(lead.conj() / lead.norm())
}
