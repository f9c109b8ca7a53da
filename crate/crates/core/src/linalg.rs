//! Complex linear algebra on the three-mode single-photon space.
//!
//! Everything here is fixed to dimension 3. States are column vectors of
//! amplitudes in input-port coordinates; operators are 3x3 complex matrices
//! tagged as either unitary or attenuating (all singular values <= 1).

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A single complex probability amplitude.
pub type ComplexAmplitude = Complex64;

/// Output tolerance for unitarity and norm preservation.
pub const OUTPUT_TOL: f64 = 1e-12;
/// Input tolerance for hand-entered orthonormal bases.
pub const BASIS_TOL: f64 = 1e-10;

/// Single-photon state over the three paths.
///
/// May be sub-normalized after passing an absorber.
#[derive(Clone, Copy, PartialEq)]
pub struct StateVector(Vector3<Complex64>);

impl StateVector {
    pub fn new(a1: Complex64, a2: Complex64, a3: Complex64) -> Self {
        Self(Vector3::new(a1, a2, a3))
    }

    pub fn from_real(a1: f64, a2: f64, a3: f64) -> Self {
        Self::new(a1.into(), a2.into(), a3.into())
    }

    /// The unit vector along input path `i` (0-based).
    pub fn basis(i: usize) -> Self {
        let mut v = Vector3::zeros();
        v[i] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn amplitude(&self, i: usize) -> Complex64 {
        self.0[i]
    }

    pub fn amplitudes(&self) -> [Complex64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Rescale to unit norm. Fails on the zero vector or non-finite input.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !n2.is_finite() || n2 <= f64::MIN_POSITIVE {
            return Err(Error::InvalidState(format!(
                "cannot normalize a state with norm^2 = {n2}"
            )));
        }
        Ok(self.scale(Complex64::new(1.0 / n2.sqrt(), 0.0)))
    }

    /// Return `Ok(self)` when the norm is 1 within `tol`.
    pub fn require_normalized(self, tol: f64) -> Result<Self> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > tol || !self.is_finite() {
            return Err(Error::NotNormalized(n2));
        }
        Ok(self)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self(self.0 * k)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0 + other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0 - other.0)
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub(crate) fn as_vector(&self) -> &Vector3<Complex64> {
        &self.0
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.amplitudes();
        write!(f, "StateVector[{a:.6}, {b:.6}, {c:.6}]")
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: &StateVector, b: &StateVector) -> Complex64 {
    a.inner(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Unitary,
    Attenuating,
}

/// A linear map on the three-mode space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferOperator {
    entries: Matrix3<Complex64>,
    kind: OperatorKind,
}

impl TransferOperator {
    pub fn identity() -> Self {
        Self {
            entries: Matrix3::identity(),
            kind: OperatorKind::Unitary,
        }
    }

    /// Validate `entries` against the requested kind.
    pub fn new(entries: [[Complex64; 3]; 3], kind: OperatorKind) -> Result<Self> {
        let m = Matrix3::from_fn(|r, c| entries[r][c]);
        Self::from_matrix(m, kind)
    }

    fn from_matrix(entries: Matrix3<Complex64>, kind: OperatorKind) -> Result<Self> {
        let op = Self { entries, kind };
        match kind {
            OperatorKind::Unitary => {
                let deviation = op.unitarity_deviation();
                if deviation > OUTPUT_TOL {
                    return Err(Error::NotUnitary { deviation });
                }
            }
            OperatorKind::Attenuating => {
                let sigma = op.max_singular_value();
                if sigma > 1.0 + OUTPUT_TOL {
                    return Err(Error::NotContractive { sigma });
                }
            }
        }
        Ok(op)
    }

    /// Diagonal operator. Unitary if every entry has unit modulus,
    /// attenuating if every entry has modulus <= 1.
    pub fn diagonal(d: [Complex64; 3]) -> Result<Self> {
        let m = Matrix3::from_diagonal(&Vector3::new(d[0], d[1], d[2]));
        let unit = d.iter().all(|x| (x.norm() - 1.0).abs() <= OUTPUT_TOL);
        let kind = if unit {
            OperatorKind::Unitary
        } else {
            OperatorKind::Attenuating
        };
        Self::from_matrix(m, kind)
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn entries(&self) -> [[Complex64; 3]; 3] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.entries[(r, c)]))
    }

    pub fn apply(&self, s: &StateVector) -> StateVector {
        StateVector(self.entries * s.as_vector())
    }

    /// `self · other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        let kind = match (self.kind, other.kind) {
            (OperatorKind::Unitary, OperatorKind::Unitary) => OperatorKind::Unitary,
            _ => OperatorKind::Attenuating,
        };
        Self {
            entries: self.entries * other.entries,
            kind,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            kind: self.kind,
        }
    }

    /// Max-entry deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        max_abs_deviation(&(self.entries.adjoint() * self.entries), &Matrix3::identity())
    }

    /// Max-entry deviation of the matrix from the identity.
    pub fn identity_deviation(&self) -> f64 {
        max_abs_deviation(&self.entries, &Matrix3::identity())
    }

    pub fn max_singular_value(&self) -> f64 {
        self.entries.singular_values().max()
    }
}

fn max_abs_deviation(a: &Matrix3<Complex64>, b: &Matrix3<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Gram matrix deviation `max |⟨r_i|r_j⟩ - δ_ij|`.
pub fn gram_deviation(rows: &[StateVector; 3]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((rows[i].inner(&rows[j]) - target).norm());
        }
    }
    worst
}

/// Operator expressing a state in the orthonormal basis `rows`.
///
/// Row `i` is the conjugate of basis vector `i`, so component `i` of the
/// result is `⟨rows[i]|ψ⟩`.
pub fn basis_change(rows: &[StateVector; 3]) -> Result<TransferOperator> {
    let deviation = gram_deviation(rows);
    if deviation > BASIS_TOL || !rows.iter().all(StateVector::is_finite) {
        return Err(Error::NonOrthonormalBasis { deviation });
    }
    let m = Matrix3::from_fn(|r, c| rows[r].amplitude(c).conj());
    Ok(TransferOperator {
        entries: m,
        kind: OperatorKind::Unitary,
    })
}

/// Eigenvalues of a 3x3 Hermitian matrix in descending order.
///
/// Closed-form trigonometric solution of the characteristic cubic; the
/// imaginary parts of the diagonal are ignored.
pub fn hermitian_eigenvalues(m: &[[Complex64; 3]; 3]) -> [f64; 3] {
    let a00 = m[0][0].re;
    let a11 = m[1][1].re;
    let a22 = m[2][2].re;
    let p1 = m[0][1].norm_sqr() + m[0][2].norm_sqr() + m[1][2].norm_sqr();
    if p1 == 0.0 {
        let mut d = [a00, a11, a22];
        d.sort_by(|x, y| y.total_cmp(x));
        return d;
    }
    let q = (a00 + a11 + a22) / 3.0;
    let p2 = (a00 - q).powi(2) + (a11 - q).powi(2) + (a22 - q).powi(2) + 2.0 * p1;
    if p2 <= f64::MIN_POSITIVE {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();
    // B = (A - qI) / p, det(B) is real for Hermitian A.
    let b = |r: usize, c: usize| {
        let shift = if r == c { q } else { 0.0 };
        (m[r][c] - shift) / p
    };
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
        - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (det.re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    [largest, middle, smallest]
}
