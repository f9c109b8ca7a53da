//! Named input states, state specs and seeded random states.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::StateVector;

/// Tolerance on the norm of a state after loading.
pub const LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedState {
    /// `(|1⟩ + |2⟩ + |3⟩)/√3`
    Nf,
    /// `(2|1⟩ + 2|2⟩ + 3|3⟩)/√17`
    Bf,
    /// `(2|1⟩ + 2|2⟩ + |3⟩)/3`
    V0,
    Basis1,
    Basis2,
    Basis3,
}

impl NamedState {
    pub const ALL: [NamedState; 6] = [
        NamedState::Nf,
        NamedState::Bf,
        NamedState::V0,
        NamedState::Basis1,
        NamedState::Basis2,
        NamedState::Basis3,
    ];

    /// The three states studied experimentally.
    pub const EXPERIMENTAL: [NamedState; 3] = [NamedState::Nf, NamedState::Bf, NamedState::V0];

    pub fn state(self) -> StateVector {
        let v = |a: f64, b: f64, c: f64, n: f64| StateVector::from_real(a / n, b / n, c / n);
        match self {
            NamedState::Nf => v(1.0, 1.0, 1.0, 3f64.sqrt()),
            NamedState::Bf => v(2.0, 2.0, 3.0, 17f64.sqrt()),
            NamedState::V0 => v(2.0, 2.0, 1.0, 3.0),
            NamedState::Basis1 => StateVector::basis(0),
            NamedState::Basis2 => StateVector::basis(1),
            NamedState::Basis3 => StateVector::basis(2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedState::Nf => "Nf",
            NamedState::Bf => "Bf",
            NamedState::V0 => "V0",
            NamedState::Basis1 => "basis1",
            NamedState::Basis2 => "basis2",
            NamedState::Basis3 => "basis3",
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedState::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidState(format!("unknown state name `{s}`")))
    }
}

/// A state given either by name or by six comma-separated numbers
/// `a1r,a1i,a2r,a2i,a3r,a3i`. Explicit amplitudes are normalized on load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Named(NamedState),
    Explicit(StateVector),
}

impl StateSpec {
    pub fn state(&self) -> StateVector {
        match self {
            StateSpec::Named(n) => n.state(),
            StateSpec::Explicit(s) => *s,
        }
    }

    pub fn label(&self) -> String {
        match self {
            StateSpec::Named(n) => n.name().to_string(),
            StateSpec::Explicit(s) => {
                let parts: Vec<String> = s
                    .amplitudes()
                    .iter()
                    .flat_map(|a| [a.re, a.im])
                    .map(|x| format!("{x:.9}"))
                    .collect();
                parts.join(",")
            }
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(named) = s.parse::<NamedState>() {
            return Ok(StateSpec::Named(named));
        }
        let nums: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidState(format!("`{s}` is neither a state name nor six numbers")))?;
        if nums.len() != 6 {
            return Err(Error::InvalidState(format!(
                "expected 6 numbers (re,im per path), got {}",
                nums.len()
            )));
        }
        let raw = StateVector::new(
            Complex64::new(nums[0], nums[1]),
            Complex64::new(nums[2], nums[3]),
            Complex64::new(nums[4], nums[5]),
        );
        let state = raw.normalized()?.require_normalized(LOAD_TOL)?;
        Ok(StateSpec::Explicit(state))
    }
}

/// One Haar-random state from normalized independent complex Gaussians.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R) -> StateVector {
    loop {
        let mut g = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let raw = StateVector::new(g(), g(), g());
        if let Ok(s) = raw.normalized() {
            return s;
        }
    }
}

/// `n` Haar-random states from a fixed seed.
pub fn haar_states(seed: u64, n: usize) -> Vec<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| haar_state(&mut rng)).collect()
}

/// Real first-octant states `(sin α cos β, sin α sin β, cos α)` with
/// `α, β ∈ [0, π/2]` on a uniform grid including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepGrid {
    resolution: usize,
}

impl SweepGrid {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::Schema(format!(
                "sweep resolution must be at least 2 (got {resolution})"
            )));
        }
        Ok(Self { resolution })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        FRAC_PI_2 / (self.resolution - 1) as f64
    }

    /// Angles of point `index` in row-major (α-major) order.
    pub fn angles(&self, index: usize) -> (f64, f64) {
        let i = index / self.resolution;
        let j = index % self.resolution;
        (i as f64 * self.step(), j as f64 * self.step())
    }

    pub fn state_at(alpha: f64, beta: f64) -> StateVector {
        StateVector::from_real(alpha.sin() * beta.cos(), alpha.sin() * beta.sin(), alpha.cos())
    }

    /// Angles of a real non-negative state.
    pub fn angles_of(s: &StateVector) -> (f64, f64) {
        let [a, b, c] = s.amplitudes().map(|x| x.re);
        let alpha = c.clamp(-1.0, 1.0).acos();
        let beta = b.atan2(a);
        (alpha, beta)
    }

    /// Index of the grid point nearest to the given angles.
    pub fn nearest(&self, alpha: f64, beta: f64) -> usize {
        let clamp = |x: f64| ((x / self.step()).round() as usize).min(self.resolution - 1);
        clamp(alpha) * self.resolution + clamp(beta)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64, StateVector)> + '_ {
        (0..self.len()).map(|k| {
            let (a, b) = self.angles(k);
            (a, b, Self::state_at(a, b))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn named_states_are_normalized() {
        for n in NamedState::ALL {
            assert_abs_diff_eq!(n.state().norm_sqr(), 1.0, epsilon = 1e-15);
        }
        let bf = NamedState::Bf.state();
        assert_abs_diff_eq!(bf.amplitude(2).re, 3.0 / 17f64.sqrt(), epsilon = 1e-16);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("Nf".parse::<StateSpec>().unwrap(), StateSpec::Named(NamedState::Nf));
        assert_eq!("v0".parse::<StateSpec>().unwrap(), StateSpec::Named(NamedState::V0));
        let s: StateSpec = "2,0,2,0,1,0".parse().unwrap();
        let v0 = NamedState::V0.state();
        for i in 0..3 {
            assert_abs_diff_eq!(s.state().amplitude(i).re, v0.amplitude(i).re, epsilon = 1e-15);
        }
        assert!("1,0,1".parse::<StateSpec>().is_err());
        assert!("0,0,0,0,0,0".parse::<StateSpec>().is_err());
        assert!("nope".parse::<StateSpec>().is_err());
    }

    #[test]
    fn haar_states_are_seeded_and_normalized() {
        let a = haar_states(7, 100);
        let b = haar_states(7, 100);
        assert_eq!(a, b);
        assert_ne!(a, haar_states(8, 100));
        for s in a {
            assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn haar_components_have_uniform_mean_weight() {
        // E|ψ_i|² = 1/3 for Haar states.
        let states = haar_states(99, 20_000);
        for i in 0..3 {
            let mean: f64 =
                states.iter().map(|s| s.amplitude(i).norm_sqr()).sum::<f64>() / states.len() as f64;
            assert!((mean - 1.0 / 3.0).abs() < 0.01, "component {i}: {mean}");
        }
    }

    #[test]
    fn named_states_lie_on_the_grid_closure() {
        for n in [NamedState::Nf, NamedState::Bf, NamedState::V0] {
            let (a, b) = SweepGrid::angles_of(&n.state());
            assert!((0.0..=FRAC_PI_2).contains(&a));
            assert!((0.0..=FRAC_PI_2).contains(&b));
            let back = SweepGrid::state_at(a, b);
            for i in 0..3 {
                assert_abs_diff_eq!(back.amplitude(i).re, n.state().amplitude(i).re, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn grid_layout() {
        let g = SweepGrid::new(5).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g.angles(0), (0.0, 0.0));
        let (a, b) = g.angles(24);
        assert_abs_diff_eq!(a, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(b, FRAC_PI_2, epsilon = 1e-15);
        assert_eq!(g.nearest(a, b), 24);
        assert!(g.points().all(|(_, _, s)| (s.norm_sqr() - 1.0).abs() < 1e-12));
        assert!(SweepGrid::new(1).is_err());
    }
}
