//! The five-stage network and single-photon propagation through it.
//!
//! Each stage is a basis change from one context to the next, expressed in
//! those contexts' own coordinates. Stage `k` maps context `k` to context
//! `k + 1 (mod 5)`, so the product of all five transfers is the identity on
//! input ports. Interior-path modifiers act diagonally in the coordinates of
//! the first context that contains their target.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::contexts::{canonical_paths, witness_direct, Context, PathBasis, PathLabel, CONTEXTS};
use crate::error::{Error, Result};
use crate::linalg::{basis_change, StateVector, TransferOperator};
use crate::states::LOAD_TOL;
use crate::stats::{DatasetMode, FringeDataset, FringePoint};

/// Beam-splitter reflectivities in stage order.
pub const STAGE_REFLECTIVITIES: [f64; 5] = [1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub index: usize,
    /// Context reached after this stage.
    pub basis: Context,
    /// Maps coordinates of the previous context to those of `basis`.
    pub transfer: TransferOperator,
}

impl Stage {
    pub fn source(&self) -> Context {
        CONTEXTS[self.index]
    }

    /// Positions (row in `basis`, column in source) of the label carried
    /// through unchanged.
    pub fn passthrough(&self) -> (usize, usize) {
        let src = self.source();
        for (r, l) in self.basis.iter().enumerate() {
            if let Some(c) = src.iter().position(|s| s == l) {
                return (r, c);
            }
        }
        unreachable!("consecutive contexts always share a label")
    }

    /// Smallest `|entry|²` of the 2x2 block coupling the changed labels.
    pub fn reflectivity(&self) -> f64 {
        let (pr, pc) = self.passthrough();
        let mut min = f64::INFINITY;
        for r in (0..3).filter(|&r| r != pr) {
            for c in (0..3).filter(|&c| c != pc) {
                min = min.min(self.transfer.entry(r, c).norm_sqr());
            }
        }
        min
    }

    /// Max deviation of the passthrough row and column from a unit vector.
    pub fn passthrough_deviation(&self) -> f64 {
        let (pr, pc) = self.passthrough();
        let mut dev: f64 = 0.0;
        for k in 0..3 {
            let row_target = if k == pc { 1.0 } else { 0.0 };
            let col_target = if k == pr { 1.0 } else { 0.0 };
            dev = dev.max((self.transfer.entry(pr, k).norm() - row_target).abs());
            dev = dev.max((self.transfer.entry(k, pc).norm() - col_target).abs());
        }
        dev
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    basis: PathBasis,
    stages: Vec<Stage>,
}

impl Network {
    /// Build the network from an arbitrary path basis. Fails if any
    /// context is not orthonormal.
    pub fn from_basis(basis: PathBasis) -> Result<Self> {
        let changes = CONTEXTS
            .iter()
            .map(|ctx| basis_change(&basis.context_vectors(ctx)))
            .collect::<Result<Vec<_>>>()?;
        let stages = (0..5)
            .map(|k| {
                let next = (k + 1) % 5;
                Stage {
                    index: k,
                    basis: CONTEXTS[next],
                    transfer: changes[next].compose(&changes[k].adjoint()),
                }
            })
            .collect();
        Ok(Self { basis, stages })
    }

    pub fn basis(&self) -> &PathBasis {
        &self.basis
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Product of all stage transfers, first stage applied first.
    pub fn total_transfer(&self) -> TransferOperator {
        self.stages
            .iter()
            .fold(TransferOperator::identity(), |acc, s| s.transfer.compose(&acc))
    }

    pub fn reflectivities(&self) -> [f64; 5] {
        std::array::from_fn(|k| self.stages[k].reflectivity())
    }

    /// Stage after which `label` first appears, with its coordinate slot.
    pub fn attachment(label: PathLabel) -> Option<(usize, usize)> {
        (0..5).find_map(|k| {
            CONTEXTS[(k + 1) % 5]
                .iter()
                .position(|l| *l == label)
                .map(|slot| (k, slot))
        })
    }
}

/// The canonical five-stage interferometer.
pub fn build_network() -> Network {
    Network::from_basis(canonical_paths()).expect("canonical contexts are orthonormal")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Action {
    Block,
    /// Phase shift in radians.
    Phase(f64),
    /// Amplitude transmission in `[0, 1]`.
    Attenuate(f64),
}

impl Action {
    fn factor(self) -> Complex64 {
        match self {
            Action::Block => Complex64::new(0.0, 0.0),
            Action::Phase(phi) => Complex64::from_polar(1.0, phi),
            Action::Attenuate(tau) => Complex64::new(tau, 0.0),
        }
    }

    fn is_lossy(self) -> bool {
        !matches!(self, Action::Phase(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Modifier {
    pub target: PathLabel,
    pub action: Action,
}

impl Modifier {
    pub fn block(target: PathLabel) -> Self {
        Self { target, action: Action::Block }
    }

    pub fn phase(target: PathLabel, phi: f64) -> Self {
        Self { target, action: Action::Phase(phi) }
    }

    pub fn attenuate(target: PathLabel, tau: f64) -> Self {
        Self { target, action: Action::Attenuate(tau) }
    }
}

/// Detection probabilities at output ports 1, 2, 3, not renormalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputDistribution {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub survival: f64,
}

impl OutputDistribution {
    pub fn new(p: [f64; 3]) -> Self {
        Self { p1: p[0], p2: p[1], p3: p[2], survival: p.iter().sum() }
    }

    pub fn probabilities(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }

    /// Probability at a 1-based port.
    pub fn port(&self, port: usize) -> Result<f64> {
        match port {
            1 => Ok(self.p1),
            2 => Ok(self.p2),
            3 => Ok(self.p3),
            other => Err(Error::InvalidPort(other)),
        }
    }
}

/// Per-stage diagonal modifier operators, validated.
fn modifier_plan(mods: &[Modifier]) -> Result<[Option<TransferOperator>; 5]> {
    let mut factors = [[Complex64::new(1.0, 0.0); 3]; 5];
    let mut touched = [false; 5];
    let mut seen: Vec<PathLabel> = Vec::with_capacity(mods.len());
    for m in mods {
        if !m.target.is_interior() {
            return Err(Error::InvalidModifierTarget(m.target));
        }
        if seen.contains(&m.target) {
            return Err(Error::DuplicateModifier(m.target));
        }
        seen.push(m.target);
        match m.action {
            Action::Attenuate(tau) if !(0.0..=1.0).contains(&tau) => {
                return Err(Error::InvalidTransmission(tau));
            }
            Action::Phase(phi) if !phi.is_finite() => {
                return Err(Error::Schema(format!("phase {phi} is not finite")));
            }
            _ => {}
        }
        let (stage, slot) = Network::attachment(m.target).expect("interior labels appear in a context");
        factors[stage][slot] *= m.action.factor();
        touched[stage] = true;
    }
    let mut plan: [Option<TransferOperator>; 5] = [None; 5];
    for k in 0..5 {
        if touched[k] {
            plan[k] = Some(TransferOperator::diagonal(factors[k])?);
        }
    }
    Ok(plan)
}

/// The whole network with the given modifiers as a single operator.
pub fn compile(network: &Network, mods: &[Modifier]) -> Result<TransferOperator> {
    let plan = modifier_plan(mods)?;
    Ok(network
        .stages
        .iter()
        .zip(plan.iter())
        .fold(TransferOperator::identity(), |acc, (stage, m)| {
            let acc = stage.transfer.compose(&acc);
            match m {
                Some(op) => op.compose(&acc),
                None => acc,
            }
        }))
}

/// Propagate `psi` through the network with the given interior
/// modifiers. Output probabilities are not renormalized.
pub fn run(network: &Network, psi: &StateVector, mods: &[Modifier]) -> Result<OutputDistribution> {
    let psi = psi.require_normalized(LOAD_TOL)?;
    let plan = modifier_plan(mods)?;
    let out = network
        .stages
        .iter()
        .zip(plan.iter())
        .fold(psi, |s, (stage, m)| {
            let s = stage.transfer.apply(&s);
            match m {
                Some(op) => op.apply(&s),
                None => s,
            }
        });
    Ok(OutputDistribution::new(out.amplitudes().map(|a| a.norm_sqr())))
}

/// `P(port | blocked) - P(port)`.
pub fn counterfactual_gain(
    network: &Network,
    psi: &StateVector,
    blocked: PathLabel,
    port: usize,
) -> Result<f64> {
    if !(1..=3).contains(&port) {
        return Err(Error::InvalidPort(port));
    }
    let with = run(network, psi, &[Modifier::block(blocked)])?;
    let without = run(network, psi, &[])?;
    Ok(with.port(port)? - without.port(port)?)
}

/// Contextuality witness from output statistics with and without an
/// absorber in `f`: `[P(3|X_f) - P(3)] - ½[P(1|X_f) + P(2|X_f)]`.
pub fn witness_from_outputs(free: &OutputDistribution, blocked: &OutputDistribution) -> f64 {
    (blocked.p3 - free.p3) - 0.5 * (blocked.p1 + blocked.p2)
}

/// Both witness evaluations and the underlying statistics for one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessReport {
    pub witness_direct: f64,
    pub witness_from_outputs: f64,
    pub gain: f64,
    pub p_f: f64,
    pub p_d1: f64,
    pub p_d2: f64,
    pub free: OutputDistribution,
    pub blocked: OutputDistribution,
}

pub fn witness_report(network: &Network, psi: &StateVector) -> Result<WitnessReport> {
    use crate::contexts::path_probability;
    let free = run(network, psi, &[])?;
    let blocked = run(network, psi, &[Modifier::block(PathLabel::F)])?;
    let basis = network.basis();
    Ok(WitnessReport {
        witness_direct: witness_direct(basis, psi),
        witness_from_outputs: witness_from_outputs(&free, &blocked),
        gain: blocked.p3 - free.p3,
        p_f: path_probability(basis, psi, PathLabel::F),
        p_d1: path_probability(basis, psi, PathLabel::D1),
        p_d2: path_probability(basis, psi, PathLabel::D2),
        free,
        blocked,
    })
}

fn scan<F>(network: &Network, psi: &StateVector, grid: &[f64], modifier: F) -> Result<FringeDataset>
where
    F: Fn(f64) -> Modifier,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let points = grid
        .iter()
        .map(|&x| {
            let d = run(network, psi, &[modifier(x)])?;
            Ok(FringePoint { setting: x, values: d.probabilities() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FringeDataset { points, mode: DatasetMode::Ideal })
}

/// Output distributions with a phase shifter on `target` at each setting.
pub fn phase_scan(
    network: &Network,
    psi: &StateVector,
    target: PathLabel,
    grid: &[f64],
) -> Result<FringeDataset> {
    scan(network, psi, grid, |phi| Modifier::phase(target, phi))
}

/// Amplitude transmission of the tunable absorber at MZI phase `theta`:
/// zero at `theta = 0`, unity at `theta = π`.
pub fn mzi_transmission(theta: f64) -> f64 {
    (theta / 2.0).sin().abs().min(1.0)
}

/// Output distributions with a tunable absorber on `target`.
pub fn transmittance_scan(
    network: &Network,
    psi: &StateVector,
    target: PathLabel,
    theta_grid: &[f64],
) -> Result<FringeDataset> {
    scan(network, psi, theta_grid, |theta| {
        Modifier::attenuate(target, mzi_transmission(theta))
    })
}

/// Evenly spaced settings from `from` to `to` inclusive.
pub fn linear_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(Error::EmptyGrid);
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { to } else { from + h * i as f64 }).collect())
}

/// Default phase grid: 25 settings over one period.
pub fn default_phase_grid() -> Vec<f64> {
    linear_grid(0.0, 2.0 * PI, 25).expect("nonempty")
}

/// Survival probability implied by an absorber of power transmittance
/// `t` on a path occupied with probability `p_target`.
pub fn expected_survival(t: f64, p_target: f64) -> f64 {
    1.0 - (1.0 - t) * p_target
}

/// True if any modifier can remove probability.
pub fn is_lossy(mods: &[Modifier]) -> bool {
    mods.iter().any(|m| m.action.is_lossy())
}
