//! Photon-counting simulation and fringe-visibility fitting.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::contexts::PathLabel;
use crate::error::{Error, Result};
use crate::interferometer::{run, Modifier, Network, OutputDistribution};
use crate::linalg::StateVector;

/// Detected photons per second used when no rate is given.
pub const DEFAULT_RATE: f64 = 1000.0;
/// Integration time per setting, seconds.
pub const DEFAULT_DURATION: f64 = 100.0;

/// Below this mean the sampler inverts the Poisson CDF exactly.
const INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DatasetMode {
    Ideal,
    /// `rate` is detected photons per second, `duration` is seconds per
    /// setting.
    Counts { rate: f64, duration: f64 },
}

impl DatasetMode {
    fn name(&self) -> &'static str {
        match self {
            DatasetMode::Ideal => "ideal",
            DatasetMode::Counts { .. } => "counts",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FringePoint {
    /// Control setting in radians.
    pub setting: f64,
    /// Per-port probabilities (ideal) or counts.
    pub values: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FringeDataset {
    pub points: Vec<FringePoint>,
    pub mode: DatasetMode,
}

impl FringeDataset {
    pub fn settings(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.setting).collect()
    }

    /// Check the per-mode value invariants.
    pub fn validate(&self) -> Result<()> {
        for p in &self.points {
            if !p.setting.is_finite() {
                return Err(Error::Schema(format!("setting {} is not finite", p.setting)));
            }
            for v in p.values {
                let ok = match self.mode {
                    DatasetMode::Ideal => (-1e-12..=1.0 + 1e-12).contains(&v),
                    DatasetMode::Counts { .. } => v >= 0.0 && v.fract() == 0.0 && v.is_finite(),
                };
                if !ok {
                    return Err(Error::Schema(format!(
                        "value {v} is invalid in {} mode",
                        self.mode.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountRecord {
    pub setting: f64,
    pub counts: [u64; 3],
    pub seed: u64,
}

/// Draw one Poisson variate with mean `mu`.
///
/// Exact CDF inversion for small means, normal approximation with
/// continuity correction otherwise.
pub fn poisson<R: Rng + ?Sized>(rng: &mut R, mu: f64) -> u64 {
    if mu <= 0.0 {
        return 0;
    }
    if mu < INVERSION_LIMIT {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = (-mu).exp();
        let mut cdf = p;
        while u > cdf && p > 0.0 {
            k += 1;
            p *= mu / k as f64;
            cdf += p;
        }
        k
    } else {
        let z: f64 = rng.sample(StandardNormal);
        (mu + mu.sqrt() * z + 0.5).floor().max(0.0) as u64
    }
}

fn check_exposure(rate: f64, duration: f64) -> Result<()> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidRate(rate));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidDuration(duration));
    }
    Ok(())
}

fn sample_probabilities(p: [f64; 3], rate: f64, duration: f64, seed: u64) -> Result<CountRecord> {
    check_exposure(rate, duration)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = rate * duration;
    let counts = p.map(|pi| poisson(&mut rng, scale * pi.max(0.0)));
    Ok(CountRecord { setting: 0.0, counts, seed })
}

/// Poisson counts for each port with mean `rate · duration · p_i`.
pub fn sample_counts(
    dist: &OutputDistribution,
    rate: f64,
    duration: f64,
    seed: u64,
) -> Result<CountRecord> {
    sample_probabilities(dist.probabilities(), rate, duration, seed)
}

/// Poisson-sample every point of an ideal dataset as-is. Point `i` uses
/// seed `seed + i`.
pub fn sample_dataset(ideal: &FringeDataset, rate: f64, duration: f64, seed: u64) -> Result<FringeDataset> {
    require_mode(ideal, "ideal")?;
    check_exposure(rate, duration)?;
    let points = ideal
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let rec = sample_probabilities(p.values, rate, duration, seed.wrapping_add(i as u64))?;
            Ok(FringePoint { setting: p.setting, values: rec.counts.map(|n| n as f64) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FringeDataset { points, mode: DatasetMode::Counts { rate, duration } })
}

fn require_mode(data: &FringeDataset, expected: &'static str) -> Result<()> {
    let found = data.mode.name();
    if found != expected {
        return Err(Error::WrongMode { expected, found });
    }
    Ok(())
}

/// `a + b cos φ + c sin φ` per port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Harmonic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Harmonic {
    pub fn eval(&self, phi: f64) -> f64 {
        self.a + self.b * phi.cos() + self.c * phi.sin()
    }
}

struct Regression {
    coef: [Harmonic; 3],
    /// `(XᵀX)⁻¹`, shared by all ports.
    inv_gram: Matrix3<f64>,
    residual_var: [f64; 3],
}

fn distinct_settings(settings: &[f64]) -> usize {
    let tau = std::f64::consts::TAU;
    let mut reduced: Vec<f64> = settings.iter().map(|s| s.rem_euclid(tau)).collect();
    reduced.sort_by(f64::total_cmp);
    let mut distinct = 0;
    let mut last = f64::NAN;
    for s in reduced {
        if !(s - last).abs().le(&1e-9) {
            distinct += 1;
            last = s;
        }
    }
    // 0 and 2π are the same setting.
    if distinct > 1 {
        let min = settings.iter().map(|s| s.rem_euclid(tau)).fold(f64::INFINITY, f64::min);
        let max = settings.iter().map(|s| s.rem_euclid(tau)).fold(f64::NEG_INFINITY, f64::max);
        if min < 1e-9 && tau - max < 1e-9 {
            distinct -= 1;
        }
    }
    distinct
}

/// Ordinary least squares on `{1, cos φ, sin φ}` for each port.
fn regress(settings: &[f64], ys: &[[f64; 3]]) -> Result<Regression> {
    let distinct = distinct_settings(settings);
    if distinct < 3 {
        return Err(Error::DegenerateDesign { distinct });
    }
    let rows: Vec<Vector3<f64>> = settings.iter().map(|&p| Vector3::new(1.0, p.cos(), p.sin())).collect();
    let gram: Matrix3<f64> = rows.iter().map(|x| x * x.transpose()).sum();
    let inv_gram = gram
        .try_inverse()
        .filter(|m| m.iter().all(|v| v.is_finite()))
        .ok_or(Error::DegenerateDesign { distinct })?;
    let n = settings.len();
    let dof = n.saturating_sub(3);
    let mut coef = [Harmonic { a: 0.0, b: 0.0, c: 0.0 }; 3];
    let mut residual_var = [f64::NAN; 3];
    for port in 0..3 {
        let xty: Vector3<f64> = rows.iter().zip(ys).map(|(x, y)| x * y[port]).sum();
        let beta = inv_gram * xty;
        let h = Harmonic { a: beta[0], b: beta[1], c: beta[2] };
        let rss: f64 = settings.iter().zip(ys).map(|(&p, y)| (y[port] - h.eval(p)).powi(2)).sum();
        coef[port] = h;
        if dof > 0 {
            residual_var[port] = rss / dof as f64;
        }
    }
    Ok(Regression { coef, inv_gram, residual_var })
}

/// Exact fringe coefficients of a noiseless dataset.
pub fn ideal_harmonics(ideal: &FringeDataset) -> Result<[Harmonic; 3]> {
    require_mode(ideal, "ideal")?;
    let settings = ideal.settings();
    let ys: Vec<[f64; 3]> = ideal.points.iter().map(|p| p.values).collect();
    Ok(regress(&settings, &ys)?.coef)
}

/// Replace the ideal fringe `a + b cos φ (+ c sin φ)` of every port by
/// `a + V(b cos φ + c sin φ)` and Poisson-sample it.
pub fn noisy_fringe(
    ideal: &FringeDataset,
    visibility: f64,
    rate: f64,
    duration: f64,
    seed: u64,
) -> Result<FringeDataset> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::VisibilityOutOfRange(visibility));
    }
    check_exposure(rate, duration)?;
    let h = ideal_harmonics(ideal)?;
    let points = ideal
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let phi = p.setting;
            let probs: [f64; 3] = std::array::from_fn(|k| {
                let hk = h[k];
                (hk.a + visibility * (hk.b * phi.cos() + hk.c * phi.sin())).clamp(0.0, 1.0)
            });
            let rec = sample_probabilities(probs, rate, duration, seed.wrapping_add(i as u64))?;
            Ok(FringePoint { setting: phi, values: rec.counts.map(|n| n as f64) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FringeDataset { points, mode: DatasetMode::Counts { rate, duration } })
}

/// Theoretical fringe `a + b cos φ` per port at unit visibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FringeModel {
    pub offset: [f64; 3],
    pub cosine: [f64; 3],
}

impl FringeModel {
    /// Model for phase modulation of `target`, from the network response
    /// at `φ = 0` and `φ = π`.
    pub fn for_state(network: &Network, psi: &StateVector, target: PathLabel) -> Result<Self> {
        let at = |phi: f64| run(network, psi, &[Modifier::phase(target, phi)]);
        let p0 = at(0.0)?.probabilities();
        let pi = at(std::f64::consts::PI)?.probabilities();
        Ok(Self {
            offset: std::array::from_fn(|k| 0.5 * (p0[k] + pi[k])),
            cosine: std::array::from_fn(|k| 0.5 * (p0[k] - pi[k])),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PortFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub visibility: f64,
    /// Standard error of `visibility`; NaN with exactly three settings.
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub ports: [PortFit; 3],
}

impl FitResult {
    pub fn visibilities(&self) -> [f64; 3] {
        self.ports.map(|p| p.visibility)
    }
}

/// Fit normalized counts against a fringe model.
///
/// Counts at each setting are divided by their three-port total, then each
/// port is regressed on `{1, cos φ, sin φ}`. The visibility is
/// `√(b² + c²) / |b_model|` and is never clamped.
pub fn fit_fringe(data: &FringeDataset, model: &FringeModel) -> Result<FitResult> {
    require_mode(data, "counts")?;
    data.validate()?;
    let mut settings = Vec::with_capacity(data.points.len());
    let mut ys = Vec::with_capacity(data.points.len());
    for p in &data.points {
        let total: f64 = p.values.iter().sum();
        if total > 0.0 {
            settings.push(p.setting);
            ys.push(p.values.map(|v| v / total));
        }
    }
    let reg = regress(&settings, &ys)?;
    let ports = std::array::from_fn(|k| {
        let h = reg.coef[k];
        let scale = model.cosine[k].abs();
        let amp = h.b.hypot(h.c);
        let visibility = amp / scale;
        let cov = reg.inv_gram * reg.residual_var[k];
        let (gb, gc) = if amp > 0.0 {
            (h.b / amp, h.c / amp)
        } else {
            (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
        };
        let var_amp = gb * gb * cov[(1, 1)] + 2.0 * gb * gc * cov[(1, 2)] + gc * gc * cov[(2, 2)];
        PortFit {
            a: h.a,
            b: h.b,
            c: h.c,
            visibility,
            stderr: if var_amp.is_nan() { f64::NAN } else { var_amp.max(0.0).sqrt() / scale },
        }
    });
    Ok(FitResult { ports })
}
