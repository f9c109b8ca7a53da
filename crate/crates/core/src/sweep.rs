//! State-space sweeps of the witness and the counterfactual gain.

use serde::Serialize;

use crate::contexts::{path_probability, PathLabel};
use crate::interferometer::{compile, witness_report, Modifier, Network, WitnessReport};
use crate::linalg::{StateVector, TransferOperator};
use crate::states::{haar_states, SweepGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub witness: f64,
    pub gain: f64,
    pub p_f: f64,
    pub p_d1: f64,
    pub p_d2: f64,
}

impl SweepRow {
    #[cfg(test)]
    fn from_report(alpha: f64, beta: f64, r: &WitnessReport) -> Self {
        Self {
            alpha,
            beta,
            witness: r.witness_direct,
            gain: r.gain,
            p_f: r.p_f,
            p_d1: r.p_d1,
            p_d2: r.p_d2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub max_witness: f64,
    pub argmax_alpha: f64,
    pub argmax_beta: f64,
}

fn report(network: &Network, psi: &StateVector) -> WitnessReport {
    witness_report(network, psi).expect("sweep states are normalized")
}

/// Free and blocked networks folded into one operator each.
struct Kernel<'a> {
    network: &'a Network,
    free: TransferOperator,
    blocked: TransferOperator,
}

impl<'a> Kernel<'a> {
    fn new(network: &'a Network) -> Self {
        Self {
            network,
            free: compile(network, &[]).expect("no modifiers"),
            blocked: compile(network, &[Modifier::block(PathLabel::F)]).expect("valid modifier"),
        }
    }

    fn eval(&self, grid: &SweepGrid, k: usize) -> SweepRow {
        let (alpha, beta) = grid.angles(k);
        let psi = SweepGrid::state_at(alpha, beta);
        let basis = self.network.basis();
        let p_f = path_probability(basis, &psi, PathLabel::F);
        let p_d1 = path_probability(basis, &psi, PathLabel::D1);
        let p_d2 = path_probability(basis, &psi, PathLabel::D2);
        let p3 = |op: &TransferOperator| op.apply(&psi).amplitude(2).norm_sqr();
        SweepRow {
            alpha,
            beta,
            witness: p_f - p_d1 - p_d2,
            gain: p3(&self.blocked) - p3(&self.free),
            p_f,
            p_d1,
            p_d2,
        }
    }
}

/// Evaluate every grid point. Rows come back in grid order regardless of
/// how the work is scheduled.
pub fn sweep(network: &Network, grid: &SweepGrid) -> Vec<SweepRow> {
    let kernel = Kernel::new(network);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..grid.len())
            .into_par_iter()
            .map(|k| kernel.eval(grid, k))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..grid.len()).map(|k| kernel.eval(grid, k)).collect()
    }
}

/// Largest witness over the rows; first row wins ties.
pub fn summarize(rows: &[SweepRow]) -> Option<SweepSummary> {
    let best = rows
        .iter()
        .fold(None::<&SweepRow>, |best, r| match best {
            Some(b) if b.witness >= r.witness => Some(b),
            _ => Some(r),
        })?;
    Some(SweepSummary {
        max_witness: best.witness,
        argmax_alpha: best.alpha,
        argmax_beta: best.beta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSample {
    pub index: usize,
    pub state: StateVector,
    pub report: WitnessReport,
}

/// Seeded Haar-random states in place of the real grid.
pub fn complex_sweep(network: &Network, seed: u64, count: usize) -> Vec<ComplexSample> {
    haar_states(seed, count)
        .into_iter()
        .enumerate()
        .map(|(index, state)| ComplexSample { index, state, report: report(network, &state) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contexts::max_witness;
    use crate::interferometer::build_network;
    use crate::states::NamedState;

    #[test]
    fn nested_refinement_never_lowers_the_maximum() {
        let net = build_network();
        let mut last = f64::NEG_INFINITY;
        for res in [3, 5, 9, 17, 33, 65] {
            let grid = SweepGrid::new(res).unwrap();
            let s = summarize(&sweep(&net, &grid)).unwrap();
            assert!(s.max_witness >= last - 1e-15, "res {res}");
            last = s.max_witness;
        }
        let exact = max_witness(net.basis()).value;
        assert!(exact - last < 2e-3 && last <= exact + 1e-12);
    }

    #[test]
    fn rows_are_in_grid_order_and_witness_below_gain() {
        let net = build_network();
        let grid = SweepGrid::new(21).unwrap();
        let rows = sweep(&net, &grid);
        assert_eq!(rows.len(), 441);
        for (k, r) in rows.iter().enumerate() {
            assert_eq!((r.alpha, r.beta), grid.angles(k));
            assert!(r.witness <= r.gain + 1e-12);
        }
    }

    #[test]
    fn boundary_state_cell_has_gain_without_violation() {
        let net = build_network();
        let (a, b) = SweepGrid::angles_of(&NamedState::Bf.state());
        for res in [21, 101, 500] {
            let grid = SweepGrid::new(res).unwrap();
            let k = grid.nearest(a, b);
            let (ga, gb) = grid.angles(k);
            let row = SweepRow::from_report(ga, gb, &report(&net, &SweepGrid::state_at(ga, gb)));
            assert!(row.witness < 0.0 && row.gain > 0.0, "res {res}: {row:?}");
        }
    }

    #[test]
    fn folded_kernel_matches_stagewise_propagation() {
        let net = build_network();
        let grid = SweepGrid::new(31).unwrap();
        for (k, row) in sweep(&net, &grid).iter().enumerate() {
            let (a, b) = grid.angles(k);
            let want = SweepRow::from_report(a, b, &report(&net, &SweepGrid::state_at(a, b)));
            for (x, y) in [(row.witness, want.witness), (row.gain, want.gain), (row.p_f, want.p_f)] {
                assert!((x - y).abs() < 1e-13, "{row:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn complex_sweep_is_seeded() {
        let net = build_network();
        let a = complex_sweep(&net, 3, 10);
        let b = complex_sweep(&net, 3, 10);
        assert_eq!(a, b);
        assert_eq!(a[9].index, 9);
    }
}
