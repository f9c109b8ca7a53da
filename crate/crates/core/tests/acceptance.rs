//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use ctxscope::check::IDENTITY_SEED;
use ctxscope::contexts::CONTEXTS;
use ctxscope::fixtures::{fringe_coefficients, measured};
use ctxscope::interferometer::{default_phase_grid, STAGE_REFLECTIVITIES};
use ctxscope::linalg::gram_deviation;
use ctxscope::states::haar_states;
use ctxscope::stats::{ideal_harmonics, DatasetMode, FringePoint};
use ctxscope::sweep::{complex_sweep, summarize, sweep, SweepRow};
use ctxscope::*;

struct Fail(String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(e.to_string())
    }
}

type Outcome = Result<String, Fail>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), Fail> {
    if cond {
        Ok(())
    } else {
        Err(Fail(msg.into()))
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), Fail> {
    ensure(
        (got - want).abs() <= tol,
        format!("{what}: {got:.6} vs {want:.6} (|delta| {:.3e} > {tol:.0e})", (got - want).abs()),
    )
}

const NAMED: [NamedState; 3] = [NamedState::Nf, NamedState::Bf, NamedState::V0];

fn ac1_output_identity() -> Outcome {
    let start = Instant::now();
    let net = build_network();
    let mut worst: f64 = 0.0;
    for psi in haar_states(IDENTITY_SEED, 10_000) {
        let free = run(&net, &psi, &[])?;
        let blocked = run(&net, &psi, &[Modifier::block(PathLabel::F)])?;
        let delta = witness_direct(net.basis(), &psi) - witness_from_outputs(&free, &blocked);
        worst = worst.max(delta.abs());
    }
    let elapsed = start.elapsed();
    ensure(worst < 1e-12, format!("max |delta| {worst:.3e}"))?;
    ensure(elapsed < Duration::from_secs(1), format!("runtime {elapsed:?}"))?;
    Ok(format!("max |delta| {worst:.2e} over 10000 states in {elapsed:.2?}"))
}

fn ac2_witness_values() -> Outcome {
    let basis = canonical_paths();
    let exact = [1.0 / 9.0, -2.0 / 51.0, 2.0 / 9.0];
    let mut parts = Vec::new();
    for (s, w) in NAMED.iter().zip(exact) {
        let got = witness_direct(&basis, &s.state());
        close(got, w, 1e-12, &format!("{s} closed form"))?;
        let meas = measured(*s).unwrap().witness;
        close(got, meas, 0.01, &format!("{s} vs measured"))?;
        parts.push(format!("{s} {got:+.4} (meas {meas:+.3})"));
    }
    Ok(parts.join(", "))
}

fn ac3_gains() -> Outcome {
    let net = build_network();
    let exact = [7.0 / 27.0, 19.0 / 153.0, 1.0 / 3.0];
    let mut parts = Vec::new();
    for (s, g) in NAMED.iter().zip(exact) {
        let got = counterfactual_gain(&net, &s.state(), PathLabel::F, 3)?;
        close(got, g, 1e-12, &format!("{s} closed form"))?;
        let meas = measured(*s).unwrap().gain;
        close(got, meas, 0.01, &format!("{s} vs measured"))?;
        parts.push(format!("{s} {got:.4} (meas {meas:.3})"));
    }
    Ok(parts.join(", "))
}

fn ac4_blocked_distributions() -> Outcome {
    let net = build_network();
    let exact = [
        [4.0 / 27.0, 4.0 / 27.0, 16.0 / 27.0],
        [25.0 / 153.0, 25.0 / 153.0, 100.0 / 153.0],
        [1.0 / 9.0, 1.0 / 9.0, 4.0 / 9.0],
    ];
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (s, want) in NAMED.iter().zip(exact) {
        let psi = s.state();
        let d = run(&net, &psi, &[Modifier::block(PathLabel::F)])?;
        let p = d.probabilities();
        let meas = measured(*s).unwrap().blocked;
        for k in 0..3 {
            close(p[k], want[k], 1e-12, &format!("{s} P({}|Xf) closed form", k + 1))?;
            let dev = (p[k] - meas[k]).abs();
            worst = worst.max(dev);
            if dev > 0.02 {
                failures.push(format!(
                    "{s} P({}|Xf) ideal {:.4} vs measured {:.3}: |delta| {dev:.4} > 0.02",
                    k + 1,
                    p[k],
                    meas[k]
                ));
            }
        }
        let p_f = path_probability(net.basis(), &psi, PathLabel::F);
        close(d.survival, 1.0 - p_f, 1e-12, &format!("{s} survival"))?;
    }
    if failures.is_empty() {
        Ok(format!("closed forms exact, max |delta| vs measured {worst:.4}"))
    } else {
        Err(Fail(failures.join("; ")))
    }
}

fn ac5_fringe_models() -> Outcome {
    let net = build_network();
    for s in NAMED {
        let data = phase_scan(&net, &s.state(), PathLabel::F, &default_phase_grid())?;
        let h = ideal_harmonics(&data)?;
        let (a, b) = fringe_coefficients(s).unwrap();
        for k in 0..3 {
            close(h[k].a, a[k], 1e-12, &format!("{s} port {} offset", k + 1))?;
            close(h[k].b, b[k], 1e-12, &format!("{s} port {} cosine", k + 1))?;
            close(h[k].c, 0.0, 1e-12, &format!("{s} port {} sine", k + 1))?;
        }
    }
    Ok("offsets and cosine coefficients of all 9 port fringes within 1e-12".into())
}

fn ac6_network_integrity() -> Outcome {
    let net = build_network();
    let tele = net.total_transfer().identity_deviation();
    ensure(tele <= 1e-12, format!("telescoping deviation {tele:.3e}"))?;
    for ctx in CONTEXTS {
        let dev = gram_deviation(&net.basis().context_vectors(&ctx));
        ensure(dev <= 1e-12, format!("context {ctx:?} Gram deviation {dev:.3e}"))?;
    }
    let refl = net.reflectivities();
    for (k, (got, want)) in refl.iter().zip(STAGE_REFLECTIVITIES).enumerate() {
        close(*got, want, 1e-12, &format!("stage {} overlap^2", k + 1))?;
    }
    Ok(format!(
        "telescoping {tele:.1e}, stage overlap^2 ({:.4}, {:.4}, {:.4}, {:.4}, {:.4})",
        refl[0], refl[1], refl[2], refl[3], refl[4]
    ))
}

fn ac7_maximal_violation(rows: &[SweepRow], elapsed: Duration) -> Outcome {
    let exact = (33f64.sqrt() - 3.0) / 12.0;
    let eigen = max_witness(&canonical_paths()).value;
    close(eigen, exact, 1e-12, "eigen value")?;
    let s = summarize(rows).ok_or(Fail("empty sweep".into()))?;
    close(s.max_witness, exact, 1e-3, "sweep maximum")?;
    let v0 = witness_direct(&canonical_paths(), &NamedState::V0.state());
    ensure(v0 < exact, format!("V0 witness {v0} not below maximum"))?;
    ensure(elapsed < Duration::from_secs(10), format!("runtime {elapsed:?}"))?;
    Ok(format!(
        "sweep max {:.6} at (alpha {:.4}, beta {:.4}), eigen {exact:.6}, V0 {v0:.4}, {elapsed:.2?}",
        s.max_witness, s.argmax_alpha, s.argmax_beta
    ))
}

fn ac8_statistics() -> Outcome {
    let net = build_network();
    let state = NamedState::Bf.state();
    let ideal = phase_scan(&net, &state, PathLabel::F, &default_phase_grid())?;
    let model = FringeModel::for_state(&net, &state, PathLabel::F)?;
    let truth = 0.95;
    let trials = 500u64;
    let mut covered = [0u32; 3];
    for t in 0..trials {
        let data = noisy_fringe(&ideal, truth, 1000.0, 100.0, t * 1000)?;
        let fit = fit_fringe(&data, &model)?;
        for (k, p) in fit.ports.iter().enumerate() {
            if (p.visibility - truth).abs() <= 3.0 * p.stderr {
                covered[k] += 1;
            }
        }
    }
    let rates = covered.map(|c| c as f64 / trials as f64);
    for (k, r) in rates.iter().enumerate() {
        ensure(*r >= 0.99, format!("port {} coverage {r:.3} < 0.99", k + 1))?;
    }

    // Exact model scaled to counts.
    let points = ideal
        .points
        .iter()
        .map(|p| FringePoint { setting: p.setting, values: p.values.map(|v| (v * 1e6).round()) })
        .collect();
    let noiseless = FringeDataset { points, mode: DatasetMode::Counts { rate: 1e6, duration: 1.0 } };
    let fit = fit_fringe(&noiseless, &model)?;
    for (k, p) in fit.ports.iter().enumerate() {
        close(p.visibility, 1.0, 1e-6, &format!("noiseless port {}", k + 1))?;
    }
    Ok(format!(
        "3-stderr coverage ({:.3}, {:.3}, {:.3}) over {trials} trials; noiseless V within 1e-6",
        rates[0], rates[1], rates[2]
    ))
}

fn ac9_necessity(rows: &[SweepRow]) -> Outcome {
    let net = build_network();
    let mut checked = 0usize;
    for r in rows {
        if r.witness > 0.0 {
            ensure(r.gain >= r.witness, format!("grid point {r:?}"))?;
            checked += 1;
        }
    }
    for s in complex_sweep(&net, 0xc0ffee, 10_000) {
        let r = s.report;
        if r.witness_direct > 0.0 {
            ensure(r.gain >= r.witness_direct, format!("complex sample {}", s.index))?;
            checked += 1;
        }
    }
    let grid = SweepGrid::new(500).unwrap();
    let (a, b) = SweepGrid::angles_of(&NamedState::Bf.state());
    let cell = rows[grid.nearest(a, b)];
    ensure(cell.gain > 0.0 && cell.witness < 0.0, format!("Bf cell {cell:?}"))?;
    Ok(format!(
        "{checked} violating states all have gain >= witness; Bf cell gain {:.4}, witness {:.4}",
        cell.gain, cell.witness
    ))
}

fn main() {
    let net = build_network();
    let start = Instant::now();
    let rows = sweep(&net, &SweepGrid::new(500).unwrap());
    let sweep_time = start.elapsed();

    let results: Vec<(&str, Outcome)> = vec![
        ("AC1 output-side witness identity", ac1_output_identity()),
        ("AC2 witness of Nf, Bf, V0", ac2_witness_values()),
        ("AC3 counterfactual gains", ac3_gains()),
        ("AC4 blocked distributions", ac4_blocked_distributions()),
        ("AC5 phase-fringe models", ac5_fringe_models()),
        ("AC6 network integrity", ac6_network_integrity()),
        ("AC7 maximal violation", ac7_maximal_violation(&rows, sweep_time)),
        ("AC8 statistical layer", ac8_statistics()),
        ("AC9 gain is necessary", ac9_necessity(&rows)),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(Fail(detail)) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
