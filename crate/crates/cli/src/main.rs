mod args;

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use ctxscope::check::run_checks;
use ctxscope::csvio::{read_dataset, write_dataset};
use ctxscope::interferometer::{linear_grid, Action};
use ctxscope::reproduce::reproduce;
use ctxscope::stats::{sample_dataset, CountRecord, DatasetMode};
use ctxscope::sweep::{complex_sweep, summarize, sweep};
use ctxscope::*;
use serde_json::{json, Value};

use args::{Cli, Command, Format, ModifierArgs, ScanArgs};

/// Exit status and message of a failed command.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonOrthonormalBasis { .. } | Error::NotUnitary { .. } | Error::NotContractive { .. } => 1,
            Error::DegenerateDesign { .. } => 3,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    let net = build_network();
    match &cli.command {
        Command::Check(a) => cmd_check(cli, a),
        Command::Run(a) => cmd_run(cli, &net, &a.state.state, &a.mods),
        Command::Witness(a) => cmd_witness(cli, &net, &a.state),
        Command::PhaseScan(a) => cmd_scan(cli, &net, a, ScanKind::Phase),
        Command::TransScan(a) => cmd_scan(cli, &net, a, ScanKind::Transmittance),
        Command::Sweep(a) => cmd_sweep(cli, &net, a),
        Command::Sample(a) => cmd_sample(cli, &net, a),
        Command::Fit(a) => cmd_fit(cli, &net, a),
        Command::Reproduce => cmd_reproduce(cli, &net),
    }
}

fn format_of(cli: &Cli, default: Format, allowed: &[Format]) -> std::result::Result<Format, Failure> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::usage(format!("format {f:?} is not supported by this command").to_lowercase()))
    }
}

fn emit(cli: &Cli, text: &str) -> CmdResult {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    if cli.out.as_os_str() == "-" {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("stdout: {e}")))
    } else {
        std::fs::write(&cli.out, text).map_err(|e| Failure::usage(format!("{}: {e}", cli.out.display())))
    }
}

/// Pretty JSON with keys in alphabetical order.
fn to_json<T: serde::Serialize>(value: &T) -> String {
    let v: Value = serde_json::to_value(value).expect("serializable");
    serde_json::to_string_pretty(&v).expect("valid JSON")
}

fn parse_pair(spec: &str, what: &str) -> std::result::Result<(PathLabel, f64), Failure> {
    let (label, value) = spec
        .split_once('=')
        .ok_or_else(|| Failure::usage(format!("--{what} expects `label=value`, got `{spec}`")))?;
    let label = label.trim().parse::<PathLabel>()?;
    let value = value
        .trim()
        .parse::<f64>()
        .map_err(|e| Failure::usage(format!("--{what} value `{value}`: {e}")))?;
    Ok((label, value))
}

fn modifiers(m: &ModifierArgs) -> std::result::Result<Vec<Modifier>, Failure> {
    let mut out: Vec<Modifier> = m.block.iter().map(|&l| Modifier::block(l)).collect();
    for p in &m.phase {
        let (l, phi) = parse_pair(p, "phase")?;
        out.push(Modifier::phase(l, phi));
    }
    for a in &m.attenuate {
        let (l, tau) = parse_pair(a, "attenuate")?;
        out.push(Modifier::attenuate(l, tau));
    }
    Ok(out)
}

fn describe(m: &Modifier) -> String {
    match m.action {
        Action::Block => format!("block {}", m.target),
        Action::Phase(phi) => format!("phase {}={phi}", m.target),
        Action::Attenuate(tau) => format!("attenuate {}={tau}", m.target),
    }
}

fn cmd_check(cli: &Cli, a: &args::CheckArgs) -> CmdResult {
    let format = format_of(cli, Format::Text, &[Format::Text, Format::Json])?;
    let mut basis = canonical_paths();
    if let Some(label) = a.perturb_basis {
        let v = basis.vector(label);
        let tilt = StateVector::from_real(a.perturb_size, a.perturb_size, a.perturb_size);
        basis = basis.with_vector(label, v.add(&tilt));
    }
    let report = run_checks(&basis, a.samples);
    match format {
        Format::Json => emit(
            cli,
            &to_json(&json!({ "entries": report.entries, "passed": report.passed() })),
        )?,
        _ => emit(cli, &report.to_string())?,
    }
    match report.first_failure() {
        None => Ok(()),
        Some(e) => Err(Failure { code: 1, message: format!("check failed: {}", e.name) }),
    }
}

fn distribution_text(d: &OutputDistribution) -> String {
    format!("{:.6} {:.6} {:.6}  survival {:.6}", d.p1, d.p2, d.p3, d.survival)
}

fn cmd_run(cli: &Cli, net: &Network, state: &StateSpec, m: &ModifierArgs) -> CmdResult {
    let format = format_of(cli, Format::Text, &[Format::Text, Format::Csv, Format::Json])?;
    let mods = modifiers(m)?;
    let d = run(net, &state.state(), &mods)?;
    let text = match format {
        Format::Json => to_json(&json!({
            "distribution": d,
            "modifiers": mods.iter().map(describe).collect::<Vec<_>>(),
            "state": state.label(),
        })),
        Format::Csv => format!("p1,p2,p3,survival\n{:.9},{:.9},{:.9},{:.9}", d.p1, d.p2, d.p3, d.survival),
        Format::Text => {
            let labels: Vec<String> = mods.iter().map(describe).collect();
            let mods = if labels.is_empty() { "none".to_string() } else { labels.join(", ") };
            format!("state {}\nmodifiers {mods}\nP(1) P(2) P(3)  {}", state.label(), distribution_text(&d))
        }
    };
    emit(cli, &text)
}

fn cmd_witness(cli: &Cli, net: &Network, state: &StateSpec) -> CmdResult {
    let format = format_of(cli, Format::Text, &[Format::Text, Format::Json])?;
    let r = witness_report(net, &state.state())?;
    let text = match format {
        Format::Json => {
            let mut v = serde_json::to_value(r).expect("serializable");
            v["state"] = Value::String(state.label());
            to_json(&v)
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "state                 {}", state.label());
            let _ = writeln!(s, "witness (direct)      {:+.4}", r.witness_direct);
            let _ = writeln!(s, "witness (outputs)     {:+.4}", r.witness_from_outputs);
            let _ = writeln!(s, "gain P(3|Xf) - P(3)   {:+.4}", r.gain);
            let _ = writeln!(s, "P(f) P(D1) P(D2)      {:.4} {:.4} {:.4}", r.p_f, r.p_d1, r.p_d2);
            let _ = writeln!(s, "free                  {}", distribution_text(&r.free));
            let _ = write!(s, "blocked f             {}", distribution_text(&r.blocked));
            s
        }
    };
    emit(cli, &text)
}

#[derive(Clone, Copy)]
enum ScanKind {
    Phase,
    Transmittance,
}

fn cmd_scan(cli: &Cli, net: &Network, a: &ScanArgs, kind: ScanKind) -> CmdResult {
    let format = format_of(cli, Format::Csv, &[Format::Csv, Format::Json])?;
    let (lo, hi) = match kind {
        ScanKind::Phase => (0.0, 2.0 * std::f64::consts::PI),
        ScanKind::Transmittance => (0.0, std::f64::consts::PI),
    };
    let grid = linear_grid(a.from.unwrap_or(lo), a.to.unwrap_or(hi), a.steps)?;
    let psi = a.state.state.state();
    let ideal = match kind {
        ScanKind::Phase => phase_scan(net, &psi, a.target, &grid)?,
        ScanKind::Transmittance => transmittance_scan(net, &psi, a.target, &grid)?,
    };
    let (rate, duration) = (a.exposure.rate, a.exposure.duration);
    let data = match (a.noise, kind) {
        (None, _) => ideal,
        (Some(v), ScanKind::Phase) => noisy_fringe(&ideal, v, rate, duration, cli.seed)?,
        (Some(v), ScanKind::Transmittance) => {
            if v != 1.0 {
                return Err(Failure::usage("reduced visibility applies to phase scans only; use --noise 1"));
            }
            sample_dataset(&ideal, rate, duration, cli.seed)?
        }
    };
    let text = match format {
        Format::Json => to_json(&data),
        _ => write_dataset(&data),
    };
    emit(cli, &text)
}

fn cmd_sweep(cli: &Cli, net: &Network, a: &args::SweepArgs) -> CmdResult {
    let format = format_of(cli, Format::Csv, &[Format::Csv, Format::Json])?;
    if a.complex {
        let samples = complex_sweep(net, cli.seed, a.samples);
        let best = samples
            .iter()
            .fold(None::<&ctxscope::sweep::ComplexSample>, |b, s| match b {
                Some(b) if b.report.witness_direct >= s.report.witness_direct => Some(b),
                _ => Some(s),
            });
        let text = match format {
            Format::Json => to_json(&json!({
                "max_witness": best.map(|b| b.report.witness_direct),
                "argmax_index": best.map(|b| b.index),
                "samples": samples.iter().map(|s| json!({
                    "index": s.index,
                    "amplitudes": s.state.amplitudes().iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                    "gain": s.report.gain,
                    "p_d1": s.report.p_d1,
                    "p_d2": s.report.p_d2,
                    "p_f": s.report.p_f,
                    "witness": s.report.witness_direct,
                })).collect::<Vec<_>>(),
            })),
            _ => {
                let mut s = String::from("index,a1r,a1i,a2r,a2i,a3r,a3i,witness,gain,p_f,p_d1,p_d2\n");
                for c in &samples {
                    let _ = write!(s, "{}", c.index);
                    for z in c.state.amplitudes() {
                        let _ = write!(s, ",{:.9},{:.9}", z.re, z.im);
                    }
                    let r = c.report;
                    let _ = writeln!(
                        s,
                        ",{:.9},{:.9},{:.9},{:.9},{:.9}",
                        r.witness_direct, r.gain, r.p_f, r.p_d1, r.p_d2
                    );
                }
                if let Some(b) = best {
                    let _ = writeln!(s, "# max witness {:.9} at index {}", b.report.witness_direct, b.index);
                }
                s
            }
        };
        return emit(cli, &text);
    }

    let grid = SweepGrid::new(a.resolution)?;
    let rows = sweep(net, &grid);
    let summary = summarize(&rows).expect("grid is nonempty");
    let text = match format {
        Format::Json => to_json(&json!({ "rows": rows, "summary": summary })),
        _ => {
            let mut s = String::from("alpha,beta,witness,gain,p_f,p_d1,p_d2\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}",
                    r.alpha, r.beta, r.witness, r.gain, r.p_f, r.p_d1, r.p_d2
                );
            }
            let _ = writeln!(
                s,
                "# max witness {:.9} at alpha {:.9} beta {:.9}",
                summary.max_witness, summary.argmax_alpha, summary.argmax_beta
            );
            s
        }
    };
    emit(cli, &text)
}

fn cmd_sample(cli: &Cli, net: &Network, a: &args::SampleArgs) -> CmdResult {
    let format = format_of(cli, Format::Csv, &[Format::Csv, Format::Json])?;
    let mods = modifiers(&a.mods)?;
    let d = run(net, &a.state.state.state(), &mods)?;
    let (rate, duration) = (a.exposure.rate, a.exposure.duration);
    let rec: CountRecord = sample_counts(&d, rate, duration, cli.seed)?;
    let text = match format {
        Format::Json => to_json(&json!({
            "counts": rec.counts,
            "duration": duration,
            "rate": rate,
            "seed": rec.seed,
        })),
        _ => {
            let point = ctxscope::stats::FringePoint {
                setting: rec.setting,
                values: rec.counts.map(|n| n as f64),
            };
            write_dataset(&FringeDataset { points: vec![point], mode: DatasetMode::Counts { rate, duration } })
        }
    };
    emit(cli, &text)
}

fn read_input(path: &Path) -> std::result::Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }
}

fn cmd_fit(cli: &Cli, net: &Network, a: &args::FitArgs) -> CmdResult {
    let format = format_of(cli, Format::Json, &[Format::Json, Format::Text])?;
    let data = read_dataset(&read_input(&a.input)?)?;
    let model = FringeModel::for_state(net, &a.model.state(), a.target)?;
    let fit = fit_fringe(&data, &model)?;
    let text = match format {
        Format::Text => {
            let mut s = format!("model {}\n", a.model.label());
            for (k, p) in fit.ports.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "port {}: V = {:.4} +/- {:.4}  (a {:.6}, b {:+.6}, c {:+.6}; model a {:.6}, b {:+.6})",
                    k + 1,
                    p.visibility,
                    p.stderr,
                    p.a,
                    p.b,
                    p.c,
                    model.offset[k],
                    model.cosine[k]
                );
            }
            s
        }
        _ => to_json(&json!({
            "model": { "name": a.model.label(), "offset": model.offset, "cosine": model.cosine },
            "ports": fit.ports,
            "visibilities": fit.visibilities(),
        })),
    };
    emit(cli, &text)
}

fn cmd_reproduce(cli: &Cli, net: &Network) -> CmdResult {
    let format = format_of(cli, Format::Text, &[Format::Text, Format::Json])?;
    let rep = reproduce(net);
    let text = match format {
        Format::Json => to_json(&rep),
        _ => rep.to_string(),
    };
    emit(cli, &text)
}
