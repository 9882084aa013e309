use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::path::Path;

use ergolab::analysis::{find_theta_e, find_theta_m, grid, surface_ec_scaled, sweep_theta};
use ergolab::dynamics::{evolve_free_sampled, free_decay_closed_form};
use ergolab::export::{surface_csv, sweep_csv, sweep_json, trace_csv, trace_json, trajectory_csv};
use ergolab::protocols::{run, Mode, ProtocolKind, ProtocolTrace};
use ergolab::DensityMatrix;
use serde_json::json;

use crate::config::{Format, Settings};
use crate::{CliError, Range};

/// Largest free-decay deviation `decay-check` accepts.
const DECAY_TOLERANCE: f64 = 1e-6;

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Writes `content` to the configured output, or stdout when there is none.
/// Returns whether a file was written.
fn emit(s: &Settings, content: &str) -> Result<bool, CliError> {
    match &s.output {
        Some(path) => write_file(path, content).map(|_| true),
        None => {
            print!("{content}");
            Ok(false)
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn pm(value: f64, se: Option<f64>) -> String {
    match se {
        Some(se) => format!("{value:.6} ± {se:.6}"),
        None => format!("{value:.6}"),
    }
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.digits$}"))
}

fn describe_mode(mode: &Mode) -> String {
    match mode {
        Mode::Sampled { sampling, noisy } => format!(
            "sampled ({} shots x {} repetitions, seed {}, {} dynamics)",
            sampling.shots,
            sampling.repetitions,
            sampling.seed,
            if *noisy { "noisy" } else { "exact" }
        ),
        m => m.name().into(),
    }
}

fn summary(trace: &ProtocolTrace, s: &Settings) -> String {
    let mut out = String::new();
    let p = &trace.params;
    let _ = writeln!(out, "protocol   {}", trace.protocol.name());
    let _ = writeln!(out, "mode       {}", describe_mode(&s.mode));
    let _ = writeln!(
        out,
        "device     {} (gates: {})",
        s.device_name, s.gate_device_name
    );
    let _ = writeln!(
        out,
        "theta_s    {:.6} rad = {:.6} pi",
        p.theta_s,
        p.theta_s / PI
    );
    if let Some(h) = p.hold_time {
        let _ = writeln!(out, "hold       {h:e} s");
    }
    let _ = writeln!(out, "kappa      {:e}", p.kappa);
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<12}{:<26}{:<26}", "step", "energy", "coherence");
    for step in &trace.steps {
        let _ = writeln!(
            out,
            "{:<12}{:<26}{:<26}",
            step.label,
            pm(step.energy, step.energy_se),
            pm(step.coherence, step.coherence_se)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<12}{:<14}{:<26}{:<14}eta",
        "extraction", "gate", "work", "cost"
    );
    let prep = &trace.preparation;
    let _ = writeln!(
        out,
        "{:<12}{:<14}{:<26}{:<14.6e}{}",
        "(prepare)",
        prep.gate,
        format!("{:.6}", -prep.stored_energy),
        prep.cost,
        opt(prep.efficiency, 6)
    );
    for e in &trace.extractions {
        let _ = writeln!(
            out,
            "{:<12}{:<14}{:<26}{:<14.6e}{}",
            e.label,
            e.gate,
            pm(e.work, e.work_se),
            e.cost,
            opt(e.efficiency, 6)
        );
    }
    let t = &trace.total;
    let _ = writeln!(
        out,
        "{:<12}{:<14}{:<26}{:<14.6e}{}",
        "total",
        "",
        pm(t.work, t.work_se),
        t.cost,
        opt(t.efficiency, 6)
    );
    if trace.protocol == ProtocolKind::Sequential {
        let se = |label: &str| trace.extraction(label).and_then(|e| e.work_se);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "E_i = {}",
            pm(trace.incoherent_work(), se("incoherent"))
        );
        let _ = writeln!(out, "E_c = {}", pm(trace.coherent_work(), se("coherent")));
    }
    out
}

pub fn protocol(kind: ProtocolKind, s: &Settings) -> Result<(), CliError> {
    let trace = run(kind, s.theta_s, s.hold_time, &s.protocol, &s.mode)?;
    let export = match s.format {
        Format::Csv => trace_csv(&trace)?,
        Format::Json => with_newline(trace_json(&trace)?),
    };
    let table = summary(&trace, s);
    if emit(s, &export)? {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
    Ok(())
}

pub fn sweep(s: &Settings, n: usize, range: Range, optimum: bool) -> Result<(), CliError> {
    let lo = match range {
        Range::Full => 0.0,
        Range::Efficiency => FRAC_PI_2,
    };
    let thetas = grid(lo, PI, n).map_err(|e| CliError::Config(e.to_string()))?;
    let rows = sweep_theta(&thetas, &s.protocol, &s.mode)?;
    let optima = if optimum {
        Some((
            find_theta_m(s.protocol.cost)?,
            find_theta_e(s.protocol.cost)?,
        ))
    } else {
        None
    };
    let content = match s.format {
        Format::Csv => {
            let mut out = sweep_csv(&rows)?;
            if let Some((m, e)) = optima {
                let _ = writeln!(
                    out,
                    "# theta_m = {:.9} rad = {:.6} pi, C_m = {:.6}",
                    m.theta,
                    m.theta / PI,
                    m.coherence
                );
                let _ = writeln!(
                    out,
                    "# theta_e = {:.9} rad = {:.6} pi, C_e = {:.6}",
                    e.theta,
                    e.theta / PI,
                    e.coherence
                );
            }
            out
        }
        Format::Json => {
            let rows: serde_json::Value = serde_json::from_str(&sweep_json(&rows)?)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let optimum = optima.map(|(m, e)| {
                json!({
                    "theta_m": m.theta, "theta_m_over_pi": m.theta / PI, "c_m": m.coherence,
                    "theta_e": e.theta, "theta_e_over_pi": e.theta / PI, "c_e": e.coherence,
                })
            });
            let doc = json!({ "kappa": s.protocol.cost.kappa(), "rows": rows, "optimum": optimum });
            with_newline(
                serde_json::to_string_pretty(&doc).map_err(|e| CliError::Numeric(e.to_string()))?,
            )
        }
    };
    emit(s, &content)?;
    Ok(())
}

pub fn surface(s: &Settings, n_theta: usize, n_coherence: usize) -> Result<(), CliError> {
    if n_theta < 1 {
        return Err(CliError::Config("--grid must be >= 1".into()));
    }
    if n_coherence < 2 {
        return Err(CliError::Config("--coherence-points must be >= 2".into()));
    }
    // θ = π has no coherence to vary, so the grid stops one cell short.
    let thetas: Vec<f64> = (0..n_theta)
        .map(|k| FRAC_PI_2 + FRAC_PI_2 * k as f64 / n_theta as f64)
        .collect();
    let points = surface_ec_scaled(&thetas, n_coherence)?;
    let content = match s.format {
        Format::Csv => surface_csv(&points)?,
        Format::Json => {
            let rows: Vec<_> = points
                .iter()
                .map(|p| json!({ "theta_rad": p.theta, "coherence_nats": p.coherence, "e_coh": p.e_coh }))
                .collect();
            with_newline(
                serde_json::to_string_pretty(&rows)
                    .map_err(|e| CliError::Numeric(e.to_string()))?,
            )
        }
    };
    emit(s, &content)?;
    Ok(())
}

pub fn decay_check(
    s: &Settings,
    trajectory: Option<&Path>,
    samples: usize,
) -> Result<(), CliError> {
    if samples < 2 {
        return Err(CliError::Config("--samples must be >= 2".into()));
    }
    let rho0 = DensityMatrix::pure(s.theta_s)?;
    let noise = s.protocol.noise();
    let dt = s.protocol.step();
    let r = evolve_free_sampled(&rho0, &noise, s.hold_time, dt, samples)?;
    let mut worst = 0.0f64;
    for sample in &r.trajectory {
        let exact = free_decay_closed_form(&rho0, &noise, sample.time);
        worst = worst
            .max((sample.state.p1() - exact.p1()).abs())
            .max((sample.state.coherence_amplitude() - exact.coherence_amplitude()).norm());
    }
    let exact = free_decay_closed_form(&rho0, &noise, s.hold_time);
    let (t1, t2) = noise.times();
    let pass = worst <= DECAY_TOLERANCE;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "device     {} (T1 = {t1:e} s, T2 = {t2:e} s)",
        s.device_name
    );
    let _ = writeln!(
        out,
        "theta_s    {:.6} rad = {:.6} pi",
        s.theta_s,
        s.theta_s / PI
    );
    let _ = writeln!(
        out,
        "time       {:e} s in {} steps of {dt:.3e} s",
        s.hold_time, r.step_count
    );
    let _ = writeln!(
        out,
        "p1         rk4 {:.12}  closed form {:.12}",
        r.final_state.p1(),
        exact.p1()
    );
    let _ = writeln!(
        out,
        "|a|        rk4 {:.12}  closed form {:.12}",
        r.final_state.coherence_amplitude().norm(),
        exact.coherence_amplitude().norm()
    );
    let _ = writeln!(
        out,
        "max dev    {worst:.3e} over {} samples",
        r.trajectory.len()
    );
    let _ = writeln!(out, "trace      max drift {:.3e}", r.max_trace_drift);
    let _ = writeln!(
        out,
        "result     {} (tolerance {DECAY_TOLERANCE:e})",
        if pass { "PASS" } else { "FAIL" }
    );
    emit(s, &out)?;

    if let Some(path) = trajectory {
        write_file(path, &trajectory_csv(&r)?)?;
    }
    if pass {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "free decay deviates from the closed form by {worst:e}"
        )))
    }
}
