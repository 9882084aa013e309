//! Run configuration: JSON file, command-line overrides and the
//! `ERGOLAB_SEED` environment variable, resolved into one [`Settings`].
//!
//! Precedence, lowest first: built-in defaults, `--config` file, the
//! environment seed, explicit flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use ergolab::control::{CostModel, GateTiming};
use ergolab::measurement::{DEFAULT_REPETITIONS, DEFAULT_SHOTS};
use ergolab::protocols::{fig2_theta, Mode, ProtocolConfig, Sampling, DEFAULT_HOLD};
use ergolab::QubitParams;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

pub const SEED_ENV: &str = "ERGOLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Ideal,
    Noisy,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Preset name or `{omega_q, t1, t2, n_th}`.
    pub device: Option<Value>,
    /// Preset name, explicit parameters, or `"same"`.
    pub gate_device: Option<Value>,
    /// Radians, `"fig2"`, or `"<x>pi"`.
    pub theta_s: Option<Value>,
    pub hold_time: Option<f64>,
    /// Number or `"default"`.
    pub kappa: Option<Value>,
    pub tau: Option<f64>,
    pub dt: Option<f64>,
    pub mode: Option<ModeName>,
    pub sampled_noise: Option<bool>,
    pub shots: Option<u64>,
    pub repetitions: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Device during holds: working-point, sweet-spot.
    #[arg(long, global = true)]
    pub device: Option<String>,

    /// Device during gates: a preset name or "same" [default: sweet-spot].
    #[arg(long, global = true)]
    pub gate_device: Option<String>,

    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeName>,

    /// Integrate the dynamics under sampled mode with noise (true) or exactly (false).
    #[arg(long, global = true, value_name = "BOOL")]
    pub sampled_noise: Option<bool>,

    /// Cost per radian of gate angle, or "default" for 1/(omega_q tau).
    #[arg(long, global = true)]
    pub kappa: Option<String>,

    /// Gate duration in seconds.
    #[arg(long, global = true)]
    pub tau: Option<f64>,

    /// Integration step in seconds.
    #[arg(long, global = true)]
    pub dt: Option<f64>,

    /// Shots per measurement basis.
    #[arg(long, global = true)]
    pub shots: Option<u64>,

    #[arg(long, global = true)]
    pub repetitions: Option<usize>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub protocol: ProtocolConfig,
    pub device_name: String,
    pub gate_device_name: String,
    pub mode: Mode,
    pub theta_s: f64,
    pub hold_time: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

fn config_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

pub fn load_file(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("fig2") {
        return Ok(fig2_theta());
    }
    let value = if let Some(rest) = t.strip_suffix("pi") {
        let rest = rest.trim().trim_end_matches('*');
        let factor = if rest.is_empty() {
            1.0
        } else {
            rest.parse::<f64>().map_err(|_| bad_angle(s))?
        };
        factor * PI
    } else if let Some(den) = t.strip_prefix("pi/") {
        PI / den.parse::<f64>().map_err(|_| bad_angle(s))?
    } else {
        t.parse::<f64>().map_err(|_| bad_angle(s))?
    };
    if !(0.0..=PI).contains(&value) {
        return Err(config_err(format!("theta_s = {value} outside [0, pi]")));
    }
    Ok(value)
}

fn bad_angle(s: &str) -> CliError {
    config_err(format!(
        "cannot parse angle {s:?}; use radians, \"fig2\" or \"<x>pi\""
    ))
}

fn angle_value(v: &Value) -> Result<f64, CliError> {
    match v {
        Value::Number(n) => parse_angle(&n.to_string()),
        Value::String(s) => parse_angle(s),
        _ => Err(config_err("theta_s must be a number or string")),
    }
}

fn preset(name: &str) -> Result<QubitParams, CliError> {
    QubitParams::preset(name).ok_or_else(|| {
        config_err(format!(
            "unknown device {name:?}; presets: working-point, sweet-spot"
        ))
    })
}

fn device_value(v: &Value) -> Result<(String, QubitParams), CliError> {
    match v {
        Value::String(s) => Ok((s.clone(), preset(s)?)),
        Value::Object(_) => {
            let p = QubitParams::deserialize(v).map_err(|e| config_err(format!("device: {e}")))?;
            Ok(("custom".into(), p))
        }
        _ => Err(config_err("device must be a preset name or an object")),
    }
}

fn kappa_value(v: &Value) -> Result<Option<f64>, CliError> {
    match v {
        Value::String(s) => parse_kappa(s),
        Value::Number(n) => Ok(n.as_f64()),
        _ => Err(config_err("kappa must be a number or \"default\"")),
    }
}

fn parse_kappa(s: &str) -> Result<Option<f64>, CliError> {
    if s.eq_ignore_ascii_case("default") {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| config_err(format!("cannot parse kappa {s:?}")))
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => {
            v.trim().parse::<u64>().map(Some).map_err(|_| {
                config_err(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))
            })
        }
        Err(_) => Ok(None),
    }
}

/// Merges file, environment and flags. `theta_flag` and `hold_flag` come
/// from subcommands that take them.
pub fn resolve(
    args: &CommonArgs,
    theta_flag: Option<&str>,
    hold_flag: Option<f64>,
) -> Result<Settings, CliError> {
    let file = match &args.config {
        Some(p) => load_file(p)?,
        None => RunConfig::default(),
    };

    let (device_name, params) = match (&args.device, &file.device) {
        (Some(name), _) => (name.clone(), preset(name)?),
        (None, Some(v)) => device_value(v)?,
        (None, None) => ("working-point".into(), QubitParams::working_point()),
    };

    let gate_spec = match (&args.gate_device, &file.gate_device) {
        (Some(name), _) => Value::String(name.clone()),
        (None, Some(v)) => v.clone(),
        (None, None) => Value::String("sweet-spot".into()),
    };
    let (gate_device_name, gate_params) = match &gate_spec {
        Value::String(s) if s == "same" => (device_name.clone(), params),
        v => device_value(v)?,
    };

    let theta_s = match (theta_flag, &file.theta_s) {
        (Some(s), _) => parse_angle(s)?,
        (None, Some(v)) => angle_value(v)?,
        (None, None) => fig2_theta(),
    };
    let hold_time = hold_flag.or(file.hold_time).unwrap_or(DEFAULT_HOLD);
    if !(hold_time >= 0.0) || !hold_time.is_finite() {
        return Err(config_err(format!(
            "hold time must be >= 0, got {hold_time}"
        )));
    }

    let mut timing = GateTiming::resonant(&params);
    if let Some(tau) = args.tau.or(file.tau) {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(config_err(format!("tau must be > 0, got {tau}")));
        }
        timing = timing.with_tau(tau);
    }
    let kappa = match (&args.kappa, &file.kappa) {
        (Some(s), _) => parse_kappa(s)?,
        (None, Some(v)) => kappa_value(v)?,
        (None, None) => None,
    };
    let cost = match kappa {
        Some(k) => CostModel::new(k).map_err(config_err)?,
        None => CostModel::for_device(&params, timing.tau),
    };

    let dt = args.dt.or(file.dt);
    if let Some(dt) = dt {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(config_err(format!("dt must be > 0, got {dt}")));
        }
    }
    let mut protocol = ProtocolConfig::new(params)
        .with_timing(timing)
        .with_cost(cost);
    protocol.dt = dt;
    if gate_params != params {
        protocol = protocol.with_gate_params(gate_params);
    }

    let seed = match args.seed {
        Some(s) => s,
        None => env_seed()?.or(file.seed).unwrap_or(0),
    };
    let sampling = Sampling {
        shots: args.shots.or(file.shots).unwrap_or(DEFAULT_SHOTS),
        repetitions: args
            .repetitions
            .or(file.repetitions)
            .unwrap_or(DEFAULT_REPETITIONS),
        seed,
    };
    if sampling.shots == 0 {
        return Err(config_err("shots must be >= 1"));
    }
    if sampling.repetitions < 2 {
        return Err(config_err(format!(
            "repetitions must be >= 2, got {}",
            sampling.repetitions
        )));
    }
    let mode = match args.mode.or(file.mode).unwrap_or(ModeName::Ideal) {
        ModeName::Ideal => Mode::Ideal,
        ModeName::Noisy => Mode::Noisy,
        ModeName::Sampled => Mode::Sampled {
            sampling,
            noisy: args.sampled_noise.or(file.sampled_noise).unwrap_or(true),
        },
    };

    let file_output = file.output.unwrap_or_default();
    let output = args.output.clone().or(file_output.path);
    let format = args.format.or(file_output.format).unwrap_or_else(|| {
        match output
            .as_ref()
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
        {
            Some("json") => Format::Json,
            _ => Format::Csv,
        }
    });

    Ok(Settings {
        protocol,
        device_name,
        gate_device_name,
        mode,
        theta_s,
        hold_time,
        output,
        format,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("fig2").unwrap(), fig2_theta());
        assert!((parse_angle("0.5pi").unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((parse_angle("pi/2").unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert!(parse_angle("4").is_err());
        assert!(parse_angle("abc").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"devise": "working-point"}"#).is_err());
        assert!(
            serde_json::from_str::<RunConfig>(r#"{"output": {"path": "x", "fmt": "csv"}}"#)
                .is_err()
        );
    }

    #[test]
    fn explicit_device_is_validated() {
        let v: Value =
            serde_json::from_str(r#"{"omega_q": 3.0e10, "t1": 1e-5, "t2": 3e-5}"#).unwrap();
        let err = device_value(&v).unwrap_err().to_string();
        assert!(err.contains("T2 <= 2*T1"), "{err}");
        let v: Value =
            serde_json::from_str(r#"{"omega_q": 3.0e10, "t1": 1e-5, "t2": 1e-5, "x": 1}"#).unwrap();
        assert!(device_value(&v).is_err());
    }

    #[test]
    fn defaults() {
        let s = resolve(&CommonArgs::default(), None, None).unwrap();
        assert_eq!(s.device_name, "working-point");
        assert_eq!(s.gate_device_name, "sweet-spot");
        assert_eq!(s.protocol.gate_params, Some(QubitParams::sweet_spot()));
        assert_eq!(s.theta_s, fig2_theta());
        assert_eq!(s.hold_time, DEFAULT_HOLD);
        assert_eq!(s.mode, Mode::Ideal);
        assert_eq!(s.format, Format::Csv);
    }

    #[test]
    fn zero_kappa_is_a_config_error() {
        let args = CommonArgs {
            kappa: Some("0".into()),
            ..Default::default()
        };
        assert!(matches!(
            resolve(&args, None, None),
            Err(CliError::Config(_))
        ));
    }
}
