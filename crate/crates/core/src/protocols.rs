//! Dephasing, direct and sequential work extraction.
//!
//! Each run starts from R_Y(θ_S)|0⟩ and records the state after every step.
//! Extracted work is always the energy drop between consecutive recorded
//! states, never gate bookkeeping, so losses under decoherence show up in the
//! numbers directly.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::control::{self, apply_ideal, make_uc, CostModel, Gate, GateTiming};
use crate::dynamics::{self, NoiseModel};
use crate::ergotropy::{self, dephase, QubitParams};
use crate::measurement::{self, derive_seed, repeat_stats, TomographyResult};
use crate::state::DensityMatrix;
use crate::{Error, Result};

/// Hold time of the dephasing protocol, 4 μs.
pub const DEFAULT_HOLD: f64 = 4e-6;

/// θ_S = 2·arccos(√3/3), the Rabi angle of (√2|1⟩ + |0⟩)/√3.
pub fn fig2_theta() -> f64 {
    2.0 * (3f64.sqrt() / 3.0).acos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Dephasing,
    Direct,
    Sequential,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Dephasing => "dephasing",
            ProtocolKind::Direct => "direct",
            ProtocolKind::Sequential => "sequential",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    pub shots: u64,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            shots: measurement::DEFAULT_SHOTS,
            repetitions: measurement::DEFAULT_REPETITIONS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Mode {
    /// Exact unitaries; a nonzero hold is the exact dephasing channel.
    Ideal,
    /// Gates and holds integrated under T1/T2 decoherence.
    Noisy,
    /// Tomographic readout of every step, repeated; `noisy` selects the
    /// dynamics underneath.
    Sampled { sampling: Sampling, noisy: bool },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Ideal => "ideal",
            Mode::Noisy => "noisy",
            Mode::Sampled { .. } => "sampled",
        }
    }

    fn noisy(&self) -> bool {
        matches!(self, Mode::Noisy | Mode::Sampled { noisy: true, .. })
    }

    fn sampling(&self) -> Option<Sampling> {
        match self {
            Mode::Sampled { sampling, .. } => Some(*sampling),
            _ => None,
        }
    }
}

/// Everything a run needs besides the protocol choice and θ_S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Device during holds; also sets ω_q for the default cost.
    pub params: QubitParams,
    /// Device during gates, if different from `params`.
    #[serde(default)]
    pub gate_params: Option<QubitParams>,
    pub timing: GateTiming,
    pub cost: CostModel,
    /// Integration step; defaults to min(T1, T2, τ)/1000.
    pub dt: Option<f64>,
}

impl ProtocolConfig {
    /// 80 ns resonant flat pulses and κ = 1/(ω_q τ).
    pub fn new(params: QubitParams) -> Self {
        let timing = GateTiming::resonant(&params);
        Self {
            params,
            gate_params: None,
            timing,
            cost: CostModel::for_device(&params, timing.tau),
            dt: None,
        }
    }

    /// Drive gates under the decoherence of `gate_params` instead.
    pub fn with_gate_params(mut self, gate_params: QubitParams) -> Self {
        self.gate_params = Some(gate_params);
        self
    }

    pub fn with_cost(mut self, cost: CostModel) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_timing(mut self, timing: GateTiming) -> Self {
        self.timing = timing;
        self
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel::from_params(&self.params)
    }

    pub fn gate_noise(&self) -> NoiseModel {
        NoiseModel::from_params(&self.gate_params.unwrap_or(self.params))
    }

    pub fn step(&self) -> f64 {
        self.dt.unwrap_or_else(|| {
            dynamics::default_dt(&self.noise(), self.timing.tau)
                .min(dynamics::default_dt(&self.gate_noise(), self.timing.tau))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub label: String,
    /// The simulated state (exact in ideal mode, integrated in noisy mode).
    pub state: DensityMatrix,
    /// Present in sampled mode.
    pub tomography: Option<TomographyResult>,
    pub energy: f64,
    pub coherence: f64,
    pub energy_se: Option<f64>,
    pub coherence_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preparation {
    pub gate: String,
    pub angle: f64,
    pub stored_energy: f64,
    pub cost: f64,
    pub efficiency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub label: String,
    pub gate: String,
    pub angle: f64,
    /// Index into `steps` of the state the gate produced.
    pub step: usize,
    pub work: f64,
    pub work_se: Option<f64>,
    pub cost: f64,
    /// `None` when the work is negative or work and cost both vanish.
    pub efficiency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalExtraction {
    pub work: f64,
    pub work_se: Option<f64>,
    pub cost: f64,
    pub efficiency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceParams {
    pub theta_s: f64,
    pub hold_time: Option<f64>,
    pub device: QubitParams,
    pub gate_device: QubitParams,
    pub mode: String,
    pub noise: bool,
    pub kappa: f64,
    pub tau: f64,
    pub dt: Option<f64>,
    pub sampling: Option<Sampling>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTrace {
    pub protocol: ProtocolKind,
    pub preparation: Preparation,
    pub steps: Vec<TraceStep>,
    pub extractions: Vec<Extraction>,
    pub total: TotalExtraction,
    pub params: TraceParams,
}

impl ProtocolTrace {
    pub fn extraction(&self, label: &str) -> Option<&Extraction> {
        self.extractions.iter().find(|e| e.label == label)
    }

    /// Work of the named extraction, zero if the step was skipped.
    pub fn work(&self, label: &str) -> f64 {
        self.extraction(label).map_or(0.0, |e| e.work)
    }

    pub fn incoherent_work(&self) -> f64 {
        self.work("incoherent")
    }

    pub fn coherent_work(&self) -> f64 {
        self.work("coherent")
    }

    pub fn step(&self, label: &str) -> Option<&TraceStep> {
        self.steps.iter().find(|s| s.label == label)
    }
}

/// Applies gates and holds according to the mode.
struct Engine<'a> {
    cfg: &'a ProtocolConfig,
    noisy: bool,
    noise: NoiseModel,
    gate_noise: NoiseModel,
    dt: f64,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a ProtocolConfig, mode: &Mode) -> Self {
        Self {
            cfg,
            noisy: mode.noisy(),
            noise: cfg.noise(),
            gate_noise: cfg.gate_noise(),
            dt: cfg.step(),
        }
    }

    fn gate(&self, gate: &Gate, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if self.noisy {
            Ok(dynamics::apply_noisy(gate, rho, &self.gate_noise, self.dt)?.final_state)
        } else {
            Ok(apply_ideal(gate, rho))
        }
    }

    fn hold(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("hold time must be >= 0, got {t}")));
        }
        if self.noisy {
            Ok(dynamics::evolve_free(rho, &self.noise, t, self.dt)?.final_state)
        } else if t > 0.0 {
            Ok(dephase(rho))
        } else {
            Ok(*rho)
        }
    }

    fn timing(&self) -> &GateTiming {
        &self.cfg.timing
    }
}

struct Plan {
    prep: Gate,
    states: Vec<(String, DensityMatrix)>,
    /// (label, gate name, gate, index of the produced state)
    extractions: Vec<(String, String, Gate, usize)>,
}

fn check_theta(theta_s: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta_s) {
        return Err(Error::domain(format!(
            "theta_s = {theta_s} outside [0, pi]"
        )));
    }
    Ok(())
}

/// Prepare, hold for `hold_time`, then extract with V_π.
pub fn run_dephasing(
    theta_s: f64,
    hold_time: f64,
    cfg: &ProtocolConfig,
    mode: &Mode,
) -> Result<ProtocolTrace> {
    check_theta(theta_s)?;
    let engine = Engine::new(cfg, mode);
    let prep = Gate::ry(theta_s, engine.timing())?;
    let prepared = engine.gate(&prep, &DensityMatrix::ground())?;
    let held = engine.hold(&prepared, hold_time)?;
    let v_pi = Gate::v_pi(engine.timing());
    let passive = engine.gate(&v_pi, &held)?;
    let plan = Plan {
        prep,
        states: vec![
            ("prepared".into(), prepared),
            ("dephased".into(), held),
            ("passive".into(), passive),
        ],
        extractions: vec![("incoherent".into(), "V_pi".into(), v_pi, 2)],
    };
    finish(
        ProtocolKind::Dephasing,
        theta_s,
        Some(hold_time),
        plan,
        cfg,
        mode,
    )
}

/// Prepare, then undo the preparation with R_Y(−θ_S).
pub fn run_direct(theta_s: f64, cfg: &ProtocolConfig, mode: &Mode) -> Result<ProtocolTrace> {
    check_theta(theta_s)?;
    let engine = Engine::new(cfg, mode);
    let prep = Gate::ry(theta_s, engine.timing())?;
    let prepared = engine.gate(&prep, &DensityMatrix::ground())?;
    let inverse = Gate::ry(-theta_s, engine.timing())?;
    let after = engine.gate(&inverse, &prepared)?;
    let plan = Plan {
        prep,
        states: vec![("prepared".into(), prepared), ("ground".into(), after)],
        extractions: vec![("total".into(), "R_Y(-theta)".into(), inverse, 1)],
    };
    finish(ProtocolKind::Direct, theta_s, None, plan, cfg, mode)
}

/// Prepare, extract the incoherent part with V_π (only for θ_S > π/2), then
/// the coherent part with U_c.
pub fn run_sequential(theta_s: f64, cfg: &ProtocolConfig, mode: &Mode) -> Result<ProtocolTrace> {
    check_theta(theta_s)?;
    let engine = Engine::new(cfg, mode);
    let prep = Gate::ry(theta_s, engine.timing())?;
    let prepared = engine.gate(&prep, &DensityMatrix::ground())?;
    let mut states = vec![("prepared".to_string(), prepared)];
    let mut extractions = Vec::new();
    let mut current = prepared;
    if theta_s > FRAC_PI_2 {
        let v_pi = Gate::v_pi(engine.timing());
        current = engine.gate(&v_pi, &current)?;
        states.push(("sigma".into(), current));
        extractions.push(("incoherent".into(), "V_pi".into(), v_pi, states.len() - 1));
    }
    let uc = make_uc(&current, engine.timing())?;
    current = engine.gate(&uc, &current)?;
    states.push(("passive".into(), current));
    extractions.push(("coherent".into(), "U_c".into(), uc, states.len() - 1));
    let plan = Plan {
        prep,
        states,
        extractions,
    };
    finish(ProtocolKind::Sequential, theta_s, None, plan, cfg, mode)
}

pub fn run(
    kind: ProtocolKind,
    theta_s: f64,
    hold_time: f64,
    cfg: &ProtocolConfig,
    mode: &Mode,
) -> Result<ProtocolTrace> {
    match kind {
        ProtocolKind::Dephasing => run_dephasing(theta_s, hold_time, cfg, mode),
        ProtocolKind::Direct => run_direct(theta_s, cfg, mode),
        ProtocolKind::Sequential => run_sequential(theta_s, cfg, mode),
    }
}

fn step_efficiency(work: f64, cost: f64) -> Option<f64> {
    if work < 0.0 {
        return None;
    }
    control::efficiency(work, cost).ok()
}

fn finish(
    kind: ProtocolKind,
    theta_s: f64,
    hold_time: Option<f64>,
    plan: Plan,
    cfg: &ProtocolConfig,
    mode: &Mode,
) -> Result<ProtocolTrace> {
    let sampling = mode.sampling();

    // Per-step energies: one value per repetition (a single exact value
    // outside sampled mode).
    let mut steps = Vec::with_capacity(plan.states.len());
    let mut energy_samples: Vec<Vec<f64>> = Vec::with_capacity(plan.states.len());
    for (k, (label, state)) in plan.states.iter().enumerate() {
        match sampling {
            None => {
                let energy = ergotropy::energy(state);
                energy_samples.push(vec![energy]);
                steps.push(TraceStep {
                    label: label.clone(),
                    state: *state,
                    tomography: None,
                    energy,
                    coherence: ergotropy::coherence(state),
                    energy_se: None,
                    coherence_se: None,
                });
            }
            Some(s) => {
                let seed = derive_seed(s.seed, k as u64);
                let estimates =
                    measurement::repetition_estimates(state, s.shots, s.repetitions, seed)?;
                let energies: Vec<f64> = estimates.iter().map(ergotropy::energy).collect();
                let coherences: Vec<f64> = estimates.iter().map(ergotropy::coherence).collect();
                let e = repeat_stats(&energies)?;
                let c = repeat_stats(&coherences)?;
                let tomography = measurement::summarize_repetitions(&estimates, s.shots, seed)?;
                energy_samples.push(energies);
                steps.push(TraceStep {
                    label: label.clone(),
                    state: *state,
                    tomography: Some(tomography),
                    energy: e.mean,
                    coherence: c.mean,
                    energy_se: Some(e.std_error),
                    coherence_se: Some(c.std_error),
                });
            }
        }
    }

    let drop = |from: usize, to: usize| -> Vec<f64> {
        energy_samples[from]
            .iter()
            .zip(&energy_samples[to])
            .map(|(a, b)| a - b)
            .collect()
    };
    let summarize = |values: Vec<f64>| -> Result<(f64, Option<f64>)> {
        if sampling.is_some() {
            let est = repeat_stats(&values)?;
            Ok((est.mean, Some(est.std_error)))
        } else {
            Ok((values[0], None))
        }
    };

    let mut extractions = Vec::with_capacity(plan.extractions.len());
    // Per-repetition sum of the extraction works; losses during holds are
    // not work.
    let mut total_samples = vec![0.0; energy_samples[0].len()];
    for (label, name, gate, to) in &plan.extractions {
        let samples = drop(to - 1, *to);
        total_samples
            .iter_mut()
            .zip(&samples)
            .for_each(|(t, w)| *t += w);
        let (work, work_se) = summarize(samples)?;
        let cost = cfg.cost.cost(gate);
        extractions.push(Extraction {
            label: label.clone(),
            gate: name.clone(),
            angle: gate.angle,
            step: *to,
            work,
            work_se,
            cost,
            efficiency: step_efficiency(work, cost),
        });
    }

    let (total_work, total_se) = summarize(total_samples)?;
    let total_cost: f64 = extractions.iter().map(|e| e.cost).sum();
    let total = TotalExtraction {
        work: total_work,
        work_se: total_se,
        cost: total_cost,
        efficiency: step_efficiency(total_work, total_cost),
    };

    let stored = steps[0].energy;
    let prep_cost = cfg.cost.cost(&plan.prep);
    let preparation = Preparation {
        gate: "R_Y(theta)".into(),
        angle: plan.prep.angle,
        stored_energy: stored,
        cost: prep_cost,
        efficiency: step_efficiency(stored, prep_cost),
    };

    Ok(ProtocolTrace {
        protocol: kind,
        preparation,
        steps,
        extractions,
        total,
        params: TraceParams {
            theta_s,
            hold_time,
            device: cfg.params,
            gate_device: cfg.gate_params.unwrap_or(cfg.params),
            mode: mode.name().into(),
            noise: mode.noisy(),
            kappa: cfg.cost.kappa(),
            tau: cfg.timing.tau,
            dt: if mode.noisy() { Some(cfg.step()) } else { None },
            sampling,
        },
    })
}
