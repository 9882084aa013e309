//! Gates as axis-angle rotations driven by sampled pulse envelopes.
//!
//! Everything lives in the frame rotating at the drive frequency, with the
//! drive resonant with the qubit. A gate with unit axis n and angle φ is
//! U = exp(−iφ n·σ/2), which rotates the Bloch vector right-handedly by φ
//! about n. The drive Hamiltonian during the pulse is (g_d v(t)/2) n·σ, so
//! the rotation angle is the Rabi angle ∫ g_d v(t) dt.
//!
//! The thermodynamic cost of a gate of fixed duration τ is
//! Σ = (1/τ)∫‖H_d‖ dt. Its integral is the Rabi angle whatever the envelope,
//! so in units of ħω_q the cost is κ·angle with κ = 1/(ω_q τ).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ergotropy::QubitParams;
use crate::state::{BlochVector, DensityMatrix};
use crate::{Error, Result};

/// Default gate duration, 80 ns.
pub const DEFAULT_GATE_TIME: f64 = 80e-9;
const DEFAULT_SAMPLES: usize = 161;
/// Bloch norms below this cannot define U_c.
pub const DEGENERATE_NORM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PulseShape {
    Flat,
    /// Gaussian centred on τ/2 with standard deviation `sigma_frac`·τ.
    Gaussian {
        sigma_frac: f64,
    },
}

/// How gates are realised in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTiming {
    pub tau: f64,
    pub omega_d: f64,
    pub shape: PulseShape,
    /// Number of envelope samples on [0, τ], endpoints included.
    pub samples: usize,
}

impl GateTiming {
    /// Resonant 80 ns flat-top drive for the given device.
    pub fn resonant(params: &QubitParams) -> Self {
        Self {
            tau: DEFAULT_GATE_TIME,
            omega_d: params.omega_q,
            shape: PulseShape::Flat,
            samples: DEFAULT_SAMPLES,
        }
    }

    pub fn with_shape(mut self, shape: PulseShape) -> Self {
        self.shape = shape;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }
}

/// Sampled drive envelope v(t) ≥ 0 with coupling g_d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub envelope: Vec<f64>,
    /// Drive coupling g_d (rad/s).
    pub g_d: f64,
    pub omega_d: f64,
    pub tau: f64,
}

impl Pulse {
    /// Builds a pulse from explicit samples. The samples are spread uniformly
    /// on [0, τ].
    pub fn from_samples(envelope: Vec<f64>, g_d: f64, omega_d: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::domain(format!(
                "pulse duration must be > 0, got {tau}"
            )));
        }
        if envelope.len() < 2 {
            return Err(Error::domain("pulse envelope needs at least 2 samples"));
        }
        if envelope.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(
                "pulse envelope must be finite and nonnegative",
            ));
        }
        if !(g_d >= 0.0) || !g_d.is_finite() {
            return Err(Error::domain(format!(
                "drive coupling must be >= 0, got {g_d}"
            )));
        }
        Ok(Self {
            envelope,
            g_d,
            omega_d,
            tau,
        })
    }

    /// A pulse of the given shape whose Rabi angle is exactly `angle`.
    pub fn for_angle(angle: f64, timing: &GateTiming) -> Result<Self> {
        let n = timing.samples.max(2);
        let dt = timing.tau / (n - 1) as f64;
        let envelope: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                match timing.shape {
                    PulseShape::Flat => 1.0,
                    PulseShape::Gaussian { sigma_frac } => {
                        let sigma = sigma_frac * timing.tau;
                        (-(t - timing.tau / 2.0).powi(2) / (2.0 * sigma * sigma)).exp()
                    }
                }
            })
            .collect();
        let area = trapezoid(&envelope, dt);
        if !(area > 0.0) {
            return Err(Error::domain("pulse envelope has zero area"));
        }
        Self::from_samples(envelope, angle / area, timing.omega_d, timing.tau)
    }

    pub fn sample_step(&self) -> f64 {
        self.tau / (self.envelope.len() - 1) as f64
    }

    /// v(t) by linear interpolation between samples; zero outside [0, τ].
    pub fn envelope_at(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.tau {
            return 0.0;
        }
        let h = self.sample_step();
        let pos = t / h;
        let k = (pos.floor() as usize).min(self.envelope.len() - 2);
        let frac = pos - k as f64;
        self.envelope[k] * (1.0 - frac) + self.envelope[k + 1] * frac
    }

    /// Instantaneous Rabi frequency g_d·v(t).
    pub fn rabi_rate(&self, t: f64) -> f64 {
        self.g_d * self.envelope_at(t)
    }
}

fn trapezoid(samples: &[f64], dt: f64) -> f64 {
    let inner: f64 = samples[1..samples.len() - 1].iter().sum();
    dt * (inner + 0.5 * (samples[0] + samples[samples.len() - 1]))
}

/// ∫₀^τ g_d v(t) dt by the trapezoid rule.
pub fn rabi_angle(pulse: &Pulse) -> f64 {
    pulse.g_d * trapezoid(&pulse.envelope, pulse.sample_step())
}

/// (1/τ)∫‖H_d‖dt in units of ħω_q, evaluated from the pulse samples.
pub fn drive_cost(pulse: &Pulse, omega_q: f64) -> f64 {
    rabi_angle(pulse) / (pulse.tau * omega_q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub axis: BlochVector,
    pub angle: f64,
    pub pulse: Pulse,
}

impl Gate {
    /// Rotation about `axis` (normalized here) by `angle`. Negative angles are
    /// folded onto the opposite axis so that the stored angle is in [0, π].
    pub fn rotation(axis: BlochVector, angle: f64, timing: &GateTiming) -> Result<Self> {
        let norm = axis.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain(
                "rotation axis must be a nonzero finite vector",
            ));
        }
        let (axis, angle) = if angle < 0.0 {
            (axis.scaled(-1.0 / norm), -angle)
        } else {
            (axis.scaled(1.0 / norm), angle)
        };
        if !(angle <= PI + 1e-12) {
            return Err(Error::domain(format!("gate angle |{angle}| exceeds pi")));
        }
        let angle = angle.min(PI);
        let pulse = Pulse::for_angle(angle, timing)?;
        Ok(Self { axis, angle, pulse })
    }

    /// R_Y(θ); negative θ gives the inverse rotation.
    pub fn ry(theta: f64, timing: &GateTiming) -> Result<Self> {
        Self::rotation(BlochVector::new(0.0, 1.0, 0.0), theta, timing)
    }

    /// V_π, the π rotation about X that swaps the populations.
    pub fn v_pi(timing: &GateTiming) -> Self {
        Self::rotation(BlochVector::new(1.0, 0.0, 0.0), PI, timing).expect("valid fixed gate")
    }
}

/// ρ → UρU†, evaluated as a rotation of the Bloch vector.
pub fn apply_ideal(gate: &Gate, rho: &DensityMatrix) -> DensityMatrix {
    let v = rho.to_bloch().rotated(&gate.axis, gate.angle);
    DensityMatrix::from_bloch(v).expect("rotation preserves the Bloch norm")
}

/// The coherence-consuming rotation: turns the Bloch vector of `rho` onto the
/// +z (ground) axis, landing on the passive state.
pub fn make_uc(rho: &DensityMatrix, timing: &GateTiming) -> Result<Gate> {
    let b = rho.to_bloch();
    let norm = b.norm();
    if norm < DEGENERATE_NORM {
        return Err(Error::DegenerateState {
            norm,
            threshold: DEGENERATE_NORM,
        });
    }
    let transverse = b.x.hypot(b.y);
    let polar = transverse.atan2(b.z);
    let axis = if transverse > 0.0 {
        // b × ẑ, normalized.
        BlochVector::new(b.y / transverse, -b.x / transverse, 0.0)
    } else {
        BlochVector::new(1.0, 0.0, 0.0)
    };
    Gate::rotation(axis, polar, timing)
}

/// Conversion factor κ from gate angle (rad) to cost in units of ħω_q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CostModel {
    kappa: f64,
}

impl CostModel {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::domain(format!("kappa must be > 0, got {kappa}")));
        }
        Ok(Self { kappa })
    }

    /// κ = 1/(ω_q τ).
    pub fn for_device(params: &QubitParams, tau: f64) -> Self {
        Self {
            kappa: 1.0 / (params.omega_q * tau),
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn cost(&self, gate: &Gate) -> f64 {
        gate_cost(gate, self.kappa)
    }
}

impl TryFrom<f64> for CostModel {
    type Error = Error;
    fn try_from(k: f64) -> Result<Self> {
        CostModel::new(k)
    }
}

impl From<CostModel> for f64 {
    fn from(c: CostModel) -> f64 {
        c.kappa
    }
}

/// Σ = κ·angle.
pub fn gate_cost(gate: &Gate, kappa: f64) -> f64 {
    kappa * gate.angle
}

/// η = ΔE/(ΔE + Σ).
pub fn efficiency(delta_e: f64, sigma: f64) -> Result<f64> {
    if !(delta_e >= 0.0) || !(sigma >= 0.0) {
        return Err(Error::domain(format!(
            "efficiency needs nonnegative energy change and cost, got ({delta_e}, {sigma})"
        )));
    }
    let denom = delta_e + sigma;
    if denom == 0.0 {
        return Err(Error::UndefinedEfficiency);
    }
    Ok(delta_e / denom)
}
