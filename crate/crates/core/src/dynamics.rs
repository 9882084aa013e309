//! Fixed-step RK4 integration of the qubit master equation
//!
//! ```text
//! dρ/dt = −i[H(t), ρ] + γ1 D[σ⁻]ρ + γ1 n_th D[σ⁺]ρ + (γ_φ/2) D[σ_z]ρ
//! ```
//!
//! in the frame rotating with the qubit, where H(t) is zero during free
//! evolution and (g_d v(t)/2)(n·σ) during a gate. With n_th = 0 the
//! populations relax as e^{−t/T1} and the coherence as e^{−t/T2}, using
//! 1/T2 = 1/(2T1) + γ_φ.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::control::Gate;
use crate::ergotropy::QubitParams;
use crate::linalg::Mat2;
use crate::state::{DensityMatrix, INTEGRATOR_SLACK};
use crate::{Error, Result};

const MAX_SAMPLES: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub gamma1: f64,
    pub gamma_phi: f64,
    #[serde(default)]
    pub n_th: f64,
}

impl NoiseModel {
    pub fn new(gamma1: f64, gamma_phi: f64, n_th: f64) -> Result<Self> {
        if !(gamma1 >= 0.0) || !(gamma_phi >= 0.0) || !(n_th >= 0.0) {
            return Err(Error::domain("noise rates must be nonnegative"));
        }
        Ok(Self {
            gamma1,
            gamma_phi,
            n_th,
        })
    }

    pub fn from_params(params: &QubitParams) -> Self {
        Self {
            gamma1: params.gamma1(),
            gamma_phi: params.gamma_phi(),
            n_th: params.n_th,
        }
    }

    pub fn none() -> Self {
        Self {
            gamma1: 0.0,
            gamma_phi: 0.0,
            n_th: 0.0,
        }
    }

    fn gamma_down(&self) -> f64 {
        self.gamma1
    }

    fn gamma_up(&self) -> f64 {
        self.gamma1 * self.n_th
    }

    /// Population relaxation rate.
    pub fn population_rate(&self) -> f64 {
        self.gamma_down() + self.gamma_up()
    }

    /// Decay rate of ⟨1|ρ|0⟩.
    pub fn coherence_rate(&self) -> f64 {
        0.5 * self.population_rate() + self.gamma_phi
    }

    /// T1 and T2, infinite when the corresponding rate is zero.
    pub fn times(&self) -> (f64, f64) {
        let inv = |r: f64| if r > 0.0 { 1.0 / r } else { f64::INFINITY };
        (inv(self.population_rate()), inv(self.coherence_rate()))
    }

    /// Largest accepted step for free evolution, min(T1, T2)/100.
    pub fn max_step(&self) -> f64 {
        let (t1, t2) = self.times();
        t1.min(t2) / 100.0
    }

    fn lindbladian(&self, rho: &Mat2) -> Mat2 {
        let mut out = Mat2::ZERO;
        if self.gamma_down() > 0.0 {
            out = out + Mat2::dissipator(&Mat2::lowering(), rho).scale_re(self.gamma_down());
        }
        if self.gamma_up() > 0.0 {
            out = out + Mat2::dissipator(&Mat2::raising(), rho).scale_re(self.gamma_up());
        }
        if self.gamma_phi > 0.0 {
            out = out + Mat2::dissipator(&Mat2::pauli_z(), rho).scale_re(0.5 * self.gamma_phi);
        }
        out
    }
}

/// Default step min(T1, T2, τ)/1000.
pub fn default_dt(noise: &NoiseModel, tau: f64) -> f64 {
    let (t1, t2) = noise.times();
    t1.min(t2).min(tau) / 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub time: f64,
    pub state: DensityMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionResult {
    #[serde(rename = "final")]
    pub final_state: DensityMatrix,
    pub trajectory: Vec<Sample>,
    pub step_count: usize,
    /// Largest observed −λ_min over all steps (0 if never negative).
    pub max_positivity_violation: f64,
    /// Largest observed |Tr ρ − 1| over all steps.
    pub max_trace_drift: f64,
}

impl EvolutionResult {
    /// (time_s, p1, re_a, im_a) rows for CSV dumps.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.trajectory.iter().map(|s| {
            let a = s.state.coherence_amplitude();
            (s.time, s.state.p1(), a.re, a.im)
        })
    }
}

/// Free evolution for time `t` with step `dt` (the last step is shortened so
/// the run ends exactly at `t`).
pub fn evolve_free(
    rho0: &DensityMatrix,
    noise: &NoiseModel,
    t: f64,
    dt: f64,
) -> Result<EvolutionResult> {
    evolve_free_sampled(rho0, noise, t, dt, MAX_SAMPLES)
}

pub fn evolve_free_sampled(
    rho0: &DensityMatrix,
    noise: &NoiseModel,
    t: f64,
    dt: f64,
    max_samples: usize,
) -> Result<EvolutionResult> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!(
            "evolution time must be >= 0, got {t}"
        )));
    }
    check_step(dt, noise.max_step())?;
    let steps = if t == 0.0 {
        0
    } else {
        (t / dt).ceil() as usize
    };
    let h = if steps == 0 { 0.0 } else { t / steps as f64 };
    integrate(rho0, steps, h, max_samples, |_| Mat2::ZERO, noise)
}

/// A gate executed under decoherence. `dt` must not exceed τ/100 nor the
/// free-evolution limit.
pub fn apply_noisy(
    gate: &Gate,
    rho0: &DensityMatrix,
    noise: &NoiseModel,
    dt: f64,
) -> Result<EvolutionResult> {
    let pulse = &gate.pulse;
    check_step(dt, noise.max_step().min(pulse.tau / 100.0))?;
    // Align steps with envelope knots so the piecewise-linear drive is smooth
    // within every step.
    let segments = pulse.envelope.len() - 1;
    let per_segment = ((pulse.tau / dt) / segments as f64).ceil().max(1.0) as usize;
    let steps = per_segment * segments;
    let h = pulse.tau / steps as f64;
    let generator = {
        let n = &gate.axis;
        Mat2::pauli_x().scale_re(n.x)
            + Mat2::pauli_y().scale_re(n.y)
            + Mat2::pauli_z().scale_re(n.z)
    };
    let hamiltonian = |t: f64| generator.scale_re(0.5 * pulse.rabi_rate(t));
    integrate(rho0, steps, h, MAX_SAMPLES, hamiltonian, noise)
}

fn check_step(dt: f64, limit: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::domain(format!("step must be > 0, got {dt}")));
    }
    if dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    Ok(())
}

fn integrate<H>(
    rho0: &DensityMatrix,
    steps: usize,
    h: f64,
    max_samples: usize,
    hamiltonian: H,
    noise: &NoiseModel,
) -> Result<EvolutionResult>
where
    H: Fn(f64) -> Mat2,
{
    let minus_i = C64::new(0.0, -1.0);
    let rhs = |t: f64, rho: &Mat2| -> Mat2 {
        let ham = hamiltonian(t);
        ham.commutator(rho).scale(minus_i) + noise.lindbladian(rho)
    };

    let stride = (steps / max_samples.max(2).saturating_sub(1)).max(1);
    let mut rho = rho0.to_mat();
    let mut trajectory = vec![Sample {
        time: 0.0,
        state: *rho0,
    }];
    let mut max_neg = 0.0f64;
    let mut max_drift = 0.0f64;

    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = rhs(t, &rho);
        let k2 = rhs(t + 0.5 * h, &(rho + k1.scale_re(0.5 * h)));
        let k3 = rhs(t + 0.5 * h, &(rho + k2.scale_re(0.5 * h)));
        let k4 = rhs(t + h, &(rho + k3.scale_re(h)));
        rho = rho + (k1 + k2.scale_re(2.0) + k3.scale_re(2.0) + k4).scale_re(h / 6.0);

        max_drift = max_drift.max((rho.trace() - C64::new(1.0, 0.0)).norm());
        max_neg = max_neg.max(-min_eigenvalue(&rho));

        let done = k + 1;
        if done % stride == 0 || done == steps {
            let state = readout(&rho)?;
            trajectory.push(Sample {
                time: done as f64 * h,
                state,
            });
        }
    }

    if max_neg > INTEGRATOR_SLACK {
        return Err(Error::IntegratorDrift(format!(
            "min eigenvalue {:.3e} below -{INTEGRATOR_SLACK:e}",
            -max_neg
        )));
    }
    let final_state = trajectory.last().map(|s| s.state).unwrap_or(*rho0);
    Ok(EvolutionResult {
        final_state,
        trajectory,
        step_count: steps,
        max_positivity_violation: max_neg.max(0.0),
        max_trace_drift: max_drift,
    })
}

fn readout(m: &Mat2) -> Result<DensityMatrix> {
    DensityMatrix::from_mat(m).map_err(|e| Error::IntegratorDrift(e.to_string()))
}

/// Smallest eigenvalue of the Hermitian part of `m`.
fn min_eigenvalue(m: &Mat2) -> f64 {
    let d0 = m.0[0][0].re;
    let d1 = m.0[1][1].re;
    let off = 0.5 * (m.0[1][0] + m.0[0][1].conj());
    0.5 * (d0 + d1) - ((0.5 * (d0 - d1)).powi(2) + off.norm_sqr()).sqrt()
}

/// Exact free decay, used as the reference solution.
pub fn free_decay_closed_form(rho0: &DensityMatrix, noise: &NoiseModel, t: f64) -> DensityMatrix {
    let gamma = noise.population_rate();
    let p_ss = if gamma > 0.0 {
        noise.gamma_up() / gamma
    } else {
        0.0
    };
    let p1 = p_ss + (rho0.p1() - p_ss) * (-gamma * t).exp();
    let a = rho0.coherence_amplitude() * (-noise.coherence_rate() * t).exp();
    DensityMatrix::new(p1, a).expect("free decay keeps the state physical")
}
