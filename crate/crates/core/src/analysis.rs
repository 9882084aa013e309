//! Rabi-angle sweeps, efficiency optima and the E_c(θ, C) surface.
//!
//! For a pure prepared state with s = sin²(θ/2), c = cos²(θ/2) and
//! θ ∈ [π/2, π], the sequential protocol gives
//!
//! ```text
//! η_prep  = s / (s + κθ)
//! η_vpi   = i / (i + κπ)        i = −cos θ
//! η_uc    = c / (c + κ(π − θ))
//! η_total = s / (s + κ(2π − θ))
//! ```
//!
//! The maximum of η_prep satisfies tan(θ/2) = θ and the crossing η_uc = η_vpi
//! satisfies (−cos θ)(π − θ) = π cos²(θ/2); neither depends on κ.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::CostModel;
use crate::ergotropy::{coherent_ergotropy, partial_dephase, pure_state_coherence};
use crate::measurement::derive_seed;
use crate::numeric::{bisect, golden_section_min};
use crate::protocols::{run_sequential, Mode, ProtocolConfig};
use crate::{Error, Result};

/// Default number of sweep points.
pub const DEFAULT_GRID: usize = 181;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub energy: f64,
    pub e_inc: f64,
    pub e_coh: f64,
    pub coherence: f64,
    pub eta_prep: Option<f64>,
    pub eta_vpi: Option<f64>,
    pub eta_uc: Option<f64>,
    pub eta_total: Option<f64>,
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::domain(format!(
            "grid needs at least 2 points, got {n}"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k == n - 1 { hi } else { lo + k as f64 * step })
        .collect())
}

/// Runs the sequential protocol at every θ. In sampled mode row `k` uses the
/// root seed mixed with `k`.
pub fn sweep_theta(thetas: &[f64], cfg: &ProtocolConfig, mode: &Mode) -> Result<Vec<SweepRow>> {
    if thetas.len() < 2 {
        return Err(Error::domain("sweep needs at least 2 points"));
    }
    thetas
        .par_iter()
        .enumerate()
        .map(|(k, &theta)| {
            let mode = match mode {
                Mode::Sampled { sampling, noisy } => {
                    let mut s = *sampling;
                    s.seed = derive_seed(sampling.seed, k as u64);
                    Mode::Sampled {
                        sampling: s,
                        noisy: *noisy,
                    }
                }
                m => *m,
            };
            let trace = run_sequential(theta, cfg, &mode)?;
            let prepared = &trace.steps[0];
            let vpi = trace.extraction("incoherent");
            let uc = trace.extraction("coherent");
            Ok(SweepRow {
                theta,
                energy: prepared.energy,
                e_inc: trace.incoherent_work(),
                e_coh: trace.coherent_work(),
                coherence: prepared.coherence,
                eta_prep: trace.preparation.efficiency,
                eta_vpi: vpi.and_then(|e| e.efficiency),
                eta_uc: uc.and_then(|e| e.efficiency),
                eta_total: trace.total.efficiency,
            })
        })
        .collect()
}

/// Closed-form efficiencies of the ideal sequential protocol for θ ∈ [π/2, π].
pub fn efficiency_sweep(thetas: &[f64], cost: CostModel) -> Result<Vec<SweepRow>> {
    let k = cost.kappa();
    thetas
        .iter()
        .map(|&theta| {
            if !(FRAC_PI_2..=PI).contains(&theta) {
                return Err(Error::domain(format!(
                    "efficiency sweep needs theta in [pi/2, pi], got {theta}"
                )));
            }
            let (s, c, i) = populations(theta);
            Ok(SweepRow {
                theta,
                energy: s,
                e_inc: i,
                e_coh: c,
                coherence: pure_state_coherence(theta),
                eta_prep: Some(s / (s + k * theta)),
                eta_vpi: Some(i / (i + k * PI)),
                eta_uc: Some(c / (c + k * (PI - theta))),
                eta_total: Some(s / (s + k * (2.0 * PI - theta))),
            })
        })
        .collect()
}

/// (sin²(θ/2), cos²(θ/2), max(0, −cos θ)).
fn populations(theta: f64) -> (f64, f64, f64) {
    let (sh, ch) = (theta / 2.0).sin_cos();
    (sh * sh, ch * ch, (-theta.cos()).max(0.0))
}

/// 1 − η_prep, evaluated without cancellation.
fn prep_inefficiency(theta: f64, kappa: f64) -> f64 {
    let (s, _, _) = populations(theta);
    kappa * theta / (s + kappa * theta)
}

/// η_uc − η_vpi with both denominators cleared; the κ² terms cancel.
fn extraction_gap(theta: f64) -> f64 {
    let (_, c, i) = populations(theta);
    PI * c - (PI - theta) * i
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub theta: f64,
    pub coherence: f64,
}

/// Local maximum of the preparation efficiency on [π/2, π].
pub fn find_theta_m(cost: CostModel) -> Result<Optimum> {
    let k = cost.kappa();
    let tol = 1e-12;
    let (theta, _) = golden_section_min(|t| prep_inefficiency(t, k), FRAC_PI_2, PI, tol);
    if theta - FRAC_PI_2 < 1e3 * tol || PI - theta < 1e3 * tol {
        return Err(Error::NoInteriorMax(theta));
    }
    Ok(Optimum {
        theta,
        coherence: pure_state_coherence(theta),
    })
}

/// Angle where the coherent and incoherent extraction efficiencies meet.
pub fn find_theta_e(_cost: CostModel) -> Result<Optimum> {
    // Both sides vanish at θ = π.
    let theta = bisect(extraction_gap, FRAC_PI_2, PI - 1e-9, 1e-14)?;
    Ok(Optimum {
        theta,
        coherence: pure_state_coherence(theta),
    })
}

/// E_c of partially dephased states, `out[i][j]` at `thetas[i]` and
/// `coherences[j]`.
pub fn surface_ec(thetas: &[f64], coherences: &[f64]) -> Result<Vec<Vec<f64>>> {
    thetas
        .par_iter()
        .map(|&theta| {
            coherences
                .iter()
                .map(|&c| partial_dephase(theta, c).map(|rho| coherent_ergotropy(&rho)))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub theta: f64,
    pub coherence: f64,
    pub e_coh: f64,
}

/// E_c on a grid where each θ gets `n_coherence` coherence values spanning
/// [0, C(pure_state(θ))].
pub fn surface_ec_scaled(thetas: &[f64], n_coherence: usize) -> Result<Vec<SurfacePoint>> {
    let fractions = grid(0.0, 1.0, n_coherence)?;
    let rows: Vec<Vec<SurfacePoint>> = thetas
        .par_iter()
        .map(|&theta| {
            let c_max = pure_state_coherence(theta);
            fractions
                .iter()
                .map(|f| {
                    let c = (f * c_max).min(c_max);
                    let rho = partial_dephase(theta, c)?;
                    Ok(SurfacePoint {
                        theta,
                        coherence: c,
                        e_coh: coherent_ergotropy(&rho),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}
