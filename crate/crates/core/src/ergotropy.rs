//! Energy, passive states and the coherent/incoherent split of ergotropy.
//!
//! All energies are normalized to E_max = ħω_q with the ground state at 0, so
//! the energy of a state is its excited population.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::numeric::bisect;
use crate::state::{binary_entropy, DensityMatrix};
use crate::{Error, Result};

/// Device model: transition frequency and decoherence times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct QubitParams {
    /// Angular transition frequency ω_q (rad/s).
    pub omega_q: f64,
    /// Energy relaxation time (s).
    pub t1: f64,
    /// Total dephasing time (s).
    pub t2: f64,
    /// Thermal occupation of the bath.
    #[serde(default)]
    pub n_th: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    omega_q: f64,
    t1: f64,
    t2: f64,
    #[serde(default)]
    n_th: f64,
}

impl TryFrom<RawParams> for QubitParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        QubitParams::new(r.omega_q, r.t1, r.t2, r.n_th)
    }
}

impl QubitParams {
    pub fn new(omega_q: f64, t1: f64, t2: f64, n_th: f64) -> Result<Self> {
        let finite = [omega_q, t1, t2, n_th].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if omega_q <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega_q must be > 0, got {omega_q}"
            )));
        }
        if t1 <= 0.0 {
            return Err(Error::InvalidParams(format!("T1 must be > 0, got {t1}")));
        }
        if t2 <= 0.0 {
            return Err(Error::InvalidParams(format!("T2 must be > 0, got {t2}")));
        }
        if t2 > 2.0 * t1 {
            return Err(Error::InvalidParams(format!(
                "T2 <= 2*T1 violated: T2 = {t2:e} s, 2*T1 = {:e} s",
                2.0 * t1
            )));
        }
        if n_th < 0.0 {
            return Err(Error::InvalidParams(format!(
                "n_th must be >= 0, got {n_th}"
            )));
        }
        Ok(Self {
            omega_q,
            t1,
            t2,
            n_th,
        })
    }

    /// Flux sweet spot: ω_q/2π = 5.450 GHz, T1 = 25.7 μs, T2 = 32.7 μs.
    pub fn sweet_spot() -> Self {
        Self {
            omega_q: 2.0 * PI * 5.450e9,
            t1: 25.7e-6,
            t2: 32.7e-6,
            n_th: 0.0,
        }
    }

    /// Detuned working point: ω_q/2π = 5.336 GHz, T1 = 64.5 μs, T2 = 2.2 μs.
    pub fn working_point() -> Self {
        Self {
            omega_q: 2.0 * PI * 5.336e9,
            t1: 64.5e-6,
            t2: 2.2e-6,
            n_th: 0.0,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "sweet-spot" => Some(Self::sweet_spot()),
            "working-point" => Some(Self::working_point()),
            _ => None,
        }
    }

    /// γ1 = 1/T1.
    pub fn gamma1(&self) -> f64 {
        1.0 / self.t1
    }

    /// Pure dephasing rate γ_φ = 1/T2 − 1/(2T1).
    pub fn gamma_phi(&self) -> f64 {
        (1.0 / self.t2 - 0.5 / self.t1).max(0.0)
    }
}

/// Thermodynamic summary of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgotropyReport {
    pub energy: f64,
    pub ergotropy_total: f64,
    pub ergotropy_incoherent: f64,
    pub ergotropy_coherent: f64,
    /// Relative entropy of coherence, nats.
    pub coherence: f64,
}

impl ErgotropyReport {
    pub fn of(rho: &DensityMatrix) -> Self {
        let total = ergotropy(rho);
        let incoherent = incoherent_ergotropy(rho);
        Self {
            energy: energy(rho),
            ergotropy_total: total,
            ergotropy_incoherent: incoherent,
            ergotropy_coherent: total - incoherent,
            coherence: coherence(rho),
        }
    }
}

/// (Tr[ρH0] − E_ground)/ħω_q, which is the excited population.
pub fn energy(rho: &DensityMatrix) -> f64 {
    rho.p1()
}

/// Diagonal state with the larger eigenvalue on the ground level.
pub fn passive_state(rho: &DensityMatrix) -> DensityMatrix {
    let spec = rho.spectrum();
    if spec.lam_hi == spec.lam_lo {
        return DensityMatrix::maximally_mixed();
    }
    DensityMatrix::diagonal(spec.lam_lo).expect("eigenvalue lies in [0, 1/2]")
}

/// Maximum work extractable by a unitary, p1 − λ_lo.
pub fn ergotropy(rho: &DensityMatrix) -> f64 {
    (energy(rho) - rho.spectrum().lam_lo).max(0.0)
}

/// Populations kept, coherences removed.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::diagonal(rho.p1()).expect("population already validated")
}

/// Relative entropy of coherence D(ρ‖Δ[ρ]) = S(Δ[ρ]) − S(ρ), in nats.
pub fn coherence(rho: &DensityMatrix) -> f64 {
    if rho.is_diagonal() {
        return 0.0;
    }
    (binary_entropy(rho.p1()) - rho.entropy()).max(0.0)
}

/// Ergotropy of the dephased state, max(0, 2p1 − 1).
pub fn incoherent_ergotropy(rho: &DensityMatrix) -> f64 {
    (2.0 * rho.p1() - 1.0).max(0.0)
}

pub fn coherent_ergotropy(rho: &DensityMatrix) -> f64 {
    ergotropy(rho) - incoherent_ergotropy(rho)
}

/// Lowest-energy state with the same coherence: the population inversion
/// ρ → XρX when the excited state is the more populated level, else ρ.
pub fn sigma_state(rho: &DensityMatrix) -> DensityMatrix {
    if rho.p1() > 0.5 {
        DensityMatrix::new(rho.p0(), rho.coherence_amplitude().conj())
            .expect("population swap preserves positivity")
    } else {
        *rho
    }
}

/// Coherence of the pure state R_Y(θ)|0⟩ in closed form.
pub fn pure_state_coherence(theta: f64) -> f64 {
    let (s, c) = (theta / 2.0).sin_cos();
    let term = |amp: f64| {
        if amp <= 0.0 {
            0.0
        } else {
            -2.0 * amp * amp * amp.ln()
        }
    };
    term(s) + term(c)
}

/// Partially dephased state with the populations of R_Y(θ)|0⟩ and a real,
/// nonnegative amplitude chosen so that its coherence equals `c_target`.
pub fn partial_dephase(theta: f64, c_target: f64) -> Result<DensityMatrix> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::domain(format!(
            "partial_dephase needs theta in (0, pi), got {theta}"
        )));
    }
    let pure = DensityMatrix::pure(theta)?;
    let c_max = coherence(&pure);
    if !(c_target >= 0.0) || c_target > c_max + 1e-12 {
        return Err(Error::domain(format!(
            "coherence target {c_target} outside [0, {c_max}] at theta = {theta}"
        )));
    }
    let p1 = pure.p1();
    if c_target <= 0.0 {
        return Ok(dephase(&pure));
    }
    let a_max = (p1 * (1.0 - p1)).sqrt();
    let coherence_at = |a: f64| {
        let rho = DensityMatrix::new(p1, C64::new(a.min(a_max), 0.0)).expect("a within bound");
        coherence(&rho) - c_target
    };
    // Targets within rounding of the pure-state coherence.
    if c_target >= c_max || coherence_at(a_max) <= 0.0 {
        return Ok(pure);
    }
    let a = bisect(coherence_at, 0.0, a_max, 1e-12)?;
    DensityMatrix::new(p1, C64::new(a.min(a_max), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(p1: f64, a: f64) -> DensityMatrix {
        DensityMatrix::new(p1, C64::new(a, 0.0)).unwrap()
    }

    fn fig2_state() -> DensityMatrix {
        st(2.0 / 3.0, 2f64.sqrt() / 3.0)
    }

    #[test]
    fn params_validation() {
        assert!(QubitParams::new(1.0, 1.0, 2.0, 0.0).is_ok());
        let err = QubitParams::new(1.0, 1.0, 2.1, 0.0).unwrap_err();
        assert!(err.to_string().contains("T2 <= 2*T1"), "{err}");
        assert!(QubitParams::new(0.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn rate_identity() {
        for p in [QubitParams::sweet_spot(), QubitParams::working_point()] {
            let lhs = 1.0 / p.t2;
            let rhs = 0.5 * p.gamma1() + p.gamma_phi();
            assert!((lhs - rhs).abs() / lhs < 1e-14);
        }
    }

    #[test]
    fn params_deserialize_validates() {
        let ok: QubitParams =
            serde_json::from_str(r#"{"omega_q": 1e10, "t1": 1e-5, "t2": 1e-5}"#).unwrap();
        assert_eq!(ok.n_th, 0.0);
        assert!(serde_json::from_str::<QubitParams>(
            r#"{"omega_q": 1e10, "t1": 1e-5, "t2": 3e-5}"#
        )
        .is_err());
        assert!(serde_json::from_str::<QubitParams>(
            r#"{"omega_q": 1e10, "t1": 1e-5, "t2": 1e-5, "bogus": 1}"#
        )
        .is_err());
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&DensityMatrix::ground()), 0.0);
        assert!((energy(&fig2_state()) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(energy(&st(0.6, 0.2)), 0.6);
    }

    #[test]
    fn passive_state_examples() {
        let p = passive_state(&DensityMatrix::pure(1.3).unwrap());
        assert!(p.p1().abs() < 1e-15 && p.is_diagonal());
        assert_eq!(
            passive_state(&DensityMatrix::maximally_mixed()),
            DensityMatrix::maximally_mixed()
        );
        let p = passive_state(&st(0.6, 0.2));
        assert!((p.p1() - 0.276_393_202_250_021).abs() < 1e-12 && p.is_diagonal());
    }

    #[test]
    fn ergotropy_examples() {
        for theta in [0.3, 1.0, 2.0, PI] {
            let s = (theta / 2.0).sin().powi(2);
            assert!((ergotropy(&DensityMatrix::pure(theta).unwrap()) - s).abs() < 1e-12);
        }
        assert_eq!(ergotropy(&DensityMatrix::maximally_mixed()), 0.0);
        assert!((ergotropy(&st(0.6, 0.2)) - 0.323_606_797_749_979).abs() < 1e-12);
    }

    #[test]
    fn dephase_examples() {
        let d = dephase(&fig2_state());
        assert!((d.p1() - 2.0 / 3.0).abs() < 1e-15 && d.is_diagonal());
        let diag = st(0.2, 0.0);
        assert_eq!(dephase(&diag), diag);
        assert_eq!(dephase(&dephase(&st(0.6, 0.2))), st(0.6, 0.0));
    }

    #[test]
    fn coherence_examples() {
        assert_eq!(coherence(&st(0.3, 0.0)), 0.0);
        for theta in [0.4, PI / 2.0, 2.0, 2.9] {
            let rho = DensityMatrix::pure(theta).unwrap();
            assert!((coherence(&rho) - pure_state_coherence(theta)).abs() < 1e-12);
        }
        // H(0.6) − H(0.723607), both binary entropies in nats.
        assert!((coherence(&st(0.6, 0.2)) - 0.083_497_181_274_208).abs() < 1e-9);
    }

    #[test]
    fn coherence_is_phase_independent() {
        let a = DensityMatrix::new(0.4, C64::from_polar(0.3, 1.1)).unwrap();
        let b = st(0.4, 0.3);
        assert!((coherence(&a) - coherence(&b)).abs() < 1e-14);
    }

    #[test]
    fn incoherent_examples() {
        assert!((incoherent_ergotropy(&DensityMatrix::pure(PI).unwrap()) - 1.0).abs() < 1e-15);
        assert!(incoherent_ergotropy(&DensityMatrix::pure(PI / 2.0).unwrap()) < 1e-15);
        assert!((incoherent_ergotropy(&fig2_state()) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_examples() {
        assert!((coherent_ergotropy(&DensityMatrix::pure(PI / 2.0).unwrap()) - 0.5).abs() < 1e-12);
        assert!((coherent_ergotropy(&fig2_state()) - 1.0 / 3.0).abs() < 1e-12);
        assert!((coherent_ergotropy(&st(0.6, 0.2)) - 0.123_606_797_749_979).abs() < 1e-12);
        for theta in [0.2f64, 1.0, 2.2, 3.0] {
            let (s, c) = (theta / 2.0).sin_cos();
            let e = coherent_ergotropy(&DensityMatrix::pure(theta).unwrap());
            assert!((e - (s * s).min(c * c)).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_state_examples() {
        let s = sigma_state(&fig2_state());
        assert!((s.p1() - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.coherence_amplitude().norm() - 2f64.sqrt() / 3.0).abs() < 1e-15);
        assert_eq!(sigma_state(&st(0.3, 0.1)), st(0.3, 0.1));
        let s = sigma_state(&st(0.6, 0.2));
        assert!(
            (s.p1() - 0.4).abs() < 1e-15 && (s.coherence_amplitude().norm() - 0.2).abs() < 1e-15
        );
        assert!((coherence(&s) - coherence(&st(0.6, 0.2))).abs() < 1e-12);
    }

    #[test]
    fn partial_dephase_examples() {
        let theta = 2.0 * PI / 3.0;
        let d = partial_dephase(theta, 0.0).unwrap();
        assert!((d.p1() - 0.75).abs() < 1e-15 && d.is_diagonal());

        let c_pure = pure_state_coherence(theta);
        assert!((c_pure - 0.562_335_144_618_808).abs() < 1e-12);
        assert_eq!(
            partial_dephase(theta, c_pure).unwrap(),
            DensityMatrix::pure(theta).unwrap()
        );

        let half = partial_dephase(theta, 0.28117).unwrap();
        assert!((coherence(&half) - 0.28117).abs() < 1e-9);
        assert!((half.p1() - 0.75).abs() < 1e-15);

        assert!(partial_dephase(theta, c_pure + 1e-6).is_err());
        assert!(partial_dephase(0.0, 0.0).is_err());
        assert!(partial_dephase(PI, 0.0).is_err());
    }

    #[test]
    fn partial_dephase_near_pure_endpoint() {
        let theta = 2.5;
        let c_pure = pure_state_coherence(theta);
        for frac in [0.999, 0.999_999, 1.0 - 1e-9] {
            let rho = partial_dephase(theta, frac * c_pure).unwrap();
            assert!((coherence(&rho) - frac * c_pure).abs() < 1e-9);
        }
    }
}
