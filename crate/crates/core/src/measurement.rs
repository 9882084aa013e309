//! Simulated projective readout and linear-inversion tomography.
//!
//! Every random draw comes from a ChaCha8 stream seeded from one root seed
//! through [`derive_seed`], so identical configurations reproduce identical
//! counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::ergotropy::ErgotropyReport;
use crate::state::{BlochVector, DensityMatrix};
use crate::{Error, Result};

pub const DEFAULT_SHOTS: u64 = 1000;
pub const DEFAULT_REPETITIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    fn index(self) -> u64 {
        match self {
            Basis::X => 0,
            Basis::Y => 1,
            Basis::Z => 2,
        }
    }

    fn component(self, v: &BlochVector) -> f64 {
        match self {
            Basis::X => v.x,
            Basis::Y => v.y,
            Basis::Z => v.z,
        }
    }
}

/// Outcomes of one basis: `plus` is the +1 eigenvalue count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub plus: u64,
    pub minus: u64,
}

impl Counts {
    pub fn shots(&self) -> u64 {
        self.plus + self.minus
    }

    pub fn mean(&self) -> f64 {
        (self.plus as f64 - self.minus as f64) / self.shots() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomographyCounts {
    pub x: Counts,
    pub y: Counts,
    pub z: Counts,
    pub seed: Option<u64>,
}

/// Standard errors of the reported per-state quantities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QuantityErrors {
    pub energy: f64,
    pub coherence: f64,
    pub ergotropy_total: f64,
    pub ergotropy_incoherent: f64,
    pub ergotropy_coherent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyResult {
    pub estimate: DensityMatrix,
    pub shots_per_basis: u64,
    pub repetitions: usize,
    /// Spread across repetitions; `None` for a single reconstruction.
    pub std_error: Option<QuantityErrors>,
    pub seed: Option<u64>,
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

/// SplitMix64 finalizer applied to `root` offset by `stream`.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    let mut z = root.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ⟨σx⟩, ⟨σy⟩, ⟨σz⟩.
pub fn pauli_expectations(rho: &DensityMatrix) -> BlochVector {
    rho.to_bloch()
}

/// Binomial draw of `shots` single-basis measurements.
pub fn sample_counts(rho: &DensityMatrix, basis: Basis, shots: u64, seed: u64) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::domain("shots must be >= 1"));
    }
    let expectation = basis.component(&pauli_expectations(rho));
    let p_plus = ((1.0 + expectation) / 2.0).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plus = Binomial::new(shots, p_plus)
        .map_err(|e| Error::domain(format!("binomial: {e}")))?
        .sample(&mut rng);
    Ok(Counts {
        plus,
        minus: shots - plus,
    })
}

/// Counts in all three Pauli bases with independent per-basis seeds.
pub fn measure(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<TomographyCounts> {
    let draw = |b: Basis| sample_counts(rho, b, shots, derive_seed(seed, b.index()));
    Ok(TomographyCounts {
        x: draw(Basis::X)?,
        y: draw(Basis::Y)?,
        z: draw(Basis::Z)?,
        seed: Some(seed),
    })
}

/// Radial projection onto the unit ball.
pub fn project_to_ball(v: BlochVector) -> BlochVector {
    let n = v.norm();
    if n > 1.0 {
        v.scaled(1.0 / n)
    } else {
        v
    }
}

/// Infinite-shot reconstruction from exact expectations.
pub fn reconstruct_from_expectations(v: BlochVector) -> DensityMatrix {
    DensityMatrix::from_bloch(project_to_ball(v)).expect("projected vector lies in the ball")
}

/// Linear inversion from empirical means, with radial projection.
pub fn reconstruct(counts: &TomographyCounts) -> Result<TomographyResult> {
    let all = [counts.x, counts.y, counts.z];
    if all.iter().any(|c| c.shots() == 0) {
        return Err(Error::domain("every basis needs at least one shot"));
    }
    let raw = BlochVector::new(counts.x.mean(), counts.y.mean(), counts.z.mean());
    Ok(TomographyResult {
        estimate: reconstruct_from_expectations(raw),
        shots_per_basis: all.iter().map(Counts::shots).min().unwrap_or(0),
        repetitions: 1,
        std_error: None,
        seed: counts.seed,
    })
}

/// Mean and standard error σ/√n, where σ is the population standard
/// deviation of the repetitions.
pub fn repeat_stats(values: &[f64]) -> Result<Estimate> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientRepetitions(n));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
    Ok(Estimate {
        mean,
        std_error: (var / nf).sqrt(),
    })
}

/// One reconstruction per repetition; repetition `r` is seeded with
/// `derive_seed(seed, r)`.
pub fn repetition_estimates(
    rho: &DensityMatrix,
    shots: u64,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<DensityMatrix>> {
    (0..repetitions)
        .map(|r| {
            reconstruct(&measure(rho, shots, derive_seed(seed, r as u64))?).map(|t| t.estimate)
        })
        .collect()
}

/// Repeated tomography of one state. Repetition `r` uses the seed
/// `derive_seed(seed, r)`. The estimate is the reconstruction from the
/// repetition-averaged Bloch vector.
pub fn tomography_repeated(
    rho: &DensityMatrix,
    shots: u64,
    repetitions: usize,
    seed: u64,
) -> Result<TomographyResult> {
    if repetitions < 2 {
        return Err(Error::InsufficientRepetitions(repetitions));
    }
    let estimates = repetition_estimates(rho, shots, repetitions, seed)?;
    summarize_repetitions(&estimates, shots, seed)
}

/// Aggregates per-repetition reconstructions: standard errors of each
/// reported quantity, and the state rebuilt from the mean Bloch vector.
pub fn summarize_repetitions(
    estimates: &[DensityMatrix],
    shots: u64,
    seed: u64,
) -> Result<TomographyResult> {
    let repetitions = estimates.len();
    if repetitions < 2 {
        return Err(Error::InsufficientRepetitions(repetitions));
    }
    let reports: Vec<ErgotropyReport> = estimates.iter().map(ErgotropyReport::of).collect();
    let se = |f: fn(&ErgotropyReport) -> f64| -> Result<f64> {
        Ok(repeat_stats(&reports.iter().map(f).collect::<Vec<_>>())?.std_error)
    };
    let std_error = QuantityErrors {
        energy: se(|r| r.energy)?,
        coherence: se(|r| r.coherence)?,
        ergotropy_total: se(|r| r.ergotropy_total)?,
        ergotropy_incoherent: se(|r| r.ergotropy_incoherent)?,
        ergotropy_coherent: se(|r| r.ergotropy_coherent)?,
    };
    let n = repetitions as f64;
    let mean = estimates
        .iter()
        .fold(BlochVector::new(0.0, 0.0, 0.0), |acc, e| {
            let b = e.to_bloch();
            BlochVector::new(acc.x + b.x / n, acc.y + b.y / n, acc.z + b.z / n)
        });
    Ok(TomographyResult {
        estimate: reconstruct_from_expectations(mean),
        shots_per_basis: shots,
        repetitions,
        std_error: Some(std_error),
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;
    use std::f64::consts::PI;

    #[test]
    fn pauli_examples() {
        assert_eq!(
            pauli_expectations(&DensityMatrix::ground()),
            BlochVector::new(0.0, 0.0, 1.0)
        );
        let b = pauli_expectations(&DensityMatrix::pure(PI / 2.0).unwrap());
        assert!((b.x - 1.0).abs() < 1e-15 && b.y.abs() < 1e-15 && b.z.abs() < 1e-15);
        let b = pauli_expectations(&DensityMatrix::new(0.6, C64::new(0.2, 0.0)).unwrap());
        assert!((b.x - 0.4).abs() < 1e-15 && b.y == 0.0 && (b.z + 0.2).abs() < 1e-15);
    }

    #[test]
    fn ground_z_is_deterministic() {
        for shots in [1, 17, 1000] {
            let c = sample_counts(&DensityMatrix::ground(), Basis::Z, shots, 9).unwrap();
            assert_eq!(
                c,
                Counts {
                    plus: shots,
                    minus: 0
                }
            );
        }
        assert!(sample_counts(&DensityMatrix::ground(), Basis::Z, 0, 9).is_err());
    }

    #[test]
    fn mixed_state_x_is_balanced() {
        let n = 1_000_000;
        let c = sample_counts(&DensityMatrix::maximally_mixed(), Basis::X, n, 42).unwrap();
        // 3σ of a fair binomial mean is 1.5e-3.
        assert!((c.plus as f64 / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn seeded_counts_repeat() {
        let rho = DensityMatrix::pure(1.2).unwrap();
        assert_eq!(
            measure(&rho, 500, 7).unwrap(),
            measure(&rho, 500, 7).unwrap()
        );
        assert_ne!(
            measure(&rho, 500, 7).unwrap(),
            measure(&rho, 500, 8).unwrap()
        );
    }

    #[test]
    fn exact_expectations_recover_state() {
        let rho = DensityMatrix::new(0.3, C64::new(0.2, -0.1)).unwrap();
        let back = reconstruct_from_expectations(pauli_expectations(&rho));
        assert!(back.trace_distance(&rho) < 1e-15);
    }

    #[test]
    fn overlong_vector_is_projected() {
        // ⟨X⟩ = 1, ⟨Y⟩ = 0, ⟨Z⟩ = 0.663: norm 1.2.
        let z = (1.44f64 - 1.0).sqrt();
        let plus_z = (1000.0 * (1.0 + z) / 2.0).round() as u64;
        let counts = TomographyCounts {
            x: Counts {
                plus: 1000,
                minus: 0,
            },
            y: Counts {
                plus: 500,
                minus: 500,
            },
            z: Counts {
                plus: plus_z,
                minus: 1000 - plus_z,
            },
            seed: None,
        };
        let t = reconstruct(&counts).unwrap();
        assert!((t.estimate.to_bloch().norm() - 1.0).abs() < 1e-12);
        assert_eq!(t.shots_per_basis, 1000);
    }

    #[test]
    fn repeat_stats_examples() {
        let e = repeat_stats(&[0.25; 5]).unwrap();
        assert_eq!((e.mean, e.std_error), (0.25, 0.0));
        let e = repeat_stats(&[0.0, 1.0]).unwrap();
        assert!((e.mean - 0.5).abs() < 1e-15);
        assert!((e.std_error - 0.353_553_390_593_273_8).abs() < 1e-12);
        assert_eq!(repeat_stats(&[1.0]), Err(Error::InsufficientRepetitions(1)));
    }

    #[test]
    fn repeated_tomography_reports_errors() {
        let rho = DensityMatrix::pure(2.0).unwrap();
        let t = tomography_repeated(&rho, 1000, 20, 3).unwrap();
        let se = t.std_error.unwrap();
        assert!(se.energy > 0.0 && se.energy < 0.01);
        assert!((t.estimate.p1() - rho.p1()).abs() < 4.0 * se.energy);
    }
}
