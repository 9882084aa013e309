//! Single-qubit density matrices.
//!
//! A state is stored as the excited-state population `p1` and the coherence
//! amplitude `a = ⟨1|ρ|0⟩`:
//!
//! ```text
//!     ρ = | 1 − p1   a* |
//!         |   a      p1 |     in the (|0⟩, |1⟩) basis
//! ```
//!
//! Trace and Hermiticity hold by construction; positivity is checked on
//! entry. |0⟩ is the ground state of H0 = −ħω_q σ_z/2 and sits at Bloch +z,
//! so z = 1 − 2·p1, x = 2·Re a and y = 2·Im a.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::linalg::Mat2;
use crate::{Error, Result};

/// Slack on |a|² ≤ p1(1 − p1) for states built directly.
pub const POSITIVITY_SLACK: f64 = 1e-12;
/// Slack applied when reading a state back out of the integrator.
pub const INTEGRATOR_SLACK: f64 = 1e-8;
/// Slack on the Bloch norm.
pub const BLOCH_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState")]
pub struct DensityMatrix {
    p1: f64,
    a: C64,
}

#[derive(Deserialize)]
struct RawState {
    p1: f64,
    a: C64,
}

impl TryFrom<RawState> for DensityMatrix {
    type Error = Error;
    fn try_from(raw: RawState) -> Result<Self> {
        DensityMatrix::new(raw.p1, raw.a)
    }
}

impl DensityMatrix {
    /// Builds a validated state from population and coherence amplitude.
    pub fn new(p1: f64, a: C64) -> Result<Self> {
        Self::with_slack(p1, a, POSITIVITY_SLACK)
    }

    pub(crate) fn with_slack(p1: f64, a: C64, slack: f64) -> Result<Self> {
        if !p1.is_finite() || !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::domain("state entries must be finite"));
        }
        if !(-slack..=1.0 + slack).contains(&p1) {
            return Err(Error::domain(format!(
                "population p1 = {p1} outside [0, 1]"
            )));
        }
        let p1 = p1.clamp(0.0, 1.0);
        let bound = p1 * (1.0 - p1);
        let coherence_sq = a.norm_sqr();
        if coherence_sq > bound + slack {
            return Err(Error::PositivityViolation {
                coherence_sq,
                bound,
            });
        }
        // Pull values inside the slack band back onto the pure-state boundary.
        let a = if coherence_sq > bound {
            if bound <= 0.0 {
                C64::new(0.0, 0.0)
            } else {
                a * (bound / coherence_sq).sqrt()
            }
        } else {
            a
        };
        Ok(Self { p1, a })
    }

    pub fn ground() -> Self {
        Self {
            p1: 0.0,
            a: C64::new(0.0, 0.0),
        }
    }

    pub fn excited() -> Self {
        Self {
            p1: 1.0,
            a: C64::new(0.0, 0.0),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            p1: 0.5,
            a: C64::new(0.0, 0.0),
        }
    }

    /// Diagonal state with the given excited-state population.
    pub fn diagonal(p1: f64) -> Result<Self> {
        Self::new(p1, C64::new(0.0, 0.0))
    }

    /// The pure state R_Y(θ)|0⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩.
    pub fn pure(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::domain(format!("Rabi angle {theta} outside [0, pi]")));
        }
        let (s, c) = (theta / 2.0).sin_cos();
        Ok(Self {
            p1: s * s,
            a: C64::new(s * c, 0.0),
        })
    }

    #[inline]
    pub fn p1(&self) -> f64 {
        self.p1
    }

    #[inline]
    pub fn p0(&self) -> f64 {
        1.0 - self.p1
    }

    /// ⟨1|ρ|0⟩.
    #[inline]
    pub fn coherence_amplitude(&self) -> C64 {
        self.a
    }

    pub fn is_diagonal(&self) -> bool {
        self.a.re == 0.0 && self.a.im == 0.0
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.p1 * self.p1 + self.p0() * self.p0() + 2.0 * self.a.norm_sqr()
    }

    pub fn to_bloch(&self) -> BlochVector {
        BlochVector {
            x: 2.0 * self.a.re,
            y: 2.0 * self.a.im,
            z: 1.0 - 2.0 * self.p1,
        }
    }

    pub fn from_bloch(v: BlochVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm > 1.0 + BLOCH_SLACK {
            return Err(Error::PositivityViolation {
                coherence_sq: norm * norm,
                bound: 1.0,
            });
        }
        let v = if norm > 1.0 { v.scaled(1.0 / norm) } else { v };
        let p1 = (1.0 - v.z) / 2.0;
        Self::with_slack(p1, C64::new(v.x / 2.0, v.y / 2.0), 4.0 * BLOCH_SLACK)
    }

    /// Closed-form eigendecomposition, eigenvalues descending.
    pub fn spectrum(&self) -> Spectrum {
        let half_gap = ((self.p1 - 0.5).powi(2) + self.a.norm_sqr()).sqrt();
        let lam_hi = 0.5 + half_gap;
        // det/λ_hi keeps λ_lo accurate for nearly pure states.
        let det = (self.p1 * self.p0() - self.a.norm_sqr()).max(0.0);
        let lam_lo = (det / lam_hi).min(0.5);

        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let eigenbasis = if half_gap < 1e-300 {
            [[one, zero], [zero, one]]
        } else {
            // Direction of the Bloch vector: polar angle α from +z, azimuth φ.
            let b = self.to_bloch();
            let alpha = (b.x.hypot(b.y)).atan2(b.z);
            let phi = b.y.atan2(b.x);
            let (s, c) = (alpha / 2.0).sin_cos();
            let phase = C64::from_polar(1.0, phi);
            [
                [C64::new(c, 0.0), phase * s],
                [-phase.conj() * s, C64::new(c, 0.0)],
            ]
        };
        Spectrum {
            lam_hi,
            lam_lo,
            eigenbasis,
        }
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        let s = self.spectrum();
        xlnx_neg(s.lam_hi) + xlnx_neg(s.lam_lo)
    }

    pub(crate) fn to_mat(self) -> Mat2 {
        Mat2([
            [C64::new(self.p0(), 0.0), self.a.conj()],
            [self.a, C64::new(self.p1, 0.0)],
        ])
    }

    /// Reads a state out of an integrated matrix, tolerating integrator drift
    /// up to [`INTEGRATOR_SLACK`].
    pub(crate) fn from_mat(m: &Mat2) -> Result<Self> {
        let p1 = m.0[1][1].re;
        let a = C64::new(
            0.5 * (m.0[1][0].re + m.0[0][1].re),
            0.5 * (m.0[1][0].im - m.0[0][1].im),
        );
        Self::with_slack(p1, a, INTEGRATOR_SLACK)
    }

    /// Trace distance ½‖ρ − σ‖₁, i.e. half the Bloch-vector separation.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        0.5 * self.to_bloch().sub(&other.to_bloch()).norm()
    }
}

/// −x ln x with 0·ln 0 = 0.
pub(crate) fn xlnx_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Binary entropy in nats.
pub fn binary_entropy(p: f64) -> f64 {
    xlnx_neg(p) + xlnx_neg(1.0 - p)
}

/// Maximum entropy of a qubit, ln 2.
pub const MAX_ENTROPY: f64 = LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= BLOCH_SLACK
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn sub(&self, o: &BlochVector) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &BlochVector) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    /// Right-handed rotation by `angle` about the unit vector `axis`.
    pub fn rotated(&self, axis: &BlochVector, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let k = axis.cross(self);
        let along = axis.dot(self) * (1.0 - c);
        Self::new(
            self.x * c + k.x * s + axis.x * along,
            self.y * c + k.y * s + axis.y * along,
            self.z * c + k.z * s + axis.z * along,
        )
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Eigen-decomposition of a qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub lam_hi: f64,
    pub lam_lo: f64,
    /// `eigenbasis[0]` belongs to `lam_hi`, `eigenbasis[1]` to `lam_lo`;
    /// components in the (|0⟩, |1⟩) basis.
    pub eigenbasis: [[C64; 2]; 2],
}

impl Spectrum {
    /// Σ λᵢ |vᵢ⟩⟨vᵢ| as a row-major matrix.
    pub fn reconstruct(&self) -> [[C64; 2]; 2] {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for (lam, v) in [
            (self.lam_hi, self.eigenbasis[0]),
            (self.lam_lo, self.eigenbasis[1]),
        ] {
            for r in 0..2 {
                for c in 0..2 {
                    out[r][c] += v[r] * v[c].conj() * lam;
                }
            }
        }
        out
    }
}
