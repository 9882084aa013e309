//! Minimal dense 2×2 complex matrix algebra for the integrator.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

/// Row-major 2×2 complex matrix in the (|0⟩, |1⟩) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Mat2(pub [[C64; 2]; 2]);

const Z: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[Z, Z], [Z, Z]]);

    pub fn pauli_x() -> Self {
        Mat2([[Z, ONE], [ONE, Z]])
    }

    pub fn pauli_y() -> Self {
        Mat2([[Z, -I], [I, Z]])
    }

    pub fn pauli_z() -> Self {
        Mat2([[ONE, Z], [Z, -ONE]])
    }

    /// σ⁻ = |0⟩⟨1|, lowers the excited state.
    pub fn lowering() -> Self {
        Mat2([[Z, ONE], [Z, Z]])
    }

    pub fn raising() -> Self {
        Mat2([[Z, Z], [ONE, Z]])
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Mat2) -> Mat2 {
        *self * *other + *other * *self
    }

    /// D[L]ρ = LρL† − ½{L†L, ρ}.
    pub fn dissipator(l: &Mat2, rho: &Mat2) -> Mat2 {
        let ld = l.dagger();
        *l * *rho * ld - (ld * *l).anticommutator(rho).scale_re(0.5)
    }

    #[cfg(test)]
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut best = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                best = best.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        best
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}
