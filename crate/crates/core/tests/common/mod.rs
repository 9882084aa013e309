#![allow(dead_code)]

use ergolab::{BlochVector, Complex64, DensityMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bloch vector uniform in the unit ball.
pub fn random_bloch(rng: &mut impl Rng) -> BlochVector {
    let r = rng.random::<f64>().cbrt();
    random_unit(rng).scaled(r)
}

pub fn random_unit(rng: &mut impl Rng) -> BlochVector {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    BlochVector::new(s * phi.cos(), s * phi.sin(), z)
}

pub fn random_state(rng: &mut impl Rng) -> DensityMatrix {
    DensityMatrix::from_bloch(random_bloch(rng)).unwrap()
}

type M = [[Complex64; 2]; 2];

fn mul(a: &M, b: &M) -> M {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn dagger(a: &M) -> M {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// Largest energy drop p1(ρ) − p1(UρU†) over U = exp(−iψ n·σ/2), with n
/// on a (polar, azimuth) grid and ψ ∈ [0, π]; `n` points per parameter.
pub fn brute_force_ergotropy(rho: &DensityMatrix, n: usize) -> f64 {
    let a = rho.coherence_amplitude();
    let m: M = [
        [Complex64::new(rho.p0(), 0.0), a.conj()],
        [a, Complex64::new(rho.p1(), 0.0)],
    ];
    let i = Complex64::new(0.0, 1.0);
    let mut best = f64::NEG_INFINITY;
    for ip in 0..n {
        let pol = PI * ip as f64 / (n - 1) as f64;
        for ia in 0..n {
            let az = 2.0 * PI * ia as f64 / n as f64;
            let (nx, ny, nz) = (pol.sin() * az.cos(), pol.sin() * az.sin(), pol.cos());
            for ir in 0..n {
                let psi = PI * ir as f64 / (n - 1) as f64;
                let (s, c) = (psi / 2.0).sin_cos();
                let u: M = [
                    [c - i * s * nz, -i * s * (nx - i * ny)],
                    [-i * s * (nx + i * ny), c + i * s * nz],
                ];
                let out = mul(&mul(&u, &m), &dagger(&u));
                best = best.max(rho.p1() - out[1][1].re);
            }
        }
    }
    best
}
