//! Small helpers on complex vectors (slices of [`C64`]).

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::C64;

/// Hermitian inner product `a† b`.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn scaled(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|z| z * s).collect()
}

pub fn normalized(a: &[C64]) -> Vec<C64> {
    let n = norm(a);
    assert!(n > 0.0, "cannot normalize a zero vector");
    a.iter().map(|z| z / n).collect()
}

/// Rotates the global phase so the largest-magnitude entry is real positive.
/// Fixes the arbitrary phase of eigenvectors and beams for deterministic output.
pub fn canonical_phase(a: &[C64]) -> Vec<C64> {
    let mut best = 0usize;
    let mut best_mag = -1.0;
    for (i, z) in a.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag <= 0.0 {
        return a.to_vec();
    }
    let phase = a[best] / best_mag;
    scaled(a, phase.conj())
}

/// Real part of the quadratic form `x† A x` for Hermitian `A`.
pub fn quad_form(a: &super::CMat, x: &[C64]) -> f64 {
    let ax = a.matvec(x);
    dot(x, &ax).re
}
