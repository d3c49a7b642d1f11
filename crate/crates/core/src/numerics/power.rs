//! Power iteration for dominant eigenpairs.
//!
//! Two flavours are needed: Hermitian operators (Rayleigh-quotient estimates,
//! used for the fractional-SINR baselines) and entrywise-nonnegative real
//! matrices (Perron root, used by the SINR-balancing power control).

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::vec as cvec;
use super::{C64, HermitianMatrix};
use crate::{Error, Result};

/// Deterministic, direction-rich start vector.
fn start_vector(n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n)
        .map(|i| {
            let x = i as f64;
            C64::new(1.0 + 0.37 * (1.7 * x + 0.3).sin(), 0.29 * (2.3 * x + 1.1).cos())
        })
        .collect();
    cvec::normalized(&v)
}

/// Dominant eigenpair of a Hermitian PSD operator given as a closure.
///
/// Returns the Rayleigh-quotient eigenvalue estimate (a lower bound for the
/// true maximum) and the final unit-norm iterate.
pub fn dominant_hermitian_psd(
    n: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    max_iter: usize,
) -> (f64, Vec<C64>) {
    dominant_hermitian_psd_tol(n, apply, max_iter, 3e-13)
}

/// [`dominant_hermitian_psd`] with a caller-chosen relative residual target,
/// for uses that trade accuracy for speed.
pub fn dominant_hermitian_psd_tol(
    n: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    max_iter: usize,
    rtol: f64,
) -> (f64, Vec<C64>) {
    let mut v = start_vector(n);
    let mut lambda = 0.0f64;
    let mut stagnant = 0usize;
    for _ in 0..max_iter {
        let av = apply(&v);
        let new_lambda = cvec::dot(&v, &av).re;
        let res: f64 = av
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * new_lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = new_lambda.abs().max(f64::MIN_POSITIVE);
        let nrm = cvec::norm(&av);
        if nrm <= f64::MIN_POSITIVE {
            // operator annihilates the iterate: eigenvalue 0
            return (0.0, v);
        }
        v = av.iter().map(|z| z / nrm).collect();
        if res <= rtol * scale {
            lambda = new_lambda;
            break;
        }
        if (new_lambda - lambda).abs() <= 1e-15 * scale {
            stagnant += 1;
            if stagnant > 10 {
                lambda = new_lambda;
                break;
            }
        } else {
            stagnant = 0;
        }
        lambda = new_lambda;
    }
    (lambda, v)
}

/// Largest (signed) eigenvalue of a possibly indefinite Hermitian matrix via
/// a Gershgorin shift followed by PSD power iteration.
pub fn lambda_max_hermitian(a: &HermitianMatrix) -> f64 {
    let n = a.order();
    if n == 0 {
        return 0.0;
    }
    let bound = gershgorin_bound(a);
    if bound == 0.0 {
        return 0.0;
    }
    let (lam, _) = dominant_hermitian_psd(
        n,
        |x| {
            let mut y = a.as_mat().matvec(x);
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi += xi * bound;
            }
            y
        },
        100_000,
    );
    lam - bound
}

/// Certified upper bound on every eigenvalue magnitude: the maximum absolute
/// row sum.
pub fn gershgorin_bound(a: &HermitianMatrix) -> f64 {
    let n = a.order();
    let mut bound = 0.0f64;
    for i in 0..n {
        let row: f64 = (0..n).map(|j| a.as_mat()[(i, j)].norm()).sum();
        bound = bound.max(row);
    }
    bound
}

/// Undoes the balancing similarity on an eigenvector and renormalizes.
fn unbalance(x: &[f64], d: &[f64]) -> Vec<f64> {
    let y: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi * di).collect();
    let nrm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nrm > 0.0 {
        y.iter().map(|v| v / nrm).collect()
    } else {
        y
    }
}

/// Perron eigenpair (spectral radius and nonnegative eigenvector) of an
/// entrywise-nonnegative real matrix, row-major `n x n`.
pub fn perron_eigpair(a: &[f64], n: usize, max_iter: usize) -> Result<(f64, Vec<f64>)> {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok((0.0, vec![]));
    }
    if a.iter().all(|&v| v == 0.0) {
        return Ok((0.0, vec![1.0 / n as f64; n]));
    }
    // balance by a diagonal similarity first: entries can span many decades
    // (interference couplings scale with transmit powers), and the aperiodic
    // shift below must sit on the eigenvalue scale, not the raw-entry scale,
    // or the iteration crawls
    let mut b = a.to_vec();
    let mut d = vec![1.0f64; n];
    for _ in 0..20 {
        let mut moved = false;
        for i in 0..n {
            let r: f64 = (0..n).filter(|&j| j != i).map(|j| b[i * n + j]).sum();
            let c: f64 = (0..n).filter(|&j| j != i).map(|j| b[j * n + i]).sum();
            if r > 0.0 && c > 0.0 {
                let f = (c / r).sqrt();
                if (f - 1.0).abs() > 1e-3 {
                    for j in 0..n {
                        b[i * n + j] *= f;
                    }
                    for j in 0..n {
                        b[j * n + i] /= f;
                    }
                    d[i] /= f;
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
    let a = &b[..];
    let row_sum_max: f64 =
        (0..n).map(|i| a[i * n..(i + 1) * n].iter().sum::<f64>()).fold(0.0, f64::max);
    if row_sum_max == 0.0 {
        return Ok((0.0, vec![1.0 / n as f64; n]));
    }
    // shift by the norm bound to make the iteration aperiodic
    let shift = row_sum_max;
    let mut x = vec![1.0f64; n];
    let mut prev_lambda = f64::NAN;
    let mut stagnant = 0usize;
    for _ in 0..max_iter {
        let mut y = vec![0.0f64; n];
        for i in 0..n {
            let mut acc = shift * x[i];
            let row = &a[i * n..(i + 1) * n];
            for j in 0..n {
                acc += row[j] * x[j];
            }
            y[i] = acc;
        }
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let xy: f64 = x.iter().zip(&y).map(|(p, q)| p * q).sum();
        let lambda_shifted = xy / xx;
        let res: f64 =
            y.iter().zip(&x).map(|(p, q)| (p - q * lambda_shifted).powi(2)).sum::<f64>().sqrt();
        let ynorm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ynorm == 0.0 {
            return Ok((0.0, vec![1.0 / n as f64; n]));
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ynorm;
        }
        if res <= 1e-13 * lambda_shifted * xx.sqrt() {
            return Ok(((lambda_shifted - shift).max(0.0), unbalance(&x, &d)));
        }
        // clustered shifted spectra can keep the residual above the target
        // forever; once the Rayleigh estimate stops moving, accept it
        if (lambda_shifted - prev_lambda).abs() <= 1e-14 * lambda_shifted.abs() {
            stagnant += 1;
            if stagnant > 30 {
                return Ok(((lambda_shifted - shift).max(0.0), unbalance(&x, &d)));
            }
        } else {
            stagnant = 0;
        }
        prev_lambda = lambda_shifted;
    }
    Err(Error::Numeric("Perron power iteration did not converge".into()))
}

/// Spectral radius of an entrywise-nonnegative real matrix.
pub fn spectral_radius_nonnegative(a: &[f64], n: usize) -> Result<f64> {
    perron_eigpair(a, n, 1_000_000).map(|(lam, _)| lam)
}
