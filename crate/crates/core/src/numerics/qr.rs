//! Rank detection and orthonormal null-space bases via Householder QR with
//! column pivoting.
//!
//! The covariance matrices in this crate are exactly low rank by
//! construction, so the singular-value gap at the rank cutoff is many orders
//! of magnitude; the pivoted-QR diagonal is a safe rank proxy.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{C64, CMat};

/// Relative cutoff deciding numerical rank.
const RANK_CUTOFF: f64 = 1e-10;

struct PivotedQr {
    /// Householder vectors; reflector `k` acts on rows `k..m`.
    reflectors: Vec<Vec<C64>>,
    /// |R[k][k]| per step, i.e. the pivot column norms.
    rdiag: Vec<f64>,
}

fn factor(a: &CMat) -> PivotedQr {
    let m = a.rows();
    let n = a.cols();
    let steps = m.min(n);
    let mut r = a.clone();
    let mut reflectors = Vec::new();
    let mut rdiag = Vec::new();

    for k in 0..steps {
        // pivot: remaining column with the largest trailing norm
        let mut best = k;
        let mut best_norm = -1.0f64;
        for j in k..n {
            let nj: f64 = (k..m).map(|i| r[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            if nj > best_norm {
                best_norm = nj;
                best = j;
            }
        }
        if best != k {
            for i in 0..m {
                let tmp = r[(i, k)];
                r[(i, k)] = r[(i, best)];
                r[(i, best)] = tmp;
            }
        }
        rdiag.push(best_norm);
        if best_norm <= f64::MIN_POSITIVE || best_norm <= RANK_CUTOFF * rdiag[0] * 0.5 {
            // numerically zero trailing block; no further reflectors needed
            break;
        }

        // Householder vector for column k, rows k..m
        let mut v: Vec<C64> = (k..m).map(|i| r[(i, k)]).collect();
        let alpha = v[0];
        let phase = if alpha.norm() > 0.0 { alpha / alpha.norm() } else { C64::new(1.0, 0.0) };
        v[0] += phase * best_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 > 0.0 {
            let tau = 2.0 / vnorm2;
            // apply H = I - tau v v† to trailing columns
            for j in k..n {
                let mut proj = C64::new(0.0, 0.0);
                for (i, vi) in v.iter().enumerate() {
                    proj += vi.conj() * r[(k + i, j)];
                }
                proj *= tau;
                for (i, vi) in v.iter().enumerate() {
                    let val = r[(k + i, j)] - vi * proj;
                    r[(k + i, j)] = val;
                }
            }
        }
        reflectors.push(v);
    }

    PivotedQr { reflectors, rdiag }
}

fn rank_from_diag(rdiag: &[f64]) -> usize {
    if rdiag.is_empty() || rdiag[0] <= 0.0 {
        return 0;
    }
    rdiag.iter().take_while(|&&d| d > RANK_CUTOFF * rdiag[0]).count()
}

/// Numerical rank of `a` (singular-value cutoff `1e-10 * sigma_max`).
pub fn rank(a: &CMat) -> usize {
    rank_from_diag(&factor(a).rdiag)
}

/// Orthonormal basis of the orthogonal complement of the column space of `a`,
/// i.e. columns `B` with `a† B = 0` and `B† B = I`.
///
/// Full column rank with square `a` yields an empty (zero-column) basis; the
/// zero matrix yields a full basis.
pub fn null_space_basis(a: &CMat) -> CMat {
    let m = a.rows();
    let qr = factor(a);
    let r = rank_from_diag(&qr.rdiag);

    // Q = H_0 H_1 ... H_{t-1}; complement basis is the trailing columns of Q.
    let mut q = CMat::identity(m);
    for (k, v) in qr.reflectors.iter().enumerate().rev() {
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        for j in 0..m {
            let mut proj = C64::new(0.0, 0.0);
            for (i, vi) in v.iter().enumerate() {
                proj += vi.conj() * q[(k + i, j)];
            }
            proj *= tau;
            for (i, vi) in v.iter().enumerate() {
                let val = q[(k + i, j)] - vi * proj;
                q[(k + i, j)] = val;
            }
        }
    }

    CMat::from_fn(m, m - r, |i, j| q[(i, r + j)])
}
