//! Direct solvers: LU with partial pivoting and Cholesky for Hermitian
//! positive definite systems.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{C64, CMat, HermitianMatrix};
use crate::{Error, Result};

/// Condition-number ceiling beyond which a solve is refused.
const COND_LIMIT: f64 = 1e12;

/// Solves `A x = b` for square nonsingular `A` by LU with partial pivoting.
///
/// The condition estimate is the ratio of extreme pivot magnitudes; it is
/// crude but sufficient to reject the degenerate systems this crate can
/// produce.
pub fn linear_solve(a: &CMat, b: &[C64]) -> Result<Vec<C64>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.cols(), what: "linear_solve matrix" });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len(), what: "linear_solve rhs" });
    }
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut piv = k;
        let mut piv_mag = lu[(k, k)].norm();
        for i in k + 1..n {
            let m = lu[(i, k)].norm();
            if m > piv_mag {
                piv_mag = m;
                piv = i;
            }
        }
        if piv_mag == 0.0 {
            return Err(Error::SingularSystem { condition_estimate: f64::INFINITY });
        }
        if piv != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
            perm.swap(k, piv);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in k + 1..n {
                let val = lu[(i, j)] - factor * lu[(k, j)];
                lu[(i, j)] = val;
            }
        }
    }

    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0f64;
    for k in 0..n {
        let d = lu[(k, k)].norm();
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    let cond = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
    if cond > COND_LIMIT {
        return Err(Error::SingularSystem { condition_estimate: cond });
    }

    // Pb, then forward L, then back U
    let mut x: Vec<C64> = perm.iter().map(|&i| b[i]).collect();
    for i in 1..n {
        for j in 0..i {
            let sub = lu[(i, j)] * x[j];
            x[i] -= sub;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let sub = lu[(i, j)] * x[j];
            x[i] -= sub;
        }
        x[i] /= lu[(i, i)];
    }
    Ok(x)
}

/// Lower-triangular Cholesky factor of a Hermitian positive definite matrix,
/// reusable across many right-hand sides.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: CMat,
}

/// Factors `A + shift I` (the shift lets callers regularize PSD matrices).
pub fn cholesky_factor(a: &HermitianMatrix, shift: f64) -> Result<CholeskyFactor> {
    let n = a.order();
    let mut l = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.as_mat()[(i, j)];
            if i == j {
                sum += C64::new(shift, 0.0);
            }
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)].conj();
            }
            if i == j {
                let d = sum.re;
                if d <= 0.0 || !d.is_finite() {
                    return Err(Error::NotPositiveSemidefinite { min_eigenvalue_bound: d });
                }
                l[(i, i)] = C64::new(d.sqrt(), 0.0);
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Ok(CholeskyFactor { l })
}

impl CholeskyFactor {
    pub fn order(&self) -> usize {
        self.l.rows()
    }

    /// `L^{-1} b`.
    pub fn forward(&self, b: &[C64]) -> Vec<C64> {
        let n = self.order();
        let mut x = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                let sub = self.l[(i, j)] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.l[(i, i)];
        }
        x
    }

    /// `L^{-†} b`.
    pub fn backward(&self, b: &[C64]) -> Vec<C64> {
        let n = self.order();
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = self.l[(j, i)].conj() * x[j];
                x[i] -= sub;
            }
            x[i] /= self.l[(i, i)];
        }
        x
    }

    /// `(L L†)^{-1} b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        self.backward(&self.forward(b))
    }
}
