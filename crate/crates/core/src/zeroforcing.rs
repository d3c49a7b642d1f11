//! Zeroforcing transmit beams from covariance eigenspaces.
//!
//! Beam `w_m` is constrained to the joint null space of every other pair's
//! covariance eigenspace `U_k`; inside that null space it is pointed along
//! the direction maximizing the expected signal power `w† R_h w`.

use alloc::vec::Vec;

use crate::channel::UserPairChannels;
use crate::numerics::{
    hermitian_eig, null_space_basis, vec as cvec, C64, CMat, HermitianMatrix,
};
use crate::{Error, Result};

/// The zeroforcing beam set: one unit-norm beam per pair plus the expected
/// signal gain `w_m† R_h w_m` it achieves.
#[derive(Debug, Clone)]
pub struct BeamSet {
    pub beams: Vec<Vec<C64>>,
    pub signal_gain: Vec<f64>,
}

/// Orthonormal basis of the column space of a rank-`l` covariance.
///
/// Errors if the numerical rank of `r` disagrees with `l` (relative
/// eigenvalue cutoff 1e-10).
pub fn eigenspace_basis(r: &HermitianMatrix, l: usize) -> Result<CMat> {
    let e = hermitian_eig(r);
    let lmax = e.values.first().copied().unwrap_or(0.0).max(0.0);
    let numeric_rank = e.values.iter().filter(|&&v| v > 1e-10 * lmax).count();
    if numeric_rank != l {
        return Err(Error::RankMismatch { expected: l, got: numeric_rank });
    }
    Ok(CMat::from_fn(r.order(), l, |i, j| e.vectors[(i, j)]))
}

/// Computes all zeroforcing beams for the scenario.
///
/// Requires `sum_{k != m} L_k < N_t` so every pair keeps a nonempty null
/// space; the per-pair direction is the dominant eigenvector of the
/// covariance restricted to that null space.
pub fn zeroforcing_beams(pairs: &[UserPairChannels]) -> Result<BeamSet> {
    let nt = pairs.first().map(|p| p.r_h.order()).unwrap_or(0);
    let bases: Vec<CMat> = pairs
        .iter()
        .map(|p| {
            let l = crate::numerics::rank(p.r_h.as_mat());
            eigenspace_basis(&p.r_h, l)
        })
        .collect::<Result<_>>()?;

    let mut beams = Vec::with_capacity(pairs.len());
    let mut signal_gain = Vec::with_capacity(pairs.len());
    for (m, pair) in pairs.iter().enumerate() {
        // stack the other pairs' eigenbases column-wise
        let total_cols: usize = bases.iter().enumerate().filter(|&(k, _)| k != m).map(|(_, b)| b.cols()).sum();
        let mut stacked = CMat::zeros(nt, total_cols);
        let mut col = 0;
        for (k, basis) in bases.iter().enumerate() {
            if k == m {
                continue;
            }
            for j in 0..basis.cols() {
                for i in 0..nt {
                    stacked[(i, col)] = basis[(i, j)];
                }
                col += 1;
            }
        }
        let null = null_space_basis(&stacked);
        if null.cols() == 0 {
            return Err(Error::Infeasible(alloc::format!(
                "pair {m}: other pairs' eigenspaces span the whole transmit space"
            )));
        }
        // maximize w† R_h w over the null space: dominant eigenvector of B† R_h B
        let restricted =
            HermitianMatrix::new_unchecked(null.adjoint().mul(pair.r_h.as_mat()).mul(&null));
        let e = hermitian_eig(&restricted);
        let w_raw = null.matvec(&e.vector(0));
        let w = cvec::canonical_phase(&cvec::normalized(&w_raw));
        let gain = cvec::quad_form(pair.r_h.as_mat(), &w);
        beams.push(w);
        signal_gain.push(gain.max(0.0));
    }
    Ok(BeamSet { beams, signal_gain })
}

impl BeamSet {
    /// Largest zeroforcing residual `|w_m† u|` over all cross-pair eigenspace
    /// columns; diagnostic used by tests and the harness.
    pub fn max_cross_residual(&self, pairs: &[UserPairChannels]) -> f64 {
        let mut worst = 0.0f64;
        for (m, w) in self.beams.iter().enumerate() {
            for (k, pair) in pairs.iter().enumerate() {
                if k == m {
                    continue;
                }
                let l = crate::numerics::rank(pair.r_h.as_mat());
                if let Ok(basis) = eigenspace_basis(&pair.r_h, l) {
                    for j in 0..basis.cols() {
                        let r = cvec::dot(w, &basis.col(j)).norm();
                        worst = worst.max(r);
                    }
                }
            }
        }
        worst
    }
}
