//! Transmit-power optimization for fixed IRS phases and beams.
//!
//! Strong users get a closed-form minimum power. Weak users are coupled
//! through inter-pair interference: the max-min SINR balance is the Perron
//! eigenpair of a nonnegative matrix built from the interference couplings,
//! and the minimum-power allocation is the solution of a small linear system
//! once the balance level reaches the threshold.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::UserPairChannels;
use crate::irs_opt::{interference_term, IrsPhaseVector};
use crate::numerics::power::{perron_eigpair, spectral_radius_nonnegative};
use crate::numerics::{linear_solve, C64, CMat};
use crate::zeroforcing::BeamSet;
use crate::{Error, Result};

/// Per-pair transmit powers in linear watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    /// Strong-user powers `p_{m,1}`.
    pub p1: Vec<f64>,
    /// Weak-user powers `p_{m,2}`.
    pub p2: Vec<f64>,
}

impl PowerAllocation {
    pub fn zeros(m: usize) -> Self {
        PowerAllocation { p1: vec![0.0; m], p2: vec![0.0; m] }
    }

    pub fn pairs(&self) -> usize {
        self.p1.len()
    }

    pub fn pair_total(&self, m: usize) -> f64 {
        self.p1[m] + self.p2[m]
    }

    pub fn total(&self) -> f64 {
        self.p1.iter().sum::<f64>() + self.p2.iter().sum::<f64>()
    }

    /// Pairs violating the NOMA ordering `p2 >= p1`. The solvers do not
    /// enforce the ordering structurally; callers surface this as a warning.
    pub fn noma_ordering_violations(&self) -> Vec<usize> {
        (0..self.pairs()).filter(|&m| self.p2[m] < self.p1[m]).collect()
    }
}

/// Minimum strong-user power hitting the SINR threshold exactly:
/// `gamma_th * sigma2_n / (c2_1 * signal_gain)`.
pub fn strong_user_power(
    gamma_th: f64,
    sigma2_n: f64,
    c2_1: f64,
    signal_gain: f64,
) -> Result<f64> {
    if signal_gain <= 1e-15 {
        return Err(Error::UnserviceableUser { pair: 0, gain: signal_gain });
    }
    Ok(gamma_th * sigma2_n / (c2_1 * signal_gain))
}

/// Interference couplings `T[m][k]` (row-major `M x M`): power reaching weak
/// user `m` through its own IRS from beam `k`.
pub fn interference_matrix(
    pairs: &[UserPairChannels],
    thetas: &[IrsPhaseVector],
    beams: &BeamSet,
) -> Vec<f64> {
    let m = pairs.len();
    let mut t = vec![0.0f64; m * m];
    for (i, pair) in pairs.iter().enumerate() {
        for (k, w) in beams.beams.iter().enumerate() {
            t[i * m + k] = interference_term(&thetas[i], &pair.r_g, &pair.g, w);
        }
    }
    t
}

/// The weak-user power-control problem for fixed phases and strong powers.
#[derive(Debug, Clone)]
pub struct BalanceProblem {
    m: usize,
    /// Row-major `M x M` coupling matrix.
    t: Vec<f64>,
    /// `gamma_th / T[m][m]`.
    lambda: Vec<f64>,
    /// Strong-user interference plus scaled noise per weak user. This
    /// includes the intra-pair term `p1[m] * T[m][m]`, which the weak user
    /// sees as interference from its own beam.
    zeta: Vec<f64>,
    /// Weak-user power budget for the balancing step.
    ptot2: f64,
}

impl BalanceProblem {
    /// `noise_terms[m]` is `sigma2_n / c2_2[m]`.
    pub fn new(
        t: Vec<f64>,
        gamma_th: f64,
        p1: &[f64],
        noise_terms: &[f64],
        ptot2: f64,
    ) -> Result<Self> {
        let m = p1.len();
        if t.len() != m * m {
            return Err(Error::DimensionMismatch { expected: m * m, got: t.len(), what: "coupling matrix" });
        }
        if noise_terms.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: noise_terms.len(), what: "noise terms" });
        }
        let mut t = t;
        for v in t.iter_mut() {
            // quadratic forms of PSD matrices; tolerate roundoff negatives
            if *v < 0.0 {
                if *v < -1e-12 {
                    return Err(Error::Numeric("negative interference coupling".into()));
                }
                *v = 0.0;
            }
        }
        let mut lambda = Vec::with_capacity(m);
        let mut zeta = Vec::with_capacity(m);
        for i in 0..m {
            let tii = t[i * m + i];
            if tii <= 0.0 {
                return Err(Error::UnserviceableUser { pair: i, gain: tii });
            }
            lambda.push(gamma_th / tii);
            let mut z = noise_terms[i];
            for k in 0..m {
                z += p1[k] * t[i * m + k];
            }
            zeta.push(z);
        }
        Ok(BalanceProblem { m, t, lambda, zeta, ptot2 })
    }

    pub fn pairs(&self) -> usize {
        self.m
    }

    pub fn coupling(&self, m: usize, k: usize) -> f64 {
        self.t[m * self.m + k]
    }

    /// `Lambda T°` with zeroed diagonal, row-major.
    fn lambda_t_offdiag(&self) -> Vec<f64> {
        let m = self.m;
        let mut a = vec![0.0f64; m * m];
        for i in 0..m {
            for k in 0..m {
                if i != k {
                    a[i * m + k] = self.lambda[i] * self.t[i * m + k];
                }
            }
        }
        a
    }
}

/// Max-min SINR balance over the weak users at budget `ptot2`.
///
/// Returns `C` (the common ratio of achieved SINR to threshold) and the
/// balancing powers, which exhaust the budget.
pub fn sinr_balance(bp: &BalanceProblem) -> Result<(f64, Vec<f64>)> {
    if bp.ptot2 <= 0.0 {
        return Err(Error::InvalidConfig("balance budget must be positive".into()));
    }
    let m = bp.m;
    let lt = bp.lambda_t_offdiag();
    let n = m + 1;
    let mut upsilon = vec![0.0f64; n * n];
    for i in 0..m {
        for k in 0..m {
            upsilon[i * n + k] = lt[i * m + k];
        }
        upsilon[i * n + m] = bp.lambda[i] * bp.zeta[i];
    }
    for k in 0..m {
        let col_sum: f64 = (0..m).map(|i| lt[i * m + k]).sum();
        upsilon[m * n + k] = col_sum / bp.ptot2;
    }
    upsilon[m * n + m] = (0..m).map(|i| bp.lambda[i] * bp.zeta[i]).sum::<f64>() / bp.ptot2;

    let (lam, x) = perron_eigpair(&upsilon, n, 1_000_000)?;
    if lam <= 0.0 {
        return Err(Error::Numeric("nonpositive Perron root of the balance matrix".into()));
    }
    let last = x[m];
    if last <= 0.0 {
        return Err(Error::Numeric("balance eigenvector has nonpositive anchor entry".into()));
    }
    let mut p2 = Vec::with_capacity(m);
    for i in 0..m {
        let v = x[i] / last;
        if v < -1e-12 {
            return Err(Error::Numeric("negative entry in balance eigenvector".into()));
        }
        p2.push(v.max(0.0));
    }
    Ok((1.0 / lam, p2))
}

/// Minimum weak-user powers meeting the threshold with equality:
/// `p2 = (I - Lambda T°)^{-1} Lambda zeta`.
///
/// Feasibility requires the spectral radius of `Lambda T°` below one;
/// otherwise no finite power meets the threshold.
pub fn min_power_solve(bp: &BalanceProblem) -> Result<Vec<f64>> {
    let m = bp.m;
    let lt = bp.lambda_t_offdiag();
    let radius = spectral_radius_nonnegative(&lt, m)?;
    if radius >= 1.0 - 1e-9 {
        return Err(Error::Infeasible(alloc::format!(
            "SINR threshold unreachable: spectral radius {radius:.6} of the coupling matrix"
        )));
    }
    let a = CMat::from_fn(m, m, |i, k| {
        let v = if i == k { 1.0 } else { 0.0 } - lt[i * m + k];
        C64::new(v, 0.0)
    });
    let rhs: Vec<C64> = (0..m).map(|i| C64::new(bp.lambda[i] * bp.zeta[i], 0.0)).collect();
    let x = linear_solve(&a, &rhs)?;
    let mut p2 = Vec::with_capacity(m);
    for z in &x {
        if z.re <= 0.0 {
            return Err(Error::Numeric("nonpositive minimum-power solution".into()));
        }
        p2.push(z.re);
    }
    Ok(p2)
}

/// Approximate expected weak-user SINRs from the coupling matrix and powers.
pub fn weak_sinrs(t: &[f64], p1: &[f64], p2: &[f64], noise_terms: &[f64]) -> Vec<f64> {
    let m = p1.len();
    debug_assert_eq!(t.len(), m * m);
    (0..m)
        .map(|i| {
            let tii = t[i * m + i];
            let mut den = p1[i] * tii + noise_terms[i];
            for k in 0..m {
                if k != i {
                    den += (p1[k] + p2[k]) * t[i * m + k];
                }
            }
            p2[i] * tii / den
        })
        .collect()
}
