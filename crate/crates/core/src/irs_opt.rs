//! IRS phase optimization for one user pair.
//!
//! The weak-user SINR is a ratio of quadratic forms in the constant-modulus
//! phase vector. Dinkelbach's transform turns the ratio into a sequence of
//! quadratic minimizations over the modulus constraint; each of those is
//! handled by ADMM with an exact circle projection, warm-started from the
//! previous iterate so the auxiliary objective can never go negative.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::channel::UserPairChannels;
use crate::numerics::power::{dominant_hermitian_psd, dominant_hermitian_psd_tol, gershgorin_bound};
use crate::numerics::{cholesky_factor, vec as cvec, C64, CMat, HermitianMatrix};
use crate::power_alloc::PowerAllocation;
use crate::{Error, Result};

/// IRS reflection coefficients with the fixed per-element modulus `1/sqrt(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IrsPhaseVector {
    theta: Vec<C64>,
}

impl IrsPhaseVector {
    /// Builds the vector from raw phases in radians.
    pub fn from_phases(phases: &[f64]) -> Self {
        let amp = 1.0 / (phases.len() as f64).sqrt();
        IrsPhaseVector {
            theta: phases.iter().map(|&p| C64::new(p.cos() * amp, p.sin() * amp)).collect(),
        }
    }

    /// Uniform random phases.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let phases: Vec<f64> =
            (0..n).map(|_| rng.gen::<f64>() * 2.0 * core::f64::consts::PI).collect();
        IrsPhaseVector::from_phases(&phases)
    }

    /// Entrywise projection of an arbitrary vector onto the modulus
    /// constraint; zero entries project to phase zero.
    pub fn project(v: &[C64]) -> Self {
        let amp = 1.0 / (v.len() as f64).sqrt();
        IrsPhaseVector {
            theta: v
                .iter()
                .map(|z| {
                    let m = z.norm();
                    if m > 0.0 {
                        z * (amp / m)
                    } else {
                        C64::new(amp, 0.0)
                    }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.theta
    }

    /// Worst deviation of any entry modulus from `1/sqrt(N)`.
    pub fn modulus_error(&self) -> f64 {
        let amp = 1.0 / (self.len() as f64).sqrt();
        self.theta.iter().map(|z| (z.norm() - amp).abs()).fold(0.0, f64::max)
    }
}

/// Quadratic-fraction data for one pair's weak-user SINR:
/// signal numerator `theta† P theta` over
/// `power_ratio * theta† P theta + theta† Q theta + noise_term`.
#[derive(Debug, Clone)]
pub struct FractionalProblem {
    pub p: HermitianMatrix,
    pub q: HermitianMatrix,
    /// `p1 / p2` of the pair itself.
    pub power_ratio: f64,
    /// `sigma2_n / c2_2`.
    pub noise_term: f64,
}

impl FractionalProblem {
    pub fn order(&self) -> usize {
        self.p.order()
    }

    pub fn numerator(&self, theta: &[C64]) -> f64 {
        cvec::quad_form(self.p.as_mat(), theta).max(0.0)
    }

    pub fn denominator(&self, theta: &[C64]) -> f64 {
        let nn: f64 = theta.iter().map(|z| z.norm_sqr()).sum();
        self.power_ratio * self.numerator(theta)
            + cvec::quad_form(self.q.as_mat(), theta).max(0.0)
            + self.noise_term * nn
    }

    pub fn sinr(&self, theta: &[C64]) -> f64 {
        self.numerator(theta) / self.denominator(theta)
    }
}

/// History of the Dinkelbach outer loop.
#[derive(Debug, Clone, Default)]
pub struct DinkelbachTrace {
    /// Ratio estimates, starting from the initial zero.
    pub etas: Vec<f64>,
    /// Auxiliary objective `F(eta) = f - eta g` at each accepted iterate.
    pub f_values: Vec<f64>,
    pub iterations: usize,
    /// Set when a budgeted run hit its iteration cap before the tolerance.
    pub truncated: bool,
}

/// Expected interference power coupling beam `w` into the weak user behind
/// an IRS with correlation `r_g`, BS-IRS channel `g`, and phases `theta`:
/// `x† R_g x` with `x = conj(G† w) ⊙ theta`.
pub fn interference_term(theta: &IrsPhaseVector, r_g: &HermitianMatrix, g: &CMat, w: &[C64]) -> f64 {
    let u = g.adjoint_matvec(w);
    let x: Vec<C64> =
        u.iter().zip(theta.as_slice()).map(|(ui, ti)| ui.conj() * ti).collect();
    cvec::quad_form(r_g.as_mat(), &x).max(0.0)
}

/// Assembles pair `m`'s fractional SINR problem for the given beams and
/// powers. `P` carries the pair's own weak-user beam, `Q` the other pairs'
/// full transmit powers.
pub fn build_fractional_problem(
    pair: &UserPairChannels,
    beams: &crate::zeroforcing::BeamSet,
    powers: &PowerAllocation,
    m: usize,
    sigma2_n: f64,
) -> Result<FractionalProblem> {
    let n = pair.r_g.order();
    let p2 = powers.p2[m];
    if p2 <= 0.0 {
        return Err(Error::InvalidConfig(alloc::format!(
            "pair {m}: weak-user power must be positive to form the SINR fraction"
        )));
    }
    let mut q_acc = CMat::zeros(n, n);
    let mut p_mat = CMat::zeros(n, n);
    for (k, w) in beams.beams.iter().enumerate() {
        let u = pair.g.adjoint_matvec(w);
        // R_g ⊙ (u u†) = diag(u) R_g diag(u)†
        let coupled = CMat::from_fn(n, n, |a, b| pair.r_g.as_mat()[(a, b)] * u[a] * u[b].conj());
        if k == m {
            p_mat = coupled.scaled(p2);
        } else {
            q_acc = q_acc.add(&coupled.scaled(powers.p1[k] + powers.p2[k]));
        }
    }
    Ok(FractionalProblem {
        p: HermitianMatrix::new_unchecked(p_mat),
        q: HermitianMatrix::new_unchecked(q_acc),
        power_ratio: powers.p1[m] / p2,
        noise_term: sigma2_n / pair.c2_2,
    })
}

/// Approximate weak-user SINR at the given phases.
pub fn sinr_weak(theta: &IrsPhaseVector, prob: &FractionalProblem) -> f64 {
    prob.sinr(theta.as_slice())
}

/// Relaxed (unit-norm instead of constant-modulus) SINR maximizer: the
/// generalized eigenproblem `P v = lambda (r P + Q + noise I) v`, solved by
/// Cholesky whitening and power iteration.
///
/// Returns the unit-norm maximizer and the attained SINR, an upper bound for
/// the constant-modulus problem.
pub fn unconstrained_eig_solution(prob: &FractionalProblem) -> Result<(Vec<C64>, f64)> {
    let n = prob.order();
    let b = prob
        .p
        .scaled(prob.power_ratio)
        .add(&prob.q)
        .add(&HermitianMatrix::new_unchecked(CMat::identity(n).scaled(prob.noise_term)));
    let chol = cholesky_factor(&b, 0.0)?;
    let (lam, v) = dominant_hermitian_psd(
        n,
        |x| chol.forward(&prob.p.as_mat().matvec(&chol.backward(x))),
        200_000,
    );
    let theta = cvec::normalized(&chol.backward(&v));
    Ok((theta, lam.max(0.0)))
}

/// ADMM controls. `rho` defaults to `trace(S)/N`.
#[derive(Debug, Clone)]
pub struct AdmmParams {
    pub rho: Option<f64>,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for AdmmParams {
    fn default() -> Self {
        AdmmParams { rho: None, tol: 1e-8, max_iters: 300 }
    }
}

/// Minimizes `(1/2) theta† S theta` over constant-modulus `theta` by scaled
/// ADMM, splitting into an unconstrained quadratic step (one reusable
/// Cholesky solve per iteration) and an exact projection onto the modulus
/// circles. Returns the best feasible iterate seen.
///
/// `S` must be PSD up to `-1e-8 * trace` roundoff.
pub fn admm_constant_modulus_min(
    s: &HermitianMatrix,
    theta0: &IrsPhaseVector,
    params: &AdmmParams,
) -> Result<IrsPhaseVector> {
    let n = s.order();
    if theta0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: theta0.len(), what: "ADMM start" });
    }
    let trace = s.trace();
    let psd_slack = 1e-8 * trace.abs().max(1e-30);
    cholesky_factor(s, psd_slack)
        .map_err(|_| Error::NotPositiveSemidefinite { min_eigenvalue_bound: -psd_slack })?;

    let rho = params.rho.unwrap_or_else(|| {
        let r = trace / n as f64;
        if r > 0.0 {
            r
        } else {
            1.0
        }
    });
    let factor = cholesky_factor(s, rho)?;
    let amp = 1.0 / (n as f64).sqrt();

    let objective = |v: &[C64]| 0.5 * cvec::quad_form(s.as_mat(), v);

    let mut z: Vec<C64> = theta0.as_slice().to_vec();
    let mut u = vec![C64::new(0.0, 0.0); n];
    let mut best = theta0.clone();
    let mut best_obj = objective(theta0.as_slice());
    let mut stagnant = 0usize;

    for _ in 0..params.max_iters {
        let rhs: Vec<C64> = z.iter().zip(&u).map(|(zi, ui)| (zi - ui) * rho).collect();
        let theta = factor.solve(&rhs);
        let z_prev = z.clone();
        z = theta
            .iter()
            .zip(&u)
            .zip(&z_prev)
            .map(|((ti, ui), zp)| {
                let w = ti + ui;
                let m = w.norm();
                if m > 0.0 {
                    w * (amp / m)
                } else {
                    // degenerate input: keep the previous phase
                    *zp
                }
            })
            .collect();
        for ((ui, ti), zi) in u.iter_mut().zip(&theta).zip(&z) {
            *ui += ti - zi;
        }

        let obj = objective(&z);
        if obj < best_obj - 1e-10 * best_obj.abs().max(1e-30) {
            best_obj = obj;
            best = IrsPhaseVector { theta: z.clone() };
            stagnant = 0;
        } else {
            if obj < best_obj {
                best_obj = obj;
                best = IrsPhaseVector { theta: z.clone() };
            }
            // the iteration can settle into a non-stationary cycle that never
            // meets the residual tolerances; once the objective stops
            // improving there is nothing left to gain from more sweeps
            stagnant += 1;
            if stagnant >= 20 {
                break;
            }
        }
        let primal: f64 =
            theta.iter().zip(&z).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let dual: f64 =
            z.iter().zip(&z_prev).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() * rho;
        // the dual residual carries a factor rho, which grows with the
        // problem scale; compare it against a matching scale so stopping is
        // invariant to scaling S
        if primal <= params.tol && dual <= params.tol * rho.max(1.0) {
            break;
        }
    }
    Ok(best)
}

/// Maximizes the pair's weak-user SINR over constant-modulus phases by
/// Dinkelbach iteration. Each subproblem is the ADMM minimization of
/// `(1/2) theta† S theta` with `S = kappa I - D`, `D = (1 - eta r) P - eta Q`
/// and `kappa` just above `lambda_max(D)` so `S` stays PSD.
///
/// Warm-starting ADMM at the previous phases guarantees the auxiliary
/// objective is nonnegative and the ratio estimates are nondecreasing.
pub fn dinkelbach_optimize(
    prob: &FractionalProblem,
    theta_init: &IrsPhaseVector,
    eps: f64,
) -> Result<(IrsPhaseVector, DinkelbachTrace)> {
    dinkelbach_core(prob, theta_init, eps, 400, false)
}

/// [`dinkelbach_optimize`] with a hard cap on outer iterations that returns
/// the best iterate instead of erroring when the cap is hit.
///
/// Intended for callers doing inexact block-coordinate ascent (the joint
/// loop): every iterate is feasible and the ratio estimates are
/// nondecreasing, so truncation costs optimality, never correctness. The
/// returned trace has `truncated` set when the cap fired.
pub fn dinkelbach_optimize_budgeted(
    prob: &FractionalProblem,
    theta_init: &IrsPhaseVector,
    eps: f64,
    max_outer: usize,
) -> Result<(IrsPhaseVector, DinkelbachTrace)> {
    dinkelbach_core(prob, theta_init, eps, max_outer, true)
}

fn dinkelbach_core(
    prob: &FractionalProblem,
    theta_init: &IrsPhaseVector,
    eps: f64,
    max_outer: usize,
    truncate: bool,
) -> Result<(IrsPhaseVector, DinkelbachTrace)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidConfig("Dinkelbach tolerance must lie in (0, 1)".into()));
    }
    let n = prob.order();
    if theta_init.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: theta_init.len(),
            what: "Dinkelbach start",
        });
    }
    let mut theta = theta_init.clone();
    let mut eta = 0.0f64;
    let mut trace = DinkelbachTrace::default();
    // continuation on the ADMM penalty: the default rho tracks the
    // constraint tightly but can settle into a slow crawl near the optimum;
    // once F stalls above the tolerance the penalty is relaxed so the inner
    // solver reaches a fixed point and F collapses to zero
    let mut rho_factor = 1.0f64;
    let mut prev_f_aux = f64::INFINITY;
    let mut small_steps = 0usize;
    // P and Q are PSD, so lambda_min(D) >= -eta lambda_max(Q): shifting D by
    // eta lambda_max(Q) makes it PSD for the power iteration, with a shift on
    // the problem's own scale (a Gershgorin shift here crawls: the clustered
    // shifted spectrum costs thousands of iterations per eigensolve)
    let (lam_q, _) = dominant_hermitian_psd(n, |x| prob.q.as_mat().matvec(x), 50_000);

    for iter in 0..max_outer {
        let d = prob
            .p
            .scaled(1.0 - eta * prob.power_ratio)
            .add(&prob.q.scaled(-eta));
        let shift = eta * lam_q * 1.000001 + 1e-12;
        // a rough kappa estimate is enough: the shift ladder below absorbs
        // undershoot, and a tight residual here costs more than the solve
        let (lam_shifted, eigvec) = dominant_hermitian_psd_tol(
            n,
            |x| {
                let mut y = d.as_mat().matvec(x);
                for (yi, xi) in y.iter_mut().zip(x) {
                    *yi += xi * shift;
                }
                y
            },
            500,
            1e-5,
        );
        let lam = lam_shifted - shift;
        // the power-iteration estimate can undershoot lambda_max on clustered
        // spectra; fall back to progressively safer shifts, ending at the
        // certified Gershgorin bound
        let bound = gershgorin_bound(&d);
        let scale = bound.max(1e-12);
        let shifts =
            [lam + 1e-9 * lam.abs(), lam + 1e-6 * scale, lam + 1e-3 * scale, bound];
        let mut next = None;
        for (si, &kappa) in shifts.iter().enumerate() {
            let s = HermitianMatrix::new_unchecked(
                CMat::identity(n).scaled(kappa).sub(d.as_mat()),
            );
            let mut params = AdmmParams::default();
            if rho_factor < 1.0 {
                let base = (s.trace() / n as f64).max(f64::MIN_POSITIVE);
                params.rho = Some(base * rho_factor);
            }
            match admm_constant_modulus_min(&s, &theta, &params) {
                Ok(t) => {
                    next = Some(t);
                    break;
                }
                Err(Error::NotPositiveSemidefinite { .. }) if si + 1 < shifts.len() => {}
                Err(e) => return Err(e),
            }
        }
        let warm = next.ok_or(Error::Numeric(
            "could not make the Dinkelbach subproblem positive semidefinite".into(),
        ))?;
        // monotone polish: with E = D + shift I PSD, theta'Etheta is minorized
        // by its tangent at the current iterate, and the minorant is maximized
        // entrywise by the circle projection of E theta; this squeezes out the
        // small ascent steps ADMM is slow to take
        let amp = 1.0 / (n as f64).sqrt();
        let polish = |mut th: IrsPhaseVector| -> IrsPhaseVector {
            let mut obj = cvec::quad_form(d.as_mat(), th.as_slice());
            for _ in 0..300 {
                let mut y = d.as_mat().matvec(th.as_slice());
                for (yi, ti) in y.iter_mut().zip(th.as_slice()) {
                    *yi += ti * shift;
                }
                let polished: Vec<C64> = y
                    .iter()
                    .zip(th.as_slice())
                    .map(|(yi, ti)| {
                        let m = yi.norm();
                        if m > 0.0 {
                            yi * (amp / m)
                        } else {
                            *ti
                        }
                    })
                    .collect();
                let new_obj = cvec::quad_form(d.as_mat(), &polished);
                if new_obj - obj <= 1e-14 * obj.abs().max(1e-30) {
                    break;
                }
                obj = new_obj;
                th = IrsPhaseVector { theta: polished };
            }
            th
        };
        let warm = polish(warm);
        // second candidate: the circle projection of the dominant eigenvector
        // of the shifted parametric matrix (a by-product of the kappa solve).
        // the warm-started ADMM is a local method and can crawl along a
        // continuum of slowly improving iterates as eta grows; the eigenvector
        // projection jumps to the relaxed maximizer's basin instead
        let projected: Vec<C64> = eigvec
            .iter()
            .zip(theta.as_slice())
            .map(|(vi, ti)| {
                let m = vi.norm();
                if m > 0.0 {
                    vi * (amp / m)
                } else {
                    *ti
                }
            })
            .collect();
        let cold = polish(IrsPhaseVector { theta: projected });
        let keep_warm = cvec::quad_form(d.as_mat(), warm.as_slice())
            >= cvec::quad_form(d.as_mat(), cold.as_slice());
        theta = if keep_warm { warm } else { cold };

        let f = prob.numerator(theta.as_slice());
        let g = prob.denominator(theta.as_slice());
        let f_aux = f - eta * g;
        trace.etas.push(eta);
        trace.f_values.push(f_aux);
        trace.iterations = iter + 1;
        // scale-aware stop on F: relative in the attained SINR and absolute
        // near zero; an absolute test on F is meaningless because g scales
        // with the covariance traces
        if f_aux <= eps * (f + g.max(1.0)) {
            return Ok((theta, trace));
        }
        // the F test is blind when g is tiny (near-nulled interference), so
        // also stop once the ratio itself moves by at most eps * (1 + eta)
        // twice in a row: the one-iteration window guards against a single
        // short inner step masquerading as convergence
        let eta_new = f / g;
        if eta_new - eta <= eps * (1.0 + eta_new) {
            small_steps += 1;
            if small_steps >= 2 {
                return Ok((theta, trace));
            }
        } else {
            small_steps = 0;
        }
        if f_aux >= 0.5 * prev_f_aux {
            rho_factor = (rho_factor * 0.1).max(1e-4);
        }
        prev_f_aux = f_aux;
        eta = eta_new;
    }
    if truncate {
        trace.truncated = true;
        return Ok((theta, trace));
    }
    Err(Error::FractionalNonConvergence { etas: trace.etas, f_values: trace.f_values })
}
