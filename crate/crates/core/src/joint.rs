//! Alternating joint optimization of IRS phases and transmit powers.
//!
//! Beams are zeroforcing and fixed. Each outer iteration re-optimizes every
//! pair's IRS phases against the previous powers, then re-solves the power
//! control: SINR balancing while the threshold is out of reach, minimum
//! power once the balance level clears one. The loop terminates when the
//! approximate weak-user SINRs stop moving between iterations while the
//! powers come from the minimum-power branch. Because the alternating map
//! can settle into a limit cycle instead of a fixed point, every
//! minimum-power iterate (which is feasible by construction) is ranked by
//! total power and the best one is returned once progress stalls.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{ScenarioConfig, UserPairChannels};
use crate::irs_opt::{build_fractional_problem, dinkelbach_optimize_budgeted, IrsPhaseVector};
use crate::power_alloc::{
    interference_matrix, min_power_solve, sinr_balance, strong_user_power, weak_sinrs,
    BalanceProblem, PowerAllocation,
};
use crate::zeroforcing::{zeroforcing_beams, BeamSet};
use crate::{Error, Result};

/// Controls for the outer loop.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Total power budget; `None` picks `100 * M * sigma2_n`.
    pub pmax: Option<f64>,
    /// Budget multiplier applied when the threshold stays unreachable.
    pub budget_growth: f64,
    /// Maximum number of budget escalations before declaring infeasibility.
    pub max_budget_escalations: usize,
    /// Termination tolerance on the relative change of the weak SINRs.
    pub eps_gamma: f64,
    /// Dinkelbach tolerance for the per-pair phase subproblems. Deliberately
    /// loose: the alternation rebalances powers after every phase update, so
    /// the inner ratio only needs to improve, not converge to optimality; a
    /// tight tolerance burns thousands of inner iterations refining SINRs the
    /// next power step discards.
    pub eps: f64,
    /// Outer-iteration cap for each inner Dinkelbach call; the call returns
    /// its best iterate when the cap fires (inexact block step).
    pub max_inner: usize,
    pub max_outer: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            pmax: None,
            budget_growth: 10.0,
            max_budget_escalations: 10,
            eps_gamma: 1e-3,
            eps: 1e-2,
            max_inner: 60,
            max_outer: 40,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.pmax {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidConfig("power budget must be positive".into()));
            }
        }
        if !(self.budget_growth > 1.0) {
            return Err(Error::InvalidConfig("budget growth must exceed one".into()));
        }
        if !(self.eps_gamma > 0.0) {
            return Err(Error::InvalidConfig("outer tolerance must be positive".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidConfig("Dinkelbach tolerance must lie in (0, 1)".into()));
        }
        if self.max_inner == 0 {
            return Err(Error::InvalidConfig("need at least one inner iteration".into()));
        }
        if self.max_outer < 2 {
            return Err(Error::InvalidConfig("need at least two outer iterations".into()));
        }
        Ok(())
    }
}

/// Converged output of [`joint_optimize`].
#[derive(Debug, Clone)]
pub struct JointSolution {
    pub thetas: Vec<IrsPhaseVector>,
    pub beams: BeamSet,
    pub powers: PowerAllocation,
    /// Approximate expected weak-user SINRs at the returned operating point.
    pub weak_sinrs: Vec<f64>,
    /// Exact expected strong-user SINRs (threshold by construction).
    pub strong_sinrs: Vec<f64>,
    /// Balance level `C` from the last balancing step.
    pub balance_level: f64,
    pub outer_iterations: usize,
    /// The budget in force at termination (after any escalations).
    pub budget: f64,
    pub budget_escalations: usize,
}

impl JointSolution {
    pub fn total_power(&self) -> f64 {
        self.powers.total()
    }
}

/// Runs the alternating optimization on a generated scenario.
pub fn joint_optimize(
    pairs: &[UserPairChannels],
    scenario: &ScenarioConfig,
    solver: &SolverConfig,
) -> Result<JointSolution> {
    solver.validate()?;
    let m_cnt = pairs.len();
    if m_cnt == 0 {
        return Err(Error::InvalidConfig("no user pairs".into()));
    }
    let sigma2 = scenario.sigma2_n;
    let gamma_th = scenario.gamma_th;
    let beams = zeroforcing_beams(pairs)?;

    // strong users never see the IRS: closed-form minimum powers, fixed
    let p1: Vec<f64> = (0..m_cnt)
        .map(|m| {
            strong_user_power(gamma_th, sigma2, pairs[m].c2_1, beams.signal_gain[m])
                .map_err(|_| Error::UnserviceableUser { pair: m, gain: beams.signal_gain[m] })
        })
        .collect::<Result<_>>()?;
    let p1_sum: f64 = p1.iter().sum();
    let noise: Vec<f64> = pairs.iter().map(|p| sigma2 / p.c2_2).collect();

    let mut budget = solver.pmax.unwrap_or(100.0 * m_cnt as f64 * sigma2);
    let mut escalations = 0usize;
    while p1_sum >= budget * (1.0 - 1e-12) {
        if escalations >= solver.max_budget_escalations {
            return Err(Error::Infeasible(alloc::format!(
                "strong-user powers ({p1_sum:.3e}) exhaust every allowed budget"
            )));
        }
        budget *= solver.budget_growth;
        escalations += 1;
    }

    // random initial phases, deterministic in the scenario seed; stream 0 is
    // reserved here, channel generation uses streams 1..=M
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    rng.set_stream(0);
    let mut thetas: Vec<IrsPhaseVector> =
        (0..m_cnt).map(|_| IrsPhaseVector::random(scenario.n, &mut rng)).collect();

    let mut current: Option<(PowerAllocation, bool)> = None;
    let mut gamma_prev: Option<Vec<f64>> = None;
    let mut c_track: Option<f64> = None;
    let mut c_stalled = 0usize;
    // best balance level under the budget before the last escalation, for
    // the futility test below
    let mut c_prev_budget: Option<f64> = None;
    let mut c_last = 0.0f64;
    // best feasible iterate (phases, interference matrix, powers, total)
    let mut best: Option<(Vec<IrsPhaseVector>, Vec<f64>, PowerAllocation, f64)> = None;
    let mut idle = 0usize;

    for iter in 1..=solver.max_outer {
        if let Some((pw, _)) = &current {
            for m in 0..m_cnt {
                let prob = build_fractional_problem(&pairs[m], &beams, pw, m, sigma2)?;
                let (t_new, _) =
                    dinkelbach_optimize_budgeted(&prob, &thetas[m], solver.eps, solver.max_inner)?;
                thetas[m] = t_new;
            }
        }
        let t = interference_matrix(pairs, &thetas, &beams);

        // termination: new phases, previous powers
        if let Some((pw, from_min)) = &current {
            let g_new = weak_sinrs(&t, &pw.p1, &pw.p2, &noise);
            if *from_min {
                if let Some(gp) = &gamma_prev {
                    let gap = g_new
                        .iter()
                        .zip(gp)
                        .map(|(a, b)| (a - b).abs() / b.abs().max(1e-12))
                        .fold(0.0f64, f64::max);
                    if gap <= solver.eps_gamma {
                        return finish(
                            pairs, scenario, thetas, beams, t, &p1, &noise, pw, c_last, iter,
                            budget, escalations,
                        );
                    }
                }
            }
            gamma_prev = Some(g_new);
        }

        let bp = BalanceProblem::new(t.clone(), gamma_th, &p1, &noise, budget - p1_sum)?;
        let (c, p2_bal) = sinr_balance(&bp)?;
        c_last = c;
        let (p2, from_min) =
            if c >= 1.0 { (min_power_solve(&bp)?, true) } else { (p2_bal, false) };
        let mut improved = false;
        if from_min {
            let tot: f64 = p2.iter().sum();
            improved = best.as_ref().map_or(true, |(_, _, _, bt)| tot < bt * (1.0 - 1e-9));
            if improved {
                let pw = PowerAllocation { p1: p1.clone(), p2: p2.clone() };
                best = Some((thetas.clone(), t.clone(), pw, tot));
            }
        }
        // the alternation is not monotone (phase updates are inexact block
        // steps); once a feasible solution exists, stop after a window of
        // iterations that fail to improve it and return the best one
        if best.is_some() {
            if improved {
                idle = 0;
            } else {
                idle += 1;
                if idle >= 6 {
                    let (bth, bt, bpw, _) = best.take().expect("idle implies a best iterate");
                    return finish(
                        pairs, scenario, bth, beams, bt, &p1, &noise, &bpw, c_last, iter,
                        budget, escalations,
                    );
                }
            }
        }
        if c < 1.0 {
            // the full budget cannot reach the threshold; once the phase
            // updates stop lifting the balance level, grow the budget
            match c_track {
                Some(best_c) if c <= best_c * 1.02 => {
                    c_stalled += 1;
                    if c_stalled >= 5 {
                        if escalations >= solver.max_budget_escalations {
                            return Err(Error::Infeasible(alloc::format!(
                                "SINR threshold unreachable: balance level stalled at {c:.4}"
                            )));
                        }
                        // futility: when the balance level is pinned by
                        // interference from the fixed strong-user powers,
                        // more budget changes nothing; if the previous
                        // escalation failed to even double C, stop here
                        // instead of walking the whole escalation ladder
                        if let Some(prev) = c_prev_budget {
                            if best_c < 0.5 && best_c < prev * 2.0 {
                                return Err(Error::Infeasible(alloc::format!(
                                    "SINR threshold unreachable: balance level {best_c:.4} \
                                     barely moved under a {}x larger budget",
                                    solver.budget_growth
                                )));
                            }
                        }
                        c_prev_budget = Some(best_c);
                        budget *= solver.budget_growth;
                        escalations += 1;
                        c_track = None;
                        c_stalled = 0;
                    }
                }
                _ => {
                    c_track = Some(c_track.unwrap_or(0.0).max(c));
                    c_stalled = 0;
                }
            }
        }
        current = Some((PowerAllocation { p1: p1.clone(), p2 }, from_min));
    }
    if let Some((bth, bt, bpw, _)) = best {
        return finish(
            pairs, scenario, bth, beams, bt, &p1, &noise, &bpw, c_last, solver.max_outer,
            budget, escalations,
        );
    }
    Err(Error::MaxIterations { what: "joint optimization", iterations: solver.max_outer })
}

/// Finalizes at the current phases: re-solve the power control so the
/// returned powers are the exact fixed point for the returned phases.
#[allow(clippy::too_many_arguments)]
fn finish(
    pairs: &[UserPairChannels],
    scenario: &ScenarioConfig,
    thetas: Vec<IrsPhaseVector>,
    beams: BeamSet,
    t: Vec<f64>,
    p1: &[f64],
    noise: &[f64],
    fallback: &PowerAllocation,
    c_last: f64,
    iterations: usize,
    budget: f64,
    escalations: usize,
) -> Result<JointSolution> {
    let p1_sum: f64 = p1.iter().sum();
    let bp = BalanceProblem::new(t.clone(), scenario.gamma_th, p1, noise, budget - p1_sum)?;
    let (powers, balance_level) = match sinr_balance(&bp) {
        Ok((c, _)) if c >= 1.0 => {
            let p2 = min_power_solve(&bp)?;
            (PowerAllocation { p1: p1.to_vec(), p2 }, c)
        }
        Ok((c, _)) => (fallback.clone(), c),
        Err(_) => (fallback.clone(), c_last),
    };
    let weak = weak_sinrs(&t, &powers.p1, &powers.p2, noise);
    let strong: Vec<f64> = (0..pairs.len())
        .map(|m| powers.p1[m] * pairs[m].c2_1 * beams.signal_gain[m] / scenario.sigma2_n)
        .collect();
    Ok(JointSolution {
        thetas,
        beams,
        powers,
        weak_sinrs: weak,
        strong_sinrs: strong,
        balance_level,
        outer_iterations: iterations,
        budget,
        budget_escalations: escalations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::build_scenario;

    fn scenario(nt: usize, n: usize, m: usize, gamma_th: f64, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            nt,
            n,
            m,
            l_strong: 1,
            l_weak: 2,
            rank_g: 2,
            sigma2_n: 1.0,
            c2_1: 1.0,
            c2_2: 1.0,
            gamma_th,
            seed,
        }
    }

    #[test]
    fn single_pair_converges_to_threshold_fixed_point() {
        let cfg = scenario(4, 8, 1, 1.5, 7);
        let pairs = build_scenario(&cfg).unwrap();
        let sol = joint_optimize(&pairs, &cfg, &SolverConfig::default()).unwrap();
        assert!(sol.outer_iterations <= 50);
        assert!((sol.strong_sinrs[0] - 1.5).abs() <= 1e-9 * 1.5);
        // min-power fixed point: weak SINR exactly at the threshold
        assert!((sol.weak_sinrs[0] - 1.5).abs() <= 1e-6 * 1.5, "{}", sol.weak_sinrs[0]);
        assert!(sol.total_power() <= sol.budget);
    }

    #[test]
    fn multi_pair_hits_threshold_for_all_weak_users() {
        let cfg = scenario(8, 8, 2, 1.0, 3);
        let pairs = build_scenario(&cfg).unwrap();
        let sol = joint_optimize(&pairs, &cfg, &SolverConfig::default()).unwrap();
        for g in &sol.weak_sinrs {
            assert!((g - 1.0).abs() <= 1e-6, "weak SINR {g}");
        }
        for g in &sol.strong_sinrs {
            assert!((g - 1.0).abs() <= 1e-9, "strong SINR {g}");
        }
        assert!(sol.balance_level >= 1.0);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = scenario(4, 6, 1, 1.2, 42);
        let pairs = build_scenario(&cfg).unwrap();
        let a = joint_optimize(&pairs, &cfg, &SolverConfig::default()).unwrap();
        let b = joint_optimize(&pairs, &cfg, &SolverConfig::default()).unwrap();
        assert_eq!(a.powers.p2, b.powers.p2);
        assert_eq!(a.thetas[0], b.thetas[0]);
        assert_eq!(a.outer_iterations, b.outer_iterations);
    }

    #[test]
    fn budget_escalates_when_threshold_needs_it() {
        // tiny explicit budget forces escalation before the threshold is met
        let cfg = scenario(4, 6, 1, 2.0, 5);
        let pairs = build_scenario(&cfg).unwrap();
        let solver = SolverConfig { pmax: Some(1e-4), ..SolverConfig::default() };
        let sol = joint_optimize(&pairs, &cfg, &solver).unwrap();
        assert!(sol.budget_escalations >= 1);
        assert!((sol.weak_sinrs[0] - 2.0).abs() <= 1e-6 * 2.0);
    }

    #[test]
    fn invalid_solver_config_rejected() {
        let cfg = scenario(4, 4, 1, 1.0, 1);
        let pairs = build_scenario(&cfg).unwrap();
        let bad = SolverConfig { budget_growth: 0.5, ..SolverConfig::default() };
        assert!(matches!(
            joint_optimize(&pairs, &cfg, &bad),
            Err(Error::InvalidConfig(_))
        ));
    }
}
