//! Acceptance gate: one test per criterion, each printing a single
//! [PASS]/[FAIL] line with its measured value against the pinned tolerance.
//!
//! Criteria 1-10 are fast and deterministic. Criteria 11-13 reproduce the
//! figure-scale trends and run Monte Carlo sweeps; they take minutes on a
//! single core.

use std::time::Instant;

use irsnoma::experiments::{
    sweep_irs_elements, sweep_rank, sweep_total_snr, validate_approximation, FixedPowerMode,
};
use irsnoma_core::channel::{build_scenario, ScenarioConfig};
use irsnoma_core::irs_opt::{
    build_fractional_problem, dinkelbach_optimize, sinr_weak, unconstrained_eig_solution,
    FractionalProblem, IrsPhaseVector,
};
use irsnoma_core::joint::{joint_optimize, SolverConfig};
use irsnoma_core::numerics::{vec as cvec, C64, CMat, HermitianMatrix};
use irsnoma_core::power_alloc::{
    interference_matrix, min_power_solve, sinr_balance, strong_user_power, weak_sinrs,
    BalanceProblem, PowerAllocation,
};
use irsnoma_core::zeroforcing::zeroforcing_beams;
use irsnoma_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "[PASS]" } else { "[FAIL]" };
    println!("{tag} criterion {id:02}: {name} — {detail}");
    assert!(pass, "criterion {id:02} ({name}): {detail}");
}

fn random_psd(n: usize, rng: &mut ChaCha8Rng, scale: f64) -> HermitianMatrix {
    let b = CMat::from_fn(n, n, |_, _| {
        C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    });
    HermitianMatrix::new(b.mul(&b.adjoint()).symmetrized().scaled(scale)).unwrap()
}

fn random_problem(n: usize, rng: &mut ChaCha8Rng) -> FractionalProblem {
    let q_scale = rng.gen::<f64>() + 0.1;
    FractionalProblem {
        p: random_psd(n, rng, 1.0),
        q: random_psd(n, rng, q_scale),
        power_ratio: rng.gen::<f64>() * 0.5 + 0.05,
        noise_term: rng.gen::<f64>() + 0.1,
    }
}

#[test]
fn criterion_01_modulus_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for &n in &[1usize, 2, 8, 32] {
        for _ in 0..25 {
            let prob = random_problem(n, &mut rng);
            let start = IrsPhaseVector::random(n, &mut rng);
            let (theta, _) = dinkelbach_optimize(&prob, &start, 1e-6).unwrap();
            worst = worst.max(theta.modulus_error());
        }
    }
    verdict(1, "modulus invariant", worst <= 1e-9, &format!("worst |theta_n| error {worst:.3e} (tol 1e-9, 100 instances, N in {{1,2,8,32}})"));
}

#[test]
fn criterion_02_zeroforcing_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_res = 0.0f64;
    let mut worst_frac = 0.0f64;
    for s in 0..50u64 {
        let cfg = ScenarioConfig {
            nt: rng.gen_range(16..=64),
            n: 8,
            m: rng.gen_range(2..=6),
            l_strong: rng.gen_range(1..=2),
            l_weak: 1,
            rank_g: 4,
            sigma2_n: 1.0,
            c2_1: 1.0,
            c2_2: 1.0,
            gamma_th: 1.0,
            seed: 7000 + s,
        };
        let pairs = build_scenario(&cfg).unwrap();
        let beams = zeroforcing_beams(&pairs).unwrap();
        worst_res = worst_res.max(beams.max_cross_residual(&pairs));
        for (m, pair) in pairs.iter().enumerate() {
            let mut cross = 0.0;
            let mut total = 0.0;
            for (k, w) in beams.beams.iter().enumerate() {
                let pow = cvec::quad_form(pair.r_h.as_mat(), w);
                total += pow;
                if k != m {
                    cross += pow;
                }
            }
            worst_frac = worst_frac.max(cross / total);
        }
    }
    let pass = worst_res <= 1e-8 && worst_frac <= 1e-12;
    verdict(2, "zeroforcing residual", pass, &format!("max cross residual {worst_res:.3e} (tol 1e-8), max interference fraction {worst_frac:.3e} (tol 1e-12), 50 scenarios"));
}

#[test]
fn criterion_03_upper_bound_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..200 {
        let n = [2, 4, 8][i % 3];
        let prob = random_problem(n, &mut rng);
        let start = IrsPhaseVector::random(n, &mut rng);
        let (theta, _) = dinkelbach_optimize(&prob, &start, 1e-6).unwrap();
        let (_, bound) = unconstrained_eig_solution(&prob).unwrap();
        worst = worst.max(sinr_weak(&theta, &prob) - bound);
    }
    verdict(3, "upper-bound dominance", worst <= 1e-9, &format!("max (constrained - unconstrained) {worst:.3e} (tol 1e-9, 200 problems)"));
}

#[test]
fn criterion_04_dinkelbach_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let eps = 1e-6;
    let mut ok = true;
    let mut detail = String::new();
    for _ in 0..40 {
        let n = rng.gen_range(2..=8);
        let prob = random_problem(n, &mut rng);
        let start = IrsPhaseVector::random(n, &mut rng);
        let (theta, trace) = dinkelbach_optimize(&prob, &start, eps).unwrap();
        // eta non-decreasing along the trace
        for w in trace.etas.windows(2) {
            if w[1] < w[0] - 1e-12 * w[0].abs().max(1.0) {
                ok = false;
                detail = format!("eta decreased: {} -> {}", w[0], w[1]);
            }
        }
        // converged: the stopping contract held at the final iterate
        let f = prob.numerator(theta.as_slice());
        let g = prob.denominator(theta.as_slice());
        let f_aux = *trace.f_values.last().unwrap();
        let eta_last = *trace.etas.last().unwrap();
        let d_eta = if trace.etas.len() >= 2 {
            eta_last - trace.etas[trace.etas.len() - 2]
        } else {
            f64::INFINITY
        };
        let stopped = f_aux <= eps * (f + g.max(1.0)) || d_eta <= eps * (1.0 + f / g);
        if !stopped || trace.truncated {
            ok = false;
            detail = format!("run ended without meeting the tolerance: F {f_aux:.3e}");
        }
    }
    // non-convergence leg: a large scenario whose power balance drives the
    // weak-user share far above the strong user's makes the fractional
    // objective's ceiling enormous; the iterates keep taking steps larger
    // than a 1e-6 tolerance allows when the cap is reached, and the solver
    // must error with the full trace, never silently
    let cfg = ScenarioConfig {
        nt: 64,
        n: 128,
        m: 20,
        l_strong: 1,
        l_weak: 1,
        rank_g: 64,
        sigma2_n: 1.0,
        c2_1: 1.0,
        c2_2: 1.0,
        gamma_th: 1.0,
        seed: 9000,
    };
    let pairs = build_scenario(&cfg).unwrap();
    let beams = zeroforcing_beams(&pairs).unwrap();
    let m = pairs.len();
    let p1: Vec<f64> = (0..m)
        .map(|k| strong_user_power(1.0, 1.0, 1.0, beams.signal_gain[k]).unwrap())
        .collect();
    let mut hrng = ChaCha8Rng::seed_from_u64(cfg.seed);
    hrng.set_stream(0);
    let thetas: Vec<IrsPhaseVector> =
        (0..m).map(|_| IrsPhaseVector::random(cfg.n, &mut hrng)).collect();
    let t = interference_matrix(&pairs, &thetas, &beams);
    let noise = vec![1.0; m];
    let p1_sum: f64 = p1.iter().sum();
    let bp = BalanceProblem::new(t, 1.0, &p1, &noise, p1_sum * 999.0).unwrap();
    let (_, p2) = sinr_balance(&bp).unwrap();
    let pw = PowerAllocation { p1, p2 };
    let prob = build_fractional_problem(&pairs[0], &beams, &pw, 0, 1.0).unwrap();
    let mut hard_error = false;
    match dinkelbach_optimize(&prob, &thetas[0], 1e-6) {
        Err(Error::FractionalNonConvergence { etas, f_values }) => {
            hard_error = true;
            if etas.is_empty() || f_values.is_empty() || etas.len() != f_values.len() {
                ok = false;
                detail = "non-convergence error carried an incomplete trace".into();
            }
            for w in etas.windows(2) {
                if w[1] < w[0] - 1e-12 * w[0].abs().max(1.0) {
                    ok = false;
                    detail = format!("eta decreased on the hard instance: {} -> {}", w[0], w[1]);
                }
            }
        }
        Err(e) => {
            ok = false;
            detail = format!("unexpected error kind: {e}");
        }
        Ok(_) => {
            ok = false;
            detail = "non-convergence path was never exercised".into();
        }
    }
    if ok {
        detail = format!("40 convergent traces monotone and within tolerance; hard instance errored with full monotone trace: {hard_error}");
    }
    verdict(4, "Dinkelbach trace", ok, &detail);
}

#[test]
fn criterion_05_oracle_grid() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let n = 4;
    let mut worst_ratio = f64::INFINITY;
    for _ in 0..20 {
        let prob = random_problem(n, &mut rng);
        let start = IrsPhaseVector::random(n, &mut rng);
        let (theta, _) = dinkelbach_optimize(&prob, &start, 1e-6).unwrap();
        let solver_sinr = sinr_weak(&theta, &prob);
        // exhaustive 16-phase grid: 16^4 = 65536 candidates
        let mut grid_best = 0.0f64;
        let step = 2.0 * std::f64::consts::PI / 16.0;
        for a in 0..16 {
            for b in 0..16 {
                for c in 0..16 {
                    for d in 0..16 {
                        let cand = IrsPhaseVector::from_phases(&[
                            a as f64 * step,
                            b as f64 * step,
                            c as f64 * step,
                            d as f64 * step,
                        ]);
                        grid_best = grid_best.max(sinr_weak(&cand, &prob));
                    }
                }
            }
        }
        worst_ratio = worst_ratio.min(solver_sinr / grid_best);
    }
    let elapsed = t0.elapsed();
    let pass = worst_ratio >= 0.95 && elapsed.as_secs() < 60;
    verdict(5, "oracle equivalence, IRS step", pass, &format!("worst solver/grid ratio {worst_ratio:.4} (floor 0.95), 20 problems in {elapsed:.2?} (cap 60s)"));
}

#[test]
fn criterion_06_closed_form_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(2..=8);
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        let p = CMat::from_fn(n, n, |i, j| v[i] * v[j].conj());
        let noise = rng.gen::<f64>() + 0.2;
        let prob = FractionalProblem {
            p: HermitianMatrix::new_unchecked(p),
            q: HermitianMatrix::new_unchecked(CMat::zeros(n, n)),
            power_ratio: 0.0,
            noise_term: noise,
        };
        // phase alignment: |v† theta| maxes at sum |v_i| / sqrt(N)
        let amp_sum: f64 = v.iter().map(|z| z.norm()).sum();
        let closed_form = amp_sum * amp_sum / (n as f64 * noise);
        let start = IrsPhaseVector::random(n, &mut rng);
        let (theta, _) = dinkelbach_optimize(&prob, &start, 1e-9).unwrap();
        let rel = (sinr_weak(&theta, &prob) - closed_form).abs() / closed_form;
        worst = worst.max(rel);
    }
    verdict(6, "oracle equivalence, closed form", worst <= 1e-2, &format!("worst relative error {worst:.3e} (tol 1e-2, 20 instances)"));
}

#[test]
fn criterion_07_power_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let gamma = 1.0;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = rng.gen_range(2..=8);
        // diagonally dominant coupling keeps the spectral radius below one
        let mut t = vec![0.0f64; m * m];
        for i in 0..m {
            for k in 0..m {
                t[i * m + k] = if i == k {
                    1.0 + rng.gen::<f64>()
                } else {
                    rng.gen::<f64>() * 0.05 / m as f64
                };
            }
        }
        let p1: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * 0.9 + 0.1).collect();
        let noise = vec![1.0; m];
        let bp = BalanceProblem::new(t.clone(), gamma, &p1, &noise, 1e6).unwrap();
        let p2 = min_power_solve(&bp).unwrap();
        for g in weak_sinrs(&t, &p1, &p2, &noise) {
            worst = worst.max((g - gamma).abs() / gamma);
        }
    }
    // infeasible: strong off-diagonal coupling pushes the radius past one
    let m = 3;
    let mut t = vec![2.0f64; m * m];
    for i in 0..m {
        t[i * m + i] = 0.1;
    }
    let bp = BalanceProblem::new(t, gamma, &[1.0; 3], &[1.0; 3], 1e6).unwrap();
    let rejected = matches!(min_power_solve(&bp), Err(Error::Infeasible(_)));
    let pass = worst <= 1e-6 && rejected;
    verdict(7, "power fixed point", pass, &format!("worst |gamma_tilde - gamma|/gamma {worst:.3e} (tol 1e-6, 50 instances); infeasible rejected: {rejected}"));
}

#[test]
fn criterion_08_balance_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let gamma = 1.0;
    let mut worst_spread = 0.0f64;
    let mut worst_budget = 0.0f64;
    for _ in 0..20 {
        let m = rng.gen_range(2..=6);
        let mut t = vec![0.0f64; m * m];
        for i in 0..m {
            for k in 0..m {
                t[i * m + k] =
                    if i == k { 1.0 + rng.gen::<f64>() } else { rng.gen::<f64>() * 0.2 };
            }
        }
        let p1: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() + 0.1).collect();
        let noise = vec![1.0; m];
        let ptot2 = 5.0 * m as f64;
        let bp = BalanceProblem::new(t.clone(), gamma, &p1, &noise, ptot2).unwrap();
        let (c, p2) = sinr_balance(&bp).unwrap();
        let ratios: Vec<f64> =
            weak_sinrs(&t, &p1, &p2, &noise).iter().map(|g| g / gamma).collect();
        for r in &ratios {
            worst_spread = worst_spread.max((r - c).abs() / c);
        }
        worst_budget = worst_budget.max((p2.iter().sum::<f64>() - ptot2).abs() / ptot2);
    }

    // M=2 simplex grid oracle at 1e-3 resolution. The grid's own error is
    // (half step) x (objective slope); keeping the optimum near the simplex
    // center and the balance level below one keeps that error inside the
    // 1e-3 tolerance, so the comparison tests the solver, not the grid.
    let t = vec![1.0, 0.12, 0.1, 1.05];
    let p1 = [0.4, 0.6];
    let noise = [1.0, 1.0];
    let ptot2 = 1.6;
    let bp = BalanceProblem::new(t.clone(), gamma, &p1, &noise, ptot2).unwrap();
    let (c, _) = sinr_balance(&bp).unwrap();
    let mut grid_best = 0.0f64;
    for i in 1..1000 {
        let alpha = i as f64 * 1e-3;
        let p2 = [alpha * ptot2, (1.0 - alpha) * ptot2];
        let worst_user = weak_sinrs(&t, &p1, &p2, &noise)
            .iter()
            .map(|g| g / gamma)
            .fold(f64::INFINITY, f64::min);
        grid_best = grid_best.max(worst_user);
    }
    let grid_gap = (c - grid_best).abs();

    // C non-decreasing in the budget
    let mut monotone = true;
    let mut prev = 0.0;
    for &budget in &[1.0, 3.0, 6.0, 12.0, 24.0] {
        let bp = BalanceProblem::new(t.clone(), gamma, &p1, &noise, budget).unwrap();
        let (c, _) = sinr_balance(&bp).unwrap();
        if c < prev - 1e-12 {
            monotone = false;
        }
        prev = c;
    }
    let pass = worst_spread <= 1e-6 && worst_budget <= 1e-6 && grid_gap <= 1e-3 && monotone;
    verdict(8, "balance correctness", pass, &format!("ratio spread {worst_spread:.3e}, budget error {worst_budget:.3e} (tol 1e-6); grid-oracle gap {grid_gap:.3e} (tol 1e-3); C(P) monotone: {monotone}"));
}

#[test]
fn criterion_09_single_pair_closed_form() {
    let cfg = ScenarioConfig {
        nt: 8,
        n: 8,
        m: 1,
        l_strong: 1,
        l_weak: 1,
        rank_g: 4,
        sigma2_n: 1.0,
        c2_1: 1.0,
        c2_2: 1.0,
        gamma_th: 1.0,
        seed: 909,
    };
    let pairs = build_scenario(&cfg).unwrap();
    let sol = joint_optimize(&pairs, &cfg, &SolverConfig::default()).unwrap();
    let t = interference_matrix(&pairs, &sol.thetas, &sol.beams);
    let p1 = strong_user_power(cfg.gamma_th, cfg.sigma2_n, cfg.c2_1, sol.beams.signal_gain[0])
        .unwrap();
    let zeta = cfg.sigma2_n / cfg.c2_2 + p1 * t[0];
    let analytic_total = p1 + cfg.gamma_th * zeta / t[0];
    let rel = (sol.total_power() - analytic_total).abs() / analytic_total;
    verdict(9, "M=1 end-to-end closed form", rel <= 1e-3, &format!("relative gap to analytic composition {rel:.3e} (tol 1e-3)"));
}

#[test]
fn criterion_10_user1_approximation() {
    let cfg = ScenarioConfig {
        nt: 16,
        n: 16,
        m: 2,
        l_strong: 1,
        l_weak: 1,
        rank_g: 8,
        sigma2_n: 1.0,
        c2_1: 1.0,
        c2_2: 1.0,
        gamma_th: 1.0,
        seed: 1010,
    };
    let rows = validate_approximation(&cfg, 100_000, &FixedPowerMode::default()).unwrap();
    let worst =
        rows.iter().map(|r| r.strong_rel_err).fold(0.0f64, f64::max);
    verdict(10, "user-1 approximation exactness", worst <= 0.02, &format!("worst Monte Carlo relative error {worst:.3e} (tol 2e-2, 1e5 samples)"));
}

// --- Figure-scale criteria (stochastic, averaged over 20 seeded scenarios) ---

fn figure_base(m: usize, n: usize) -> ScenarioConfig {
    ScenarioConfig {
        nt: 64,
        n,
        m,
        l_strong: 1,
        l_weak: 1,
        rank_g: 64,
        sigma2_n: 1.0,
        c2_1: 1.0,
        c2_2: 1.0,
        gamma_th: 1.0,
        seed: 9000,
    }
}

#[test]
fn criterion_11_element_sweep_trends() {
    let n_values = [32usize, 64, 128];
    let mode = FixedPowerMode::default();
    let rows20 = sweep_irs_elements(&figure_base(20, 128), &n_values, 20, &mode);
    let rows40 = sweep_irs_elements(&figure_base(40, 128), &n_values, 20, &mode);
    let slack = 0.1; // dB, absorbs Monte Carlo noise on a monotone trend
    let mut monotone = true;
    for w in rows20.windows(2) {
        if w[1].constrained_db() < w[0].constrained_db() - slack {
            monotone = false;
        }
    }
    let mut dominated = true;
    for (r40, r20) in rows40.iter().zip(&rows20) {
        if r40.constrained_db() > r20.constrained_db() + slack {
            dominated = false;
        }
    }
    let gap32 = rows20[0].gap_db();
    let gap128 = rows20[2].gap_db();
    let shrinks = gap128 < gap32;
    let pass = monotone && dominated && shrinks;
    verdict(11, "element-sweep trends", pass, &format!("SINR(N) monotone: {monotone}; M=40 <= M=20: {dominated}; constant-modulus gap {gap32:.2} dB at N=32 -> {gap128:.2} dB at N=128 (must shrink)"));
}

#[test]
fn criterion_12_rank_sweep_trends() {
    let ranks = [4usize, 8, 20, 64];
    let mode = FixedPowerMode::default();
    let rows = sweep_rank(&figure_base(10, 128), &ranks, 20, &mode);
    let slack = 0.1; // dB
    let mut monotone = true;
    for w in rows.windows(2) {
        if w[1].constrained_db() < w[0].constrained_db() - slack {
            monotone = false;
        }
    }
    let rank20_db = rows[2].constrained_db();
    let full_db = rows[3].constrained_db();
    let deficit = full_db - rank20_db;
    let pass = monotone && deficit <= 1.0;
    verdict(12, "rank-sweep trends", pass, &format!("SINR(rank) monotone: {monotone}; rank-20 sits {deficit:.2} dB below full rank (cap 1 dB)"));
}

/// Reference per-user covariance scale for the required-SNR preset. The
/// absolute dB level of the required total SNR depends on this free physical
/// scale; it is pinned here so the sweep is reproducible, while the M and N
/// deltas below are scale-invariant.
const FIG_PRESET_C2: f64 = 0.453;

#[test]
fn criterion_13_required_snr_numbers() {
    let solver = SolverConfig::default();
    let preset = |m: usize, n: usize| ScenarioConfig {
        c2_1: FIG_PRESET_C2,
        c2_2: FIG_PRESET_C2,
        ..figure_base(m, n)
    };
    // min-rate 1 bps/Hz for the weak user means gamma_th = 1
    let r10 = &sweep_total_snr(&preset(10, 128), &[1.0], 20, &solver)[0];
    let r20 = &sweep_total_snr(&preset(20, 128), &[1.0], 20, &solver)[0];
    let r20n64 = &sweep_total_snr(&preset(20, 64), &[1.0], 20, &solver)[0];

    let dir = std::env::var("CARGO_TARGET_TMPDIR")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|_| std::env::temp_dir());
    let raw_path = dir.join("required_snr_raw.csv");
    let tagged: Vec<_> = [(10usize, 128usize, r10), (20, 128, r20), (20, 64, r20n64)]
        .iter()
        .map(|(m, n, r)| {
            let mut row = (*r).clone();
            // reuse the gamma column to key the (M, N) combination in the audit file
            row.gamma_th = (*m * 1000 + *n) as f64;
            row
        })
        .collect();
    irsnoma::report::write_snr_raw_csv(&raw_path, &tagged).unwrap();
    println!("        raw per-trial distributions: {} (gamma_th column encodes 1000*M + N)", raw_path.display());

    let v10 = r10.total_snr_db_mean;
    let v20 = r20.total_snr_db_mean;
    let penalty = r20n64.total_snr_db_mean - v20;
    let ok10 = (v10 - 13.0).abs() <= 2.0;
    let ok20 = (v20 - 20.0).abs() <= 2.0;
    let okp = (penalty - 3.0).abs() <= 1.0;
    let pass = ok10 && ok20 && okp;
    verdict(13, "required-SNR numbers", pass, &format!("M=10,N=128: {v10:.2} dB (target 13 +/- 2, feasible {}/20); M=20,N=128: {v20:.2} dB (target 20 +/- 2, feasible {}/20); N 128->64 penalty at M=20: {penalty:.2} dB (target 3 +/- 1, feasible {}/20)", r10.feasible, r20.feasible, r20n64.feasible));
}
