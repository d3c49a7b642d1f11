//! CSV emission with a stable schema.
//!
//! Floats are written with Rust's shortest-roundtrip formatting, so a given
//! result set always produces byte-identical files. Every quantity that has
//! a dB column also has its linear column; the dB value is computed at write
//! time as `10 log10(linear)`.

use std::path::Path;

use crate::experiments::{db, FixedPowerRow, SnrRow, ValidationRow};

fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn f(x: f64) -> String {
    format!("{x}")
}

pub const FIXED_POWER_HEADER: &[&str] = &[
    "sweep_value",
    "constrained_sinr_linear",
    "constrained_sinr_db",
    "constrained_sinr_stderr",
    "unconstrained_sinr_linear",
    "unconstrained_sinr_db",
    "unconstrained_sinr_stderr",
    "gap_db",
    "failures",
];

pub fn write_fixed_power_csv(path: &Path, rows: &[FixedPowerRow]) -> anyhow::Result<()> {
    let data: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                f(r.sweep),
                f(r.constrained_mean),
                f(r.constrained_db()),
                f(r.constrained_stderr),
                f(r.unconstrained_mean),
                f(r.unconstrained_db()),
                f(r.unconstrained_stderr),
                f(r.gap_db()),
                r.failures.to_string(),
            ]
        })
        .collect();
    write_rows(path, FIXED_POWER_HEADER, &data)
}

pub const SNR_HEADER: &[&str] = &[
    "gamma_th",
    "min_rate_bps_hz",
    "total_snr_linear",
    "total_snr_db",
    "total_snr_stderr_linear",
    "total_snr_db_trial_mean",
    "feasible_trials",
    "infeasible_trials",
];

pub fn write_snr_csv(path: &Path, rows: &[SnrRow]) -> anyhow::Result<()> {
    let data: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                f(r.gamma_th),
                f(r.min_rate),
                f(r.total_snr_mean),
                f(db(r.total_snr_mean)),
                f(r.total_snr_stderr),
                f(r.total_snr_db_mean),
                r.feasible.to_string(),
                r.infeasible.to_string(),
            ]
        })
        .collect();
    write_rows(path, SNR_HEADER, &data)
}

/// Raw per-trial distribution behind an SNR sweep, for audit.
pub fn write_snr_raw_csv(path: &Path, rows: &[SnrRow]) -> anyhow::Result<()> {
    let header = ["gamma_th", "trial", "total_snr_db"];
    let mut data = Vec::new();
    for r in rows {
        for (t, v) in r.raw_db.iter().enumerate() {
            data.push(vec![f(r.gamma_th), t.to_string(), f(*v)]);
        }
    }
    write_rows(path, &header, &data)
}

pub const VALIDATION_HEADER: &[&str] = &[
    "pair",
    "analytic_strong_sinr",
    "empirical_strong_sinr",
    "strong_rel_err",
    "analytic_weak_sinr",
    "empirical_weak_sinr",
    "weak_rel_gap",
];

pub fn write_validation_csv(path: &Path, rows: &[ValidationRow]) -> anyhow::Result<()> {
    let data: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.pair.to_string(),
                f(r.analytic_strong),
                f(r.empirical_strong),
                f(r.strong_rel_err),
                f(r.analytic_weak),
                f(r.empirical_weak),
                f(r.weak_rel_gap),
            ]
        })
        .collect();
    write_rows(path, VALIDATION_HEADER, &data)
}

/// Summary of one joint run.
pub fn write_solution_csv(
    path: &Path,
    sol: &irsnoma_core::joint::JointSolution,
) -> anyhow::Result<()> {
    let header = [
        "pair",
        "p1",
        "p2",
        "strong_sinr_linear",
        "strong_sinr_db",
        "weak_sinr_linear",
        "weak_sinr_db",
    ];
    let data: Vec<Vec<String>> = (0..sol.powers.p1.len())
        .map(|m| {
            vec![
                m.to_string(),
                f(sol.powers.p1[m]),
                f(sol.powers.p2[m]),
                f(sol.strong_sinrs[m]),
                f(db(sol.strong_sinrs[m])),
                f(sol.weak_sinrs[m]),
                f(db(sol.weak_sinrs[m])),
            ]
        })
        .collect();
    write_rows(path, &header, &data)
}
