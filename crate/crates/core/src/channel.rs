//! Statistical channel synthesis.
//!
//! Strong (direct-link) users get sparse-path covariances built from uniform
//! linear array steering vectors; weak (IRS-assisted) users get the same
//! construction at the IRS element count, plus a rank-controlled BS-IRS phase
//! matrix. Instantaneous channels for Monte Carlo validation are drawn by
//! coloring standard complex Gaussians with the covariance eigenfactors.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::numerics::{hermitian_eig, C64, CMat, HermitianMatrix};
use crate::{Error, Result};

const PI: f64 = core::f64::consts::PI;

/// All dimensions, thresholds, path losses, noise, and generation knobs for
/// one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// BS transmit antenna count `N_t`.
    pub nt: usize,
    /// IRS element count `N`.
    pub n: usize,
    /// User pair count `M`.
    pub m: usize,
    /// Signal paths per strong user.
    pub l_strong: usize,
    /// Signal paths for the weak-user IRS-UE covariance (defaults mirror the
    /// strong user; the paper leaves this free).
    pub l_weak: usize,
    /// Target rank of each BS-IRS matrix, in `[1, min(nt, n)]`.
    pub rank_g: usize,
    /// Receiver noise variance (watts).
    pub sigma2_n: f64,
    /// Strong-user path-loss power gain `c^2_{m,1}`.
    pub c2_1: f64,
    /// Weak-user path-loss power gain `c^2_{m,2}`.
    pub c2_2: f64,
    /// SINR threshold (linear).
    pub gamma_th: f64,
    /// RNG seed; identical (config, seed) reproduce scenarios bit-exactly.
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nt == 0 || self.n == 0 || self.m == 0 || self.l_strong == 0 || self.l_weak == 0 {
            return Err(Error::InvalidConfig("all dimensions must be at least 1".into()));
        }
        if self.rank_g < 1 || self.rank_g > self.nt.min(self.n) {
            return Err(Error::InvalidConfig(format!(
                "rank_g {} outside [1, min(nt, n) = {}]",
                self.rank_g,
                self.nt.min(self.n)
            )));
        }
        if self.l_weak > self.n {
            return Err(Error::InvalidConfig("l_weak exceeds IRS element count".into()));
        }
        if !(self.sigma2_n > 0.0 && self.c2_1 > 0.0 && self.c2_2 > 0.0 && self.gamma_th > 0.0) {
            return Err(Error::InvalidConfig("powers, variances, and threshold must be positive".into()));
        }
        if self.m * self.l_strong >= self.nt {
            return Err(Error::Infeasible(format!(
                "total signal paths {} must stay below nt = {} for zeroforcing",
                self.m * self.l_strong,
                self.nt
            )));
        }
        Ok(())
    }
}

/// Per-pair statistical channel state.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPairChannels {
    /// Strong-user covariance, `nt x nt`, rank `l_strong`.
    pub r_h: HermitianMatrix,
    /// IRS-to-weak-user covariance, `n x n`, rank `l_weak`.
    pub r_g: HermitianMatrix,
    /// BS-IRS phase matrix, `nt x n`, unit-modulus entries, rank `rank_g`.
    pub g: CMat,
    pub c2_1: f64,
    pub c2_2: f64,
    /// Strong-user path angles of departure (radians).
    pub aod_strong: Vec<f64>,
    /// Per-IRS-element (elevation, azimuth) BS departure angles.
    pub aod_bs_irs: Vec<(f64, f64)>,
}

/// Unit-norm transmit steering vector of a half-wavelength uniform linear
/// array: entry `k` is `exp(-j 2 pi k cos(theta)) / sqrt(nt)`.
pub fn steering_vector(theta: f64, nt: usize) -> Vec<C64> {
    let scale = 1.0 / (nt as f64).sqrt();
    (0..nt)
        .map(|k| {
            let phase = -2.0 * PI * (k as f64) * theta.cos();
            Complex64::new(scale * phase.cos(), scale * phase.sin())
        })
        .collect()
}

/// Sparse-path covariance `(dim / L) A A†` with steering-vector columns.
///
/// Trace equals `dim` exactly up to roundoff; rank equals the number of
/// distinct angles (duplicate angles silently lower the rank).
pub fn make_covariance(aods: &[f64], dim: usize) -> HermitianMatrix {
    let l = aods.len();
    assert!(l >= 1 && l <= dim, "path count must lie in [1, dim]");
    let a = CMat::from_columns(dim, &aods.iter().map(|&t| steering_vector(t, dim)).collect::<Vec<_>>());
    let cov = a.mul(&a.adjoint()).scaled(dim as f64 / l as f64);
    HermitianMatrix::new_unchecked(cov)
}

/// Rank-controlled BS-IRS matrix: contiguous blocks of IRS elements share one
/// (elevation, azimuth) pair, giving exactly `rank_g` independent directions.
///
/// Entry `(t, e)` is `exp(j pi t sin(xi) sin(nu)) exp(-j pi e sin(xi) sin(nu))`
/// with 0-based antenna index `t` and element index `e`; every entry has unit
/// modulus by construction.
pub fn make_bs_irs_channel(
    nt: usize,
    n: usize,
    rank_g: usize,
    rng: &mut impl Rng,
) -> (CMat, Vec<(f64, f64)>) {
    assert!((1..=nt.min(n)).contains(&rank_g), "rank_g outside [1, min(nt, n)]");
    // draw distinct direction factors s = sin(xi) sin(nu); equal s (or the
    // s = -1 / s = +1 wrap) would collapse two blocks into one direction
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(rank_g);
    let mut factors: Vec<f64> = Vec::with_capacity(rank_g);
    while pairs.len() < rank_g {
        let xi = rng.gen::<f64>() * PI;
        let nu = rng.gen::<f64>() * 2.0 * PI;
        let s = xi.sin() * nu.sin();
        let clash = factors.iter().any(|&f| {
            let d = (f - s).abs();
            d < 1e-6 || (2.0 - d).abs() < 1e-6
        });
        if !clash {
            pairs.push((xi, nu));
            factors.push(s);
        }
    }
    let block = n.div_ceil(rank_g);
    let per_element: Vec<(f64, f64)> = (0..n).map(|e| pairs[e / block]).collect();
    let g = CMat::from_fn(nt, n, |t, e| {
        let s = factors[e / block];
        let phase = PI * (t as f64) * s - PI * (e as f64) * s;
        Complex64::new(phase.cos(), phase.sin())
    });
    (g, per_element)
}

fn draw_distinct_aods(count: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut aods: Vec<f64> = Vec::with_capacity(count);
    while aods.len() < count {
        let t = rng.gen::<f64>() * PI;
        // coincident paths would silently drop the covariance rank
        if aods.iter().all(|&x| (x - t).abs() > 1e-6) {
            aods.push(t);
        }
    }
    aods
}

/// Generates all `M` user pairs deterministically from `(cfg, cfg.seed)`.
/// Each pair uses its own RNG stream so parallel consumers stay reproducible.
pub fn build_scenario(cfg: &ScenarioConfig) -> Result<Vec<UserPairChannels>> {
    cfg.validate()?;
    let mut pairs = Vec::with_capacity(cfg.m);
    for m in 0..cfg.m {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(m as u64 + 1);
        let aod_strong = draw_distinct_aods(cfg.l_strong, &mut rng);
        let r_h = make_covariance(&aod_strong, cfg.nt);
        let aod_weak = draw_distinct_aods(cfg.l_weak, &mut rng);
        let r_g = make_covariance(&aod_weak, cfg.n);
        let (g, aod_bs_irs) = make_bs_irs_channel(cfg.nt, cfg.n, cfg.rank_g, &mut rng);
        pairs.push(UserPairChannels {
            r_h,
            r_g,
            g,
            c2_1: cfg.c2_1,
            c2_2: cfg.c2_2,
            aod_strong,
            aod_bs_irs,
        });
    }
    Ok(pairs)
}

/// Precomputed coloring factors for drawing instantaneous channels with the
/// pair's covariances.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    factor_h: CMat,
    factor_g: CMat,
}

fn coloring_factor(r: &HermitianMatrix) -> CMat {
    let e = hermitian_eig(r);
    let lmax = e.values.first().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> =
        (0..r.order()).filter(|&i| e.values[i] > 1e-12 * lmax && e.values[i] > 0.0).collect();
    CMat::from_fn(r.order(), keep.len(), |i, j| {
        e.vectors[(i, keep[j])] * e.values[keep[j]].sqrt()
    })
}

impl ChannelSampler {
    pub fn new(pair: &UserPairChannels) -> Self {
        ChannelSampler { factor_h: coloring_factor(&pair.r_h), factor_g: coloring_factor(&pair.r_g) }
    }

    /// One draw of `(h, g)`: zero-mean circularly-symmetric complex Gaussians
    /// with covariances `R_h` and `R_g`.
    pub fn sample(&self, rng: &mut impl Rng) -> (Vec<C64>, Vec<C64>) {
        (color(&self.factor_h, rng), color(&self.factor_g, rng))
    }
}

fn color(factor: &CMat, rng: &mut impl Rng) -> Vec<C64> {
    let xi: Vec<C64> = (0..factor.cols()).map(|_| standard_complex_normal(rng)).collect();
    factor.matvec(&xi)
}

/// Unit-variance circularly-symmetric complex Gaussian via Box-Muller.
fn standard_complex_normal(rng: &mut impl Rng) -> C64 {
    let mut u1: f64 = rng.gen();
    while u1 <= f64::MIN_POSITIVE {
        u1 = rng.gen();
    }
    let u2: f64 = rng.gen();
    let r = (-u1.ln()).sqrt();
    let ang = 2.0 * PI * u2;
    Complex64::new(r * ang.cos(), r * ang.sin())
}

/// Convenience wrapper building a fresh [`ChannelSampler`] per call; prefer
/// the sampler for repeated draws.
pub fn sample_instantaneous(pair: &UserPairChannels, rng: &mut impl Rng) -> (Vec<C64>, Vec<C64>) {
    ChannelSampler::new(pair).sample(rng)
}
