//! Scenario (de)serialization: config plus all generated matrices as JSON.
//!
//! Matrices are stored row-major as (re, im) pairs. JSON floats are written
//! with shortest-roundtrip formatting, so a save/load cycle reproduces every
//! f64 bit-exactly.

use irsnoma_core::channel::{build_scenario, ScenarioConfig, UserPairChannels};
use irsnoma_core::numerics::{C64, CMat, HermitianMatrix};
use serde::{Deserialize, Serialize};

/// Mirror of [`ScenarioConfig`] with serde support.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigDto {
    pub nt: usize,
    pub n: usize,
    pub m: usize,
    pub l_strong: usize,
    pub l_weak: usize,
    pub rank_g: usize,
    pub sigma2_n: f64,
    pub c2_1: f64,
    pub c2_2: f64,
    pub gamma_th: f64,
    pub seed: u64,
}

impl From<&ScenarioConfig> for ConfigDto {
    fn from(c: &ScenarioConfig) -> Self {
        ConfigDto {
            nt: c.nt,
            n: c.n,
            m: c.m,
            l_strong: c.l_strong,
            l_weak: c.l_weak,
            rank_g: c.rank_g,
            sigma2_n: c.sigma2_n,
            c2_1: c.c2_1,
            c2_2: c.c2_2,
            gamma_th: c.gamma_th,
            seed: c.seed,
        }
    }
}

impl ConfigDto {
    pub fn to_core(&self) -> ScenarioConfig {
        ScenarioConfig {
            nt: self.nt,
            n: self.n,
            m: self.m,
            l_strong: self.l_strong,
            l_weak: self.l_weak,
            rank_g: self.rank_g,
            sigma2_n: self.sigma2_n,
            c2_1: self.c2_1,
            c2_2: self.c2_2,
            gamma_th: self.gamma_th,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixDto {
    pub rows: usize,
    pub cols: usize,
    /// Row-major (re, im) pairs.
    pub entries: Vec<(f64, f64)>,
}

impl MatrixDto {
    pub fn from_mat(m: &CMat) -> Self {
        let mut entries = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m[(i, j)];
                entries.push((z.re, z.im));
            }
        }
        MatrixDto { rows: m.rows(), cols: m.cols(), entries }
    }

    pub fn to_mat(&self) -> anyhow::Result<CMat> {
        anyhow::ensure!(
            self.entries.len() == self.rows * self.cols,
            "matrix entry count {} does not match {}x{}",
            self.entries.len(),
            self.rows,
            self.cols
        );
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let (re, im) = self.entries[i * self.cols + j];
            C64::new(re, im)
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PairDto {
    pub r_h: MatrixDto,
    pub r_g: MatrixDto,
    pub g: MatrixDto,
    pub c2_1: f64,
    pub c2_2: f64,
    pub aod_strong: Vec<f64>,
    pub aod_bs_irs: Vec<(f64, f64)>,
}

/// On-disk scenario: config and every generated channel matrix.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScenarioFile {
    pub config: ConfigDto,
    pub pairs: Vec<PairDto>,
}

impl ScenarioFile {
    /// Generates the channels for `cfg` and packages them.
    pub fn generate(cfg: &ScenarioConfig) -> anyhow::Result<Self> {
        let pairs = build_scenario(cfg)?;
        Ok(ScenarioFile {
            config: ConfigDto::from(cfg),
            pairs: pairs
                .iter()
                .map(|p| PairDto {
                    r_h: MatrixDto::from_mat(p.r_h.as_mat()),
                    r_g: MatrixDto::from_mat(p.r_g.as_mat()),
                    g: MatrixDto::from_mat(&p.g),
                    c2_1: p.c2_1,
                    c2_2: p.c2_2,
                    aod_strong: p.aod_strong.clone(),
                    aod_bs_irs: p.aod_bs_irs.clone(),
                })
                .collect(),
        })
    }

    pub fn to_core(&self) -> anyhow::Result<(ScenarioConfig, Vec<UserPairChannels>)> {
        let cfg = self.config.to_core();
        let pairs = self
            .pairs
            .iter()
            .map(|p| {
                Ok(UserPairChannels {
                    r_h: HermitianMatrix::new(p.r_h.to_mat()?)?,
                    r_g: HermitianMatrix::new(p.r_g.to_mat()?)?,
                    g: p.g.to_mat()?,
                    c2_1: p.c2_1,
                    c2_2: p.c2_2,
                    aod_strong: p.aod_strong.clone(),
                    aod_bs_irs: p.aod_bs_irs.clone(),
                })
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok((cfg, pairs))
    }

    pub fn save(&self, path: &std::path::Path) -> anyhow::Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("malformed scenario {}: {e}", path.display()))
    }
}

/// Reads a bare config JSON file.
pub fn load_config(path: &std::path::Path) -> anyhow::Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let dto: ConfigDto = serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("malformed config {}: {e}", path.display()))?;
    let cfg = dto.to_core();
    cfg.validate()?;
    Ok(cfg)
}
