use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ambc::SystemParams;
use crate::channel::{FasConfig, LinkGeometry};
use crate::error::{Error, Result};
use crate::optimizer::PsoParams;

/// Everything one Monte Carlo run needs. Mirrors the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemParams,
    pub fas: FasConfig,
    pub geometry: LinkGeometry,
    /// Rician factor shared by both hops.
    pub kappa: f64,
    /// Variance of the relative gain observation error.
    pub sigma_delta2: f64,
    pub pso: PsoParams,
    pub n_realizations: usize,
    pub master_seed: u64,
    /// When set, the tag → reader path loss is replaced so the average SNR
    /// hits this value (see [`super::calibrate_snr`]).
    pub target_avg_snr_db: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: SystemParams::default(),
            fas: FasConfig::default(),
            geometry: LinkGeometry::default(),
            kappa: 5.0,
            sigma_delta2: 0.05,
            pso: PsoParams::default(),
            n_realizations: 100_000,
            master_seed: 0,
            target_avg_snr_db: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.fas.validate()?;
        self.geometry.validate()?;
        self.pso.validate()?;
        if !(self.kappa >= 0.0) {
            return Err(Error::config(format!("kappa must be non-negative, got {}", self.kappa)));
        }
        if !(self.sigma_delta2 >= 0.0 && self.sigma_delta2.is_finite()) {
            return Err(Error::config(format!(
                "sigma_delta2 must be non-negative, got {}",
                self.sigma_delta2
            )));
        }
        if self.n_realizations == 0 {
            return Err(Error::config("n_realizations must be at least 1"));
        }
        if let Some(db) = self.target_avg_snr_db {
            if db.is_nan() || db == f64::INFINITY {
                return Err(Error::config(format!("target_avg_snr_db must be finite, got {db}")));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let cfg = Self::from_json_str(&text)
            .map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A reader architecture to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Fluid antenna with `port_count` pixels, noisy-observation selection.
    Fas { port_count: usize },
    /// Fixed single antenna with perfect CSI.
    Tas,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Fas { port_count } => write!(f, "fas:K={port_count}"),
            Scheme::Tas => f.write_str("tas"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("tas") {
            return Ok(Scheme::Tas);
        }
        let k = s
            .strip_prefix("fas:K=")
            .or_else(|| s.strip_prefix("fas:k="))
            .ok_or_else(|| Error::config(format!("unknown scheme '{s}' (expected tas or fas:K=<n>)")))?;
        let port_count: usize =
            k.parse().map_err(|_| Error::config(format!("bad port count in scheme '{s}'")))?;
        if port_count == 0 {
            return Err(Error::config("scheme port count must be at least 1"));
        }
        Ok(Scheme::Fas { port_count })
    }
}

pub fn parse_schemes(list: &str) -> Result<Vec<Scheme>> {
    let schemes = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Scheme>>>()?;
    if schemes.is_empty() {
        return Err(Error::config("no schemes given"));
    }
    Ok(schemes)
}

pub fn default_schemes() -> Vec<Scheme> {
    vec![
        Scheme::Fas { port_count: 5 },
        Scheme::Fas { port_count: 10 },
        Scheme::Fas { port_count: 20 },
        Scheme::Tas,
    ]
}
