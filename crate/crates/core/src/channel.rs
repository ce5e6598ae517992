//! Correlated Rician channel synthesis for the source → tag → reader link.
//!
//! Path loss enters as an amplitude factor `sqrt(L(d))` on each channel so
//! that the gain relations `g = |h|^2` and `g_c = g_s * g_b` stay exact.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    bessel_j0, cholesky_lower, sample_standard_complex_gaussian, CorrelationMatrix,
    LowerTriangular, RngStream,
};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Default carrier frequency, Hz.
pub const DEFAULT_CARRIER_HZ: f64 = 3.5e9;

const LANE_CHANNEL: u64 = 1;
const LANE_OBSERVATION: u64 = 2;

/// Deterministic line-of-sight steering vector across the ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LosPhaseModel {
    /// Every port sees `1 + 0i`.
    #[default]
    AllOnes,
    /// Port `k` (0-based) sees `exp(i 2π (d/λ) k cos θ)`.
    LinearPhase { angle_rad: f64 },
}

/// Pixel grid of the reader's fluid antenna.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FasConfig {
    pub port_count: usize,
    pub spacing_m: f64,
    pub wavelength_m: f64,
    #[serde(default)]
    pub los_phase_model: LosPhaseModel,
}

impl Default for FasConfig {
    fn default() -> Self {
        let wavelength = SPEED_OF_LIGHT / DEFAULT_CARRIER_HZ;
        Self {
            port_count: 10,
            spacing_m: wavelength / 8.0,
            wavelength_m: wavelength,
            los_phase_model: LosPhaseModel::AllOnes,
        }
    }
}

impl FasConfig {
    pub fn new(port_count: usize, spacing_over_lambda: f64, wavelength_m: f64) -> Result<Self> {
        let cfg = Self {
            port_count,
            spacing_m: spacing_over_lambda * wavelength_m,
            wavelength_m,
            los_phase_model: LosPhaseModel::AllOnes,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.port_count == 0 {
            return Err(Error::config("port_count must be at least 1"));
        }
        if !(self.spacing_m > 0.0 && self.spacing_m.is_finite()) {
            return Err(Error::config(format!("spacing_m must be positive, got {}", self.spacing_m)));
        }
        if !(self.wavelength_m > 0.0 && self.wavelength_m.is_finite()) {
            return Err(Error::config(format!(
                "wavelength_m must be positive, got {}",
                self.wavelength_m
            )));
        }
        if let LosPhaseModel::LinearPhase { angle_rad } = self.los_phase_model {
            if !angle_rad.is_finite() {
                return Err(Error::config("LOS angle must be finite"));
            }
        }
        Ok(())
    }

    /// Normalised aperture `W = (K - 1) d / λ`.
    pub fn aperture(&self) -> f64 {
        (self.port_count as f64 - 1.0) * self.spacing_m / self.wavelength_m
    }

    pub fn spacing_over_lambda(&self) -> f64 {
        self.spacing_m / self.wavelength_m
    }

    /// Unit-modulus LOS vector of length `K`.
    pub fn los_vector(&self) -> Vec<Complex64> {
        match self.los_phase_model {
            LosPhaseModel::AllOnes => vec![Complex64::new(1.0, 0.0); self.port_count],
            LosPhaseModel::LinearPhase { angle_rad } => {
                let step = 2.0 * PI * self.spacing_over_lambda() * angle_rad.cos();
                (0..self.port_count)
                    .map(|k| Complex64::from_polar(1.0, step * k as f64))
                    .collect()
            }
        }
    }
}

/// Distances and path-loss exponent of the two hops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkGeometry {
    pub dist_source_bd_m: f64,
    pub dist_bd_reader_m: f64,
    pub pathloss_exponent: f64,
}

impl Default for LinkGeometry {
    fn default() -> Self {
        Self { dist_source_bd_m: 10.0, dist_bd_reader_m: 10.0, pathloss_exponent: 2.9 }
    }
}

impl LinkGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, d) in [
            ("dist_source_bd_m", self.dist_source_bd_m),
            ("dist_bd_reader_m", self.dist_bd_reader_m),
        ] {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {d}")));
            }
        }
        if !(self.pathloss_exponent > 0.0 && self.pathloss_exponent.is_finite()) {
            return Err(Error::config(format!(
                "pathloss_exponent must be positive, got {}",
                self.pathloss_exponent
            )));
        }
        Ok(())
    }

    pub fn forward_gain(&self) -> Result<f64> {
        path_loss_gain(self.dist_source_bd_m, self.pathloss_exponent)
    }

    pub fn backscatter_gain(&self) -> Result<f64> {
        path_loss_gain(self.dist_bd_reader_m, self.pathloss_exponent)
    }
}

/// One draw of every channel quantity the reader and tag interact with.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_s: Complex64,
    pub h_b: Vec<Complex64>,
    pub g_s: f64,
    pub g_b: Vec<f64>,
    /// True cascaded gains.
    pub g_c: Vec<f64>,
    /// Noisy observations of `g_c` used for decisions.
    pub g_obs: Vec<f64>,
}

impl ChannelRealization {
    pub fn port_count(&self) -> usize {
        self.g_c.len()
    }
}

/// Jakes spatial correlation `ρ[k][l] = J0(2π |k - l| W / (K - 1))`.
pub fn jakes_correlation(config: &FasConfig) -> Result<CorrelationMatrix> {
    config.validate()?;
    let k = config.port_count;
    if k == 1 {
        return Ok(CorrelationMatrix::identity(1));
    }
    let per_port = config.aperture() / (k as f64 - 1.0);
    CorrelationMatrix::toeplitz(k, |lag| bessel_j0(2.0 * PI * lag as f64 * per_port))
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa >= 0.0 && !kappa.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(format!("Rician factor must be non-negative, got {kappa}")))
    }
}

fn rician_weights(kappa: f64) -> (f64, f64) {
    if kappa.is_infinite() {
        (1.0, 0.0)
    } else {
        ((kappa / (kappa + 1.0)).sqrt(), (1.0 / (kappa + 1.0)).sqrt())
    }
}

/// `h_b = s * (sqrt(κ/(κ+1)) h_LOS + sqrt(1/(κ+1)) L w)` with `w ~ CN(0, I)`.
pub fn sample_backscatter_channels(
    rng: &mut RngStream,
    config: &FasConfig,
    kappa: f64,
    factor: &LowerTriangular,
    amplitude_scale: f64,
) -> Result<Vec<Complex64>> {
    check_kappa(kappa)?;
    if factor.dim() != config.port_count {
        return Err(Error::Shape { expected: config.port_count, actual: factor.dim() });
    }
    let (los_w, nlos_w) = rician_weights(kappa);
    let w = sample_standard_complex_gaussian(rng, config.port_count)?;
    let scattered = factor.mul_complex(&w)?;
    Ok(config
        .los_vector()
        .into_iter()
        .zip(scattered)
        .map(|(los, s)| (los * los_w + s * nlos_w) * amplitude_scale)
        .collect())
}

/// Scalar Rician draw with LOS phase 0.
pub fn sample_forward_channel(rng: &mut RngStream, kappa: f64, amplitude_scale: f64) -> Result<Complex64> {
    check_kappa(kappa)?;
    let (los_w, nlos_w) = rician_weights(kappa);
    let w = sample_standard_complex_gaussian(rng, 1)?[0];
    Ok((Complex64::new(los_w, 0.0) + w * nlos_w) * amplitude_scale)
}

/// `L(d) = d^(-χ)`.
pub fn path_loss_gain(distance: f64, chi: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::domain(format!("distance must be positive, got {distance}")));
    }
    Ok(distance.powf(-chi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadedGains {
    pub g_s: f64,
    pub g_b: Vec<f64>,
    pub g_c: Vec<f64>,
}

pub fn cascaded_gains(h_s: Complex64, h_b: &[Complex64]) -> CascadedGains {
    let g_s = h_s.norm_sqr();
    let g_b: Vec<f64> = h_b.iter().map(|h| h.norm_sqr()).collect();
    let g_c = g_b.iter().map(|&g| g_s * g).collect();
    CascadedGains { g_s, g_b, g_c }
}

/// `g_obs[k] = max(0, g_c[k] (1 + δ_k))`, `δ_k ~ N(0, σ_δ²)`.
///
/// One normal is consumed per port even when `σ_δ² = 0`, so the stream
/// position does not depend on the noise level.
pub fn observe_gains(rng: &mut RngStream, g_c: &[f64], sigma_delta2: f64) -> Result<Vec<f64>> {
    if !(sigma_delta2 >= 0.0 && sigma_delta2.is_finite()) {
        return Err(Error::domain(format!(
            "observation variance must be non-negative, got {sigma_delta2}"
        )));
    }
    let sd = sigma_delta2.sqrt();
    Ok(g_c
        .iter()
        .map(|&g| {
            let delta = sd * rng.standard_normal();
            (g * (1.0 + delta)).max(0.0)
        })
        .collect())
}

/// Everything needed to draw realizations for one port configuration.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    pub fas: FasConfig,
    pub kappa: f64,
    pub forward_scale: f64,
    pub backscatter_scale: f64,
    factor: LowerTriangular,
}

impl ChannelModel {
    /// `forward_gain` and `backscatter_gain` are mean power gains (path loss).
    pub fn new(fas: FasConfig, kappa: f64, forward_gain: f64, backscatter_gain: f64) -> Result<Self> {
        check_kappa(kappa)?;
        if !(forward_gain >= 0.0 && backscatter_gain >= 0.0) {
            return Err(Error::domain("path-loss gains must be non-negative"));
        }
        let factor = cholesky_lower(&jakes_correlation(&fas)?)?;
        Ok(Self {
            fas,
            kappa,
            forward_scale: forward_gain.sqrt(),
            backscatter_scale: backscatter_gain.sqrt(),
            factor,
        })
    }

    pub fn factor(&self) -> &LowerTriangular {
        &self.factor
    }

    /// Draws channels and observations from dedicated lanes of `stream`.
    pub fn realize(&self, stream: &RngStream, sigma_delta2: f64) -> Result<ChannelRealization> {
        let mut chan = stream.lane(LANE_CHANNEL);
        let h_s = sample_forward_channel(&mut chan, self.kappa, self.forward_scale)?;
        let h_b = sample_backscatter_channels(
            &mut chan,
            &self.fas,
            self.kappa,
            &self.factor,
            self.backscatter_scale,
        )?;
        let CascadedGains { g_s, g_b, g_c } = cascaded_gains(h_s, &h_b);
        let g_obs = observe_gains(&mut stream.lane(LANE_OBSERVATION), &g_c, sigma_delta2)?;
        Ok(ChannelRealization { h_s, h_b, g_s, g_b, g_c, g_obs })
    }
}
