use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::config::{ExperimentConfig, Scheme};
use super::ota::{run_scheme, OtaResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    AvgSnrDb,
    EhMargin,
    SigmaDelta2,
    SpacingOverLambda,
    PortCount,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::AvgSnrDb,
        SweepAxis::EhMargin,
        SweepAxis::SigmaDelta2,
        SweepAxis::SpacingOverLambda,
        SweepAxis::PortCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::AvgSnrDb => "avg_snr_db",
            SweepAxis::EhMargin => "eh_margin",
            SweepAxis::SigmaDelta2 => "sigma_delta2",
            SweepAxis::SpacingOverLambda => "spacing_over_lambda",
            SweepAxis::PortCount => "port_count",
        }
    }

    /// Grid used when no values are given.
    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepAxis::AvgSnrDb => (0..=8).map(|i| 5.0 * i as f64).collect(),
            SweepAxis::EhMargin => vec![1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0],
            SweepAxis::SigmaDelta2 => (0..=8).map(|i| 10f64.powf(-4.0 + 0.5 * i as f64)).collect(),
            SweepAxis::SpacingOverLambda => vec![0.125, 0.25, 0.375, 0.5],
            SweepAxis::PortCount => vec![1.0, 2.0, 5.0, 10.0, 20.0],
        }
    }

    /// `config` with this axis set to `value`, validated.
    pub fn apply(self, config: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut cfg = config.clone();
        match self {
            SweepAxis::AvgSnrDb => cfg.target_avg_snr_db = Some(value),
            SweepAxis::EhMargin => cfg.system.mu = value,
            SweepAxis::SigmaDelta2 => cfg.sigma_delta2 = value,
            SweepAxis::SpacingOverLambda => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::config(format!("spacing/lambda must be positive, got {value}")));
                }
                cfg.fas.spacing_m = value * cfg.fas.wavelength_m;
            }
            SweepAxis::PortCount => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::config(format!("port count must be a positive integer, got {value}")));
                }
                cfg.fas.port_count = value as usize;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| *c != '_' && *c != '-').collect::<String>().to_ascii_lowercase();
        SweepAxis::ALL
            .into_iter()
            .find(|a| {
                let canon: String = a.name().chars().filter(|c| *c != '_').collect();
                canon == key || format!("{a:?}").to_ascii_lowercase() == key
            })
            .ok_or_else(|| Error::config(format!("unknown sweep axis '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: String,
    pub axis_value: Option<f64>,
    pub result: OtaResult,
}

/// Tidy results table plus the base configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: Option<SweepAxis>,
    pub values: Vec<f64>,
    pub schemes: Vec<String>,
    pub config: ExperimentConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn row(&self, scheme: &str, axis_value: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.axis_value == Some(axis_value))
    }

    /// Rows for one scheme in axis order.
    pub fn series(&self, scheme: &str) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.scheme == scheme).collect()
    }
}

/// Expands schemes for a sweep. On the port-count axis every FAS scheme
/// collapses into one `fas` series whose K follows the axis.
fn effective_schemes(axis: Option<SweepAxis>, schemes: &[Scheme]) -> Vec<(String, Scheme)> {
    let mut out: Vec<(String, Scheme)> = Vec::new();
    for &s in schemes {
        let entry = match (axis, s) {
            (Some(SweepAxis::PortCount), Scheme::Fas { .. }) => ("fas".to_string(), s),
            _ => (s.to_string(), s),
        };
        if !out.iter().any(|(label, _)| *label == entry.0) {
            out.push(entry);
        }
    }
    out
}

/// One OTA result per (scheme, axis value).
pub fn sweep(
    config: &ExperimentConfig,
    axis: SweepAxis,
    values: &[f64],
    schemes: &[Scheme],
) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::config("sweep needs at least one axis value"));
    }
    if schemes.is_empty() {
        return Err(Error::config("sweep needs at least one scheme"));
    }
    let configs = values
        .iter()
        .map(|&v| axis.apply(config, v))
        .collect::<Result<Vec<_>>>()?;
    let expanded = effective_schemes(Some(axis), schemes);
    let mut rows = Vec::with_capacity(expanded.len() * values.len());
    for (label, scheme) in &expanded {
        for (cfg, &v) in configs.iter().zip(values) {
            let scheme = match (axis, scheme) {
                (SweepAxis::PortCount, Scheme::Fas { .. }) => Scheme::Fas { port_count: cfg.fas.port_count },
                _ => *scheme,
            };
            let mut result = run_scheme(cfg, scheme)?;
            result.per_realization = None;
            rows.push(SweepRow { scheme: label.clone(), axis_value: Some(v), result });
        }
    }
    Ok(SweepTable {
        axis: Some(axis),
        values: values.to_vec(),
        schemes: expanded.into_iter().map(|(l, _)| l).collect(),
        config: config.clone(),
        rows,
    })
}

/// Every scheme at the base configuration, no axis.
pub fn simulate(config: &ExperimentConfig, schemes: &[Scheme]) -> Result<SweepTable> {
    config.validate()?;
    if schemes.is_empty() {
        return Err(Error::config("need at least one scheme"));
    }
    let expanded = effective_schemes(None, schemes);
    let mut rows = Vec::new();
    for (label, scheme) in &expanded {
        let mut result = run_scheme(config, *scheme)?;
        result.per_realization = None;
        rows.push(SweepRow { scheme: label.clone(), axis_value: None, result });
    }
    Ok(SweepTable {
        axis: None,
        values: Vec::new(),
        schemes: expanded.into_iter().map(|(l, _)| l).collect(),
        config: config.clone(),
        rows,
    })
}
