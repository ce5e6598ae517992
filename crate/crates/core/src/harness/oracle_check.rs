//! Side-by-side comparison of the swarm against the exact oracle.

use rayon::prelude::*;

use crate::ambc::eh_margin_satisfied;
use crate::channel::ChannelModel;
use crate::error::Result;
use crate::numerics::RngStream;
use crate::optimizer::{exhaustive_oracle, pso_solve};

use super::config::ExperimentConfig;
use super::ota::{resolve_link_gains, LANE_SWARM};

/// Gap (bits/s/Hz) under which a swarm result counts as matching the oracle.
pub const MATCH_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub trials: usize,
    /// Trials where both agree within [`MATCH_TOLERANCE`] or both are infeasible.
    pub matches: usize,
    /// Largest `oracle - swarm` fitness gap.
    pub max_shortfall: f64,
    /// Largest `swarm - oracle` fitness gap (should never exceed ~0).
    pub max_excess: f64,
    /// Trials where exactly one side reported infeasibility.
    pub feasibility_disagreements: usize,
    /// Swarm decisions violating the EH margin.
    pub eh_violations: usize,
}

/// Runs `trials` realizations of `config` through both solvers.
pub fn oracle_check(config: &ExperimentConfig, trials: usize) -> Result<OracleReport> {
    config.validate()?;
    let gains = resolve_link_gains(config)?;
    let model = ChannelModel::new(config.fas.clone(), config.kappa, gains.forward, gains.backscatter)?;
    let params = &config.system;
    let pairs = (0..trials as u64)
        .into_par_iter()
        .map(|n| {
            let stream = RngStream::new(config.master_seed, n);
            let real = model.realize(&stream, config.sigma_delta2)?;
            let swarm = pso_solve(&real.g_obs, real.g_s, params, &config.pso, &mut stream.lane(LANE_SWARM))?;
            let exact = exhaustive_oracle(&real.g_obs, real.g_s, params)?;
            Ok((swarm, exact, real.g_s))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = OracleReport {
        trials,
        matches: 0,
        max_shortfall: 0.0,
        max_excess: f64::NEG_INFINITY,
        feasibility_disagreements: 0,
        eh_violations: 0,
    };
    for (swarm, exact, g_s) in pairs {
        match (swarm, exact) {
            (Some(s), Some(e)) => {
                let gap = e.fitness - s.fitness;
                report.max_shortfall = report.max_shortfall.max(gap);
                report.max_excess = report.max_excess.max(-gap);
                if gap <= MATCH_TOLERANCE {
                    report.matches += 1;
                }
                if !eh_margin_satisfied(params, s.decision.a1, g_s) {
                    report.eh_violations += 1;
                }
            }
            (None, None) => report.matches += 1,
            _ => report.feasibility_disagreements += 1,
        }
    }
    if report.max_excess == f64::NEG_INFINITY {
        report.max_excess = 0.0;
    }
    Ok(report)
}
