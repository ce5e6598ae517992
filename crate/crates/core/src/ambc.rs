//! Backscatter link physics: port selection, SNR, rate, harvested power and
//! the energy-harvesting (EH) margin constraint on the ON-state reflection
//! level `a1 = |α(1)|²`.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Scalar system constants. Powers are in watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    /// Source transmit power.
    pub p_s: f64,
    /// Reader noise power.
    pub sigma2: f64,
    /// Tag circuit power.
    pub p_c: f64,
    /// RF-to-DC efficiency.
    pub xi: f64,
    /// Reflection efficiency.
    pub eta: f64,
    /// `Pr(b = 1)`.
    pub p1: f64,
    /// EH margin factor on `p_c`.
    pub mu: f64,
    pub a_min: f64,
    pub a_max: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            p_s: dbm_to_watts(20.0),
            sigma2: dbm_to_watts(-100.0),
            p_c: dbm_to_watts(-20.0),
            xi: 0.6,
            eta: 0.8,
            p1: 0.5,
            mu: 1.0,
            a_min: 0.01,
            a_max: 0.8,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p_s", self.p_s), ("sigma2", self.sigma2), ("p_c", self.p_c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be a positive power, got {v}")));
            }
        }
        for (name, v) in [("xi", self.xi), ("eta", self.eta), ("p1", self.p1)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::config(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        if !(self.mu >= 1.0 && self.mu.is_finite()) {
            return Err(Error::config(format!("mu must be >= 1, got {}", self.mu)));
        }
        if !(0.0 <= self.a_min && self.a_min <= self.a_max && self.a_max <= self.eta) {
            return Err(Error::config(format!(
                "need 0 <= a_min <= a_max <= eta, got a_min={} a_max={} eta={}",
                self.a_min, self.a_max, self.eta
            )));
        }
        Ok(())
    }
}

/// A selected port (0-based) and ON-state reflection level. The OFF level is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackscatterDecision {
    pub port: usize,
    pub a1: f64,
}

impl BackscatterDecision {
    pub const A0: f64 = 0.0;
}

/// Index of the largest observation; ties go to the lowest index.
pub fn select_port(g_obs: &[f64]) -> Result<usize> {
    let (first, rest) = g_obs
        .split_first()
        .ok_or_else(|| Error::domain("cannot select a port from an empty observation vector"))?;
    let mut best = (0, *first);
    for (i, &g) in rest.iter().enumerate() {
        if g > best.1 {
            best = (i + 1, g);
        }
    }
    Ok(best.0)
}

/// `γ = P_s a g / σ²`.
pub fn instantaneous_snr(params: &SystemParams, a: f64, g_fas: f64) -> f64 {
    params.p_s * a * g_fas / params.sigma2
}

/// `log2(1 + γ)` in bits/s/Hz.
pub fn rate(gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::domain(format!("SNR must be non-negative, got {gamma}")));
    }
    Ok(gamma.ln_1p() / std::f64::consts::LN_2)
}

pub(crate) fn rate_unchecked(gamma: f64) -> f64 {
    gamma.ln_1p() / std::f64::consts::LN_2
}

/// Linear EH model `ξ (1 - a) P_s g_s`.
pub fn harvested_power(params: &SystemParams, a: f64, g_s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::domain(format!("reflection level must lie in [0, 1], got {a}")));
    }
    Ok(params.xi * (1.0 - a) * params.p_s * g_s)
}

/// `ξ (1 - p1 a1) P_s g_s >= μ P_c`.
pub fn eh_margin_satisfied(params: &SystemParams, a1: f64, g_s: f64) -> bool {
    params.xi * (1.0 - params.p1 * a1) * params.p_s * g_s >= params.mu * params.p_c
}

/// Largest `a1` the EH margin allows, `(1 - μ P_c / (ξ P_s g_s)) / p1`.
/// Independent of the port.
pub fn eh_level_bound(params: &SystemParams, g_s: f64) -> f64 {
    (1.0 - params.mu * params.p_c / (params.xi * params.p_s * g_s)) / params.p1
}

/// Rate-maximising reflection level under the EH margin, or `None` when no
/// level in `[a_min, a_max]` is feasible.
///
/// Rate is increasing in `a1`, so the answer is `min(a_max, a_EH)`. The
/// returned level always passes [`eh_margin_satisfied`] as evaluated in
/// floating point; a bound that lands a few ulps past the constraint is
/// walked back.
pub fn optimal_a1_for_port(params: &SystemParams, g_s: f64) -> Option<f64> {
    let bound = eh_level_bound(params, g_s);
    let mut a1 = if bound.is_nan() { params.a_min } else { params.a_max.min(bound) };
    if a1 < params.a_min {
        a1 = params.a_min;
    }
    for _ in 0..64 {
        if eh_margin_satisfied(params, a1, g_s) {
            return Some(a1);
        }
        if a1 <= params.a_min {
            return None;
        }
        a1 = a1.next_down().max(params.a_min);
    }
    None
}

/// Single-antenna reference: true gain of port 0, closed-form level,
/// zero rate when infeasible.
pub fn tas_baseline_rate(params: &SystemParams, realization: &ChannelRealization) -> f64 {
    let Some(&g) = realization.g_c.first() else {
        return 0.0;
    };
    match optimal_a1_for_port(params, realization.g_s) {
        Some(a1) => rate_unchecked(instantaneous_snr(params, a1, g)),
        None => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arithmetic_params() -> SystemParams {
        SystemParams { p_s: 0.1, sigma2: 1e-13, p_c: 1e-5, ..SystemParams::default() }
    }

    #[test]
    fn defaults_in_watts() {
        let p = SystemParams::default();
        assert!((p.p_s - 0.1).abs() < 1e-15);
        assert!((p.sigma2 - 1e-13).abs() < 1e-27);
        assert!((p.p_c - 1e-5).abs() < 1e-19);
        p.validate().unwrap();
    }

    #[test]
    fn validation_rejects_bad_bounds() {
        let p = SystemParams { a_max: 0.9, ..SystemParams::default() };
        assert!(p.validate().is_err());
        let p = SystemParams { a_min: 0.5, a_max: 0.4, ..SystemParams::default() };
        assert!(p.validate().is_err());
        let p = SystemParams { mu: 0.5, ..SystemParams::default() };
        assert!(p.validate().is_err());
        let p = SystemParams { p_c: 0.0, ..SystemParams::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn port_selection() {
        assert_eq!(select_port(&[1.0, 3.0, 2.0]).unwrap(), 1);
        assert_eq!(select_port(&[5.0]).unwrap(), 0);
        assert_eq!(select_port(&[2.0, 2.0]).unwrap(), 0);
        assert!(select_port(&[]).is_err());
    }

    #[test]
    fn snr_and_rate() {
        let p = arithmetic_params();
        assert_eq!(instantaneous_snr(&p, 0.0, 1e-9), 0.0);
        let g = instantaneous_snr(&p, 0.8, 1e-9);
        assert!((g - 800.0).abs() < 1e-9);
        assert!((instantaneous_snr(&p, 0.8, 2e-9) - 2.0 * g).abs() < 1e-9);
        assert_eq!(rate(0.0).unwrap(), 0.0);
        assert_eq!(rate(1.0).unwrap(), 1.0);
        assert_eq!(rate(3.0).unwrap(), 2.0);
        assert!((rate(800.0).unwrap() - 801f64.ln() / 2f64.ln()).abs() < 1e-12);
        assert!(rate(-1.0).is_err());
    }

    #[test]
    fn harvested() {
        let p = arithmetic_params();
        assert_eq!(harvested_power(&p, 1.0, 1e-3).unwrap(), 0.0);
        assert!((harvested_power(&p, 0.0, 1e-3).unwrap() - 6e-5).abs() < 1e-18);
        assert!(harvested_power(&p, 1.2, 1e-3).is_err());
        let mut last = f64::INFINITY;
        for i in 0..=10 {
            let h = harvested_power(&p, i as f64 / 10.0, 1e-3).unwrap();
            assert!(h < last);
            last = h;
        }
    }

    #[test]
    fn eh_margin_examples() {
        let p = arithmetic_params();
        assert!(eh_margin_satisfied(&p, 0.8, 1e-3));
        assert!(!eh_margin_satisfied(&p, 0.0, 0.0));
        // a1 = 0 leaves ξ P_s g_s = 6e-5 W against μ P_c
        assert!(eh_margin_satisfied(&SystemParams { mu: 5.0, ..p.clone() }, 0.0, 1e-3));
        assert!(!eh_margin_satisfied(&SystemParams { mu: 7.0, ..p.clone() }, 0.0, 1e-3));
    }

    #[test]
    fn closed_form_level() {
        let p = SystemParams { mu: 2.0, ..arithmetic_params() };
        assert_eq!(optimal_a1_for_port(&p, 1e-3), Some(p.a_max));
        // μ P_c >= ξ P_s g_s: even a1 = 0 fails
        let q = SystemParams { mu: 6.0, ..arithmetic_params() };
        assert_eq!(optimal_a1_for_port(&q, 1e-3), None);
        // interior bound
        let r = SystemParams { mu: 5.0, ..arithmetic_params() };
        let a = optimal_a1_for_port(&r, 1e-3).unwrap();
        assert!((a - (1.0 - 5e-5 / 6e-5) / 0.5).abs() < 1e-12);
        assert!(eh_margin_satisfied(&r, a, 1e-3));
    }

    #[test]
    fn constraint_active_at_lower_bound() {
        let base = arithmetic_params();
        let g_s = 1e-3;
        let p_c = base.xi * base.p_s * g_s * (1.0 - base.p1 * base.a_min);
        let p = SystemParams { p_c, mu: 1.0, ..base };
        let a1 = optimal_a1_for_port(&p, g_s).unwrap();
        assert!((a1 - p.a_min).abs() < 1e-12, "{a1}");
        assert!(eh_margin_satisfied(&p, a1, g_s));
    }

    #[test]
    fn tas_rate() {
        let p = arithmetic_params();
        let mk = |g_s: f64, g_b: f64| ChannelRealization {
            h_s: num_complex::Complex64::new(g_s.sqrt(), 0.0),
            h_b: vec![num_complex::Complex64::new(g_b.sqrt(), 0.0)],
            g_s,
            g_b: vec![g_b],
            g_c: vec![g_s * g_b],
            g_obs: vec![g_s * g_b],
        };
        assert_eq!(tas_baseline_rate(&p, &mk(1e-3, 0.0)), 0.0);
        let r = mk(1e-3, 1e-6);
        let a1 = optimal_a1_for_port(&p, r.g_s).unwrap();
        let expected = rate(instantaneous_snr(&p, a1, r.g_c[0])).unwrap();
        assert_eq!(tas_baseline_rate(&p, &r), expected);
    }
}
