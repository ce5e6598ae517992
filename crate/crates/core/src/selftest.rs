//! Quick invariant checks runnable from the command line.

use std::f64::consts::PI;

use crate::ambc::{eh_margin_satisfied, instantaneous_snr, optimal_a1_for_port, rate, SystemParams};
use crate::channel::{jakes_correlation, FasConfig};
use crate::harness::{oracle_check, ExperimentConfig};
use crate::numerics::{bessel_j0, cholesky_lower};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// `J0(x) = (1/π) ∫_0^π cos(x sin t) dt` by the trapezoidal rule, which is
/// spectrally accurate for this periodic integrand.
fn j0_quadrature(x: f64) -> f64 {
    let n = 400;
    let h = PI / n as f64;
    let inner: f64 = (1..n).map(|i| (x * (i as f64 * h).sin()).cos()).sum();
    (inner + 1.0) * h / PI
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

pub fn run_selftest() -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    let worst = (0..=1000)
        .map(|i| {
            let x = i as f64 * 0.1;
            (bessel_j0(x).unwrap_or(f64::NAN) - j0_quadrature(x)).abs()
        })
        .fold(0.0, f64::max);
    out.push(check("bessel_j0 vs quadrature on [0, 100]", worst <= 1e-10, format!("max error {worst:.3e}")));

    let mut recon = 0.0f64;
    let mut psd_ok = true;
    for k in [2usize, 5, 10, 20, 32] {
        for s in [0.05, 0.125, 0.25, 0.5] {
            let cfg = FasConfig::new(k, s, 0.0857).expect("valid grid");
            let r = jakes_correlation(&cfg).expect("jakes");
            match cholesky_lower(&r) {
                Ok(l) => {
                    let rr = l.reconstruct();
                    for (a, b) in rr.iter().zip(r.as_slice()) {
                        recon = recon.max((a - b).abs());
                    }
                }
                Err(_) => psd_ok = false,
            }
        }
    }
    out.push(check(
        "Jakes matrices factor with LL^T = R",
        psd_ok && recon <= 1e-9,
        format!("max reconstruction error {recon:.3e}"),
    ));

    let p = SystemParams::default();
    let mut grid_gap = 0.0f64;
    let mut violations = 0;
    for i in 0..50 {
        let g_s = 1e-4 * (1.0 + i as f64 * 0.37);
        let grid_best = (0..10_000)
            .map(|j| p.a_min + (p.a_max - p.a_min) * j as f64 / 9_999.0)
            .filter(|&a| eh_margin_satisfied(&p, a, g_s))
            .fold(None, |m: Option<f64>, a| Some(m.map_or(a, |m| m.max(a))));
        match (optimal_a1_for_port(&p, g_s), grid_best) {
            (Some(a), Some(b)) => {
                grid_gap = grid_gap.max((a - b).abs());
                if !eh_margin_satisfied(&p, a, g_s) {
                    violations += 1;
                }
            }
            (None, None) => {}
            (Some(a), None) => grid_gap = grid_gap.max(a - p.a_min),
            (None, Some(_)) => violations += 1,
        }
    }
    let step = (p.a_max - p.a_min) / 9_999.0;
    out.push(check(
        "closed-form level vs grid search",
        grid_gap <= step && violations == 0,
        format!("max gap {grid_gap:.3e} (grid step {step:.3e}), violations {violations}"),
    ));

    let spot = [(0.0, 0.0), (1.0, 1.0), (3.0, 2.0)]
        .iter()
        .all(|&(g, r)| rate(g).ok() == Some(r));
    let snr = instantaneous_snr(&SystemParams { p_s: 0.1, sigma2: 1e-13, ..p.clone() }, 0.8, 1e-9);
    out.push(check("rate/SNR spot values", spot && (snr - 800.0).abs() < 1e-9, format!("gamma(0.8, 1e-9) = {snr}")));

    let cfg = ExperimentConfig { target_avg_snr_db: Some(20.0), master_seed: 1, ..Default::default() };
    match oracle_check(&cfg, 30) {
        Ok(rep) => out.push(check(
            "swarm matches exact oracle",
            rep.matches >= 29 && rep.max_excess <= 1e-12 && rep.eh_violations == 0 && rep.feasibility_disagreements == 0,
            format!(
                "{}/{} within tolerance, max shortfall {:.3e}, max excess {:.3e}",
                rep.matches, rep.trials, rep.max_shortfall, rep.max_excess
            ),
        )),
        Err(e) => out.push(check("swarm matches exact oracle", false, e.to_string())),
    }
    out
}
