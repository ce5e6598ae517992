//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use fas_ambc::ambc::{instantaneous_snr, optimal_a1_for_port, rate, SystemParams};
use fas_ambc::channel::{jakes_correlation, sample_backscatter_channels, FasConfig};
use fas_ambc::harness::{run_ota, run_tas, ExperimentConfig, OtaResult};
use fas_ambc::numerics::{bessel_j0, cholesky_lower, RngStream};
use fas_ambc::optimizer::{exhaustive_oracle, pso_solve, PsoParams};
use num_complex::Complex64;

const N: usize = 10_000;
const SEED: u64 = 20_240_601;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn base(n: usize) -> ExperimentConfig {
    ExperimentConfig { n_realizations: n, master_seed: SEED, target_avg_snr_db: Some(20.0), ..Default::default() }
}

fn fas(cfg: &ExperimentConfig, k: usize) -> OtaResult {
    let mut c = cfg.clone();
    c.fas.port_count = k;
    run_ota(&c).expect("ota run")
}

/// `a` beats `b` by more than two combined standard errors.
fn beats(a: &OtaResult, b: &OtaResult) -> (bool, f64) {
    let z = (a.mean_rate - b.mean_rate) / a.combined_std_error(b);
    (z > 2.0, z)
}

fn j0_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut t = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..80 {
        t *= -q / (k as f64 * k as f64);
        sum += t;
    }
    sum
}

fn oracle_equivalence() -> Check {
    let cfg = ExperimentConfig { master_seed: SEED, ..Default::default() };
    let pso = PsoParams::default();
    if pso != (PsoParams { n_particles: 50, n_iterations: 50, omega: 0.6, c1: 1.2, c2: 1.2, ..pso.clone() }) {
        return Err(format!("swarm defaults drifted: {pso:?}"));
    }
    let model = fas_ambc::channel::ChannelModel::new(
        cfg.fas.clone(),
        cfg.kappa,
        cfg.geometry.forward_gain().unwrap(),
        cfg.geometry.backscatter_gain().unwrap(),
    )
    .unwrap();
    let (mut matches, mut max_excess, mut feasible) = (0, f64::NEG_INFINITY, 0);
    for n in 0..100 {
        let stream = RngStream::new(cfg.master_seed, n);
        let r = model.realize(&stream, cfg.sigma_delta2).unwrap();
        let s = pso_solve(&r.g_obs, r.g_s, &cfg.system, &pso, &mut stream.lane(3)).unwrap();
        let e = exhaustive_oracle(&r.g_obs, r.g_s, &cfg.system).unwrap();
        match (s, e) {
            (Some(s), Some(e)) => {
                feasible += 1;
                max_excess = max_excess.max(s.fitness - e.fitness);
                matches += usize::from((e.fitness - s.fitness).abs() <= 1e-3);
            }
            (None, None) => matches += 1,
            _ => {}
        }
    }
    let detail = format!("{matches}/100 within 1e-3 ({feasible} feasible), max excess {max_excess:.2e}");
    if cfg.fas.port_count == 10 && matches >= 99 && max_excess <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn closed_form_level() -> Check {
    let mut rng = RngStream::new(SEED, 1);
    let steps = 10_000;
    let (mut worst, mut violations, mut interior, mut infeasible) = (0.0f64, 0, 0, 0);
    for _ in 0..100 {
        let p = SystemParams {
            p_s: rng.uniform_in(0.01, 1.0),
            p_c: 10f64.powf(rng.uniform_in(-6.0, -4.0)),
            xi: rng.uniform_in(0.3, 0.9),
            p1: rng.uniform_in(0.1, 1.0),
            mu: rng.uniform_in(1.0, 8.0),
            ..SystemParams::default()
        };
        let g_s = 10f64.powf(rng.uniform_in(-4.0, -1.0));
        let g_fas = 1e-9;
        let ok = |a: f64| p.xi * (1.0 - p.p1 * a) * p.p_s * g_s >= p.mu * p.p_c;
        let h = (p.a_max - p.a_min) / (steps - 1) as f64;
        let grid = (0..steps)
            .map(|i| p.a_min + i as f64 * h)
            .filter(|&a| ok(a))
            .max_by(|a, b| {
                let ra = rate(instantaneous_snr(&p, *a, g_fas)).unwrap();
                let rb = rate(instantaneous_snr(&p, *b, g_fas)).unwrap();
                ra.total_cmp(&rb)
            });
        match (optimal_a1_for_port(&p, g_s), grid) {
            (Some(a), Some(g)) => {
                violations += usize::from(!ok(a));
                worst = worst.max((a - g).abs() / h);
                interior += usize::from(a < p.a_max);
            }
            (Some(a), None) => {
                violations += usize::from(!ok(a));
                worst = worst.max((a - p.a_min) / h);
                interior += 1;
            }
            (None, None) => infeasible += 1,
            (None, Some(_)) => return Err("closed form reported infeasible where the grid found a level".into()),
        }
    }
    let detail = format!(
        "max gap {worst:.3} grid steps, {violations} EH violations ({interior} bound-limited, {infeasible} infeasible)"
    );
    if worst <= 1.0 && violations == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn diversity_ordering() -> Check {
    let cfg = base(N);
    let r20 = fas(&cfg, 20);
    let r10 = fas(&cfg, 10);
    let r5 = fas(&cfg, 5);
    let tas = run_tas(&cfg).unwrap();
    let pairs = [(&r20, &r10), (&r10, &r5), (&r5, &tas)];
    let zs: Vec<(bool, f64)> = pairs.iter().map(|(a, b)| beats(a, b)).collect();
    let detail = format!(
        "K=20 {:.4} > K=10 {:.4} > K=5 {:.4} > TAS {:.4}; gaps {:.1}, {:.1}, {:.1} SE",
        r20.mean_rate, r10.mean_rate, r5.mean_rate, tas.mean_rate, zs[0].1, zs[1].1, zs[2].1
    );
    if zs.iter().all(|z| z.0) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn eh_margin_monotonicity() -> Check {
    let mus = [1.0, 2.0, 4.0, 8.0];
    let mut notes = Vec::new();
    let mut pass = true;
    for scheme in ["K=5", "K=10", "K=20", "TAS"] {
        let results: Vec<OtaResult> = mus
            .iter()
            .map(|&mu| {
                let mut cfg = base(N);
                cfg.system.mu = mu;
                match scheme {
                    "TAS" => run_tas(&cfg).unwrap(),
                    k => fas(&cfg, k[2..].parse().unwrap()),
                }
            })
            .collect();
        for w in results.windows(2) {
            let rate_ok = w[1].mean_rate <= w[0].mean_rate + 2.0 * w[0].combined_std_error(&w[1]);
            let outage_ok = w[1].outage_fraction >= w[0].outage_fraction;
            pass &= rate_ok && outage_ok;
        }
        notes.push(format!(
            "{scheme}: {}",
            results.iter().map(|r| format!("{:.3}/{:.3}", r.mean_rate, r.outage_fraction)).collect::<Vec<_>>().join(" ")
        ));
    }
    let detail = format!("rate/outage over mu=1,2,4,8 | {}", notes.join(" | "));
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn observation_noise() -> Check {
    let tas: Vec<f64> = [0.0, 0.05, 0.5]
        .iter()
        .map(|&s| {
            let mut cfg = base(N);
            cfg.sigma_delta2 = s;
            run_tas(&cfg).unwrap().mean_rate
        })
        .collect();
    let invariant = tas.iter().all(|v| v.to_bits() == tas[0].to_bits());
    let at = |s: f64| {
        let mut cfg = base(N);
        cfg.sigma_delta2 = s;
        fas(&cfg, 20)
    };
    let (clean, noisy) = (at(1e-4), at(1.0));
    let (degrades, z) = beats(&clean, &noisy);
    let detail = format!(
        "TAS {:?} bit-identical={invariant}; K=20 {:.4} @1e-4 vs {:.4} @1 ({z:.1} SE)",
        tas[0], clean.mean_rate, noisy.mean_rate
    );
    if invariant && degrades {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spacing_benefit() -> Check {
    let at = |s: f64| {
        let mut cfg = base(N);
        cfg.fas = FasConfig::new(10, s, cfg.fas.wavelength_m).unwrap();
        (run_ota(&cfg).unwrap(), jakes_correlation(&cfg.fas).unwrap().get(0, 1))
    };
    let (wide, rho_half) = at(0.5);
    let (narrow, rho_eighth) = at(0.125);
    let (better, z) = beats(&wide, &narrow);
    let want_half = j0_series(PI);
    let want_eighth = j0_series(PI / 4.0);
    let e_half = (rho_half - want_half).abs();
    let e_eighth = (rho_eighth - want_eighth).abs();
    let detail = format!(
        "lambda/2 {:.4} vs lambda/8 {:.4} ({z:.1} SE); rho {rho_half:.7} (err {e_half:.1e}), {rho_eighth:.7} (err {e_eighth:.1e})",
        wide.mean_rate, narrow.mean_rate
    );
    if better && e_half <= 1e-7 && e_eighth <= 1e-7 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn channel_statistics() -> Check {
    let draws = 100_000;
    let cfg = FasConfig::default();
    let k = cfg.port_count;
    let r = jakes_correlation(&cfg).unwrap();
    let l = cholesky_lower(&r).unwrap();
    let recon = l.reconstruct().iter().zip(r.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let path_loss = cfg_gain();
    let mut rng = RngStream::new(SEED, 7);
    let mut acc = vec![Complex64::new(0.0, 0.0); k * k];
    for _ in 0..draws {
        let h = sample_backscatter_channels(&mut rng, &cfg, 0.0, &l, path_loss.sqrt()).unwrap();
        for i in 0..k {
            for j in 0..k {
                acc[i * k + j] += h[i] * h[j].conj();
            }
        }
    }
    let mut corr_err = 0.0f64;
    let mut power_err = 0.0f64;
    for i in 0..k {
        power_err = power_err.max((acc[i * k + i].re / draws as f64 / path_loss - 1.0).abs());
        for j in 0..k {
            let emp = acc[i * k + j] / (draws as f64 * path_loss);
            corr_err = corr_err.max((emp - Complex64::new(r.get(i, j), 0.0)).norm());
        }
    }
    let detail = format!("corr err {corr_err:.4}, power err {:.3}%, reconstruction {recon:.1e}", 100.0 * power_err);
    if corr_err <= 0.02 && power_err <= 0.01 && recon <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cfg_gain() -> f64 {
    ExperimentConfig::default().geometry.backscatter_gain().unwrap()
}

fn cli_determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_fas-ambc");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |out: &Path| {
        Command::new(bin)
            .args(["sweep", "--axis", "eh_margin", "--realizations", "2000", "--seed", "7", "--snr-db", "20"])
            .arg("--out")
            .arg(out)
            .output()
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(out).map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(String::from_utf8_lossy(&o.stderr).into_owned());
        }
    }
    let mut sizes = Vec::new();
    for f in ["sweep_eh_margin.csv", "sweep_eh_margin.json"] {
        let x = std::fs::read(a.join(f)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(f)).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{f} differs between runs"));
        }
        sizes.push(format!("{f} {} bytes", x.len()));
    }
    Ok(format!("identical: {}", sizes.join(", ")))
}

fn numerics() -> Check {
    let worst = (0..=120)
        .map(|i| {
            let x = i as f64 * 0.1;
            (bessel_j0(x).unwrap() - j0_series(x)).abs()
        })
        .fold(0.0, f64::max);
    let spots = [(0.0, 0.0), (1.0, 1.0), (3.0, 2.0)];
    let spot_ok = spots.iter().all(|&(g, want)| rate(g).unwrap() == want);
    let detail = format!("J0 max err {worst:.1e} on 121 points; rate spots exact={spot_ok}");
    if worst <= 1e-10 && spot_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("swarm matches exhaustive oracle", oracle_equivalence),
        ("closed-form reflection level", closed_form_level),
        ("diversity ordering at 20 dB", diversity_ordering),
        ("EH margin monotonicity", eh_margin_monotonicity),
        ("observation noise sensitivity", observation_noise),
        ("port spacing benefit", spacing_benefit),
        ("channel statistics", channel_statistics),
        ("CLI sweep determinism", cli_determinism),
        ("numerical kernels", numerics),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("[PASS] {}. {name}: {d} ({secs:.1} s)", i + 1),
            Err(d) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {d} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
