//! Particle swarm search over (port surrogate `u`, reflection level `a1`).
//!
//! Each particle lives in the box `[1, K] x [a_min, a_max]`; `u` is rounded
//! to a port. Fitness is the rate on the *observed* gain of the decoded port.
//! Positions violating the EH margin are discarded at the fitness level: the
//! particle keeps moving but cannot update any best.

use serde::{Deserialize, Serialize};

use crate::ambc::{
    eh_margin_satisfied, instantaneous_snr, optimal_a1_for_port, rate_unchecked, select_port,
    BackscatterDecision, SystemParams,
};
use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Index of the port surrogate in a position pair.
pub const U: usize = 0;
/// Index of the reflection level in a position pair.
pub const A1: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoParams {
    pub n_particles: usize,
    pub n_iterations: usize,
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
    /// Per-dimension velocity clamp as a fraction of that dimension's range.
    pub v_max_fraction: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self { n_particles: 50, n_iterations: 50, omega: 0.6, c1: 1.2, c2: 1.2, v_max_fraction: 1.0 }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles < 2 {
            return Err(Error::config("n_particles must be at least 2"));
        }
        if !(0.0..1.0).contains(&self.omega) {
            return Err(Error::config(format!("omega must lie in [0, 1), got {}", self.omega)));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::config("c1 and c2 must be positive"));
        }
        if !(self.v_max_fraction > 0.0 && self.v_max_fraction <= 1.0) {
            return Err(Error::config(format!(
                "v_max_fraction must lie in (0, 1], got {}",
                self.v_max_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub best_position: [f64; 2],
    /// Only ever set from a feasible evaluation.
    pub best_fitness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub global_best_position: [f64; 2],
    pub global_best_fitness: Option<f64>,
    pub iteration: usize,
}

/// Inputs the fitness function needs for one realization.
#[derive(Debug, Clone, Copy)]
pub struct FitnessContext<'a> {
    pub g_obs: &'a [f64],
    pub g_s: f64,
    pub params: &'a SystemParams,
}

impl FitnessContext<'_> {
    pub fn port_count(&self) -> usize {
        self.g_obs.len()
    }

    pub fn lower(&self) -> [f64; 2] {
        [1.0, self.params.a_min]
    }

    pub fn upper(&self) -> [f64; 2] {
        [self.port_count() as f64, self.params.a_max]
    }

    pub fn project(&self, x: [f64; 2]) -> [f64; 2] {
        let (lo, hi) = (self.lower(), self.upper());
        [x[U].clamp(lo[U], hi[U]), x[A1].clamp(lo[A1], hi[A1])]
    }
}

/// Zero-based port for surrogate `u`: nearest integer (halves round up),
/// clipped to `[1, K]`, minus one.
pub fn decode_port(u: f64, port_count: usize) -> Result<usize> {
    if !u.is_finite() {
        return Err(Error::domain(format!("port surrogate must be finite, got {u}")));
    }
    if port_count == 0 {
        return Err(Error::domain("port count must be at least 1"));
    }
    let k = (u + 0.5).floor().clamp(1.0, port_count as f64);
    Ok(k as usize - 1)
}

/// Rate on the observed gain of the decoded port, or `None` if the level
/// violates the EH margin.
pub fn evaluate_fitness(position: [f64; 2], ctx: &FitnessContext<'_>) -> Result<Option<f64>> {
    let port = decode_port(position[U], ctx.port_count())?;
    let a1 = position[A1];
    if !eh_margin_satisfied(ctx.params, a1, ctx.g_s) {
        return Ok(None);
    }
    Ok(Some(rate_unchecked(instantaneous_snr(ctx.params, a1, ctx.g_obs[port]))))
}

fn is_better(candidate: f64, incumbent: Option<f64>) -> bool {
    incumbent.is_none_or(|best| candidate > best)
}

impl SwarmState {
    /// Uniform positions in the box, uniform velocities within the clamp.
    pub fn initialize(pso: &PsoParams, ctx: &FitnessContext<'_>, rng: &mut RngStream) -> Result<Self> {
        if ctx.port_count() == 0 {
            return Err(Error::domain("need at least one port"));
        }
        let (lo, hi) = (ctx.lower(), ctx.upper());
        let vmax = velocity_limits(pso, ctx);
        let mut particles = Vec::with_capacity(pso.n_particles);
        for _ in 0..pso.n_particles {
            let position = [rng.uniform_in(lo[U], hi[U]), rng.uniform_in(lo[A1], hi[A1])];
            let velocity = [rng.uniform_in(-vmax[U], vmax[U]), rng.uniform_in(-vmax[A1], vmax[A1])];
            particles.push(Particle { position, velocity, best_position: position, best_fitness: None });
        }
        let mut swarm = Self {
            global_best_position: particles[0].position,
            particles,
            global_best_fitness: None,
            iteration: 0,
        };
        swarm.evaluate(ctx)?;
        Ok(swarm)
    }

    fn evaluate(&mut self, ctx: &FitnessContext<'_>) -> Result<()> {
        for p in &mut self.particles {
            let Some(f) = evaluate_fitness(p.position, ctx)? else {
                continue;
            };
            if is_better(f, p.best_fitness) {
                p.best_fitness = Some(f);
                p.best_position = p.position;
            }
            if is_better(f, self.global_best_fitness) {
                self.global_best_fitness = Some(f);
                self.global_best_position = p.position;
            }
        }
        Ok(())
    }

    /// One velocity/position update followed by evaluation and best updates.
    pub fn step(&mut self, pso: &PsoParams, ctx: &FitnessContext<'_>, rng: &mut RngStream) -> Result<()> {
        let vmax = velocity_limits(pso, ctx);
        let social_anchor = self.global_best_fitness.map(|_| self.global_best_position);
        for p in &mut self.particles {
            // Fresh coefficients per particle and per dimension.
            let r1 = [rng.uniform(), rng.uniform()];
            let r2 = [rng.uniform(), rng.uniform()];
            for d in [U, A1] {
                let mut v = pso.omega * p.velocity[d]
                    + pso.c1 * r1[d] * (p.best_position[d] - p.position[d]);
                if let Some(g) = social_anchor {
                    v += pso.c2 * r2[d] * (g[d] - p.position[d]);
                }
                p.velocity[d] = v.clamp(-vmax[d], vmax[d]);
            }
            p.position = ctx.project([
                p.position[U] + p.velocity[U],
                p.position[A1] + p.velocity[A1],
            ]);
        }
        self.evaluate(ctx)?;
        self.iteration += 1;
        Ok(())
    }

    pub fn best_decision(&self, port_count: usize) -> Result<Option<PsoSolution>> {
        let Some(fitness) = self.global_best_fitness else {
            return Ok(None);
        };
        let port = decode_port(self.global_best_position[U], port_count)?;
        Ok(Some(PsoSolution {
            decision: BackscatterDecision { port, a1: self.global_best_position[A1] },
            fitness,
        }))
    }
}

fn velocity_limits(pso: &PsoParams, ctx: &FitnessContext<'_>) -> [f64; 2] {
    let (lo, hi) = (ctx.lower(), ctx.upper());
    [pso.v_max_fraction * (hi[U] - lo[U]), pso.v_max_fraction * (hi[A1] - lo[A1])]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoSolution {
    pub decision: BackscatterDecision,
    /// Rate on the observed gain, bits/s/Hz.
    pub fitness: f64,
}

/// Runs the swarm for `n_iterations` after an initial evaluation.
///
/// Returns `None` (infeasible) only if no level in `[a_min, a_max]` meets the
/// EH margin: when the swarm never lands on a feasible point, every
/// particle's port is re-probed at `a_min`, the most feasible level.
pub fn pso_solve(
    g_obs: &[f64],
    g_s: f64,
    params: &SystemParams,
    pso: &PsoParams,
    rng: &mut RngStream,
) -> Result<Option<PsoSolution>> {
    let ctx = FitnessContext { g_obs, g_s, params };
    let mut swarm = SwarmState::initialize(pso, &ctx, rng)?;
    for _ in 0..pso.n_iterations {
        swarm.step(pso, &ctx, rng)?;
    }
    if swarm.global_best_fitness.is_none() {
        for i in 0..swarm.particles.len() {
            let probe = [swarm.particles[i].position[U], params.a_min];
            if let Some(f) = evaluate_fitness(probe, &ctx)? {
                if is_better(f, swarm.global_best_fitness) {
                    swarm.global_best_fitness = Some(f);
                    swarm.global_best_position = probe;
                }
            }
        }
    }
    swarm.best_decision(g_obs.len())
}

/// Exact optimum: the problem separates into the best observed port and the
/// closed-form level, both monotone in the rate.
pub fn exhaustive_oracle(g_obs: &[f64], g_s: f64, params: &SystemParams) -> Result<Option<PsoSolution>> {
    let port = select_port(g_obs)?;
    Ok(optimal_a1_for_port(params, g_s).map(|a1| PsoSolution {
        decision: BackscatterDecision { port, a1 },
        fitness: rate_unchecked(instantaneous_snr(params, a1, g_obs[port])),
    }))
}
