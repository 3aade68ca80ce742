//! Derivative-free maximization of the displaced-parity MK signal over the
//! 4n real displacement parameters.
//!
//! Multi-start Nelder-Mead: one start at the GHZ-limit β schedule, one at
//! the all-zero assignment, and the rest drawn uniformly from a box whose
//! half-width scales as 1/α (optimal displacements shrink as 1/α). Because
//! the objective is |Σ c_i E_i| with a kink at zero, each start optimizes
//! the signed sum and its negation and keeps the larger magnitude.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_form::CatSpec;
use crate::displaced_parity::{
    displaced_signal_sum, ghz_limit_beta_schedule, DisplacementAssignment,
};
use crate::error::{Error, Result};
use crate::parallel;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Total number of starts, including the two deterministic seeds.
    pub starts: usize,
    /// Iteration cap per local search.
    pub max_iters: usize,
    /// Simplex diameter below which a local search stops.
    pub tolerance: f64,
    /// Search-box half-width in units of 1/α (the actual box is ±w/α).
    pub box_half_width: f64,
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iters: 2000,
            tolerance: 1e-8,
            box_half_width: std::f64::consts::FRAC_PI_2,
            rng_seed: 0,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.starts < 1 {
            return Err(Error::InvalidArgument("starts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartTrace {
    pub start: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_value: f64,
    pub best_assignment: DisplacementAssignment,
    pub traces: Vec<StartTrace>,
    pub converged: bool,
}

/// |Σ c_i E_i| at a flat parameter vector
/// [Re β₁, Im β₁, Re β₁′, Im β₁′, …].
pub fn objective(spec: &CatSpec, flat_params: &[f64]) -> Result<f64> {
    if flat_params.len() != 4 * spec.mode_count() {
        return Err(Error::LengthMismatch {
            expected: 4 * spec.mode_count(),
            got: flat_params.len(),
        });
    }
    let assign = DisplacementAssignment::from_flat(flat_params)?;
    Ok(displaced_signal_sum(spec, &assign)?.abs())
}

struct NmOutcome {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Plain Nelder-Mead minimization (reflection 1, expansion 2, contraction
/// 1/2, shrink 1/2). Terminates when the simplex diameter (max coordinate
/// spread) falls below `tol` or after `max_iters` iterations.
fn nelder_mead<F>(f: &F, x0: &[f64], step: f64, tol: f64, max_iters: usize) -> Result<NmOutcome>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let dim = x0.len();
    let eval = |x: &[f64]| -> Result<f64> {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective { params: x.to_vec() });
        }
        Ok(v)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect::<Result<_>>()?;

    let order = |simplex: &mut Vec<Vec<f64>>, values: &mut Vec<f64>| {
        let mut idx: Vec<usize> = (0..simplex.len()).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
        *simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        *values = idx.iter().map(|&i| values[i]).collect();
    };
    order(&mut simplex, &mut values);

    let diameter = |simplex: &[Vec<f64>]| -> f64 {
        let best = &simplex[0];
        simplex[1..]
            .iter()
            .map(|x| {
                x.iter()
                    .zip(best)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        if diameter(&simplex) < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let worst = dim;
        let mut centroid = vec![0.0; dim];
        for x in &simplex[..worst] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / worst as f64;
            }
        }
        let lerp = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = lerp(1.0);
        let fr = eval(&reflected)?;
        if fr < values[0] {
            let expanded = lerp(2.0);
            let fe = eval(&expanded)?;
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[worst - 1] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = if fr < values[worst] { lerp(0.5) } else { lerp(-0.5) };
            let fc = eval(&contracted)?;
            if fc < values[worst].min(fr) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // shrink toward the best vertex
                let best = simplex[0].clone();
                for i in 1..=worst {
                    for (x, b) in simplex[i].iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    values[i] = eval(&simplex[i])?;
                }
            }
        }
        order(&mut simplex, &mut values);
    }
    Ok(NmOutcome {
        x: simplex[0].clone(),
        value: values[0],
        iterations,
        converged,
    })
}

/// Multi-start maximization of the displaced MK signal.
///
/// Deterministic for a fixed `rng_seed`; ties between starts resolve to the
/// lowest start index.
pub fn maximize_displaced_signal(
    spec: &CatSpec,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    let n = spec.mode_count();
    let alpha_mag = spec.alpha().norm();
    if alpha_mag == 0.0 {
        return Err(Error::ZeroAlpha);
    }
    let dim = 4 * n;
    let width = cfg.box_half_width / alpha_mag;

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(cfg.starts);
    starts.push(ghz_limit_beta_schedule(alpha_mag, n)?.to_flat());
    if cfg.starts > 1 {
        starts.push(vec![0.0; dim]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    while starts.len() < cfg.starts {
        starts.push((0..dim).map(|_| rng.gen_range(-width..=width)).collect());
    }

    let signed = |x: &[f64]| -> Result<f64> {
        let assign = DisplacementAssignment::from_flat(x)?;
        displaced_signal_sum(spec, &assign)
    };
    let step = 0.05 * width;

    let outcomes = parallel::map_collect(&starts, |start| -> Result<(StartTrace, Vec<f64>)> {
        let mut best_value = f64::NEG_INFINITY;
        let mut best_x = start.clone();
        let mut iterations = 0;
        let mut converged = false;
        for sign in [1.0f64, -1.0] {
            let minus = |x: &[f64]| signed(x).map(|v| -sign * v);
            let out = nelder_mead(&minus, start, step, cfg.tolerance, cfg.max_iters)?;
            let magnitude = signed(&out.x)?.abs();
            iterations += out.iterations;
            if magnitude > best_value {
                best_value = magnitude;
                best_x = out.x;
                converged = out.converged;
            }
        }
        let trace = StartTrace {
            start: start.clone(),
            value: best_value,
            iterations,
            converged,
        };
        Ok((trace, best_x))
    });

    let mut traces = Vec::with_capacity(cfg.starts);
    for outcome in outcomes {
        traces.push(outcome?);
    }

    let mut best_idx = 0;
    for (i, (trace, _)) in traces.iter().enumerate() {
        if trace.value > traces[best_idx].0.value {
            best_idx = i;
        }
    }
    let best_assignment = DisplacementAssignment::from_flat(&traces[best_idx].1)?;
    let best_value = traces[best_idx].0.value;
    let converged = traces[best_idx].0.converged;
    Ok(OptimizationResult {
        best_value,
        best_assignment,
        traces: traces.into_iter().map(|(t, _)| t).collect(),
        converged,
    })
}
