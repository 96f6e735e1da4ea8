//! One sequential pass of an algorithm over a dataset, with regret
//! accounting against the offline comparator.

use std::time::Instant;

use metagrad::data::{Dataset, Task};
use metagrad::{Domain, LossKind};
use nalgebra::DVector;

use crate::algo::{
    build_learner, fixed_domain, size_domains, theoretical_sigma, Algorithm, DomainSizes,
};
use crate::bound::RegretTrace;
use crate::comparator::{cumulative_loss, solve_comparator, SolverOptions};
use crate::error::{BenchError, Result};

/// Comparator violations below this are clipped away; larger ones are errors.
const COMPARATOR_SLACK: f64 = 1e-6;

/// A dataset together with its comparator and domain sizes.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub dataset: Dataset,
    pub loss: LossKind,
    pub comparator: DVector<f64>,
    pub comparator_loss: f64,
    pub sizes: DomainSizes,
}

pub fn prepare(dataset: Dataset, loss: LossKind, solver: &SolverOptions) -> Result<Prepared> {
    let classification = dataset.task == Task::Classification;
    if loss.is_classification() != classification {
        return Err(BenchError::Config(format!(
            "loss {loss} does not fit the {:?} task of {}",
            dataset.task, dataset.name
        )));
    }
    let comparator = solve_comparator(&dataset, loss, solver)?;
    Ok(with_comparator(dataset, loss, comparator))
}

/// Uses a given comparator instead of solving for one.
pub fn with_comparator(dataset: Dataset, loss: LossKind, comparator: DVector<f64>) -> Prepared {
    let sizes = size_domains(&comparator, &dataset.xs);
    let comparator_loss = cumulative_loss(&dataset, loss, &comparator);
    Prepared {
        dataset,
        loss,
        comparator,
        comparator_loss,
        sizes,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Multiplier on the theoretical sigma.
    pub sigma_factor: f64,
    /// Recorded only; every algorithm is deterministic.
    pub seed: u64,
    /// Keep sufficient statistics for the regret-bound check.
    pub diagnostics: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            sigma_factor: 1.0,
            seed: 0,
            diagnostics: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub dataset: String,
    pub loss: LossKind,
    pub algo: Algorithm,
    pub sigma_factor: f64,
    pub sigma: f64,
    pub rounds: usize,
    pub dim: usize,
    pub regret: f64,
    pub lin_regret: f64,
    pub v_t: f64,
    pub b_t: f64,
    pub resets: u64,
    pub max_active: usize,
    pub wallclock_ms: f64,
    pub seed: u64,
    /// `f_t(w_t)` per round.
    pub losses: Vec<f64>,
    pub comparator_loss: f64,
    /// Number of active learning rates per round; zero for baselines.
    pub active_trace: Vec<u32>,
    pub trace: Option<RegretTrace>,
}

pub fn run_experiment(prep: &Prepared, algo: Algorithm, opts: &RunOptions) -> Result<RunRecord> {
    let ds = &prep.dataset;
    let dim = ds.dim();
    let u = &prep.comparator;
    let sigma = opts.sigma_factor * theoretical_sigma(algo, u);
    let mut learner = build_learner(algo, sigma, dim, &prep.sizes)?;
    let fixed = fixed_domain(algo, &prep.sizes, dim);
    let u_fixed = match &fixed {
        Some(dom) => Some(feasible_comparator(dom, u, 0)?),
        None => None,
    };
    let mut trace = if opts.diagnostics {
        Some(RegretTrace::new(dim)?)
    } else {
        None
    };

    let start = Instant::now();
    let mut losses = Vec::with_capacity(ds.len());
    let mut active_trace = Vec::with_capacity(ds.len());
    let (mut regret, mut lin_regret, mut v_t, mut b_t) = (0.0, 0.0, 0.0, 0.0f64);
    let mut slab;
    for (t, (x, &y)) in ds.xs.iter().zip(&ds.ys).enumerate() {
        let dom = match &fixed {
            Some(d) => d,
            None => {
                slab = Domain::slab(prep.sizes.c, x.clone());
                &slab
            }
        };
        let u_t = match &u_fixed {
            Some(v) => v.clone(),
            None => feasible_comparator(dom, u, t + 1)?,
        };
        let w = learner.predict(dom)?;
        let f = prep.loss.value(&w, x, y)?;
        let g = prep.loss.gradient(&w, x, y)?;
        let b = dom.range_bound(&w, &g)?;
        learner.update(&g, dom)?;
        active_trace.push(learner.active_len() as u32);

        regret += f - prep.loss.value(&u_t, x, y)?;
        let r = (&w - &u_t).dot(&g);
        lin_regret += r;
        v_t += r * r;
        b_t = b_t.max(b);
        losses.push(f);
        if let Some(tr) = trace.as_mut() {
            tr.push(&w, &g, b)?;
        }
    }
    Ok(RunRecord {
        dataset: ds.name.clone(),
        loss: prep.loss,
        algo,
        sigma_factor: opts.sigma_factor,
        sigma,
        rounds: ds.len(),
        dim,
        regret,
        lin_regret,
        v_t,
        b_t,
        resets: learner.resets(),
        max_active: learner.max_active(),
        wallclock_ms: start.elapsed().as_secs_f64() * 1e3,
        seed: opts.seed,
        losses,
        comparator_loss: prep.comparator_loss,
        active_trace,
        trace,
    })
}

fn feasible_comparator(dom: &Domain, u: &DVector<f64>, round: usize) -> Result<DVector<f64>> {
    if dom.contains(u, 0.0) {
        Ok(u.clone())
    } else if dom.contains(u, COMPARATOR_SLACK) {
        Ok(dom.project(u))
    } else {
        Err(BenchError::Numerical(format!(
            "comparator lies outside the domain in round {round}"
        )))
    }
}

/// Runs every sigma factor and returns the records in grid order.
pub fn run_sweep(
    prep: &Prepared,
    algo: Algorithm,
    factors: &[f64],
    seed: u64,
) -> Result<Vec<RunRecord>> {
    let exec = metagrad::Execution::auto(usize::MAX);
    exec.map(factors, |&sigma_factor| {
        run_experiment(
            prep,
            algo,
            &RunOptions {
                sigma_factor,
                seed,
                diagnostics: false,
            },
        )
    })
    .into_iter()
    .collect()
}
