//! One-dimensional absolute-loss problems on `[-1, 1]` where MetaGrad's
//! regret grows logarithmically and first-order methods pay `sqrt(T)`.

use std::fmt;
use std::str::FromStr;

use metagrad::{AdaGradDiag, Domain, DomainShape, MetaGradFull, Ogd, OgdRate, OnlineLearner};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BenchError, Result};

pub const METAGRAD_SIGMA: f64 = 1.0;
pub const ADAGRAD_SIGMA: f64 = std::f64::consts::SQRT_2;
/// Probability of the outcome `+1/2` in the stochastic problem.
pub const P_POSITIVE: f64 = 0.6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimKind {
    /// `f(w) = |w - 1/4|` every round.
    OfflineAbs,
    /// `f_t(w) = |w - x_t|` with `x_t = +1/2` w.p. 0.6 and `-1/2` otherwise.
    StochasticAbs,
}

impl SimKind {
    pub fn comparator(self) -> f64 {
        match self {
            SimKind::OfflineAbs => 0.25,
            SimKind::StochasticAbs => 0.5,
        }
    }
}

impl fmt::Display for SimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimKind::OfflineAbs => "offline_abs",
            SimKind::StochasticAbs => "stochastic_abs",
        })
    }
}

impl FromStr for SimKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "offline_abs" => Ok(SimKind::OfflineAbs),
            "stochastic_abs" => Ok(SimKind::StochasticAbs),
            other => Err(BenchError::Config(format!(
                "unknown simulation {other:?} (offline_abs|stochastic_abs)"
            ))),
        }
    }
}

/// Cumulative regret after each round.
#[derive(Clone, Debug)]
pub struct SimCurves {
    pub kind: SimKind,
    pub seed: u64,
    pub metagrad: Vec<f64>,
    pub adagrad: Vec<f64>,
    pub ogdnorm: Vec<f64>,
}

impl SimCurves {
    pub fn rounds(&self) -> usize {
        self.metagrad.len()
    }
}

/// Subgradient of `|r|`, taking the right derivative `+1` at the kink so
/// gradient norms never vanish.
fn subgradient(r: f64) -> f64 {
    if r < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn play(
    learner: &mut dyn OnlineLearner,
    dom: &Domain,
    targets: &[f64],
    u: f64,
) -> Result<Vec<f64>> {
    let mut total = 0.0;
    let mut curve = Vec::with_capacity(targets.len());
    for &a in targets {
        let w = learner.predict(dom)?[0];
        total += (w - a).abs() - (u - a).abs();
        curve.push(total);
        learner.update(&DVector::from_element(1, subgradient(w - a)), dom)?;
    }
    Ok(curve)
}

pub fn run_simulation(kind: SimKind, rounds: usize, seed: u64) -> Result<SimCurves> {
    let targets: Vec<f64> = match kind {
        SimKind::OfflineAbs => vec![0.25; rounds],
        SimKind::StochasticAbs => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..rounds)
                .map(|_| {
                    if rng.random_bool(P_POSITIVE) {
                        0.5
                    } else {
                        -0.5
                    }
                })
                .collect()
        }
    };
    let u = kind.comparator();
    let interval = Domain::uniform_box(1, 1.0);
    let ball = Domain::l2_ball(1.0);

    let mut mg = MetaGradFull::full(METAGRAD_SIGMA, 1, DomainShape::Box)?;
    let mut ada = AdaGradDiag::new(ADAGRAD_SIGMA, 1)?;
    let mut ogd = Ogd::new(OgdRate::NormAdaptive, ADAGRAD_SIGMA, 1)?;
    Ok(SimCurves {
        kind,
        seed,
        metagrad: play(&mut mg, &interval, &targets, u)?,
        adagrad: play(&mut ada, &interval, &targets, u)?,
        ogdnorm: play(&mut ogd, &ball, &targets, u)?,
    })
}
