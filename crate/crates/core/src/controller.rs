//! The MetaGrad controller.
//!
//! The controller runs a sleeping-experts exponential-weights algorithm over
//! learning rates `eta = 2^i`. Each round it
//!
//! 1. recomputes the active exponents from the running gradient-size
//!    statistics, spawning experts that just woke up and dropping the ones
//!    that expired,
//! 2. asks every active expert for a projected prediction and aggregates them
//!    with weights tilted by `eta`,
//! 3. on feedback, updates every expert with the unclipped gradient and then
//!    either applies exponential weights on the clipped surrogate losses or
//!    resets all weights to one when the gradient size jumped.
//!
//! Weights are stored as logarithms. Experts are kept sorted by exponent; the
//! active interval only ever slides towards smaller learning rates, so each
//! expert lives for one contiguous run of rounds.

use std::fmt::Debug;
use std::ops::RangeInclusive;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::parallel::Execution;

/// Smallest and largest binary exponents representable as an `f64`.
pub const MIN_EXPONENT: i32 = -1074;
pub const MAX_EXPONENT: i32 = 1023;

/// Vector-space operations the controller needs on predictions.
pub trait Iterate: Clone + Debug + Send + Sync {
    fn dot(&self, other: &Self) -> f64;
    /// `self += alpha * x`
    fn axpy(&mut self, alpha: f64, x: &Self);
    fn scale_mut(&mut self, alpha: f64);
    fn zeroed(&self) -> Self;
    fn is_finite(&self) -> bool;
}

impl Iterate for f64 {
    fn dot(&self, other: &Self) -> f64 {
        self * other
    }
    fn axpy(&mut self, alpha: f64, x: &Self) {
        *self += alpha * x;
    }
    fn scale_mut(&mut self, alpha: f64) {
        *self *= alpha;
    }
    fn zeroed(&self) -> Self {
        0.0
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Iterate for DVector<f64> {
    fn dot(&self, other: &Self) -> f64 {
        nalgebra::Matrix::dot(self, other)
    }
    fn axpy(&mut self, alpha: f64, x: &Self) {
        nalgebra::Matrix::axpy(self, alpha, x, 1.0);
    }
    fn scale_mut(&mut self, alpha: f64) {
        *self *= alpha;
    }
    fn zeroed(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

/// One learning rate's sub-algorithm.
pub trait EtaExpert: Send {
    type Point: Iterate;
    type Domain: Sync + ?Sized;

    fn eta(&self) -> f64;

    /// Projects the expert's mean onto this round's domain.
    fn predict(&mut self, domain: &Self::Domain, round: u64) -> Result<Self::Point>;

    /// Feeds the gradient observed at the controller's prediction.
    fn update(
        &mut self,
        grad: &Self::Point,
        controller_prediction: &Self::Point,
        own_prediction: &Self::Point,
        round: u64,
    ) -> Result<()>;
}

/// Creates fresh experts when their learning rate becomes active.
pub trait ExpertFactory: Send + Sync {
    type Expert: EtaExpert;

    fn spawn(&self, eta: f64, wake_round: u64) -> Self::Expert;
}

type PointOf<F> = <<F as ExpertFactory>::Expert as EtaExpert>::Point;
type DomainOf<F> = <<F as ExpertFactory>::Expert as EtaExpert>::Domain;

/// `2^exponent` built from its bit pattern, exact over the whole `f64` range.
pub fn pow2(exponent: i32) -> f64 {
    assert!(
        (MIN_EXPONENT..=MAX_EXPONENT).contains(&exponent),
        "exponent {exponent} outside the f64 range"
    );
    if exponent >= -1022 {
        f64::from_bits(((exponent + 1023) as u64) << 52)
    } else {
        f64::from_bits(1u64 << (exponent + 1074))
    }
}

/// `floor(log2(x))` for finite `x > 0`, exact.
pub fn floor_log2(x: f64) -> i32 {
    debug_assert!(x > 0.0 && x.is_finite());
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    if biased == 0 {
        let mantissa = bits & ((1u64 << 52) - 1);
        63 - mantissa.leading_zeros() as i32 - 1074
    } else {
        biased - 1023
    }
}

/// Grid exponents `i` with `lower < 2^i <= upper`, or `None` when empty.
pub fn grid_points_in(lower: f64, upper: f64) -> Option<RangeInclusive<i32>> {
    if !(upper > 0.0) {
        return None;
    }
    let hi = if upper.is_infinite() {
        MAX_EXPONENT
    } else {
        floor_log2(upper).min(MAX_EXPONENT)
    };
    let lo = if lower > 0.0 {
        if lower.is_infinite() {
            return None;
        }
        floor_log2(lower) + 1
    } else {
        MIN_EXPONENT
    };
    (lo <= hi).then_some(lo..=hi)
}

/// `eta r + (eta r)^2`, where `r = (u - w_t)·g`.
pub fn surrogate_loss(eta: f64, r: f64) -> f64 {
    let er = eta * r;
    er + er * er
}

/// The factor `B_{t-1} / B_t` that turns `g_t` into the clipped gradient,
/// with `0/0 = 0`.
pub fn clip_factor(b_prev: f64, b_cur: f64) -> f64 {
    if b_cur > 0.0 {
        b_prev / b_cur
    } else {
        0.0
    }
}

pub fn clip_gradient(g: &DVector<f64>, b_prev: f64, b_cur: f64) -> DVector<f64> {
    g * clip_factor(b_prev, b_cur)
}

/// Exponential-weights step on log-weights that keeps the total mass
/// `sum exp(log_weights)` unchanged.
pub fn update_log_weights(log_weights: &mut [f64], losses: &[f64]) {
    assert_eq!(log_weights.len(), losses.len());
    if log_weights.is_empty() {
        return;
    }
    let before = log_sum_exp(log_weights.iter().copied());
    for (lw, loss) in log_weights.iter_mut().zip(losses) {
        *lw -= loss;
    }
    let after = log_sum_exp(log_weights.iter().copied());
    let shift = before - after;
    for lw in log_weights.iter_mut() {
        *lw += shift;
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Tilted average `sum p eta w / sum p eta` of `(log p, eta, w)` triples.
pub fn tilted_average<P: Iterate>(origin: &P, entries: &[(f64, f64, &P)]) -> P {
    if entries.is_empty() {
        return origin.zeroed();
    }
    let log_tilt = |lw: f64, eta: f64| lw + eta.ln();
    let max = entries
        .iter()
        .map(|&(lw, eta, _)| log_tilt(lw, eta))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut acc = origin.zeroed();
    let mut total = 0.0;
    for &(lw, eta, w) in entries {
        let weight = (log_tilt(lw, eta) - max).exp();
        acc.axpy(weight, w);
        total += weight;
    }
    acc.scale_mut(1.0 / total);
    acc
}

/// The epoch reset test `B_t > B_tau * sum_{s<=t} b_s / B_s`.
pub fn reset_condition(b_cur: f64, epoch_anchor: f64, reset_sum: f64) -> bool {
    b_cur > epoch_anchor * reset_sum
}

struct Slot<E: EtaExpert> {
    exponent: i32,
    eta: f64,
    log_weight: f64,
    expert: E,
    prediction: Option<E::Point>,
}

/// What happened during the feedback half of a round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundOutcome {
    pub reset: bool,
    pub active: usize,
    pub b: f64,
}

/// Snapshot of the controller's scalar state, for inspection and tests.
#[derive(Clone, Debug, PartialEq)]
pub struct ControllerStats {
    pub round: u64,
    pub b_prev: f64,
    pub wake_sum: f64,
    pub reset_sum: f64,
    pub epoch_anchor: f64,
    pub resets: u64,
    pub max_active: usize,
}

pub struct Controller<F: ExpertFactory> {
    factory: F,
    origin: PointOf<F>,
    slots: Vec<Slot<F::Expert>>,
    /// `B_{t-1}` while a round is in progress.
    b_prev: f64,
    /// `sum_{s<t} b_s B_{s-1} / B_s`
    wake_sum: f64,
    /// `sum_{s<=t} b_s / B_s`
    reset_sum: f64,
    /// `B_tau` at the start of the current epoch.
    epoch_anchor: f64,
    round: u64,
    resets: u64,
    max_active: usize,
    pending: Option<PointOf<F>>,
    execution: Execution,
}

impl<F: ExpertFactory> Controller<F> {
    /// `origin` is the zero point of the prediction space; it fixes the
    /// dimension and is the default prediction while no expert is active.
    pub fn new(factory: F, origin: PointOf<F>) -> Self {
        Controller {
            factory,
            origin: origin.zeroed(),
            slots: Vec::new(),
            b_prev: 0.0,
            wake_sum: 0.0,
            reset_sum: 0.0,
            epoch_anchor: 0.0,
            round: 0,
            resets: 0,
            max_active: 0,
            pending: None,
            execution: Execution::Sequential,
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn set_execution(&mut self, execution: Execution) {
        self.execution = execution;
    }

    pub fn factory(&self) -> &F {
        &self.factory
    }

    /// Active exponents for the next round to be played.
    pub fn active_set(&self) -> Option<RangeInclusive<i32>> {
        if self.b_prev <= 0.0 {
            return None;
        }
        let upper = 1.0 / (2.0 * self.b_prev);
        let lower = 1.0 / (2.0 * (self.wake_sum + self.b_prev));
        grid_points_in(lower, upper)
    }

    /// Exponents currently holding an expert.
    pub fn live_exponents(&self) -> Vec<i32> {
        self.slots.iter().map(|s| s.exponent).collect()
    }

    /// `(exponent, weight)` pairs of the live experts.
    pub fn weights(&self) -> Vec<(i32, f64)> {
        self.slots
            .iter()
            .map(|s| (s.exponent, s.log_weight.exp()))
            .collect()
    }

    pub fn experts(&self) -> impl Iterator<Item = (i32, &F::Expert)> {
        self.slots.iter().map(|s| (s.exponent, &s.expert))
    }

    pub fn stats(&self) -> ControllerStats {
        ControllerStats {
            round: self.round,
            b_prev: self.b_prev,
            wake_sum: self.wake_sum,
            reset_sum: self.reset_sum,
            epoch_anchor: self.epoch_anchor,
            resets: self.resets,
            max_active: self.max_active,
        }
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Largest range bound seen so far, `B_t`.
    pub fn max_range(&self) -> f64 {
        self.b_prev
    }

    pub fn active_len(&self) -> usize {
        self.slots.len()
    }

    fn sync_active_set(&mut self) {
        let Some(range) = self.active_set() else {
            self.slots.clear();
            return;
        };
        self.slots.retain(|s| range.contains(&s.exponent));
        let (lo, hi) = (*range.start(), *range.end());
        // existing slots form a contiguous block; new rates only join below
        // it, but handle the general case anyway
        let mut next = Vec::with_capacity((hi - lo + 1) as usize);
        let mut old = std::mem::take(&mut self.slots).into_iter().peekable();
        for exponent in lo..=hi {
            match old.peek() {
                Some(slot) if slot.exponent == exponent => next.push(old.next().unwrap()),
                _ => {
                    let eta = pow2(exponent);
                    next.push(Slot {
                        exponent,
                        eta,
                        log_weight: 0.0,
                        expert: self.factory.spawn(eta, self.round),
                        prediction: None,
                    });
                }
            }
        }
        self.slots = next;
    }

    /// First half of a round: returns the controller's prediction.
    pub fn predict(&mut self, domain: &DomainOf<F>) -> Result<PointOf<F>> {
        if self.pending.is_some() {
            return Err(Error::InvalidInput(
                "predict called twice without an update".into(),
            ));
        }
        self.round += 1;
        let round = self.round;
        self.sync_active_set();
        self.max_active = self.max_active.max(self.slots.len());

        let predictions = self
            .execution
            .map_mut(&mut self.slots, |slot| slot.expert.predict(domain, round));
        for (slot, prediction) in self.slots.iter_mut().zip(predictions) {
            slot.prediction = Some(prediction?);
        }

        let entries: Vec<(f64, f64, &PointOf<F>)> = self
            .slots
            .iter()
            .map(|s| (s.log_weight, s.eta, s.prediction.as_ref().unwrap()))
            .collect();
        let prediction = tilted_average(&self.origin, &entries);
        if !prediction.is_finite() {
            return Err(Error::Numerical {
                round,
                message: "non-finite controller prediction".into(),
            });
        }
        self.pending = Some(prediction.clone());
        Ok(prediction)
    }

    /// Second half of a round: the gradient at the controller's prediction
    /// and its range bound `b_t`.
    pub fn update(&mut self, grad: &PointOf<F>, b: f64) -> Result<RoundOutcome> {
        let round = self.round;
        let Some(prediction) = self.pending.take() else {
            return Err(Error::InvalidInput("update called before predict".into()));
        };
        if !(b >= 0.0) || !b.is_finite() || !grad.is_finite() {
            return Err(Error::Numerical {
                round,
                message: format!("invalid gradient or range bound (b = {b})"),
            });
        }
        let b_prev = self.b_prev;
        let b_cur = b_prev.max(b);
        let clip = clip_factor(b_prev, b_cur);

        let base = prediction.dot(grad);
        let clipped_losses: Vec<f64> = self
            .slots
            .iter()
            .map(|s| {
                let own = s.prediction.as_ref().unwrap();
                let r = clip * (own.dot(grad) - base);
                surrogate_loss(s.eta, r)
            })
            .collect();

        let results = self.execution.map_mut(&mut self.slots, |slot| {
            let own = slot.prediction.take().unwrap();
            slot.expert.update(grad, &prediction, &own, round)
        });
        results.into_iter().collect::<Result<()>>()?;

        if b_cur > 0.0 {
            self.wake_sum += b * b_prev / b_cur;
            self.reset_sum += b / b_cur;
        }
        let reset = reset_condition(b_cur, self.epoch_anchor, self.reset_sum);
        if reset {
            for slot in &mut self.slots {
                slot.log_weight = 0.0;
            }
            self.epoch_anchor = b_cur;
            self.resets += 1;
        } else {
            let mut log_weights: Vec<f64> = self.slots.iter().map(|s| s.log_weight).collect();
            update_log_weights(&mut log_weights, &clipped_losses);
            for (slot, lw) in self.slots.iter_mut().zip(log_weights) {
                slot.log_weight = lw;
            }
        }
        self.b_prev = b_cur;

        Ok(RoundOutcome {
            reset,
            active: self.slots.len(),
            b,
        })
    }
}
