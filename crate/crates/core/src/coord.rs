//! Coordinate-wise MetaGrad: an independent one-dimensional MetaGrad per
//! coordinate on a rectangular domain, each fed the linear loss `w g_i`.
//!
//! The linearized regret splits over coordinates, so the joint run is just
//! the concatenation of `d` scalar runs. Scalar experts store plain `f64`s.

use nalgebra::DVector;

use crate::controller::{Controller, EtaExpert, ExpertFactory, RoundOutcome};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::expert::full::REFRESH_PERIOD;
use crate::parallel::Execution;

/// The interval `[-half_width, half_width]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub half_width: f64,
}

/// `max_{|w| <= D} |(w - w_i) g_i| = (D + |w_i|) |g_i|`.
pub fn coord_range_bound(half_width: f64, w: f64, g: f64) -> f64 {
    (half_width + w.abs()) * g.abs()
}

/// One-dimensional full-matrix expert with scalar state.
#[derive(Clone, Debug)]
pub struct ScalarExpert {
    eta: f64,
    sigma: f64,
    wake_round: u64,
    mean: f64,
    covariance: f64,
    precision: f64,
    updates: u64,
}

impl ScalarExpert {
    pub fn new(eta: f64, sigma: f64, wake_round: u64) -> Self {
        let s2 = sigma * sigma;
        ScalarExpert {
            eta,
            sigma,
            wake_round,
            mean: 0.0,
            covariance: s2,
            precision: 1.0 / s2,
            updates: 0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn covariance(&self) -> f64 {
        self.covariance
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn wake_round(&self) -> u64 {
        self.wake_round
    }

    pub fn project(&self, interval: Interval) -> f64 {
        self.mean.clamp(-interval.half_width, interval.half_width)
    }

    pub fn update(&mut self, g: f64, controller_prediction: f64, own_prediction: f64) {
        let eta = self.eta;
        let two_eta2 = 2.0 * eta * eta;
        let cg = self.covariance * g;
        let denom = 1.0 + two_eta2 * (g * cg);
        self.covariance += (-two_eta2 / denom) * cg * cg;
        self.precision += two_eta2 * g * g;
        self.updates += 1;
        if self.updates % REFRESH_PERIOD == 0 {
            self.covariance = 1.0 / self.precision;
        }
        let offset = (own_prediction - controller_prediction) * g;
        let step = (1.0 + 2.0 * eta * offset) * eta / denom;
        self.mean = own_prediction - cg * step;
    }
}

impl EtaExpert for ScalarExpert {
    type Point = f64;
    type Domain = Interval;

    fn eta(&self) -> f64 {
        self.eta
    }

    fn predict(&mut self, domain: &Interval, _round: u64) -> Result<f64> {
        Ok(self.project(*domain))
    }

    fn update(&mut self, grad: &f64, controller: &f64, own: &f64, _round: u64) -> Result<()> {
        ScalarExpert::update(self, *grad, *controller, *own);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScalarExpertFactory {
    pub sigma: f64,
}

impl ExpertFactory for ScalarExpertFactory {
    type Expert = ScalarExpert;

    fn spawn(&self, eta: f64, wake_round: u64) -> ScalarExpert {
        ScalarExpert::new(eta, self.sigma, wake_round)
    }
}

/// MetaGrad on an interval `[-D, D]` with scalar experts.
pub struct ScalarMetaGrad {
    controller: Controller<ScalarExpertFactory>,
    interval: Interval,
    prediction: Option<f64>,
}

impl ScalarMetaGrad {
    pub fn new(sigma: f64, half_width: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Config(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !(half_width >= 0.0) {
            return Err(Error::Config(format!(
                "half width must be nonnegative, got {half_width}"
            )));
        }
        Ok(ScalarMetaGrad {
            controller: Controller::new(ScalarExpertFactory { sigma }, 0.0),
            interval: Interval { half_width },
            prediction: None,
        })
    }

    pub fn controller(&self) -> &Controller<ScalarExpertFactory> {
        &self.controller
    }

    /// Changes the interval used from the next prediction on.
    pub fn set_half_width(&mut self, half_width: f64) {
        self.interval = Interval { half_width };
    }

    pub fn half_width(&self) -> f64 {
        self.interval.half_width
    }

    pub fn predict(&mut self) -> Result<f64> {
        let w = self.controller.predict(&self.interval)?;
        self.prediction = Some(w);
        Ok(w)
    }

    /// Feeds the derivative of this round's scalar loss at the prediction.
    pub fn update(&mut self, g: f64) -> Result<RoundOutcome> {
        let w = self
            .prediction
            .take()
            .ok_or_else(|| Error::InvalidInput("update called before predict".into()))?;
        let b = coord_range_bound(self.interval.half_width, w, g);
        self.controller.update(&g, b)
    }
}

/// Joint state of `d` independent scalar MetaGrad instances.
pub struct CoordMetaGrad {
    dims: Vec<ScalarMetaGrad>,
    prediction: Option<DVector<f64>>,
    execution: Execution,
}

impl CoordMetaGrad {
    pub fn new(sigma: f64, half_widths: &DVector<f64>) -> Result<Self> {
        let dims = half_widths
            .iter()
            .map(|&d| ScalarMetaGrad::new(sigma, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoordMetaGrad {
            execution: Execution::auto(dims.len() * 64),
            dims,
            prediction: None,
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn set_execution(&mut self, execution: Execution) {
        self.execution = execution;
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn coordinate(&self, i: usize) -> &ScalarMetaGrad {
        &self.dims[i]
    }

    /// Predicts on the box `|w_i| <= half_widths[i]`.
    pub fn predict_box(&mut self, half_widths: &DVector<f64>) -> Result<DVector<f64>> {
        if half_widths.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                got: half_widths.len(),
            });
        }
        let widths: Vec<f64> = half_widths.iter().copied().collect();
        let preds = self
            .execution
            .zip_map_mut(&mut self.dims, &widths, |inst, &d| {
                inst.set_half_width(d);
                inst.predict()
            });
        let w = DVector::from_iterator(
            self.dims.len(),
            preds.into_iter().collect::<Result<Vec<_>>>()?,
        );
        self.prediction = Some(w.clone());
        Ok(w)
    }

    pub fn predict(&mut self, domain: &Domain) -> Result<DVector<f64>> {
        match domain {
            Domain::Box { half_widths } => self.predict_box(half_widths),
            other => Err(Error::Config(format!(
                "coordinate MetaGrad needs a box domain, got {:?}",
                other.shape()
            ))),
        }
    }

    /// Returns the per-coordinate round outcomes.
    pub fn update(&mut self, g: &DVector<f64>) -> Result<Vec<RoundOutcome>> {
        if g.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                got: g.len(),
            });
        }
        if self.prediction.take().is_none() {
            return Err(Error::InvalidInput("update called before predict".into()));
        }
        let grads: Vec<f64> = g.iter().copied().collect();
        self.execution
            .zip_map_mut(&mut self.dims, &grads, |inst, &gi| inst.update(gi))
            .into_iter()
            .collect()
    }

    pub fn resets(&self) -> u64 {
        self.dims.iter().map(|d| d.controller.stats().resets).sum()
    }

    pub fn max_active(&self) -> usize {
        self.dims
            .iter()
            .map(|d| d.controller.stats().max_active)
            .max()
            .unwrap_or(0)
    }
}
