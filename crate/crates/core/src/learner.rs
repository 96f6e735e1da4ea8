//! Uniform predict/update interface over every algorithm in the crate, with
//! MetaGrad deriving its range bounds from the round's domain.

use nalgebra::DVector;

use crate::baselines::{AdaGradDiag, Ogd};
use crate::controller::{Controller, EtaExpert, ExpertFactory, RoundOutcome};
use crate::coord::CoordMetaGrad;
use crate::domain::{Domain, DomainShape};
use crate::error::{Error, Result};
use crate::expert::{FullExpertFactory, SketchedExpertFactory};
use crate::parallel::Execution;

/// A learner playing `w_t` on the round's domain, then seeing `g_t`.
pub trait OnlineLearner: Send {
    fn predict(&mut self, domain: &Domain) -> Result<DVector<f64>>;

    /// `domain` must be the one passed to the preceding `predict`.
    fn update(&mut self, grad: &DVector<f64>, domain: &Domain) -> Result<()>;

    fn resets(&self) -> u64 {
        0
    }

    /// Largest number of simultaneously active learning rates so far.
    fn max_active(&self) -> usize {
        0
    }

    /// Learning rates active in the last round played.
    fn active_len(&self) -> usize {
        0
    }
}

/// MetaGrad over dense vectors with any expert type.
pub struct MetaGrad<F: ExpertFactory> {
    controller: Controller<F>,
    prediction: Option<DVector<f64>>,
    last: Option<RoundOutcome>,
}

pub type MetaGradFull = MetaGrad<FullExpertFactory>;
pub type MetaGradSketch = MetaGrad<SketchedExpertFactory>;

impl<F> MetaGrad<F>
where
    F: ExpertFactory,
    F::Expert: EtaExpert<Point = DVector<f64>, Domain = Domain>,
{
    pub fn from_factory(factory: F, dim: usize) -> Self {
        MetaGrad {
            controller: Controller::new(factory, DVector::zeros(dim)),
            prediction: None,
            last: None,
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.controller.set_execution(execution);
        self
    }

    pub fn controller(&self) -> &Controller<F> {
        &self.controller
    }

    pub fn last_outcome(&self) -> Option<&RoundOutcome> {
        self.last.as_ref()
    }
}

impl MetaGradFull {
    pub fn full(sigma: f64, dim: usize, shape: DomainShape) -> Result<Self> {
        let factory = FullExpertFactory::new(sigma, dim, shape)?;
        // about 16 live rates, each O(d^2)
        Ok(MetaGrad::from_factory(factory, dim).with_execution(Execution::auto(16 * dim * dim)))
    }
}

impl MetaGradSketch {
    pub fn sketched(sigma: f64, m: usize, dim: usize) -> Result<Self> {
        let factory = SketchedExpertFactory::new(sigma, m, dim, DomainShape::Slab)?;
        Ok(MetaGrad::from_factory(factory, dim).with_execution(Execution::auto(16 * m * dim)))
    }
}

impl<F> OnlineLearner for MetaGrad<F>
where
    F: ExpertFactory,
    F::Expert: EtaExpert<Point = DVector<f64>, Domain = Domain>,
{
    fn predict(&mut self, domain: &Domain) -> Result<DVector<f64>> {
        let w = self.controller.predict(domain)?;
        self.prediction = Some(w.clone());
        Ok(w)
    }

    fn update(&mut self, grad: &DVector<f64>, domain: &Domain) -> Result<()> {
        let w = self
            .prediction
            .take()
            .ok_or_else(|| Error::InvalidInput("update called before predict".into()))?;
        let b = domain.range_bound(&w, grad).map_err(|e| match e {
            Error::InvalidInput(message) => Error::Numerical {
                round: self.controller.round(),
                message,
            },
            other => other,
        })?;
        self.last = Some(self.controller.update(grad, b)?);
        Ok(())
    }

    fn resets(&self) -> u64 {
        self.controller.stats().resets
    }

    fn max_active(&self) -> usize {
        self.controller.stats().max_active
    }

    fn active_len(&self) -> usize {
        self.controller.active_len()
    }
}

impl OnlineLearner for CoordMetaGrad {
    fn predict(&mut self, domain: &Domain) -> Result<DVector<f64>> {
        CoordMetaGrad::predict(self, domain)
    }

    fn update(&mut self, grad: &DVector<f64>, _domain: &Domain) -> Result<()> {
        CoordMetaGrad::update(self, grad).map(|_| ())
    }

    fn resets(&self) -> u64 {
        CoordMetaGrad::resets(self)
    }

    fn max_active(&self) -> usize {
        CoordMetaGrad::max_active(self)
    }

    fn active_len(&self) -> usize {
        (0..self.dim())
            .map(|i| self.coordinate(i).controller().active_len())
            .max()
            .unwrap_or(0)
    }
}

impl OnlineLearner for Ogd {
    fn predict(&mut self, _domain: &Domain) -> Result<DVector<f64>> {
        Ok(Ogd::predict(self))
    }

    fn update(&mut self, grad: &DVector<f64>, domain: &Domain) -> Result<()> {
        Ogd::update(self, grad, domain)
    }
}

impl OnlineLearner for AdaGradDiag {
    fn predict(&mut self, _domain: &Domain) -> Result<DVector<f64>> {
        Ok(AdaGradDiag::predict(self))
    }

    fn update(&mut self, grad: &DVector<f64>, domain: &Domain) -> Result<()> {
        AdaGradDiag::update(self, grad, domain)
    }
}
