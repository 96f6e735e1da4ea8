//! Full-matrix expert: continuous exponential weights with a Gaussian prior
//! on the quadratic surrogate loss. Keeps both the covariance and its
//! inverse so that projections and updates never need a factorization.

use nalgebra::{DMatrix, DVector};

use crate::controller::{EtaExpert, ExpertFactory};
use crate::domain::{shrink, Domain, DomainShape};
use crate::error::{Error, Result};

/// Number of rank-one updates between refreshes of the covariance from a
/// direct inverse of the precision matrix.
pub const REFRESH_PERIOD: u64 = 1 << 14;

#[derive(Clone, Debug)]
pub struct FullExpert {
    eta: f64,
    sigma: f64,
    wake_round: u64,
    /// Unprojected mean.
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    precision: DMatrix<f64>,
    updates: u64,
}

/// Domains on which the Mahalanobis projection has a closed form.
pub fn supports_domain(shape: DomainShape, dim: usize) -> bool {
    match shape {
        DomainShape::Slab => true,
        // a one-dimensional ball or box is an interval: clamping is exact
        DomainShape::L2Ball | DomainShape::Box => dim == 1,
    }
}

impl FullExpert {
    pub fn new(eta: f64, sigma: f64, dim: usize, wake_round: u64) -> Self {
        let s2 = sigma * sigma;
        FullExpert {
            eta,
            sigma,
            wake_round,
            mean: DVector::zeros(dim),
            covariance: DMatrix::identity(dim, dim) * s2,
            precision: DMatrix::identity(dim, dim) / s2,
            updates: 0,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn wake_round(&self) -> u64 {
        self.wake_round
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn set_mean(&mut self, mean: DVector<f64>) {
        self.mean = mean;
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    /// `argmin_{u in U} (u - mean)' Lambda (u - mean)`.
    pub fn project(&self, domain: &Domain) -> Result<DVector<f64>> {
        match domain {
            Domain::Slab { bound, direction } => {
                let excess = shrink(direction.dot(&self.mean), *bound);
                if excess == 0.0 {
                    return Ok(self.mean.clone());
                }
                let cx = &self.covariance * direction;
                let denom = direction.dot(&cx);
                if !(denom > 0.0) {
                    return Err(Error::Numerical {
                        round: 0,
                        message: format!("slab projection denominator {denom} is not positive"),
                    });
                }
                Ok(&self.mean - cx * (excess / denom))
            }
            _ if domain.contains(&self.mean, 0.0) => Ok(self.mean.clone()),
            _ if self.mean.len() == 1 => Ok(domain.project(&self.mean)),
            _ => Err(Error::Config(format!(
                "full-matrix projection onto {:?} is not supported in {} dimensions",
                domain.shape(),
                self.mean.len()
            ))),
        }
    }

    /// Sherman-Morrison update with the gradient observed at the
    /// controller's prediction.
    pub fn update(
        &mut self,
        g: &DVector<f64>,
        controller_prediction: &DVector<f64>,
        own_prediction: &DVector<f64>,
    ) {
        let eta = self.eta;
        let two_eta2 = 2.0 * eta * eta;
        let cg = &self.covariance * g;
        let denom = 1.0 + two_eta2 * g.dot(&cg);

        self.covariance.ger(-two_eta2 / denom, &cg, &cg, 1.0);
        symmetrize(&mut self.covariance);
        self.precision.ger(two_eta2, g, g, 1.0);
        self.updates += 1;
        if self.updates % REFRESH_PERIOD == 0 {
            self.refresh_covariance();
        }

        // Sigma_{t+1} g = Sigma_t g / (1 + 2 eta^2 g' Sigma_t g)
        let offset = (own_prediction - controller_prediction).dot(g);
        let step = (1.0 + 2.0 * eta * offset) * eta / denom;
        self.mean = own_prediction - cg * step;
    }

    /// Replaces the covariance with a direct inverse of the precision.
    pub fn refresh_covariance(&mut self) {
        if let Some(chol) = self.precision.clone().cholesky() {
            self.covariance = chol.inverse();
            symmetrize(&mut self.covariance);
        }
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

impl EtaExpert for FullExpert {
    type Point = DVector<f64>;
    type Domain = Domain;

    fn eta(&self) -> f64 {
        self.eta
    }

    fn predict(&mut self, domain: &Domain, round: u64) -> Result<DVector<f64>> {
        self.project(domain).map_err(|e| match e {
            Error::Numerical { message, .. } => Error::Numerical { round, message },
            other => other,
        })
    }

    fn update(
        &mut self,
        grad: &DVector<f64>,
        controller_prediction: &DVector<f64>,
        own_prediction: &DVector<f64>,
        _round: u64,
    ) -> Result<()> {
        FullExpert::update(self, grad, controller_prediction, own_prediction);
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FullExpertFactory {
    pub sigma: f64,
    pub dim: usize,
}

impl FullExpertFactory {
    pub fn new(sigma: f64, dim: usize, shape: DomainShape) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Config(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !supports_domain(shape, dim) {
            return Err(Error::Config(format!(
                "MetaGrad Full needs a slab domain (or an interval in 1-D), got {shape:?} in {dim} dimensions"
            )));
        }
        Ok(FullExpertFactory { sigma, dim })
    }
}

impl ExpertFactory for FullExpertFactory {
    type Expert = FullExpert;

    fn spawn(&self, eta: f64, wake_round: u64) -> FullExpert {
        FullExpert::new(eta, self.sigma, self.dim, wake_round)
    }
}
