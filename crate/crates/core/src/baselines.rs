//! First-order baselines in mirror-descent form: projected OGD with a
//! time-decreasing or norm-adaptive step size, and diagonal AdaGrad.
//! A step whose rate would be `0/0` (no gradient mass yet) is skipped.

use nalgebra::DVector;

use crate::domain::Domain;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OgdRate {
    /// `sigma / (sqrt(t) max_{s<=t} |g_s|)`
    TimeDecreasing,
    /// `sigma / sqrt(sum_{s<=t} |g_s|^2)`
    NormAdaptive,
}

/// Projected online gradient descent on a Euclidean ball.
#[derive(Clone, Debug)]
pub struct Ogd {
    rate: OgdRate,
    sigma: f64,
    w: DVector<f64>,
    grad_sq_sum: f64,
    max_grad_norm: f64,
    round: u64,
}

impl Ogd {
    pub fn new(rate: OgdRate, sigma: f64, dim: usize) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Ogd {
            rate,
            sigma,
            w: DVector::zeros(dim),
            grad_sq_sum: 0.0,
            max_grad_norm: 0.0,
            round: 0,
        })
    }

    pub fn rate(&self) -> OgdRate {
        self.rate
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.w
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Learning rate for the round just accounted for; zero without history.
    pub fn current_eta(&self) -> f64 {
        let denom = match self.rate {
            OgdRate::TimeDecreasing => (self.round as f64).sqrt() * self.max_grad_norm,
            OgdRate::NormAdaptive => self.grad_sq_sum.sqrt(),
        };
        if denom > 0.0 {
            self.sigma / denom
        } else {
            0.0
        }
    }

    pub fn predict(&self) -> DVector<f64> {
        self.w.clone()
    }

    pub fn update(&mut self, g: &DVector<f64>, domain: &Domain) -> Result<()> {
        check_len(self.w.len(), g.len())?;
        let Domain::L2Ball { .. } = domain else {
            return Err(Error::Config(format!(
                "OGD needs an L2 ball, got {:?}",
                domain.shape()
            )));
        };
        let norm = g.norm();
        self.round += 1;
        self.grad_sq_sum += norm * norm;
        self.max_grad_norm = self.max_grad_norm.max(norm);
        let eta = self.current_eta();
        if eta > 0.0 {
            self.w.axpy(-eta, g, 1.0);
            self.w = domain.project(&self.w);
        }
        Ok(())
    }
}

/// Diagonal AdaGrad on a box; the diagonal-metric projection is a clamp.
#[derive(Clone, Debug)]
pub struct AdaGradDiag {
    sigma: f64,
    w: DVector<f64>,
    grad_sq_sum: DVector<f64>,
}

impl AdaGradDiag {
    pub fn new(sigma: f64, dim: usize) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(AdaGradDiag {
            sigma,
            w: DVector::zeros(dim),
            grad_sq_sum: DVector::zeros(dim),
        })
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.w
    }

    pub fn grad_sq_sum(&self) -> &DVector<f64> {
        &self.grad_sq_sum
    }

    pub fn predict(&self) -> DVector<f64> {
        self.w.clone()
    }

    pub fn update(&mut self, g: &DVector<f64>, domain: &Domain) -> Result<()> {
        check_len(self.w.len(), g.len())?;
        let Domain::Box { half_widths } = domain else {
            return Err(Error::Config(format!(
                "AdaGrad needs a box, got {:?}",
                domain.shape()
            )));
        };
        check_len(self.w.len(), half_widths.len())?;
        for i in 0..self.w.len() {
            self.grad_sq_sum[i] += g[i] * g[i];
            let acc = self.grad_sq_sum[i];
            if acc > 0.0 {
                let eta = self.sigma / acc.sqrt();
                let d = half_widths[i];
                self.w[i] = (self.w[i] - eta * g[i]).clamp(-d, d);
            }
        }
        Ok(())
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "sigma must be positive, got {sigma}"
        )))
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
