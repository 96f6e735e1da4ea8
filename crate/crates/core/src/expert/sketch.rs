//! Sketched expert backed by epoch-based Frequent Directions.
//!
//! The sketch `S` has `2m` rows. Within an epoch of `m + 1` rounds each new
//! gradient is written into one of the rows `m..2m` (1-based) that are zero
//! at the start of the epoch, and `H = (I/sigma^2 + 2 eta^2 S S')^{-1}` is
//! maintained by two Sherman-Morrison steps. The last round of an epoch
//! compresses `S` through the eigendecomposition of the small Gram matrix
//! `S S'`: every squared singular value is reduced by the `m`-th one, which
//! leaves at most `m - 1` nonzero rows and makes `H` diagonal.
//!
//! The covariance is never formed. By the Woodbury identity
//! `(I/sigma^2 + 2 eta^2 S'S)^{-1} = sigma^2 (I - 2 eta^2 S' H S)`, so both the
//! projection and the mean update cost `O(m d)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::controller::{EtaExpert, ExpertFactory};
use crate::domain::{shrink, Domain, DomainShape};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct FrequentDirections {
    m: usize,
    eta: f64,
    sigma: f64,
    sketch: DMatrix<f64>,
    h: DMatrix<f64>,
    /// Phase within the current epoch, in `0..=m`.
    tau: usize,
    /// Sum of the shrinkage `sigma_m^2` over all compressions so far.
    shrinkage: f64,
    compressions: u64,
}

impl FrequentDirections {
    pub fn new(m: usize, dim: usize, eta: f64, sigma: f64) -> Self {
        assert!(m >= 1, "sketch rank must be positive");
        let k = 2 * m;
        FrequentDirections {
            m,
            eta,
            sigma,
            sketch: DMatrix::zeros(k, dim),
            h: DMatrix::identity(k, k) * (sigma * sigma),
            tau: 0,
            shrinkage: 0.0,
            compressions: 0,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sketch(&self) -> &DMatrix<f64> {
        &self.sketch
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn shrinkage(&self) -> f64 {
        self.shrinkage
    }

    pub fn compressions(&self) -> u64 {
        self.compressions
    }

    /// `v - 2 eta^2 S' H S v`, i.e. `Sigma v / sigma^2` for the sketched
    /// covariance.
    pub fn woodbury_apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let sv = &self.sketch * v;
        let hsv = &self.h * sv;
        let correction = self.sketch.tr_mul(&hsv);
        v - correction * (2.0 * self.eta * self.eta)
    }

    /// Adds one gradient to the sketch.
    pub fn ingest(&mut self, g: &DVector<f64>, round: u64) -> Result<()> {
        // 0-based index of 1-based row m + tau
        let row = self.m - 1 + self.tau;
        self.sketch.set_row(row, &g.transpose());
        if self.tau < self.m {
            self.rank_two_update(g, row, round)?;
            self.tau += 1;
            Ok(())
        } else {
            self.compress(round)?;
            self.tau = 0;
            Ok(())
        }
    }

    fn rank_two_update(&mut self, g: &DVector<f64>, row: usize, round: u64) -> Result<()> {
        let two_eta2 = 2.0 * self.eta * self.eta;
        let mut q = &self.sketch * g;
        q[row] -= 0.5 * g.norm_squared();
        q *= two_eta2;

        // H~ = H - (H q)(e' H) / (1 + e' H q)
        let hq = &self.h * &q;
        let denom1 = 1.0 + hq[row];
        let eh = self.h.row(row).transpose();
        let denom_ok = |d: f64| d.is_finite() && d > 0.0;
        if !denom_ok(denom1) {
            return Err(Error::Numerical {
                round,
                message: format!("sketch update denominator {denom1}"),
            });
        }
        self.h.ger(-1.0 / denom1, &hq, &eh, 1.0);

        // H_t = H~ - (H~ e)(q' H~) / (1 + q' H~ e)
        let he = self.h.column(row).into_owned();
        let qh = self.h.tr_mul(&q);
        let denom2 = 1.0 + q.dot(&he);
        if !denom_ok(denom2) {
            return Err(Error::Numerical {
                round,
                message: format!("sketch update denominator {denom2}"),
            });
        }
        self.h.ger(-1.0 / denom2, &he, &qh, 1.0);
        symmetrize(&mut self.h);
        Ok(())
    }

    fn compress(&mut self, round: u64) -> Result<()> {
        let k = 2 * self.m;
        let dim = self.sketch.ncols();
        // S S' = U diag(s^2) U', and row i of U'S is s_i v_i'
        let eig = SymmetricEigen::new(&self.sketch * self.sketch.transpose());
        if eig.eigenvalues.iter().any(|l| !l.is_finite()) {
            return Err(Error::Numerical {
                round,
                message: "eigendecomposition of the sketch Gram matrix failed".into(),
            });
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let sq = |rank: usize| eig.eigenvalues[order[rank]].max(0.0);
        let floor = sq(self.m - 1);
        let inv_s2 = 1.0 / (self.sigma * self.sigma);
        let two_eta2 = 2.0 * self.eta * self.eta;

        let mut sketch = DMatrix::zeros(k, dim);
        let mut h = DMatrix::zeros(k, k);
        for i in 0..k {
            let s2 = sq(i);
            if i < self.m && s2 > floor {
                let u = eig.eigenvectors.column(order[i]);
                let row = u.tr_mul(&self.sketch) * (1.0 - floor / s2).sqrt();
                sketch.set_row(i, &row);
            }
            h[(i, i)] = 1.0 / (inv_s2 + two_eta2 * sketch.row(i).norm_squared());
        }
        self.sketch = sketch;
        self.h = h;
        self.shrinkage += floor;
        self.compressions += 1;
        Ok(())
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

#[derive(Clone, Debug)]
pub struct SketchedExpert {
    eta: f64,
    sigma: f64,
    wake_round: u64,
    mean: DVector<f64>,
    fd: FrequentDirections,
}

impl SketchedExpert {
    pub fn new(eta: f64, sigma: f64, m: usize, dim: usize, wake_round: u64) -> Self {
        SketchedExpert {
            eta,
            sigma,
            wake_round,
            mean: DVector::zeros(dim),
            fd: FrequentDirections::new(m, dim, eta, sigma),
        }
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

    pub fn fd(&self) -> &FrequentDirections {
        &self.fd
    }

    /// Closed-form projection onto the slab `|w·x| <= bound` in the sketched
    /// metric, using the sketch from the previous round.
    pub fn project_slab(&self, direction: &DVector<f64>, bound: f64) -> Result<DVector<f64>> {
        let excess = shrink(direction.dot(&self.mean), bound);
        if excess == 0.0 {
            return Ok(self.mean.clone());
        }
        let p = self.fd.woodbury_apply(direction);
        let denom = direction.dot(&p);
        if !(denom > 0.0) {
            return Err(Error::Numerical {
                round: 0,
                message: format!("sketched projection denominator {denom} is not positive"),
            });
        }
        Ok(&self.mean - p * (excess / denom))
    }

    /// Sketch the gradient, then take the Woodbury-form mean step.
    pub fn update(
        &mut self,
        g: &DVector<f64>,
        controller_prediction: &DVector<f64>,
        own_prediction: &DVector<f64>,
        round: u64,
    ) -> Result<()> {
        self.fd.ingest(g, round)?;
        let offset = (own_prediction - controller_prediction).dot(g);
        let g_hat = g * ((1.0 + 2.0 * self.eta * offset) * self.eta);
        let step = self.fd.woodbury_apply(&g_hat);
        self.mean = own_prediction - step * (self.sigma * self.sigma);
        Ok(())
    }
}

impl EtaExpert for SketchedExpert {
    type Point = DVector<f64>;
    type Domain = Domain;

    fn eta(&self) -> f64 {
        self.eta
    }

    fn predict(&mut self, domain: &Domain, round: u64) -> Result<DVector<f64>> {
        match domain {
            Domain::Slab { bound, direction } => {
                self.project_slab(direction, *bound).map_err(|e| match e {
                    Error::Numerical { message, .. } => Error::Numerical { round, message },
                    other => other,
                })
            }
            other if other.contains(&self.mean, 0.0) => Ok(self.mean.clone()),
            other => Err(Error::Config(format!(
                "sketched projection onto {:?} is not supported",
                other.shape()
            ))),
        }
    }

    fn update(
        &mut self,
        grad: &DVector<f64>,
        controller_prediction: &DVector<f64>,
        own_prediction: &DVector<f64>,
        round: u64,
    ) -> Result<()> {
        SketchedExpert::update(self, grad, controller_prediction, own_prediction, round)
    }
}

#[derive(Clone, Debug)]
pub struct SketchedExpertFactory {
    pub sigma: f64,
    pub m: usize,
    pub dim: usize,
}

impl SketchedExpertFactory {
    pub fn new(sigma: f64, m: usize, dim: usize, shape: DomainShape) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Config(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if m == 0 {
            return Err(Error::Config("sketch rank m must be at least 1".into()));
        }
        if shape != DomainShape::Slab {
            return Err(Error::Config(format!(
                "sketched MetaGrad needs a slab domain, got {shape:?}"
            )));
        }
        Ok(SketchedExpertFactory { sigma, m, dim })
    }
}

impl ExpertFactory for SketchedExpertFactory {
    type Expert = SketchedExpert;

    fn spawn(&self, eta: f64, wake_round: u64) -> SketchedExpert {
        SketchedExpert::new(eta, self.sigma, self.m, self.dim, wake_round)
    }
}
