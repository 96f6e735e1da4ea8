//! Runtime check of the MetaGrad Full regret guarantee.
//!
//! The trace keeps sufficient statistics instead of the raw gradients, so
//! the linearized regret and `V_T` can be evaluated for any comparator in
//! `O(d^2)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{BenchError, Result};

pub const TRACE_MAX_DIM: usize = 64;
pub const TRACE_MAX_ROUNDS: usize = 100_000;

#[derive(Clone, Debug)]
pub struct RegretTrace {
    rounds: usize,
    /// `sum w_t·g_t`
    wg: f64,
    /// `sum (w_t·g_t)^2`
    wg_sq: f64,
    /// `sum g_t`
    g_sum: DVector<f64>,
    /// `sum (w_t·g_t) g_t`
    wg_g: DVector<f64>,
    /// `F_T = sum g_t g_t'`
    gram: DMatrix<f64>,
    b_max: f64,
}

impl RegretTrace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim > TRACE_MAX_DIM {
            return Err(BenchError::Config(format!(
                "gradient trace is limited to d <= {TRACE_MAX_DIM}, got {dim}"
            )));
        }
        Ok(RegretTrace {
            rounds: 0,
            wg: 0.0,
            wg_sq: 0.0,
            g_sum: DVector::zeros(dim),
            wg_g: DVector::zeros(dim),
            gram: DMatrix::zeros(dim, dim),
            b_max: 0.0,
        })
    }

    /// Records the prediction, the gradient and the range bound `b_t`.
    pub fn push(&mut self, w: &DVector<f64>, g: &DVector<f64>, b: f64) -> Result<()> {
        if self.rounds >= TRACE_MAX_ROUNDS {
            return Err(BenchError::Config(format!(
                "gradient trace is limited to T <= {TRACE_MAX_ROUNDS}"
            )));
        }
        let wg = w.dot(g);
        self.rounds += 1;
        self.wg += wg;
        self.wg_sq += wg * wg;
        self.g_sum += g;
        self.wg_g.axpy(wg, g, 1.0);
        self.gram.ger(1.0, g, g, 1.0);
        self.b_max = self.b_max.max(b);
        Ok(())
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn b_max(&self) -> f64 {
        self.b_max
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `sum (w_t - u)·g_t`
    pub fn lin_regret(&self, u: &DVector<f64>) -> f64 {
        self.wg - u.dot(&self.g_sum)
    }

    /// `sum ((w_t - u)·g_t)^2`
    pub fn variance(&self, u: &DVector<f64>) -> f64 {
        let quad = (&self.gram * u).dot(u);
        (self.wg_sq - 2.0 * u.dot(&self.wg_g) + quad).max(0.0)
    }

    /// `sum |g_t|^2`
    pub fn grad_sq_sum(&self) -> f64 {
        self.gram.trace()
    }

    /// Rank of `F_T`, counting eigenvalues above `1e-8 lambda_max`.
    pub fn rank(&self) -> usize {
        let eig = SymmetricEigen::new(self.gram.clone()).eigenvalues;
        let max = eig.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return 0;
        }
        eig.iter().filter(|&&l| l > 1e-8 * max).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
    pub rank: usize,
    pub z: f64,
}

/// `max(ceil(z), 1)`
fn ceil_plus(z: f64) -> f64 {
    z.ceil().max(1.0)
}

/// Evaluates the first regret bound against comparator `u`.
pub fn bound_check(trace: &RegretTrace, u: &DVector<f64>, sigma: f64) -> BoundCheck {
    let lhs = trace.lin_regret(u);
    let b = trace.b_max();
    let rank = trace.rank();
    if b == 0.0 || rank == 0 {
        return BoundCheck {
            lhs,
            rhs: 0.0,
            ok: lhs <= 0.0,
            rank,
            z: 0.0,
        };
    }
    let t = trace.rounds() as f64;
    let rk = rank as f64;
    let z = rk * (sigma * sigma * trace.grad_sq_sum() / (2.0 * b * b * rk)).ln_1p()
        + 2.0 * ceil_plus(2.0 * t.log2()).ln()
        + 0.5;
    let complexity = u.norm_squared() / (2.0 * sigma * sigma) + z;
    let rhs = 2.5 * (trace.variance(u) * complexity).sqrt() + 5.0 * b * complexity + 2.0 * b;
    BoundCheck {
        lhs,
        rhs,
        ok: lhs <= rhs,
        rank,
        z,
    }
}
