//! Offline minimizer of the cumulative loss, used as the regret comparator.

use metagrad::data::Dataset;
use metagrad::{Execution, LossKind};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{BenchError, Result};

/// Rows per partial sum; fixed so results do not depend on the thread count.
const CHUNK: usize = 512;

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub max_iter: usize,
    /// Stop when the best objective improves by less than
    /// `tol * max(1, |F|)` over this many iterations.
    pub window: usize,
    pub tol: f64,
    /// Step size constant `c` in `c / sqrt(k)`.
    pub step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iter: 100_000,
            window: 1_000,
            tol: 1e-9,
            step: 1.0,
        }
    }
}

/// `sum_t f_t(u)`.
pub fn cumulative_loss(ds: &Dataset, loss: LossKind, u: &DVector<f64>) -> f64 {
    objective(ds, loss, u, false).0
}

fn objective(
    ds: &Dataset,
    loss: LossKind,
    u: &DVector<f64>,
    with_grad: bool,
) -> (f64, DVector<f64>) {
    let n = ds.len();
    let chunks: Vec<usize> = (0..n.div_ceil(CHUNK)).collect();
    let exec = Execution::auto(n * ds.dim());
    let parts = exec.map(&chunks, |&c| {
        let mut f = 0.0;
        let mut g = DVector::zeros(if with_grad { u.len() } else { 0 });
        for t in c * CHUNK..((c + 1) * CHUNK).min(n) {
            let z = ds.xs[t].dot(u);
            f += loss.scalar_value(z, ds.ys[t]);
            if with_grad {
                g.axpy(loss.scalar_derivative(z, ds.ys[t]), &ds.xs[t], 1.0);
            }
        }
        (f, g)
    });
    let mut f = 0.0;
    let mut g = DVector::zeros(if with_grad { u.len() } else { 0 });
    for (pf, pg) in parts {
        f += pf;
        if with_grad {
            g += pg;
        }
    }
    (f, g)
}

/// Unconstrained minimizer of `sum_t f_t(u)`.
///
/// Squared loss is solved exactly from the normal equations. Other losses
/// use full-batch subgradient descent with normalized steps `c / sqrt(k)`,
/// returning the better of the running average and the best iterate.
pub fn solve_comparator(
    ds: &Dataset,
    loss: LossKind,
    opts: &SolverOptions,
) -> Result<DVector<f64>> {
    if ds.is_empty() {
        return Err(BenchError::Data(format!("{}: empty dataset", ds.name)));
    }
    if loss == LossKind::Squared {
        return least_squares(ds);
    }
    let d = ds.dim();
    let mut u = DVector::zeros(d);
    let (f0, _) = objective(ds, loss, &u, false);
    let mut best_f = f0;
    let mut best_u = u.clone();
    let mut avg = DVector::zeros(d);
    let mut window_start = best_f;
    for k in 1..=opts.max_iter {
        let (f, g) = objective(ds, loss, &u, true);
        if !f.is_finite() || f > 10.0 * f0.max(f64::MIN_POSITIVE) {
            return Err(BenchError::Numerical(format!(
                "{}: comparator solver diverged (objective {f} vs {f0} at start); try --normalize",
                ds.name
            )));
        }
        if f < best_f {
            best_f = f;
            best_u.copy_from(&u);
        }
        let gn = g.norm();
        if gn == 0.0 {
            break;
        }
        u.axpy(-opts.step / (k as f64).sqrt() / gn, &g, 1.0);
        avg.axpy(1.0 / k as f64, &(&u - &avg), 1.0);
        if k % opts.window == 0 {
            if window_start - best_f < opts.tol * best_f.abs().max(1.0) {
                break;
            }
            window_start = best_f;
        }
    }
    let (f_avg, _) = objective(ds, loss, &avg, false);
    Ok(if f_avg < best_f { avg } else { best_u })
}

fn least_squares(ds: &Dataset) -> Result<DVector<f64>> {
    let d = ds.dim();
    let mut a = DMatrix::zeros(d, d);
    let mut b = DVector::zeros(d);
    for (x, &y) in ds.xs.iter().zip(&ds.ys) {
        a.ger(1.0, x, x, 1.0);
        b.axpy(y, x, 1.0);
    }
    if let Some(chol) = a.clone().cholesky() {
        return Ok(chol.solve(&b));
    }
    // rank deficient: minimum-norm solution through the pseudo-inverse
    let eig = SymmetricEigen::new(a);
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if !max.is_finite() {
        return Err(BenchError::Numerical(format!(
            "{}: least squares failed",
            ds.name
        )));
    }
    let mut u = DVector::zeros(d);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 1e-12 * max {
            let q = eig.eigenvectors.column(i);
            u.axpy(q.dot(&b) / l, &q, 1.0);
        }
    }
    Ok(u)
}
