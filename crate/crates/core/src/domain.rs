//! Feasible sets containing the origin, their Euclidean projections, and the
//! domain-aware gradient size `max_{w in U} |(w - w_t)·g|`.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Relative tolerance for deciding that a gradient is parallel to the slab
/// direction.
const PARALLEL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// `{w : ||w||_2 <= radius}`
    L2Ball { radius: f64 },
    /// `{w : |w_i| <= half_widths[i]}`
    Box { half_widths: DVector<f64> },
    /// `{w : |w·direction| <= bound}`; the direction changes every round.
    Slab { bound: f64, direction: DVector<f64> },
}

/// The variant of a [`Domain`] without its data, used to validate
/// (algorithm, domain) pairings before a run starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainShape {
    L2Ball,
    Box,
    Slab,
}

/// `sign(y) max(|y| - c, 0)`
pub fn shrink(y: f64, c: f64) -> f64 {
    let excess = y.abs() - c;
    if excess > 0.0 {
        y.signum() * excess
    } else {
        0.0
    }
}

impl Domain {
    pub fn l2_ball(radius: f64) -> Self {
        Domain::L2Ball { radius }
    }

    pub fn uniform_box(dim: usize, half_width: f64) -> Self {
        Domain::Box {
            half_widths: DVector::from_element(dim, half_width),
        }
    }

    pub fn slab(bound: f64, direction: DVector<f64>) -> Self {
        Domain::Slab { bound, direction }
    }

    pub fn shape(&self) -> DomainShape {
        match self {
            Domain::L2Ball { .. } => DomainShape::L2Ball,
            Domain::Box { .. } => DomainShape::Box,
            Domain::Slab { .. } => DomainShape::Slab,
        }
    }

    /// Dimension fixed by the domain itself, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Domain::L2Ball { .. } => None,
            Domain::Box { half_widths } => Some(half_widths.len()),
            Domain::Slab { direction, .. } => Some(direction.len()),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.dim() {
            Some(d) if d != dim => Err(Error::DimensionMismatch {
                expected: dim,
                got: d,
            }),
            _ => Ok(()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Domain::L2Ball { radius } => *radius >= 0.0,
            Domain::Box { half_widths } => half_widths.iter().all(|&h| h >= 0.0),
            Domain::Slab { bound, direction } => {
                *bound >= 0.0 && direction.iter().all(|v| v.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("malformed domain {self:?}")))
        }
    }

    /// Membership with an absolute slack `tol`.
    pub fn contains(&self, w: &DVector<f64>, tol: f64) -> bool {
        match self {
            Domain::L2Ball { radius } => w.norm() <= radius + tol,
            Domain::Box { half_widths } => w
                .iter()
                .zip(half_widths.iter())
                .all(|(wi, hi)| wi.abs() <= hi + tol),
            Domain::Slab { bound, direction } => w.dot(direction).abs() <= bound + tol,
        }
    }

    /// Euclidean projection onto the domain.
    pub fn project(&self, w: &DVector<f64>) -> DVector<f64> {
        match self {
            Domain::L2Ball { radius } => {
                let norm = w.norm();
                if norm <= *radius {
                    w.clone()
                } else {
                    w * (radius / norm)
                }
            }
            Domain::Box { half_widths } => w.zip_map(half_widths, |wi, hi| wi.clamp(-hi, hi)),
            Domain::Slab { bound, direction } => {
                let xx = direction.norm_squared();
                let excess = shrink(direction.dot(w), *bound);
                if excess == 0.0 || xx == 0.0 {
                    w.clone()
                } else {
                    w - direction * (excess / xx)
                }
            }
        }
    }

    /// `max_{w in U} |(w - center)·g|` in closed form.
    ///
    /// For the slab the maximum is finite only when `g` is parallel to the
    /// slab direction; anything else is reported as an error.
    pub fn range_bound(&self, center: &DVector<f64>, g: &DVector<f64>) -> Result<f64> {
        if center.len() != g.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: g.len(),
            });
        }
        match self {
            Domain::L2Ball { radius } => Ok(radius * g.norm() + center.dot(g).abs()),
            Domain::Box { half_widths } => {
                let spread: f64 = half_widths
                    .iter()
                    .zip(g.iter())
                    .map(|(h, gi)| h * gi.abs())
                    .sum();
                Ok(spread + center.dot(g).abs())
            }
            Domain::Slab { bound, direction } => {
                let g_norm2 = g.norm_squared();
                if g_norm2 == 0.0 {
                    return Ok(0.0);
                }
                let xx = direction.norm_squared();
                if xx == 0.0 {
                    return Err(Error::InvalidInput(
                        "gradient is nonzero but the slab direction is zero".into(),
                    ));
                }
                let c = direction.dot(g) / xx;
                let residual = (g - direction * c).norm_squared();
                if residual > PARALLEL_TOL * PARALLEL_TOL * g_norm2 {
                    return Err(Error::InvalidInput(
                        "gradient is not parallel to the slab direction".into(),
                    ));
                }
                Ok(c.abs() * (bound + center.dot(direction).abs()))
            }
        }
    }
}
