//! Losses of the form `f(w) = h(w·x)` for linear prediction.
//!
//! Every loss factorizes through the scalar prediction `z = w·x`, so the
//! subgradient is always `h'(z) x`. That keeps gradients parallel to the
//! feature vector, which the slab domain relies on.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LossKind {
    /// `max(0, 1 - y z)`
    Hinge,
    /// `ln(1 + exp(-y z))`
    Logistic,
    /// `|y - z|`
    Absolute,
    /// `(y - z)^2`
    Squared,
}

impl LossKind {
    pub const ALL: [LossKind; 4] = [
        LossKind::Hinge,
        LossKind::Logistic,
        LossKind::Absolute,
        LossKind::Squared,
    ];

    pub fn is_classification(self) -> bool {
        matches!(self, LossKind::Hinge | LossKind::Logistic)
    }

    pub fn name(self) -> &'static str {
        match self {
            LossKind::Hinge => "hinge",
            LossKind::Logistic => "logistic",
            LossKind::Absolute => "absolute",
            LossKind::Squared => "squared",
        }
    }

    fn check_label(self, y: f64) -> Result<()> {
        if self.is_classification() && y != 1.0 && y != -1.0 {
            return Err(Error::InvalidLabel(y));
        }
        Ok(())
    }

    /// `h(z)` for label `y`. Labels are not validated here.
    pub fn scalar_value(self, z: f64, y: f64) -> f64 {
        match self {
            LossKind::Hinge => (1.0 - y * z).max(0.0),
            LossKind::Logistic => {
                let m = -y * z;
                // ln(1 + e^m) without overflow
                m.max(0.0) + (-m.abs()).exp().ln_1p()
            }
            LossKind::Absolute => (y - z).abs(),
            LossKind::Squared => (y - z) * (y - z),
        }
    }

    /// `h'(z)`; at kinks the zero subgradient is returned.
    pub fn scalar_derivative(self, z: f64, y: f64) -> f64 {
        match self {
            LossKind::Hinge => {
                if y * z < 1.0 {
                    -y
                } else {
                    0.0
                }
            }
            LossKind::Logistic => {
                let m = y * z;
                // -y / (1 + e^{y z})
                if m >= 0.0 {
                    let e = (-m).exp();
                    -y * e / (1.0 + e)
                } else {
                    -y / (1.0 + m.exp())
                }
            }
            LossKind::Absolute => {
                let r = z - y;
                if r > 0.0 {
                    1.0
                } else if r < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            LossKind::Squared => 2.0 * (z - y),
        }
    }

    pub fn value(self, w: &DVector<f64>, x: &DVector<f64>, y: f64) -> Result<f64> {
        let z = prediction(w, x)?;
        self.check_label(y)?;
        Ok(self.scalar_value(z, y))
    }

    pub fn gradient(self, w: &DVector<f64>, x: &DVector<f64>, y: f64) -> Result<DVector<f64>> {
        let z = prediction(w, x)?;
        self.check_label(y)?;
        Ok(x * self.scalar_derivative(z, y))
    }
}

fn prediction(w: &DVector<f64>, x: &DVector<f64>) -> Result<f64> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            got: x.len(),
        });
    }
    Ok(w.dot(x))
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hinge" => Ok(LossKind::Hinge),
            "logistic" => Ok(LossKind::Logistic),
            "absolute" => Ok(LossKind::Absolute),
            "squared" => Ok(LossKind::Squared),
            other => Err(Error::Config(format!("unknown loss '{other}'"))),
        }
    }
}
