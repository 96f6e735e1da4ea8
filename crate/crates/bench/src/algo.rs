//! The compared methods, their domains and their theoretical tuning.

use std::fmt;
use std::str::FromStr;

use metagrad::{
    AdaGradDiag, CoordMetaGrad, Domain, DomainShape, MetaGradFull, MetaGradSketch, Ogd, OgdRate,
    OnlineLearner,
};
use nalgebra::DVector;

use crate::error::{BenchError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    OgdT,
    OgdNorm,
    AdaGrad,
    MgCo,
    /// Sketched MetaGrad with nominal rank `m`, capped at the dimension.
    Mgf(usize),
    MgFull,
}

impl Algorithm {
    /// All nine methods in table order.
    pub const ROSTER: [Algorithm; 9] = [
        Algorithm::AdaGrad,
        Algorithm::OgdNorm,
        Algorithm::OgdT,
        Algorithm::MgCo,
        Algorithm::Mgf(2),
        Algorithm::Mgf(11),
        Algorithm::Mgf(26),
        Algorithm::Mgf(51),
        Algorithm::MgFull,
    ];

    /// Column heading used in summaries.
    pub fn table_name(self) -> String {
        match self {
            Algorithm::OgdT => "OGDt".into(),
            Algorithm::OgdNorm => "OGDnorm".into(),
            Algorithm::AdaGrad => "AdaGrad".into(),
            Algorithm::MgCo => "MGCo".into(),
            Algorithm::Mgf(m) => format!("MGF{m}"),
            Algorithm::MgFull => "MGFull".into(),
        }
    }

    pub fn domain_shape(self) -> DomainShape {
        match self {
            Algorithm::OgdT | Algorithm::OgdNorm => DomainShape::L2Ball,
            Algorithm::AdaGrad | Algorithm::MgCo => DomainShape::Box,
            Algorithm::Mgf(_) | Algorithm::MgFull => DomainShape::Slab,
        }
    }

    /// Sketch rank actually used in `dim` dimensions (intercept included).
    /// From `dim + 1` on the sketch is lossless, so larger ranks only cost time.
    pub fn effective_m(self, dim: usize) -> Option<usize> {
        match self {
            Algorithm::Mgf(m) => Some(m.min(dim + 1)),
            _ => None,
        }
    }

    /// Parses a CLI token or a table heading.
    pub fn parse_any(s: &str) -> Result<Self> {
        if let Ok(a) = s.parse() {
            return Ok(a);
        }
        Algorithm::ROSTER
            .iter()
            .copied()
            .find(|a| a.table_name().eq_ignore_ascii_case(s))
            .or_else(|| {
                s.strip_prefix("MGF")
                    .and_then(|m| m.parse().ok())
                    .filter(|&m| m > 0)
                    .map(Algorithm::Mgf)
            })
            .ok_or_else(|| BenchError::Config(format!("unknown algorithm {s:?}")))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::OgdT => f.write_str("ogdt"),
            Algorithm::OgdNorm => f.write_str("ogdnorm"),
            Algorithm::AdaGrad => f.write_str("adagrad"),
            Algorithm::MgCo => f.write_str("mgco"),
            Algorithm::Mgf(m) => write!(f, "mgf:{m}"),
            Algorithm::MgFull => f.write_str("mgfull"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ogdt" => Algorithm::OgdT,
            "ogdnorm" => Algorithm::OgdNorm,
            "adagrad" => Algorithm::AdaGrad,
            "mgco" => Algorithm::MgCo,
            "mgfull" => Algorithm::MgFull,
            other => {
                let m = other
                    .strip_prefix("mgf:")
                    .and_then(|m| m.parse::<usize>().ok())
                    .filter(|&m| m > 0)
                    .ok_or_else(|| {
                        BenchError::Config(format!(
                            "unknown algorithm {other:?} (ogdt|ogdnorm|adagrad|mgco|mgf:<m>|mgfull)"
                        ))
                    })?;
                Algorithm::Mgf(m)
            }
        })
    }
}

/// Domain sizes derived from the comparator, overprovisioned by 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainSizes {
    /// Ball radius `3 |u*|_2`.
    pub d2: f64,
    /// Box half-width `3 |u*|_inf`.
    pub dinf: f64,
    /// Slab bound `3 max_t |x_t·u*|`.
    pub c: f64,
}

pub fn size_domains(u: &DVector<f64>, xs: &[DVector<f64>]) -> DomainSizes {
    let max_margin = xs.iter().map(|x| x.dot(u).abs()).fold(0.0, f64::max);
    DomainSizes {
        d2: 3.0 * u.norm(),
        dinf: 3.0 * u.amax(),
        c: 3.0 * max_margin,
    }
}

/// Tuning that optimizes each method's worst-case bound for the comparator.
pub fn theoretical_sigma(algo: Algorithm, u: &DVector<f64>) -> f64 {
    match algo {
        Algorithm::MgFull | Algorithm::Mgf(_) => u.norm(),
        Algorithm::MgCo => u.amax(),
        // max distance 4|u| in a ball of radius 3|u|, divided by sqrt 2
        Algorithm::OgdT | Algorithm::OgdNorm => 8f64.sqrt() * u.norm(),
        Algorithm::AdaGrad => 8f64.sqrt() * u.amax(),
    }
}

/// Multipliers of the theoretical sigma searched when hypertuning.
pub fn hypertune_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (-7..=-4).map(|j| 2f64.powi(j)).collect();
    grid.extend((0..24).map(|k| 0.125 + k as f64 / 8.0));
    grid
}

/// The fixed part of the domain; slabs get their direction each round.
pub fn fixed_domain(algo: Algorithm, sizes: &DomainSizes, dim: usize) -> Option<Domain> {
    match algo.domain_shape() {
        DomainShape::L2Ball => Some(Domain::l2_ball(sizes.d2)),
        DomainShape::Box => Some(Domain::uniform_box(dim, sizes.dinf)),
        DomainShape::Slab => None,
    }
}

pub fn build_learner(
    algo: Algorithm,
    sigma: f64,
    dim: usize,
    sizes: &DomainSizes,
) -> Result<Box<dyn OnlineLearner>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(BenchError::Config(format!(
            "sigma must be positive, got {sigma} (is the comparator zero?)"
        )));
    }
    Ok(match algo {
        Algorithm::OgdT => Box::new(Ogd::new(OgdRate::TimeDecreasing, sigma, dim)?),
        Algorithm::OgdNorm => Box::new(Ogd::new(OgdRate::NormAdaptive, sigma, dim)?),
        Algorithm::AdaGrad => Box::new(AdaGradDiag::new(sigma, dim)?),
        Algorithm::MgCo => Box::new(CoordMetaGrad::new(
            sigma,
            &DVector::from_element(dim, sizes.dinf),
        )?),
        Algorithm::Mgf(_) => {
            let m = algo.effective_m(dim).unwrap_or(1);
            Box::new(MetaGradSketch::sketched(sigma, m, dim)?)
        }
        Algorithm::MgFull => Box::new(MetaGradFull::full(sigma, dim, DomainShape::Slab)?),
    })
}
