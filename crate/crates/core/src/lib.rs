//! MetaGrad online convex optimization: the full-matrix, sketched and
//! coordinate-wise variants, first-order baselines and LIBSVM data loading.

pub mod baselines;
pub mod controller;
pub mod coord;
pub mod data;
pub mod domain;
pub mod error;
pub mod expert;
pub mod learner;
pub mod loss;
pub mod parallel;

pub use baselines::{AdaGradDiag, Ogd, OgdRate};
pub use controller::{Controller, ControllerStats, EtaExpert, ExpertFactory, RoundOutcome};
pub use coord::{CoordMetaGrad, ScalarMetaGrad};
pub use domain::{Domain, DomainShape};
pub use error::{Error, Result};
pub use expert::{
    FrequentDirections, FullExpert, FullExpertFactory, SketchedExpert, SketchedExpertFactory,
};
pub use learner::{MetaGrad, MetaGradFull, MetaGradSketch, OnlineLearner};
pub use loss::LossKind;
pub use parallel::Execution;
