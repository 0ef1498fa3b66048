//! Cocycles over torus translations with values in compact Lie groups:
//! group and representation numerics, degree estimation and the spectral
//! analysis of the associated Koopman operators.

pub mod degree;
pub mod dynamics;
pub mod error;
pub mod group;
pub mod koopman;
pub mod rep;
pub mod scalar;

pub use error::{LieError, Result};
pub use group::{Branch, GroupTag};
pub use koopman::{HypothesisStatus, Verdict};
pub use rep::{Convention, RepLabel};
pub use scalar::Real;

pub type GroupElement = group::GroupElement<f64>;
pub type AlgebraElement = group::AlgebraElement<f64>;
pub type Representation = rep::Representation<f64>;
pub type RepMatrix = rep::RepMatrix<f64>;
pub type BasePoint = dynamics::BasePoint<f64>;
pub type TranslationFlow = dynamics::TranslationFlow<f64>;
pub type PhaseFunction = dynamics::PhaseFunction<f64>;
pub type TrigPoly = dynamics::TrigPoly<f64>;
pub type Cocycle = dynamics::Cocycle<f64>;
pub type DegreeField = degree::DegreeField<f64>;
pub type DegreeReport = degree::DegreeReport<f64>;
pub type FiberVector = koopman::FiberVector<f64>;
pub type CorrelationSeries = koopman::CorrelationSeries<f64>;
pub type DegreeData = koopman::DegreeData<f64>;
