//! Certification toolkit for finite (extended) metric spaces.
//!
//! Every four-point inequality handled here (Ptolemy, `PT_κ`, asymptotic
//! `PT_κ`, the Gromov four-point condition and the asymptotic `CAT(κ)`
//! comparison condition) is evaluated exhaustively over all 4-subsets of a
//! finite space and reduced to a scalar [`Certificate`]: the worst residual,
//! the quadruple attaining it and scan metadata.
//!
//! Alongside the certifiers the crate implements the constructions that
//! connect ptolemaic Möbius spaces with hyperbolic spaces: cross-ratio
//! triples and metric involution ([`moebius`]), the hyperbolic cone over a
//! metric space with its Gromov products and boundary metrics ([`cone`]),
//! and model-plane comparison quadrilaterals ([`comparison`]).

pub mod comparison;
pub mod cone;
mod error;
pub mod hyperbolicity;
pub mod metric;
pub mod moebius;
pub mod scan;

pub use error::{Error, Result};
pub use metric::{Dist, ExtendedMetricSpace, ValidationReport, Violation, ViolationKind};
pub use scan::{Certificate, Pairing};
