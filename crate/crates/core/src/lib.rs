//! Complementary set partitions, generalized multivariate cumulants and
//! polykay estimators.
//!
//! The crate is organised bottom-up:
//!
//! * [`partition`] and [`multiindex`]: set partitions, integer partitions,
//!   multi-indexes and multi-index partitions;
//! * [`onevec`]: binary-matrix encodings of partitions and the maps between
//!   multi-index partitions and set partitions of dummy variables;
//! * [`csp`]: five algorithms listing the partitions complementary to a given
//!   one;
//! * [`cumulant`]: exact moment/cumulant algebra;
//! * [`estimation`]: power sums, polykays and evaluation on sample data.

pub mod csp;
pub mod cumulant;
pub mod error;
pub mod estimation;
mod linalg;
pub mod multiindex;
pub mod onevec;
pub mod partition;
mod unionfind;

pub use csp::{count_not_complementary, csp, Algorithm, CspResult};
pub use cumulant::{CumulantPolynomial, Monomial, MomentPolynomial, Polynomial};
pub use error::{Error, Result};
pub use estimation::{NPoly, PowerSumPolynomial, SampleMatrix};
pub use multiindex::{d_coefficient, enumerate_multiindex_partitions, MultiIndex, MultiIndexPartition};
pub use onevec::{IntersectionMatrix, LabelingRule, OneVecPartition};
pub use partition::{bell, enumerate_partitions, stirling2, CanonicalForm, IntegerPartition, SetPartition};
