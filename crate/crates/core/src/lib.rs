//! Exact-arithmetic engine for bivariate generating series of curve counting
//! invariants on elliptic fibrations.
//!
//! The crate builds the standard weak Jacobi forms and quasi-modular forms as
//! truncated series over exact rationals, evaluates the closed product
//! formulas for stable-pair generating series, verifies their functional
//! equations coefficient by coefficient, inverts low-genus Gromov-Witten data
//! into full stable-pair series, and decomposes series in the bigraded ring
//! QMod[phi_{-2,1}, phi_{0,1}].
//!
//! Everything is exact: the only scalar type is an arbitrary-precision
//! rational, and every identity is checked as a zero residual on an explicit
//! validity box.

pub mod decompose;
pub mod forms;
pub mod gw;
pub mod linalg;
pub mod pt;
pub mod rational;
pub mod series;

pub use rational::Rational;
pub use series::{BiSeries, BoxSpec, SeriesError, DEFAULT_TMAX};
