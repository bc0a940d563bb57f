//! Mean-variance analysis checked against expected utility.
//!
//! Modules:
//!
//! * [`distributions`]: discrete and normal payoffs, mixtures, portfolios
//! * [`utility`]: utility families, expected utility, risk aversion
//! * [`borch`]: two-point assets that defeat mean-variance indifference
//! * [`indifference`]: mixture-closed indifference circles, CARA parabolas,
//!   the heat-equation check on merit functions, mixture-violation detector
//! * [`dominance`]: first/second-order stochastic dominance and moment tests
//! * [`frontier`]: Markowitz minimum-variance frontier and tangency portfolio
//! * [`capm`]: returns- and price-form CAPM
//!
//! Everything is a pure function over immutable values.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod borch;
pub mod capm;
pub mod distributions;
pub mod dominance;
pub mod error;
pub mod frontier;
pub mod indifference;
pub mod utility;

pub use borch::{construct, paradox_verdict, Branch, BorchConstruction, ParadoxReport, TwoPointAsset};
pub use capm::{Beta, BetaBasis, MarketModel};
pub use distributions::{DiscreteAsset, JointDiscrete, JointState, MomentPair, NormalAsset, Outcome};
pub use dominance::{DominanceVerdict, Order, Relation};
pub use error::{Error, Result};
pub use frontier::{AssetUniverse, Portfolio};
pub use indifference::{BuridanCircle, MeritFunction};
pub use utility::UtilitySpec;
