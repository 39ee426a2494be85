//! Conditional generalized quantiles and shortfall risk measures on finite
//! probability spaces, with randomized property checks for their dynamic
//! versions.
//!
//! ```
//! use condquant::quantile::{conditional_generalized_quantile, RiskSpec, SolveSettings};
//! use condquant::{LossFunction, Partition, ProbabilitySpace, RandomVariable};
//!
//! # fn main() -> condquant::Result<()> {
//! let space = ProbabilitySpace::uniform(3)?;
//! let x = RandomVariable::new(vec![1.0, 2.0, 3.0])?;
//! let g = Partition::from_labels(&["a", "a", "b"])?;
//! // u1(x) = x², u2(x) = eˣ − 1
//! let spec = RiskSpec::new(1.0 / 3.0, LossFunction::quadratic(), LossFunction::from_tag("exp:1,1")?)?;
//! let rho = conditional_generalized_quantile(&space, &x, &g, &spec, &SolveSettings::default())?;
//! assert_eq!(rho.values(), &[1.0, 1.0, 3.0]);
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod dynamic;
pub mod error;
pub mod loss;
pub mod quantile;
pub mod shortfall;
pub mod solve;
pub mod space;

pub use error::{Error, Result};
pub use loss::{LossFunction, ScoreFunction};
pub use quantile::{RiskSpec, SolveSettings};
pub use shortfall::{Gamma, ShortfallSpec};
pub use space::{Distribution, Filtration, Partition, ProbabilitySpace, RandomVariable};
