//! Dynamic risk measures along filtrations, and randomized checks of the
//! axioms and time-consistency properties.

pub mod measure;
pub mod properties;
pub mod random;

pub use measure::{convexity_condition, dynamic_eval, DynamicRiskMeasure, Family, RiskMeasure};
pub use properties::{
    expectation, replay, run_property, violation, Expectation, Outcome, PropertyKind, PropertyReport,
    SuiteConfig, Verdict, Witness,
};
pub use random::InstanceGenerator;
