//! A single handle over every conditional risk map in the crate, plus the
//! family classification that decides which properties must hold.

use crate::error::{Error, Result};
use crate::loss::{check_alpha, LossFunction, ScoreFunction};
use crate::quantile::{conditional_generalized_quantile, RiskSpec, SolveSettings};
use crate::shortfall::{
    conditional_entropic, conditional_expectile, conditional_shortfall, conditional_var, Gamma,
    ShortfallSpec,
};
use crate::space::{is_measurable, Filtration, Partition, ProbabilitySpace, RandomVariable};

/// A conditional risk measure `X ↦ ρ^G(X)`.
#[derive(Debug, Clone)]
pub enum RiskMeasure {
    /// Generalized quantile, solved by bisection on the loss derivatives.
    Quantile(RiskSpec),
    /// Shortfall measure, solved by bisection on the score.
    Shortfall(ShortfallSpec),
    /// Closed-form entropic measure.
    Entropic(Gamma),
    /// Direct left quantile.
    Var(f64),
    /// Exact piecewise-linear expectile.
    Expectile(f64),
}

/// The closed-form family a measure belongs to, up to rescaling of its losses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Entropic(Gamma),
    Var(f64),
    Expectile(f64),
    /// `u1 = a1 x^β`, `u2 = a2 x^β` with `β ∉ {1, 2}`, at the effective level.
    Power { alpha: f64, exponent: f64 },
    Other,
}

const HALF_TOL: f64 = 1e-12;

impl Family {
    /// Same risk map as a conditional mean.
    pub fn is_mean(&self) -> bool {
        match self {
            Family::Entropic(Gamma::Finite(g)) => *g == 0.0,
            Family::Expectile(a) => (a - 0.5).abs() <= HALF_TOL,
            _ => false,
        }
    }

    /// Dynamic versions are time consistent exactly for this class.
    pub fn is_entropic(&self) -> bool {
        matches!(self, Family::Entropic(_)) || self.is_mean()
    }

    fn of_losses(alpha: f64, u1: &LossFunction, u2: &LossFunction) -> Family {
        let power = |u: &LossFunction| match u {
            LossFunction::Identity => Some((1.0, 1.0)),
            LossFunction::Power { scale, exponent } => Some((*scale, *exponent)),
            _ => None,
        };
        if let (Some((a1, b1)), Some((a2, b2))) = (power(u1), power(u2)) {
            if b1 != b2 {
                return Family::Other;
            }
            // v = β(α a1 x⁺^{β−1} − (1−α) a2 x⁻^{β−1}) is a positive multiple of the level-α' score.
            let eff = alpha * a1 / (alpha * a1 + (1.0 - alpha) * a2);
            return match b1 {
                1.0 => Family::Var(eff),
                2.0 => Family::Expectile(eff),
                exponent => Family::Power { alpha: eff, exponent },
            };
        }
        if let (
            LossFunction::FromScore { score: s1, scale: c1, .. },
            LossFunction::FromScore { score: s2, scale: c2, .. },
        ) = (u1, u2)
        {
            // The raw pair integrated from one score reproduces that score exactly.
            if std::sync::Arc::ptr_eq(s1, s2) && *c1 == 1.0 && *c2 == 1.0 {
                return Family::of_score(s1);
            }
        }
        Family::Other
    }

    fn of_score(v: &ScoreFunction) -> Family {
        match v {
            ScoreFunction::Var { alpha } => Family::Var(*alpha),
            ScoreFunction::Expectile { alpha } => Family::Expectile(*alpha),
            ScoreFunction::Entropic { gamma } => Family::Entropic(Gamma::Finite(*gamma)),
            ScoreFunction::FromLosses { alpha, u1, u2 } => Family::of_losses(*alpha, u1, u2),
            ScoreFunction::Tabulated(_) | ScoreFunction::Shifted { .. } => Family::Other,
        }
    }
}

impl RiskMeasure {
    pub fn evaluate(
        &self,
        space: &ProbabilitySpace,
        x: &RandomVariable,
        g: &Partition,
        settings: &SolveSettings,
    ) -> Result<RandomVariable> {
        match self {
            RiskMeasure::Quantile(spec) => conditional_generalized_quantile(space, x, g, spec, settings),
            RiskMeasure::Shortfall(spec) => conditional_shortfall(space, x, g, spec, settings),
            RiskMeasure::Entropic(gamma) => conditional_entropic(space, x, g, *gamma),
            RiskMeasure::Var(alpha) => conditional_var(space, x, g, *alpha),
            RiskMeasure::Expectile(alpha) => conditional_expectile(space, x, g, *alpha),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            RiskMeasure::Quantile(spec) => Family::of_losses(spec.alpha(), spec.u1(), spec.u2()),
            RiskMeasure::Shortfall(spec) => Family::of_score(spec.score()),
            RiskMeasure::Entropic(gamma) => Family::Entropic(*gamma),
            RiskMeasure::Var(alpha) => Family::Var(*alpha),
            RiskMeasure::Expectile(alpha) => Family::Expectile(*alpha),
        }
    }

    /// The confidence level, for measures parametrized by one.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            RiskMeasure::Quantile(spec) => Some(spec.alpha()),
            RiskMeasure::Var(a) | RiskMeasure::Expectile(a) => Some(*a),
            RiskMeasure::Shortfall(spec) => match spec.score() {
                ScoreFunction::Var { alpha } | ScoreFunction::Expectile { alpha } => Some(*alpha),
                _ => None,
            },
            RiskMeasure::Entropic(_) => None,
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(match self {
            RiskMeasure::Quantile(spec) => RiskMeasure::Quantile(spec.with_alpha(alpha)?),
            RiskMeasure::Var(_) => RiskMeasure::Var(alpha),
            RiskMeasure::Expectile(_) => RiskMeasure::Expectile(alpha),
            RiskMeasure::Shortfall(spec) => RiskMeasure::Shortfall(match spec.score() {
                ScoreFunction::Var { .. } => ShortfallSpec::new(ScoreFunction::var(alpha)?)?,
                ScoreFunction::Expectile { .. } => ShortfallSpec::new(ScoreFunction::expectile(alpha)?)?,
                _ => return Err(Error::InvalidFamily(format!("{} has no confidence level", spec.score()))),
            }),
            RiskMeasure::Entropic(_) => {
                return Err(Error::InvalidFamily("entropic measures have no confidence level".into()))
            }
        })
    }

    /// The `(α, u1, u2)` triple whose generalized quantile is this measure.
    pub fn as_risk_spec(&self) -> Option<RiskSpec> {
        match self {
            RiskMeasure::Quantile(spec) => Some(spec.clone()),
            RiskMeasure::Var(a) => RiskSpec::var(*a).ok(),
            RiskMeasure::Expectile(a) => RiskSpec::expectile(*a).ok(),
            RiskMeasure::Shortfall(_) | RiskMeasure::Entropic(_) => None,
        }
    }

    /// The score whose shortfall measure is this measure, if it is finite-valued.
    pub fn as_score(&self) -> Option<ScoreFunction> {
        match self {
            RiskMeasure::Quantile(spec) => Some(spec.derived_score().clone()),
            RiskMeasure::Shortfall(spec) => Some(spec.score().clone()),
            RiskMeasure::Entropic(Gamma::Finite(g)) => ScoreFunction::entropic(*g).ok(),
            RiskMeasure::Entropic(Gamma::Infinity) => None,
            RiskMeasure::Var(a) => ScoreFunction::var(*a).ok(),
            RiskMeasure::Expectile(a) => ScoreFunction::expectile(*a).ok(),
        }
    }

    pub fn fingerprint(&self) -> String {
        match self {
            RiskMeasure::Quantile(spec) => spec.fingerprint(),
            RiskMeasure::Shortfall(spec) => spec.fingerprint(),
            RiskMeasure::Entropic(g) => format!("entropic(gamma={})", g.fingerprint()),
            RiskMeasure::Var(a) => format!("var(alpha={a})"),
            RiskMeasure::Expectile(a) => format!("expectile(alpha={a})"),
        }
    }
}

/// A conditional risk measure applied along a filtration.
#[derive(Debug, Clone)]
pub struct DynamicRiskMeasure {
    pub filtration: Filtration,
    pub measure: RiskMeasure,
}

impl DynamicRiskMeasure {
    pub fn new(filtration: Filtration, measure: RiskMeasure) -> Self {
        Self { filtration, measure }
    }
}

/// `[ρ^{F_0}(X), …, ρ^{F_T}(X)]`.
pub fn dynamic_eval(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    drm: &DynamicRiskMeasure,
    settings: &SolveSettings,
) -> Result<Vec<RandomVariable>> {
    drm.filtration
        .stages()
        .iter()
        .map(|g| {
            let rho = drm.measure.evaluate(space, x, g, settings)?;
            debug_assert!(is_measurable(&rho, g)?);
            Ok(rho)
        })
        .collect()
}

/// Whether the sufficient condition for conditional convexity holds: both
/// losses have `u'(0) = 0` and a second derivative at 0, `u1'` is convex and
/// `u2'` concave on a grid, and `α u1''(0) ≥ (1−α) u2''(0)`.
pub fn convexity_condition(spec: &RiskSpec) -> Result<bool> {
    let (u1, u2) = (spec.u1(), spec.u2());
    if u1.right_deriv(0.0) != 0.0 || u2.right_deriv(0.0) != 0.0 {
        return Ok(false);
    }
    let d1 = u1.second_deriv_at_zero().ok_or(Error::MissingSecondDerivative)?;
    let d2 = u2.second_deriv_at_zero().ok_or(Error::MissingSecondDerivative)?;
    if !d1.is_finite() || !d2.is_finite() {
        return Ok(false);
    }
    let grid = crate::loss::linspace(0.0, CONVEXITY_GRID_BOUND, 501);
    let d1s: Vec<f64> = grid.iter().map(|&x| u1.right_deriv(x)).collect();
    let d2s: Vec<f64> = grid.iter().map(|&x| -u2.right_deriv(x)).collect();
    if !midpoint_convex(&d1s) || !midpoint_convex(&d2s) {
        return Ok(false);
    }
    Ok(spec.alpha() * d1 >= (1.0 - spec.alpha()) * d2)
}

/// Right end of the grid on which [`convexity_condition`] checks derivative shape.
pub const CONVEXITY_GRID_BOUND: f64 = 10.0;

fn midpoint_convex(ys: &[f64]) -> bool {
    ys.windows(3).all(|w| {
        let mid = 0.5 * (w[0] + w[2]);
        w[1] <= mid + 1e-12 * (1.0 + mid.abs())
    })
}
