//! Conditional shortfall risk measures
//!
//! ```text
//! ρ_v^G(X) = essinf{ Z G-measurable : E[v(X − Z) | G] ≤ 0 }
//! ```
//!
//! together with the quantile/shortfall equivalence check and the closed-form
//! special cases (left quantile, expectile, entropic).
//!
//! The VaR case is the left α-quantile `min{z : P(X ≤ z | G) ≥ α}`. This is
//! what the shortfall condition `E[α − 1{X ≤ Z} | G] ≤ 0` gives; a statement
//! of the same example with `P(X ≤ Z | G) ≤ α` would select the opposite
//! inequality and is not what is implemented here.

use std::fmt;

use crate::error::{Error, Result};
use crate::loss::{check_alpha, score_grid, validate_score, ScoreFunction};
use crate::quantile::{conditional_generalized_quantile, RiskSpec, SolveSettings};
use crate::solve::left_root;
use crate::space::{
    conditional_distribution, conditional_expectation, ess_sup_conditional, Distribution, Partition,
    ProbabilitySpace, RandomVariable,
};

/// Half-width of the grid on which [`ShortfallSpec::new`] validates the score.
pub const SCORE_CHECK_BOUND: f64 = 10.0;

/// A shortfall risk measure, identified by its score function.
#[derive(Debug, Clone)]
pub struct ShortfallSpec {
    score: ScoreFunction,
}

impl ShortfallSpec {
    /// Rejects scores that fail the grid membership check.
    pub fn new(score: ScoreFunction) -> Result<Self> {
        let report = validate_score(&score, &score_grid(SCORE_CHECK_BOUND));
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidFamily(format!("score {score}: {:?} ({})", v.condition, v.detail)));
        }
        Ok(Self { score })
    }

    /// `x ↦ v(x − ε)`, which leaves `V` for `ε ≠ 0` and so skips validation.
    pub fn shifted(&self, eps: f64) -> Self {
        Self { score: ScoreFunction::shifted(self.score.clone(), eps) }
    }

    pub fn score(&self) -> &ScoreFunction {
        &self.score
    }

    pub fn fingerprint(&self) -> String {
        format!("shortfall(v={})", self.score)
    }
}

/// `z ↦ E[v(X − z)]` for one conditional distribution.
pub fn expected_score(dist: &Distribution, v: &ScoreFunction, z: f64) -> f64 {
    dist.expect(|x| v.eval(x - z))
}

/// Static shortfall: smallest `z` with `E[v(X − z)] ≤ tol_f`.
pub fn static_shortfall(dist: &Distribution, spec: &ShortfallSpec, settings: &SolveSettings) -> Result<f64> {
    let v = &spec.score;
    let pivot = v.pivot();
    if dist.is_point_mass() {
        return Ok(dist.min() - pivot);
    }
    let candidates: Vec<f64> = dist.support().iter().map(|s| s - pivot).collect();
    // `max − pivot` can round onto the wrong side of a jump in `v`.
    let slack = 4.0 * f64::EPSILON * (dist.max().abs() + pivot.abs() + 1.0);
    left_root(
        |z| expected_score(dist, v, z),
        dist.min() - pivot,
        dist.max() - pivot + slack,
        &candidates,
        settings,
    )
}

/// `ρ_v^G(X)`, one bisection per atom.
pub fn conditional_shortfall(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    spec: &ShortfallSpec,
    settings: &SolveSettings,
) -> Result<RandomVariable> {
    let per_atom = (0..g.num_atoms())
        .map(|a| static_shortfall(&conditional_distribution(space, x, g, a)?, spec, settings))
        .collect::<Result<Vec<_>>>()?;
    g.broadcast(&per_atom)
}

/// Per-outcome comparison of the two solvers.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub quantile: RandomVariable,
    pub shortfall: RandomVariable,
    pub max_discrepancy: f64,
    pub threshold: f64,
}

impl EquivalenceReport {
    pub fn passes(&self) -> bool {
        self.max_discrepancy <= self.threshold
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (max discrepancy {:e}, threshold {:e})",
            if self.passes() { "pass" } else { "fail" },
            self.max_discrepancy,
            self.threshold
        )
    }
}

fn compare(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    qspec: &RiskSpec,
    sspec: &ShortfallSpec,
    settings: &SolveSettings,
) -> Result<EquivalenceReport> {
    let quantile = conditional_generalized_quantile(space, x, g, qspec, settings)?;
    let shortfall = conditional_shortfall(space, x, g, sspec, settings)?;
    let max_discrepancy = quantile.max_abs_diff(&shortfall)?;
    Ok(EquivalenceReport { quantile, shortfall, max_discrepancy, threshold: 2.0 * settings.tol_x })
}

/// Quantile under `(α, u1, u2)` against shortfall under `v = score_from_losses(α, u1, u2)`.
pub fn equivalence_check(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    qspec: &RiskSpec,
    settings: &SolveSettings,
) -> Result<EquivalenceReport> {
    // The derived score is checked against V by construction of the loss family.
    let sspec = ShortfallSpec { score: qspec.derived_score().clone() };
    compare(space, x, g, qspec, &sspec, settings)
}

/// Shortfall under `v` against the quantile of the raw loss pair integrated from `v`.
pub fn reverse_equivalence_check(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    alpha: f64,
    sspec: &ShortfallSpec,
    settings: &SolveSettings,
) -> Result<EquivalenceReport> {
    let qspec = RiskSpec::from_score(alpha, sspec.score())?;
    compare(space, x, g, &qspec, sspec, settings)
}

/// Tolerance on cumulative weights in [`conditional_var`].
pub const CDF_TOLERANCE: f64 = 1e-12;

/// Left α-quantile of each conditional distribution.
pub fn conditional_var(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    alpha: f64,
) -> Result<RandomVariable> {
    check_alpha(alpha)?;
    let per_atom = (0..g.num_atoms())
        .map(|a| {
            let dist = conditional_distribution(space, x, g, a)?;
            let mut cum = 0.0;
            let q = dist
                .iter()
                .find(|&(_, w)| {
                    cum += w;
                    cum >= alpha - CDF_TOLERANCE
                })
                .map_or(dist.max(), |(v, _)| v);
            Ok(q)
        })
        .collect::<Result<Vec<_>>>()?;
    g.broadcast(&per_atom)
}

/// Root of `α E[(X−z)⁺] = (1−α) E[(z−X)⁺]`, solved exactly on the linear piece containing it.
pub fn static_expectile(dist: &Distribution, alpha: f64) -> f64 {
    let support = dist.support();
    let weights = dist.weights();
    let (mut w_below, mut s_below) = (0.0, 0.0);
    let (mut w_above, mut s_above): (f64, f64) =
        (weights.iter().sum(), support.iter().zip(weights).map(|(x, w)| x * w).sum());
    for k in 0..support.len() {
        w_below += weights[k];
        s_below += weights[k] * support[k];
        w_above -= weights[k];
        s_above -= weights[k] * support[k];
        // On [x_k, x_{k+1}] the balance equation is linear in z.
        let z = (alpha * s_above + (1.0 - alpha) * s_below) / (alpha * w_above + (1.0 - alpha) * w_below);
        let upper = support.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if z <= upper {
            return z.clamp(support[0], dist.max());
        }
    }
    dist.max()
}

pub fn conditional_expectile(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    alpha: f64,
) -> Result<RandomVariable> {
    check_alpha(alpha)?;
    let per_atom = (0..g.num_atoms())
        .map(|a| Ok(static_expectile(&conditional_distribution(space, x, g, a)?, alpha)))
        .collect::<Result<Vec<_>>>()?;
    g.broadcast(&per_atom)
}

/// Entropic risk aversion: a finite `γ` or the `+∞` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    Finite(f64),
    Infinity,
}

impl Gamma {
    pub fn fingerprint(&self) -> String {
        match self {
            Gamma::Finite(g) => format!("{g}"),
            Gamma::Infinity => "inf".into(),
        }
    }
}

/// `(1/γ) log E[e^{γX}]`, evaluated as `m/γ + (1/γ) log E[e^{γX − m}]` with `m = max γX`.
pub fn static_entropic(dist: &Distribution, gamma: f64) -> Result<f64> {
    if gamma == 0.0 {
        return Ok(dist.mean());
    }
    let m = dist.iter().map(|(x, _)| gamma * x).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = dist.iter().map(|(x, w)| w * (gamma * x - m).exp()).sum();
    let value = (m + sum.ln()) / gamma;
    if !value.is_finite() {
        return Err(Error::NumericOverflow(format!("entropic value with gamma = {gamma}")));
    }
    // Rounding can push the log-sum-exp a hair outside the support.
    Ok(value.clamp(dist.min(), dist.max()))
}

pub fn conditional_entropic(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    gamma: Gamma,
) -> Result<RandomVariable> {
    match gamma {
        Gamma::Infinity => ess_sup_conditional(space, x, g),
        Gamma::Finite(gm) if !gm.is_finite() => {
            Err(Error::InvalidFamily(format!("entropic gamma must be finite or inf, got {gm}")))
        }
        Gamma::Finite(0.0) => conditional_expectation(space, x, g),
        Gamma::Finite(gm) => {
            let per_atom = (0..g.num_atoms())
                .map(|a| static_entropic(&conditional_distribution(space, x, g, a)?, gm))
                .collect::<Result<Vec<_>>>()?;
            g.broadcast(&per_atom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::LossFunction;

    fn thirds() -> ProbabilitySpace {
        ProbabilitySpace::uniform(3).unwrap()
    }

    fn x123() -> RandomVariable {
        vec![1.0, 2.0, 3.0].into()
    }

    fn a_split() -> Partition {
        Partition::from_atoms(3, vec![vec![0, 1], vec![2]]).unwrap()
    }

    fn discrete_example() -> RiskSpec {
        RiskSpec::new(1.0 / 3.0, LossFunction::quadratic(), LossFunction::exponential(1.0, 1.0).unwrap())
            .unwrap()
    }

    #[test]
    fn shortfall_discrete_example() {
        let spec = ShortfallSpec::new(discrete_example().derived_score().clone()).unwrap();
        let rho = conditional_shortfall(&thirds(), &x123(), &a_split(), &spec, &SolveSettings::default())
            .unwrap();
        assert!(rho.max_abs_diff(&vec![1.0, 1.0, 3.0].into()).unwrap() < 1e-10);
        let triv = conditional_shortfall(&thirds(), &x123(), &Partition::trivial(3), &spec, &SolveSettings::default())
            .unwrap();
        let a = triv.get(0);
        assert!(((a - 1.0).exp() + 2.0 * a - 5.0).abs() < 1e-9);
    }

    #[test]
    fn shortfall_var_and_constants() {
        let s = SolveSettings::default();
        let var = ShortfallSpec::new(ScoreFunction::var(1.0 / 3.0).unwrap()).unwrap();
        let rho = conditional_shortfall(&thirds(), &x123(), &Partition::trivial(3), &var, &s).unwrap();
        assert_eq!(rho.get(0), 1.0);
        let c = RandomVariable::constant(3, -2.5);
        for v in [ScoreFunction::var(0.9).unwrap(), ScoreFunction::entropic(-2.0).unwrap()] {
            let spec = ShortfallSpec::new(v).unwrap();
            let rho = conditional_shortfall(&thirds(), &c, &a_split(), &spec, &s).unwrap();
            assert_eq!(rho, c);
        }
    }

    #[test]
    fn rejects_non_members() {
        let decreasing = ScoreFunction::entropic(1.0).unwrap();
        assert!(ShortfallSpec::new(ScoreFunction::shifted(decreasing, 0.5)).is_err());
    }

    #[test]
    fn equivalence_both_directions() {
        let s = SolveSettings::default();
        let rep = equivalence_check(&thirds(), &x123(), &a_split(), &discrete_example(), &s).unwrap();
        assert!(rep.passes(), "{rep}");
        assert!(rep.max_discrepancy <= 2e-10);
        let spec = ShortfallSpec::new(ScoreFunction::entropic(1.0).unwrap()).unwrap();
        let sp = ProbabilitySpace::new(vec![0.1, 0.4, 0.2, 0.3]).unwrap();
        let x: RandomVariable = vec![-1.0, 2.0, 0.5, 4.0].into();
        let g = Partition::from_atoms(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        for alpha in [0.2, 0.5, 0.9] {
            let rep = reverse_equivalence_check(&sp, &x, &g, alpha, &spec, &s).unwrap();
            assert!(rep.passes(), "alpha {alpha}: {rep}");
        }
    }

    #[test]
    fn score_shift_moves_result() {
        let s = SolveSettings::default();
        let spec = ShortfallSpec::new(ScoreFunction::expectile(0.3).unwrap()).unwrap();
        let sp = ProbabilitySpace::new(vec![0.25, 0.25, 0.5]).unwrap();
        let x: RandomVariable = vec![0.0, 3.0, -1.0].into();
        let g = Partition::trivial(3);
        let base = conditional_shortfall(&sp, &x, &g, &spec, &s).unwrap();
        for eps in [0.1, 0.01] {
            let shifted = conditional_shortfall(&sp, &x, &g, &spec.shifted(eps), &s).unwrap();
            assert!((shifted.get(0) - (base.get(0) - eps)).abs() < 1e-8);
        }
    }

    #[test]
    fn var_examples() {
        let rho = conditional_var(&thirds(), &x123(), &Partition::trivial(3), 1.0 / 3.0).unwrap();
        assert_eq!(rho.values(), &[1.0, 1.0, 1.0]);
        let rho = conditional_var(&thirds(), &x123(), &Partition::discrete(3), 0.99).unwrap();
        assert_eq!(rho, x123());
        assert_eq!(
            conditional_var(&thirds(), &x123(), &Partition::trivial(3), 1.0).unwrap_err(),
            Error::AlphaOutOfRange(1.0)
        );
        // α just above a cumulative weight moves to the next support point.
        let rho = conditional_var(&thirds(), &x123(), &Partition::trivial(3), 0.34).unwrap();
        assert_eq!(rho.get(0), 2.0);
    }

    #[test]
    fn expectile_examples() {
        let sp = ProbabilitySpace::uniform(2).unwrap();
        let rho = conditional_expectile(&sp, &vec![0.0, 1.0].into(), &Partition::trivial(2), 0.8).unwrap();
        assert!((rho.get(0) - 0.8).abs() < 1e-15);
        let half = conditional_expectile(&thirds(), &x123(), &a_split(), 0.5).unwrap();
        let mean = conditional_expectation(&thirds(), &x123(), &a_split()).unwrap();
        assert!(half.max_abs_diff(&mean).unwrap() < 1e-10);
        let q = conditional_generalized_quantile(
            &thirds(),
            &x123(),
            &Partition::trivial(3),
            &RiskSpec::expectile(0.15).unwrap(),
            &SolveSettings::default(),
        )
        .unwrap();
        let e = conditional_expectile(&thirds(), &x123(), &Partition::trivial(3), 0.15).unwrap();
        assert!(q.max_abs_diff(&e).unwrap() < 1e-9);
    }

    #[test]
    fn entropic_examples() {
        let sp = ProbabilitySpace::uniform(2).unwrap();
        let x: RandomVariable = vec![0.0, 1.0].into();
        let rho = conditional_entropic(&sp, &x, &Partition::trivial(2), Gamma::Finite(1.0)).unwrap();
        assert!((rho.get(0) - ((1.0 + 1f64.exp()) / 2.0).ln()).abs() < 1e-15);
        assert!((rho.get(0) - 0.620115).abs() < 1e-6);
        let mean = conditional_entropic(&thirds(), &x123(), &a_split(), Gamma::Finite(0.0)).unwrap();
        assert_eq!(mean.values(), &[1.5, 1.5, 3.0]);
        let sup = conditional_entropic(&thirds(), &x123(), &a_split(), Gamma::Infinity).unwrap();
        assert_eq!(sup.values(), &[2.0, 2.0, 3.0]);
        assert!(conditional_entropic(&thirds(), &x123(), &a_split(), Gamma::Finite(f64::NAN)).is_err());
    }

    #[test]
    fn entropic_survives_large_gamma() {
        let sp = ProbabilitySpace::uniform(2).unwrap();
        let x: RandomVariable = vec![0.0, 1000.0].into();
        let rho = conditional_entropic(&sp, &x, &Partition::trivial(2), Gamma::Finite(5.0)).unwrap();
        assert!((rho.get(0) - (1000.0 - 2f64.ln() / 5.0)).abs() < 1e-9);
        let rho = conditional_entropic(&sp, &x, &Partition::trivial(2), Gamma::Finite(-5.0)).unwrap();
        assert!((rho.get(0) - 2f64.ln() / 5.0).abs() < 1e-9);
    }

    #[test]
    fn entropic_closed_form_matches_bisection() {
        let sp = ProbabilitySpace::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let x: RandomVariable = vec![-2.0, 0.5, 1.0, 3.0].into();
        let g = Partition::from_atoms(4, vec![vec![0, 3], vec![1, 2]]).unwrap();
        for gamma in [0.1, 1.0, 5.0, -1.0] {
            let closed = conditional_entropic(&sp, &x, &g, Gamma::Finite(gamma)).unwrap();
            let spec = ShortfallSpec::new(ScoreFunction::entropic(gamma).unwrap()).unwrap();
            let bis = conditional_shortfall(&sp, &x, &g, &spec, &SolveSettings::default()).unwrap();
            assert!(closed.max_abs_diff(&bis).unwrap() < 1e-9, "gamma {gamma}");
        }
    }
}
