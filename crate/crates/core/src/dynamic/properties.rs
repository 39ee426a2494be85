//! Randomized property suites for conditional and dynamic risk measures.
//!
//! Every property is phrased as a nonnegative violation magnitude computed
//! from a self-contained [`Witness`]. A suite draws one witness per trial,
//! evaluates the magnitude, and keeps the worst trial. Replaying a witness
//! through [`violation`] recomputes the same number.
//!
//! Sequential consistency is checked as the sandwich
//! `essinf ρ^{F_t}(X) ≤ ρ^{F_0}(X) ≤ esssup ρ^{F_t}(X)`, which is equivalent
//! to "`ρ^{F_t}(X) ≤ 0` everywhere implies `ρ^{F_0}(X) ≤ 0`, and likewise for
//! `≥ 0`". The forward implication "`ρ^{F_0}(X) ≤ 0` implies `ρ^{F_t}(X) ≤ 0`"
//! already fails for the conditional mean.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::measure::{convexity_condition, Family, RiskMeasure};
use super::random::{trial_rng, InstanceGenerator};
use crate::error::{Error, Result};
use crate::quantile::{
    atom_objective, brute_force_quantile, foc_gaps, joint_brute_force, joint_grid, RiskSpec, SolveSettings,
};
use crate::shortfall::{
    conditional_shortfall, equivalence_check, reverse_equivalence_check, Gamma,
    ShortfallSpec,
};
use crate::space::{conditional_distribution, Filtration, Partition, ProbabilitySpace, RandomVariable};

/// Index sequence used by the continuity check.
pub const CONTINUITY_STEPS: [u32; 13] = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000];
/// Required gap `|ρ(X_n) − ρ(X)|` at the last step.
pub const CONTINUITY_TARGET: f64 = 1e-6;
/// Grid points per atom in the separability check.
pub const SEPARABILITY_POINTS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    AlphaMonotone,
    Monotonicity,
    TranslationInvariance,
    Normalization,
    ConditionalConvexity,
    PositiveHomogeneity,
    ContinuityFromBelow,
    SequentialConsistency,
    /// Extension: the sandwich between every pair of stages `s < t`.
    SequentialConsistencyPairwise,
    TowerProperty,
    Supermartingale,
    Equivalence,
    OracleAgreement,
    Separability,
    FocSoundness,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 15] = [
        PropertyKind::AlphaMonotone,
        PropertyKind::Monotonicity,
        PropertyKind::TranslationInvariance,
        PropertyKind::Normalization,
        PropertyKind::ConditionalConvexity,
        PropertyKind::PositiveHomogeneity,
        PropertyKind::ContinuityFromBelow,
        PropertyKind::SequentialConsistency,
        PropertyKind::SequentialConsistencyPairwise,
        PropertyKind::TowerProperty,
        PropertyKind::Supermartingale,
        PropertyKind::Equivalence,
        PropertyKind::OracleAgreement,
        PropertyKind::Separability,
        PropertyKind::FocSoundness,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PropertyKind::AlphaMonotone => "alpha_monotone",
            PropertyKind::Monotonicity => "monotonicity",
            PropertyKind::TranslationInvariance => "translation_invariance",
            PropertyKind::Normalization => "normalization",
            PropertyKind::ConditionalConvexity => "conditional_convexity",
            PropertyKind::PositiveHomogeneity => "positive_homogeneity",
            PropertyKind::ContinuityFromBelow => "continuity_from_below",
            PropertyKind::SequentialConsistency => "sequential_consistency",
            PropertyKind::SequentialConsistencyPairwise => "sequential_consistency_pairwise",
            PropertyKind::TowerProperty => "tower_property",
            PropertyKind::Supermartingale => "supermartingale",
            PropertyKind::Equivalence => "equivalence",
            PropertyKind::OracleAgreement => "oracle_agreement",
            PropertyKind::Separability => "separability",
            PropertyKind::FocSoundness => "foc_soundness",
        }
    }

    /// Properties grouped by the CLI suite names.
    pub fn suite(name: &str) -> Option<Vec<PropertyKind>> {
        use PropertyKind::*;
        let kinds = match name {
            "axioms" => vec![
                AlphaMonotone,
                Monotonicity,
                TranslationInvariance,
                Normalization,
                ConditionalConvexity,
                PositiveHomogeneity,
                ContinuityFromBelow,
            ],
            "equivalence" => vec![Equivalence, OracleAgreement, Separability],
            "foc" => vec![FocSoundness],
            "consistency" => vec![SequentialConsistency, SequentialConsistencyPairwise, TowerProperty, Supermartingale],
            "all" => PropertyKind::ALL.to_vec(),
            _ => return None,
        };
        Some(kinds)
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What the theory says about a property for a given measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    MustHold,
    /// The property fails for this family; the suite searches for a witness.
    MustFail,
    /// No claim either way; the suite reports what it finds.
    Explore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnSuite,
    Violated,
    NotApplicable,
}

/// How a report counts toward a run's exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Pass,
    /// A must-fail search found no witness within its budget.
    WitnessNotFound,
    /// A must-hold property was violated.
    Violation,
}

/// A self-contained instance: everything needed to recompute one violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Trial index within the suite, `None` for fixed instances.
    pub trial: Option<u64>,
    pub probs: Vec<f64>,
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    /// Atoms of the conditioning partition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
    /// Atoms of every stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filtration: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<(f64, f64)>,
}

impl Witness {
    /// A bare `(space, X, G)` instance.
    pub fn fixed(space: &ProbabilitySpace, x: &RandomVariable, g: &Partition) -> Self {
        Witness {
            trial: None,
            probs: space.probs().to_vec(),
            x: x.values().to_vec(),
            y: None,
            lambda: None,
            partition: Some(g.atoms().to_vec()),
            filtration: None,
            stage: None,
            alphas: None,
        }
    }

    fn base(trial: u64, space: &ProbabilitySpace, x: &RandomVariable) -> Self {
        Witness {
            trial: Some(trial),
            probs: space.probs().to_vec(),
            x: x.values().to_vec(),
            y: None,
            lambda: None,
            partition: None,
            filtration: None,
            stage: None,
            alphas: None,
        }
    }

    pub fn space(&self) -> Result<ProbabilitySpace> {
        ProbabilitySpace::new(self.probs.clone())
    }

    pub fn x(&self) -> Result<RandomVariable> {
        RandomVariable::new(self.x.clone())
    }

    fn rv(&self, field: &Option<Vec<f64>>, name: &str) -> Result<RandomVariable> {
        RandomVariable::new(field.clone().ok_or_else(|| missing(name))?)
    }

    pub fn y(&self) -> Result<RandomVariable> {
        self.rv(&self.y, "y")
    }

    pub fn lambda(&self) -> Result<RandomVariable> {
        self.rv(&self.lambda, "lambda")
    }

    pub fn partition(&self) -> Result<Partition> {
        Partition::from_atoms(self.probs.len(), self.partition.clone().ok_or_else(|| missing("partition"))?)
    }

    pub fn filtration(&self) -> Result<Filtration> {
        let stages = self.filtration.clone().ok_or_else(|| missing("filtration"))?;
        Filtration::new(
            stages
                .into_iter()
                .map(|atoms| Partition::from_atoms(self.probs.len(), atoms))
                .collect::<Result<_>>()?,
        )
    }

    pub fn alphas(&self) -> Result<(f64, f64)> {
        self.alphas.ok_or_else(|| missing("alphas"))
    }
}

fn missing(field: &str) -> Error {
    Error::InvalidSettings(format!("witness has no `{field}`"))
}

fn filtration_atoms(f: &Filtration) -> Vec<Vec<Vec<usize>>> {
    f.stages().iter().map(|p| p.atoms().to_vec()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: PropertyKind,
    pub measure: String,
    pub expectation: Expectation,
    pub verdict: Verdict,
    pub max_violation_magnitude: f64,
    /// Magnitudes above this count as violations.
    pub threshold: f64,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PropertyReport {
    pub fn outcome(&self) -> Outcome {
        match (self.expectation, self.verdict) {
            (Expectation::MustHold, Verdict::Violated) => Outcome::Violation,
            (Expectation::MustFail, Verdict::HoldsOnSuite) => Outcome::WitnessNotFound,
            _ => Outcome::Pass,
        }
    }
}

/// Settings for a property suite.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub generator: InstanceGenerator,
    pub settings: SolveSettings,
    /// Must-hold properties fail above this magnitude.
    pub assertion_tol: f64,
    /// Other properties count a witness only above this magnitude.
    pub witness_threshold: f64,
    /// Extra `(space, X, G)` instances checked by the single-partition properties.
    pub fixed: Vec<Witness>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 500,
            generator: InstanceGenerator::default(),
            settings: SolveSettings::default(),
            assertion_tol: 1e-8,
            witness_threshold: 1e-4,
            fixed: Vec::new(),
        }
    }
}

/// Whether the property can be evaluated for this measure at all.
pub fn applicable(kind: PropertyKind, measure: &RiskMeasure) -> bool {
    match kind {
        PropertyKind::AlphaMonotone => measure.alpha().is_some(),
        PropertyKind::Equivalence
        | PropertyKind::OracleAgreement
        | PropertyKind::Separability
        | PropertyKind::FocSoundness => measure.as_score().is_some(),
        _ => true,
    }
}

/// The theoretical status of `kind` for `measure`.
pub fn expectation(kind: PropertyKind, measure: &RiskMeasure) -> Expectation {
    use Expectation::*;
    let family = measure.family();
    match kind {
        PropertyKind::ConditionalConvexity => match family {
            Family::Entropic(Gamma::Infinity) => MustHold,
            Family::Entropic(Gamma::Finite(g)) if g >= 0.0 => MustHold,
            Family::Expectile(a) if a >= 0.5 => MustHold,
            Family::Expectile(_) => MustFail,
            _ => match measure.as_risk_spec().map(|s| convexity_condition(&s)) {
                Some(Ok(true)) => MustHold,
                _ => Explore,
            },
        },
        PropertyKind::PositiveHomogeneity => match family {
            Family::Var(_) | Family::Expectile(_) | Family::Power { .. } => MustHold,
            Family::Entropic(Gamma::Infinity) => MustHold,
            Family::Entropic(Gamma::Finite(0.0)) => MustHold,
            Family::Entropic(_) => MustFail,
            Family::Other => Explore,
        },
        PropertyKind::TowerProperty => {
            if family.is_entropic() {
                MustHold
            } else if family == Family::Other {
                Explore
            } else {
                MustFail
            }
        }
        PropertyKind::Supermartingale => match family {
            _ if family.is_mean() => MustHold,
            Family::Entropic(Gamma::Infinity) => MustHold,
            Family::Entropic(Gamma::Finite(g)) if g >= 0.0 => MustHold,
            Family::Other => Explore,
            _ => MustFail,
        },
        _ => MustHold,
    }
}

/// Draws the instance for one trial.
pub fn generate(kind: PropertyKind, gen: &InstanceGenerator, seed: u64, trial: u64) -> Witness {
    let mut rng = trial_rng(seed, trial);
    let n = gen.outcomes(&mut rng);
    let space = gen.space(&mut rng, n);
    let x = gen.variable(&mut rng, n);
    let mut w = Witness::base(trial, &space, &x);
    let g = gen.partition(&mut rng, n);
    use PropertyKind::*;
    match kind {
        AlphaMonotone => {
            let a1 = rng.gen_range(0.05..0.95);
            let a2 = rng.gen_range(a1..=0.95);
            w.alphas = Some((a1, a2));
        }
        Monotonicity => {
            let noise = gen.nonnegative(&mut rng, n, 2.0);
            // Some coordinates unchanged so that X ≤ Y is not strict.
            let y: Vec<f64> = x
                .values()
                .iter()
                .zip(noise.values())
                .map(|(a, d)| if rng.gen_bool(0.3) { *a } else { a + d })
                .collect();
            w.y = Some(y);
        }
        TranslationInvariance => {
            w.y = Some(gen.measurable(&mut rng, &g, -gen.value_bound, gen.value_bound).into_values());
        }
        Normalization => w.x = vec![0.0; n],
        ConditionalConvexity => {
            w.y = Some(gen.variable(&mut rng, n).into_values());
            w.lambda = Some(gen.measurable(&mut rng, &g, 0.0, 1.0).into_values());
        }
        PositiveHomogeneity => {
            w.lambda = Some(gen.measurable(&mut rng, &g, 0.0, 3.0).into_values());
        }
        ContinuityFromBelow => w.y = Some(gen.nonnegative(&mut rng, n, 1.0).into_values()),
        SequentialConsistency | SequentialConsistencyPairwise | TowerProperty | Supermartingale => {
            let f = gen.filtration(&mut rng, n);
            let horizon = f.horizon();
            w.stage = Some(if horizon >= 2 { rng.gen_range(1..horizon) } else { horizon });
            w.filtration = Some(filtration_atoms(&f));
        }
        Equivalence => w.alphas = Some((rng.gen_range(0.05..0.95), 0.0)),
        OracleAgreement | FocSoundness => {}
        Separability => {
            let k = rng.gen_range(1..=n.min(3));
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            w.partition = Some(Partition::from_labels(&labels).expect("labels cover outcomes").atoms().to_vec());
            return w;
        }
    }
    if w.partition.is_none() && w.filtration.is_none() {
        w.partition = Some(g.atoms().to_vec());
    }
    w
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// The loss triple used for oracle and first-order checks on a measure.
fn oracle_spec(measure: &RiskMeasure) -> Result<RiskSpec> {
    match measure.as_risk_spec() {
        Some(spec) => Ok(spec),
        None => {
            let v = measure.as_score().ok_or_else(|| Error::InvalidFamily("no finite score".into()))?;
            // Any level works: the integrated pair returns exactly this score.
            RiskSpec::from_score(0.5, &v)
        }
    }
}

/// Violation magnitude of `kind` on one instance; zero means no violation.
pub fn violation(
    kind: PropertyKind,
    measure: &RiskMeasure,
    w: &Witness,
    settings: &SolveSettings,
) -> Result<f64> {
    let space = w.space()?;
    let x = w.x()?;
    let rho = |m: &RiskMeasure, v: &RandomVariable, g: &Partition| m.evaluate(&space, v, g, settings);
    use PropertyKind::*;
    match kind {
        AlphaMonotone => {
            let g = w.partition()?;
            let (a1, a2) = w.alphas()?;
            let r1 = rho(&measure.with_alpha(a1)?, &x, &g)?;
            let r2 = rho(&measure.with_alpha(a2)?, &x, &g)?;
            Ok(max_of(r1.sub(&r2)?.into_values()))
        }
        Monotonicity => {
            let g = w.partition()?;
            let diff = rho(measure, &x, &g)?.sub(&rho(measure, &w.y()?, &g)?)?;
            Ok(max_of(diff.into_values()))
        }
        TranslationInvariance => {
            let g = w.partition()?;
            let h = w.y()?;
            let shifted = rho(measure, &x.add(&h)?, &g)?;
            let expected = rho(measure, &x, &g)?.add(&h)?;
            shifted.max_abs_diff(&expected)
        }
        Normalization => {
            let g = w.partition()?;
            Ok(max_of(rho(measure, &RandomVariable::zeros(x.len()), &g)?.values().iter().map(|v| v.abs())))
        }
        ConditionalConvexity => {
            let g = w.partition()?;
            let (y, lam) = (w.y()?, w.lambda()?);
            let one_minus = lam.map(|l| 1.0 - l);
            let mix = lam.mul(&x)?.add(&one_minus.mul(&y)?)?;
            let lhs = rho(measure, &mix, &g)?;
            let rhs = lam.mul(&rho(measure, &x, &g)?)?.add(&one_minus.mul(&rho(measure, &y, &g)?)?)?;
            Ok(max_of(lhs.sub(&rhs)?.into_values()))
        }
        PositiveHomogeneity => {
            let g = w.partition()?;
            let lam = w.lambda()?;
            let lhs = rho(measure, &lam.mul(&x)?, &g)?;
            lhs.max_abs_diff(&lam.mul(&rho(measure, &x, &g)?)?)
        }
        ContinuityFromBelow => {
            let g = w.partition()?;
            let d = w.y()?;
            let limit = rho(measure, &x, &g)?;
            let mut worst: f64 = 0.0;
            let mut prev: Option<RandomVariable> = None;
            for &n in &CONTINUITY_STEPS {
                let n = f64::from(n);
                let xn = x.sub(&d.scale(1.0 / (n * n)))?;
                let r = rho(measure, &xn, &g)?;
                if let Some(p) = &prev {
                    worst = worst.max(max_of(p.sub(&r)?.into_values()));
                }
                // The deterministic sequence X − 1/n moves ρ by exactly 1/n.
                let exact = rho(measure, &x.shift(-1.0 / n), &g)?;
                worst = worst.max(exact.max_abs_diff(&limit.shift(-1.0 / n))?);
                prev = Some(r);
            }
            let gap = prev.expect("nonempty steps").max_abs_diff(&limit)?;
            Ok(worst.max(gap - CONTINUITY_TARGET))
        }
        SequentialConsistency | SequentialConsistencyPairwise => {
            let f = w.filtration()?;
            let stages = f
                .stages()
                .iter()
                .map(|g| rho(measure, &x, g))
                .collect::<Result<Vec<_>>>()?;
            let anchors: Vec<usize> = if kind == SequentialConsistency { vec![0] } else { (0..f.horizon()).collect() };
            let mut worst: f64 = 0.0;
            for &s in &anchors {
                for t in s + 1..=f.horizon() {
                    for atom in f.stage(s).atoms() {
                        let anchor = stages[s].get(atom[0]);
                        let later = atom.iter().map(|&i| stages[t].get(i));
                        let lo = later.clone().fold(f64::INFINITY, f64::min);
                        let hi = later.fold(f64::NEG_INFINITY, f64::max);
                        worst = worst.max(anchor - hi).max(lo - anchor);
                    }
                }
            }
            Ok(worst)
        }
        TowerProperty => {
            let f = w.filtration()?;
            let t = w.stage.ok_or_else(|| missing("stage"))?;
            let trivial = f.stage(0);
            let inner = rho(measure, &x, f.stage(t))?;
            rho(measure, &inner, trivial)?.max_abs_diff(&rho(measure, &x, trivial)?)
        }
        Supermartingale => {
            let f = w.filtration()?;
            let r0 = rho(measure, &x, f.stage(0))?.get(0);
            let mut worst: f64 = 0.0;
            for t in 1..=f.horizon() {
                let mean = space.expectation(&rho(measure, &x, f.stage(t))?)?;
                worst = worst.max(mean - r0);
            }
            Ok(worst)
        }
        Equivalence => {
            let g = w.partition()?;
            let report = match measure.as_risk_spec() {
                Some(spec) => equivalence_check(&space, &x, &g, &spec, settings)?,
                None => {
                    let v = measure.as_score().ok_or_else(|| missing("score"))?;
                    let alpha = w.alphas.map_or(0.5, |a| a.0);
                    reverse_equivalence_check(&space, &x, &g, alpha, &ShortfallSpec::new(v)?, settings)?
                }
            };
            Ok(report.max_discrepancy)
        }
        OracleAgreement => {
            let g = w.partition()?;
            let solved = rho(measure, &x, &g)?;
            if let RiskMeasure::Entropic(Gamma::Finite(gamma)) = measure {
                let bisected = conditional_shortfall(
                    &space,
                    &x,
                    &g,
                    &ShortfallSpec::new(crate::loss::ScoreFunction::entropic(*gamma)?)?,
                    settings,
                )?;
                return solved.max_abs_diff(&bisected);
            }
            let step = settings.grid_step_for(x.max() - x.min());
            let brute = brute_force_quantile(&space, &x, &g, &oracle_spec(measure)?, step, settings.tol_f)?;
            Ok((solved.max_abs_diff(&brute)? - step).max(0.0))
        }
        Separability => {
            let g = w.partition()?;
            let spec = oracle_spec(measure)?;
            let joint = joint_brute_force(&space, &x, &g, &spec, SEPARABILITY_POINTS, settings.tol_f)?;
            // Per-atom minimization on the same grids.
            let per_atom = (0..g.num_atoms())
                .map(|a| {
                    let dist = conditional_distribution(&space, &x, &g, a)?;
                    let grid = joint_grid(&dist, SEPARABILITY_POINTS);
                    let values: Vec<f64> = grid.iter().map(|&z| atom_objective(&dist, &spec, z)).collect();
                    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
                    let k = values.iter().position(|&v| v <= best + settings.tol_f).expect("nonempty");
                    Ok(grid[k])
                })
                .collect::<Result<Vec<_>>>()?;
            joint.max_abs_diff(&g.broadcast(&per_atom)?)
        }
        FocSoundness => {
            let g = w.partition()?;
            let solved = rho(measure, &x, &g)?;
            let gaps = foc_gaps(&space, &x, &solved, &g, &oracle_spec(measure)?)?;
            Ok(max_of(gaps.iter().map(|gap| gap.worst())))
        }
    }
}

fn uses_fixed(kind: PropertyKind) -> bool {
    matches!(
        kind,
        PropertyKind::Equivalence | PropertyKind::OracleAgreement | PropertyKind::FocSoundness
    )
}

/// Runs one property suite. Trials run in parallel; the aggregate is the
/// maximum magnitude, ties going to the lowest trial.
pub fn run_property(kind: PropertyKind, measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    let expectation = expectation(kind, measure);
    let threshold = match expectation {
        Expectation::MustHold => config.assertion_tol,
        _ => config.witness_threshold,
    };
    let mut report = PropertyReport {
        property: kind,
        measure: measure.fingerprint(),
        expectation,
        verdict: Verdict::NotApplicable,
        max_violation_magnitude: 0.0,
        threshold,
        trials: 0,
        witness: None,
        note: None,
    };
    if !applicable(kind, measure) {
        report.note = Some("not defined for this measure".into());
        return Ok(report);
    }
    let mut instances: Vec<Witness> = if uses_fixed(kind) { config.fixed.clone() } else { Vec::new() };
    instances.extend((0..config.trials as u64).map(|t| generate(kind, &config.generator, config.seed, t)));
    let magnitudes = instances
        .par_iter()
        .map(|w| violation(kind, measure, w, &config.settings))
        .collect::<Result<Vec<f64>>>()?;
    let (worst, magnitude) = magnitudes
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, m)| if m > best.1 { (i, m) } else { best });
    report.trials = instances.len();
    report.max_violation_magnitude = magnitude.max(0.0);
    if magnitude > threshold {
        report.verdict = Verdict::Violated;
        report.witness = Some(instances.swap_remove(worst));
    } else {
        report.verdict = Verdict::HoldsOnSuite;
        if kind == PropertyKind::SequentialConsistencyPairwise {
            report.note = Some("extension: stage-to-stage form of the F_0-anchored check".into());
        }
        if expectation == Expectation::MustFail {
            report.note = Some(format!(
                "no witness above {threshold:e} in {} trials; absence of a witness is not a proof",
                report.trials
            ));
        }
    }
    Ok(report)
}

/// Recomputes the magnitude recorded in a report from its witness.
pub fn replay(report: &PropertyReport, measure: &RiskMeasure, settings: &SolveSettings) -> Result<Option<f64>> {
    report.witness.as_ref().map(|w| violation(report.property, measure, w, settings)).transpose()
}

pub fn check_monotone_alpha(measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    run_property(PropertyKind::AlphaMonotone, measure, config)
}

pub fn check_monotonicity(measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    run_property(PropertyKind::Monotonicity, measure, config)
}

pub fn check_translation_invariance(measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    run_property(PropertyKind::TranslationInvariance, measure, config)
}

pub fn check_normalization(measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    run_property(PropertyKind::Normalization, measure, config)
}

pub fn check_conditional_convexity(measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    run_property(PropertyKind::ConditionalConvexity, measure, config)
}

pub fn check_positive_homogeneity(measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    run_property(PropertyKind::PositiveHomogeneity, measure, config)
}

pub fn check_sequential_consistency(measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    run_property(PropertyKind::SequentialConsistency, measure, config)
}

pub fn check_tower_property(measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    run_property(PropertyKind::TowerProperty, measure, config)
}

pub fn check_supermartingale(measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    run_property(PropertyKind::Supermartingale, measure, config)
}

pub fn check_continuity_from_below(measure: &RiskMeasure, config: &SuiteConfig) -> Result<PropertyReport> {
    run_property(PropertyKind::ContinuityFromBelow, measure, config)
}

/// Share of instances on which shifting the solver output by `bump` on one
/// atom makes the first-order check fail at `tol`.
pub fn foc_perturbation_rate(
    spec: &RiskSpec,
    instances: &[Witness],
    bump: f64,
    tol: f64,
    settings: &SolveSettings,
) -> Result<f64> {
    if instances.is_empty() {
        return Ok(1.0);
    }
    let mut detected = 0usize;
    for w in instances {
        let (space, x, g) = (w.space()?, w.x()?, w.partition()?);
        let mut rho = crate::quantile::conditional_generalized_quantile(&space, &x, &g, spec, settings)?
            .into_values();
        let atom = w.trial.unwrap_or(0) as usize % g.num_atoms();
        for &i in &g.atoms()[atom] {
            rho[i] += bump;
        }
        let gaps = foc_gaps(&space, &x, &RandomVariable::new(rho)?, &g, spec)?;
        if gaps.iter().any(|gap| gap.worst() > tol) {
            detected += 1;
        }
    }
    Ok(detected as f64 / instances.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::LossFunction;

    fn config(trials: usize) -> SuiteConfig {
        SuiteConfig { trials, ..SuiteConfig::default() }
    }

    #[test]
    fn literal_forward_implication_fails_for_the_mean() {
        // ρ_0(X) = −0.5 ≤ 0 but ρ_1(X) = X takes the value 1 > 0.
        let space = ProbabilitySpace::uniform(2).unwrap();
        let x: RandomVariable = vec![-2.0, 1.0].into();
        let mean = RiskMeasure::Entropic(Gamma::Finite(0.0));
        let settings = SolveSettings::default();
        let r0 = mean.evaluate(&space, &x, &Partition::trivial(2), &settings).unwrap();
        let r1 = mean.evaluate(&space, &x, &Partition::discrete(2), &settings).unwrap();
        assert!(r0.get(0) <= 0.0);
        assert!(r1.max() > 0.0);
        // The sandwich form holds on the same instance.
        let f = Filtration::new(vec![Partition::trivial(2), Partition::discrete(2)]).unwrap();
        let mut w = Witness::fixed(&space, &x, &Partition::trivial(2));
        w.filtration = Some(filtration_atoms(&f));
        assert_eq!(violation(PropertyKind::SequentialConsistency, &mean, &w, &settings).unwrap(), 0.0);
    }

    #[test]
    fn translation_example() {
        let space = ProbabilitySpace::uniform(3).unwrap();
        let x: RandomVariable = vec![1.0, 2.0, 3.0].into();
        let g = Partition::from_atoms(3, vec![vec![0, 1], vec![2]]).unwrap();
        let spec = RiskSpec::new(1.0 / 3.0, LossFunction::quadratic(), LossFunction::exponential(1.0, 1.0).unwrap())
            .unwrap();
        let m = RiskMeasure::Quantile(spec);
        let h: RandomVariable = vec![5.0, 5.0, -2.0].into();
        let r = m.evaluate(&space, &x.add(&h).unwrap(), &g, &SolveSettings::default()).unwrap();
        assert!(r.max_abs_diff(&vec![6.0, 6.0, 1.0].into()).unwrap() < 1e-9);
    }

    #[test]
    fn axioms_hold_for_expectile() {
        let m = RiskMeasure::Quantile(RiskSpec::expectile(0.7).unwrap());
        for kind in PropertyKind::suite("axioms").unwrap() {
            let r = run_property(kind, &m, &config(60)).unwrap();
            assert_eq!(r.verdict, Verdict::HoldsOnSuite, "{kind}: {:?}", r);
        }
    }

    #[test]
    fn convexity_witness_for_low_expectile() {
        let m = RiskMeasure::Expectile(0.3);
        let r = run_property(PropertyKind::ConditionalConvexity, &m, &config(1000)).unwrap();
        assert_eq!(r.expectation, Expectation::MustFail);
        assert_eq!(r.verdict, Verdict::Violated);
        let replayed = replay(&r, &m, &SolveSettings::default()).unwrap().unwrap();
        assert!(replayed >= 0.5 * r.max_violation_magnitude);
    }

    #[test]
    fn homogeneity_witness_for_entropic() {
        let m = RiskMeasure::Entropic(Gamma::Finite(1.0));
        let r = run_property(PropertyKind::PositiveHomogeneity, &m, &config(50)).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.outcome(), Outcome::Pass);
    }

    #[test]
    fn tower_property() {
        let ent = RiskMeasure::Entropic(Gamma::Finite(2.0));
        let r = run_property(PropertyKind::TowerProperty, &ent, &config(200)).unwrap();
        assert!(r.max_violation_magnitude <= 1e-9, "{r:?}");
        let exp = RiskMeasure::Expectile(0.8);
        let r = run_property(PropertyKind::TowerProperty, &exp, &config(1000)).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.max_violation_magnitude >= 1e-4);
    }

    #[test]
    fn supermartingale() {
        let ent = RiskMeasure::Entropic(Gamma::Finite(1.0));
        let r = run_property(PropertyKind::Supermartingale, &ent, &config(200)).unwrap();
        assert_eq!(r.verdict, Verdict::HoldsOnSuite);
        let exp = RiskMeasure::Expectile(0.8);
        let r = run_property(PropertyKind::Supermartingale, &exp, &config(1000)).unwrap();
        assert_eq!(r.verdict, Verdict::Violated, "{r:?}");
    }

    #[test]
    fn sequential_consistency_all_forms() {
        for m in [
            RiskMeasure::Var(0.3),
            RiskMeasure::Expectile(0.7),
            RiskMeasure::Entropic(Gamma::Finite(1.0)),
            RiskMeasure::Quantile(RiskSpec::power(0.6, 1.5).unwrap()),
        ] {
            for kind in [PropertyKind::SequentialConsistency, PropertyKind::SequentialConsistencyPairwise] {
                let r = run_property(kind, &m, &config(100)).unwrap();
                assert_eq!(r.verdict, Verdict::HoldsOnSuite, "{kind} {}", m.fingerprint());
            }
        }
    }

    #[test]
    fn alpha_monotone_not_applicable_to_entropic() {
        let r = run_property(PropertyKind::AlphaMonotone, &RiskMeasure::Entropic(Gamma::Infinity), &config(10))
            .unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);
        assert_eq!(r.outcome(), Outcome::Pass);
    }

    #[test]
    fn suites_are_deterministic() {
        let m = RiskMeasure::Expectile(0.3);
        let a = run_property(PropertyKind::ConditionalConvexity, &m, &config(300)).unwrap();
        let b = run_property(PropertyKind::ConditionalConvexity, &m, &config(300)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn entropic_dynamic_matches_closed_form() {
        let gen = InstanceGenerator::default();
        let w = generate(PropertyKind::TowerProperty, &gen, 1, 0);
        let (space, x, f) = (w.space().unwrap(), w.x().unwrap(), w.filtration().unwrap());
        let drm = super::super::DynamicRiskMeasure::new(f.clone(), RiskMeasure::Entropic(Gamma::Finite(1.0)));
        let stages = super::super::dynamic_eval(&space, &x, &drm, &SolveSettings::default()).unwrap();
        for (g, rho) in f.stages().iter().zip(&stages) {
            for atom in g.atoms() {
                let mass: f64 = atom.iter().map(|&i| space.prob(i)).sum();
                let m: f64 = atom.iter().map(|&i| space.prob(i) * x.get(i).exp()).sum();
                assert!((rho.get(atom[0]) - (m / mass).ln()).abs() < 1e-12);
            }
        }
    }
}
