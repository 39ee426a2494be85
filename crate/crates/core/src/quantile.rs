//! Conditional generalized quantiles: the asymmetric expected loss
//!
//! ```text
//! π_α(X, Z) = α E[u1((X − Z)⁺)] + (1 − α) E[u2((X − Z)⁻)]
//! ```
//!
//! minimized over `G`-measurable `Z`, with the left endpoint of the argmin
//! taken when the minimizer is not unique.
//!
//! The objective separates over the atoms of `G`, so the conditional problem
//! is one static problem per conditional distribution. Each static problem is
//! solved by bisection on the non-increasing first-order map
//!
//! ```text
//! g(x) = α E[u1'₋(X − x); X > x] − (1 − α) E[u2'₊(x − X); X ≤ x]
//! ```
//!
//! which is minus the right derivative of `x ↦ π_α(X, x)`. The brute-force
//! oracles minimize `π_α` directly on a grid and share no code with it.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::loss::{linspace, score_from_losses, LossFunction, ScoreFunction};
use crate::solve::left_root;
use crate::space::{
    check_len, conditional_distribution, is_measurable, Distribution, Partition, ProbabilitySpace,
    RandomVariable,
};

/// Confidence level together with the two loss functions.
#[derive(Debug, Clone)]
pub struct RiskSpec {
    alpha: f64,
    u1: Arc<LossFunction>,
    u2: Arc<LossFunction>,
    score: ScoreFunction,
}

impl RiskSpec {
    pub fn new(alpha: f64, u1: LossFunction, u2: LossFunction) -> Result<Self> {
        let score = score_from_losses(alpha, &u1, &u2)?;
        Ok(Self { alpha, u1: Arc::new(u1), u2: Arc::new(u2), score })
    }

    /// Identity losses: the conditional left α-quantile.
    pub fn var(alpha: f64) -> Result<Self> {
        Self::new(alpha, LossFunction::Identity, LossFunction::Identity)
    }

    /// Quadratic losses: the conditional expectile.
    pub fn expectile(alpha: f64) -> Result<Self> {
        Self::new(alpha, LossFunction::quadratic(), LossFunction::quadratic())
    }

    /// `u1 = u2 = x^β`.
    pub fn power(alpha: f64, exponent: f64) -> Result<Self> {
        let u = LossFunction::power(1.0, exponent)?;
        Self::new(alpha, u.clone(), u)
    }

    /// The loss pair obtained by integrating `v`, see [`crate::loss::losses_from_score`].
    pub fn from_score(alpha: f64, v: &ScoreFunction) -> Result<Self> {
        let pair = crate::loss::losses_from_score(alpha, v)?;
        Self::new(alpha, pair.u1, pair.u2)
    }

    /// Same losses at a different confidence level.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, (*self.u1).clone(), (*self.u2).clone())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn u1(&self) -> &LossFunction {
        &self.u1
    }

    pub fn u2(&self) -> &LossFunction {
        &self.u2
    }

    /// The cached score `v = score_from_losses(α, u1, u2)`.
    pub fn derived_score(&self) -> &ScoreFunction {
        &self.score
    }

    pub fn fingerprint(&self) -> String {
        format!("quantile(alpha={};u1={};u2={})", self.alpha, self.u1, self.u2)
    }

    /// `φ_α(x, z)` for scalars.
    pub fn phi(&self, x: f64, z: f64) -> f64 {
        let d = x - z;
        self.alpha * self.u1.eval(d.max(0.0)) + (1.0 - self.alpha) * self.u2.eval((-d).max(0.0))
    }

    /// `g(x)` for a distribution; non-increasing in `x`.
    pub fn first_order_gap(&self, dist: &Distribution, x: f64) -> f64 {
        dist.iter()
            .map(|(v, w)| {
                let term = if v > x {
                    self.alpha * self.u1.left_deriv(v - x)
                } else {
                    -(1.0 - self.alpha) * self.u2.right_deriv(x - v)
                };
                w * term
            })
            .sum()
    }
}

/// Numerical settings shared by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveSettings {
    /// Absolute tolerance on reported minimizers.
    pub tol_x: f64,
    /// Conditional expectations within this of zero count as zero.
    pub tol_f: f64,
    pub max_iter: usize,
    /// Oracle grid resolution; `None` means `1e-4 ×` the data range.
    pub grid_step: Option<f64>,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self { tol_x: 1e-10, tol_f: 1e-12, max_iter: 200, grid_step: None }
    }
}

impl SolveSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.tol_x) || !positive(self.tol_f) {
            return Err(Error::InvalidSettings("tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidSettings("max_iter must be at least 1".into()));
        }
        if matches!(self.grid_step, Some(h) if !positive(h)) {
            return Err(Error::InvalidSettings("grid_step must be positive".into()));
        }
        Ok(())
    }

    pub fn grid_step_for(&self, data_range: f64) -> f64 {
        let range = if data_range > 0.0 { data_range } else { 1.0 };
        self.grid_step.unwrap_or(1e-4 * range)
    }

    pub fn fingerprint(&self) -> String {
        format!("tol_x={:e};tol_f={:e};max_iter={}", self.tol_x, self.tol_f, self.max_iter)
    }
}

/// Pointwise `φ_α(X, Z) = α u1((X−Z)⁺) + (1−α) u2((X−Z)⁻)`.
pub fn phi_alpha(x: &RandomVariable, z: &RandomVariable, spec: &RiskSpec) -> Result<RandomVariable> {
    x.zip_with(z, |a, b| spec.phi(a, b))
}

/// `π_α(X, Z) = E[φ_α(X, Z)]`.
pub fn pi_alpha(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    z: &RandomVariable,
    spec: &RiskSpec,
) -> Result<f64> {
    space.expectation(&phi_alpha(x, z, spec)?)
}

/// Leftmost minimizer of `x ↦ E[φ_α(X, x)]` for `X ~ dist`.
pub fn static_generalized_quantile(
    dist: &Distribution,
    spec: &RiskSpec,
    settings: &SolveSettings,
) -> Result<f64> {
    if dist.is_point_mass() {
        return Ok(dist.min());
    }
    left_root(
        |x| spec.first_order_gap(dist, x),
        dist.min(),
        dist.max(),
        dist.support(),
        settings,
    )
}

/// `ρ_α^G(X)`, solved atom by atom on the conditional distributions.
pub fn conditional_generalized_quantile(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    spec: &RiskSpec,
    settings: &SolveSettings,
) -> Result<RandomVariable> {
    let per_atom = (0..g.num_atoms())
        .map(|a| {
            let dist = conditional_distribution(space, x, g, a)?;
            static_generalized_quantile(&dist, spec, settings)
        })
        .collect::<Result<Vec<_>>>()?;
    g.broadcast(&per_atom)
}

/// The two first-order inequalities on one atom, as signed gaps that must be `≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocGaps {
    /// `α E[u1'₋(X−Z); X>Z | A] − (1−α) E[u2'₊(Z−X); X≤Z | A]`.
    pub upper: f64,
    /// `(1−α) E[u2'₋(Z−X); X<Z | A] − α E[u1'₊(X−Z); X≥Z | A]`.
    pub lower: f64,
}

impl FocGaps {
    pub fn worst(&self) -> f64 {
        self.upper.max(self.lower)
    }
}

/// Per-atom first-order gaps at a `G`-measurable candidate `Z`.
pub fn foc_gaps(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    z: &RandomVariable,
    g: &Partition,
    spec: &RiskSpec,
) -> Result<Vec<FocGaps>> {
    space.check(x)?;
    space.check_partition(g)?;
    check_len(space.len(), z.len())?;
    if !is_measurable(z, g)? {
        return Err(Error::NotMeasurable);
    }
    let alpha = spec.alpha();
    Ok(g.atoms()
        .iter()
        .map(|atom| {
            let mass = space.mass(atom);
            let zc = z.get(atom[0]);
            let mut gaps = FocGaps { upper: 0.0, lower: 0.0 };
            for &i in atom {
                let w = space.prob(i) / mass;
                let d = x.get(i) - zc;
                if d > 0.0 {
                    gaps.upper += w * alpha * spec.u1().left_deriv(d);
                } else {
                    gaps.upper -= w * (1.0 - alpha) * spec.u2().right_deriv(-d);
                }
                if d < 0.0 {
                    gaps.lower += w * (1.0 - alpha) * spec.u2().left_deriv(-d);
                } else {
                    gaps.lower -= w * alpha * spec.u1().right_deriv(d);
                }
            }
            gaps
        })
        .collect())
}

/// True iff `Z` satisfies both conditional first-order inequalities on every atom within `tol`.
pub fn foc_check(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    z: &RandomVariable,
    g: &Partition,
    spec: &RiskSpec,
    tol: f64,
) -> Result<bool> {
    Ok(foc_gaps(space, x, z, g, spec)?.iter().all(|gap| gap.worst() <= tol))
}

/// `E[φ_α(X, z) | A]` for the conditional distribution on one atom.
pub fn atom_objective(dist: &Distribution, spec: &RiskSpec, z: f64) -> f64 {
    dist.expect(|v| spec.phi(v, z))
}

/// `lo, lo + h, lo + 2h, …` up to `hi`, always ending exactly at `hi`.
pub fn step_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).filter(|&z| z < hi).collect();
    grid.push(hi);
    grid
}

/// Leftmost grid point whose value is within `tol` of the grid minimum.
fn leftmost_near_min(grid: &[f64], values: &[f64], tol: f64) -> f64 {
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    grid.iter()
        .zip(values)
        .find(|(_, &v)| v <= best + tol)
        .map(|(&z, _)| z)
        .expect("grid is nonempty")
}

/// Exhaustive per-atom grid minimization of `π_α` over `[min X|A, max X|A]`.
pub fn brute_force_quantile(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    spec: &RiskSpec,
    grid_step: f64,
    tol_f: f64,
) -> Result<RandomVariable> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::InvalidSettings("grid_step must be positive".into()));
    }
    let per_atom = (0..g.num_atoms())
        .map(|a| {
            let dist = conditional_distribution(space, x, g, a)?;
            let grid = step_grid(dist.min(), dist.max(), grid_step);
            let values: Vec<f64> = grid.iter().map(|&z| atom_objective(&dist, spec, z)).collect();
            Ok(leftmost_near_min(&grid, &values, tol_f))
        })
        .collect::<Result<Vec<_>>>()?;
    g.broadcast(&per_atom)
}

/// Largest number of atoms accepted by [`joint_brute_force`].
pub const JOINT_MAX_ATOMS: usize = 3;
/// Largest per-atom grid accepted by [`joint_brute_force`].
pub const JOINT_MAX_POINTS: usize = 50;

/// The evenly spaced per-atom grid used by the joint search.
pub fn joint_grid(dist: &Distribution, points: usize) -> Vec<f64> {
    if dist.is_point_mass() {
        vec![dist.min()]
    } else {
        linspace(dist.min(), dist.max(), points)
    }
}

/// Exhaustive search over every `G`-measurable `Z` on the product of per-atom
/// grids, minimizing the unconditional objective `E[φ_α(X, Z)]`. Ties within
/// `tol_f` go to the lexicographically smallest grid vector.
pub fn joint_brute_force(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    spec: &RiskSpec,
    points_per_atom: usize,
    tol_f: f64,
) -> Result<RandomVariable> {
    if g.num_atoms() > JOINT_MAX_ATOMS {
        return Err(Error::InstanceTooLarge(format!(
            "{} atoms (max {JOINT_MAX_ATOMS})",
            g.num_atoms()
        )));
    }
    if points_per_atom == 0 || points_per_atom > JOINT_MAX_POINTS {
        return Err(Error::InstanceTooLarge(format!(
            "{points_per_atom} grid points per atom (max {JOINT_MAX_POINTS})"
        )));
    }
    let grids = (0..g.num_atoms())
        .map(|a| Ok(joint_grid(&conditional_distribution(space, x, g, a)?, points_per_atom)))
        .collect::<Result<Vec<_>>>()?;

    let objective = |choice: &[usize]| -> f64 {
        let z: Vec<f64> = (0..space.len()).map(|i| grids[g.atom_of(i)][choice[g.atom_of(i)]]).collect();
        (0..space.len()).map(|i| space.prob(i) * spec.phi(x.get(i), z[i])).sum()
    };

    // Odometer over the product grid in lexicographic order.
    let mut choice = vec![0usize; grids.len()];
    let mut candidates: Vec<(Vec<usize>, f64)> = Vec::new();
    loop {
        candidates.push((choice.clone(), objective(&choice)));
        let mut k = grids.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < grids[k].len() {
                break;
            }
            choice[k] = 0;
            if k == 0 {
                k = usize::MAX;
                break;
            }
        }
        if k == usize::MAX {
            break;
        }
    }
    let best = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let (winner, _) = candidates.iter().find(|c| c.1 <= best + tol_f).expect("nonempty grid");
    let per_atom: Vec<f64> = winner.iter().enumerate().map(|(a, &k)| grids[a][k]).collect();
    g.broadcast(&per_atom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thirds() -> ProbabilitySpace {
        ProbabilitySpace::new(vec![1.0 / 3.0; 3]).unwrap()
    }

    fn x123() -> RandomVariable {
        vec![1.0, 2.0, 3.0].into()
    }

    fn a_split() -> Partition {
        Partition::from_atoms(3, vec![vec![0, 1], vec![2]]).unwrap()
    }

    /// u1 = x², u2 = e^x − 1 (right derivative e^x), α = 1/3.
    fn discrete_example() -> RiskSpec {
        RiskSpec::new(1.0 / 3.0, LossFunction::quadratic(), LossFunction::exponential(1.0, 1.0).unwrap())
            .unwrap()
    }

    #[test]
    fn phi_examples() {
        let spec = discrete_example();
        let x = x123();
        let zero = phi_alpha(&x, &x, &spec).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        // u2(0) = 0 convention: only ω2 has a shortfall, of size 1.
        let phi = phi_alpha(&x, &vec![1.0, 1.0, 3.0].into(), &spec).unwrap();
        assert_eq!(phi.values()[0], 0.0);
        assert!((phi.values()[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(phi.values()[2], 0.0);
        assert!(phi_alpha(&x, &vec![1.0].into(), &spec).is_err());
    }

    #[test]
    fn phi_tends_to_u1_term_as_alpha_grows() {
        let x = x123();
        let z: RandomVariable = vec![0.0, 2.5, 2.5].into();
        let spec = RiskSpec::new(1.0 - 1e-12, LossFunction::quadratic(), LossFunction::Identity).unwrap();
        let phi = phi_alpha(&x, &z, &spec).unwrap();
        let expected = [1.0, 0.0, 0.25];
        for (p, e) in phi.values().iter().zip(expected) {
            assert!((p - e).abs() < 1e-9);
        }
    }

    #[test]
    fn pi_examples() {
        let s = thirds();
        let x = x123();
        let spec = RiskSpec::expectile(0.5).unwrap();
        assert_eq!(pi_alpha(&s, &x, &x, &spec).unwrap(), 0.0);
        let pi = pi_alpha(&s, &x, &RandomVariable::constant(3, 2.0), &spec).unwrap();
        assert!((pi - 1.0 / 3.0).abs() < 1e-15);
        // Linear in α with slope E[u1 term] − E[u2 term].
        let z = RandomVariable::constant(3, 1.5);
        let p = |a: f64| pi_alpha(&s, &x, &z, &RiskSpec::expectile(a).unwrap()).unwrap();
        let up = (0.5f64.powi(2) + 1.5f64.powi(2)) / 3.0;
        let down = 0.5f64.powi(2) / 3.0;
        assert!(((p(0.7) - p(0.3)) / 0.4 - (up - down)).abs() < 1e-12);
    }

    #[test]
    fn static_quantile_discrete_example() {
        let d = Distribution::new([(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).unwrap();
        let a = static_generalized_quantile(&d, &discrete_example(), &SolveSettings::default()).unwrap();
        assert!(((a - 1.0).exp() + 2.0 * a - 5.0).abs() < 1e-9);
        assert!((a - 1.594).abs() < 1e-3);
    }

    #[test]
    fn static_quantile_point_mass_and_expectile() {
        let s = SolveSettings::default();
        let spec = RiskSpec::expectile(0.8).unwrap();
        assert_eq!(static_generalized_quantile(&Distribution::point_mass(4.2), &spec, &s).unwrap(), 4.2);
        let d = Distribution::new([(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let z = static_generalized_quantile(&d, &spec, &s).unwrap();
        assert!((z - 0.8).abs() <= 2e-10);
    }

    #[test]
    fn conditional_quantile_examples() {
        let (s, x) = (thirds(), x123());
        let settings = SolveSettings::default();
        let spec = discrete_example();
        let rho = conditional_generalized_quantile(&s, &x, &a_split(), &spec, &settings).unwrap();
        assert!(rho.max_abs_diff(&vec![1.0, 1.0, 3.0].into()).unwrap() < 1e-12);
        let full = conditional_generalized_quantile(&s, &x, &Partition::discrete(3), &spec, &settings).unwrap();
        assert_eq!(full, x);
        let triv = conditional_generalized_quantile(&s, &x, &Partition::trivial(3), &spec, &settings).unwrap();
        let d = conditional_distribution(&s, &x, &Partition::trivial(3), 0).unwrap();
        let a = static_generalized_quantile(&d, &spec, &settings).unwrap();
        assert!(triv.values().iter().all(|&v| v == a));
    }

    #[test]
    fn foc_examples() {
        let (s, x, g) = (thirds(), x123(), a_split());
        let spec = discrete_example();
        let rho = conditional_generalized_quantile(&s, &x, &g, &spec, &SolveSettings::default()).unwrap();
        assert!(foc_check(&s, &x, &rho, &g, &spec, 1e-8).unwrap());
        let bumped: RandomVariable = vec![1.1, 1.1, 3.0].into();
        assert!(!foc_check(&s, &x, &bumped, &g, &spec, 1e-8).unwrap());
        let lowered: RandomVariable = vec![1.0, 1.0, 2.9].into();
        assert!(!foc_check(&s, &x, &lowered, &g, &spec, 1e-8).unwrap());
        let not_measurable: RandomVariable = vec![1.0, 2.0, 3.0].into();
        assert_eq!(
            foc_check(&s, &x, &not_measurable, &g, &spec, 1e-8).unwrap_err(),
            Error::NotMeasurable
        );
    }

    #[test]
    fn foc_equality_form_for_smooth_losses() {
        // u'(0) = 0: α E[u1'((X−Z)⁺)|G] = (1−α) E[u2'((X−Z)⁻)|G].
        let s = ProbabilitySpace::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let x: RandomVariable = vec![-1.0, 0.5, 2.0, 4.0].into();
        let g = Partition::from_atoms(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let spec = RiskSpec::power(0.65, 3.0).unwrap();
        let rho = conditional_generalized_quantile(&s, &x, &g, &spec, &SolveSettings::default()).unwrap();
        for atom in g.atoms() {
            let z = rho.get(atom[0]);
            let (mut lhs, mut rhs) = (0.0, 0.0);
            for &i in atom {
                let d = x.get(i) - z;
                lhs += s.prob(i) * 0.65 * 3.0 * d.max(0.0).powi(2);
                rhs += s.prob(i) * 0.35 * 3.0 * (-d).max(0.0).powi(2);
            }
            assert!((lhs - rhs).abs() < 1e-8);
        }
    }

    #[test]
    fn brute_force_discrete_example() {
        let rho = brute_force_quantile(&thirds(), &x123(), &a_split(), &discrete_example(), 1e-4, 1e-12)
            .unwrap();
        assert!(rho.max_abs_diff(&vec![1.0, 1.0, 3.0].into()).unwrap() <= 1e-4);
        assert!(brute_force_quantile(&thirds(), &x123(), &a_split(), &discrete_example(), 0.0, 1e-12).is_err());
    }

    #[test]
    fn brute_force_var_matches_sorted_quantile() {
        let s = ProbabilitySpace::new(vec![0.15, 0.25, 0.1, 0.3, 0.2]).unwrap();
        let x: RandomVariable = vec![3.0, -1.0, 0.5, 2.0, 4.0].into();
        let g = Partition::trivial(5);
        for &alpha in &[0.1, 0.33, 0.62, 0.9] {
            let rho = brute_force_quantile(&s, &x, &g, &RiskSpec::var(alpha).unwrap(), 1e-3, 1e-12).unwrap();
            // Direct: sort by value and accumulate weights.
            let mut pairs: Vec<(f64, f64)> = x.values().iter().copied().zip(s.probs().iter().copied()).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cum = 0.0;
            let q = pairs.iter().find(|(_, p)| { cum += p; cum >= alpha }).unwrap().0;
            assert!((rho.get(0) - q).abs() <= 1e-3, "alpha {alpha}: {} vs {q}", rho.get(0));
        }
    }

    #[test]
    fn joint_brute_force_examples() {
        let (s, x, g) = (thirds(), x123(), a_split());
        let rho = joint_brute_force(&s, &x, &g, &discrete_example(), 3, 1e-12).unwrap();
        assert_eq!(rho.values(), &[1.0, 1.0, 3.0]);
        let four = Partition::discrete(4);
        let s4 = ProbabilitySpace::uniform(4).unwrap();
        let x4: RandomVariable = vec![1.0, 2.0, 3.0, 4.0].into();
        assert!(matches!(
            joint_brute_force(&s4, &x4, &four, &discrete_example(), 3, 1e-12),
            Err(Error::InstanceTooLarge(_))
        ));
        assert!(joint_brute_force(&s, &x, &g, &discrete_example(), 51, 1e-12).is_err());
    }

    #[test]
    fn joint_objective_is_sum_of_atom_minima() {
        let s = ProbabilitySpace::new(vec![0.2, 0.3, 0.1, 0.4]).unwrap();
        let x: RandomVariable = vec![-2.0, 1.0, 0.5, 3.0].into();
        let g = Partition::from_atoms(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let spec = RiskSpec::power(0.7, 1.5).unwrap();
        let joint = joint_brute_force(&s, &x, &g, &spec, 40, 1e-12).unwrap();
        let total = pi_alpha(&s, &x, &joint, &spec).unwrap();
        let mut sum = 0.0;
        for a in 0..g.num_atoms() {
            let d = conditional_distribution(&s, &x, &g, a).unwrap();
            let grid = joint_grid(&d, 40);
            let best = grid.iter().map(|&z| atom_objective(&d, &spec, z)).fold(f64::INFINITY, f64::min);
            sum += s.mass(&g.atoms()[a]) * best;
        }
        assert!((total - sum).abs() < 1e-12);
    }

    #[test]
    fn step_grid_ends_at_hi() {
        let grid = step_grid(0.0, 1.0, 0.3);
        assert_eq!(grid.len(), 5);
        assert_eq!(*grid.last().unwrap(), 1.0);
        assert_eq!(step_grid(2.0, 2.0, 0.1), vec![2.0]);
    }

    #[test]
    fn settings_validation() {
        assert!(SolveSettings::default().validate().is_ok());
        assert!(SolveSettings { tol_x: 0.0, ..Default::default() }.validate().is_err());
        assert!(SolveSettings { max_iter: 0, ..Default::default() }.validate().is_err());
        assert!(SolveSettings { grid_step: Some(-1.0), ..Default::default() }.validate().is_err());
        assert_eq!(SolveSettings::default().grid_step_for(10.0), 1e-3);
    }
}
