//! Loss functions `u` (strictly increasing, convex, `u(0) = 0`, `u(1) = 1` on
//! `[0, ∞)`) and score functions `v` (non-decreasing, `v(0−) ≤ 0 ≤ v(0+)`),
//! together with the two maps between a loss triple `(α, u1, u2)` and a score.
//!
//! Going from losses to a score uses the one-sided derivatives:
//!
//! ```text
//! v(x) =  α · u1'₋(x)          for x > 0
//! v(x) = −(1 − α) · u2'₊(−x)   for x ≤ 0
//! ```
//!
//! and going back integrates the score:
//!
//! ```text
//! u1(x) =  1/α     ∫₀ˣ  v(t) dt
//! u2(x) = −1/(1−α) ∫₋ₓ⁰ v(t) dt
//! ```
//!
//! The integrated pair is kept unnormalized; [`LossPair::normalized`] rescales
//! it so that `u(1) = 1` for membership reporting.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Absolute tolerance for adaptive Simpson quadrature on tabulated scores.
pub const QUADRATURE_TOL: f64 = 1e-10;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// Piecewise-linear function through a set of knots, extrapolated linearly
/// from the end segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Tabulated {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidFamily("tabulated function needs at least two knots".into()));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidFamily("tabulated knots must be finite".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidFamily("tabulated abscissae must be strictly increasing".into()));
        }
        let (xs, ys) = knots.into_iter().unzip();
        Ok(Self { xs, ys })
    }

    /// Samples `f` on `grid`.
    pub fn sample(grid: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid.iter().map(|&x| (x, f(x))).collect())
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    fn segment_slope(&self, k: usize) -> f64 {
        (self.ys[k + 1] - self.ys[k]) / (self.xs[k + 1] - self.xs[k])
    }

    /// Index of the segment used for evaluation at `x`, clamped to the end segments.
    fn segment(&self, x: f64) -> usize {
        let k = self.xs.partition_point(|&k| k <= x);
        k.saturating_sub(1).min(self.xs.len() - 2)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.segment(x);
        self.ys[k] + self.segment_slope(k) * (x - self.xs[k])
    }

    pub fn slope_left(&self, x: f64) -> f64 {
        // The segment ending at x, when x sits on an interior knot.
        let k = self.xs.partition_point(|&k| k < x);
        self.segment_slope(k.saturating_sub(1).min(self.xs.len() - 2))
    }

    pub fn slope_right(&self, x: f64) -> f64 {
        self.segment_slope(self.segment(x))
    }

    fn scaled(&self, c: f64) -> Self {
        Self { xs: self.xs.clone(), ys: self.ys.iter().map(|y| y * c).collect() }
    }

    /// `∫ₐᵇ`, split at knots so each Simpson panel sees a smooth integrand.
    fn integral(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        if a > b {
            return -self.integral(b, a);
        }
        let mut cuts = vec![a];
        cuts.extend(self.xs.iter().copied().filter(|&x| x > a && x < b));
        cuts.push(b);
        cuts.windows(2)
            .map(|w| adaptive_simpson(&|t| self.eval(t), w[0], w[1], QUADRATURE_TOL, 40))
            .sum()
    }
}

/// Adaptive Simpson quadrature with Richardson correction. Returns NaN when
/// the integrand produces non-finite values.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol || !delta.is_finite() {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// Which of the two losses an integrated score reconstructs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `u1`, applied to the shortfall `(X − x)⁺`.
    Shortfall,
    /// `u2`, applied to the over-required capital `(X − x)⁻`.
    Surplus,
}

/// A loss function on `[0, ∞)`.
#[derive(Debug, Clone)]
pub enum LossFunction {
    /// `u(x) = x`.
    Identity,
    /// `u(x) = scale · x^exponent`.
    Power { scale: f64, exponent: f64 },
    /// `u(x) = scale · (e^{rate·x} − 1)`, right derivative `scale · rate · e^{rate·x}`.
    Exponential { rate: f64, scale: f64 },
    Tabulated(Tabulated),
    /// `scale` times the integral of a score, see [`losses_from_score`].
    FromScore { score: Arc<ScoreFunction>, alpha: f64, side: Side, scale: f64 },
}

impl LossFunction {
    pub fn quadratic() -> Self {
        LossFunction::Power { scale: 1.0, exponent: 2.0 }
    }

    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) || !(exponent > 1.0 && exponent.is_finite()) {
            return Err(Error::InvalidFamily(format!(
                "power family needs scale > 0 and exponent > 1, got ({scale}, {exponent})"
            )));
        }
        Ok(LossFunction::Power { scale, exponent })
    }

    /// Exponential loss normalized so that `u(1) = 1`.
    pub fn exp_integral(rate: f64) -> Result<Self> {
        Self::exponential(rate, 1.0 / rate.exp_m1())
    }

    pub fn exponential(rate: f64, scale: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) || !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidFamily(format!(
                "exponential family needs rate > 0 and scale > 0, got ({rate}, {scale})"
            )));
        }
        Ok(LossFunction::Exponential { rate, scale })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            LossFunction::Identity => x,
            LossFunction::Power { scale, exponent } => scale * x.powf(*exponent),
            LossFunction::Exponential { rate, scale } => scale * (rate * x).exp_m1(),
            LossFunction::Tabulated(t) => t.eval(x),
            LossFunction::FromScore { score, alpha, side, scale } => match side {
                Side::Shortfall => scale * score.integral(0.0, x) / alpha,
                Side::Surplus => -scale * score.integral(-x, 0.0) / (1.0 - alpha),
            },
        }
    }

    /// Left derivative, taken to be zero at arguments `≤ 0`.
    pub fn left_deriv(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            LossFunction::Tabulated(t) => t.slope_left(x),
            LossFunction::FromScore { score, alpha, side, scale } => match side {
                Side::Shortfall => scale * score.left_limit(x) / alpha,
                Side::Surplus => -scale * score.right_limit(-x) / (1.0 - alpha),
            },
            _ => self.smooth_deriv(x),
        }
    }

    /// Right derivative, taken to be zero at arguments `< 0`.
    pub fn right_deriv(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            LossFunction::Tabulated(t) => t.slope_right(x),
            LossFunction::FromScore { score, alpha, side, scale } => match side {
                Side::Shortfall => scale * score.right_limit(x) / alpha,
                Side::Surplus => -scale * score.left_limit(-x) / (1.0 - alpha),
            },
            _ => self.smooth_deriv(x),
        }
    }

    fn smooth_deriv(&self, x: f64) -> f64 {
        match self {
            LossFunction::Identity => 1.0,
            LossFunction::Power { scale, exponent } => scale * exponent * x.powf(exponent - 1.0),
            LossFunction::Exponential { rate, scale } => scale * rate * (rate * x).exp(),
            _ => unreachable!("non-smooth families handle their own derivatives"),
        }
    }

    /// `u''(0+)`, when the family provides one. May be `+∞` (power with exponent < 2).
    pub fn second_deriv_at_zero(&self) -> Option<f64> {
        match self {
            LossFunction::Identity => Some(0.0),
            LossFunction::Power { scale, exponent } => Some(if *exponent == 2.0 {
                2.0 * scale
            } else if *exponent > 2.0 {
                0.0
            } else {
                f64::INFINITY
            }),
            LossFunction::Exponential { rate, scale } => Some(scale * rate * rate),
            LossFunction::Tabulated(_) => None,
            LossFunction::FromScore { score, alpha, side, scale } => {
                let (left, right) = score.slope_at_zero()?;
                Some(match side {
                    Side::Shortfall => scale * right / alpha,
                    Side::Surplus => scale * left / (1.0 - alpha),
                })
            }
        }
    }

    /// The same loss multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            LossFunction::Identity => LossFunction::Power { scale: c, exponent: 1.0 },
            LossFunction::Power { scale, exponent } => {
                LossFunction::Power { scale: scale * c, exponent: *exponent }
            }
            LossFunction::Exponential { rate, scale } => {
                LossFunction::Exponential { rate: *rate, scale: scale * c }
            }
            LossFunction::Tabulated(t) => LossFunction::Tabulated(t.scaled(c)),
            LossFunction::FromScore { score, alpha, side, scale } => LossFunction::FromScore {
                score: Arc::clone(score),
                alpha: *alpha,
                side: *side,
                scale: scale * c,
            },
        }
    }

    /// Rescaled so that `u(1) = 1`; returns `None` if `u(1) ≤ 0`.
    pub fn normalized(&self) -> Option<Self> {
        let at_one = self.eval(1.0);
        (at_one > 0.0 && at_one.is_finite()).then(|| self.scaled(1.0 / at_one))
    }

    /// True when the loss is `a · x^β` for some `a > 0`, returning `β`.
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            LossFunction::Identity => Some(1.0),
            LossFunction::Power { exponent, .. } => Some(*exponent),
            _ => None,
        }
    }

    pub fn family_tag(&self) -> String {
        match self {
            LossFunction::Identity => "identity".into(),
            LossFunction::Power { scale, exponent } if *scale == 1.0 && *exponent == 2.0 => {
                "quadratic".into()
            }
            LossFunction::Power { scale, exponent } => format!("power:{scale},{exponent}"),
            LossFunction::Exponential { rate, scale } => format!("exp:{rate},{scale}"),
            LossFunction::Tabulated(t) => format!("tabulated[{}]", t.xs.len()),
            LossFunction::FromScore { score, alpha, side, scale } => {
                let which = match side {
                    Side::Shortfall => "u1",
                    Side::Surplus => "u2",
                };
                format!("{which}_from({};alpha={alpha};scale={scale})", score.family_tag())
            }
        }
    }

    /// Parses a family tag: `identity`, `quadratic`, `power:a,beta`, `exp:gamma`
    /// (normalized) or `exp:gamma,scale`.
    pub fn from_tag(tag: &str) -> Result<Self> {
        let (name, params) = split_tag(tag)?;
        match (name, params.as_slice()) {
            ("identity", []) => Ok(LossFunction::Identity),
            ("quadratic", []) => Ok(LossFunction::quadratic()),
            ("power", [a, b]) => LossFunction::power(*a, *b),
            ("exp", [g]) => LossFunction::exp_integral(*g),
            ("exp", [g, c]) => LossFunction::exponential(*g, *c),
            _ => Err(Error::InvalidFamily(format!("unknown loss tag `{tag}`"))),
        }
    }
}

impl FromStr for LossFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_tag(s)
    }
}

impl fmt::Display for LossFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.family_tag())
    }
}

fn split_tag(tag: &str) -> Result<(&str, Vec<f64>)> {
    let tag = tag.trim();
    let (name, rest) = match tag.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (tag, None),
    };
    let params = match rest {
        None => Vec::new(),
        Some(r) => r
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidFamily(format!("bad parameter `{p}` in `{tag}`")))
            })
            .collect::<Result<_>>()?,
    };
    Ok((name, params))
}

/// A score function `v: ℝ → ℝ`.
#[derive(Debug, Clone)]
pub enum ScoreFunction {
    /// `v(x) = α` for `x > 0`, `−(1 − α)` for `x ≤ 0`; induced by identity losses.
    Var { alpha: f64 },
    /// `v(x) = α·x⁺ − (1 − α)·x⁻`; induced by quadratic losses up to a factor 2.
    Expectile { alpha: f64 },
    /// `e^{γx} − 1` for `γ > 0`, `1 − e^{γx}` for `γ < 0`, and `x` for `γ = 0`.
    Entropic { gamma: f64 },
    /// The derivative score of a loss triple.
    FromLosses { alpha: f64, u1: Arc<LossFunction>, u2: Arc<LossFunction> },
    Tabulated(Tabulated),
    /// `x ↦ base(x − shift)`. Not a member of `V` unless `shift = 0`.
    Shifted { base: Arc<ScoreFunction>, shift: f64 },
}

impl ScoreFunction {
    pub fn var(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(ScoreFunction::Var { alpha })
    }

    pub fn expectile(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(ScoreFunction::Expectile { alpha })
    }

    pub fn entropic(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidFamily(format!("entropic score needs finite gamma, got {gamma}")));
        }
        Ok(ScoreFunction::Entropic { gamma })
    }

    pub fn shifted(base: ScoreFunction, shift: f64) -> Self {
        ScoreFunction::Shifted { base: Arc::new(base), shift }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScoreFunction::Var { alpha } => {
                if x > 0.0 {
                    *alpha
                } else {
                    -(1.0 - alpha)
                }
            }
            ScoreFunction::Expectile { alpha } => {
                if x > 0.0 {
                    alpha * x
                } else {
                    (1.0 - alpha) * x
                }
            }
            ScoreFunction::Entropic { gamma } => entropic_score(*gamma, x),
            ScoreFunction::FromLosses { alpha, u1, u2 } => {
                if x > 0.0 {
                    alpha * u1.left_deriv(x)
                } else {
                    -(1.0 - alpha) * u2.right_deriv(-x)
                }
            }
            ScoreFunction::Tabulated(t) => t.eval(x),
            ScoreFunction::Shifted { base, shift } => base.eval(x - shift),
        }
    }

    /// `v(x−)`.
    pub fn left_limit(&self, x: f64) -> f64 {
        match self {
            ScoreFunction::Var { alpha } => {
                if x > 0.0 {
                    *alpha
                } else {
                    -(1.0 - alpha)
                }
            }
            ScoreFunction::Shifted { base, shift } => base.left_limit(x - shift),
            // Left derivatives of convex functions are left-continuous and the
            // right derivative of u2 is right-continuous, so v is left-continuous.
            _ => self.eval(x),
        }
    }

    /// `v(x+)`.
    pub fn right_limit(&self, x: f64) -> f64 {
        match self {
            ScoreFunction::Var { alpha } => {
                if x >= 0.0 {
                    *alpha
                } else {
                    -(1.0 - alpha)
                }
            }
            ScoreFunction::FromLosses { alpha, u1, u2 } => {
                if x >= 0.0 {
                    alpha * u1.right_deriv(x)
                } else {
                    -(1.0 - alpha) * u2.left_deriv(-x)
                }
            }
            ScoreFunction::Shifted { base, shift } => base.right_limit(x - shift),
            _ => self.eval(x),
        }
    }

    /// `F(x) = ∫₀ˣ v(t) dt`, exact for the closed-form families.
    pub fn antiderivative(&self, x: f64) -> f64 {
        match self {
            ScoreFunction::Var { alpha } => {
                if x >= 0.0 {
                    alpha * x
                } else {
                    -(1.0 - alpha) * x
                }
            }
            ScoreFunction::Expectile { alpha } => {
                if x >= 0.0 {
                    0.5 * alpha * x * x
                } else {
                    0.5 * (1.0 - alpha) * x * x
                }
            }
            ScoreFunction::Entropic { gamma } => {
                let g = *gamma;
                if g > 0.0 {
                    (g * x).exp_m1() / g - x
                } else if g < 0.0 {
                    x - (g * x).exp_m1() / g
                } else {
                    0.5 * x * x
                }
            }
            ScoreFunction::FromLosses { alpha, u1, u2 } => {
                if x >= 0.0 {
                    alpha * (u1.eval(x) - u1.eval(0.0))
                } else {
                    (1.0 - alpha) * (u2.eval(-x) - u2.eval(0.0))
                }
            }
            ScoreFunction::Tabulated(t) => t.integral(0.0, x),
            ScoreFunction::Shifted { base, shift } => {
                base.antiderivative(x - shift) - base.antiderivative(-shift)
            }
        }
    }

    /// `∫ₐᵇ v(t) dt`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.antiderivative(b) - self.antiderivative(a)
    }

    /// The point around which the score changes sign (0 for members of `V`).
    pub fn pivot(&self) -> f64 {
        match self {
            ScoreFunction::Shifted { base, shift } => base.pivot() + shift,
            _ => 0.0,
        }
    }

    /// `(v'(0−), v'(0+))` when the score is differentiable on both sides of 0.
    pub fn slope_at_zero(&self) -> Option<(f64, f64)> {
        match self {
            ScoreFunction::Var { .. } => None,
            ScoreFunction::Expectile { alpha } => Some((1.0 - alpha, *alpha)),
            ScoreFunction::Entropic { gamma } => {
                let slope = if *gamma == 0.0 { 1.0 } else { gamma.abs() };
                Some((slope, slope))
            }
            ScoreFunction::FromLosses { alpha, u1, u2 } => {
                // A jump at 0 (u'(0) > 0) leaves no finite slope.
                if u1.right_deriv(0.0) != 0.0 || u2.right_deriv(0.0) != 0.0 {
                    return None;
                }
                Some((
                    (1.0 - alpha) * u2.second_deriv_at_zero()?,
                    alpha * u1.second_deriv_at_zero()?,
                ))
            }
            ScoreFunction::Tabulated(t) => Some((t.slope_left(0.0), t.slope_right(0.0))),
            ScoreFunction::Shifted { .. } => None,
        }
    }

    pub fn family_tag(&self) -> String {
        match self {
            ScoreFunction::Var { alpha } => format!("var:{alpha}"),
            ScoreFunction::Expectile { alpha } => format!("expectile:{alpha}"),
            ScoreFunction::Entropic { gamma } => format!("entropic:{gamma}"),
            ScoreFunction::FromLosses { alpha, u1, u2 } => {
                format!("from_losses({alpha};{};{})", u1.family_tag(), u2.family_tag())
            }
            ScoreFunction::Tabulated(t) => format!("tabulated[{}]", t.xs.len()),
            ScoreFunction::Shifted { base, shift } => format!("shifted({};{shift})", base.family_tag()),
        }
    }

    /// Parses `var:alpha`, `expectile:alpha` or `entropic:gamma`.
    pub fn from_tag(tag: &str) -> Result<Self> {
        let (name, params) = split_tag(tag)?;
        match (name, params.as_slice()) {
            ("var", [a]) => ScoreFunction::var(*a),
            ("expectile", [a]) => ScoreFunction::expectile(*a),
            ("entropic", [g]) => ScoreFunction::entropic(*g),
            _ => Err(Error::InvalidFamily(format!("unknown score tag `{tag}`"))),
        }
    }
}

fn entropic_score(gamma: f64, x: f64) -> f64 {
    if gamma > 0.0 {
        (gamma * x).exp_m1()
    } else if gamma < 0.0 {
        -(gamma * x).exp_m1()
    } else {
        x
    }
}

impl FromStr for ScoreFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_tag(s)
    }
}

impl fmt::Display for ScoreFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.family_tag())
    }
}

/// `v(x) = α·u1'₋(x)` for `x > 0` and `−(1 − α)·u2'₊(−x)` for `x ≤ 0`.
pub fn score_from_losses(alpha: f64, u1: &LossFunction, u2: &LossFunction) -> Result<ScoreFunction> {
    check_alpha(alpha)?;
    Ok(ScoreFunction::FromLosses { alpha, u1: Arc::new(u1.clone()), u2: Arc::new(u2.clone()) })
}

/// The loss pair reconstructed from a score.
#[derive(Debug, Clone)]
pub struct LossPair {
    pub u1: LossFunction,
    pub u2: LossFunction,
}

impl LossPair {
    /// Both losses rescaled to satisfy `u(1) = 1`. Rescaling changes the
    /// relative weight of the two terms, so only the raw pair reproduces the
    /// score's risk measure.
    pub fn normalized(&self) -> (LossFunction, LossFunction) {
        (
            self.u1.normalized().expect("checked positive in losses_from_score"),
            self.u2.normalized().expect("checked positive in losses_from_score"),
        )
    }
}

/// `u1(x) = (1/α)∫₀ˣ v`, `u2(x) = −(1/(1−α))∫₋ₓ⁰ v`, left unnormalized.
pub fn losses_from_score(alpha: f64, v: &ScoreFunction) -> Result<LossPair> {
    check_alpha(alpha)?;
    let upper = v.integral(0.0, 1.0);
    if !upper.is_finite() {
        return Err(Error::ScoreNotIntegrable { lo: 0.0, hi: 1.0 });
    }
    let lower = v.integral(-1.0, 0.0);
    if !lower.is_finite() {
        return Err(Error::ScoreNotIntegrable { lo: -1.0, hi: 0.0 });
    }
    if upper <= 0.0 {
        return Err(Error::DegenerateScore { side: "positive" });
    }
    if lower >= 0.0 {
        return Err(Error::DegenerateScore { side: "negative" });
    }
    let score = Arc::new(v.clone());
    Ok(LossPair {
        u1: LossFunction::FromScore { score: Arc::clone(&score), alpha, side: Side::Shortfall, scale: 1.0 },
        u2: LossFunction::FromScore { score, alpha, side: Side::Surplus, scale: 1.0 },
    })
}

/// A membership condition checked by [`validate_loss`] / [`validate_score`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    ZeroAtOrigin,
    UnitAtOne,
    StrictlyIncreasing,
    Convex,
    DerivativeOrder,
    DerivativeMonotone,
    NonDecreasing,
    NonPositiveLeftOfZero,
    NonNegativeRightOfZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    /// Grid point where the condition first failed, if pointwise.
    pub at: Option<f64>,
    pub detail: String,
}

/// Outcome of a grid-based membership check. A clean report only means no
/// violation was found on the grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MembershipReport {
    pub violations: Vec<Violation>,
}

impl MembershipReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }

    fn push(&mut self, condition: Condition, at: Option<f64>, detail: String) {
        // One entry per condition keeps reports short.
        if !self.violates(condition) {
            self.violations.push(Violation { condition, at, detail });
        }
    }
}

fn rel_tol(a: f64, b: f64) -> f64 {
    1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// 1001-point grid on `[0, bound]`.
pub fn loss_grid(bound: f64) -> Vec<f64> {
    linspace(0.0, bound, 1001)
}

/// 2001-point grid on `[−bound, bound]`, containing 0.
pub fn score_grid(bound: f64) -> Vec<f64> {
    linspace(-bound, bound, 2001)
}

/// Falsification test for membership of `U_icx⁺` on a sorted grid in `[0, B]`.
pub fn validate_loss(u: &LossFunction, grid: &[f64]) -> MembershipReport {
    let mut report = MembershipReport::default();
    let at_zero = u.eval(0.0);
    if at_zero.abs() > 1e-12 {
        report.push(Condition::ZeroAtOrigin, Some(0.0), format!("u(0) = {at_zero}"));
    }
    let at_one = u.eval(1.0);
    if (at_one - 1.0).abs() > 1e-9 {
        report.push(Condition::UnitAtOne, Some(1.0), format!("u(1) = {at_one}"));
    }
    let values: Vec<f64> = grid.iter().map(|&x| u.eval(x)).collect();
    for i in 1..grid.len() {
        if values[i] <= values[i - 1] {
            report.push(
                Condition::StrictlyIncreasing,
                Some(grid[i]),
                format!("u({}) = {} ≤ u({}) = {}", grid[i], values[i], grid[i - 1], values[i - 1]),
            );
        }
    }
    for i in 1..grid.len().saturating_sub(1) {
        let (a, b, c) = (grid[i - 1], grid[i], grid[i + 1]);
        let chord = values[i - 1] + (values[i + 1] - values[i - 1]) * (b - a) / (c - a);
        if values[i] > chord + rel_tol(values[i], chord) {
            report.push(
                Condition::Convex,
                Some(b),
                format!("u({b}) = {} lies above the chord value {chord}", values[i]),
            );
        }
    }
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid.iter().filter(|&&x| x > 0.0) {
        let (l, r) = (u.left_deriv(x), u.right_deriv(x));
        if l < -1e-12 || l > r + rel_tol(l, r) {
            report.push(
                Condition::DerivativeOrder,
                Some(x),
                format!("need 0 ≤ u'₋ ≤ u'₊, got {l} and {r}"),
            );
        }
        if let Some((pl, pr)) = prev {
            if l < pl - rel_tol(l, pl) || r < pr - rel_tol(r, pr) {
                report.push(Condition::DerivativeMonotone, Some(x), "one-sided derivative decreases".into());
            }
        }
        prev = Some((l, r));
    }
    report
}

/// Falsification test for membership of `V` on a sorted grid spanning both signs.
pub fn validate_score(v: &ScoreFunction, grid: &[f64]) -> MembershipReport {
    let mut report = MembershipReport::default();
    let values: Vec<f64> = grid.iter().map(|&x| v.eval(x)).collect();
    for i in 1..grid.len() {
        if values[i] < values[i - 1] - rel_tol(values[i], values[i - 1]) {
            report.push(
                Condition::NonDecreasing,
                Some(grid[i]),
                format!("v({}) = {} < v({}) = {}", grid[i], values[i], grid[i - 1], values[i - 1]),
            );
        }
    }
    let left = v.left_limit(0.0);
    if left > 0.0 {
        report.push(Condition::NonPositiveLeftOfZero, Some(0.0), format!("v(0−) = {left}"));
    }
    let right = v.right_limit(0.0);
    if right < 0.0 {
        report.push(Condition::NonNegativeRightOfZero, Some(0.0), format!("v(0+) = {right}"));
    }
    for (&x, &y) in grid.iter().zip(&values) {
        if x < 0.0 && y > 0.0 {
            report.push(Condition::NonPositiveLeftOfZero, Some(x), format!("v({x}) = {y}"));
        }
        if x > 0.0 && y < 0.0 {
            report.push(Condition::NonNegativeRightOfZero, Some(x), format!("v({x}) = {y}"));
        }
    }
    report
}
