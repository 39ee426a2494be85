use condquant::cli::{format_number, parse_number};
use condquant::quantile::{conditional_generalized_quantile, RiskSpec, SolveSettings};
use condquant::shortfall::{conditional_shortfall, ShortfallSpec};
use condquant::space::{
    conditional_expectation, is_measurable, refines, Distribution, Partition, ProbabilitySpace, RandomVariable,
};
use condquant::{LossFunction, ScoreFunction};
use proptest::prelude::*;

/// `(probabilities, values, atom labels)` on `n ∈ [min_n, max_n]` outcomes.
fn instance(min_n: usize, max_n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<usize>)> {
    (min_n..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0.05f64..1.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(0usize..n, n),
        )
    })
}

fn build(probs: &[f64], values: &[f64], labels: &[usize]) -> (ProbabilitySpace, RandomVariable, Partition) {
    let total: f64 = probs.iter().sum();
    let mut p: Vec<f64> = probs.iter().map(|v| v / total).collect();
    let residue = 1.0 - p.iter().sum::<f64>();
    p[0] += residue;
    (
        ProbabilitySpace::new(p).unwrap(),
        RandomVariable::new(values.to_vec()).unwrap(),
        Partition::from_labels(labels).unwrap(),
    )
}

fn loss_family() -> impl Strategy<Value = LossFunction> {
    prop_oneof![
        Just(LossFunction::Identity),
        Just(LossFunction::quadratic()),
        (1.2f64..4.0).prop_map(|b| LossFunction::power(1.0, b).unwrap()),
        (0.2f64..2.0).prop_map(|g| LossFunction::exp_integral(g).unwrap()),
    ]
}

proptest! {
    #[test]
    fn tower_law_of_conditional_expectation((probs, values, labels) in instance(1, 8)) {
        let (space, x, g) = build(&probs, &values, &labels);
        let inner = conditional_expectation(&space, &x, &g).unwrap();
        let lhs = space.expectation(&inner).unwrap();
        let rhs = space.expectation(&x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn refinement_is_a_partial_order(
        a in prop::collection::vec(0usize..6, 6),
        b in prop::collection::vec(0usize..6, 6),
        c in prop::collection::vec(0usize..6, 6),
    ) {
        let (pa, pb, pc) = (
            Partition::from_labels(&a).unwrap(),
            Partition::from_labels(&b).unwrap(),
            Partition::from_labels(&c).unwrap(),
        );
        prop_assert!(refines(&pa, &pa).unwrap());
        prop_assert!(refines(&pa, &Partition::trivial(6)).unwrap());
        prop_assert!(refines(&Partition::discrete(6), &pa).unwrap());
        if refines(&pa, &pb).unwrap() && refines(&pb, &pa).unwrap() {
            prop_assert_eq!(&pa, &pb);
        }
        if refines(&pa, &pb).unwrap() && refines(&pb, &pc).unwrap() {
            prop_assert!(refines(&pa, &pc).unwrap());
        }
    }

    #[test]
    fn first_order_map_is_non_increasing(
        (probs, values, _) in instance(1, 8),
        alpha in 0.05f64..0.95,
        u1 in loss_family(),
        u2 in loss_family(),
        a in -6.0f64..6.0,
        b in -6.0f64..6.0,
    ) {
        let total: f64 = probs.iter().sum();
        let dist = Distribution::new(values.iter().copied().zip(probs.iter().map(|p| p / total))).unwrap();
        let spec = RiskSpec::new(alpha, u1, u2).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (glo, ghi) = (spec.first_order_gap(&dist, lo), spec.first_order_gap(&dist, hi));
        prop_assert!(ghi <= glo + 1e-12 * (1.0 + glo.abs()), "g({lo}) = {glo} < g({hi}) = {ghi}");
    }

    #[test]
    fn quantile_is_measurable_and_within_atom_range(
        (probs, values, labels) in instance(1, 8),
        alpha in 0.05f64..0.95,
        u1 in loss_family(),
        u2 in loss_family(),
    ) {
        let (space, x, g) = build(&probs, &values, &labels);
        let spec = RiskSpec::new(alpha, u1, u2).unwrap();
        let rho = conditional_generalized_quantile(&space, &x, &g, &spec, &SolveSettings::default()).unwrap();
        prop_assert!(is_measurable(&rho, &g).unwrap());
        for atom in g.atoms() {
            let lo = atom.iter().map(|&i| x.get(i)).fold(f64::INFINITY, f64::min);
            let hi = atom.iter().map(|&i| x.get(i)).fold(f64::NEG_INFINITY, f64::max);
            let r = rho.get(atom[0]);
            prop_assert!(lo <= r && r <= hi);
        }
    }

    #[test]
    fn score_shift_moves_shortfall_by_epsilon(
        (probs, values, labels) in instance(1, 8),
        alpha in 0.05f64..0.95,
        gamma in -2.0f64..2.0,
        which in 0usize..3,
    ) {
        let (space, x, g) = build(&probs, &values, &labels);
        let v = match which {
            0 => ScoreFunction::expectile(alpha).unwrap(),
            1 => ScoreFunction::var(alpha).unwrap(),
            _ => ScoreFunction::entropic(gamma).unwrap(),
        };
        let spec = ShortfallSpec::new(v).unwrap();
        let settings = SolveSettings::default();
        let base = conditional_shortfall(&space, &x, &g, &spec, &settings).unwrap();
        for eps in [0.1, 0.01] {
            let moved = conditional_shortfall(&space, &x, &g, &spec.shifted(eps), &settings).unwrap();
            prop_assert!(moved.max_abs_diff(&base.shift(-eps)).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn printed_numbers_round_trip(v in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        let printed = format_number(v);
        let parsed = parse_number(&printed).unwrap();
        prop_assert_eq!(format_number(parsed), printed.clone());
        let scale = v.abs().max(f64::MIN_POSITIVE);
        prop_assert!((parsed - v).abs() <= 5e-12 * scale, "{v} printed as {printed}");
    }
}
