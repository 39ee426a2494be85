//! Finite probability spaces, partitions standing in for sub-σ-algebras,
//! random variables, conditional distributions and filtrations.
//!
//! Every σ-algebra on a finite outcome set is generated by a partition, so a
//! `G`-measurable variable is simply one that is constant on each atom of the
//! partition. Atoms are kept in canonical order (sorted by their smallest
//! outcome index), which makes atom ids stable across runs.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Tolerance on `|Σ p − 1|` accepted by [`ProbabilitySpace::new`].
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A finite outcome set with strictly positive probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySpace {
    probs: Vec<f64>,
}

impl ProbabilitySpace {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::ProbabilitiesDoNotSumToOne { sum });
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, outcome: usize) -> f64 {
        self.probs[outcome]
    }

    /// Total probability of a set of outcomes.
    pub fn mass(&self, outcomes: &[usize]) -> f64 {
        outcomes.iter().map(|&i| self.probs[i]).sum()
    }

    /// `E[X]`.
    pub fn expectation(&self, x: &RandomVariable) -> Result<f64> {
        self.check(x)?;
        Ok(self.probs.iter().zip(x.values()).map(|(p, v)| p * v).sum())
    }

    pub(crate) fn check(&self, x: &RandomVariable) -> Result<()> {
        check_len(self.len(), x.len())
    }

    pub(crate) fn check_partition(&self, g: &Partition) -> Result<()> {
        check_len(self.len(), g.num_outcomes())
    }
}

/// Validates a probability vector; see [`ProbabilitySpace::new`].
pub fn make_space(probs: &[f64]) -> Result<ProbabilitySpace> {
    ProbabilitySpace::new(probs.to_vec())
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::SpaceMismatch { expected, found })
    }
}

/// A bounded real-valued payoff, one value per outcome. Positive values are losses.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable {
    values: Vec<f64>,
}

impl RandomVariable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self { values: vec![value; n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, outcome: usize) -> f64 {
        self.values[outcome]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination of two variables of equal length.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn shift(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    /// Largest pointwise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_len(self.len(), other.len())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl From<Vec<f64>> for RandomVariable {
    /// Panics on non-finite input; use [`RandomVariable::new`] for fallible construction.
    fn from(values: Vec<f64>) -> Self {
        Self::new(values).expect("random variable values must be finite")
    }
}

/// A partition of the outcome set into nonempty disjoint atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    atom_of: Vec<usize>,
    atoms: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from one label per outcome; equal labels share an atom.
    pub fn from_labels<T: Eq + Hash>(labels: &[T]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidPartition("no outcomes".into()));
        }
        let mut first_seen: HashMap<&T, usize> = HashMap::new();
        let mut atoms: Vec<Vec<usize>> = Vec::new();
        let mut atom_of = vec![0; labels.len()];
        for (i, label) in labels.iter().enumerate() {
            // Outcomes are scanned in order, so atoms come out sorted by smallest member.
            let id = *first_seen.entry(label).or_insert_with(|| {
                atoms.push(Vec::new());
                atoms.len() - 1
            });
            atoms[id].push(i);
            atom_of[i] = id;
        }
        Ok(Self { atom_of, atoms })
    }

    /// Builds a partition of `{0, …, n−1}` from explicit atoms.
    pub fn from_atoms(n: usize, atoms: Vec<Vec<usize>>) -> Result<Self> {
        let mut labels: Vec<Option<usize>> = vec![None; n];
        for (a, atom) in atoms.iter().enumerate() {
            if atom.is_empty() {
                return Err(Error::InvalidPartition(format!("atom {a} is empty")));
            }
            for &i in atom {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "outcome {i} out of range for {n} outcomes"
                    )));
                }
                if labels[i].replace(a).is_some() {
                    return Err(Error::InvalidPartition(format!(
                        "outcome {i} appears in more than one atom"
                    )));
                }
            }
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                l.ok_or_else(|| Error::InvalidPartition(format!("outcome {i} is not covered")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_labels(&labels)
    }

    /// `{Ω}`: no information.
    pub fn trivial(n: usize) -> Self {
        Self { atom_of: vec![0; n], atoms: vec![(0..n).collect()] }
    }

    /// Singletons: full information.
    pub fn discrete(n: usize) -> Self {
        Self { atom_of: (0..n).collect(), atoms: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn num_outcomes(&self) -> usize {
        self.atom_of.len()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }

    pub fn atom(&self, id: usize) -> Result<&[usize]> {
        self.atoms.get(id).map(Vec::as_slice).ok_or(Error::UnknownAtom(id))
    }

    pub fn atom_of(&self, outcome: usize) -> usize {
        self.atom_of[outcome]
    }

    pub fn is_trivial(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn is_discrete(&self) -> bool {
        self.atoms.len() == self.atom_of.len()
    }

    /// Spreads one value per atom over the outcomes of that atom.
    pub fn broadcast(&self, per_atom: &[f64]) -> Result<RandomVariable> {
        check_len(self.num_atoms(), per_atom.len())?;
        RandomVariable::new(self.atom_of.iter().map(|&a| per_atom[a]).collect())
    }

    /// True iff every atom of `self` lies inside some atom of `coarse`.
    pub fn refines(&self, coarse: &Partition) -> Result<bool> {
        check_len(self.num_outcomes(), coarse.num_outcomes())?;
        Ok(self.atoms.iter().all(|atom| {
            let target = coarse.atom_of[atom[0]];
            atom.iter().all(|&i| coarse.atom_of[i] == target)
        }))
    }
}

/// See [`Partition::refines`].
pub fn refines(fine: &Partition, coarse: &Partition) -> Result<bool> {
    fine.refines(coarse)
}

/// True iff `z` is constant on every atom of `g`.
pub fn is_measurable(z: &RandomVariable, g: &Partition) -> Result<bool> {
    check_len(g.num_outcomes(), z.len())?;
    Ok(g.atoms().iter().all(|atom| {
        let first = z.get(atom[0]);
        atom.iter().all(|&i| z.get(i) == first)
    }))
}

/// A finitely supported distribution with strictly increasing support.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    support: Vec<f64>,
    weights: Vec<f64>,
}

impl Distribution {
    /// Canonicalizes `(value, weight)` pairs: sorts by value and merges duplicates.
    /// Weights are renormalized to sum to one.
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &(v, w)) in pairs.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { index });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveProbability { index, value: w });
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let mut support: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, w) in pairs {
            match support.last() {
                Some(&last) if last == v => *weights.last_mut().unwrap() += w / total,
                _ => {
                    support.push(v);
                    weights.push(w / total);
                }
            }
        }
        Ok(Self { support, weights })
    }

    pub fn point_mass(value: f64) -> Self {
        Self { support: vec![value], weights: vec![1.0] }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_point_mass(&self) -> bool {
        self.support.len() == 1
    }

    pub fn min(&self) -> f64 {
        self.support[0]
    }

    pub fn max(&self) -> f64 {
        *self.support.last().unwrap()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.weights.iter().copied())
    }

    /// `E[f(X)]`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(v, w)| w * f(v)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|v| v)
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.iter().take_while(|&(v, _)| v <= x).map(|(_, w)| w).sum()
    }
}

/// The distribution of `x` given the atom `atom` of `g`.
pub fn conditional_distribution(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    atom: usize,
) -> Result<Distribution> {
    space.check(x)?;
    space.check_partition(g)?;
    let outcomes = g.atom(atom)?;
    Distribution::new(outcomes.iter().map(|&i| (x.get(i), space.prob(i))))
}

/// `E[X | G]`, broadcast over each atom.
pub fn conditional_expectation(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
) -> Result<RandomVariable> {
    per_atom(space, x, g, |outcomes| {
        let mass = space.mass(outcomes);
        outcomes.iter().map(|&i| space.prob(i) * x.get(i)).sum::<f64>() / mass
    })
}

/// `esssup[X | G]`: the per-atom maximum.
pub fn ess_sup_conditional(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
) -> Result<RandomVariable> {
    per_atom(space, x, g, |outcomes| {
        outcomes.iter().map(|&i| x.get(i)).fold(f64::NEG_INFINITY, f64::max)
    })
}

/// `essinf[X | G]`: the per-atom minimum.
pub fn ess_inf_conditional(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
) -> Result<RandomVariable> {
    per_atom(space, x, g, |outcomes| {
        outcomes.iter().map(|&i| x.get(i)).fold(f64::INFINITY, f64::min)
    })
}

fn per_atom(
    space: &ProbabilitySpace,
    x: &RandomVariable,
    g: &Partition,
    f: impl Fn(&[usize]) -> f64,
) -> Result<RandomVariable> {
    space.check(x)?;
    space.check_partition(g)?;
    let values: Vec<f64> = g.atoms().iter().map(|atom| f(atom)).collect();
    g.broadcast(&values)
}

/// A refining sequence of partitions from `{Ω}` to singletons.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    stages: Vec<Partition>,
}

impl Filtration {
    pub fn new(stages: Vec<Partition>) -> Result<Self> {
        let first = stages
            .first()
            .ok_or_else(|| Error::InvalidFiltration("no stages".into()))?;
        let n = first.num_outcomes();
        if !first.is_trivial() {
            return Err(Error::InvalidFiltration("stage 0 must be the trivial partition".into()));
        }
        for (t, pair) in stages.windows(2).enumerate() {
            if !pair[1].refines(&pair[0])? {
                return Err(Error::InvalidFiltration(format!(
                    "stage {} does not refine stage {t}",
                    t + 1
                )));
            }
        }
        if !stages.last().unwrap().is_discrete() {
            return Err(Error::InvalidFiltration("last stage must be the discrete partition".into()));
        }
        check_len(n, stages.last().unwrap().num_outcomes())?;
        Ok(Self { stages })
    }

    pub fn stages(&self) -> &[Partition] {
        &self.stages
    }

    pub fn stage(&self, t: usize) -> &Partition {
        &self.stages[t]
    }

    /// Index of the final stage `T`.
    pub fn horizon(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn num_outcomes(&self) -> usize {
        self.stages[0].num_outcomes()
    }
}
