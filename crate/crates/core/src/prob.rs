//! Finite probability primitives: belief vectors, finitely supported pmfs and
//! distributions over posteriors.
//!
//! Everything here is exact. Constructors validate instead of rescaling, so a
//! value of any of these types always satisfies its invariants.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProbError {
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: Rational },
    #[error("negative weight {0}")]
    NegativeWeight(Rational),
    #[error("no atom has positive weight")]
    EmptySupport,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("belief vector must have at least one state")]
    NoStates,
}

/// A point of the probability simplex over a finite state space.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct BeliefVector(Vec<Rational>);

impl BeliefVector {
    pub fn new(probabilities: Vec<Rational>) -> Result<Self, ProbError> {
        if probabilities.is_empty() {
            return Err(ProbError::NoStates);
        }
        if let Some(w) = probabilities.iter().find(|p| p.is_negative()) {
            return Err(ProbError::NegativeWeight(w.clone()));
        }
        let sum: Rational = probabilities.iter().sum();
        if sum != 1 {
            return Err(ProbError::NotNormalized { sum });
        }
        Ok(BeliefVector(probabilities))
    }

    /// Builds a belief from nonnegative masses by dividing through by their total.
    pub fn normalized(masses: Vec<Rational>) -> Result<Self, ProbError> {
        if let Some(w) = masses.iter().find(|p| p.is_negative()) {
            return Err(ProbError::NegativeWeight(w.clone()));
        }
        let total: Rational = masses.iter().sum();
        if !total.is_positive() {
            return Err(ProbError::EmptySupport);
        }
        Ok(BeliefVector(masses.into_iter().map(|m| m / &total).collect()))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        BeliefVector(vec![Rational::new(1, n as i64); n])
    }

    /// The degenerate belief concentrated on state `i`.
    pub fn vertex(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut v = vec![Rational::zero(); n];
        v[i] = Rational::one();
        BeliefVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.0
    }

    pub fn get(&self, state: usize) -> &Rational {
        &self.0[state]
    }

    /// True when every state has strictly positive probability.
    pub fn is_interior(&self) -> bool {
        self.0.iter().all(Rational::is_positive)
    }

    /// `⟨coefficients, self⟩`, the expected value of a state-indexed payoff.
    pub fn dot(&self, coefficients: &[Rational]) -> Rational {
        assert_eq!(coefficients.len(), self.0.len(), "payoff dimension");
        self.0.iter().zip(coefficients).map(|(p, c)| p * c).sum()
    }
}

impl fmt::Debug for BeliefVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BeliefVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'de> Deserialize<'de> for BeliefVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<Rational>::deserialize(deserializer)?;
        BeliefVector::new(raw).map_err(serde::de::Error::custom)
    }
}

/// A finitely supported probability mass function.
///
/// Atoms are kept sorted by label, labels are distinct, every weight is
/// strictly positive and the weights sum to exactly one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinitePmf<L> {
    atoms: Vec<(L, Rational)>,
}

impl<L: Ord + Clone> FinitePmf<L> {
    /// Validates `atoms`: zero weights are dropped and duplicate labels merged,
    /// but a total different from one is an error rather than being rescaled.
    pub fn new<I>(atoms: I) -> Result<Self, ProbError>
    where
        I: IntoIterator<Item = (L, Rational)>,
    {
        let mut merged: BTreeMap<L, Rational> = BTreeMap::new();
        for (label, weight) in atoms {
            if weight.is_negative() {
                return Err(ProbError::NegativeWeight(weight));
            }
            *merged.entry(label).or_insert_with(Rational::zero) += weight;
        }
        let atoms: Vec<(L, Rational)> = merged.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        if atoms.is_empty() {
            return Err(ProbError::EmptySupport);
        }
        let sum: Rational = atoms.iter().map(|(_, w)| w).sum();
        if sum != 1 {
            return Err(ProbError::NotNormalized { sum });
        }
        Ok(FinitePmf { atoms })
    }

    pub fn point_mass(label: L) -> Self {
        FinitePmf { atoms: vec![(label, Rational::one())] }
    }

    pub fn atoms(&self) -> &[(L, Rational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &L> {
        self.atoms.iter().map(|(l, _)| l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, &Rational)> {
        self.atoms.iter().map(|(l, w)| (l, w))
    }

    /// Mass on `label`; zero off the support.
    pub fn weight(&self, label: &L) -> Rational {
        self.atoms
            .binary_search_by(|(l, _)| l.cmp(label))
            .map(|i| self.atoms[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// Pushes the pmf forward through `f`, merging labels that collide.
    pub fn map<M: Ord + Clone>(&self, mut f: impl FnMut(&L) -> M) -> FinitePmf<M> {
        FinitePmf::new(self.atoms.iter().map(|(l, w)| (f(l), w.clone()))).expect("pushforward of a valid pmf is valid")
    }

    /// `Σ_k weight_k · part_k`; the mixing weights must themselves sum to one.
    pub fn mixture(parts: &[(Rational, &FinitePmf<L>)]) -> Result<Self, ProbError> {
        FinitePmf::new(
            parts.iter().flat_map(|(lambda, pmf)| pmf.atoms.iter().map(move |(l, w)| (l.clone(), lambda * w))),
        )
    }

    pub fn expectation(&self, mut f: impl FnMut(&L) -> Rational) -> Rational {
        self.atoms.iter().map(|(l, w)| w * f(l)).sum()
    }
}

impl<L: fmt::Debug> fmt::Debug for FinitePmf<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.atoms.iter().map(|(l, w)| (l, w))).finish()
    }
}

/// Validates a pmf from `(label, weight)` pairs.
pub fn make_pmf<L: Ord + Clone>(atoms: Vec<(L, Rational)>) -> Result<FinitePmf<L>, ProbError> {
    FinitePmf::new(atoms)
}

/// A finitely supported distribution over beliefs, all of one dimension.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PosteriorDistribution {
    dim: usize,
    pmf: FinitePmf<BeliefVector>,
}

impl PosteriorDistribution {
    pub fn new<I>(atoms: I) -> Result<Self, ProbError>
    where
        I: IntoIterator<Item = (BeliefVector, Rational)>,
    {
        let pmf = FinitePmf::new(atoms)?;
        Self::from_pmf(pmf)
    }

    pub fn from_pmf(pmf: FinitePmf<BeliefVector>) -> Result<Self, ProbError> {
        let dim = pmf.atoms[0].0.dim();
        if let Some((b, _)) = pmf.atoms.iter().find(|(b, _)| b.dim() != dim) {
            return Err(ProbError::DimensionMismatch { expected: dim, found: b.dim() });
        }
        Ok(PosteriorDistribution { dim, pmf })
    }

    pub fn point_mass(belief: BeliefVector) -> Self {
        PosteriorDistribution { dim: belief.dim(), pmf: FinitePmf::point_mass(belief) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pmf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pmf.is_empty()
    }

    pub fn pmf(&self) -> &FinitePmf<BeliefVector> {
        &self.pmf
    }

    pub fn atoms(&self) -> &[(BeliefVector, Rational)] {
        self.pmf.atoms()
    }

    pub fn support(&self) -> impl Iterator<Item = &BeliefVector> {
        self.pmf.labels()
    }

    pub fn weights(&self) -> impl Iterator<Item = &Rational> {
        self.pmf.atoms().iter().map(|(_, w)| w)
    }

    pub fn weight(&self, belief: &BeliefVector) -> Rational {
        self.pmf.weight(belief)
    }

    pub fn is_point_mass(&self) -> bool {
        self.pmf.len() == 1
    }

    pub fn expectation(&self, f: impl FnMut(&BeliefVector) -> Rational) -> Rational {
        self.pmf.expectation(f)
    }

    pub fn barycenter(&self) -> BeliefVector {
        let mut acc = vec![Rational::zero(); self.dim];
        for (b, w) in self.pmf.atoms() {
            for (a, p) in acc.iter_mut().zip(b.probabilities()) {
                *a += w * p;
            }
        }
        BeliefVector::new(acc).expect("convex combination of beliefs is a belief")
    }

    /// Mixture of distributions over a common state space.
    pub fn mixture(parts: &[(Rational, &PosteriorDistribution)]) -> Result<Self, ProbError> {
        let pmfs: Vec<(Rational, &FinitePmf<BeliefVector>)> = parts.iter().map(|(l, d)| (l.clone(), &d.pmf)).collect();
        Self::from_pmf(FinitePmf::mixture(&pmfs)?)
    }
}

impl fmt::Debug for PosteriorDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.pmf, f)
    }
}

/// `E_dist f(x) = Σ_i weight_i · f(support_i)`.
pub fn expectation(dist: &PosteriorDistribution, f: impl FnMut(&BeliefVector) -> Rational) -> Rational {
    dist.expectation(f)
}

pub fn barycenter(dist: &PosteriorDistribution) -> BeliefVector {
    dist.barycenter()
}
