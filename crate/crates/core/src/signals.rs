//! Dynamic information structures and the posterior processes they induce.
//!
//! A [`DynamicSignal`] stores, for every state, a pmf over complete signal
//! paths `s^T = (s_1, …, s_T)`. Period marginals and prefix likelihoods are
//! derived on demand. [`induced_posteriors`] turns a signal and a prior into
//! the period-`t` distribution over posterior beliefs.

use std::collections::BTreeMap;

use crate::prob::{BeliefVector, FinitePmf, PosteriorDistribution, ProbError};
use crate::rational::Rational;

/// Symbol shown in every period before an arrival lottery delivers its realization.
pub const NULL_SYMBOL: &str = "∅";

/// A signal path: one symbol index per period, indexing into that period's alphabet.
pub type Path = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignalError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("the observed event has zero probability")]
    ZeroProbabilityEvent,
    #[error("period {t} is outside 1..={horizon}")]
    PeriodOutOfRange { t: usize, horizon: usize },
    #[error("prior must give every state positive probability")]
    PriorNotInterior,
    #[error("prior has {found} states but the signal has {expected}")]
    StateCountMismatch { expected: usize, found: usize },
    #[error("horizons differ: {0} vs {1}")]
    HorizonMismatch(usize, usize),
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("period {period} has an empty alphabet")]
    EmptyAlphabet { period: usize },
    #[error("path {path:?} for state `{state}` does not fit the declared alphabets")]
    InvalidPath { state: String, path: Path },
    #[error("kernel has {found} rows but there are {expected} states")]
    KernelSize { expected: usize, found: usize },
    #[error("arrival time {0} is outside 1..={1}")]
    ArrivalOutOfRange(usize, usize),
}

/// `posterior_θ = prior_θ · lik_θ / Σ_θ' prior_θ' · lik_θ'`.
pub fn bayes_posterior(prior: &BeliefVector, likelihoods: &[Rational]) -> Result<BeliefVector, SignalError> {
    if likelihoods.len() != prior.dim() {
        return Err(SignalError::StateCountMismatch { expected: prior.dim(), found: likelihoods.len() });
    }
    if let Some(l) = likelihoods.iter().find(|l| l.is_negative()) {
        return Err(ProbError::NegativeWeight(l.clone()).into());
    }
    let joint: Vec<Rational> = prior.probabilities().iter().zip(likelihoods).map(|(p, l)| p * l).collect();
    BeliefVector::normalized(joint).map_err(|e| match e {
        ProbError::EmptySupport => SignalError::ZeroProbabilityEvent,
        other => other.into(),
    })
}

/// A state-conditional distribution over complete signal paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicSignal {
    states: Vec<String>,
    alphabets: Vec<Vec<String>>,
    kernel: Vec<FinitePmf<Path>>,
}

impl DynamicSignal {
    pub fn new(
        states: Vec<String>,
        alphabets: Vec<Vec<String>>,
        kernel: Vec<FinitePmf<Path>>,
    ) -> Result<Self, SignalError> {
        if alphabets.is_empty() {
            return Err(SignalError::EmptyHorizon);
        }
        if let Some(period) = alphabets.iter().position(Vec::is_empty) {
            return Err(SignalError::EmptyAlphabet { period: period + 1 });
        }
        if kernel.len() != states.len() {
            return Err(SignalError::KernelSize { expected: states.len(), found: kernel.len() });
        }
        for (state, pmf) in states.iter().zip(&kernel) {
            for path in pmf.labels() {
                let fits = path.len() == alphabets.len()
                    && path.iter().zip(&alphabets).all(|(&s, alphabet)| s < alphabet.len());
                if !fits {
                    return Err(SignalError::InvalidPath { state: state.clone(), path: path.clone() });
                }
            }
        }
        Ok(DynamicSignal { states, alphabets, kernel })
    }

    /// Reveals the state in period 1; later periods carry a single dummy symbol.
    pub fn fully_revealing(states: Vec<String>, horizon: usize) -> Self {
        let mut alphabets = vec![states.clone()];
        alphabets.extend((1..horizon).map(|_| vec!["-".to_string()]));
        let kernel = (0..states.len())
            .map(|i| {
                let mut path = vec![0; horizon];
                path[0] = i;
                FinitePmf::point_mass(path)
            })
            .collect();
        DynamicSignal::new(states, alphabets, kernel).expect("valid by construction")
    }

    /// The same single symbol in every period, whatever the state.
    pub fn uninformative(states: Vec<String>, horizon: usize) -> Self {
        let alphabets = (0..horizon).map(|_| vec!["-".to_string()]).collect();
        let kernel = states.iter().map(|_| FinitePmf::point_mass(vec![0; horizon])).collect();
        DynamicSignal::new(states, alphabets, kernel).expect("valid by construction")
    }

    pub fn horizon(&self) -> usize {
        self.alphabets.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    /// Path distribution conditional on state index `state`.
    pub fn kernel(&self, state: usize) -> &FinitePmf<Path> {
        &self.kernel[state]
    }

    pub fn check_period(&self, t: usize) -> Result<(), SignalError> {
        if t == 0 || t > self.horizon() {
            return Err(SignalError::PeriodOutOfRange { t, horizon: self.horizon() });
        }
        Ok(())
    }

    /// For each prefix `s^t` reachable in some state, the vector of
    /// likelihoods `π_t(s^t | θ)` over states.
    pub fn prefix_likelihoods(&self, t: usize) -> Result<BTreeMap<Path, Vec<Rational>>, SignalError> {
        self.check_period(t)?;
        let n = self.num_states();
        let mut table: BTreeMap<Path, Vec<Rational>> = BTreeMap::new();
        for (state, pmf) in self.kernel.iter().enumerate() {
            for (path, w) in pmf.iter() {
                let row = table.entry(path[..t].to_vec()).or_insert_with(|| vec![Rational::zero(); n]);
                row[state] += w;
            }
        }
        Ok(table)
    }

    fn check_prior(&self, prior: &BeliefVector) -> Result<(), SignalError> {
        if prior.dim() != self.num_states() {
            return Err(SignalError::StateCountMismatch { expected: self.num_states(), found: prior.dim() });
        }
        if !prior.is_interior() {
            return Err(SignalError::PriorNotInterior);
        }
        Ok(())
    }
}

/// Distribution of the period-`t` posterior belief, `F_t`.
///
/// Every prefix with positive probability contributes its Bayes posterior
/// with weight equal to the prefix's marginal probability; equal posteriors
/// are merged. The result always has barycenter `prior`.
pub fn induced_posteriors(
    signal: &DynamicSignal,
    prior: &BeliefVector,
    t: usize,
) -> Result<PosteriorDistribution, SignalError> {
    signal.check_prior(prior)?;
    let table = signal.prefix_likelihoods(t)?;
    let mut atoms = Vec::with_capacity(table.len());
    for likelihoods in table.values() {
        let joint: Vec<Rational> = prior.probabilities().iter().zip(likelihoods).map(|(p, l)| p * l).collect();
        let marginal: Rational = joint.iter().sum();
        if marginal.is_zero() {
            continue;
        }
        let posterior = BeliefVector::new(joint.into_iter().map(|j| j / &marginal).collect())?;
        atoms.push((posterior, marginal));
    }
    Ok(PosteriorDistribution::new(atoms)?)
}

/// `F_1, …, F_T` for the whole horizon.
pub fn posterior_sequence(
    signal: &DynamicSignal,
    prior: &BeliefVector,
) -> Result<Vec<PosteriorDistribution>, SignalError> {
    (1..=signal.horizon()).map(|t| induced_posteriors(signal, prior, t)).collect()
}

/// A one-shot experiment `ξ : Θ → Δ(Z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticExperiment {
    states: Vec<String>,
    realizations: Vec<String>,
    kernel: Vec<FinitePmf<usize>>,
}

impl StaticExperiment {
    /// Realizations that no state can produce are pruned and the rest reindexed.
    pub fn new(
        states: Vec<String>,
        realizations: Vec<String>,
        kernel: Vec<FinitePmf<usize>>,
    ) -> Result<Self, SignalError> {
        if kernel.len() != states.len() {
            return Err(SignalError::KernelSize { expected: states.len(), found: kernel.len() });
        }
        for (state, pmf) in states.iter().zip(&kernel) {
            if let Some(&z) = pmf.labels().find(|&&z| z >= realizations.len()) {
                return Err(SignalError::InvalidPath { state: state.clone(), path: vec![z] });
            }
        }
        let mut used: Vec<usize> = kernel.iter().flat_map(|pmf| pmf.labels().copied()).collect();
        used.sort_unstable();
        used.dedup();
        let reindex: BTreeMap<usize, usize> = used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let realizations = used.iter().map(|&z| realizations[z].clone()).collect();
        let kernel = kernel.iter().map(|pmf| pmf.map(|z| reindex[z])).collect();
        Ok(StaticExperiment { states, realizations, kernel })
    }

    /// Realization `z_i` is state `i` itself.
    pub fn fully_revealing(states: Vec<String>) -> Self {
        let kernel = (0..states.len()).map(FinitePmf::point_mass).collect();
        StaticExperiment::new(states.clone(), states, kernel).expect("valid by construction")
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn realizations(&self) -> &[String] {
        &self.realizations
    }

    pub fn kernel(&self, state: usize) -> &FinitePmf<usize> {
        &self.kernel[state]
    }

    /// `ρ`, the distribution of the posterior after observing `ξ` once.
    pub fn posterior_distribution(&self, prior: &BeliefVector) -> Result<PosteriorDistribution, SignalError> {
        if prior.dim() != self.num_states() {
            return Err(SignalError::StateCountMismatch { expected: self.num_states(), found: prior.dim() });
        }
        let mut atoms = Vec::new();
        for z in 0..self.realizations.len() {
            let likelihoods: Vec<Rational> = self.kernel.iter().map(|pmf| pmf.weight(&z)).collect();
            let marginal = prior.dot(&likelihoods);
            if marginal.is_zero() {
                continue;
            }
            atoms.push((bayes_posterior(prior, &likelihoods)?, marginal));
        }
        Ok(PosteriorDistribution::new(atoms)?)
    }

    /// Non-trivial means some realization moves the belief away from the prior.
    pub fn is_informative(&self, prior: &BeliefVector) -> Result<bool, SignalError> {
        let rho = self.posterior_distribution(prior)?;
        let informative = rho.support().any(|x| x != prior);
        Ok(informative)
    }
}

/// Distribution of the arrival time `Y` on `{1, …, T}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalLottery {
    horizon: usize,
    pmf: FinitePmf<usize>,
}

impl ArrivalLottery {
    pub fn new(horizon: usize, pmf: FinitePmf<usize>) -> Result<Self, SignalError> {
        if horizon == 0 {
            return Err(SignalError::EmptyHorizon);
        }
        if let Some(&y) = pmf.labels().find(|&&y| y == 0 || y > horizon) {
            return Err(SignalError::ArrivalOutOfRange(y, horizon));
        }
        Ok(ArrivalLottery { horizon, pmf })
    }

    pub fn point_mass(horizon: usize, time: usize) -> Result<Self, SignalError> {
        ArrivalLottery::new(horizon, FinitePmf::point_mass(time))
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn pmf(&self) -> &FinitePmf<usize> {
        &self.pmf
    }

    /// `h(y) = P(Y = y)`.
    pub fn mass(&self, y: usize) -> Rational {
        self.pmf.weight(&y)
    }

    /// `H(y) = P(Y ≤ y)`.
    pub fn cdf(&self, y: usize) -> Rational {
        self.pmf.iter().filter(|(&t, _)| t <= y).map(|(_, w)| w).sum()
    }

    /// `(H(1), …, H(T))`.
    pub fn cdf_values(&self) -> Vec<Rational> {
        let mut acc = Rational::zero();
        (1..=self.horizon)
            .map(|y| {
                acc += self.mass(y);
                acc.clone()
            })
            .collect()
    }

    pub fn mean(&self) -> Rational {
        self.pmf.expectation(|&y| Rational::from(y))
    }
}

/// The dynamic signal that reveals one draw of `xi` at the random time drawn
/// from `lottery`, and nothing else.
///
/// Period alphabets are `{∅} ∪ Z`: the null symbol is shown before arrival and
/// the realization is repeated in every period from arrival on. The arrival
/// time is drawn independently of the state.
pub fn arrival_signal(xi: &StaticExperiment, lottery: &ArrivalLottery) -> DynamicSignal {
    let horizon = lottery.horizon();
    let mut symbols = vec![NULL_SYMBOL.to_string()];
    symbols.extend(xi.realizations().iter().cloned());
    let alphabets = vec![symbols; horizon];
    let kernel = (0..xi.num_states())
        .map(|state| {
            let atoms = lottery.pmf().iter().flat_map(|(&arrival, h)| {
                xi.kernel(state).iter().map(move |(&z, p)| {
                    let mut path = vec![0; horizon];
                    path[arrival - 1..].iter_mut().for_each(|s| *s = z + 1);
                    (path, h * p)
                })
            });
            FinitePmf::new(atoms).expect("product of pmfs is a pmf")
        })
        .collect();
    DynamicSignal::new(xi.states().to_vec(), alphabets, kernel).expect("valid by construction")
}

/// Closed form of [`induced_posteriors`] for an arrival signal:
/// `f_t(x) = H(t)·ρ(x)` off the prior and `H(t)·ρ(μ) + 1 − H(t)` at the prior.
pub fn arrival_posteriors(
    xi: &StaticExperiment,
    lottery: &ArrivalLottery,
    prior: &BeliefVector,
    t: usize,
) -> Result<PosteriorDistribution, SignalError> {
    if t == 0 || t > lottery.horizon() {
        return Err(SignalError::PeriodOutOfRange { t, horizon: lottery.horizon() });
    }
    let rho = xi.posterior_distribution(prior)?;
    let arrived = lottery.cdf(t);
    let pending = Rational::one() - &arrived;
    let atoms =
        rho.atoms().iter().map(|(x, w)| (x.clone(), &arrived * w)).chain(std::iter::once((prior.clone(), pending)));
    Ok(PosteriorDistribution::new(atoms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn binary() -> Vec<String> {
        vec!["L".into(), "R".into()]
    }

    fn half() -> BeliefVector {
        BeliefVector::uniform(2)
    }

    fn revealed() -> PosteriorDistribution {
        PosteriorDistribution::new(vec![(BeliefVector::vertex(2, 0), q(1, 2)), (BeliefVector::vertex(2, 1), q(1, 2))])
            .unwrap()
    }

    #[test]
    fn bayes_examples() {
        assert_eq!(bayes_posterior(&half(), &[q(1, 1), q(1, 1)]).unwrap(), half());
        assert_eq!(bayes_posterior(&half(), &[q(1, 1), q(0, 1)]).unwrap(), BeliefVector::vertex(2, 0));
        assert_eq!(
            bayes_posterior(&half(), &[q(3, 4), q(1, 4)]).unwrap(),
            BeliefVector::new(vec![q(3, 4), q(1, 4)]).unwrap()
        );
        assert_eq!(bayes_posterior(&half(), &[q(0, 1), q(0, 1)]), Err(SignalError::ZeroProbabilityEvent));
    }

    #[test]
    fn induced_posteriors_examples() {
        let full = DynamicSignal::fully_revealing(binary(), 2);
        assert_eq!(induced_posteriors(&full, &half(), 1).unwrap(), revealed());

        let noise = DynamicSignal::uninformative(binary(), 3);
        for t in 1..=3 {
            assert_eq!(induced_posteriors(&noise, &half(), t).unwrap(), PosteriorDistribution::point_mass(half()));
        }

        let xi = StaticExperiment::fully_revealing(binary());
        let h = ArrivalLottery::new(2, FinitePmf::new(vec![(1, q(1, 2)), (2, q(1, 2))]).unwrap()).unwrap();
        let expected = PosteriorDistribution::new(vec![
            (BeliefVector::vertex(2, 0), q(1, 4)),
            (BeliefVector::vertex(2, 1), q(1, 4)),
            (half(), q(1, 2)),
        ])
        .unwrap();
        assert_eq!(induced_posteriors(&arrival_signal(&xi, &h), &half(), 1).unwrap(), expected);
        assert_eq!(arrival_posteriors(&xi, &h, &half(), 1).unwrap(), expected);
    }

    #[test]
    fn induced_posteriors_errors() {
        let full = DynamicSignal::fully_revealing(binary(), 2);
        assert_eq!(induced_posteriors(&full, &half(), 3), Err(SignalError::PeriodOutOfRange { t: 3, horizon: 2 }));
        assert_eq!(induced_posteriors(&full, &half(), 0), Err(SignalError::PeriodOutOfRange { t: 0, horizon: 2 }));
        assert_eq!(induced_posteriors(&full, &BeliefVector::vertex(2, 0), 1), Err(SignalError::PriorNotInterior));
    }

    #[test]
    fn arrival_signal_examples() {
        let xi = StaticExperiment::fully_revealing(binary());
        let mu = BeliefVector::new(vec![q(1, 3), q(2, 3)]).unwrap();

        let immediate = arrival_signal(&xi, &ArrivalLottery::point_mass(3, 1).unwrap());
        let rho = xi.posterior_distribution(&mu).unwrap();
        for t in 1..=3 {
            assert_eq!(induced_posteriors(&immediate, &mu, t).unwrap(), rho);
        }

        let last = arrival_signal(&xi, &ArrivalLottery::point_mass(3, 3).unwrap());
        for t in 1..3 {
            assert_eq!(induced_posteriors(&last, &mu, t).unwrap(), PosteriorDistribution::point_mass(mu.clone()));
        }

        let h = ArrivalLottery::new(2, FinitePmf::new(vec![(1, q(1, 2)), (2, q(1, 2))]).unwrap()).unwrap();
        assert_eq!(induced_posteriors(&arrival_signal(&xi, &h), &half(), 2).unwrap(), revealed());
    }

    #[test]
    fn arrival_posteriors_degenerate_cdf() {
        let xi = StaticExperiment::fully_revealing(binary());
        let late = ArrivalLottery::point_mass(3, 3).unwrap();
        assert_eq!(arrival_posteriors(&xi, &late, &half(), 2).unwrap(), PosteriorDistribution::point_mass(half()));
        assert_eq!(arrival_posteriors(&xi, &late, &half(), 3).unwrap(), revealed());
        assert!(matches!(arrival_posteriors(&xi, &late, &half(), 4), Err(SignalError::PeriodOutOfRange { .. })));
    }

    #[test]
    fn realization_at_prior_merges_with_no_arrival_atom() {
        // z0 is uninformative (equal likelihoods), z1 reveals state 0.
        let states = binary();
        let kernel = vec![
            FinitePmf::new(vec![(0, q(1, 2)), (1, q(1, 2))]).unwrap(),
            FinitePmf::new(vec![(0, q(1, 2)), (2, q(1, 2))]).unwrap(),
        ];
        let xi = StaticExperiment::new(states, vec!["a".into(), "b".into(), "c".into()], kernel).unwrap();
        let h = ArrivalLottery::new(2, FinitePmf::new(vec![(1, q(1, 2)), (2, q(1, 2))]).unwrap()).unwrap();
        let closed = arrival_posteriors(&xi, &h, &half(), 1).unwrap();
        assert_eq!(closed.weight(&half()), q(1, 2) + q(1, 4));
        assert_eq!(closed, induced_posteriors(&arrival_signal(&xi, &h), &half(), 1).unwrap());
    }

    #[test]
    fn static_experiment_prunes_unused_realizations() {
        let kernel = vec![FinitePmf::point_mass(2), FinitePmf::point_mass(0)];
        let xi = StaticExperiment::new(binary(), vec!["a".into(), "b".into(), "c".into()], kernel).unwrap();
        assert_eq!(xi.realizations(), &["a".to_string(), "c".to_string()]);
        assert_eq!(xi.kernel(0).weight(&1), q(1, 1));
        assert!(xi.is_informative(&half()).unwrap());
        let blind =
            StaticExperiment::new(binary(), vec!["a".into()], vec![FinitePmf::point_mass(0), FinitePmf::point_mass(0)])
                .unwrap();
        assert!(!blind.is_informative(&half()).unwrap());
    }

    #[test]
    fn lottery_cdf_and_validation() {
        let h = ArrivalLottery::new(3, FinitePmf::new(vec![(1, q(1, 2)), (3, q(1, 2))]).unwrap()).unwrap();
        assert_eq!(h.cdf_values(), vec![q(1, 2), q(1, 2), q(1, 1)]);
        assert_eq!(h.mean(), q(2, 1));
        assert_eq!(ArrivalLottery::point_mass(3, 4), Err(SignalError::ArrivalOutOfRange(4, 3)));
        assert_eq!(ArrivalLottery::point_mass(3, 0), Err(SignalError::ArrivalOutOfRange(0, 3)));
    }

    #[test]
    fn invalid_paths_rejected() {
        let kernel = vec![FinitePmf::point_mass(vec![0, 1]), FinitePmf::point_mass(vec![0, 0])];
        let err = DynamicSignal::new(binary(), vec![vec!["a".into()], vec!["b".into()]], kernel).unwrap_err();
        assert!(matches!(err, SignalError::InvalidPath { .. }));
        let short = vec![FinitePmf::point_mass(vec![0]), FinitePmf::point_mass(vec![0])];
        assert!(DynamicSignal::new(binary(), vec![vec!["a".into()], vec!["b".into()]], short).is_err());
    }
}
