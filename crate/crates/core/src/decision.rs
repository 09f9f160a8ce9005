//! Additively separable decision problems and the value of a signal.
//!
//! The value of a signal is computed two ways. [`signal_value`] goes through
//! the posterior distributions, `W(π) = Σ_t E_{F_t} V_t`. The oracle
//! [`signal_value_direct`] never forms a posterior: it picks, for every
//! observed prefix, the action maximizing the joint expected payoff
//! `Σ_θ μ(θ) π_t(s^t | θ) u_t(a, θ)`, which is the ex-ante optimum over pure
//! prefix-measurable strategies.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::orders::ConvexWitness;
use crate::prob::{BeliefVector, PosteriorDistribution};
use crate::rational::Rational;
use crate::signals::{induced_posteriors, DynamicSignal, Path, SignalError};

/// Default cap on `(prefix, action)` pairs evaluated by the oracle.
pub const DEFAULT_ORACLE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecisionError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("period {t} is outside 1..={horizon}")]
    PeriodOutOfRange { t: usize, horizon: usize },
    #[error("horizons differ: signal {signal}, problem {problem}")]
    HorizonMismatch { signal: usize, problem: usize },
    #[error("problem has {problem} states but the signal has {signal}")]
    StateMismatch { signal: usize, problem: usize },
    #[error("period {period} has no actions")]
    EmptyActionSet { period: usize },
    #[error("utility table for period {period}, action {action} has {found} entries, expected {expected}")]
    UtilityShape { period: usize, action: usize, found: usize, expected: usize },
    #[error("period {period} names {names} actions but has {rows} utility rows")]
    ActionCount { period: usize, names: usize, rows: usize },
    #[error("oracle instance has {pairs} (prefix, action) pairs, above the limit {limit}")]
    InstanceTooLarge { pairs: usize, limit: usize },
}

/// A `T`-period problem with finite action sets and state-dependent
/// per-period utilities `u_t(a, θ)`; total payoff is the sum over periods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionProblem {
    num_states: usize,
    actions: Vec<Vec<String>>,
    /// `utilities[t][a][θ]`, periods zero-based.
    utilities: Vec<Vec<Vec<Rational>>>,
}

impl DecisionProblem {
    pub fn new(
        num_states: usize,
        actions: Vec<Vec<String>>,
        utilities: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self, DecisionError> {
        if actions.len() != utilities.len() {
            return Err(DecisionError::HorizonMismatch { signal: actions.len(), problem: utilities.len() });
        }
        for (t, (names, table)) in actions.iter().zip(&utilities).enumerate() {
            if names.is_empty() {
                return Err(DecisionError::EmptyActionSet { period: t + 1 });
            }
            if names.len() != table.len() {
                return Err(DecisionError::ActionCount { period: t + 1, names: names.len(), rows: table.len() });
            }
            for (a, row) in table.iter().enumerate() {
                if row.len() != num_states {
                    return Err(DecisionError::UtilityShape {
                        period: t + 1,
                        action: a,
                        found: row.len(),
                        expected: num_states,
                    });
                }
            }
        }
        Ok(DecisionProblem { num_states, actions, utilities })
    }

    /// Unnamed actions `a1, a2, …` in every period.
    pub fn from_tables(num_states: usize, utilities: Vec<Vec<Vec<Rational>>>) -> Result<Self, DecisionError> {
        let actions = utilities.iter().map(|table| (1..=table.len()).map(|a| format!("a{a}")).collect()).collect();
        DecisionProblem::new(num_states, actions, utilities)
    }

    /// Guess the state each period: payoff 1 when the action names the state.
    pub fn matching(num_states: usize, horizon: usize) -> Self {
        let table: Vec<Vec<Rational>> = (0..num_states)
            .map(|a| (0..num_states).map(|s| Rational::from_integer((a == s) as i64)).collect())
            .collect();
        DecisionProblem::from_tables(num_states, vec![table; horizon]).expect("valid by construction")
    }

    /// `u_t = β_t · v` for a one-period payoff table `v[a][θ]`.
    pub fn discounted(num_states: usize, v: &[Vec<Rational>], betas: &[Rational]) -> Result<Self, DecisionError> {
        let utilities =
            betas.iter().map(|beta| v.iter().map(|row| row.iter().map(|u| beta * u).collect()).collect()).collect();
        DecisionProblem::from_tables(num_states, utilities)
    }

    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn actions(&self, t: usize) -> &[String] {
        &self.actions[t - 1]
    }

    /// Payoff table of period `t` (one-based), indexed `[action][state]`.
    pub fn utilities(&self, t: usize) -> &[Vec<Rational>] {
        &self.utilities[t - 1]
    }

    fn check_period(&self, t: usize) -> Result<(), DecisionError> {
        if t == 0 || t > self.horizon() {
            return Err(DecisionError::PeriodOutOfRange { t, horizon: self.horizon() });
        }
        Ok(())
    }

    fn check_signal(&self, signal: &DynamicSignal) -> Result<(), DecisionError> {
        if signal.horizon() != self.horizon() {
            return Err(DecisionError::HorizonMismatch { signal: signal.horizon(), problem: self.horizon() });
        }
        if signal.num_states() != self.num_states {
            return Err(DecisionError::StateMismatch { signal: signal.num_states(), problem: self.num_states });
        }
        Ok(())
    }
}

/// `V(x) = max_a ⟨u(a, ·), x⟩`, one affine piece per action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueFunction {
    pieces: Vec<Vec<Rational>>,
}

impl ValueFunction {
    pub fn new(pieces: Vec<Vec<Rational>>) -> Self {
        assert!(!pieces.is_empty());
        ValueFunction { pieces }
    }

    pub fn pieces(&self) -> &[Vec<Rational>] {
        &self.pieces
    }

    /// Lowest-index maximizing action at `x`.
    pub fn best_action(&self, x: &BeliefVector) -> usize {
        let mut best = 0;
        let mut best_value = x.dot(&self.pieces[0]);
        for (a, piece) in self.pieces.iter().enumerate().skip(1) {
            let v = x.dot(piece);
            if v > best_value {
                best = a;
                best_value = v;
            }
        }
        best
    }

    pub fn eval(&self, x: &BeliefVector) -> Rational {
        x.dot(&self.pieces[self.best_action(x)])
    }
}

impl From<&ConvexWitness> for ValueFunction {
    fn from(w: &ConvexWitness) -> Self {
        ValueFunction::new(w.pieces.clone())
    }
}

pub fn value_function(problem: &DecisionProblem, t: usize) -> Result<ValueFunction, DecisionError> {
    problem.check_period(t)?;
    Ok(ValueFunction::new(problem.utilities(t).to_vec()))
}

/// `W(π) = Σ_t E_{F_t} V_t(x)`.
pub fn signal_value(
    signal: &DynamicSignal,
    prior: &BeliefVector,
    problem: &DecisionProblem,
) -> Result<Rational, DecisionError> {
    problem.check_signal(signal)?;
    let dists = (1..=problem.horizon()).map(|t| induced_posteriors(signal, prior, t)).collect::<Result<Vec<_>, _>>()?;
    value_from_posteriors(&dists, problem)
}

/// `Σ_t E_{F_t} V_t` for already computed posterior distributions, `dists[t − 1] = F_t`.
pub fn value_from_posteriors(
    dists: &[PosteriorDistribution],
    problem: &DecisionProblem,
) -> Result<Rational, DecisionError> {
    if dists.len() != problem.horizon() {
        return Err(DecisionError::HorizonMismatch { signal: dists.len(), problem: problem.horizon() });
    }
    let mut total = Rational::zero();
    for (t, dist) in dists.iter().enumerate() {
        if dist.dim() != problem.num_states() {
            return Err(DecisionError::StateMismatch { signal: dist.dim(), problem: problem.num_states() });
        }
        let v = value_function(problem, t + 1)?;
        total += dist.expectation(|x| v.eval(x));
    }
    Ok(total)
}

/// A pure strategy: for every period, the action taken after each
/// positive-probability prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub choices: Vec<BTreeMap<Path, usize>>,
}

fn check_oracle_size(
    signal: &DynamicSignal,
    problem: &DecisionProblem,
    limit: usize,
) -> Result<Vec<BTreeMap<Path, Vec<Rational>>>, DecisionError> {
    let mut tables = Vec::with_capacity(problem.horizon());
    let mut pairs = 0usize;
    for t in 1..=problem.horizon() {
        let table = signal.prefix_likelihoods(t)?;
        pairs = pairs.saturating_add(table.len().saturating_mul(problem.actions(t).len()));
        if pairs > limit {
            return Err(DecisionError::InstanceTooLarge { pairs, limit });
        }
        tables.push(table);
    }
    Ok(tables)
}

/// Ex-ante expected utility of `strategy`:
/// `Σ_t Σ_{s^t} Σ_θ μ(θ) π_t(s^t | θ) u_t(α_t(s^t), θ)`.
pub fn strategy_value(
    signal: &DynamicSignal,
    prior: &BeliefVector,
    problem: &DecisionProblem,
    strategy: &Strategy,
) -> Result<Rational, DecisionError> {
    problem.check_signal(signal)?;
    let mut total = Rational::zero();
    for t in 1..=problem.horizon() {
        for (prefix, likelihoods) in signal.prefix_likelihoods(t)? {
            let action = strategy.choices[t - 1].get(&prefix).copied().unwrap_or(0);
            let payoff = &problem.utilities(t)[action];
            total += prior
                .probabilities()
                .iter()
                .zip(&likelihoods)
                .zip(payoff)
                .map(|((m, l), u)| m * l * u)
                .sum::<Rational>();
        }
    }
    Ok(total)
}

/// Per-prefix argmax of the joint expected payoff, and its ex-ante value.
///
/// Ties go to the lowest action index. Refuses instances with more than
/// `limit` `(prefix, action)` pairs.
pub fn optimal_strategy(
    signal: &DynamicSignal,
    prior: &BeliefVector,
    problem: &DecisionProblem,
    limit: usize,
) -> Result<(Strategy, Rational), DecisionError> {
    problem.check_signal(signal)?;
    if prior.dim() != signal.num_states() {
        return Err(SignalError::StateCountMismatch { expected: signal.num_states(), found: prior.dim() }.into());
    }
    let tables = check_oracle_size(signal, problem, limit)?;
    let mut total = Rational::zero();
    let mut choices = Vec::with_capacity(tables.len());
    for (t, table) in tables.into_iter().enumerate() {
        let mut period_choices = BTreeMap::new();
        for (prefix, likelihoods) in table {
            let joint: Vec<Rational> = prior.probabilities().iter().zip(&likelihoods).map(|(m, l)| m * l).collect();
            if joint.iter().all(Rational::is_zero) {
                continue;
            }
            let mut best: Option<(usize, Rational)> = None;
            for (a, payoff) in problem.utilities(t + 1).iter().enumerate() {
                let value: Rational = joint.iter().zip(payoff).map(|(j, u)| j * u).sum();
                if best.as_ref().is_none_or(|(_, b)| value > *b) {
                    best = Some((a, value));
                }
            }
            let (a, value) = best.expect("nonempty action set");
            total += value;
            period_choices.insert(prefix, a);
        }
        choices.push(period_choices);
    }
    Ok((Strategy { choices }, total))
}

/// `W(π)` by direct strategy optimization; equals [`signal_value`] exactly.
pub fn signal_value_direct(
    signal: &DynamicSignal,
    prior: &BeliefVector,
    problem: &DecisionProblem,
    limit: usize,
) -> Result<Rational, DecisionError> {
    optimal_strategy(signal, prior, problem, limit).map(|(_, v)| v)
}

/// The `T`-period problem that is the witness's one-shot problem in period
/// `t_star` and a single zero-payoff action in every other period. For the
/// signals whose period-`t_star` posteriors produced the witness,
/// `W(π₁) − W(π₂) = E_F w − E_G w`.
pub fn separating_problem(witness: &ConvexWitness, t_star: usize, horizon: usize) -> DecisionProblem {
    assert!((1..=horizon).contains(&t_star), "t_star outside the horizon");
    let n = witness.dim();
    let idle = vec![vec![Rational::zero(); n]];
    let utilities = (1..=horizon).map(|t| if t == t_star { witness.pieces.clone() } else { idle.clone() }).collect();
    DecisionProblem::from_tables(n, utilities).expect("valid by construction")
}

/// Bounds for [`sample_problems`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSampler {
    pub horizon: usize,
    pub num_states: usize,
    pub max_actions: usize,
    /// Utilities are `k / d` with `d ≤ max_denominator` and `|k/d| ≤ utility_bound`.
    pub max_denominator: i64,
    pub utility_bound: i64,
}

impl ProblemSampler {
    pub fn new(horizon: usize, num_states: usize, max_actions: usize) -> Self {
        ProblemSampler { horizon, num_states, max_actions, max_denominator: 4, utility_bound: 5 }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> DecisionProblem {
        let utilities = (0..self.horizon)
            .map(|_| {
                let actions = rng.gen_range(1..=self.max_actions.max(1));
                (0..actions)
                    .map(|_| {
                        (0..self.num_states)
                            .map(|_| {
                                let d = rng.gen_range(1..=self.max_denominator.max(1));
                                let k = rng.gen_range(-self.utility_bound * d..=self.utility_bound * d);
                                Rational::new(k, d)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        DecisionProblem::from_tables(self.num_states, utilities).expect("valid by construction")
    }
}

/// Deterministic stream of random problems: the same seed gives the same stream.
pub fn sample_problems(sampler: ProblemSampler, seed: u64) -> impl Iterator<Item = DecisionProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(move || sampler.sample(&mut rng))
}
