//! Dominance between dynamic signals for additively separable and
//! discounted decision problems, and the arrival-lottery comparisons.

use serde::{Deserialize, Serialize};

use crate::decision::{separating_problem, signal_value, DecisionError, DecisionProblem};
use crate::orders::{
    decompose_splittings, fosd_check, mps_check, sosd_check, weighted_mixture, BinarySplitting, MpsOutcome, OrderError,
};
use crate::prob::{BeliefVector, FinitePmf, PosteriorDistribution, ProbError};
use crate::rational::Rational;
use crate::signals::{
    arrival_signal, posterior_sequence, ArrivalLottery, DynamicSignal, SignalError, StaticExperiment,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DominanceError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("horizons differ: {0} vs {1}")]
    HorizonMismatch(usize, usize),
    #[error("signals are defined on {0} and {1} states")]
    StateMismatch(usize, usize),
    #[error("prior must give every state positive probability")]
    PriorNotInterior,
    #[error("the discount family is empty")]
    EmptyFamily,
    #[error("the static experiment never moves the prior")]
    TrivialExperiment,
    #[error("the discount sequence is not decreasing")]
    BetaNotDecreasing,
    #[error("invalid discount weights: {0}")]
    InvalidDiscount(String),
    #[error("no counterexample in the searched grid")]
    NotFound,
    #[error("internal error: {0}")]
    Internal(String),
}

/// Strictly positive period weights `β_1, …, β_T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct DiscountSequence {
    betas: Vec<Rational>,
}

impl TryFrom<Vec<Rational>> for DiscountSequence {
    type Error = DominanceError;

    fn try_from(betas: Vec<Rational>) -> Result<Self, Self::Error> {
        DiscountSequence::new(betas)
    }
}

impl From<DiscountSequence> for Vec<Rational> {
    fn from(d: DiscountSequence) -> Self {
        d.betas
    }
}

impl DiscountSequence {
    pub fn new(betas: Vec<Rational>) -> Result<Self, DominanceError> {
        if betas.is_empty() {
            return Err(DominanceError::InvalidDiscount("empty sequence".into()));
        }
        if let Some(b) = betas.iter().find(|b| !b.is_positive()) {
            return Err(DominanceError::InvalidDiscount(format!("weight {b} is not positive")));
        }
        Ok(DiscountSequence { betas })
    }

    /// `β_t = δ^{t−1}`; needs `δ > 0` so every weight is positive.
    pub fn geometric(delta: &Rational, horizon: usize) -> Result<Self, DominanceError> {
        DiscountSequence::new((0..horizon as u32).map(|e| delta.pow(e)).collect())
    }

    pub fn betas(&self) -> &[Rational] {
        &self.betas
    }

    pub fn horizon(&self) -> usize {
        self.betas.len()
    }

    /// `β̄ = Σ_t β_t`.
    pub fn total(&self) -> Rational {
        self.betas.iter().sum()
    }

    /// `β_1 ≥ β_2 ≥ … ≥ β_T`.
    pub fn is_decreasing(&self) -> bool {
        self.betas.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_increasing(&self) -> bool {
        self.betas.windows(2).all(|w| w[0] <= w[1])
    }
}

fn normalize_weights(weights: &[Rational]) -> Result<FinitePmf<usize>, DominanceError> {
    if let Some(w) = weights.iter().find(|w| w.is_negative()) {
        return Err(DominanceError::InvalidDiscount(format!("weight {w} is negative")));
    }
    let total: Rational = weights.iter().sum();
    if !total.is_positive() {
        return Err(DominanceError::InvalidDiscount("weights sum to zero".into()));
    }
    Ok(FinitePmf::new(weights.iter().enumerate().map(|(t, w)| (t + 1, w / &total)))?)
}

/// `λ_β(t) = β_t / β̄`.
pub fn lambda_weights(beta: &DiscountSequence) -> FinitePmf<usize> {
    normalize_weights(beta.betas()).expect("positive weights")
}

/// `λ(t) = δ^{t−1}(1 − δ)/(1 − δ^T)` for `δ < 1`, and `1/T` for `δ = 1`.
/// With `0^0 = 1`, `δ = 0` puts all weight on the first period.
pub fn lambda_geometric(delta: &Rational, horizon: usize) -> Result<FinitePmf<usize>, DominanceError> {
    if delta.is_negative() || *delta > 1 || horizon == 0 {
        return Err(DominanceError::InvalidDiscount(format!("δ = {delta}, T = {horizon}")));
    }
    let atoms: Vec<(usize, Rational)> = if *delta == 1 {
        (1..=horizon).map(|t| (t, Rational::new(1, horizon as i64))).collect()
    } else {
        let scale = (Rational::one() - delta) / (Rational::one() - delta.pow(horizon as u32));
        (1..=horizon).map(|t| (t, delta.pow(t as u32 - 1) * &scale)).collect()
    };
    Ok(FinitePmf::new(atoms)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemClass {
    /// Additively separable problems.
    As,
    /// β-discounted problems for one fixed weight sequence.
    Discounted,
}

/// Convex-order outcome of one period, in the additively separable test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodOutcome {
    pub period: usize,
    pub outcome: MpsOutcome,
}

/// A decision problem in the queried class that strictly prefers the
/// second signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Failing period for the additively separable class.
    pub period: Option<usize>,
    pub problem: DecisionProblem,
    /// `W(π₁)` under `problem`.
    pub value_first: Rational,
    /// `W(π₂)` under `problem`; strictly larger than `value_first`.
    pub value_second: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceVerdict {
    pub class: ProblemClass,
    pub holds: bool,
    /// One entry per period for the additively separable class.
    pub per_period: Vec<PeriodOutcome>,
    /// The mixture comparison `F^β` vs `G^β` for the discounted class.
    pub mixture: Option<MpsOutcome>,
    /// Normalized period weights used for the discounted class.
    pub lambda: Option<FinitePmf<usize>>,
    pub counterexample: Option<Counterexample>,
}

impl DominanceVerdict {
    /// The failing convex-order outcome that produced the counterexample.
    pub fn failing_outcome(&self) -> Option<&MpsOutcome> {
        match self.class {
            ProblemClass::As => self.per_period.iter().map(|p| &p.outcome).find(|o| !o.holds()),
            ProblemClass::Discounted => self.mixture.as_ref().filter(|o| !o.holds()),
        }
    }
}

fn check_pair(pi1: &DynamicSignal, pi2: &DynamicSignal, prior: &BeliefVector) -> Result<(), DominanceError> {
    if pi1.horizon() != pi2.horizon() {
        return Err(DominanceError::HorizonMismatch(pi1.horizon(), pi2.horizon()));
    }
    if pi1.num_states() != pi2.num_states() {
        return Err(DominanceError::StateMismatch(pi1.num_states(), pi2.num_states()));
    }
    if prior.dim() != pi1.num_states() {
        return Err(DominanceError::StateMismatch(pi1.num_states(), prior.dim()));
    }
    if !prior.is_interior() {
        return Err(DominanceError::PriorNotInterior);
    }
    Ok(())
}

fn certified_counterexample(
    pi1: &DynamicSignal,
    pi2: &DynamicSignal,
    prior: &BeliefVector,
    period: Option<usize>,
    problem: DecisionProblem,
) -> Result<Counterexample, DominanceError> {
    let value_first = signal_value(pi1, prior, &problem)?;
    let value_second = signal_value(pi2, prior, &problem)?;
    if value_first >= value_second {
        return Err(DominanceError::Internal(format!(
            "synthesized problem does not reverse the ranking: W(π₁) = {value_first}, W(π₂) = {value_second}"
        )));
    }
    Ok(Counterexample { period, problem, value_first, value_second })
}

/// Dominance for every additively separable problem: `F_t ⪰ G_t` for all `t`.
///
/// On failure the counterexample is the separating one-shot problem at the
/// first failing period with idle periods elsewhere.
pub fn dominates_as(
    pi1: &DynamicSignal,
    pi2: &DynamicSignal,
    prior: &BeliefVector,
) -> Result<DominanceVerdict, DominanceError> {
    check_pair(pi1, pi2, prior)?;
    let fs = posterior_sequence(pi1, prior)?;
    let gs = posterior_sequence(pi2, prior)?;
    let per_period = fs
        .iter()
        .zip(&gs)
        .enumerate()
        .map(|(t, (f, g))| Ok(PeriodOutcome { period: t + 1, outcome: mps_check(f, g)? }))
        .collect::<Result<Vec<_>, DominanceError>>()?;
    let failing = per_period.iter().find_map(|p| p.outcome.separation().map(|s| (p.period, s)));
    let counterexample = match failing {
        None => None,
        Some((t, sep)) => {
            let problem = separating_problem(&sep.witness, t, pi1.horizon());
            Some(certified_counterexample(pi1, pi2, prior, Some(t), problem)?)
        }
    };
    Ok(DominanceVerdict {
        class: ProblemClass::As,
        holds: counterexample.is_none(),
        per_period,
        mixture: None,
        lambda: None,
        counterexample,
    })
}

fn dominates_mixture(
    pi1: &DynamicSignal,
    pi2: &DynamicSignal,
    prior: &BeliefVector,
    fs: &[PosteriorDistribution],
    gs: &[PosteriorDistribution],
    weights: &[Rational],
) -> Result<DominanceVerdict, DominanceError> {
    if weights.len() != pi1.horizon() {
        return Err(DominanceError::HorizonMismatch(weights.len(), pi1.horizon()));
    }
    let lambda = normalize_weights(weights)?;
    let f_mix = weighted_mixture(fs, &lambda)?;
    let g_mix = weighted_mixture(gs, &lambda)?;
    let outcome = mps_check(&f_mix, &g_mix)?;
    let counterexample = match outcome.separation() {
        None => None,
        Some(sep) => {
            let problem = DecisionProblem::discounted(pi1.num_states(), &sep.witness.pieces, weights)?;
            Some(certified_counterexample(pi1, pi2, prior, None, problem)?)
        }
    };
    Ok(DominanceVerdict {
        class: ProblemClass::Discounted,
        holds: counterexample.is_none(),
        per_period: Vec::new(),
        mixture: Some(outcome),
        lambda: Some(lambda),
        counterexample,
    })
}

/// Dominance for every β-discounted problem: `F^β ⪰ G^β` where
/// `F^β = Σ_t λ_β(t) F_t`.
///
/// On failure the counterexample has `u_t = β_t · v` with `v` the
/// separating witness, so `W(π₁) − W(π₂) = β̄ (E_{F^β} v − E_{G^β} v) < 0`.
pub fn dominates_discounted(
    pi1: &DynamicSignal,
    pi2: &DynamicSignal,
    prior: &BeliefVector,
    beta: &DiscountSequence,
) -> Result<DominanceVerdict, DominanceError> {
    dominates_weighted(pi1, pi2, prior, beta.betas())
}

/// [`dominates_discounted`] for nonnegative weights that may vanish in some
/// periods, e.g. `δ^{t−1}` with `δ = 0`.
pub fn dominates_weighted(
    pi1: &DynamicSignal,
    pi2: &DynamicSignal,
    prior: &BeliefVector,
    weights: &[Rational],
) -> Result<DominanceVerdict, DominanceError> {
    check_pair(pi1, pi2, prior)?;
    let fs = posterior_sequence(pi1, prior)?;
    let gs = posterior_sequence(pi2, prior)?;
    dominates_mixture(pi1, pi2, prior, &fs, &gs, weights)
}

/// Exponential discounting with factor `δ ∈ [0, 1]`.
pub fn dominates_delta(
    pi1: &DynamicSignal,
    pi2: &DynamicSignal,
    prior: &BeliefVector,
    delta: &Rational,
) -> Result<DominanceVerdict, DominanceError> {
    lambda_geometric(delta, pi1.horizon())?;
    let weights: Vec<Rational> = (0..pi1.horizon() as u32).map(|e| delta.pow(e)).collect();
    dominates_weighted(pi1, pi2, prior, &weights)
}

/// Outcome of sweeping a finite family of discount sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyVerdict {
    pub verdicts: Vec<(DiscountSequence, DominanceVerdict)>,
    /// True when every member holds. This is one-sided evidence: a pass does
    /// not establish dominance for every summable sequence, while a single
    /// failure refutes it.
    pub holds: bool,
}

impl FamilyVerdict {
    pub const CAVEAT: &'static str =
        "a pass over a finite family does not prove dominance for every discount sequence; any failure refutes it";

    pub fn first_failure(&self) -> Option<&(DiscountSequence, DominanceVerdict)> {
        self.verdicts.iter().find(|(_, v)| !v.holds)
    }
}

pub fn dominates_discounted_family(
    pi1: &DynamicSignal,
    pi2: &DynamicSignal,
    prior: &BeliefVector,
    betas: &[DiscountSequence],
) -> Result<FamilyVerdict, DominanceError> {
    if betas.is_empty() {
        return Err(DominanceError::EmptyFamily);
    }
    check_pair(pi1, pi2, prior)?;
    let fs = posterior_sequence(pi1, prior)?;
    let gs = posterior_sequence(pi2, prior)?;
    let verdicts = betas
        .iter()
        .map(|beta| Ok((beta.clone(), dominates_mixture(pi1, pi2, prior, &fs, &gs, beta.betas())?)))
        .collect::<Result<Vec<_>, DominanceError>>()?;
    let holds = verdicts.iter().all(|(_, v)| v.holds);
    Ok(FamilyVerdict { verdicts, holds })
}

fn check_arrival_inputs(
    xi: &StaticExperiment,
    h: &ArrivalLottery,
    p: &ArrivalLottery,
    prior: &BeliefVector,
) -> Result<(), DominanceError> {
    if h.horizon() != p.horizon() {
        return Err(DominanceError::HorizonMismatch(h.horizon(), p.horizon()));
    }
    if !prior.is_interior() {
        return Err(DominanceError::PriorNotInterior);
    }
    if !xi.is_informative(prior)? {
        return Err(DominanceError::TrivialExperiment);
    }
    Ok(())
}

/// Comparison of two arrival lotteries for the same experiment in the
/// additively separable class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalVerdict {
    /// `P` FOSD `H`: arrival under `h` is stochastically earlier.
    pub fosd: bool,
    /// Full dominance test between the two arrival signals.
    pub verdict: DominanceVerdict,
}

/// Earlier is better: the `h`-arrival signal dominates the `p`-arrival
/// signal for all additively separable problems iff `P` FOSD `H`.
///
/// The cdf comparison and the per-period convex-order test are both run;
/// disagreement is reported as an internal error.
pub fn earlier_is_better(
    xi: &StaticExperiment,
    h: &ArrivalLottery,
    p: &ArrivalLottery,
    prior: &BeliefVector,
) -> Result<ArrivalVerdict, DominanceError> {
    check_arrival_inputs(xi, h, p, prior)?;
    let fosd = fosd_check(h, p)?;
    let verdict = dominates_as(&arrival_signal(xi, h), &arrival_signal(xi, p), prior)?;
    if verdict.holds != fosd {
        return Err(DominanceError::Internal(format!(
            "cdf comparison says {fosd} but the per-period convex order says {}",
            verdict.holds
        )));
    }
    Ok(ArrivalVerdict { fosd, verdict })
}

/// Report on risk-loving over arrival time for a decreasing `β`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskLovingReport {
    /// `P` SOSD `H`: arrival under `h` is a mean-preserving spread of arrival under `p`.
    pub sosd: bool,
    /// Binary splittings carrying `p` to `h`, when `sosd` holds.
    pub splittings: Option<Vec<BinarySplitting>>,
    /// The β-discounted comparison of the `h`-arrival against the `p`-arrival signal.
    pub verdict: DominanceVerdict,
}

impl RiskLovingReport {
    /// Whether the report exercises the implication (its hypothesis holds).
    pub fn implication_applies(&self) -> bool {
        self.sosd
    }
}

/// For decreasing `β`, a mean-preserving spread of the arrival time makes
/// the signal weakly better: `P` SOSD `H` implies `F^β ⪰ G^β`.
///
/// Both sides are computed independently; an instance where the spread
/// holds but the mixture order fails is reported as an internal error.
pub fn risk_loving_check(
    xi: &StaticExperiment,
    h: &ArrivalLottery,
    p: &ArrivalLottery,
    prior: &BeliefVector,
    beta: &DiscountSequence,
) -> Result<RiskLovingReport, DominanceError> {
    if !beta.is_decreasing() {
        return Err(DominanceError::BetaNotDecreasing);
    }
    if beta.horizon() != h.horizon() {
        return Err(DominanceError::HorizonMismatch(beta.horizon(), h.horizon()));
    }
    check_arrival_inputs(xi, h, p, prior)?;
    let sosd = sosd_check(h, p)?;
    let splittings = if sosd { Some(decompose_splittings(p.pmf(), h.pmf())?) } else { None };
    let verdict = dominates_discounted(&arrival_signal(xi, h), &arrival_signal(xi, p), prior, beta)?;
    if sosd && !verdict.holds {
        return Err(DominanceError::Internal(
            "arrival spread holds under decreasing weights but the mixture convex order fails".into(),
        ));
    }
    Ok(RiskLovingReport { sosd, splittings, verdict })
}

/// Which discount sequences [`increasing_beta_counterexample`] tries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaShape {
    /// `r^{t−1}` for `r = 2, …, max_parameter`, then `t^k` for `k = 2, …, max_parameter`.
    IncreasingConvex,
    /// `r^{−(t−1)}` for `r = 1, …, max_parameter`, then `t^{−k}` for `k = 1, …, max_parameter`.
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterexampleSearch {
    pub horizon: usize,
    pub max_parameter: u32,
    pub shape: BetaShape,
}

impl CounterexampleSearch {
    pub fn increasing(horizon: usize) -> Self {
        CounterexampleSearch { horizon, max_parameter: 4, shape: BetaShape::IncreasingConvex }
    }

    fn betas(&self) -> Vec<DiscountSequence> {
        let t = self.horizon as u32;
        let mut out = Vec::new();
        let seq = |f: &dyn Fn(u32) -> Rational| DiscountSequence::new((1..=t).map(f).collect()).expect("positive");
        match self.shape {
            BetaShape::IncreasingConvex => {
                for r in 2..=self.max_parameter.max(2) {
                    out.push(seq(&|s| Rational::from(r).pow(s - 1)));
                }
                for k in 2..=self.max_parameter.max(2) {
                    out.push(seq(&|s| Rational::from(s).pow(k)));
                }
            }
            BetaShape::Decreasing => {
                for r in 1..=self.max_parameter.max(1) {
                    out.push(seq(&|s| Rational::from(r).pow(s - 1).recip()));
                }
                for k in 1..=self.max_parameter.max(1) {
                    out.push(seq(&|s| Rational::from(s).pow(k).recip()));
                }
            }
        }
        out
    }
}

/// An arrival pair where `P` SOSD `H` yet the spread arrival is strictly worse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalCounterexample {
    pub beta: DiscountSequence,
    pub xi: StaticExperiment,
    pub prior: BeliefVector,
    /// Spread arrival lottery.
    pub h: ArrivalLottery,
    /// Concentrated arrival lottery.
    pub p: ArrivalLottery,
    pub splitting: BinarySplitting,
    /// `Σ_t λ_β(t) H(t)`, the λ-weighted probability that information has arrived.
    pub revealed_mass_spread: Rational,
    /// `Σ_t λ_β(t) P(t)`.
    pub revealed_mass_concentrated: Rational,
    /// `W` of the `h`-arrival signal in the β-discounted matching problem.
    pub value_spread: Rational,
    /// `W` of the `p`-arrival signal in the same problem; strictly larger.
    pub value_concentrated: Rational,
    /// The discounted dominance test of the `h`-arrival over the `p`-arrival signal (fails).
    pub verdict: DominanceVerdict,
}

/// Searches for a discount sequence under which splitting a sure arrival
/// time into an earlier and a later one strictly hurts.
///
/// The experiment is full revelation of a binary state under a uniform
/// prior, and the problem is guessing the state with `u_t = β_t·1[a = θ]`.
/// Sure arrivals at `y₂` are split fully onto `z₁ < y₂ < z₃`.
pub fn increasing_beta_counterexample(search: CounterexampleSearch) -> Result<ArrivalCounterexample, DominanceError> {
    let horizon = search.horizon;
    if horizon < 3 {
        return Err(DominanceError::InvalidDiscount("need a horizon of at least 3".into()));
    }
    let states = vec!["L".to_string(), "R".to_string()];
    let xi = StaticExperiment::fully_revealing(states);
    let prior = BeliefVector::uniform(2);
    let matching = DecisionProblem::matching(2, 1).utilities(1).to_vec();

    for beta in search.betas() {
        let lambda = lambda_weights(&beta);
        let problem = DecisionProblem::discounted(2, &matching, beta.betas())?;
        for y2 in 2..horizon {
            for z1 in 1..y2 {
                for z3 in y2 + 1..=horizon {
                    let span = Rational::from(z3 - z1);
                    let eta1 = Rational::from(z3 - y2) / &span;
                    let eta3 = Rational::from(y2 - z1) / &span;
                    let splitting = BinarySplitting::new(z1, y2, z3, eta1, eta3)?;
                    let p = ArrivalLottery::point_mass(horizon, y2)?;
                    let h = ArrivalLottery::new(horizon, crate::orders::apply_splitting(p.pmf(), &splitting)?)?;
                    let pi_spread = arrival_signal(&xi, &h);
                    let pi_concentrated = arrival_signal(&xi, &p);
                    let value_spread = signal_value(&pi_spread, &prior, &problem)?;
                    let value_concentrated = signal_value(&pi_concentrated, &prior, &problem)?;
                    if value_spread >= value_concentrated {
                        continue;
                    }
                    if !sosd_check(&h, &p)? {
                        return Err(DominanceError::Internal("a binary splitting failed the SOSD check".into()));
                    }
                    let verdict = dominates_discounted(&pi_spread, &pi_concentrated, &prior, &beta)?;
                    if verdict.holds {
                        return Err(DominanceError::Internal(
                            "strict value reversal but the mixture convex order holds".into(),
                        ));
                    }
                    let mass = |l: &ArrivalLottery| lambda.expectation(|&t| l.cdf(t));
                    return Ok(ArrivalCounterexample {
                        revealed_mass_spread: mass(&h),
                        revealed_mass_concentrated: mass(&p),
                        beta,
                        xi,
                        prior,
                        h,
                        p,
                        splitting,
                        value_spread,
                        value_concentrated,
                        verdict,
                    });
                }
            }
        }
    }
    Err(DominanceError::NotFound)
}
