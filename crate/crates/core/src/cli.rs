//! Command-line front end.
//!
//! Exit codes: 0 when the tested relation holds (or every certificate
//! verifies), 1 when it fails, 2 on input or internal errors.

use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::decision::{signal_value, signal_value_direct, DecisionError, DecisionProblem, DEFAULT_ORACLE_LIMIT};
use crate::dominance::{
    dominates_as, dominates_discounted_family, dominates_weighted, earlier_is_better, increasing_beta_counterexample,
    lambda_geometric, risk_loving_check, CounterexampleSearch, DiscountSequence, DominanceError, DominanceVerdict,
};
use crate::io::{self, ArrivalReport, FamilyReport, InputError, LotteryFile, SearchReport, VerdictReport};
use crate::orders::{sosd_check, MpsOutcome};
use crate::prob::{BeliefVector, PosteriorDistribution};
use crate::rational::Rational;
use crate::sampling::random_beta;
use crate::signals::{arrival_signal, posterior_sequence, DynamicSignal, SignalError};

/// Environment variable overriding the oracle size guard.
pub const ORACLE_ENV: &str = "INFODOM_MAX_ORACLE";

/// Number of random sequences added to a discounted family by `--seed`.
pub const RANDOM_FAMILY_SIZE: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "infodom", version, about = "Exact dominance tests between dynamic signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    As,
    Discounted,
    DiscountedFamily,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DiscountArgs {
    /// Discount weights as comma-separated fractions, e.g. `1,1/2,1/4`; repeatable.
    #[arg(long)]
    pub beta: Vec<String>,
    /// Exponential discount factor in [0, 1]; repeatable for families.
    #[arg(long)]
    pub delta: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether the first signal dominates the second.
    Dominates {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value = "as")]
        class: ClassArg,
        #[command(flatten)]
        discount: DiscountArgs,
        /// Prior: a JSON file mapping states to probabilities, or comma-separated fractions. Uniform by default.
        #[arg(long)]
        prior: Option<String>,
        /// Adds seeded random discount sequences to a discounted family.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the distribution of posteriors in every period.
    Posteriors {
        signal: PathBuf,
        #[arg(long)]
        prior: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Value of a signal in a decision problem.
    Value {
        signal: PathBuf,
        problem: PathBuf,
        #[arg(long)]
        prior: Option<String>,
        /// Cross-check against direct optimization over strategies.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare two arrival lotteries for the same static experiment.
    Arrival {
        #[arg(required_unless_present = "search")]
        experiment: Option<PathBuf>,
        /// Lottery tested as the better one.
        #[arg(required_unless_present = "search")]
        first: Option<PathBuf>,
        #[arg(required_unless_present = "search")]
        second: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "as")]
        class: ClassArg,
        #[command(flatten)]
        discount: DiscountArgs,
        #[arg(long)]
        prior: Option<String>,
        /// Search increasing convex discount sequences for a horizon where spreading arrival hurts.
        #[arg(long, value_name = "T", conflicts_with_all = ["experiment", "first", "second"])]
        search: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Re-check every certificate in a report produced by this tool.
    Verify {
        report: PathBuf,
        /// The two signals the report compares; enables recomputing the counterexample values.
        #[arg(long, num_args = 2, value_names = ["FIRST", "SECOND"])]
        signals: Vec<PathBuf>,
        #[arg(long)]
        prior: Option<String>,
    },
    /// Run built-in fixtures and a seeded randomized sweep.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Dominance(Box<DominanceError>),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
}

impl From<DominanceError> for CliError {
    fn from(e: DominanceError) -> Self {
        CliError::Dominance(Box::new(e))
    }
}

/// Rendered output plus exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub code: i32,
}

impl Outcome {
    fn new(report: String, ok: bool) -> Self {
        Outcome { report, code: if ok { 0 } else { 1 } }
    }
}

pub fn parse_fractions(text: &str, what: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<Rational>().map_err(|e| CliError::Usage(format!("{what}: `{s}`: {e}"))))
        .collect()
}

fn parse_prior(arg: Option<&str>, states: &[String]) -> Result<BeliefVector, CliError> {
    let Some(arg) = arg else {
        return Ok(BeliefVector::uniform(states.len()));
    };
    let path = FsPath::new(arg);
    if path.exists() {
        return Ok(io::read_prior(path, states)?);
    }
    let probs = parse_fractions(arg, "--prior")?;
    if probs.len() != states.len() {
        return Err(CliError::Usage(format!("--prior: {} values for {} states", probs.len(), states.len())));
    }
    BeliefVector::new(probs).map_err(|e| CliError::Usage(format!("--prior: {e}")))
}

fn oracle_limit() -> Result<usize, CliError> {
    match std::env::var(ORACLE_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{ORACLE_ENV}: `{v}` is not a count"))),
        Err(_) => Ok(DEFAULT_ORACLE_LIMIT),
    }
}

fn render<T: serde::Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Json => io::to_json(value),
        Format::Text => text(value),
    }
}

/// Discount weights from `--beta`/`--delta`; `δ^{t−1}` weights may vanish when `δ = 0`.
fn weight_sequences(discount: &DiscountArgs, horizon: usize) -> Result<Vec<Vec<Rational>>, CliError> {
    let mut out = Vec::new();
    for b in &discount.beta {
        let weights = parse_fractions(b, "--beta")?;
        if weights.len() != horizon {
            return Err(CliError::Usage(format!("--beta {b}: {} weights for horizon {horizon}", weights.len())));
        }
        out.push(weights);
    }
    for d in &discount.delta {
        let delta: Rational = d.parse().map_err(|e| CliError::Usage(format!("--delta `{d}`: {e}")))?;
        lambda_geometric(&delta, horizon).map_err(|e| CliError::Usage(format!("--delta {d}: {e}")))?;
        out.push((0..horizon as u32).map(|e| delta.pow(e)).collect());
    }
    Ok(out)
}

fn single_weights(discount: &DiscountArgs, horizon: usize) -> Result<Vec<Rational>, CliError> {
    let mut seqs = weight_sequences(discount, horizon)?;
    if seqs.len() != 1 {
        return Err(CliError::Usage("the discounted class needs exactly one --beta or --delta".into()));
    }
    Ok(seqs.remove(0))
}

fn reject_discount(discount: &DiscountArgs) -> Result<(), CliError> {
    if !discount.beta.is_empty() || !discount.delta.is_empty() {
        return Err(CliError::Usage("--beta and --delta apply only to discounted classes".into()));
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    match cli.command {
        Command::Dominates { first, second, class, discount, prior, seed, output } => {
            let pi1 = io::read_signal(&first)?;
            let pi2 = io::read_signal(&second)?;
            let prior = parse_prior(prior.as_deref(), pi1.states())?;
            let outcome = cmd_dominates(&pi1, &pi2, &prior, class, &discount, seed, output.format)?;
            Ok((outcome, output.out))
        }
        Command::Posteriors { signal, prior, output } => {
            let pi = io::read_signal(&signal)?;
            let prior = parse_prior(prior.as_deref(), pi.states())?;
            let dists = posterior_sequence(&pi, &prior)?;
            let report = io::posteriors_report(&dists, pi.states());
            Ok((Outcome::new(render(output.format, &report, |r| io::posteriors_text(r)), true), output.out))
        }
        Command::Value { signal, problem, prior, oracle, output } => {
            let pi = io::read_signal(&signal)?;
            let problem = io::read_problem(&problem, pi.states())?;
            let prior = parse_prior(prior.as_deref(), pi.states())?;
            Ok((cmd_value(&pi, &problem, &prior, oracle, output.format)?, output.out))
        }
        Command::Arrival { experiment, first, second, class, discount, prior, search, output } => {
            if let Some(horizon) = search {
                reject_discount(&discount)?;
                return Ok((cmd_search(horizon, output.format)?, output.out));
            }
            let (Some(experiment), Some(first), Some(second)) = (experiment, first, second) else {
                return Err(CliError::Usage("arrival needs an experiment and two lotteries".into()));
            };
            let xi = io::read_experiment(&experiment)?;
            let h = io::read_lottery(&first)?;
            let p = io::read_lottery(&second)?;
            let prior = parse_prior(prior.as_deref(), xi.states())?;
            let report = match class {
                ClassArg::As => {
                    reject_discount(&discount)?;
                    let v = earlier_is_better(&xi, &h, &p, &prior)?;
                    ArrivalReport {
                        kind: "earlier_is_better".into(),
                        holds: v.verdict.holds,
                        stochastic_order: v.fosd,
                        splittings: None,
                        verdict: VerdictReport::new(&v.verdict, xi.states(), None),
                    }
                }
                ClassArg::Discounted => {
                    let weights = single_weights(&discount, h.horizon())?;
                    let beta = DiscountSequence::new(weights.clone());
                    match beta {
                        Ok(beta) if beta.is_decreasing() => {
                            let r = risk_loving_check(&xi, &h, &p, &prior, &beta)?;
                            ArrivalReport {
                                kind: "risk_loving".into(),
                                holds: r.verdict.holds,
                                stochastic_order: r.sosd,
                                splittings: r.splittings,
                                verdict: VerdictReport::new(&r.verdict, xi.states(), Some(&weights)),
                            }
                        }
                        _ => {
                            let v = dominates_weighted(
                                &arrival_signal(&xi, &h),
                                &arrival_signal(&xi, &p),
                                &prior,
                                &weights,
                            )?;
                            ArrivalReport {
                                kind: "discounted_arrival".into(),
                                holds: v.holds,
                                stochastic_order: sosd_check(&h, &p).map_err(DominanceError::from)?,
                                splittings: None,
                                verdict: VerdictReport::new(&v, xi.states(), Some(&weights)),
                            }
                        }
                    }
                }
                ClassArg::DiscountedFamily => {
                    return Err(CliError::Usage("arrival supports --class as or discounted".into()));
                }
            };
            let ok = report.holds;
            Ok((Outcome::new(render(output.format, &report, io::arrival_text), ok), output.out))
        }
        Command::Verify { report, signals, prior } => {
            let signals = match signals.as_slice() {
                [a, b] => Some((io::read_signal(a)?, io::read_signal(b)?)),
                _ => None,
            };
            let prior = match &signals {
                Some((a, _)) => Some(parse_prior(prior.as_deref(), a.states())?),
                None => None,
            };
            let value: Value = io::read_json(&report)?;
            let context = signals.as_ref().zip(prior.as_ref()).map(|((a, b), p)| (a, b, p));
            Ok((cmd_verify(&report, value, context)?, None))
        }
        Command::Selftest { seed, cases } => Ok((selftest(seed, cases), None)),
    }
}

pub fn cmd_dominates(
    pi1: &DynamicSignal,
    pi2: &DynamicSignal,
    prior: &BeliefVector,
    class: ClassArg,
    discount: &DiscountArgs,
    seed: Option<u64>,
    format: Format,
) -> Result<Outcome, CliError> {
    let states = pi1.states();
    match class {
        ClassArg::As => {
            reject_discount(discount)?;
            let verdict = dominates_as(pi1, pi2, prior)?;
            let report = VerdictReport::new(&verdict, states, None);
            Ok(Outcome::new(render(format, &report, io::verdict_text), verdict.holds))
        }
        ClassArg::Discounted => {
            let weights = single_weights(discount, pi1.horizon())?;
            let verdict = dominates_weighted(pi1, pi2, prior, &weights)?;
            let report = VerdictReport::new(&verdict, states, Some(&weights));
            Ok(Outcome::new(render(format, &report, io::verdict_text), verdict.holds))
        }
        ClassArg::DiscountedFamily => {
            let mut family = Vec::new();
            for w in weight_sequences(discount, pi1.horizon())? {
                family.push(DiscountSequence::new(w).map_err(|e| CliError::Usage(format!("family members: {e}")))?);
            }
            if let Some(seed) = seed {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                family.extend((0..RANDOM_FAMILY_SIZE).map(|_| random_beta(&mut rng, pi1.horizon())));
            }
            let verdict = dominates_discounted_family(pi1, pi2, prior, &family)?;
            let report = FamilyReport::new(&verdict, states);
            Ok(Outcome::new(render(format, &report, io::family_text), verdict.holds))
        }
    }
}

#[derive(serde::Serialize)]
struct ValueReport {
    value: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    direct: Option<Rational>,
}

pub fn cmd_value(
    pi: &DynamicSignal,
    problem: &DecisionProblem,
    prior: &BeliefVector,
    oracle: bool,
    format: Format,
) -> Result<Outcome, CliError> {
    let value = signal_value(pi, prior, problem)?;
    let direct = if oracle { Some(signal_value_direct(pi, prior, problem, oracle_limit()?)?) } else { None };
    if let Some(d) = &direct {
        if *d != value {
            return Err(CliError::Internal(format!("posterior route gives {value}, direct optimization gives {d}")));
        }
    }
    let report = ValueReport { value, direct };
    let text = render(format, &report, |r| {
        let mut s = format!("W = {}\n", r.value);
        if let Some(d) = &r.direct {
            s.push_str(&format!("W (direct optimization) = {d}\n"));
        }
        s
    });
    Ok(Outcome::new(text, true))
}

pub fn cmd_search(horizon: usize, format: Format) -> Result<Outcome, CliError> {
    let cx = increasing_beta_counterexample(CounterexampleSearch::increasing(horizon))?;
    let report = SearchReport {
        beta: cx.beta.betas().to_vec(),
        h: LotteryFile::from_lottery(&cx.h),
        p: LotteryFile::from_lottery(&cx.p),
        splitting: cx.splitting.clone(),
        revealed_mass_spread: cx.revealed_mass_spread.clone(),
        revealed_mass_concentrated: cx.revealed_mass_concentrated.clone(),
        value_spread: cx.value_spread.clone(),
        value_concentrated: cx.value_concentrated.clone(),
        verdict: VerdictReport::new(&cx.verdict, cx.xi.states(), Some(cx.beta.betas())),
    };
    // Finding the counterexample is the successful outcome of a search.
    Ok(Outcome::new(render(format, &report, io::search_text), true))
}

fn check(ok: bool, failures: &mut Vec<String>, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

/// Re-checks one verdict report; returns the number of certificates checked.
fn verify_verdict(
    report: &VerdictReport,
    context: Option<(&DynamicSignal, &DynamicSignal, &BeliefVector)>,
    failures: &mut Vec<String>,
) -> Result<usize, CliError> {
    let mut count = 0;
    for (i, outcome) in report.outcomes().enumerate() {
        count += 1;
        if let Err(e) = outcome.verify() {
            failures.push(format!("certificate {}: {e}", i + 1));
        }
    }
    let all_hold = report.outcomes().all(MpsOutcome::holds);
    check(report.holds == all_hold, failures, || "`holds` disagrees with the certificates".into());
    check(report.holds == report.counterexample.is_none(), failures, || {
        "a counterexample must be present exactly when dominance fails".into()
    });
    if let Some(cx) = &report.counterexample {
        check(cx.value_first < cx.value_second, failures, || "counterexample values are not strictly reversed".into());
    }
    let Some((pi1, pi2, prior)) = context else {
        return Ok(count);
    };
    let fs = posterior_sequence(pi1, prior)?;
    let gs = posterior_sequence(pi2, prior)?;
    let same = |claimed: &MpsOutcome, f: &PosteriorDistribution, g: &PosteriorDistribution| -> bool {
        let (dom, sub) = match claimed {
            MpsOutcome::Holds { coupling } => (&coupling.columns, &coupling.rows),
            MpsOutcome::Fails { separation } => (&separation.dominating, &separation.dominated),
        };
        let matches = |atoms: &[crate::orders::Atom], d: &PosteriorDistribution| {
            atoms.len() == d.len() && atoms.iter().zip(d.atoms()).all(|(a, (b, w))| a.belief == *b && a.weight == *w)
        };
        matches(dom, f) && matches(sub, g)
    };
    for p in &report.per_period {
        let ok = p.period >= 1 && p.period <= fs.len() && same(&p.outcome, &fs[p.period - 1], &gs[p.period - 1]);
        check(ok, failures, || format!("period {} certificate does not match the signals", p.period));
    }
    if let (Some(c), Some(beta)) = (&report.certificate, &report.beta) {
        let verdict = dominates_weighted(pi1, pi2, prior, beta)?;
        let ok = verdict.mixture.as_ref().is_some_and(|m| {
            let (dom, sub) = match m {
                MpsOutcome::Holds { coupling } => (&coupling.columns, &coupling.rows),
                MpsOutcome::Fails { separation } => (&separation.dominating, &separation.dominated),
            };
            let (cdom, csub) = match c {
                MpsOutcome::Holds { coupling } => (&coupling.columns, &coupling.rows),
                MpsOutcome::Fails { separation } => (&separation.dominating, &separation.dominated),
            };
            dom == cdom && sub == csub
        });
        check(ok, failures, || "mixture certificate does not match the signals".into());
    }
    if let Some(cx) = &report.counterexample {
        let problem = cx.problem.clone().into_problem(FsPath::new("report"), pi1.states())?;
        let w1 = signal_value(pi1, prior, &problem)?;
        let w2 = signal_value(pi2, prior, &problem)?;
        check(w1 == cx.value_first && w2 == cx.value_second, failures, || {
            format!("counterexample values recompute to {w1} and {w2}")
        });
    }
    Ok(count)
}

pub fn cmd_verify(
    path: &FsPath,
    value: Value,
    context: Option<(&DynamicSignal, &DynamicSignal, &BeliefVector)>,
) -> Result<Outcome, CliError> {
    fn parse<T: serde::de::DeserializeOwned>(path: &FsPath, v: Value) -> Result<T, CliError> {
        serde_json::from_value(v)
            .map_err(|e| CliError::Input(InputError::Syntax { file: path.to_path_buf(), message: e.to_string() }))
    }
    let mut failures = Vec::new();
    let count = if value.get("members").is_some() {
        let family: FamilyReport = parse(path, value)?;
        let mut n = 0;
        for m in &family.members {
            n += verify_verdict(m, context, &mut failures)?;
        }
        check(family.holds == family.members.iter().all(|m| m.holds), &mut failures, || {
            "family `holds` disagrees with its members".into()
        });
        n
    } else if value.get("revealed_mass_spread").is_some() {
        let search: SearchReport = parse(path, value)?;
        check(search.value_spread < search.value_concentrated, &mut failures, || "values are not reversed".into());
        verify_verdict(&search.verdict, None, &mut failures)?
    } else if value.get("stochastic_order").is_some() {
        let arrival: ArrivalReport = parse(path, value)?;
        check(arrival.holds == arrival.verdict.holds, &mut failures, || "`holds` disagrees with the verdict".into());
        verify_verdict(&arrival.verdict, context, &mut failures)?
    } else if value.get("class").is_some() {
        let report: VerdictReport = parse(path, value)?;
        verify_verdict(&report, context, &mut failures)?
    } else {
        let outcome: MpsOutcome = parse(path, value)?;
        if let Err(e) = outcome.verify() {
            failures.push(e.to_string());
        }
        1
    };
    let mut text = String::new();
    for f in &failures {
        text.push_str(&format!("invalid: {f}\n"));
    }
    if failures.is_empty() {
        text.push_str(&format!("verified {count} certificate(s)\n"));
    }
    Ok(Outcome::new(text, failures.is_empty()))
}

/// Built-in fixtures plus a seeded sweep over random signal pairs.
pub fn selftest(seed: u64, cases: usize) -> Outcome {
    use crate::decision::{sample_problems, ProblemSampler};
    use crate::dominance::lambda_weights;
    use crate::sampling::{random_garbling, random_prior, random_signal, SignalShape};
    use crate::signals::{ArrivalLottery, StaticExperiment};

    let mut lines = Vec::new();
    let mut all = true;
    let mut record = |name: &str, ok: bool| {
        all &= ok;
        lines.push(format!("{} {name}", if ok { "PASS" } else { "FAIL" }));
    };
    let q = Rational::new;
    let states = vec!["L".to_string(), "R".to_string()];
    let mu = BeliefVector::uniform(2);

    let weights = |d: &Rational, t: usize| -> Option<Vec<Rational>> {
        let l = lambda_geometric(d, t).ok()?;
        Some((1..=t).map(|s| l.weight(&s)).collect())
    };
    record("lambda δ=1, T=4", weights(&q(1, 1), 4) == Some(vec![q(1, 4); 4]));
    record("lambda δ=1/2, T=3", weights(&q(1, 2), 3) == Some(vec![q(4, 7), q(2, 7), q(1, 7)]));
    let beta = DiscountSequence::new(vec![q(1, 1), q(2, 1), q(4, 1)]).expect("positive");
    let l = lambda_weights(&beta);
    record("lambda β=(1,2,4)", (1..=3).map(|t| l.weight(&t)).collect::<Vec<_>>() == vec![q(1, 7), q(2, 7), q(4, 7)]);

    let matching = DecisionProblem::matching(2, 2);
    let xi = StaticExperiment::fully_revealing(states.clone());
    let fixtures = [
        ("W revealing at 1", DynamicSignal::fully_revealing(states.clone(), 2), q(2, 1)),
        ("W arrival at 2", arrival_signal(&xi, &ArrivalLottery::point_mass(2, 2).expect("in range")), q(3, 2)),
        ("W noise", DynamicSignal::uninformative(states.clone(), 2), q(1, 1)),
    ];
    for (name, pi, expected) in fixtures {
        record(name, signal_value(&pi, &mu, &matching).ok() == Some(expected));
    }
    let cx = increasing_beta_counterexample(CounterexampleSearch::increasing(3));
    record(
        "increasing-β counterexample, T=3",
        cx.is_ok_and(|c| c.revealed_mass_spread == q(11, 14) && c.revealed_mass_concentrated == q(12, 14)),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sweep_ok = true;
    for case in 0..cases {
        let pi1 = random_signal(&mut rng, SignalShape::new(2, 2));
        let pi2 = if case % 2 == 0 {
            random_garbling(&mut rng, &pi1, 3)
        } else {
            random_signal(&mut rng, SignalShape::new(2, 2))
        };
        let prior = random_prior(&mut rng, 2);
        let ok = (|| -> Result<bool, CliError> {
            let v: DominanceVerdict = dominates_as(&pi1, &pi2, &prior)?;
            if !v.per_period.iter().all(|p| p.outcome.verify().is_ok()) {
                return Ok(false);
            }
            if let Some(cx) = &v.counterexample {
                return Ok(cx.value_first < cx.value_second);
            }
            for problem in sample_problems(ProblemSampler::new(2, 2, 3), seed ^ case as u64).take(10) {
                if signal_value(&pi1, &prior, &problem)? < signal_value(&pi2, &prior, &problem)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        sweep_ok &= ok.unwrap_or(false);
    }
    record(&format!("randomized sweep ({cases} pairs, seed {seed})"), sweep_ok);

    let mut report = lines.join("\n");
    report.push('\n');
    Outcome::new(report, all)
}

/// Writes the report and returns the exit code.
pub fn emit(outcome: &Outcome, out: Option<&FsPath>) -> Result<i32, CliError> {
    match out {
        Some(path) => std::fs::write(path, &outcome.report)
            .map_err(|e| CliError::Write { path: path.to_path_buf(), message: e.to_string() })?,
        None => print!("{}", outcome.report),
    }
    Ok(outcome.code)
}
