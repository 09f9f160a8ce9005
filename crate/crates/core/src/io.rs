//! JSON file formats and verdict reports.
//!
//! Input files refer to states, signal symbols, realizations and actions by
//! name. Probabilities and utilities are exact: either a string such as
//! `"1/3"` or `"0.25"`, or a JSON number (read through its shortest decimal
//! form, so `0.1` is `1/10`). Output always prints fractions as `num/den`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decision::DecisionProblem;
use crate::dominance::{Counterexample, DominanceVerdict, FamilyVerdict, PeriodOutcome, ProblemClass};
use crate::orders::{BinarySplitting, MpsOutcome};
use crate::prob::{BeliefVector, FinitePmf, PosteriorDistribution};
use crate::rational::Rational;
use crate::signals::{ArrivalLottery, DynamicSignal, Path, StaticExperiment};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{file}: cannot read: {message}")]
    Read { file: PathBuf, message: String },
    #[error("{file}: invalid JSON: {message}")]
    Syntax { file: PathBuf, message: String },
    #[error("{file}: field `{field}`: {message}")]
    Field { file: PathBuf, field: String, message: String },
}

fn field_error(file: &FsPath, field: impl Into<String>, message: impl ToString) -> InputError {
    InputError::Field { file: file.to_path_buf(), field: field.into(), message: message.to_string() }
}

/// Reads and deserializes a JSON file.
pub fn read_json<T: for<'de> Deserialize<'de>>(file: &FsPath) -> Result<T, InputError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| InputError::Read { file: file.to_path_buf(), message: e.to_string() })?;
    parse_json(file, &text)
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(file: &FsPath, text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Syntax { file: file.to_path_buf(), message: e.to_string() })
}

fn index_of(names: &[String], name: &str, file: &FsPath, field: &str) -> Result<usize, InputError> {
    names.iter().position(|n| n == name).ok_or_else(|| field_error(file, field, format!("unknown name `{name}`")))
}

fn check_names(names: &[String], file: &FsPath, field: &str) -> Result<(), InputError> {
    if names.is_empty() {
        return Err(field_error(file, field, "must not be empty"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(field_error(file, field, format!("duplicate name `{n}`")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathWeight {
    pub path: Vec<String>,
    pub p: Rational,
}

/// `{"states": [...], "alphabets": [[...], ...], "kernel": {state: [{"path": [...], "p": ...}]}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalFile {
    pub states: Vec<String>,
    /// Optional; when present it must equal the number of alphabets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    pub alphabets: Vec<Vec<String>>,
    pub kernel: BTreeMap<String, Vec<PathWeight>>,
}

impl SignalFile {
    pub fn from_signal(signal: &DynamicSignal) -> Self {
        let kernel = signal
            .states()
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let rows = signal
                    .kernel(i)
                    .iter()
                    .map(|(path, p)| PathWeight {
                        path: path.iter().enumerate().map(|(t, &s)| signal.alphabets()[t][s].clone()).collect(),
                        p: p.clone(),
                    })
                    .collect();
                (name.clone(), rows)
            })
            .collect();
        SignalFile {
            states: signal.states().to_vec(),
            horizon: Some(signal.horizon()),
            alphabets: signal.alphabets().to_vec(),
            kernel,
        }
    }

    pub fn into_signal(self, file: &FsPath) -> Result<DynamicSignal, InputError> {
        check_names(&self.states, file, "states")?;
        if self.alphabets.is_empty() {
            return Err(field_error(file, "alphabets", "need at least one period"));
        }
        if let Some(h) = self.horizon {
            if h != self.alphabets.len() {
                return Err(field_error(file, "horizon", format!("{h} but {} alphabets given", self.alphabets.len())));
            }
        }
        for (t, alphabet) in self.alphabets.iter().enumerate() {
            check_names(alphabet, file, &format!("alphabets[{t}]"))?;
        }
        for name in self.kernel.keys() {
            index_of(&self.states, name, file, "kernel")?;
        }
        let mut kernel = Vec::new();
        for state in &self.states {
            let field = format!("kernel.{state}");
            let rows = self.kernel.get(state).ok_or_else(|| field_error(file, &field, "missing"))?;
            let mut atoms: Vec<(Path, Rational)> = Vec::new();
            for (r, row) in rows.iter().enumerate() {
                let field = format!("{field}[{r}].path");
                if row.path.len() != self.alphabets.len() {
                    return Err(field_error(
                        file,
                        field,
                        format!("has {} symbols, expected {}", row.path.len(), self.alphabets.len()),
                    ));
                }
                let path = row
                    .path
                    .iter()
                    .zip(&self.alphabets)
                    .map(|(sym, alphabet)| index_of(alphabet, sym, file, &field))
                    .collect::<Result<Path, _>>()?;
                atoms.push((path, row.p.clone()));
            }
            kernel.push(FinitePmf::new(atoms).map_err(|e| field_error(file, &field, e))?);
        }
        DynamicSignal::new(self.states, self.alphabets, kernel).map_err(|e| field_error(file, "kernel", e))
    }
}

pub fn read_signal(file: &FsPath) -> Result<DynamicSignal, InputError> {
    read_json::<SignalFile>(file)?.into_signal(file)
}

/// `{"states": [...], "realizations": [...], "kernel": {state: {realization: p}}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub states: Vec<String>,
    pub realizations: Vec<String>,
    pub kernel: BTreeMap<String, BTreeMap<String, Rational>>,
}

impl ExperimentFile {
    pub fn into_experiment(self, file: &FsPath) -> Result<StaticExperiment, InputError> {
        check_names(&self.states, file, "states")?;
        check_names(&self.realizations, file, "realizations")?;
        for name in self.kernel.keys() {
            index_of(&self.states, name, file, "kernel")?;
        }
        let mut kernel = Vec::new();
        for state in &self.states {
            let field = format!("kernel.{state}");
            let row = self.kernel.get(state).ok_or_else(|| field_error(file, &field, "missing"))?;
            let atoms = row
                .iter()
                .map(|(z, p)| Ok((index_of(&self.realizations, z, file, &field)?, p.clone())))
                .collect::<Result<Vec<_>, InputError>>()?;
            kernel.push(FinitePmf::new(atoms).map_err(|e| field_error(file, &field, e))?);
        }
        StaticExperiment::new(self.states, self.realizations, kernel).map_err(|e| field_error(file, "kernel", e))
    }
}

pub fn read_experiment(file: &FsPath) -> Result<StaticExperiment, InputError> {
    read_json::<ExperimentFile>(file)?.into_experiment(file)
}

/// `{"horizon": T, "pmf": {"t": p}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LotteryFile {
    pub horizon: usize,
    pub pmf: BTreeMap<String, Rational>,
}

impl LotteryFile {
    pub fn into_lottery(self, file: &FsPath) -> Result<ArrivalLottery, InputError> {
        let atoms = self
            .pmf
            .iter()
            .map(|(t, p)| {
                let time: usize =
                    t.parse().map_err(|_| field_error(file, format!("pmf.{t}"), "not a period number"))?;
                Ok((time, p.clone()))
            })
            .collect::<Result<Vec<_>, InputError>>()?;
        let pmf = FinitePmf::new(atoms).map_err(|e| field_error(file, "pmf", e))?;
        ArrivalLottery::new(self.horizon, pmf).map_err(|e| field_error(file, "pmf", e))
    }
}

pub fn read_lottery(file: &FsPath) -> Result<ArrivalLottery, InputError> {
    read_json::<LotteryFile>(file)?.into_lottery(file)
}

/// A prior file is a map from state name to probability.
pub fn read_prior(file: &FsPath, states: &[String]) -> Result<BeliefVector, InputError> {
    let map: BTreeMap<String, Rational> = read_json(file)?;
    prior_from_map(file, &map, states)
}

pub fn prior_from_map(
    file: &FsPath,
    map: &BTreeMap<String, Rational>,
    states: &[String],
) -> Result<BeliefVector, InputError> {
    for name in map.keys() {
        index_of(states, name, file, "prior")?;
    }
    let probs = states
        .iter()
        .map(|s| map.get(s).cloned().ok_or_else(|| field_error(file, format!("prior.{s}"), "missing")))
        .collect::<Result<Vec<_>, _>>()?;
    BeliefVector::new(probs).map_err(|e| field_error(file, "prior", e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    pub action: String,
    pub utility: BTreeMap<String, Rational>,
}

/// `{"periods": [[{"action": name, "utility": {state: u}}, ...], ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub periods: Vec<Vec<ActionEntry>>,
}

impl ProblemFile {
    pub fn from_problem(problem: &DecisionProblem, states: &[String]) -> Self {
        let periods = (1..=problem.horizon())
            .map(|t| {
                problem
                    .actions(t)
                    .iter()
                    .zip(problem.utilities(t))
                    .map(|(name, row)| ActionEntry {
                        action: name.clone(),
                        utility: states.iter().cloned().zip(row.iter().cloned()).collect(),
                    })
                    .collect()
            })
            .collect();
        ProblemFile { periods }
    }

    pub fn into_problem(self, file: &FsPath, states: &[String]) -> Result<DecisionProblem, InputError> {
        let mut actions = Vec::new();
        let mut utilities = Vec::new();
        for (t, entries) in self.periods.iter().enumerate() {
            let names: Vec<String> = entries.iter().map(|e| e.action.clone()).collect();
            check_names(&names, file, &format!("periods[{t}]"))?;
            let mut table = Vec::new();
            for (a, entry) in entries.iter().enumerate() {
                let field = format!("periods[{t}][{a}].utility");
                for name in entry.utility.keys() {
                    index_of(states, name, file, &field)?;
                }
                let row = states
                    .iter()
                    .map(|s| {
                        entry
                            .utility
                            .get(s)
                            .cloned()
                            .ok_or_else(|| field_error(file, format!("{field}.{s}"), "missing"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                table.push(row);
            }
            actions.push(names);
            utilities.push(table);
        }
        DecisionProblem::new(states.len(), actions, utilities).map_err(|e| field_error(file, "periods", e))
    }
}

pub fn read_problem(file: &FsPath, states: &[String]) -> Result<DecisionProblem, InputError> {
    read_json::<ProblemFile>(file)?.into_problem(file, states)
}

/// Counterexample section of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    pub problem: ProblemFile,
    pub value_first: Rational,
    pub value_second: Rational,
}

impl CounterexampleReport {
    pub fn new(cx: &Counterexample, states: &[String]) -> Self {
        CounterexampleReport {
            period: cx.period,
            problem: ProblemFile::from_problem(&cx.problem, states),
            value_first: cx.value_first.clone(),
            value_second: cx.value_second.clone(),
        }
    }
}

/// Serialized form of a [`DominanceVerdict`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub class: ProblemClass,
    pub holds: bool,
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_period: Vec<PeriodOutcome>,
    /// Mixture comparison for the discounted class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<MpsOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleReport>,
}

impl VerdictReport {
    pub fn new(verdict: &DominanceVerdict, states: &[String], beta: Option<&[Rational]>) -> Self {
        let lambda = verdict.lambda.as_ref().map(|l| {
            let horizon = beta.map(<[Rational]>::len).unwrap_or_else(|| l.labels().max().copied().unwrap_or(0));
            (1..=horizon).map(|t| l.weight(&t)).collect()
        });
        VerdictReport {
            class: verdict.class,
            holds: verdict.holds,
            states: states.to_vec(),
            beta: beta.map(<[Rational]>::to_vec),
            lambda,
            per_period: verdict.per_period.clone(),
            certificate: verdict.mixture.clone(),
            counterexample: verdict.counterexample.as_ref().map(|c| CounterexampleReport::new(c, states)),
        }
    }

    /// All convex-order certificates in the report.
    pub fn outcomes(&self) -> impl Iterator<Item = &MpsOutcome> {
        self.per_period.iter().map(|p| &p.outcome).chain(self.certificate.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub class: String,
    pub holds: bool,
    pub caveat: String,
    pub members: Vec<VerdictReport>,
}

impl FamilyReport {
    pub fn new(family: &FamilyVerdict, states: &[String]) -> Self {
        FamilyReport {
            class: "discounted_family".into(),
            holds: family.holds,
            caveat: FamilyVerdict::CAVEAT.into(),
            members: family.verdicts.iter().map(|(b, v)| VerdictReport::new(v, states, Some(b.betas()))).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomReport {
    pub belief: BTreeMap<String, Rational>,
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodPosteriors {
    pub period: usize,
    pub atoms: Vec<AtomReport>,
}

pub fn posteriors_report(dists: &[PosteriorDistribution], states: &[String]) -> Vec<PeriodPosteriors> {
    dists
        .iter()
        .enumerate()
        .map(|(t, d)| PeriodPosteriors {
            period: t + 1,
            atoms: d
                .atoms()
                .iter()
                .map(|(b, w)| AtomReport {
                    belief: states.iter().cloned().zip(b.probabilities().iter().cloned()).collect(),
                    weight: w.clone(),
                })
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrivalReport {
    pub kind: String,
    pub holds: bool,
    /// FOSD or SOSD between the lotteries, depending on `kind`.
    pub stochastic_order: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splittings: Option<Vec<BinarySplitting>>,
    pub verdict: VerdictReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub beta: Vec<Rational>,
    pub h: LotteryFile,
    pub p: LotteryFile,
    pub splitting: BinarySplitting,
    pub revealed_mass_spread: Rational,
    pub revealed_mass_concentrated: Rational,
    pub value_spread: Rational,
    pub value_concentrated: Rational,
    pub verdict: VerdictReport,
}

impl LotteryFile {
    pub fn from_lottery(l: &ArrivalLottery) -> Self {
        LotteryFile { horizon: l.horizon(), pmf: l.pmf().iter().map(|(t, p)| (t.to_string(), p.clone())).collect() }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn belief_text(b: &BeliefVector) -> String {
    let parts: Vec<String> = b.probabilities().iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn outcome_text(out: &mut String, indent: &str, outcome: &MpsOutcome) {
    match outcome {
        MpsOutcome::Holds { coupling } => {
            let _ = writeln!(out, "{indent}convex order holds; coupling rows → columns:");
            for (row, probs) in coupling.rows.iter().zip(&coupling.kernel) {
                let cells: Vec<String> = probs.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{indent}  {} [{}]: {}", belief_text(&row.belief), row.weight, cells.join(" "));
            }
        }
        MpsOutcome::Fails { separation } => {
            let _ = writeln!(
                out,
                "{indent}convex order fails; E_F w = {} < E_G w = {}",
                separation.expectation_dominating(),
                separation.expectation_dominated()
            );
            for piece in &separation.witness.pieces {
                let cells: Vec<String> = piece.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{indent}  piece ({})", cells.join(", "));
            }
        }
    }
}

fn problem_text(out: &mut String, problem: &ProblemFile) {
    for (t, entries) in problem.periods.iter().enumerate() {
        for e in entries {
            let cells: Vec<String> = e.utility.iter().map(|(s, u)| format!("{s}={u}")).collect();
            let _ = writeln!(out, "    t={} {}: {}", t + 1, e.action, cells.join(" "));
        }
    }
}

pub fn verdict_text(report: &VerdictReport) -> String {
    let mut out = String::new();
    let class = match report.class {
        ProblemClass::As => "additively separable",
        ProblemClass::Discounted => "discounted",
    };
    let _ = writeln!(out, "class: {class}");
    let _ = writeln!(out, "dominance: {}", if report.holds { "holds" } else { "fails" });
    if let Some(beta) = &report.beta {
        let cells: Vec<String> = beta.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "beta: {}", cells.join(", "));
    }
    if let Some(lambda) = &report.lambda {
        let cells: Vec<String> = lambda.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "lambda: {}", cells.join(", "));
    }
    for p in &report.per_period {
        let _ = writeln!(out, "period {}:", p.period);
        outcome_text(&mut out, "  ", &p.outcome);
    }
    if let Some(c) = &report.certificate {
        let _ = writeln!(out, "mixture:");
        outcome_text(&mut out, "  ", c);
    }
    if let Some(cx) = &report.counterexample {
        match cx.period {
            Some(t) => {
                let _ = writeln!(out, "counterexample problem (separating period {t}):");
            }
            None => {
                let _ = writeln!(out, "counterexample problem:");
            }
        }
        problem_text(&mut out, &cx.problem);
        let _ = writeln!(out, "  W(first) = {} < W(second) = {}", cx.value_first, cx.value_second);
    }
    out
}

pub fn family_text(report: &FamilyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "class: discounted family ({} sequences)", report.members.len());
    let _ = writeln!(out, "dominance: {}", if report.holds { "holds on every member" } else { "fails" });
    let _ = writeln!(out, "note: {}", report.caveat);
    for m in &report.members {
        out.push_str("---\n");
        out.push_str(&verdict_text(m));
    }
    out
}

pub fn posteriors_text(periods: &[PeriodPosteriors]) -> String {
    let mut out = String::new();
    for p in periods {
        let _ = writeln!(out, "F_{}:", p.period);
        for a in &p.atoms {
            let cells: Vec<String> = a.belief.iter().map(|(s, v)| format!("{s}={v}")).collect();
            let _ = writeln!(out, "  {}: {}", cells.join(" "), a.weight);
        }
    }
    out
}

pub fn arrival_text(report: &ArrivalReport) -> String {
    let mut out = String::new();
    let (name, order) = match report.kind.as_str() {
        "earlier_is_better" => ("earlier is better", "P FOSD H"),
        _ => ("risk-loving", "P SOSD H"),
    };
    let _ = writeln!(out, "{name}: {}", if report.holds { "holds" } else { "fails" });
    let _ = writeln!(out, "{order}: {}", report.stochastic_order);
    if let Some(splits) = &report.splittings {
        for s in splits {
            let _ = writeln!(out, "splitting: t={} → t={} ({}), t={} ({})", s.y2, s.z1, s.eta1, s.z3, s.eta3);
        }
    }
    out.push_str(&verdict_text(&report.verdict));
    out
}

pub fn search_text(report: &SearchReport) -> String {
    let mut out = String::new();
    let cells: Vec<String> = report.beta.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "counterexample found: beta = {}", cells.join(", "));
    let lot = |l: &LotteryFile| l.pmf.iter().map(|(t, p)| format!("{t}:{p}")).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "h (spread): {}", lot(&report.h));
    let _ = writeln!(out, "p (concentrated): {}", lot(&report.p));
    let _ = writeln!(
        out,
        "lambda-weighted revealed mass: {} < {}",
        report.revealed_mass_spread, report.revealed_mass_concentrated
    );
    let _ = writeln!(out, "matching value: {} < {}", report.value_spread, report.value_concentrated);
    out
}
