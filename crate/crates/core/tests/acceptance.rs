//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. All comparisons are exact.

use std::process::Command;
use std::time::Instant;

use infodom::decision::{
    sample_problems, signal_value, signal_value_direct, value_from_posteriors, DecisionProblem, ProblemSampler,
    DEFAULT_ORACLE_LIMIT,
};
use infodom::dominance::{
    dominates_as, dominates_discounted, increasing_beta_counterexample, lambda_geometric, lambda_weights,
    CounterexampleSearch, DiscountSequence,
};
use infodom::io::{to_json, SignalFile};
use infodom::orders::{
    apply_splitting, decompose_splittings, fosd_check, mps_check, sosd_check, weighted_mixture, Atom,
    MartingaleCoupling, MpsOutcome, Separation,
};
use infodom::sampling::{
    random_beta, random_decreasing_beta, random_experiment, random_garbling, random_lottery, random_prior,
    random_signal, random_spread_pair, SignalShape,
};
use infodom::signals::{arrival_posteriors, arrival_signal, induced_posteriors, posterior_sequence};
use infodom::{
    ArrivalLottery, BeliefVector, DynamicSignal, FinitePmf, PosteriorDistribution, Rational, StaticExperiment,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Checks a coupling from scratch: nonnegative entries, unit row sums,
/// column masses `Σ_i g_i k_ij = f_j`, and conditional means `Σ_j k_ij x_j = y_i`.
fn coupling_is_valid(c: &MartingaleCoupling) -> bool {
    if c.kernel.len() != c.rows.len() {
        return false;
    }
    let n = c.rows[0].belief.dim();
    for (row, probs) in c.rows.iter().zip(&c.kernel) {
        if probs.len() != c.columns.len() || probs.iter().any(Rational::is_negative) {
            return false;
        }
        if probs.iter().sum::<Rational>() != Rational::one() {
            return false;
        }
        for s in 0..n {
            let mean: Rational = probs.iter().zip(&c.columns).map(|(k, col)| k * col.belief.get(s)).sum();
            if &mean != row.belief.get(s) {
                return false;
            }
        }
    }
    c.columns.iter().enumerate().all(|(j, col)| {
        let mass: Rational = c.rows.iter().zip(&c.kernel).map(|(row, probs)| &row.weight * &probs[j]).sum();
        mass == col.weight
    })
}

fn max_piece(pieces: &[Vec<Rational>], x: &BeliefVector) -> Rational {
    pieces.iter().map(|p| x.dot(p)).max().expect("nonempty witness")
}

fn expectation(atoms: &[Atom], pieces: &[Vec<Rational>]) -> Rational {
    atoms.iter().map(|a| &a.weight * max_piece(pieces, &a.belief)).sum()
}

fn separation_is_valid(s: &Separation) -> bool {
    expectation(&s.dominating, &s.witness.pieces) < expectation(&s.dominated, &s.witness.pieces)
}

fn atoms_match(atoms: &[Atom], d: &PosteriorDistribution) -> bool {
    atoms.len() == d.len() && atoms.iter().zip(d.atoms()).all(|(a, (b, w))| a.belief == *b && a.weight == *w)
}

/// Independent check of a certificate, including that it speaks about `f` and `g`.
fn certificate_is_valid(out: &MpsOutcome, f: &PosteriorDistribution, g: &PosteriorDistribution) -> bool {
    match out {
        MpsOutcome::Holds { coupling } => {
            coupling_is_valid(coupling) && atoms_match(&coupling.columns, f) && atoms_match(&coupling.rows, g)
        }
        MpsOutcome::Fails { separation } => {
            separation_is_valid(separation)
                && atoms_match(&separation.dominating, f)
                && atoms_match(&separation.dominated, g)
        }
    }
}

#[derive(Default)]
struct Certificates {
    checked: usize,
    invalid: usize,
}

impl Certificates {
    fn record(&mut self, out: &MpsOutcome, f: &PosteriorDistribution, g: &PosteriorDistribution) -> bool {
        self.checked += 1;
        let ok = certificate_is_valid(out, f, g) && out.verify().is_ok();
        if !ok {
            self.invalid += 1;
        }
        ok
    }
}

/// Random pair: a garbling (dominated by construction), the reverse, or two independent signals.
fn random_pair(rng: &mut ChaCha8Rng, case: usize) -> (DynamicSignal, DynamicSignal, BeliefVector) {
    let n = rng.gen_range(2..=3);
    let horizon = rng.gen_range(2..=3);
    let shape = SignalShape::new(n, horizon);
    let pi = random_signal(rng, shape);
    let (a, b) = match case % 3 {
        0 => {
            let g = random_garbling(rng, &pi, 3);
            (pi, g)
        }
        1 => {
            let g = random_garbling(rng, &pi, 3);
            (g, pi)
        }
        _ => {
            let other = random_signal(rng, shape);
            (pi, other)
        }
    };
    let prior = random_prior(rng, n);
    (a, b, prior)
}

const PAIRS: usize = 200;
const PAIR_SEED: u64 = 0x5eed_0001;

fn criterion_1(certs: &mut Certificates) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
    let (mut holds, mut fails, mut problems) = (0, 0, 0);
    for case in 0..PAIRS {
        let (pi1, pi2, prior) = random_pair(&mut rng, case);
        let verdict = dominates_as(&pi1, &pi2, &prior).map_err(|e| format!("pair {case}: {e}"))?;
        let fs = posterior_sequence(&pi1, &prior).unwrap();
        let gs = posterior_sequence(&pi2, &prior).unwrap();
        for p in &verdict.per_period {
            let t = p.period - 1;
            ensure(certs.record(&p.outcome, &fs[t], &gs[t]), || {
                format!("pair {case}: bad certificate at t={}", t + 1)
            })?;
        }
        if verdict.holds {
            holds += 1;
            let sampler = ProblemSampler::new(pi1.horizon(), pi1.num_states(), 4);
            for (k, problem) in sample_problems(sampler, PAIR_SEED ^ case as u64).take(100).enumerate() {
                let w1 = value_from_posteriors(&fs, &problem).unwrap();
                let w2 = value_from_posteriors(&gs, &problem).unwrap();
                ensure(w1 >= w2, || format!("pair {case}, problem {k}: W(π₁) = {w1} < W(π₂) = {w2}"))?;
                problems += 1;
            }
        } else {
            fails += 1;
            let cx = verdict.counterexample.as_ref().ok_or(format!("pair {case}: no counterexample"))?;
            let w1 = signal_value_direct(&pi1, &prior, &cx.problem, DEFAULT_ORACLE_LIMIT).map_err(|e| e.to_string())?;
            let w2 = signal_value_direct(&pi2, &prior, &cx.problem, DEFAULT_ORACLE_LIMIT).map_err(|e| e.to_string())?;
            ensure(w1 < w2, || format!("pair {case}: counterexample gives {w1} ≥ {w2}"))?;
        }
    }
    ensure(holds > 0 && fails > 0, || format!("degenerate sample: {holds} hold, {fails} fail"))?;
    Ok(format!("{PAIRS} pairs: {holds} hold ({problems} sampled problems), {fails} fail with strict counterexamples"))
}

fn criterion_2(certs: &mut Certificates) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
    let mut beta_rng = ChaCha8Rng::seed_from_u64(PAIR_SEED + 1);
    let (mut holds, mut fails, mut problems) = (0, 0, 0);
    for case in 0..PAIRS {
        let (pi1, pi2, prior) = random_pair(&mut rng, case);
        let fs = posterior_sequence(&pi1, &prior).unwrap();
        let gs = posterior_sequence(&pi2, &prior).unwrap();
        for b in 0..20 {
            let beta = random_beta(&mut beta_rng, pi1.horizon());
            let verdict = dominates_discounted(&pi1, &pi2, &prior, &beta).map_err(|e| format!("pair {case}: {e}"))?;
            let lambda = lambda_weights(&beta);
            let f_mix = weighted_mixture(&fs, &lambda).unwrap();
            let g_mix = weighted_mixture(&gs, &lambda).unwrap();
            let mixture = verdict.mixture.as_ref().ok_or("no mixture certificate")?;
            ensure(certs.record(mixture, &f_mix, &g_mix), || format!("pair {case}, β {b}: bad certificate"))?;
            if verdict.holds {
                holds += 1;
                let sampler = ProblemSampler::new(1, pi1.num_states(), 4);
                let seed = PAIR_SEED ^ ((case * 20 + b) as u64) << 8;
                for (k, one_shot) in sample_problems(sampler, seed).take(100).enumerate() {
                    let problem =
                        DecisionProblem::discounted(pi1.num_states(), one_shot.utilities(1), beta.betas()).unwrap();
                    let w1 = value_from_posteriors(&fs, &problem).unwrap();
                    let w2 = value_from_posteriors(&gs, &problem).unwrap();
                    ensure(w1 >= w2, || format!("pair {case}, β {b}, problem {k}: {w1} < {w2}"))?;
                    problems += 1;
                }
            } else {
                fails += 1;
                let cx = verdict.counterexample.as_ref().ok_or("no counterexample")?;
                // u_t = β_t·v for one table v, i.e. β₁·u_t = β_t·u₁ entrywise.
                let first = cx.problem.utilities(1);
                let b1 = &beta.betas()[0];
                let discounted = (1..=cx.problem.horizon()).all(|t| {
                    let bt = &beta.betas()[t - 1];
                    let table = cx.problem.utilities(t);
                    table.len() == first.len()
                        && table
                            .iter()
                            .zip(first)
                            .all(|(row, row1)| row.iter().zip(row1).all(|(u, u1)| b1 * u == bt * u1))
                });
                ensure(discounted, || format!("pair {case}, β {b}: counterexample is not β-discounted"))?;
                let w1 = signal_value(&pi1, &prior, &cx.problem).unwrap();
                let w2 = signal_value(&pi2, &prior, &cx.problem).unwrap();
                ensure(w1 < w2, || format!("pair {case}, β {b}: counterexample gives {w1} ≥ {w2}"))?;
            }
        }
    }
    ensure(holds > 0 && fails > 0, || format!("degenerate sample: {holds} hold, {fails} fail"))?;
    Ok(format!("{} (pair, β) cases: {holds} hold ({problems} sampled problems), {fails} fail strictly", PAIRS * 20))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..500 {
        let n = rng.gen_range(2..=3);
        let horizon = rng.gen_range(1..=3);
        let pi = random_signal(&mut rng, SignalShape::new(n, horizon));
        let prior = random_prior(&mut rng, n);
        let problem = ProblemSampler::new(horizon, n, 4).sample(&mut rng);
        let w = signal_value(&pi, &prior, &problem).unwrap();
        let direct = signal_value_direct(&pi, &prior, &problem, DEFAULT_ORACLE_LIMIT).map_err(|e| e.to_string())?;
        ensure(w == direct, || format!("instance {case}: {w} vs direct {direct}"))?;
    }
    Ok("500 instances agree exactly".into())
}

fn criterion_4(certs: &mut Certificates) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut comparisons = 0;
    for case in 0..200 {
        let n = rng.gen_range(2..=3);
        let horizon = rng.gen_range(2..=4);
        let pi = random_signal(&mut rng, SignalShape::new(n, horizon));
        let prior = random_prior(&mut rng, n);
        let fs = posterior_sequence(&pi, &prior).unwrap();
        for (t, f) in fs.iter().enumerate() {
            ensure(f.barycenter() == prior, || format!("signal {case}: barycenter of F_{} is not μ", t + 1))?;
        }
        for t in 0..fs.len() - 1 {
            let out = mps_check(&fs[t + 1], &fs[t]).unwrap();
            ensure(out.holds(), || format!("signal {case}: F_{} is not a spread of F_{}", t + 2, t + 1))?;
            ensure(certs.record(&out, &fs[t + 1], &fs[t]), || format!("signal {case}: bad coupling"))?;
            comparisons += 1;
        }
    }
    Ok(format!("200 signals, {comparisons} consecutive comparisons hold, barycenters equal μ"))
}

/// A lottery first-order dominated by `p` in the earlier-is-better sense:
/// mass moved from later to earlier times.
fn earlier_lottery(rng: &mut ChaCha8Rng, p: &ArrivalLottery) -> ArrivalLottery {
    let atoms: Vec<(usize, Rational)> = p
        .pmf()
        .iter()
        .map(|(&t, w)| (if t > 1 && rng.gen_bool(0.5) { rng.gen_range(1..t) } else { t }, w.clone()))
        .collect();
    ArrivalLottery::new(p.horizon(), FinitePmf::new(atoms).unwrap()).unwrap()
}

fn criterion_5(certs: &mut Certificates) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut fosd_true, mut fosd_false) = (0, 0);
    let mut case = 0;
    while case < 500 {
        let n = rng.gen_range(2..=3);
        let horizon = rng.gen_range(2..=6);
        let xi = random_experiment(&mut rng, n);
        let prior = random_prior(&mut rng, n);
        if !xi.is_informative(&prior).unwrap() {
            continue;
        }
        let p = random_lottery(&mut rng, horizon);
        let h = if case % 2 == 0 { earlier_lottery(&mut rng, &p) } else { random_lottery(&mut rng, horizon) };
        let fosd = fosd_check(&h, &p).unwrap();
        let mut all_hold = true;
        let (sig_h, sig_p) = (arrival_signal(&xi, &h), arrival_signal(&xi, &p));
        for t in 1..=horizon {
            let f = arrival_posteriors(&xi, &h, &prior, t).unwrap();
            let g = arrival_posteriors(&xi, &p, &prior, t).unwrap();
            ensure(f == induced_posteriors(&sig_h, &prior, t).unwrap(), || {
                format!("case {case}: closed form differs at t={t}")
            })?;
            ensure(g == induced_posteriors(&sig_p, &prior, t).unwrap(), || {
                format!("case {case}: closed form differs at t={t}")
            })?;
            let out = mps_check(&f, &g).unwrap();
            ensure(certs.record(&out, &f, &g), || format!("case {case}: bad certificate"))?;
            all_hold &= out.holds();
        }
        ensure(fosd == all_hold, || format!("case {case}: FOSD {fosd} but convex order {all_hold}"))?;
        if fosd {
            fosd_true += 1;
        } else {
            fosd_false += 1;
        }
        case += 1;
    }
    ensure(fosd_true > 0 && fosd_false > 0, || "degenerate sample".into())?;
    Ok(format!("500 cases ({fosd_true} FOSD, {fosd_false} not), equivalence and closed form exact"))
}

fn criterion_6(certs: &mut Certificates) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut case = 0;
    let mut nontrivial = 0;
    while case < 500 {
        let n = rng.gen_range(2..=3);
        let horizon = rng.gen_range(3..=6);
        let xi = random_experiment(&mut rng, n);
        let prior = random_prior(&mut rng, n);
        if !xi.is_informative(&prior).unwrap() {
            continue;
        }
        let (h, p, steps) = random_spread_pair(&mut rng, horizon, 3);
        ensure(sosd_check(&h, &p).unwrap(), || format!("case {case}: generated pair is not SOSD"))?;
        let beta = random_decreasing_beta(&mut rng, horizon);
        let lambda = lambda_weights(&beta);
        let fs: Vec<_> = (1..=horizon).map(|t| arrival_posteriors(&xi, &h, &prior, t).unwrap()).collect();
        let gs: Vec<_> = (1..=horizon).map(|t| arrival_posteriors(&xi, &p, &prior, t).unwrap()).collect();
        let f_mix = weighted_mixture(&fs, &lambda).unwrap();
        let g_mix = weighted_mixture(&gs, &lambda).unwrap();
        let out = mps_check(&f_mix, &g_mix).unwrap();
        ensure(certs.record(&out, &f_mix, &g_mix), || format!("case {case}: bad certificate"))?;
        ensure(out.holds(), || format!("case {case}: mixture convex order fails for β = {:?}", beta.betas()))?;
        if !steps.is_empty() {
            nontrivial += 1;
        }
        case += 1;
    }
    Ok(format!("500 decreasing-β cases hold ({nontrivial} with at least one splitting)"))
}

fn criterion_7() -> Check {
    let cx = increasing_beta_counterexample(CounterexampleSearch::increasing(3)).map_err(|e| e.to_string())?;
    let betas = cx.beta.betas().to_vec();
    ensure(betas.windows(2).all(|w| w[0] < w[1]), || "β is not increasing".into())?;
    // λ_β(t) = β_t / Σβ, evaluated here without the library.
    let total: Rational = betas.iter().sum();
    let mass = |l: &ArrivalLottery| -> Rational { (1..=3).map(|t| &betas[t - 1] / &total * l.cdf(t)).sum() };
    let (spread, concentrated) = (mass(&cx.h), mass(&cx.p));
    let w_spread = signal_value(
        &arrival_signal(&cx.xi, &cx.h),
        &cx.prior,
        &DecisionProblem::discounted(2, DecisionProblem::matching(2, 1).utilities(1), &betas).unwrap(),
    )
    .unwrap();
    let w_sure = signal_value(
        &arrival_signal(&cx.xi, &cx.p),
        &cx.prior,
        &DecisionProblem::discounted(2, DecisionProblem::matching(2, 1).utilities(1), &betas).unwrap(),
    )
    .unwrap();
    ensure(w_spread < w_sure, || format!("no strict reversal: {w_spread} vs {w_sure}"))?;
    ensure(sosd_check(&cx.h, &cx.p).unwrap(), || "returned pair is not SOSD".into())?;
    ensure(spread < concentrated, || "revealed mass not reversed".into())?;
    if betas == vec![q(1, 1), q(2, 1), q(4, 1)] {
        ensure(spread == q(11, 14) && concentrated == q(12, 14), || format!("gap {spread} vs {concentrated}"))?;
        ensure(cx.h.mass(1) == q(1, 2) && cx.h.mass(3) == q(1, 2) && cx.p.mass(2) == q(1, 1), || {
            "unexpected lotteries".into()
        })?;
    }
    Ok(format!("β = (1,2,4): revealed mass {spread} < {concentrated}, W {w_spread} < {w_sure}"))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut longest = 0usize;
    let mut bound_exceeded = 0usize;
    for case in 0..500 {
        let horizon = rng.gen_range(3..=8);
        let (h, p, _) = random_spread_pair(&mut rng, horizon, 4);
        let splits = decompose_splittings(p.pmf(), h.pmf()).map_err(|e| format!("pair {case}: {e}"))?;
        let mut current = p.pmf().clone();
        for s in &splits {
            // Conditions: z1 < y2 < z3, positive masses, mean identity, mass available at y2.
            ensure(s.z1 < s.y2 && s.y2 < s.z3, || format!("pair {case}: order"))?;
            ensure(s.eta1.is_positive() && s.eta3.is_positive(), || format!("pair {case}: masses"))?;
            let lhs = &s.eta1 * Rational::from(s.z1) + &s.eta3 * Rational::from(s.z3);
            ensure(lhs == (&s.eta1 + &s.eta3) * Rational::from(s.y2), || format!("pair {case}: mean"))?;
            ensure(current.weight(&s.y2) >= &s.eta1 + &s.eta3, || format!("pair {case}: mass at y2"))?;
            current = apply_splitting(&current, s).unwrap();
        }
        ensure(&current == h.pmf(), || format!("pair {case}: sequential application does not reproduce H"))?;
        ensure(sosd_check(&h, &p).unwrap(), || format!("pair {case}: SOSD false on a spread"))?;
        longest = longest.max(splits.len());
        if splits.len() > p.pmf().len() + h.pmf().len() {
            bound_exceeded += 1;
        }
    }
    let mut agree_spread = 0;
    for case in 0..500 {
        let horizon = rng.gen_range(2..=6);
        let h = random_lottery(&mut rng, horizon);
        let p = random_lottery(&mut rng, horizon);
        let sosd = sosd_check(&h, &p).unwrap();
        let decomposed = decompose_splittings(p.pmf(), h.pmf());
        ensure(sosd == decomposed.is_ok(), || {
            format!("random pair {case}: SOSD {sosd}, decomposition {:?}", decomposed.as_ref().err())
        })?;
        if let Ok(splits) = decomposed {
            let mut current = p.pmf().clone();
            for s in &splits {
                current = apply_splitting(&current, s).map_err(|e| format!("random pair {case}: {e}"))?;
            }
            ensure(&current == h.pmf(), || format!("random pair {case}: does not reproduce H"))?;
            agree_spread += 1;
        }
    }
    Ok(format!(
        "500 spreads decomposed (longest {longest} steps, {bound_exceeded} above |supp P|+|supp H|); 500 random pairs agree ({agree_spread} spreads)"
    ))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_infodom")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn criterion_9(certs: &Certificates) -> Check {
    ensure(certs.invalid == 0, || format!("{} of {} certificates failed re-validation", certs.invalid, certs.checked))?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut round_trips = 0;
    for case in 0..12 {
        let (pi1, pi2, prior) = random_pair(&mut rng, case);
        let (a, b) = (path(&format!("a{case}.json")), path(&format!("b{case}.json")));
        std::fs::write(&a, to_json(&SignalFile::from_signal(&pi1))).unwrap();
        std::fs::write(&b, to_json(&SignalFile::from_signal(&pi2))).unwrap();
        let prior_arg = prior.probabilities().iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        let beta =
            random_beta(&mut rng, pi1.horizon()).betas().iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        let runs: Vec<Vec<String>> = vec![
            vec!["--class".into(), "as".into()],
            vec!["--class".into(), "discounted".into(), "--beta".into(), beta.clone()],
            vec![
                "--class".into(),
                "discounted-family".into(),
                "--beta".into(),
                beta,
                "--seed".into(),
                case.to_string(),
            ],
        ];
        for (r, extra) in runs.iter().enumerate() {
            let report = path(&format!("r{case}_{r}.json"));
            let mut args: Vec<&str> =
                vec!["dominates", &a, &b, "--prior", &prior_arg, "--format", "json", "--out", &report];
            args.extend(extra.iter().map(String::as_str));
            let (code, _) = run_cli(&args);
            ensure(code == 0 || code == 1, || format!("case {case}: dominates exited {code}"))?;
            let (code, text) = run_cli(&["verify", &report, "--signals", &a, &b, "--prior", &prior_arg]);
            ensure(code == 0, || format!("case {case}: verify exited {code}: {text}"))?;
            round_trips += 1;
        }
    }
    // Tampering must be caught.
    let report = path("r0_0.json");
    let text = std::fs::read_to_string(&report).unwrap();
    let tampered = text.replacen("\"1/", "\"2/", 1);
    if tampered != text {
        std::fs::write(path("t.json"), tampered).unwrap();
        let (code, _) = run_cli(&["verify", &path("t.json"), "--signals", &path("a0.json"), &path("b0.json")]);
        ensure(code != 0, || "tampered report verified".into())?;
    }
    Ok(format!(
        "{} certificates re-validated independently; {round_trips} CLI reports round-trip through verify",
        certs.checked
    ))
}

fn criterion_10() -> Check {
    let weights = |pmf: FinitePmf<usize>, t: usize| -> Vec<Rational> { (1..=t).map(|s| pmf.weight(&s)).collect() };
    let l1 = weights(lambda_geometric(&q(1, 1), 4).map_err(|e| e.to_string())?, 4);
    ensure(l1 == vec![q(1, 4); 4], || format!("λ(δ=1, T=4) = {l1:?}"))?;
    let l2 = weights(lambda_geometric(&q(1, 2), 3).map_err(|e| e.to_string())?, 3);
    ensure(l2 == vec![q(4, 7), q(2, 7), q(1, 7)], || format!("λ(δ=1/2, T=3) = {l2:?}"))?;
    let l3 = weights(lambda_weights(&DiscountSequence::geometric(&q(1, 2), 3).unwrap()), 3);
    ensure(l3 == l2, || "λ_β for β = (1,1/2,1/4) differs".into())?;

    let states = vec!["L".to_string(), "R".to_string()];
    let mu = BeliefVector::uniform(2);
    let matching = DecisionProblem::matching(2, 2);
    let xi = StaticExperiment::fully_revealing(states.clone());
    let revealing = DynamicSignal::fully_revealing(states.clone(), 2);
    let late = arrival_signal(&xi, &ArrivalLottery::point_mass(2, 2).unwrap());
    let noise = DynamicSignal::uninformative(states, 2);
    for (name, pi, expected) in
        [("revealing at 1", &revealing, q(2, 1)), ("arrival at 2", &late, q(3, 2)), ("noise", &noise, q(1, 1))]
    {
        let w = signal_value(pi, &mu, &matching).unwrap();
        let direct = signal_value_direct(pi, &mu, &matching, DEFAULT_ORACLE_LIMIT).unwrap();
        ensure(w == expected && direct == expected, || format!("W({name}) = {w}, direct {direct}"))?;
    }
    Ok("λ(δ=1,T=4) = (1/4,…), λ(δ=1/2,T=3) = (4/7,2/7,1/7), W = 2, 3/2, 1".into())
}

fn main() {
    let mut certs = Certificates::default();
    let mut failed = 0;
    let mut report = |n: usize, start: Instant, result: Check| {
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("PASS criterion {n}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {n}: {msg} [{secs:.1}s]");
            }
        }
    };
    let s = Instant::now();
    report(1, s, criterion_1(&mut certs));
    let s = Instant::now();
    report(2, s, criterion_2(&mut certs));
    let s = Instant::now();
    report(3, s, criterion_3());
    let s = Instant::now();
    report(4, s, criterion_4(&mut certs));
    let s = Instant::now();
    report(5, s, criterion_5(&mut certs));
    let s = Instant::now();
    report(6, s, criterion_6(&mut certs));
    let s = Instant::now();
    report(7, s, criterion_7());
    let s = Instant::now();
    report(8, s, criterion_8());
    let s = Instant::now();
    report(9, s, criterion_9(&certs));
    let s = Instant::now();
    report(10, s, criterion_10());
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
