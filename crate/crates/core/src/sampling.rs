//! Seeded random instances: signals, garblings, priors, experiments,
//! arrival lotteries, discount sequences and mean-preserving spreads.
//!
//! All weights are small-denominator rationals so exact arithmetic stays cheap.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dominance::DiscountSequence;
use crate::orders::{apply_splitting, BinarySplitting};
use crate::prob::{BeliefVector, FinitePmf};
use crate::rational::Rational;
use crate::signals::{ArrivalLottery, DynamicSignal, Path, StaticExperiment};

/// Bounds for [`random_signal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignalShape {
    pub num_states: usize,
    pub horizon: usize,
    /// Each period's alphabet has between 1 and this many symbols.
    pub max_alphabet: usize,
    /// Each state's path distribution has at most this many atoms.
    pub max_paths: usize,
}

impl SignalShape {
    pub fn new(num_states: usize, horizon: usize) -> Self {
        SignalShape { num_states, horizon, max_alphabet: 3, max_paths: 4 }
    }
}

pub fn state_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("s{i}")).collect()
}

/// A pmf with integer weights in `1..=8` on `labels`, normalized.
pub fn random_pmf<L: Ord + Clone>(rng: &mut impl Rng, labels: Vec<L>) -> FinitePmf<L> {
    let raw: Vec<i64> = labels.iter().map(|_| rng.gen_range(1..=8)).collect();
    let total: i64 = raw.iter().sum();
    FinitePmf::new(labels.into_iter().zip(raw).map(|(l, w)| (l, Rational::new(w, total)))).expect("positive weights")
}

/// A prior with every state weighted in `1..=6` before normalizing.
pub fn random_prior(rng: &mut impl Rng, n: usize) -> BeliefVector {
    BeliefVector::normalized((0..n).map(|_| Rational::from(rng.gen_range(1..=6u32))).collect())
        .expect("positive masses")
}

fn random_subset<T: Clone>(rng: &mut impl Rng, items: &[T], max: usize) -> Vec<T> {
    let k = rng.gen_range(1..=max.min(items.len()).max(1));
    items.choose_multiple(rng, k).cloned().collect()
}

fn all_paths(alphabets: &[Vec<String>]) -> Vec<Path> {
    alphabets.iter().fold(vec![Vec::new()], |acc, alphabet| {
        acc.iter()
            .flat_map(|prefix| {
                (0..alphabet.len()).map(move |s| {
                    let mut p = prefix.clone();
                    p.push(s);
                    p
                })
            })
            .collect()
    })
}

/// A signal whose per-state path distributions sit on random subsets of paths.
pub fn random_signal(rng: &mut impl Rng, shape: SignalShape) -> DynamicSignal {
    let alphabets: Vec<Vec<String>> = (0..shape.horizon)
        .map(|_| {
            let size = rng.gen_range(1..=shape.max_alphabet.max(1));
            (0..size).map(|s| format!("m{s}")).collect()
        })
        .collect();
    let paths = all_paths(&alphabets);
    let kernel = (0..shape.num_states)
        .map(|_| {
            let support = random_subset(rng, &paths, shape.max_paths);
            random_pmf(rng, support)
        })
        .collect();
    DynamicSignal::new(state_names(shape.num_states), alphabets, kernel).expect("valid by construction")
}

/// Garbles `signal` symbol by symbol: each period's symbol is replaced by a
/// draw from a random kernel depending on that symbol only. Every period's
/// history of the result is a garbling of the original history, so the
/// original dominates the result for additively separable problems.
pub fn random_garbling(rng: &mut impl Rng, signal: &DynamicSignal, max_alphabet: usize) -> DynamicSignal {
    let mut alphabets = Vec::new();
    let mut kernels: Vec<Vec<FinitePmf<usize>>> = Vec::new();
    for source in signal.alphabets() {
        let size = rng.gen_range(1..=max_alphabet.max(1));
        let targets: Vec<usize> = (0..size).collect();
        kernels.push(
            source
                .iter()
                .map(|_| {
                    let support = random_subset(rng, &targets, 2);
                    random_pmf(rng, support)
                })
                .collect(),
        );
        alphabets.push((0..size).map(|s| format!("g{s}")).collect());
    }
    let kernel = (0..signal.num_states())
        .map(|state| {
            let mut atoms: Vec<(Path, Rational)> = Vec::new();
            for (path, w) in signal.kernel(state).iter() {
                let mut partial: Vec<(Path, Rational)> = vec![(Vec::new(), w.clone())];
                for (t, &s) in path.iter().enumerate() {
                    partial = partial
                        .into_iter()
                        .flat_map(|(prefix, pw)| {
                            kernels[t][s].iter().map(move |(g, gw)| {
                                let mut p = prefix.clone();
                                p.push(*g);
                                (p, &pw * gw)
                            })
                        })
                        .collect();
                }
                atoms.extend(partial);
            }
            FinitePmf::new(atoms).expect("pushforward of a pmf")
        })
        .collect();
    DynamicSignal::new(signal.states().to_vec(), alphabets, kernel).expect("valid by construction")
}

/// An experiment with 2 or 3 realizations; it may happen to be uninformative.
pub fn random_experiment(rng: &mut impl Rng, num_states: usize) -> StaticExperiment {
    let size = rng.gen_range(2..=3usize);
    let labels: Vec<usize> = (0..size).collect();
    let kernel = (0..num_states)
        .map(|_| {
            let support = random_subset(rng, &labels, size);
            random_pmf(rng, support)
        })
        .collect();
    let realizations = (0..size).map(|z| format!("z{z}")).collect();
    StaticExperiment::new(state_names(num_states), realizations, kernel).expect("valid by construction")
}

/// An arrival lottery on a random nonempty subset of `1..=horizon`.
pub fn random_lottery(rng: &mut impl Rng, horizon: usize) -> ArrivalLottery {
    let times: Vec<usize> = (1..=horizon).collect();
    let support = random_subset(rng, &times, horizon);
    let pmf = random_pmf(rng, support);
    ArrivalLottery::new(horizon, pmf).expect("times within horizon")
}

/// A weakly decreasing positive sequence with entries `k/12`, `k ∈ 1..=12`.
pub fn random_decreasing_beta(rng: &mut impl Rng, horizon: usize) -> DiscountSequence {
    let mut raw: Vec<i64> = (0..horizon).map(|_| rng.gen_range(1..=12)).collect();
    raw.sort_unstable_by(|a, b| b.cmp(a));
    DiscountSequence::new(raw.into_iter().map(|k| Rational::new(k, 12)).collect()).expect("positive")
}

/// A positive sequence with entries `k/12`, in no particular order.
pub fn random_beta(rng: &mut impl Rng, horizon: usize) -> DiscountSequence {
    DiscountSequence::new((0..horizon).map(|_| Rational::new(rng.gen_range(1..=12), 12)).collect()).expect("positive")
}

/// A random binary splitting that `p` can absorb, if any interior time carries mass.
pub fn random_splitting(rng: &mut impl Rng, p: &FinitePmf<usize>, horizon: usize) -> Option<BinarySplitting> {
    let interior: Vec<usize> = p.labels().copied().filter(|&t| t > 1 && t < horizon).collect();
    let &y2 = interior.choose(rng)?;
    let z1 = rng.gen_range(1..y2);
    let z3 = rng.gen_range(y2 + 1..=horizon);
    let fraction = Rational::new(rng.gen_range(1..=4), 4);
    let moved = p.weight(&y2) * fraction;
    let span = Rational::from(z3 - z1);
    let eta1 = &moved * Rational::from(z3 - y2) / &span;
    let eta3 = &moved * Rational::from(y2 - z1) / &span;
    Some(BinarySplitting::new(z1, y2, z3, eta1, eta3).expect("valid by construction"))
}

/// `(h, p, splittings)` where `h` is `p` after up to `max_steps` random
/// binary splittings, so `P` SOSD `H` holds by construction.
pub fn random_spread_pair(
    rng: &mut impl Rng,
    horizon: usize,
    max_steps: usize,
) -> (ArrivalLottery, ArrivalLottery, Vec<BinarySplitting>) {
    let p = random_lottery(rng, horizon);
    let mut h = p.pmf().clone();
    let mut steps = Vec::new();
    for _ in 0..rng.gen_range(1..=max_steps.max(1)) {
        match random_splitting(rng, &h, horizon) {
            Some(s) => {
                h = apply_splitting(&h, &s).expect("splitting fits");
                steps.push(s);
            }
            None => break,
        }
    }
    (ArrivalLottery::new(horizon, h).expect("times within horizon"), p, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::dominates_as;
    use crate::orders::sosd_check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn same_seed_same_signal() {
        let shape = SignalShape::new(3, 3);
        let a = random_signal(&mut ChaCha8Rng::seed_from_u64(7), shape);
        let b = random_signal(&mut ChaCha8Rng::seed_from_u64(7), shape);
        assert_eq!(a, b);
    }

    #[test]
    fn garblings_are_dominated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let pi = random_signal(&mut rng, SignalShape::new(2, 2));
            let garbled = random_garbling(&mut rng, &pi, 3);
            let prior = random_prior(&mut rng, 2);
            assert!(dominates_as(&pi, &garbled, &prior).unwrap().holds);
        }
    }

    #[test]
    fn spread_pairs_satisfy_sosd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (h, p, _) = random_spread_pair(&mut rng, 5, 3);
            assert!(sosd_check(&h, &p).unwrap());
        }
    }

    #[test]
    fn decreasing_beta_is_decreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            assert!(random_decreasing_beta(&mut rng, 4).is_decreasing());
        }
    }
}
