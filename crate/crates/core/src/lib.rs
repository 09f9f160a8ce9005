//! Exact dominance tests between dynamic information structures.
//!
//! A dynamic signal reveals information about a fixed state over `T`
//! periods. This crate decides whether one signal is worth weakly more than
//! another to every agent in a class of dynamic decision problems:
//!
//! * additively separable problems, where dominance is equivalent to the
//!   convex order between the period-`t` posterior distributions for every
//!   `t` ([`dominance::dominates_as`]);
//! * β-discounted problems, where it is equivalent to the convex order
//!   between the β-weighted mixtures of those distributions
//!   ([`dominance::dominates_discounted`]).
//!
//! Verdicts carry certificates: martingale couplings when dominance holds,
//! and a separating convex function plus an explicit decision problem that
//! strictly prefers the other signal when it fails. All arithmetic is exact.

pub mod cli;
pub mod decision;
pub mod dominance;
pub mod io;
pub mod lp;
pub mod orders;
pub mod prob;
pub mod rational;
pub mod sampling;
pub mod signals;

pub use prob::{BeliefVector, FinitePmf, PosteriorDistribution};
pub use rational::Rational;
pub use signals::{ArrivalLottery, DynamicSignal, StaticExperiment};
