//! Convex order between posterior distributions, stochastic dominance
//! between arrival lotteries, and binary splittings.
//!
//! [`mps_check`] decides `F ⪰ G` (F is a mean-preserving spread of G) by
//! solving the martingale-coupling feasibility program. Either verdict comes
//! with a certificate that can be re-checked without the solver: a
//! [`MartingaleCoupling`] when the order holds, a [`Separation`] (a convex
//! piecewise-linear function with strictly smaller expectation under `F`)
//! when it fails.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::lp::{phase_one, EqualitySystem, Feasibility, PivotRule};
use crate::prob::{BeliefVector, FinitePmf, PosteriorDistribution, ProbError};
use crate::rational::Rational;
use crate::signals::ArrivalLottery;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderError {
    #[error("distributions live on {0} and {1} states")]
    DimensionMismatch(usize, usize),
    #[error("the binary criterion needs exactly 2 states, found {0}")]
    WrongDimension(usize),
    #[error("horizons differ: {0} vs {1}")]
    HorizonMismatch(usize, usize),
    #[error("time {time} holds {available} but the splitting removes {requested}")]
    InsufficientMass { time: usize, available: Box<Rational>, requested: Box<Rational> },
    #[error("invalid binary splitting: {0}")]
    InvalidSplit(String),
    #[error("target is not a mean-preserving spread of the source")]
    NotAnMps,
    #[error("mixing weights reference period {period} but only {available} distributions were given")]
    LengthMismatch { period: usize, available: usize },
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// One support point of a distribution in a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub belief: BeliefVector,
    pub weight: Rational,
}

fn atoms_of(dist: &PosteriorDistribution) -> Vec<Atom> {
    dist.atoms().iter().map(|(b, w)| Atom { belief: b.clone(), weight: w.clone() }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificateError {
    #[error("{0}")]
    Malformed(String),
    #[error("negative transition probability at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("row {row} sums to {sum}")]
    RowSum { row: usize, sum: Rational },
    #[error("column {col} receives mass {received} but has weight {expected}")]
    ColumnMass { col: usize, received: Box<Rational>, expected: Box<Rational> },
    #[error("row {row} has conditional mean {found}, expected {expected}")]
    Mean { row: usize, found: BeliefVector, expected: BeliefVector },
    #[error("witness does not separate: E_F = {dominating}, E_G = {dominated}")]
    NotSeparating { dominating: Box<Rational>, dominated: Box<Rational> },
}

fn check_atoms(atoms: &[Atom], what: &str) -> Result<usize, CertificateError> {
    let dim =
        atoms.first().map(|a| a.belief.dim()).ok_or_else(|| CertificateError::Malformed(format!("{what} is empty")))?;
    if atoms.iter().any(|a| a.belief.dim() != dim) {
        return Err(CertificateError::Malformed(format!("{what} mixes dimensions")));
    }
    if atoms.iter().any(|a| !a.weight.is_positive()) {
        return Err(CertificateError::Malformed(format!("{what} has a non-positive weight")));
    }
    if atoms.iter().map(|a| &a.weight).sum::<Rational>() != 1 {
        return Err(CertificateError::Malformed(format!("{what} weights do not sum to 1")));
    }
    Ok(dim)
}

/// Transition kernel from the dominated distribution `G` (rows) to the
/// dominating distribution `F` (columns) whose conditional means reproduce
/// the row beliefs: a martingale coupling witnessing `F ⪰ G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MartingaleCoupling {
    pub rows: Vec<Atom>,
    pub columns: Vec<Atom>,
    /// `kernel[i][j] = P(F-belief = x_j | G-belief = y_i)`.
    pub kernel: Vec<Vec<Rational>>,
}

impl MartingaleCoupling {
    /// Re-checks nonnegativity, row-stochasticity, column masses and the
    /// mean condition, exactly.
    pub fn verify(&self) -> Result<(), CertificateError> {
        let dim = check_atoms(&self.rows, "rows")?;
        if check_atoms(&self.columns, "columns")? != dim {
            return Err(CertificateError::Malformed("row and column beliefs differ in dimension".into()));
        }
        if self.kernel.len() != self.rows.len() || self.kernel.iter().any(|r| r.len() != self.columns.len()) {
            return Err(CertificateError::Malformed("kernel shape does not match the supports".into()));
        }
        let mut received = vec![Rational::zero(); self.columns.len()];
        for (i, (row, atom)) in self.kernel.iter().zip(&self.rows).enumerate() {
            if let Some(j) = row.iter().position(Rational::is_negative) {
                return Err(CertificateError::NegativeEntry { row: i, col: j });
            }
            let sum: Rational = row.iter().sum();
            if sum != 1 {
                return Err(CertificateError::RowSum { row: i, sum });
            }
            let mut mean = vec![Rational::zero(); dim];
            for (j, qij) in row.iter().enumerate() {
                received[j] += &atom.weight * qij;
                for (m, x) in mean.iter_mut().zip(self.columns[j].belief.probabilities()) {
                    *m += qij * x;
                }
            }
            if mean.as_slice() != atom.belief.probabilities() {
                let found = BeliefVector::new(mean).expect("average of beliefs");
                return Err(CertificateError::Mean { row: i, found, expected: atom.belief.clone() });
            }
        }
        for (j, (got, atom)) in received.into_iter().zip(&self.columns).enumerate() {
            if got != atom.weight {
                return Err(CertificateError::ColumnMass {
                    col: j,
                    received: Box::new(got),
                    expected: Box::new(atom.weight.clone()),
                });
            }
        }
        Ok(())
    }
}

/// A convex piecewise-linear function on the simplex, `w(x) = max_k ⟨piece_k, x⟩`.
///
/// Each piece is a state-indexed payoff vector, so a witness is exactly the
/// value function of a one-period decision problem with one action per piece.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConvexWitness {
    pub pieces: Vec<Vec<Rational>>,
}

impl ConvexWitness {
    pub fn new(pieces: Vec<Vec<Rational>>) -> Self {
        assert!(!pieces.is_empty(), "a witness needs at least one piece");
        ConvexWitness { pieces }
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].len()
    }

    pub fn eval(&self, x: &BeliefVector) -> Rational {
        self.pieces.iter().map(|p| x.dot(p)).reduce(Rational::max).expect("nonempty")
    }

    pub fn expectation(&self, dist: &PosteriorDistribution) -> Rational {
        dist.expectation(|x| self.eval(x))
    }

    /// Drops duplicate pieces, shifts every piece by a common constant so the
    /// smallest coefficient is zero, and rescales to coprime integers. Both
    /// operations preserve the sign of `E_F w − E_G w`.
    pub fn normalized(&self) -> ConvexWitness {
        use num_integer::Integer;
        use num_traits::{One, Zero};

        let floor = self.pieces.iter().flatten().cloned().reduce(Rational::min).expect("nonempty");
        let shifted: Vec<Vec<Rational>> = self.pieces.iter().map(|p| p.iter().map(|c| c - &floor).collect()).collect();
        let lcm = shifted.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let integers: Vec<Vec<BigInt>> =
            shifted.iter().map(|p| p.iter().map(|c| c.numer() * (&lcm / c.denom())).collect()).collect();
        let gcd = integers.iter().flatten().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let divisor = if gcd.is_zero() { BigInt::one() } else { gcd };
        let mut pieces: Vec<Vec<Rational>> = integers
            .into_iter()
            .map(|p| p.into_iter().map(|c| Rational::from(BigRational::new(c, divisor.clone()))).collect())
            .collect();
        pieces.sort();
        pieces.dedup();
        ConvexWitness { pieces }
    }
}

/// Failure certificate for `F ⪰ G`: a convex witness together with both
/// distributions, so `E_F w < E_G w` can be re-checked from this value alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub witness: ConvexWitness,
    pub dominating: Vec<Atom>,
    pub dominated: Vec<Atom>,
}

impl Separation {
    pub fn expectation_dominating(&self) -> Rational {
        self.dominating.iter().map(|a| &a.weight * self.witness.eval(&a.belief)).sum()
    }

    pub fn expectation_dominated(&self) -> Rational {
        self.dominated.iter().map(|a| &a.weight * self.witness.eval(&a.belief)).sum()
    }

    pub fn verify(&self) -> Result<(), CertificateError> {
        let dim = check_atoms(&self.dominating, "dominating")?;
        if check_atoms(&self.dominated, "dominated")? != dim {
            return Err(CertificateError::Malformed("distributions differ in dimension".into()));
        }
        if self.witness.pieces.is_empty() || self.witness.pieces.iter().any(|p| p.len() != dim) {
            return Err(CertificateError::Malformed("witness pieces do not match the state count".into()));
        }
        let (f, g) = (self.expectation_dominating(), self.expectation_dominated());
        if f < g {
            Ok(())
        } else {
            Err(CertificateError::NotSeparating { dominating: Box::new(f), dominated: Box::new(g) })
        }
    }
}

/// Verdict of a convex-order check, with its certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MpsOutcome {
    Holds { coupling: MartingaleCoupling },
    Fails { separation: Separation },
}

impl MpsOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, MpsOutcome::Holds { .. })
    }

    pub fn verify(&self) -> Result<(), CertificateError> {
        match self {
            MpsOutcome::Holds { coupling } => coupling.verify(),
            MpsOutcome::Fails { separation } => separation.verify(),
        }
    }

    pub fn coupling(&self) -> Option<&MartingaleCoupling> {
        match self {
            MpsOutcome::Holds { coupling } => Some(coupling),
            MpsOutcome::Fails { .. } => None,
        }
    }

    pub fn separation(&self) -> Option<&Separation> {
        match self {
            MpsOutcome::Fails { separation } => Some(separation),
            MpsOutcome::Holds { .. } => None,
        }
    }
}

fn holds(
    f: &PosteriorDistribution,
    g: &PosteriorDistribution,
    kernel: Vec<Vec<Rational>>,
) -> Result<MpsOutcome, OrderError> {
    let coupling = MartingaleCoupling { rows: atoms_of(g), columns: atoms_of(f), kernel };
    coupling.verify().map_err(|e| OrderError::Internal(format!("constructed coupling failed re-verification: {e}")))?;
    Ok(MpsOutcome::Holds { coupling })
}

fn separation(f: &PosteriorDistribution, g: &PosteriorDistribution, witness: ConvexWitness) -> Separation {
    Separation { witness, dominating: atoms_of(f), dominated: atoms_of(g) }
}

fn fails(
    f: &PosteriorDistribution,
    g: &PosteriorDistribution,
    witness: ConvexWitness,
) -> Result<MpsOutcome, OrderError> {
    let sep = separation(f, g, witness);
    sep.verify().map_err(|e| OrderError::Internal(format!("constructed witness failed re-verification: {e}")))?;
    Ok(MpsOutcome::Fails { separation: sep })
}

/// Linear witness exploiting a difference in barycenters, or `None` when
/// the barycenters agree.
fn mean_gap_witness(f: &PosteriorDistribution, g: &PosteriorDistribution) -> Option<ConvexWitness> {
    let (bf, bg) = (f.barycenter(), g.barycenter());
    let state = (0..f.dim()).find(|&s| bf.get(s) != bg.get(s))?;
    let sign = if bf.get(state) < bg.get(state) { 1 } else { -1 };
    let piece = (0..f.dim()).map(|s| Rational::from_integer(if s == state { sign } else { 0 })).collect();
    Some(ConvexWitness::new(vec![piece]))
}

/// The martingale-coupling program in joint-mass form. Variable `i·k + j` is
/// `P(G-belief = y_i, F-belief = x_j)`; rows are, in order, the `m` G-marginal
/// rows, the `k` F-marginal rows, then `n − 1` mean rows per `i` (the last
/// coordinate is implied by the marginals).
struct CouplingProgram {
    system: EqualitySystem,
    m: usize,
    k: usize,
    n: usize,
}

impl CouplingProgram {
    fn build(f: &PosteriorDistribution, g: &PosteriorDistribution) -> Self {
        let (m, k, n) = (g.len(), f.len(), f.dim());
        let mut system = EqualitySystem::new(m * k);
        for (i, (_, gi)) in g.atoms().iter().enumerate() {
            system.add_row((0..k).map(|j| (i * k + j, Rational::one())).collect(), gi.clone());
        }
        for (j, (_, fj)) in f.atoms().iter().enumerate() {
            system.add_row((0..m).map(|i| (i * k + j, Rational::one())).collect(), fj.clone());
        }
        for (i, (yi, gi)) in g.atoms().iter().enumerate() {
            for state in 0..n - 1 {
                let coefficients =
                    f.atoms().iter().enumerate().map(|(j, (xj, _))| (i * k + j, xj.get(state).clone())).collect();
                system.add_row(coefficients, gi * yi.get(state));
            }
        }
        CouplingProgram { system, m, k, n }
    }

    fn kernel(&self, g: &PosteriorDistribution, joint: &[Rational]) -> Vec<Vec<Rational>> {
        g.atoms()
            .iter()
            .enumerate()
            .map(|(i, (_, gi))| (0..self.k).map(|j| &joint[i * self.k + j] / gi).collect())
            .collect()
    }

    /// Folds Farkas multipliers into one affine piece per row of `G`:
    /// `piece_i(x) = −(α_i + Σ_s γ_{i,s} x_s)`. If the multipliers certify
    /// infeasibility then `max_i piece_i` separates `F` from `G`.
    fn witness(&self, multipliers: &[Rational]) -> ConvexWitness {
        let offset = self.m + self.k;
        let pieces = (0..self.m)
            .map(|i| {
                let alpha = &multipliers[i];
                (0..self.n)
                    .map(|state| {
                        if state + 1 < self.n {
                            -(alpha + &multipliers[offset + i * (self.n - 1) + state])
                        } else {
                            -alpha
                        }
                    })
                    .collect()
            })
            .collect();
        ConvexWitness::new(pieces)
    }
}

/// Decides whether `f` is a mean-preserving spread of `g`.
///
/// A floating-point phase one is run first to locate either a candidate
/// support for the coupling or candidate multipliers; whichever it finds is
/// rebuilt in exact arithmetic and checked. Only if that check fails does
/// the exact Bland-rule phase one run. Every returned certificate has been
/// re-verified exactly.
pub fn mps_check(f: &PosteriorDistribution, g: &PosteriorDistribution) -> Result<MpsOutcome, OrderError> {
    if f.dim() != g.dim() {
        return Err(OrderError::DimensionMismatch(f.dim(), g.dim()));
    }
    if let Some(w) = mean_gap_witness(f, g) {
        return fails(f, g, w);
    }
    if f == g {
        let kernel =
            (0..g.len()).map(|i| (0..f.len()).map(|j| Rational::from_integer((i == j) as i64)).collect()).collect();
        return holds(f, g, kernel);
    }
    let program = CouplingProgram::build(f, g);
    let limit = 20 * (program.system.num_rows() + program.system.num_vars());
    match phase_one::<f64>(&program.system, PivotRule::Dantzig { limit }) {
        Feasibility::Feasible(x) => {
            let support: Vec<usize> = x.iter().enumerate().filter(|(_, v)| **v > 1e-12).map(|(j, _)| j).collect();
            if let Some(joint) = program.system.solve_on_support(&support) {
                if program.system.is_solution(&joint) {
                    return holds(f, g, program.kernel(g, &joint));
                }
            }
        }
        Feasibility::Infeasible(w) => {
            for max_denom in [1_000u64, 1_000_000, 1_000_000_000_000] {
                let rounded: Option<Vec<Rational>> =
                    w.iter().map(|v| Rational::approximate_f64(*v, max_denom)).collect();
                if let Some(rounded) = rounded {
                    let witness = program.witness(&rounded).normalized();
                    if separation(f, g, witness.clone()).verify().is_ok() {
                        return fails(f, g, witness);
                    }
                }
            }
        }
    }
    exact_mps_check(f, g, &program)
}

fn exact_mps_check(
    f: &PosteriorDistribution,
    g: &PosteriorDistribution,
    program: &CouplingProgram,
) -> Result<MpsOutcome, OrderError> {
    match phase_one::<Rational>(&program.system, PivotRule::Bland) {
        Feasibility::Feasible(joint) => holds(f, g, program.kernel(g, &joint)),
        Feasibility::Infeasible(w) => {
            if !program.system.is_farkas_certificate(&w) {
                return Err(OrderError::Internal("exact phase one returned an invalid Farkas certificate".into()));
            }
            fails(f, g, program.witness(&w).normalized())
        }
    }
}

/// Exact-only variant of [`mps_check`] that never consults the float screen.
pub fn mps_check_exact(f: &PosteriorDistribution, g: &PosteriorDistribution) -> Result<MpsOutcome, OrderError> {
    if f.dim() != g.dim() {
        return Err(OrderError::DimensionMismatch(f.dim(), g.dim()));
    }
    if let Some(w) = mean_gap_witness(f, g) {
        return fails(f, g, w);
    }
    exact_mps_check(f, g, &CouplingProgram::build(f, g))
}

/// One mean-preserving transfer on the real line: `eta_left + eta_right`
/// leaves `from` and lands on `left < from < right`, with
/// `eta_left·left + eta_right·right = (eta_left + eta_right)·from`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Transfer {
    left: Rational,
    from: Rational,
    right: Rational,
    eta_left: Rational,
    eta_right: Rational,
}

/// Greedy decomposition of a mean-preserving spread on the line into
/// binary transfers.
///
/// At each step the leftmost point where the running distribution has excess
/// mass over `target` is split between its nearest deficit points on either
/// side. The transferred amount is the largest one that neither overshoots
/// the three point masses involved nor pushes the running integrated cdf
/// above the target's at `from`. Every step zeroes a mass difference or a
/// gap in integrated cdfs, and neither is ever undone, so the loop ends after
/// at most `2·|points|` steps when `target` really is a spread of `source`.
fn spread_transfers(
    source: &BTreeMap<Rational, Rational>,
    target: &BTreeMap<Rational, Rational>,
) -> Result<Vec<Transfer>, OrderError> {
    let points: Vec<Rational> =
        source.keys().chain(target.keys()).cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let at = |m: &BTreeMap<Rational, Rational>, p: &Rational| m.get(p).cloned().unwrap_or_else(Rational::zero);
    let mut current: Vec<Rational> = points.iter().map(|p| at(source, p)).collect();
    let goal: Vec<Rational> = points.iter().map(|p| at(target, p)).collect();
    let mut transfers = Vec::new();

    for _ in 0..=2 * points.len() + 2 {
        let diff: Vec<Rational> = goal.iter().zip(&current).map(|(h, c)| h - c).collect();
        let Some(y) = diff.iter().position(Rational::is_negative) else {
            return if diff.iter().all(Rational::is_zero) { Ok(transfers) } else { Err(OrderError::NotAnMps) };
        };
        let a = (0..y).rev().find(|&i| diff[i].is_positive()).ok_or(OrderError::NotAnMps)?;
        let b = (y + 1..points.len()).find(|&i| diff[i].is_positive()).ok_or(OrderError::NotAnMps)?;

        // Integrated cdf gap ∫_{-∞}^{points[y]} (Goal − Current)(s) ds.
        let mut gap = Rational::zero();
        let mut cdf_gap = Rational::zero();
        for i in 0..y {
            cdf_gap += &diff[i];
            gap += &cdf_gap * (&points[i + 1] - &points[i]);
        }
        if !gap.is_positive() {
            return Err(OrderError::NotAnMps);
        }
        let (pa, py, pb) = (&points[a], &points[y], &points[b]);
        let span = pb - pa;
        let left_share = (pb - py) / &span;
        let right_share = (py - pa) / &span;
        let amount =
            (-&diff[y]).min(&diff[a] / &left_share).min(&diff[b] / &right_share).min(&gap / (&left_share * (py - pa)));
        let eta_left = &amount * &left_share;
        let eta_right = &amount * &right_share;
        current[y] -= &amount;
        current[a] += &eta_left;
        current[b] += &eta_right;
        transfers.push(Transfer { left: pa.clone(), from: py.clone(), right: pb.clone(), eta_left, eta_right });
    }
    Err(OrderError::NotAnMps)
}

/// Decides `F ⪰ G` for two-state beliefs through the integrated-cdf
/// criterion on the first coordinate: equal means and
/// `E_F (x − c)⁺ ≥ E_G (x − c)⁺` at every support point `c`.
///
/// When the order holds, the coupling is assembled by replaying a
/// decomposition of `F` into binary spreads of `G` and tracking where each
/// atom of `G` sends its mass; no linear program is involved.
pub fn mps_check_binary(f: &PosteriorDistribution, g: &PosteriorDistribution) -> Result<MpsOutcome, OrderError> {
    if f.dim() != g.dim() {
        return Err(OrderError::DimensionMismatch(f.dim(), g.dim()));
    }
    if f.dim() != 2 {
        return Err(OrderError::WrongDimension(f.dim()));
    }
    if let Some(w) = mean_gap_witness(f, g) {
        return fails(f, g, w);
    }
    let coord = |b: &BeliefVector| b.get(0).clone();
    let mut kinks: Vec<Rational> = f.support().chain(g.support()).map(coord).collect();
    kinks.sort();
    kinks.dedup();
    let call = |dist: &PosteriorDistribution, c: &Rational| dist.expectation(|x| (coord(x) - c).max(Rational::zero()));
    if let Some(c) = kinks.iter().find(|c| call(f, c) < call(g, c)) {
        // (x₀ − c)⁺ on the simplex is max{(1 − c)x₀ − c·x₁, 0}.
        let piece = vec![Rational::one() - c, -c];
        let witness = ConvexWitness::new(vec![piece, vec![Rational::zero(), Rational::zero()]]);
        return fails(f, g, witness);
    }

    let to_line = |d: &PosteriorDistribution| -> BTreeMap<Rational, Rational> {
        d.atoms().iter().map(|(b, w)| (coord(b), w.clone())).collect()
    };
    let transfers = spread_transfers(&to_line(g), &to_line(f)).map_err(|_| {
        OrderError::Internal("integrated-cdf criterion holds but no spread decomposition exists".into())
    })?;

    // Mass currently at each point, split by originating row of G.
    let mut holdings: BTreeMap<Rational, BTreeMap<usize, Rational>> = BTreeMap::new();
    for (i, (y, w)) in g.atoms().iter().enumerate() {
        holdings.entry(coord(y)).or_default().insert(i, w.clone());
    }
    for t in &transfers {
        let moved = &t.eta_left + &t.eta_right;
        let origin = holdings.remove(&t.from).unwrap_or_default();
        let total: Rational = origin.values().sum();
        let mut remaining = BTreeMap::new();
        for (i, mass) in origin {
            let share = &mass / &total;
            let stay = &mass - &moved * &share;
            *holdings.entry(t.left.clone()).or_default().entry(i).or_insert_with(Rational::zero) +=
                &t.eta_left * &share;
            *holdings.entry(t.right.clone()).or_default().entry(i).or_insert_with(Rational::zero) +=
                &t.eta_right * &share;
            if !stay.is_zero() {
                remaining.insert(i, stay);
            }
        }
        if !remaining.is_empty() {
            holdings.insert(t.from.clone(), remaining);
        }
    }
    let column: BTreeMap<Rational, usize> = f.atoms().iter().enumerate().map(|(j, (x, _))| (coord(x), j)).collect();
    let mut kernel = vec![vec![Rational::zero(); f.len()]; g.len()];
    for (point, rows) in holdings {
        for (i, mass) in rows {
            if mass.is_zero() {
                continue;
            }
            let j = *column
                .get(&point)
                .ok_or_else(|| OrderError::Internal("spread left mass off the support of F".into()))?;
            kernel[i][j] += mass / &g.atoms()[i].1;
        }
    }
    holds(f, g, kernel)
}

/// `P` FOSD `H` in the arrival-time convention: `H(y) ≥ P(y)` for every `y`,
/// i.e. arrival under `H` is stochastically earlier.
pub fn fosd_check(h: &ArrivalLottery, p: &ArrivalLottery) -> Result<bool, OrderError> {
    if h.horizon() != p.horizon() {
        return Err(OrderError::HorizonMismatch(h.horizon(), p.horizon()));
    }
    Ok(h.cdf_values().iter().zip(p.cdf_values()).all(|(hy, py)| *hy >= py))
}

/// `P` SOSD `H`: arrival time under `H` is a mean-preserving spread of
/// arrival time under `P`. Equal means and `Σ_{i≤y} (H(i) − P(i)) ≥ 0` for
/// every `y`.
pub fn sosd_check(h: &ArrivalLottery, p: &ArrivalLottery) -> Result<bool, OrderError> {
    if h.horizon() != p.horizon() {
        return Err(OrderError::HorizonMismatch(h.horizon(), p.horizon()));
    }
    if h.mean() != p.mean() {
        return Ok(false);
    }
    let mut partial = Rational::zero();
    for (hy, py) in h.cdf_values().iter().zip(p.cdf_values()) {
        partial += hy - py;
        if partial.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mass `eta1 + eta3` leaves time `y2` for the earlier time `z1` and the
/// later time `z3` without changing the mean.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinarySplitting {
    pub z1: usize,
    pub y2: usize,
    pub z3: usize,
    pub eta1: Rational,
    pub eta3: Rational,
}

impl BinarySplitting {
    pub fn new(z1: usize, y2: usize, z3: usize, eta1: Rational, eta3: Rational) -> Result<Self, OrderError> {
        let s = BinarySplitting { z1, y2, z3, eta1, eta3 };
        s.validate()?;
        Ok(s)
    }

    /// Ordering `z1 < y2 < z3`, positive masses, and the mean identity
    /// `η₁z₁ + η₃z₃ = (η₁ + η₃)y₂`.
    pub fn validate(&self) -> Result<(), OrderError> {
        if !(self.z1 < self.y2 && self.y2 < self.z3) {
            return Err(OrderError::InvalidSplit(format!("need {} < {} < {}", self.z1, self.y2, self.z3)));
        }
        if !self.eta1.is_positive() || !self.eta3.is_positive() {
            return Err(OrderError::InvalidSplit("masses must be strictly positive".into()));
        }
        let lhs = &self.eta1 * Rational::from(self.z1) + &self.eta3 * Rational::from(self.z3);
        let rhs = (&self.eta1 + &self.eta3) * Rational::from(self.y2);
        if lhs != rhs {
            return Err(OrderError::InvalidSplit(format!("mean identity fails: {lhs} ≠ {rhs}")));
        }
        Ok(())
    }

    pub fn total(&self) -> Rational {
        &self.eta1 + &self.eta3
    }
}

/// Applies `split` to the arrival pmf `p`.
pub fn apply_splitting(p: &FinitePmf<usize>, split: &BinarySplitting) -> Result<FinitePmf<usize>, OrderError> {
    split.validate()?;
    let available = p.weight(&split.y2);
    if available < split.total() {
        return Err(OrderError::InsufficientMass {
            time: split.y2,
            available: Box::new(available),
            requested: Box::new(split.total()),
        });
    }
    let mut atoms: BTreeMap<usize, Rational> = p.iter().map(|(t, w)| (*t, w.clone())).collect();
    *atoms.entry(split.z1).or_insert_with(Rational::zero) += &split.eta1;
    *atoms.entry(split.z3).or_insert_with(Rational::zero) += &split.eta3;
    *atoms.entry(split.y2).or_insert_with(Rational::zero) -= split.total();
    Ok(FinitePmf::new(atoms)?)
}

/// A sequence of binary splittings carrying `p` to `h`.
///
/// Fails with [`OrderError::NotAnMps`] exactly when `h` is not a
/// mean-preserving spread of `p`.
pub fn decompose_splittings(p: &FinitePmf<usize>, h: &FinitePmf<usize>) -> Result<Vec<BinarySplitting>, OrderError> {
    let to_line = |pmf: &FinitePmf<usize>| -> BTreeMap<Rational, Rational> {
        pmf.iter().map(|(t, w)| (Rational::from(*t), w.clone())).collect()
    };
    let time = |r: &Rational| -> usize {
        use num_traits::ToPrimitive;
        r.numer().to_usize().expect("transfer points are support times")
    };
    spread_transfers(&to_line(p), &to_line(h))?
        .into_iter()
        .map(|t| BinarySplitting::new(time(&t.left), time(&t.from), time(&t.right), t.eta_left, t.eta_right))
        .collect()
}

/// `Σ_t λ(t)·F_t`, with `dists[t − 1] = F_t`.
pub fn weighted_mixture(
    dists: &[PosteriorDistribution],
    lambda: &FinitePmf<usize>,
) -> Result<PosteriorDistribution, OrderError> {
    let mut parts = Vec::with_capacity(lambda.len());
    for (&t, w) in lambda.iter() {
        if t == 0 || t > dists.len() {
            return Err(OrderError::LengthMismatch { period: t, available: dists.len() });
        }
        parts.push((w.clone(), &dists[t - 1]));
    }
    Ok(PosteriorDistribution::mixture(&parts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn b(x: i64, d: i64) -> BeliefVector {
        BeliefVector::new(vec![q(x, d), q(d - x, d)]).unwrap()
    }

    fn dist(atoms: &[(BeliefVector, Rational)]) -> PosteriorDistribution {
        PosteriorDistribution::new(atoms.to_vec()).unwrap()
    }

    fn revealed() -> PosteriorDistribution {
        dist(&[(b(1, 1), q(1, 2)), (b(0, 1), q(1, 2))])
    }

    fn lottery(t: usize, atoms: &[(usize, Rational)]) -> ArrivalLottery {
        ArrivalLottery::new(t, FinitePmf::new(atoms.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn reflexive_identity_coupling() {
        let f = dist(&[(b(1, 4), q(1, 3)), (b(3, 4), q(2, 3))]);
        let out = mps_check(&f, &f).unwrap();
        let coupling = out.coupling().unwrap();
        assert_eq!(coupling.kernel, vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        assert!(mps_check_binary(&f, &f).unwrap().holds());
    }

    #[test]
    fn full_revelation_spreads_point_mass() {
        let g = PosteriorDistribution::point_mass(b(1, 2));
        for out in [mps_check(&revealed(), &g).unwrap(), mps_check_binary(&revealed(), &g).unwrap()] {
            let coupling = out.coupling().expect("holds");
            assert_eq!(coupling.kernel, vec![vec![q(1, 2), q(1, 2)]]);
            coupling.verify().unwrap();
        }
    }

    #[test]
    fn partial_information_does_not_spread_full_revelation() {
        let f = dist(&[(b(1, 4), q(1, 2)), (b(3, 4), q(1, 2))]);
        let g = revealed();
        let out = mps_check(&f, &g).unwrap();
        let sep = out.separation().expect("fails");
        sep.verify().unwrap();
        assert!(sep.witness.pieces.len() <= g.len() + 2);
        assert!(sep.expectation_dominating() < sep.expectation_dominated());
        // The matching value function max(x₁, x₂) also separates: 3/4 < 1.
        let matching = separation(&f, &g, ConvexWitness::new(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]));
        matching.verify().unwrap();
        assert_eq!(matching.expectation_dominating(), q(3, 4));
        assert_eq!(matching.expectation_dominated(), q(1, 1));
        assert!(!mps_check_binary(&f, &g).unwrap().holds());
        assert!(mps_check(&g, &f).unwrap().holds());
    }

    #[test]
    fn unequal_means_fail_with_linear_witness() {
        let f = PosteriorDistribution::point_mass(b(1, 3));
        let g = PosteriorDistribution::point_mass(b(1, 2));
        for out in [mps_check(&f, &g).unwrap(), mps_check_binary(&f, &g).unwrap()] {
            let sep = out.separation().unwrap();
            assert_eq!(sep.witness.pieces.len(), 1);
            sep.verify().unwrap();
        }
    }

    #[test]
    fn dimension_errors() {
        let two = PosteriorDistribution::point_mass(BeliefVector::uniform(2));
        let three = PosteriorDistribution::point_mass(BeliefVector::uniform(3));
        assert_eq!(mps_check(&two, &three), Err(OrderError::DimensionMismatch(2, 3)));
        assert_eq!(mps_check_binary(&three, &three), Err(OrderError::WrongDimension(3)));
    }

    #[test]
    fn three_state_example() {
        let n = 3;
        let g = PosteriorDistribution::point_mass(BeliefVector::uniform(n));
        let f = dist(&[
            (BeliefVector::vertex(3, 0), q(1, 3)),
            (BeliefVector::vertex(3, 1), q(1, 3)),
            (BeliefVector::vertex(3, 2), q(1, 3)),
        ]);
        assert!(mps_check(&f, &g).unwrap().holds());
        let out = mps_check(&g, &f).unwrap();
        out.verify().unwrap();
        assert!(!out.holds());
        assert!(mps_check_exact(&f, &g).unwrap().holds());
        assert!(!mps_check_exact(&g, &f).unwrap().holds());
    }

    #[test]
    fn fosd_examples() {
        let h = lottery(3, &[(1, q(1, 2)), (3, q(1, 2))]);
        let p = lottery(3, &[(2, q(1, 1))]);
        assert!(fosd_check(&h, &h).unwrap());
        assert!(fosd_check(&lottery(3, &[(1, q(1, 1))]), &lottery(3, &[(3, q(1, 1))])).unwrap());
        assert!(!fosd_check(&h, &p).unwrap());
        assert!(!fosd_check(&p, &h).unwrap());
        assert_eq!(fosd_check(&h, &lottery(4, &[(1, q(1, 1))])), Err(OrderError::HorizonMismatch(3, 4)));
    }

    #[test]
    fn sosd_examples() {
        let h = lottery(3, &[(1, q(1, 2)), (3, q(1, 2))]);
        let p = lottery(3, &[(2, q(1, 1))]);
        assert!(sosd_check(&h, &h).unwrap());
        assert!(sosd_check(&h, &p).unwrap());
        assert!(!sosd_check(&p, &h).unwrap());
        assert!(sosd_check(&h, &lottery(2, &[(1, q(1, 1))])).is_err());
    }

    #[test]
    fn apply_splitting_examples() {
        let p = FinitePmf::point_mass(2usize);
        let s = BinarySplitting::new(1, 2, 3, q(1, 2), q(1, 2)).unwrap();
        let h = apply_splitting(&p, &s).unwrap();
        assert_eq!(h, FinitePmf::new(vec![(1, q(1, 2)), (3, q(1, 2))]).unwrap());
        assert_eq!(h.expectation(|&t| Rational::from(t)), q(2, 1));

        assert!(matches!(BinarySplitting::new(1, 2, 3, q(0, 1), q(0, 1)), Err(OrderError::InvalidSplit(_))));
        assert!(matches!(BinarySplitting::new(2, 1, 3, q(1, 2), q(1, 2)), Err(OrderError::InvalidSplit(_))));
        assert!(matches!(BinarySplitting::new(1, 2, 4, q(1, 2), q(1, 2)), Err(OrderError::InvalidSplit(_))));
        assert!(matches!(apply_splitting(&h, &s), Err(OrderError::InsufficientMass { time: 2, .. })));
    }

    #[test]
    fn decompose_examples() {
        let p = FinitePmf::point_mass(2usize);
        assert_eq!(decompose_splittings(&p, &p).unwrap(), vec![]);

        let h = FinitePmf::new(vec![(1, q(1, 2)), (3, q(1, 2))]).unwrap();
        assert_eq!(
            decompose_splittings(&p, &h).unwrap(),
            vec![BinarySplitting::new(1, 2, 3, q(1, 2), q(1, 2)).unwrap()]
        );

        let off_mean = FinitePmf::new(vec![(1, q(1, 4)), (2, q(1, 2)), (4, q(1, 4))]).unwrap();
        assert_eq!(decompose_splittings(&p, &off_mean), Err(OrderError::NotAnMps));
        assert_eq!(decompose_splittings(&h, &p), Err(OrderError::NotAnMps));
    }

    #[test]
    fn decompose_needs_wide_splits() {
        // Point mass at 3 spread to {1, 5}: unit-width splits cannot do this
        // without passing through intermediate mass.
        let p = FinitePmf::point_mass(3usize);
        let h = FinitePmf::new(vec![(1, q(1, 2)), (5, q(1, 2))]).unwrap();
        let splits = decompose_splittings(&p, &h).unwrap();
        let mut cur = p.clone();
        for s in &splits {
            cur = apply_splitting(&cur, s).unwrap();
        }
        assert_eq!(cur, h);
    }

    #[test]
    fn weighted_mixture_examples() {
        let mu = b(1, 2);
        let f1 = PosteriorDistribution::point_mass(mu.clone());
        let f2 = revealed();
        let lambda = FinitePmf::new(vec![(1, q(2, 3)), (2, q(1, 3))]).unwrap();
        let mix = weighted_mixture(&[f1.clone(), f2.clone()], &lambda).unwrap();
        assert_eq!(mix, dist(&[(mu.clone(), q(2, 3)), (b(1, 1), q(1, 6)), (b(0, 1), q(1, 6))]));
        assert_eq!(mix.barycenter(), mu);

        assert_eq!(weighted_mixture(&[f2.clone(), f2.clone()], &lambda).unwrap(), f2);
        assert_eq!(weighted_mixture(&[f1.clone(), f2.clone()], &FinitePmf::point_mass(2)).unwrap(), f2);
        assert_eq!(weighted_mixture(&[f1], &lambda), Err(OrderError::LengthMismatch { period: 2, available: 1 }));
    }

    #[test]
    fn tampered_coupling_is_rejected() {
        let g = PosteriorDistribution::point_mass(b(1, 2));
        let mut coupling = mps_check(&revealed(), &g).unwrap().coupling().unwrap().clone();
        coupling.kernel[0] = vec![q(1, 4), q(3, 4)];
        assert!(matches!(coupling.verify(), Err(CertificateError::Mean { .. })));
        coupling.kernel[0] = vec![q(1, 2), q(1, 4)];
        assert!(matches!(coupling.verify(), Err(CertificateError::RowSum { .. })));
    }

    #[test]
    fn witness_normalization_preserves_separation() {
        let w = ConvexWitness::new(vec![vec![q(3, 2), q(1, 2)], vec![q(1, 2), q(3, 2)], vec![q(1, 2), q(3, 2)]]);
        assert_eq!(w.normalized().pieces, vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]);
    }
}
