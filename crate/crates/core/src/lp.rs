//! Phase-one simplex for feasibility of `A x = b, x ≥ 0`.
//!
//! The solver is generic over [`Scalar`] so the same tableau code runs on
//! exact rationals (Bland's rule, guaranteed termination) and on `f64` (used
//! only to screen for a candidate support or multiplier vector that is then
//! re-derived and checked exactly by the caller).
//!
//! When the system is infeasible the solver returns Farkas multipliers `w`
//! with `wᵀA ≥ 0` and `wᵀb < 0`, read off the artificial columns of the
//! final phase-one tableau.

use std::fmt::Debug;

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

pub trait Scalar: Clone + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn sign(&self) -> Sign;
    fn less_than(&self, other: &Self) -> bool;
    /// Snap round-off to zero after a pivot; exact scalars leave values alone.
    fn clean(self) -> Self {
        self
    }

    fn is_zero(&self) -> bool {
        self.sign() == Sign::Zero
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sign(&self) -> Sign {
        if self.is_positive() {
            Sign::Positive
        } else if self.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
    fn less_than(&self, other: &Self) -> bool {
        self < other
    }
}

const F64_EPS: f64 = 1e-9;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sign(&self) -> Sign {
        if *self > F64_EPS {
            Sign::Positive
        } else if *self < -F64_EPS {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
    fn less_than(&self, other: &Self) -> bool {
        self < other
    }
    fn clean(self) -> Self {
        if self.abs() < 1e-13 {
            0.0
        } else {
            self
        }
    }
}

/// Sparse equality system `A x = b` over exact rationals.
#[derive(Debug, Clone, Default)]
pub struct EqualitySystem {
    num_vars: usize,
    rows: Vec<Vec<(usize, Rational)>>,
    rhs: Vec<Rational>,
}

impl EqualitySystem {
    pub fn new(num_vars: usize) -> Self {
        EqualitySystem { num_vars, rows: Vec::new(), rhs: Vec::new() }
    }

    /// Adds `Σ coef·x_var = rhs`; zero coefficients are dropped.
    pub fn add_row(&mut self, coefficients: Vec<(usize, Rational)>, rhs: Rational) {
        debug_assert!(coefficients.iter().all(|(j, _)| *j < self.num_vars));
        let row = coefficients.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, Rational)>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    /// True when `x ≥ 0` and `A x = b` hold exactly.
    pub fn is_solution(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self
                .rows
                .iter()
                .zip(&self.rhs)
                .all(|(row, b)| row.iter().map(|(j, c)| c * &x[*j]).sum::<Rational>() == *b)
    }

    /// `wᵀA` as a dense vector.
    pub fn combine_rows(&self, w: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.num_vars];
        for (row, wi) in self.rows.iter().zip(w) {
            if wi.is_zero() {
                continue;
            }
            for (j, c) in row {
                out[*j] += wi * c;
            }
        }
        out
    }

    /// True when `wᵀA ≥ 0` and `wᵀb < 0`, which proves infeasibility.
    pub fn is_farkas_certificate(&self, w: &[Rational]) -> bool {
        w.len() == self.rows.len()
            && self.combine_rows(w).iter().all(|v| !v.is_negative())
            && w.iter().zip(&self.rhs).map(|(a, b)| a * b).sum::<Rational>().is_negative()
    }

    /// Solves `A x = b` exactly using only the columns in `support`, other
    /// variables fixed at zero. Free columns within the support are set to
    /// zero. Returns `None` when the restricted system is inconsistent.
    pub fn solve_on_support(&self, support: &[usize]) -> Option<Vec<Rational>> {
        let k = support.len();
        let mut position = vec![usize::MAX; self.num_vars];
        for (p, &j) in support.iter().enumerate() {
            position[j] = p;
        }
        let mut matrix: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let mut dense = vec![Rational::zero(); k + 1];
                for (j, c) in row {
                    if position[*j] != usize::MAX {
                        dense[position[*j]] = c.clone();
                    }
                }
                dense[k] = b.clone();
                dense
            })
            .collect();

        let mut pivot_cols = Vec::new();
        let mut rank = 0;
        for col in 0..k {
            let Some(p) = (rank..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else {
                continue;
            };
            matrix.swap(rank, p);
            let inv = matrix[rank][col].recip();
            let pivot_row: Vec<Rational> = matrix[rank].iter().map(|v| v * &inv).collect();
            let nonzero: Vec<usize> = (col..=k).filter(|&c| !pivot_row[c].is_zero()).collect();
            for (r, row) in matrix.iter_mut().enumerate() {
                if r == rank || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for &c in &nonzero {
                    let delta = &factor * &pivot_row[c];
                    row[c] -= delta;
                }
            }
            matrix[rank] = pivot_row;
            pivot_cols.push(col);
            rank += 1;
        }
        if matrix[rank..].iter().any(|row| !row[k].is_zero()) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.num_vars];
        for (r, &col) in pivot_cols.iter().enumerate() {
            x[support[col]] = matrix[r][k].clone();
        }
        Some(x)
    }
}

/// Outcome of phase one.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility<S> {
    /// A nonnegative solution of `A x = b`.
    Feasible(Vec<S>),
    /// Multipliers `w` with `wᵀA ≥ 0` and `wᵀb < 0`.
    Infeasible(Vec<S>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest-index entering and leaving variables; never cycles.
    Bland,
    /// Most negative reduced cost, falling back to Bland after `limit` pivots.
    Dantzig { limit: usize },
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    objective: Vec<S>,
    basis: Vec<usize>,
    width: usize,
}

impl<S: Scalar> Tableau<S> {
    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = S::one().div(&self.rows[r][c]);
        let pivot_row: Vec<S> = self.rows[r].iter().map(|v| v.mul(&inv).clean()).collect();
        let nonzero: Vec<usize> = (0..self.width).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<S>| {
            if row[c].is_zero() {
                row[c] = S::zero();
                return;
            }
            let factor = row[c].clone();
            for &j in &nonzero {
                row[j] = row[j].sub(&factor.mul(&pivot_row[j])).clean();
            }
            row[c] = S::zero();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.objective);
        self.rows[r] = pivot_row;
        self.rows[r][c] = S::one();
        self.basis[r] = c;
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let candidates = (0..self.rhs_col()).filter(|&j| self.objective[j].sign() == Sign::Negative);
        if bland {
            candidates.into_iter().next()
        } else {
            candidates.min_by(|&a, &b| self.objective[a].partial_cmp_scalar(&self.objective[b]))
        }
    }

    fn leaving(&self, c: usize) -> Option<usize> {
        let rhs = self.rhs_col();
        let mut best: Option<(usize, S)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if row[c].sign() != Sign::Positive {
                continue;
            }
            let ratio = row[rhs].div(&row[c]);
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio.less_than(&br) || (!br.less_than(&ratio) && self.basis[i] < self.basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }
}

trait ScalarOrd {
    fn partial_cmp_scalar(&self, other: &Self) -> std::cmp::Ordering;
}

impl<S: Scalar> ScalarOrd for S {
    fn partial_cmp_scalar(&self, other: &Self) -> std::cmp::Ordering {
        if self.less_than(other) {
            std::cmp::Ordering::Less
        } else if other.less_than(self) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    }
}

/// Runs phase one on `system`, in the scalar type `S`.
pub fn phase_one<S: Scalar>(system: &EqualitySystem, rule: PivotRule) -> Feasibility<S> {
    let m = system.num_rows();
    let n = system.num_vars();
    let width = n + m + 1;

    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    for (i, (row, b)) in system.rows.iter().zip(&system.rhs).enumerate() {
        let flip = b.is_negative();
        signs.push(flip);
        let mut dense = vec![S::zero(); width];
        for (j, c) in row {
            let v = S::from_rational(c);
            dense[*j] = if flip { v.neg() } else { v };
        }
        dense[n + i] = S::one();
        let bv = S::from_rational(b);
        dense[width - 1] = if flip { bv.neg() } else { bv };
        rows.push(dense);
    }
    let mut objective = vec![S::zero(); width];
    for d in &mut objective[n..n + m] {
        *d = S::one();
    }
    for row in &rows {
        for (d, v) in objective.iter_mut().zip(row) {
            *d = d.sub(v);
        }
    }
    let mut tableau = Tableau { rows, objective, basis: (n..n + m).collect(), width };

    let mut pivots = 0usize;
    loop {
        let bland = match rule {
            PivotRule::Bland => true,
            PivotRule::Dantzig { limit } => pivots >= limit,
        };
        let Some(c) = tableau.entering(bland) else { break };
        let Some(r) = tableau.leaving(c) else {
            // Phase-one objective is bounded below by zero, so a missing
            // leaving row can only come from round-off in the float path.
            break;
        };
        tableau.pivot(r, c);
        pivots += 1;
    }

    // objective[rhs] holds minus the current sum of artificials.
    let infeasibility = tableau.objective[width - 1].neg();
    if infeasibility.sign() == Sign::Positive {
        let multipliers = (0..m)
            .map(|i| {
                let y = S::one().sub(&tableau.objective[n + i]);
                // Undo the row flip and negate: w = -diag(s)·y.
                if signs[i] {
                    y
                } else {
                    y.neg()
                }
            })
            .collect();
        Feasibility::Infeasible(multipliers)
    } else {
        let mut x = vec![S::zero(); n];
        for (i, &j) in tableau.basis.iter().enumerate() {
            if j < n {
                x[j] = tableau.rows[i][width - 1].clone();
            }
        }
        Feasibility::Feasible(x)
    }
}
