//! Exact linear feasibility over the rationals.
//!
//! A [`LinearSystem`] asks for nonnegative `z_1..z_n` (and optionally one
//! shared free constant `C`) satisfying rows of the form
//!
//! ```text
//!     sum_i a_ij * z_i  >=  b_j + C      (Geq)
//!     sum_i a_ij * z_i   =  b_j + C      (Eq)
//! ```
//!
//! [`solve_farkas`] returns either a solution or a [`FarkasCertificate`]: row
//! multipliers `y` proving infeasibility by exact substitution.  Exactly one
//! branch holds for every system.  The solver is a dense phase-one simplex
//! with Bland's rule, so it terminates and is deterministic; the certificate
//! is the dual vector of the optimal phase-one tableau.
//!
//! Infinities never appear here: callers strip or reject them before a system
//! is built.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::serde_rational_vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowKind {
    Geq,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
    pub kind: RowKind,
}

#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub rows: Vec<Row>,
    /// When set, every row carries the shared free constant `C` on its
    /// right-hand side; otherwise `C` is fixed to zero.
    pub has_free_constant: bool,
}

impl LinearSystem {
    pub fn new(num_vars: usize, has_free_constant: bool) -> Self {
        LinearSystem {
            num_vars,
            rows: Vec::new(),
            has_free_constant,
        }
    }

    pub fn push(&mut self, kind: RowKind, coeffs: Vec<BigRational>, rhs: BigRational) {
        assert_eq!(coeffs.len(), self.num_vars, "row width mismatch");
        self.rows.push(Row { coeffs, rhs, kind });
    }

    pub fn push_geq(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) {
        self.push(RowKind::Geq, coeffs, rhs);
    }

    pub fn push_eq(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) {
        self.push(RowKind::Eq, coeffs, rhs);
    }

    /// Exact check that `(assignment, constant)` satisfies every row and all
    /// nonnegativity bounds.
    pub fn check_solution(&self, assignment: &[BigRational], constant: &BigRational) -> bool {
        if assignment.len() != self.num_vars {
            return false;
        }
        if assignment.iter().any(|z| z.is_negative()) {
            return false;
        }
        if !self.has_free_constant && !constant.is_zero() {
            return false;
        }
        self.rows.iter().all(|row| {
            let lhs: BigRational = row
                .coeffs
                .iter()
                .zip(assignment)
                .map(|(a, z)| a * z)
                .sum();
            let rhs = &row.rhs + constant;
            match row.kind {
                RowKind::Geq => lhs >= rhs,
                RowKind::Eq => lhs == rhs,
            }
        })
    }
}

/// Row multipliers refuting a system.
///
/// Verified conditions: `y_j >= 0` on every `Geq` row; `sum_j y_j a_ij <= 0`
/// for every variable `i`; `sum_j y_j = 0` whenever the system carries the
/// free constant (that sum is the constant's own column condition); and
/// `sum_j y_j b_j > 0`.  Together these rule out any solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    #[serde(with = "serde_rational_vec")]
    pub row_multipliers: Vec<BigRational>,
}

impl FarkasCertificate {
    pub fn verify(&self, system: &LinearSystem) -> bool {
        let y = &self.row_multipliers;
        if y.len() != system.rows.len() {
            return false;
        }
        for (yj, row) in y.iter().zip(&system.rows) {
            if row.kind == RowKind::Geq && yj.is_negative() {
                return false;
            }
        }
        for i in 0..system.num_vars {
            let s: BigRational = y
                .iter()
                .zip(&system.rows)
                .map(|(yj, row)| yj * &row.coeffs[i])
                .sum();
            if s.is_positive() {
                return false;
            }
        }
        if system.has_free_constant {
            let s: BigRational = y.iter().cloned().sum();
            if !s.is_zero() {
                return false;
            }
        }
        let payoff: BigRational = y
            .iter()
            .zip(&system.rows)
            .map(|(yj, row)| yj * &row.rhs)
            .sum();
        payoff.is_positive()
    }
}

#[derive(Debug, Clone)]
pub enum FarkasOutcome {
    Solution {
        assignment: Vec<BigRational>,
        constant: BigRational,
    },
    Infeasible(FarkasCertificate),
}

impl FarkasOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FarkasOutcome::Solution { .. })
    }
}

/// Decides the system, returning a solution or a verified certificate.
pub fn solve_farkas(system: &LinearSystem) -> FarkasOutcome {
    let n = system.num_vars;
    let n_const = if system.has_free_constant { 2 } else { 0 };
    let n_slack = system
        .rows
        .iter()
        .filter(|r| r.kind == RowKind::Geq)
        .count();
    let ncols = n + n_const + n_slack;

    // Standard form: A x = b with x >= 0.  Layout: z vars, then C = c+ - c-,
    // then one subtracted slack per Geq row.
    let mut a = Vec::with_capacity(system.rows.len());
    let mut b = Vec::with_capacity(system.rows.len());
    let mut slack_at = n + n_const;
    for row in &system.rows {
        let mut r = vec![BigRational::zero(); ncols];
        r[..n].clone_from_slice(&row.coeffs);
        if system.has_free_constant {
            r[n] = -BigRational::one();
            r[n + 1] = BigRational::one();
        }
        if row.kind == RowKind::Geq {
            r[slack_at] = -BigRational::one();
            slack_at += 1;
        }
        a.push(r);
        b.push(row.rhs.clone());
    }

    match phase_one(ncols, a, b) {
        PhaseOne::Feasible(x) => {
            let assignment = x[..n].to_vec();
            let constant = if system.has_free_constant {
                &x[n] - &x[n + 1]
            } else {
                BigRational::zero()
            };
            debug_assert!(system.check_solution(&assignment, &constant));
            FarkasOutcome::Solution {
                assignment,
                constant,
            }
        }
        PhaseOne::Infeasible(y) => {
            let cert = FarkasCertificate {
                row_multipliers: y,
            };
            debug_assert!(cert.verify(system));
            FarkasOutcome::Infeasible(cert)
        }
    }
}

#[derive(Debug, Clone)]
pub enum GordanOutcome {
    /// Nonzero nonnegative `z` with every row summing to zero.
    Combination(Vec<BigRational>),
    /// Row multipliers `y` with `sum_j y_j a_ij > 0` for every variable.
    Separation(Vec<BigRational>),
}

/// Decides the homogeneous alternative: rows must all be `Eq` with zero
/// right-hand side and no free constant.
pub fn solve_gordan(system: &LinearSystem) -> Result<GordanOutcome, Error> {
    if system.has_free_constant {
        return Err(Error::Internal(
            "gordan systems carry no free constant".into(),
        ));
    }
    for row in &system.rows {
        if row.kind != RowKind::Eq || !row.rhs.is_zero() {
            return Err(Error::Internal(
                "gordan systems need homogeneous equality rows".into(),
            ));
        }
    }
    // Nonzero is enforced by normalizing the combination to sum one.
    let mut augmented = LinearSystem::new(system.num_vars, false);
    for row in &system.rows {
        augmented.push_eq(row.coeffs.clone(), BigRational::zero());
    }
    augmented.push_eq(
        vec![BigRational::one(); system.num_vars],
        BigRational::one(),
    );
    match solve_farkas(&augmented) {
        FarkasOutcome::Solution { assignment, .. } => Ok(GordanOutcome::Combination(assignment)),
        FarkasOutcome::Infeasible(cert) => {
            let y = &cert.row_multipliers;
            // The sum row's multiplier is positive and bounds every column
            // sum away from zero, so the negated row part separates strictly.
            let sep: Vec<BigRational> = y[..system.rows.len()].iter().map(|v| -v).collect();
            debug_assert!((0..system.num_vars).all(|i| {
                let s: BigRational = sep
                    .iter()
                    .zip(&system.rows)
                    .map(|(yj, row)| yj * &row.coeffs[i])
                    .sum();
                s.is_positive()
            }));
            Ok(GordanOutcome::Separation(sep))
        }
    }
}

enum PhaseOne {
    Feasible(Vec<BigRational>),
    Infeasible(Vec<BigRational>),
}

/// Phase-one simplex on `A x = b`, `x >= 0`.  Returns a feasible point or the
/// dual vector of the optimal tableau, mapped back to the caller's row signs.
fn phase_one(n: usize, mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> PhaseOne {
    let m = a.len();
    if m == 0 {
        return PhaseOne::Feasible(vec![BigRational::zero(); n]);
    }
    debug_assert!(a.iter().all(|row| row.len() == n));

    let mut flipped = vec![false; m];
    for j in 0..m {
        if b[j].is_negative() {
            for v in a[j].iter_mut() {
                *v = -std::mem::take(v);
            }
            b[j] = -std::mem::take(&mut b[j]);
            flipped[j] = true;
        }
    }

    // Tableau columns: structural 0..n, artificial n..n+m, rhs at n+m.
    let width = n + m + 1;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for j in 0..m {
        let mut row = Vec::with_capacity(width);
        row.extend(a[j].iter().cloned());
        for k in 0..m {
            row.push(if k == j {
                BigRational::one()
            } else {
                BigRational::zero()
            });
        }
        row.push(b[j].clone());
        tab.push(row);
    }
    // Reduced costs for minimizing the artificial sum, with the objective
    // stored negated in the rhs slot.
    let mut zrow = vec![BigRational::zero(); width];
    for col in 0..width {
        let mut s = BigRational::zero();
        for row in tab.iter() {
            s += &row[col];
        }
        let c = if (n..n + m).contains(&col) {
            BigRational::one()
        } else {
            BigRational::zero()
        };
        zrow[col] = c - s;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Bland: lowest-index improving column.
    while let Some(enter) = (0..n + m).find(|&c| zrow[c].is_negative()) {
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for j in 0..m {
            if tab[j][enter].is_positive() {
                let ratio = &tab[j][width - 1] / &tab[j][enter];
                let better = match &best {
                    None => true,
                    Some(r) => {
                        ratio < *r || (ratio == *r && basis[j] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(j);
                }
            }
        }
        let Some(jl) = leave else {
            unreachable!("phase-one objective is bounded below");
        };

        let pivot = tab[jl][enter].clone();
        for v in tab[jl].iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        let pivot_row = tab[jl].clone();
        let eliminate = |row: &mut Vec<BigRational>| {
            let f = std::mem::replace(&mut row[enter], BigRational::zero());
            if f.is_zero() {
                return;
            }
            for (c, (v, p)) in row.iter_mut().zip(&pivot_row).enumerate() {
                if c != enter && !p.is_zero() {
                    *v -= &f * p;
                }
            }
        };
        for (j, row) in tab.iter_mut().enumerate() {
            if j != jl {
                eliminate(row);
            }
        }
        eliminate(&mut zrow);
        basis[jl] = enter;
    }

    let objective = -zrow[width - 1].clone();
    debug_assert!(!objective.is_negative());
    if objective.is_zero() {
        let mut x = vec![BigRational::zero(); n];
        for (j, &bi) in basis.iter().enumerate() {
            if bi < n {
                x[bi] = tab[j][width - 1].clone();
            }
        }
        PhaseOne::Feasible(x)
    } else {
        // y = c_B B^{-1}; with artificial costs one, y_j = 1 - zrow[art_j].
        let y: Vec<BigRational> = (0..m)
            .map(|j| {
                let v = BigRational::one() - &zrow[n + j];
                if flipped[j] {
                    -v
                } else {
                    v
                }
            })
            .collect();
        PhaseOne::Infeasible(y)
    }
}
