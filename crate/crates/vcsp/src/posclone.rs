//! Positive-clone membership, positive clones, and the LP search for
//! idempotent cyclic weighted polymorphisms.
//!
//! Membership of an operation f in the positive clone at its arity is an
//! exact rational LP over weights on the polymorphisms: weights sum to
//! zero, non-projections stay nonnegative, every feasible tuple list yields
//! an improvement inequality, and f's weight is pushed to at least one.
//! The LP is solved by column generation: only a few weight variables are
//! materialized, and an infeasibility certificate either prices in a new
//! column or proves the full system infeasible.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::budget::Budget;
use crate::error::Error;
use crate::lang::{all_tuples, CostFunction, Language, Operation};
use crate::lp::{solve_farkas, FarkasCertificate, FarkasOutcome, LinearSystem};
use crate::poly::{enumerate_polymorphisms, OperationSet};
use crate::rational::ExtendedRational;
use crate::weighting::Weighting;

/// The shared LP skeleton at one arity: the polymorphisms (columns) and the
/// deduplicated improvement rows (one per feasible tuple list that matters).
pub(crate) struct ImprovementRows {
    pub ops: Vec<Operation>,
    pub is_projection: Vec<bool>,
    /// rows[j][g] is minus the cost of op g's image at list j, the
    /// coefficient of weight g in improvement row j.
    pub rows: Vec<Vec<BigRational>>,
}

pub(crate) fn improvement_rows(
    language: &Language,
    arity: usize,
    budget: &Budget,
) -> Result<ImprovementRows, Error> {
    let pol = enumerate_polymorphisms(language, arity, budget)?;
    let ops: Vec<Operation> = pol.iter().cloned().collect();
    let is_projection: Vec<bool> = ops.iter().map(|op| op.is_projection()).collect();

    let mut functions: Vec<(&str, &CostFunction)> = language.functions().collect();
    functions.sort_by_key(|(name, _)| *name);

    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut seen: HashSet<Vec<BigRational>> = HashSet::new();
    for (name, f) in functions {
        if f.is_crisp() {
            // Feasible images cost zero under every polymorphism, so every
            // row would be all zeros.
            continue;
        }
        let feas = f.feas();
        for list in all_tuples(feas.len(), arity) {
            let tuples: Vec<&[usize]> = list.iter().map(|&i| feas[i].as_slice()).collect();
            let mut row = Vec::with_capacity(ops.len());
            for g in &ops {
                let image = g.apply_tuples(&tuples);
                match f.value(&image) {
                    ExtendedRational::Finite(v) => row.push(-v.clone()),
                    ExtendedRational::Infinite => {
                        return Err(Error::Internal(format!(
                            "polymorphism escaped feasibility of {name}"
                        )))
                    }
                }
            }
            if row.iter().all(|c| c.is_zero()) {
                continue;
            }
            if seen.insert(row.clone()) {
                Budget::check("lp rows", rows.len() as u128 + 1, budget.lp_rows)?;
                rows.push(row);

            }
        }
    }
    Ok(ImprovementRows {
        ops,
        is_projection,
        rows,

    })
}

// Column layout for a membership system over the ops listed in `active`:
// projections get a sign-split pair of nonnegative columns, everything else
// one nonnegative column.
fn membership_system(imp: &ImprovementRows, target: usize, active: &[usize]) -> LinearSystem {
    let mut width = 0;
    let cols: Vec<(usize, usize)> = active
        .iter()
        .map(|&g| {
            let at = width;
            width += if imp.is_projection[g] { 2 } else { 1 };
            (g, at)
        })
        .collect();
    let mut system = LinearSystem::new(width, false);
    for row in &imp.rows {
        let mut coeffs = vec![BigRational::zero(); width];
        for &(g, at) in &cols {
            coeffs[at] = row[g].clone();
            if imp.is_projection[g] {
                coeffs[at + 1] = -row[g].clone();
            }
        }
        system.push_geq(coeffs, BigRational::zero());
    }
    let mut sum = vec![BigRational::zero(); width];
    for &(g, at) in &cols {
        sum[at] = BigRational::one();
        if imp.is_projection[g] {
            sum[at + 1] = -BigRational::one();
        }
    }
    system.push_eq(sum, BigRational::zero());
    let mut goal = vec![BigRational::zero(); width];
    let at = cols
        .iter()
        .find_map(|&(g, at)| (g == target).then_some(at))
        .expect("target is active");
    goal[at] = BigRational::one();
    system.push_geq(goal, BigRational::one());
    system
}

/// Outcome of a positive-clone membership query.
#[derive(Debug, Clone)]
pub struct Membership {
    pub is_member: bool,
    /// A weighted polymorphism putting positive weight on the queried
    /// operation; absent for projections, which are members by definition.
    pub witness: Option<Weighting>,
    /// Infeasibility certificate for the full membership system when the
    /// operation is not a member.
    pub certificate: Option<FarkasCertificate>,
}

fn membership_query(
    language: &Language,
    imp: &ImprovementRows,
    target: usize,
) -> Result<Membership, Error> {
    if imp.is_projection[target] {
        return Ok(Membership {
            is_member: true,
            witness: None,
            certificate: None,
        });
    }
    let mut active: Vec<usize> = (0..imp.ops.len())
        .filter(|&g| imp.is_projection[g] || g == target)
        .collect();
    loop {
        let system = membership_system(imp, target, &active);
        match solve_farkas(&system) {
            FarkasOutcome::Solution { assignment, .. } => {
                let mut entries = Vec::new();
                let mut at = 0;
                for &g in &active {
                    let w = if imp.is_projection[g] {
                        let w = &assignment[at] - &assignment[at + 1];
                        at += 2;
                        w
                    } else {
                        let w = assignment[at].clone();
                        at += 1;
                        w
                    };
                    if !w.is_zero() {
                        entries.push((imp.ops[g].clone(), w));
                    }
                }
                let witness = Weighting::from_entries(
                    imp.ops[target].domain_size,
                    imp.ops[target].arity,
                    entries,
                )?
                .normalized();
                debug_assert!(
                    crate::weighting::is_weighted_polymorphism(&witness, language)?.holds()
                );
                debug_assert!(witness.weight_of(&imp.ops[target]).is_positive());
                return Ok(Membership {
                    is_member: true,
                    witness: Some(witness),
                    certificate: None,
                });
            }
            FarkasOutcome::Infeasible(certificate) => {
                let y = &certificate.row_multipliers;
                let y_sum = &y[imp.rows.len()];
                let mut added = false;
                for g in 0..imp.ops.len() {
                    if imp.is_projection[g] || active.contains(&g) {
                        continue;
                    }
                    let mut price = y_sum.clone();
                    for (j, row) in imp.rows.iter().enumerate() {
                        if !y[j].is_zero() && !row[g].is_zero() {
                            price += &y[j] * &row[g];
                        }
                    }
                    if price.is_positive() {
                        active.push(g);
                        added = true;
                    }
                }
                if !added {
                    return Ok(Membership {
                        is_member: false,
                        witness: None,
                        certificate: Some(certificate),
                    });
                }
                active.sort_unstable();
            }
        }
    }
}

/// Decides whether some weighted polymorphism of the language gives `f`
/// positive weight.  Projections are members by definition.
pub fn pol_plus_membership(
    language: &Language,
    f: &Operation,
    budget: &Budget,
) -> Result<Membership, Error> {
    let imp = improvement_rows(language, f.arity, budget)?;
    let target = imp
        .ops
        .binary_search_by(|probe| probe.table.cmp(&f.table))
        .map_err(|_| Error::NotAPolymorphism {
            function: format!("arity {} table {:?}", f.arity, f.table),
        })?;
    membership_query(language, &imp, target)
}

/// Rebuilds the membership system with every polymorphism's column, for
/// checking stored certificates without re-running the search.
pub fn verify_non_membership(
    language: &Language,
    f: &Operation,
    certificate: &FarkasCertificate,
    budget: &Budget,
) -> Result<bool, Error> {
    let imp = improvement_rows(language, f.arity, budget)?;
    let target = imp
        .ops
        .binary_search_by(|probe| probe.table.cmp(&f.table))
        .map_err(|_| Error::NotAPolymorphism {
            function: format!("arity {} table {:?}", f.arity, f.table),
        })?;
    let all: Vec<usize> = (0..imp.ops.len()).collect();
    let system = membership_system(&imp, target, &all);
    Ok(certificate.verify(&system))
}

/// The m-ary part of the positive clone: projections plus every
/// polymorphism some weighted polymorphism weights positively.
pub fn positive_clone(
    language: &Language,
    arity: usize,
    budget: &Budget,
) -> Result<OperationSet, Error> {
    let imp = improvement_rows(language, arity, budget)?;
    let mut members = Vec::new();
    for g in 0..imp.ops.len() {
        if membership_query(language, &imp, g)?.is_member {
            members.push(imp.ops[g].clone());
        }
    }
    OperationSet::new(language.domain.size, arity, members)
}

/// Result of the cyclic search: either a weighting supported on idempotent
/// cyclic operations, or the certificate that none exists (omitted when
/// there were no candidate operations at all).
#[derive(Debug, Clone)]
pub struct CyclicSearch {
    pub weighting: Option<Weighting>,
    pub certificate: Option<FarkasCertificate>,
    pub candidates: Vec<Operation>,
}

fn cyclic_system(imp: &ImprovementRows, candidates: &[usize], projections: &[usize]) -> LinearSystem {
    let width = candidates.len() + projections.len();
    let mut system = LinearSystem::new(width, false);
    for row in &imp.rows {
        let mut coeffs = Vec::with_capacity(width);
        coeffs.extend(candidates.iter().map(|&g| row[g].clone()));
        // A projection's weight variable is negated so it stays nonpositive.
        coeffs.extend(projections.iter().map(|&p| -row[p].clone()));
        system.push_geq(coeffs, BigRational::zero());
    }
    let mut balance = Vec::with_capacity(width);
    balance.extend(candidates.iter().map(|_| BigRational::one()));
    balance.extend(projections.iter().map(|_| -BigRational::one()));
    system.push_eq(balance, BigRational::zero());
    let mut unit = vec![BigRational::zero(); width];
    for c in unit.iter_mut().take(candidates.len()) {
        *c = BigRational::one();
    }
    system.push_eq(unit, BigRational::one());
    system
}

/// Searches for a weighted polymorphism whose support consists of
/// idempotent cyclic operations (projections carry the negative mass; at
/// arity one nothing qualifies).
pub fn cyclic_search(
    language: &Language,
    arity: usize,
    budget: &Budget,
) -> Result<CyclicSearch, Error> {
    let imp = improvement_rows(language, arity, budget)?;
    let candidates: Vec<usize> = (0..imp.ops.len())
        .filter(|&g| {
            !imp.is_projection[g] && imp.ops[g].is_idempotent() && imp.ops[g].is_cyclic()
        })
        .collect();
    let candidate_ops: Vec<Operation> = candidates.iter().map(|&g| imp.ops[g].clone()).collect();
    if candidates.is_empty() {
        return Ok(CyclicSearch {
            weighting: None,
            certificate: None,
            candidates: candidate_ops,
        });
    }
    let projections: Vec<usize> = (0..imp.ops.len())
        .filter(|&g| imp.is_projection[g])
        .collect();
    let system = cyclic_system(&imp, &candidates, &projections);
    match solve_farkas(&system) {
        FarkasOutcome::Solution { assignment, .. } => {
            let mut entries = Vec::new();
            for (i, &g) in candidates.iter().enumerate() {
                if !assignment[i].is_zero() {
                    entries.push((imp.ops[g].clone(), assignment[i].clone()));
                }
            }
            for (i, &p) in projections.iter().enumerate() {
                let w = &assignment[candidates.len() + i];
                if !w.is_zero() {
                    entries.push((imp.ops[p].clone(), -w));
                }
            }
            let weighting =
                Weighting::from_entries(language.domain.size, arity, entries)?.normalized();
            debug_assert!(
                crate::weighting::is_weighted_polymorphism(&weighting, language)?.holds()
            );
            Ok(CyclicSearch {
                weighting: Some(weighting),
                certificate: None,
                candidates: candidate_ops,
            })
        }
        FarkasOutcome::Infeasible(certificate) => Ok(CyclicSearch {
            weighting: None,
            certificate: Some(certificate),
            candidates: candidate_ops,
        }),
    }
}

/// Convenience wrapper returning just the weighting, if any exists.
pub fn find_cyclic_wpol(
    language: &Language,
    arity: usize,
    budget: &Budget,
) -> Result<Option<Weighting>, Error> {
    Ok(cyclic_search(language, arity, budget)?.weighting)
}

/// Checks a stored no-cyclic-weighting certificate against the rebuilt
/// system.
pub fn verify_cyclic_absence(
    language: &Language,
    arity: usize,
    certificate: &FarkasCertificate,
    budget: &Budget,
) -> Result<bool, Error> {
    let imp = improvement_rows(language, arity, budget)?;
    let candidates: Vec<usize> = (0..imp.ops.len())
        .filter(|&g| {
            !imp.is_projection[g] && imp.ops[g].is_idempotent() && imp.ops[g].is_cyclic()
        })
        .collect();
    if candidates.is_empty() {
        return Ok(true);
    }
    let projections: Vec<usize> = (0..imp.ops.len())
        .filter(|&g| imp.is_projection[g])
        .collect();
    let system = cyclic_system(&imp, &candidates, &projections);
    Ok(certificate.verify(&system))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Language;

    fn op(arity: usize, table: &[usize]) -> Operation {
        Operation::new(2, arity, table.to_vec()).unwrap()
    }

    fn lang(entries: &[(&str, usize, &[&str])]) -> Language {
        let mut l = Language::new(2);
        for (name, arity, values) in entries {
            l.add(*name, CostFunction::from_strs(2, *arity, values).unwrap())
                .unwrap();
        }
        l
    }

    fn xor_lang() -> Language {
        lang(&[("xor", 2, &["1", "0", "0", "1"])])
    }

    #[test]
    fn inversion_is_positively_weighted_for_xor() {
        let m = pol_plus_membership(&xor_lang(), &op(1, &[1, 0]), &Budget::default()).unwrap();
        assert!(m.is_member);
        let w = m.witness.unwrap();
        assert!(w.weight_of(&op(1, &[1, 0])).is_positive());
    }

    #[test]
    fn constants_are_not_positively_weighted_for_xor() {
        let budget = Budget::default();
        let m = pol_plus_membership(&xor_lang(), &op(1, &[0, 0]), &budget).unwrap();
        assert!(!m.is_member);
        let cert = m.certificate.unwrap();
        assert!(verify_non_membership(&xor_lang(), &op(1, &[0, 0]), &cert, &budget).unwrap());
    }

    #[test]
    fn projections_are_members_by_definition() {
        let m = pol_plus_membership(&xor_lang(), &Operation::identity(2), &Budget::default())
            .unwrap();
        assert!(m.is_member);
        assert!(m.witness.is_none());
    }

    #[test]
    fn non_polymorphisms_are_rejected() {
        let pins = lang(&[("n0", 1, &["0", "inf"]), ("n1", 1, &["inf", "0"])]);
        let err = pol_plus_membership(&pins, &op(1, &[1, 0]), &Budget::default());
        assert!(matches!(err, Err(Error::NotAPolymorphism { .. })));
    }

    #[test]
    fn positive_clone_examples() {
        let budget = Budget::default();

        let pins = lang(&[("n0", 1, &["0", "inf"]), ("n1", 1, &["inf", "0"])]);
        let p1 = positive_clone(&pins, 1, &budget).unwrap();
        assert_eq!(p1.len(), 1);
        assert!(p1.contains(&Operation::identity(2)));

        let px = positive_clone(&xor_lang(), 1, &budget).unwrap();
        assert_eq!(px.len(), 2);
        assert!(px.contains(&Operation::identity(2)));
        assert!(px.contains(&op(1, &[1, 0])));

        let neq = lang(&[("neq", 2, &["0", "1", "1", "0"])]);
        let p2 = positive_clone(&neq, 2, &budget).unwrap();
        for table in [[0, 0, 0, 1], [0, 1, 1, 1], [0, 0, 1, 1], [0, 1, 0, 1]] {
            assert!(p2.contains(&op(2, &table)));
        }

        // Crisp languages: improvement sums are identically zero, so the
        // whole polymorphism set is positively weighted.
        let crisp = lang(&[("n0", 1, &["0", "inf"])]);
        let pol = enumerate_polymorphisms(&crisp, 2, &budget).unwrap();
        assert_eq!(positive_clone(&crisp, 2, &budget).unwrap(), pol);
    }

    #[test]
    fn cyclic_search_branches() {
        let budget = Budget::default();

        let neq_c = lang(&[
            ("neq", 2, &["0", "1", "1", "0"]),
            ("n0", 1, &["0", "inf"]),
            ("n1", 1, &["inf", "0"]),
        ]);
        let found = cyclic_search(&neq_c, 2, &budget).unwrap();
        let w = found.weighting.expect("min/max weighting exists");
        let min = op(2, &[0, 0, 0, 1]);
        let max = op(2, &[0, 1, 1, 1]);
        for s in w.support() {
            assert!(s == &min || s == &max);
            assert!(s.is_idempotent() && s.is_cyclic());
        }

        let xor_c = lang(&[
            ("xor", 2, &["1", "0", "0", "1"]),
            ("n0", 1, &["0", "inf"]),
            ("n1", 1, &["inf", "0"]),
        ]);
        let none = cyclic_search(&xor_c, 2, &budget).unwrap();
        assert!(none.weighting.is_none());
        let cert = none.certificate.expect("candidates existed");
        assert!(verify_cyclic_absence(&xor_c, 2, &cert, &budget).unwrap());

        // A free language: any idempotent cyclic operation works.
        let free = lang(&[("zero", 1, &["0", "0"])]);
        let easy = find_cyclic_wpol(&free, 2, &budget).unwrap();
        assert!(easy.is_some());

        // At arity one only the identity is idempotent, and it is a
        // projection, so there are no candidates.
        let at_one = cyclic_search(&free, 1, &budget).unwrap();
        assert!(at_one.weighting.is_none());
        assert!(at_one.certificate.is_none());
        assert!(at_one.candidates.is_empty());
    }
}
