//! Indicator instances: gadgets over the tuples of `D^m` whose cost, read
//! as a function of an m-ary operation table, separates the positively
//! weighted polymorphisms from the rest.

use std::collections::HashSet;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;

use crate::budget::Budget;
use crate::cores::core_report;
use crate::error::Error;
use crate::instance::Instance;
use crate::lang::{all_tuples, tuple_index, CostFunction, Language};
use crate::lp::{solve_farkas, FarkasOutcome, LinearSystem, RowKind};
use crate::posclone::positive_clone;
use crate::poly::enumerate_polymorphisms;
use crate::wrelclo::scale;

/// An instance over variables `x_t`, one per tuple `t` of `D^m`, whose cost
/// at the assignment given by an operation table is at least `p`, finite
/// exactly on the m-ary polymorphisms, and equal to `p` exactly on the
/// positively weighted ones.
#[derive(Debug, Clone)]
pub struct IndicatorGadget {
    pub instance: Instance,
    /// Tuples of `D^m` in lexicographic order; `tuples[i]` names variable `i`.
    pub tuples: Vec<Vec<usize>>,
    /// Cost attained on the positively weighted polymorphisms.
    pub p: BigRational,
    pub arity: usize,
}

impl IndicatorGadget {
    /// The gadget cost read off as a single cost function of arity
    /// `|D^m|`: its value at a table equals the instance cost of the
    /// corresponding assignment.
    pub fn as_cost_function(&self, budget: &Budget) -> Result<CostFunction, Error> {
        let vars: Vec<usize> = (0..self.tuples.len()).collect();
        self.instance.express(&vars, budget)
    }
}

fn named_sorted(language: &Language) -> Vec<(&str, &CostFunction)> {
    language
        .functions()
        .sorted_by_key(|(name, _)| name.to_string())
        .collect()
}

/// Builds the indicator instance for m-ary operations over a finite core
/// language.
pub fn build_indicator(
    language: &Language,
    arity: usize,
    budget: &Budget,
) -> Result<IndicatorGadget, Error> {
    assert!(arity >= 1);
    let n = language.domain.size;
    let report = core_report(language, budget)?;
    if !report.is_core {
        return Err(Error::CoreRequired {
            context: format!("indicator construction at arity {arity}"),
        });
    }

    let pol = enumerate_polymorphisms(language, arity, budget)?;
    let plus = positive_clone(language, arity, budget)?;

    // One column per cost function and list of m feasible tuples.  Crisp
    // functions are left out: every polymorphism keeps their value at zero,
    // so their columns cannot contribute.
    struct Column<'a> {
        function: &'a CostFunction,
        lists: Vec<Vec<usize>>,
    }
    let functions = named_sorted(language);
    let mut columns: Vec<Column> = Vec::new();
    let mut total: u128 = 0;
    for (_, function) in &functions {
        let feas = function.feas();
        let count = (feas.len() as u128).pow(arity as u32);
        total = total.saturating_add(if function.is_crisp() { 0 } else { count });
        if total > budget.lp_rows as u128 {
            return Err(Error::BudgetExceeded {
                what: "indicator columns",
                needed: total,
                allowed: budget.lp_rows as u128,
            });
        }
        if function.is_crisp() {
            continue;
        }
        for lists in (0..arity).map(|_| feas.iter().cloned()).multi_cartesian_product() {
            columns.push(Column { function, lists });
        }
    }

    let mut system = LinearSystem::new(columns.len(), true);
    let mut seen: HashSet<(RowKind, Vec<BigRational>)> = HashSet::new();
    for f in pol.iter() {
        let coeffs: Vec<BigRational> = columns
            .iter()
            .map(|col| {
                let args: Vec<&[usize]> = col.lists.iter().map(|t| t.as_slice()).collect();
                let image = f.apply_tuples(&args);
                col.function
                    .value(&image)
                    .as_finite()
                    .cloned()
                    .ok_or(())
            })
            .collect::<Result<_, _>>()
            .map_err(|_| {
                Error::Internal("a polymorphism mapped feasible tuples outside feasibility".into())
            })?;
        let (kind, rhs) = if plus.contains(f) {
            (RowKind::Eq, BigRational::zero())
        } else {
            (RowKind::Geq, BigRational::from_integer(1.into()))
        };
        if seen.insert((kind, coeffs.clone())) {
            system.push(kind, coeffs, rhs);
        }
    }

    let (z, p) = match solve_farkas(&system) {
        FarkasOutcome::Solution {
            assignment,
            constant,
        } => (assignment, constant),
        FarkasOutcome::Infeasible(_) => {
            return Err(Error::Internal(
                "indicator system infeasible: its certificate would weight a \
                 non-member positively"
                    .into(),
            ));
        }
    };

    let tuples: Vec<Vec<usize>> = all_tuples(n, arity).collect();
    let names: Vec<String> = tuples
        .iter()
        .map(|t| format!("x{}", t.iter().join("_")))
        .collect();
    let mut instance = Instance::new(n, names)?;

    // b_i collects coordinate i of each chosen tuple; the constraint scope
    // visits the variables those m-tuples name.
    let scope_of = |lists: &[Vec<usize>], r: usize| -> Vec<usize> {
        (0..r)
            .map(|i| {
                let b: Vec<usize> = lists.iter().map(|a| a[i]).collect();
                tuple_index(&b, n)
            })
            .collect()
    };

    // Weighted summands where the solution put mass; every list left out
    // still contributes its crisp shadow so that feasibility alone cuts the
    // assignment space down to the polymorphisms (shadows that exclude
    // nothing are dropped).  The column walk mirrors the enumeration above.
    let mut at = 0usize;
    for (label, function) in &functions {
        let feas = function.feas();
        let full = feas.len() == function.table.len();
        let crisp = function.feas_indicator();
        for lists in (0..arity).map(|_| feas.iter().cloned()).multi_cartesian_product() {
            let weight = if function.is_crisp() {
                None
            } else {
                debug_assert!(columns[at].lists == lists);
                at += 1;
                Some(&z[at - 1])
            };
            let scope = scope_of(&lists, function.arity);
            match weight {
                Some(w) if !w.is_zero() => {
                    instance.add_constraint(scope, label.to_string(), scale(function, w)?)?;
                }
                _ if !full => {
                    instance.add_constraint(scope, format!("{label}~feas"), crisp.clone())?;
                }
                _ => {}
            }
        }
    }
    debug_assert_eq!(at, columns.len());

    Ok(IndicatorGadget {
        instance,
        tuples,
        p,
        arity,
    })
}

/// Builds a cost function that is minimal exactly on a relation compatible
/// with the positively weighted polymorphisms, by projecting the indicator
/// for `m = |R|` onto the coordinates the relation's columns name.
pub fn relation_indicator(
    language: &Language,
    relation: &[Vec<usize>],
    budget: &Budget,
) -> Result<(CostFunction, BigRational), Error> {
    let n = language.domain.size;
    let mut rows: Vec<Vec<usize>> = relation.to_vec();
    rows.sort();
    rows.dedup();
    if rows.is_empty() {
        return Err(Error::parse("relation", "relations are nonempty"));
    }
    let r = rows[0].len();
    if r == 0 {
        return Err(Error::parse("relation", "tuples are nonempty"));
    }
    for t in &rows {
        if t.len() != r {
            return Err(Error::parse("relation", "tuples share one arity"));
        }
        if t.iter().any(|&e| e >= n) {
            return Err(Error::parse("relation", "entries lie in the domain"));
        }
    }

    let m = rows.len();
    let gadget = build_indicator(language, m, budget)?;
    let scope: Vec<usize> = (0..r)
        .map(|i| {
            let b: Vec<usize> = rows.iter().map(|x| x[i]).collect();
            tuple_index(&b, n)
        })
        .collect();
    let function = gadget.instance.express(&scope, budget)?;
    Ok((function, gadget.p))
}
