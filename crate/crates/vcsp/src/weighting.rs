//! Weightings of operation sets, multimorphisms, superposition, and the
//! weighted-polymorphism improvement check.
//!
//! A weighting assigns rational weights summing to zero to same-arity
//! operations, with negative weight allowed only on projections.  It is a
//! weighted polymorphism of a language when, for every cost function and
//! every list of feasible tuples, the weighted sum of costs at the
//! operations' coordinatewise images is nonpositive.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lang::{all_tuples, CostFunction, Language, Operation};
use crate::poly::OperationSet;
use crate::rational::{display_rational, parse_rational};

/// A zero-sum weighting over a base set of same-arity operations; negative
/// weights only on projections.
#[derive(Debug, Clone)]
pub struct Weighting {
    base: OperationSet,
    weights: Vec<BigRational>,
}

impl Weighting {
    pub fn new(base: OperationSet, weights: Vec<BigRational>) -> Result<Self, Error> {
        if weights.len() != base.len() {
            return Err(Error::parse(
                "weighting",
                format!("{} weights for {} operations", weights.len(), base.len()),
            ));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_zero() {
            return Err(Error::parse(
                "weighting",
                format!("weights sum to {}, not zero", display_rational(&total)),
            ));
        }
        for (op, w) in base.iter().zip(&weights) {
            if w.is_negative() && !op.is_projection() {
                return Err(Error::parse(
                    "weighting",
                    format!(
                        "negative weight {} on non-projection with table {:?}",
                        display_rational(w),
                        op.table
                    ),
                ));
            }
        }
        Ok(Weighting { base, weights })
    }

    pub fn zero(base: OperationSet) -> Self {
        let weights = vec![BigRational::zero(); base.len()];
        Weighting { base, weights }
    }

    /// Builds a weighting from a sparse table-to-weight map.
    pub fn from_entries(
        domain_size: usize,
        arity: usize,
        entries: impl IntoIterator<Item = (Operation, BigRational)>,
    ) -> Result<Self, Error> {
        let mut map: BTreeMap<Operation, BigRational> = BTreeMap::new();
        for (op, w) in entries {
            *map.entry(op).or_insert_with(BigRational::zero) += w;
        }
        let base = OperationSet::new(domain_size, arity, map.keys().cloned())?;
        let weights = base
            .iter()
            .map(|op| map.get(op).cloned().unwrap_or_else(BigRational::zero))
            .collect();
        Weighting::new(base, weights)
    }

    pub fn arity(&self) -> usize {
        self.base.arity
    }

    pub fn domain_size(&self) -> usize {
        self.base.domain_size
    }

    pub fn base(&self) -> &OperationSet {
        &self.base
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Operation, &BigRational)> {
        self.base.iter().zip(&self.weights)
    }

    pub fn weight_of(&self, op: &Operation) -> BigRational {
        self.entries()
            .find_map(|(o, w)| (o == op).then(|| w.clone()))
            .unwrap_or_else(BigRational::zero)
    }

    /// Positively weighted operations.
    pub fn support(&self) -> Vec<&Operation> {
        self.entries()
            .filter_map(|(op, w)| w.is_positive().then_some(op))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.is_zero())
    }

    pub fn scale(&self, factor: &BigRational) -> Result<Weighting, Error> {
        if factor.is_negative() {
            return Err(Error::parse("weighting scale", "factor must be non-negative"));
        }
        Ok(Weighting {
            base: self.base.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        })
    }

    pub fn add(&self, other: &Weighting) -> Result<Weighting, Error> {
        if self.arity() != other.arity() || self.domain_size() != other.domain_size() {
            return Err(Error::parse(
                "weighting addition",
                "arities and domains must match",
            ));
        }
        let entries = self
            .entries()
            .chain(other.entries())
            .map(|(op, w)| (op.clone(), w.clone()));
        Weighting::from_entries(self.domain_size(), self.arity(), entries)
    }

    /// Superposition with a list of same-arity operations: each base
    /// operation's weight moves to its composition with the list.  Total
    /// weight stays zero; the result is rejected when a non-projection ends
    /// up negative.
    pub fn superpose(&self, gs: &[&Operation]) -> Result<Weighting, ImproperSuperposition> {
        assert_eq!(gs.len(), self.arity());
        let inner = gs[0].arity;
        let mut map: BTreeMap<Operation, BigRational> = BTreeMap::new();
        for (op, w) in self.entries() {
            if w.is_zero() {
                continue;
            }
            *map.entry(op.superpose(gs)).or_insert_with(BigRational::zero) += w;
        }
        debug_assert!(map.values().sum::<BigRational>().is_zero());
        for (op, w) in &map {
            if w.is_negative() && !op.is_projection() {
                return Err(ImproperSuperposition {
                    operation: op.clone(),
                    weight: w.clone(),
                });
            }
        }
        let base = OperationSet::new(self.domain_size(), inner, map.keys().cloned())
            .expect("compositions share arity");
        let weights = base
            .iter()
            .map(|op| map.get(op).cloned().unwrap_or_else(BigRational::zero))
            .collect();
        Ok(Weighting { base, weights })
    }

    /// Canonical scaling: when any weight is negative, the most negative
    /// projection weight becomes -1.
    pub fn normalized(&self) -> Weighting {
        let most_negative = self.weights.iter().filter(|w| w.is_negative()).min();
        match most_negative {
            None => self.clone(),
            Some(m) => {
                let factor = (-m.clone()).recip();
                self.scale(&factor).expect("positive factor")
            }
        }
    }
}

// Equality is semantic: same domain, arity, and nonzero entries.
impl PartialEq for Weighting {
    fn eq(&self, other: &Self) -> bool {
        if self.arity() != other.arity() || self.domain_size() != other.domain_size() {
            return false;
        }
        fn nonzero(w: &Weighting) -> BTreeMap<&Operation, &BigRational> {
            w.entries().filter(|(_, v)| !v.is_zero()).collect()
        }
        nonzero(self) == nonzero(other)
    }
}

impl Eq for Weighting {}

/// A superposition that would put negative weight on a non-projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImproperSuperposition {
    pub operation: Operation,
    pub weight: BigRational,
}

impl fmt::Display for ImproperSuperposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "improper superposition: weight {} on non-projection with table {:?}",
            display_rational(&self.weight),
            self.operation.table
        )
    }
}

/// A k-tuple of k-ary operations, read as the weighting giving each listed
/// operation weight 1/k and each projection weight -1/k, with overlaps
/// cancelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multimorphism {
    pub operations: Vec<Operation>,
}

impl Multimorphism {
    pub fn new(operations: Vec<Operation>) -> Result<Self, Error> {
        let k = operations.len();
        if k == 0 {
            return Err(Error::parse("multimorphism", "at least one operation"));
        }
        let n = operations[0].domain_size;
        if operations.iter().any(|op| op.arity != k || op.domain_size != n) {
            return Err(Error::parse(
                "multimorphism",
                format!("all operations must be {k}-ary over one domain"),
            ));
        }
        Ok(Multimorphism { operations })
    }

    pub fn weighting(&self) -> Weighting {
        let k = self.operations.len();
        let n = self.operations[0].domain_size;
        let share = BigRational::new(1.into(), (k as i64).into());
        let entries = self
            .operations
            .iter()
            .map(|op| (op.clone(), share.clone()))
            .chain((0..k).map(|i| (Operation::projection(n, k, i), -share.clone())));
        Weighting::from_entries(n, k, entries).expect("net negatives land on projections")
    }
}

/// Outcome of the improvement check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WpolCheck {
    Holds,
    Fails(Violation),
}

impl WpolCheck {
    pub fn holds(&self) -> bool {
        matches!(self, WpolCheck::Holds)
    }
}

/// A tuple list witnessing that the improvement inequality fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub function: String,
    pub tuples: Vec<Vec<usize>>,
    /// The positive value of the weighted sum at this list.
    pub excess: BigRational,
}

fn compatible(op: &Operation, feas: &[Vec<usize>], mask: &[bool], n: usize) -> bool {
    let k = op.arity;
    all_tuples(feas.len(), k).all(|list| {
        let rows: Vec<&[usize]> = list.iter().map(|&i| feas[i].as_slice()).collect();
        let image = op.apply_tuples(&rows);
        mask[crate::lang::tuple_index(&image, n)]
    })
}

/// Checks whether `omega` is a weighted polymorphism of `language`.
///
/// Functions are scanned in name order and tuple lists in lexicographic
/// order, so the reported violation is canonical.  Base operations that are
/// not positively weighted must all be polymorphisms; a positively weighted
/// non-polymorphism instead surfaces as a violation at the list it breaks.
pub fn is_weighted_polymorphism(
    omega: &Weighting,
    language: &Language,
) -> Result<WpolCheck, Error> {
    let n = language.domain.size;
    if omega.domain_size() != n {
        return Err(Error::parse(
            "weighting",
            format!(
                "weighting domain size {} does not match language's {}",
                omega.domain_size(),
                n
            ),
        ));
    }
    let k = omega.arity();
    let mut functions: Vec<(&str, &CostFunction)> = language.functions().collect();
    functions.sort_by_key(|(name, _)| *name);

    for (name, f) in &functions {
        let feas = f.feas();
        let mask = f.feas_mask();
        for (op, w) in omega.entries() {
            if !w.is_positive() && !compatible(op, &feas, &mask, n) {
                return Err(Error::BaseNotPolymorphisms {
                    function: format!("arity {} table {:?}", op.arity, op.table),
                });
            }
        }
        for list in all_tuples(feas.len(), k) {
            let rows: Vec<&[usize]> = list.iter().map(|&i| feas[i].as_slice()).collect();
            let mut sum = BigRational::zero();
            let mut broken = false;
            for (op, w) in omega.entries() {
                if w.is_zero() {
                    continue;
                }
                let image = op.apply_tuples(&rows);
                match f.value(&image) {
                    crate::rational::ExtendedRational::Finite(v) => sum += w * v,
                    crate::rational::ExtendedRational::Infinite => {
                        debug_assert!(w.is_positive(), "nonpositive weights were prechecked");
                        broken = true;
                        break;
                    }
                }
            }
            if broken || sum.is_positive() {
                return Ok(WpolCheck::Fails(Violation {
                    function: (*name).to_owned(),
                    tuples: rows.iter().map(|r| r.to_vec()).collect(),
                    excess: if broken { BigRational::one() } else { sum },
                }));
            }
        }
    }
    Ok(WpolCheck::Holds)
}

// On-disk form.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightingFile {
    arity: usize,
    entries: Vec<WeightingEntryFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightingEntryFile {
    operation_table: Vec<usize>,
    weight: String,
}

/// Canonical text: nonzero entries in table order, exact rational weights.
pub fn serialize_weighting(weighting: &Weighting) -> String {
    let file = WeightingFile {
        arity: weighting.arity(),
        entries: weighting
            .entries()
            .filter(|(_, w)| !w.is_zero())
            .map(|(op, w)| WeightingEntryFile {
                operation_table: op.table.clone(),
                weight: display_rational(w),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("weighting serialization");
    s.push('\n');
    s
}

pub fn parse_weighting(text: &str, domain_size: usize) -> Result<Weighting, Error> {
    let file: WeightingFile = serde_json::from_str(text).map_err(|e| {
        Error::parse(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let mut entries = Vec::new();
    for (i, e) in file.entries.iter().enumerate() {
        let op = Operation::new(domain_size, file.arity, e.operation_table.clone())
            .map_err(|err| Error::parse(format!("entries[{i}]"), err.to_string()))?;
        let w = parse_rational(&e.weight)
            .map_err(|err| Error::parse(format!("entries[{i}].weight"), err.to_string()))?;
        entries.push((op, w));
    }
    Weighting::from_entries(domain_size, file.arity, entries)
}
