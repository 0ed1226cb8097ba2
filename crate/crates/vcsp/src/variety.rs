//! Transfers along powers, quotients, and subalgebras: language transforms
//! plus the matching instance transforms, preserving optima exactly.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::Error;
use crate::instance::Instance;
use crate::lang::{all_tuples, CostFunction, Language};
use crate::poly::OperationSet;
use crate::rational::ExtendedRational;

/// A partition of the domain.  Classes are kept sorted internally and
/// ordered by least element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    domain_size: usize,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl Congruence {
    /// Builds a partition from its classes; the elements must cover an
    /// initial segment of the naturals exactly once.
    pub fn new(classes: Vec<Vec<usize>>) -> Result<Self, Error> {
        let mut classes: Vec<Vec<usize>> = classes
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        classes.retain(|c| !c.is_empty());
        classes.sort_by_key(|c| c[0]);
        let domain_size = classes.iter().map(Vec::len).sum();
        let mut class_of = vec![usize::MAX; domain_size];
        for (k, class) in classes.iter().enumerate() {
            for &e in class {
                if e >= domain_size || class_of[e] != usize::MAX {
                    return Err(Error::parse(
                        "congruence classes",
                        format!("element {e} does not partition 0..{domain_size}"),
                    ));
                }
                class_of[e] = k;
            }
        }
        if classes.is_empty() {
            return Err(Error::parse("congruence classes", "partition is empty"));
        }
        Ok(Congruence {
            domain_size,
            classes,
            class_of,
        })
    }

    /// The discrete partition, one element per class.
    pub fn identity(domain_size: usize) -> Self {
        Congruence::new((0..domain_size).map(|e| vec![e]).collect()).expect("discrete partition")
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Verifies that related inputs give related outputs for every
    /// operation in the set.
    pub fn check_compatible(&self, ops: &OperationSet) -> Result<(), Error> {
        if ops.domain_size != self.domain_size {
            return Err(Error::parse(
                "congruence",
                format!(
                    "operations over {} elements, partition over {}",
                    ops.domain_size, self.domain_size
                ),
            ));
        }
        for f in ops.iter() {
            for u in all_tuples(self.domain_size, f.arity) {
                let expected = self.class_of(f.apply(&u));
                let choices = u
                    .iter()
                    .map(|&e| self.classes[self.class_of(e)].iter().copied());
                for v in choices.multi_cartesian_product() {
                    if self.class_of(f.apply(&v)) != expected {
                        return Err(Error::IncompatibleCongruence {
                            operation: format!("table {:?}", f.table),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn checked_table_len(domain_size: usize, arity: usize, budget: &Budget) -> Result<usize, Error> {
    let len = (domain_size as u128).checked_pow(arity as u32);
    match len {
        Some(l) if l <= budget.table_cells as u128 => Ok(l as usize),
        _ => Err(Error::BudgetExceeded {
            what: "lifted table cells",
            needed: len.unwrap_or(u128::MAX),
            allowed: budget.table_cells as u128,
        }),
    }
}

/// Lifts each r-ary function to arity `exponent * r` by summing it over
/// blocks: coordinates `i*exponent..(i+1)*exponent` carry the i-th
/// argument's copies, and block j is charged the original function on the
/// j-th coordinate of every argument.
pub fn power_lift(language: &Language, exponent: usize, budget: &Budget) -> Result<Language, Error> {
    assert!(exponent >= 1);
    let n = language.domain.size;
    let mut out = Language::new(n);
    for (name, f) in language.functions() {
        let arity = f.arity * exponent;
        checked_table_len(n, arity, budget)?;
        let table: Vec<ExtendedRational> = all_tuples(n, arity)
            .map(|t| {
                let mut total = ExtendedRational::zero();
                for j in 0..exponent {
                    let slice: Vec<usize> =
                        (0..f.arity).map(|i| t[i * exponent + j]).collect();
                    total += f.value(&slice);
                }
                total
            })
            .collect();
        out.add(name.to_string(), CostFunction::new(n, arity, table)?)
            .expect("names stay unique");
    }
    Ok(out)
}

/// Repacks an instance over a power domain of size `base^exponent` as an
/// instance over the base domain: every variable splits into `exponent`
/// coordinates and every table is reread blockwise, so optima transfer
/// exactly.
pub fn power_lift_instance(
    instance: &Instance,
    base: usize,
    exponent: usize,
) -> Result<Instance, Error> {
    assert!(base >= 1 && exponent >= 1);
    let expected = (base as u128).checked_pow(exponent as u32);
    if expected != Some(instance.domain.size as u128) {
        return Err(Error::DomainSize {
            got: instance.domain.size,
            context: format!("instance domain must be {base}^{exponent}"),
        });
    }
    let mut names = Vec::with_capacity(instance.variables.len() * exponent);
    for v in &instance.variables {
        for j in 0..exponent {
            let mut name = format!("{v}#{j}");
            while names.contains(&name) {
                name.push('_');
            }
            names.push(name);
        }
    }
    let mut out = Instance::new(base, names)?;
    for c in &instance.constraints {
        let scope: Vec<usize> = c
            .scope
            .iter()
            .flat_map(|&w| (0..exponent).map(move |j| w * exponent + j))
            .collect();
        let function = CostFunction::new(
            base,
            c.function.arity * exponent,
            c.function.table.clone(),
        )?;
        out.add_constraint(scope, c.label.clone(), function)?;
    }
    Ok(out)
}

fn pullback(
    f: &CostFunction,
    congruence: &Congruence,
    budget: &Budget,
) -> Result<CostFunction, Error> {
    let n = congruence.domain_size();
    checked_table_len(n, f.arity, budget)?;
    let table: Vec<ExtendedRational> = all_tuples(n, f.arity)
        .map(|t| {
            let classes: Vec<usize> = t.iter().map(|&e| congruence.class_of(e)).collect();
            f.value(&classes).clone()
        })
        .collect();
    CostFunction::new(n, f.arity, table)
}

/// Pulls a language over the classes back to the underlying domain:
/// `ϱ'(x) = ϱ` applied to the classes of the coordinates.
pub fn quotient_lift(
    language: &Language,
    congruence: &Congruence,
    budget: &Budget,
) -> Result<Language, Error> {
    if language.domain.size != congruence.num_classes() {
        return Err(Error::DomainSize {
            got: language.domain.size,
            context: format!(
                "language domain must match the {} congruence classes",
                congruence.num_classes()
            ),
        });
    }
    let mut out = Language::new(congruence.domain_size());
    for (name, f) in language.functions() {
        out.add(name.to_string(), pullback(f, congruence, budget)?)
            .expect("names stay unique");
    }
    Ok(out)
}

/// Pulls an instance over the classes back to the underlying domain,
/// keeping variables and swapping each function for its pullback.
pub fn quotient_lift_instance(
    instance: &Instance,
    congruence: &Congruence,
    budget: &Budget,
) -> Result<Instance, Error> {
    if instance.domain.size != congruence.num_classes() {
        return Err(Error::DomainSize {
            got: instance.domain.size,
            context: format!(
                "instance domain must match the {} congruence classes",
                congruence.num_classes()
            ),
        });
    }
    let mut out = Instance::new(congruence.domain_size(), instance.variables.clone())?;
    for c in &instance.constraints {
        out.add_constraint(
            c.scope.clone(),
            c.label.clone(),
            pullback(&c.function, congruence, budget)?,
        )?;
    }
    Ok(out)
}

/// Restricts a language to a subset closed under the supplied operations,
/// re-indexing the survivors in increasing order.
pub fn subalgebra_restrict(
    language: &Language,
    subset: &[usize],
    ops: &OperationSet,
) -> Result<Language, Error> {
    if subset.is_empty()
        || subset.windows(2).any(|w| w[0] >= w[1])
        || subset.iter().any(|&e| e >= language.domain.size)
    {
        return Err(Error::parse(
            "subset",
            "subsets are nonempty, strictly increasing, and within the domain",
        ));
    }
    if ops.domain_size != language.domain.size {
        return Err(Error::parse(
            "subset operations",
            format!(
                "operations over {} elements, language over {}",
                ops.domain_size, language.domain.size
            ),
        ));
    }
    for f in ops.iter() {
        for t in all_tuples(subset.len(), f.arity) {
            let args: Vec<usize> = t.iter().map(|&i| subset[i]).collect();
            if !subset.contains(&f.apply(&args)) {
                return Err(Error::NotASubuniverse {
                    operation: format!("table {:?}", f.table),
                });
            }
        }
    }
    Ok(language.restrict(subset))
}

/// Re-reads an instance over a restricted domain as one over the full
/// domain, charging infinity outside the subset; optima transfer exactly.
pub fn subalgebra_lift_instance(
    instance: &Instance,
    subset: &[usize],
    full_size: usize,
) -> Result<Instance, Error> {
    if subset.len() != instance.domain.size {
        return Err(Error::DomainSize {
            got: instance.domain.size,
            context: format!("instance domain must match the {} kept elements", subset.len()),
        });
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) || subset.iter().any(|&e| e >= full_size) {
        return Err(Error::parse(
            "subset",
            "subsets are strictly increasing and within the full domain",
        ));
    }
    let position = |e: usize| subset.iter().position(|&s| s == e);
    let mut out = Instance::new(full_size, instance.variables.clone())?;
    for c in &instance.constraints {
        let table: Vec<ExtendedRational> = all_tuples(full_size, c.function.arity)
            .map(|t| {
                let inner: Option<Vec<usize>> = t.iter().map(|&e| position(e)).collect();
                match inner {
                    Some(args) => c.function.value(&args).clone(),
                    None => ExtendedRational::Infinite,
                }
            })
            .collect();
        out.add_constraint(
            c.scope.clone(),
            c.label.clone(),
            CostFunction::new(full_size, c.function.arity, table)?,
        )?;
    }
    Ok(out)
}

// On-disk form of a partition.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CongruenceFile {
    classes: Vec<Vec<usize>>,
}

/// Parses a partition from JSON of the form `{"classes": [[0], [1, 2]]}`.
pub fn parse_congruence(text: &str) -> Result<Congruence, Error> {
    let file: CongruenceFile = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("congruence:{}:{}", e.line(), e.column()), e.to_string()))?;
    Congruence::new(file.classes)
}

/// Serializes a partition to JSON, classes ordered by least element.
pub fn serialize_congruence(congruence: &Congruence) -> String {
    let file = CongruenceFile {
        classes: congruence.classes.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("serializable");
    text.push('\n');
    text
}
