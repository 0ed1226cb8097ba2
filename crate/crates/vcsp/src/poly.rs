//! Polymorphism enumeration and clones of operations.
//!
//! An m-ary operation is a polymorphism of a language when applying it
//! coordinatewise to any m feasible tuples of a cost function lands in that
//! function's feasible tuples again.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::Error;
use crate::lang::{all_tuples, tuple_index, Language, Operation};

/// A deduplicated set of same-arity operations over one domain, kept in
/// lexicographic table order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationSet {
    pub domain_size: usize,
    pub arity: usize,
    operations: Vec<Operation>,
}

impl OperationSet {
    pub fn new(
        domain_size: usize,
        arity: usize,
        operations: impl IntoIterator<Item = Operation>,
    ) -> Result<Self, Error> {
        let mut ops: Vec<Operation> = operations.into_iter().collect();
        for op in &ops {
            if op.domain_size != domain_size || op.arity != arity {
                return Err(Error::parse(
                    "operation set",
                    format!(
                        "operation of arity {} over domain {} in a set of arity {arity} over domain {domain_size}",
                        op.arity, op.domain_size
                    ),
                ));
            }
        }
        ops.sort_by(|a, b| a.table.cmp(&b.table));
        ops.dedup();
        Ok(OperationSet {
            domain_size,
            arity,
            operations: ops,
        })
    }

    /// All projections at the given arity.
    pub fn projections(domain_size: usize, arity: usize) -> Self {
        let ops = (0..arity).map(|i| Operation::projection(domain_size, arity, i));
        OperationSet::new(domain_size, arity, ops).expect("projections are well formed")
    }

    pub fn iter(&self) -> impl Iterator<Item = &Operation> {
        self.operations.iter()
    }

    pub fn len(&self) -> usize {
        self.operations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operations.is_empty()
    }

    pub fn contains(&self, op: &Operation) -> bool {
        debug_assert_eq!(op.domain_size, self.domain_size);
        self.operations
            .binary_search_by(|probe| probe.table.cmp(&op.table))
            .is_ok()
    }

    pub fn is_subset_of(&self, other: &OperationSet) -> bool {
        self.operations.iter().all(|op| other.contains(op))
    }

    /// Keeps the operations satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&Operation) -> bool) -> OperationSet {
        OperationSet {
            domain_size: self.domain_size,
            arity: self.arity,
            operations: self.operations.iter().filter(|op| keep(op)).cloned().collect(),
        }
    }
}

/// All `arity`-ary operations over the domain, in lexicographic table order.
pub fn all_operations(domain_size: usize, arity: usize) -> impl Iterator<Item = Operation> {
    let cells = domain_size.pow(arity as u32);
    all_tuples(domain_size, cells).map(move |table| Operation {
        domain_size,
        arity,
        table,
    })
}

// One compatibility requirement: the operation's values at `cells` must form
// a tuple the mask allows.
struct Check {
    cells: Vec<usize>,
    mask_id: usize,
}

/// Enumerates all m-ary polymorphisms by backtracking over table cells,
/// checking each compatibility requirement as soon as its last cell is
/// filled.  Output is in lexicographic table order.
pub fn enumerate_polymorphisms(
    language: &Language,
    arity: usize,
    budget: &Budget,
) -> Result<OperationSet, Error> {
    assert!(arity >= 1);
    let n = language.domain.size;
    let cells = (n as u128).pow(arity as u32);
    Budget::check("table cells", cells, budget.table_cells)?;
    let cells = cells as usize;

    // Feasibility masks, deduplicated across functions.
    let mut masks: Vec<Vec<bool>> = Vec::new();
    let mut checks: Vec<Check> = Vec::new();
    let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
    for (_, f) in language.functions() {
        let mask = f.feas_mask();
        if mask.iter().all(|&b| b) {
            continue;
        }
        let mask_id = match masks.iter().position(|m| *m == mask) {
            Some(i) => i,
            None => {
                masks.push(mask.clone());
                masks.len() - 1
            }
        };
        let feas: Vec<Vec<usize>> = f.feas();
        if feas.is_empty() {
            continue;
        }
        // Every list of `arity` feasible tuples yields one requirement whose
        // j-th cell is the column (t_1[j], .., t_m[j]).
        for list in all_tuples(feas.len(), arity) {
            let rows: Vec<&Vec<usize>> = list.iter().map(|&i| &feas[i]).collect();
            let cols: Vec<usize> = (0..f.arity)
                .map(|j| {
                    let column: Vec<usize> = rows.iter().map(|t| t[j]).collect();
                    tuple_index(&column, n)
                })
                .collect();
            if seen.insert((mask_id, cols.clone())) {
                checks.push(Check {
                    cells: cols,
                    mask_id,
                });
            }
        }
    }

    // Requirements become checkable once their highest cell is assigned.
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); cells];
    for (i, c) in checks.iter().enumerate() {
        let last = *c.cells.iter().max().expect("arity at least one");
        due[last].push(i);
    }

    struct Search<'a> {
        n: usize,
        cells: usize,
        table: Vec<usize>,
        checks: &'a [Check],
        masks: &'a [Vec<bool>],
        due: &'a [Vec<usize>],
        nodes: u64,
        node_cap: u64,
        found: Vec<Vec<usize>>,
    }

    impl Search<'_> {
        fn passes(&self, check: &Check) -> bool {
            let mut idx = 0;
            for &c in &check.cells {
                idx = idx * self.n + self.table[c];
            }
            self.masks[check.mask_id][idx]
        }

        fn descend(&mut self, cell: usize) -> Result<(), Error> {
            if cell == self.cells {
                self.found.push(self.table.clone());
                return Ok(());
            }
            for v in 0..self.n {
                self.nodes += 1;
                if self.nodes > self.node_cap {
                    return Err(Error::BudgetExceeded {
                        what: "search nodes",
                        needed: self.nodes as u128,
                        allowed: self.node_cap as u128,
                    });
                }
                self.table[cell] = v;
                if self.due[cell].iter().all(|&i| self.passes(&self.checks[i])) {
                    self.descend(cell + 1)?;
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        n,
        cells,
        table: vec![0; cells],
        checks: &checks,
        masks: &masks,
        due: &due,
        nodes: 0,
        node_cap: budget.nodes,
        found: Vec::new(),
    };
    search.descend(0)?;

    let ops = search.found.into_iter().map(|table| Operation {
        domain_size: n,
        arity,
        table,
    });
    OperationSet::new(n, arity, ops)
}

/// Closes generators under superposition, keeping everything of arity up to
/// `max_arity` plus the generators themselves.  Returns the arity-1 through
/// arity-`max_arity` layers.
pub fn close_under_superposition(
    generators: &[OperationSet],
    max_arity: usize,
    budget: &Budget,
) -> Result<Vec<OperationSet>, Error> {
    assert!(max_arity >= 1);
    let domain_size = generators
        .first()
        .map(|s| s.domain_size)
        .unwrap_or_else(|| panic!("at least one operation set, possibly empty, fixes the domain"));
    for set in generators {
        if set.domain_size != domain_size {
            return Err(Error::parse("generators", "mixed domain sizes"));
        }
    }

    let mut layers: BTreeMap<usize, BTreeSet<Operation>> = BTreeMap::new();
    for a in 1..=max_arity {
        layers
            .entry(a)
            .or_default()
            .extend(OperationSet::projections(domain_size, a).iter().cloned());
    }
    for set in generators {
        layers
            .entry(set.arity)
            .or_default()
            .extend(set.iter().cloned());
    }

    let mut total: u64 = layers.values().map(|s| s.len() as u64).sum();
    let mut nodes: u64 = 0;
    loop {
        let mut fresh: Vec<Operation> = Vec::new();
        let outer: Vec<Operation> = layers.values().flatten().cloned().collect();
        for f in &outer {
            for inner_arity in 1..=max_arity {
                let inner: Vec<&Operation> = layers[&inner_arity].iter().collect();
                if inner.is_empty() {
                    continue;
                }
                let mut pick = vec![0usize; f.arity];
                loop {
                    nodes += 1;
                    Budget::check("superposition attempts", nodes as u128, budget.nodes)?;
                    let gs: Vec<&Operation> = pick.iter().map(|&i| inner[i]).collect();
                    let composed = f.superpose(&gs);
                    if !layers[&inner_arity].contains(&composed) && !fresh.contains(&composed) {
                        fresh.push(composed);
                    }
                    // Odometer over the |inner|^arity choices of arguments.
                    let mut pos = f.arity;
                    loop {
                        if pos == 0 {
                            break;
                        }
                        pos -= 1;
                        pick[pos] += 1;
                        if pick[pos] < inner.len() {
                            break;
                        }
                        pick[pos] = 0;
                    }
                    if pick.iter().all(|&i| i == 0) {
                        break;
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        total += fresh.len() as u64;
        Budget::check("operations generated", total as u128, budget.ops)?;
        for op in fresh {
            layers.entry(op.arity).or_default().insert(op);
        }
    }

    (1..=max_arity)
        .map(|a| {
            OperationSet::new(
                domain_size,
                a,
                layers.get(&a).into_iter().flatten().cloned(),
            )
        })
        .collect()
}

// On-disk form of an operation set.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperationSetFile {
    domain_size: usize,
    arity: usize,
    operations: Vec<OperationFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct OperationFile {
    pub arity: usize,
    pub table: Vec<usize>,
}

impl OperationFile {
    pub(crate) fn of(op: &Operation) -> Self {
        OperationFile {
            arity: op.arity,
            table: op.table.clone(),
        }
    }

    pub(crate) fn into_operation(self, domain_size: usize) -> Result<Operation, Error> {
        Operation::new(domain_size, self.arity, self.table)
    }
}

pub fn parse_operation_set(text: &str) -> Result<OperationSet, Error> {
    let file: OperationSetFile = serde_json::from_str(text).map_err(|e| {
        Error::parse(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let ops = file
        .operations
        .into_iter()
        .enumerate()
        .map(|(i, op)| {
            if op.arity != file.arity {
                return Err(Error::parse(
                    format!("operations[{i}]"),
                    format!("arity {} in a set of arity {}", op.arity, file.arity),
                ));
            }
            op.into_operation(file.domain_size)
        })
        .collect::<Result<Vec<_>, _>>()?;
    OperationSet::new(file.domain_size, file.arity, ops)
}

pub fn serialize_operation_set(set: &OperationSet) -> String {
    let file = OperationSetFile {
        domain_size: set.domain_size,
        arity: set.arity,
        operations: set.iter().map(OperationFile::of).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("operation set serialization");
    s.push('\n');
    s
}
