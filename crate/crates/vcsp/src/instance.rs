//! Instances, exact brute-force solving, and the expressibility operator.

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::Error;
use crate::lang::{all_tuples, tuple_index, CostFunction, Domain, Language};
use crate::rational::ExtendedRational;

/// One constraint: a cost function applied to a scope of variables.  The
/// label names the function for display and round-tripping; derived
/// constraints carry fresh labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub scope: Vec<usize>,
    pub label: String,
    pub function: CostFunction,
}

/// An assignment, indexed by variable position.
pub type Assignment = Vec<usize>;

/// A VCSP instance: named variables over a shared domain, plus a multiset of
/// constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub domain: Domain,
    pub variables: Vec<String>,
    pub constraints: Vec<Constraint>,
}

/// The result of solving: minimal cost and the lexicographically least
/// assignment attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub cost: ExtendedRational,
    pub assignment: Assignment,
}

impl Instance {
    pub fn new(domain_size: usize, variables: Vec<String>) -> Result<Self, Error> {
        for (i, v) in variables.iter().enumerate() {
            if v.is_empty() {
                return Err(Error::parse(format!("variables[{i}]"), "names are nonempty"));
            }
            if variables[..i].contains(v) {
                return Err(Error::parse(
                    format!("variables[{i}]"),
                    format!("duplicate variable name {v}"),
                ));
            }
        }
        Ok(Instance {
            domain: Domain::new(domain_size),
            variables,
            constraints: Vec::new(),
        })
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn add_constraint(
        &mut self,
        scope: Vec<usize>,
        label: impl Into<String>,
        function: CostFunction,
    ) -> Result<(), Error> {
        let label = label.into();
        if function.domain_size != self.domain.size {
            return Err(Error::parse(
                format!("constraint {label}"),
                format!(
                    "function domain size {} does not match the instance's {}",
                    function.domain_size, self.domain.size
                ),
            ));
        }
        if scope.len() != function.arity {
            return Err(Error::parse(
                format!("constraint {label}"),
                format!(
                    "scope length {} does not match arity {}",
                    scope.len(),
                    function.arity
                ),
            ));
        }
        if let Some(&v) = scope.iter().find(|&&v| v >= self.variables.len()) {
            return Err(Error::parse(
                format!("constraint {label}"),
                format!("scope variable index {v} out of range"),
            ));
        }
        self.constraints.push(Constraint {
            scope,
            label,
            function,
        });
        Ok(())
    }

    /// Adds a constraint with the scope given by variable names.
    pub fn add_constraint_named(
        &mut self,
        scope: &[&str],
        label: impl Into<String>,
        function: CostFunction,
    ) -> Result<(), Error> {
        let indices = scope
            .iter()
            .map(|name| {
                self.var_index(name).ok_or_else(|| {
                    Error::parse("constraint scope", format!("unknown variable {name}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.add_constraint(indices, label, function)
    }

    /// Total cost of an assignment; infinite as soon as any constraint is.
    pub fn cost(&self, assignment: &[usize]) -> ExtendedRational {
        debug_assert_eq!(assignment.len(), self.variables.len());
        let mut total = ExtendedRational::zero();
        let mut args = Vec::new();
        for c in &self.constraints {
            args.clear();
            args.extend(c.scope.iter().map(|&v| assignment[v]));
            total += c.function.value(&args);
            if total.is_infinite() {
                return total;
            }
        }
        total
    }

    /// Number of assignments brute force must visit.
    pub fn assignment_count(&self) -> u128 {
        (self.domain.size as u128).pow(self.variables.len() as u32)
    }

    fn check_budget(&self, budget: &Budget) -> Result<(), Error> {
        Budget::check("assignments", self.assignment_count(), budget.assignments)
    }

    /// Exact minimum over all assignments, enumerated in lexicographic order
    /// with the first variable most significant, so the reported assignment
    /// is the least optimal one.
    pub fn solve(&self, budget: &Budget) -> Result<Optimum, Error> {
        self.check_budget(budget)?;
        let mut best: Option<Optimum> = None;
        for assignment in all_tuples(self.domain.size, self.variables.len()) {
            let cost = self.cost(&assignment);
            match &best {
                Some(b) if b.cost <= cost => {}
                _ => best = Some(Optimum { cost, assignment }),
            }
        }
        Ok(best.expect("at least the empty assignment"))
    }

    /// The cost function expressed by this instance over `projection`, a
    /// list of variable indices (repeats allowed).  Each table entry is the
    /// minimal cost among assignments agreeing with the entry's tuple on the
    /// projected variables; entries no assignment hits stay infinite.
    pub fn express(&self, projection: &[usize], budget: &Budget) -> Result<CostFunction, Error> {
        assert!(!projection.is_empty(), "cost functions have arity at least one");
        if let Some(&v) = projection.iter().find(|&&v| v >= self.variables.len()) {
            return Err(Error::parse(
                "projection list",
                format!("variable index {v} out of range"),
            ));
        }
        self.check_budget(budget)?;
        let n = self.domain.size;
        let mut table = vec![ExtendedRational::Infinite; n.pow(projection.len() as u32)];
        let mut projected = vec![0; projection.len()];
        for assignment in all_tuples(n, self.variables.len()) {
            let cost = self.cost(&assignment);
            for (p, &v) in projected.iter_mut().zip(projection) {
                *p = assignment[v];
            }
            let cell = &mut table[tuple_index(&projected, n)];
            if cost < *cell {
                *cell = cost;
            }
        }
        CostFunction::new(n, projection.len(), table)
    }

    /// `express` with the projection list given by variable names.
    pub fn express_named(&self, projection: &[&str], budget: &Budget) -> Result<CostFunction, Error> {
        let indices = projection
            .iter()
            .map(|name| {
                self.var_index(name).ok_or_else(|| {
                    Error::parse("projection list", format!("unknown variable {name}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.express(&indices, budget)
    }
}

// On-disk form; scopes refer to variables by name and functions live in a
// separate language file named here.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    domain_size: usize,
    language_file: String,
    variables: Vec<String>,
    constraints: Vec<ConstraintFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    scope: Vec<String>,
    function_name: String,
}

/// The parsed text of an instance file, before function tables are resolved
/// against its language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceText {
    pub domain_size: usize,
    pub language_file: String,
    pub variables: Vec<String>,
    pub constraints: Vec<(Vec<String>, String)>,
}

pub fn parse_instance_text(text: &str) -> Result<InstanceText, Error> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
        Error::parse(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    if file.domain_size < 1 {
        return Err(Error::parse("domain_size", "must be at least 1"));
    }
    Ok(InstanceText {
        domain_size: file.domain_size,
        language_file: file.language_file,
        variables: file.variables,
        constraints: file
            .constraints
            .into_iter()
            .map(|c| (c.scope, c.function_name))
            .collect(),
    })
}

impl InstanceText {
    /// Resolves function names against `language`, producing a ready
    /// instance.
    pub fn resolve(&self, language: &Language) -> Result<Instance, Error> {
        if language.domain.size != self.domain_size {
            return Err(Error::parse(
                "domain_size",
                format!(
                    "instance says {}, language file says {}",
                    self.domain_size, language.domain.size
                ),
            ));
        }
        let mut instance = Instance::new(self.domain_size, self.variables.clone())?;
        for (ci, (scope, name)) in self.constraints.iter().enumerate() {
            let function = language.get(name).ok_or_else(|| {
                Error::parse(
                    format!("constraints[{ci}]"),
                    format!("unknown function {name}"),
                )
            })?;
            let scope_refs: Vec<&str> = scope.iter().map(String::as_str).collect();
            instance
                .add_constraint_named(&scope_refs, name.clone(), function.clone())
                .map_err(|e| Error::parse(format!("constraints[{ci}]"), e.to_string()))?;
        }
        Ok(instance)
    }
}

/// Canonical instance text.  Every constraint label must name its function
/// in `language` with an identical table, so the file round-trips.
pub fn serialize_instance(
    instance: &Instance,
    language: &Language,
    language_file: &str,
) -> Result<String, Error> {
    for c in &instance.constraints {
        match language.get(&c.label) {
            Some(f) if *f == c.function => {}
            _ => {
                return Err(Error::parse(
                    format!("constraint {}", c.label),
                    "function is not in the language under this label",
                ))
            }
        }
    }
    let file = InstanceFile {
        domain_size: instance.domain.size,
        language_file: language_file.to_owned(),
        variables: instance.variables.clone(),
        constraints: instance
            .constraints
            .iter()
            .map(|c| ConstraintFile {
                scope: c.scope.iter().map(|&v| instance.variables[v].clone()).collect(),
                function_name: c.label.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("instance serialization");
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_language, serialize_language};

    fn xor() -> CostFunction {
        CostFunction::from_strs(2, 2, &["1", "0", "0", "1"]).unwrap()
    }

    pub(crate) fn triangle() -> Instance {
        let mut inst = Instance::new(2, vec!["x".into(), "y".into(), "z".into()]).unwrap();
        inst.add_constraint_named(&["x", "y"], "xor", xor()).unwrap();
        inst.add_constraint_named(&["x", "z"], "xor", xor()).unwrap();
        inst.add_constraint_named(&["y", "z"], "xor", xor()).unwrap();
        inst
    }

    #[test]
    fn triangle_costs() {
        let inst = triangle();
        assert_eq!(inst.cost(&[0, 0, 0]), ExtendedRational::from_integer(3));
        let opt = inst.solve(&Budget::default()).unwrap();
        assert_eq!(opt.cost, ExtendedRational::from_integer(1));
        assert_eq!(opt.assignment, vec![0, 0, 1]);
        assert_eq!(inst.cost(&opt.assignment), opt.cost);
    }

    #[test]
    fn empty_and_crisp_cases() {
        let empty = Instance::new(3, vec!["v".into()]).unwrap();
        assert_eq!(empty.cost(&[2]), ExtendedRational::zero());

        let mut pinned = Instance::new(2, vec!["v".into()]).unwrap();
        pinned
            .add_constraint_named(&["v"], "n0", CostFunction::pin(2, 0))
            .unwrap();
        assert!(pinned.cost(&[1]).is_infinite());
        let opt = pinned.solve(&Budget::default()).unwrap();
        assert_eq!(opt.cost, ExtendedRational::zero());
        assert_eq!(opt.assignment, vec![0]);

        pinned
            .add_constraint_named(&["v"], "n1", CostFunction::pin(2, 1))
            .unwrap();
        let opt = pinned.solve(&Budget::default()).unwrap();
        assert!(opt.cost.is_infinite());
    }

    #[test]
    fn budget_is_enforced() {
        let vars = (0..30).map(|i| format!("v{i}")).collect();
        let inst = Instance::new(2, vars).unwrap();
        assert!(matches!(
            inst.solve(&Budget::default()),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn express_ties_and_misses() {
        let budget = Budget::default();

        // Scope repetition: the constraint reads its function on a doubled
        // variable, so only diagonal values survive.
        let mut tied = Instance::new(2, vec!["v1".into()]).unwrap();
        tied.add_constraint(vec![0, 0], "xor", xor()).unwrap();
        let unary = tied.express(&[0], &budget).unwrap();
        assert_eq!(
            unary.table,
            vec![ExtendedRational::from_integer(1), ExtendedRational::from_integer(1)]
        );

        // Projection repetition: off-diagonal entries have no witnessing
        // assignment and stay infinite.
        let mut pair = Instance::new(2, vec!["v1".into(), "v2".into()]).unwrap();
        pair.add_constraint(vec![0, 1], "xor", xor()).unwrap();
        let doubled = pair.express(&[0, 0], &budget).unwrap();
        assert!(doubled.value(&[0, 1]).is_infinite());
        assert!(doubled.value(&[1, 0]).is_infinite());
        assert_eq!(*doubled.value(&[0, 0]), ExtendedRational::zero());

        // No constraints: constant zero.
        let free = Instance::new(2, vec!["v".into(), "w".into()]).unwrap();
        let zero = free.express(&[0, 1], &budget).unwrap();
        assert!(zero.table.iter().all(|v| *v == ExtendedRational::zero()));

        // Identity projection over a single constraint returns its function.
        let mut single = Instance::new(2, vec!["a".into(), "b".into()]).unwrap();
        single.add_constraint(vec![0, 1], "xor", xor()).unwrap();
        assert_eq!(single.express(&[0, 1], &budget).unwrap(), xor());
    }

    #[test]
    fn file_round_trip() {
        let mut language = parse_language(
            r#"{"domain_size": 2, "cost_functions": [
                {"name": "xor", "arity": 2, "values": ["1","0","0","1"]}]}"#,
        )
        .unwrap();
        let text = r#"{
  "domain_size": 2,
  "language_file": "lang.json",
  "variables": ["x", "y", "z"],
  "constraints": [
    { "scope": ["x", "y"], "function_name": "xor" },
    { "scope": ["x", "z"], "function_name": "xor" },
    { "scope": ["y", "z"], "function_name": "xor" }
  ]
}"#;
        let parsed = parse_instance_text(text).unwrap();
        assert_eq!(parsed.language_file, "lang.json");
        let inst = parsed.resolve(&language).unwrap();
        assert_eq!(inst, triangle());

        let canonical = serialize_instance(&inst, &language, "lang.json").unwrap();
        let reparsed = parse_instance_text(&canonical)
            .unwrap()
            .resolve(&language)
            .unwrap();
        assert_eq!(reparsed, inst);
        assert_eq!(
            canonical,
            serialize_instance(&reparsed, &language, "lang.json").unwrap()
        );

        // Unknown function names and bad scopes are rejected.
        let bad = r#"{"domain_size": 2, "language_file": "lang.json",
            "variables": ["x"], "constraints": [{"scope": ["x"], "function_name": "nope"}]}"#;
        assert!(parse_instance_text(bad).unwrap().resolve(&language).is_err());

        language.add("spare", CostFunction::pin(2, 0)).unwrap();
        let widened = serialize_language(&language);
        assert!(parse_language(&widened).is_ok());
    }
}
