//! Domains, operations, cost functions, and languages.
//!
//! A domain is `{0, .., n-1}`.  Tables (for operations and cost functions
//! alike) are stored in lexicographic order of the argument tuple with the
//! leftmost position most significant, so the tuple `(t_0, .., t_{k-1})`
//! lives at index `sum t_i * n^(k-1-i)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::ExtendedRational;

/// A finite domain `{0, .., size-1}`; never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Domain {
    pub size: usize,
}

impl Domain {
    pub fn new(size: usize) -> Self {
        assert!(size >= 1, "domains are nonempty");
        Domain { size }
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + Clone {
        0..self.size
    }

    /// Number of `arity`-tuples over this domain.
    pub fn tuple_count(&self, arity: usize) -> usize {
        self.size.pow(arity as u32)
    }
}

/// Index of a tuple in lexicographic table order.
pub fn tuple_index(tuple: &[usize], domain_size: usize) -> usize {
    let mut idx = 0;
    for &t in tuple {
        debug_assert!(t < domain_size);
        idx = idx * domain_size + t;
    }
    idx
}

/// Inverse of [`tuple_index`].
pub fn index_tuple(mut idx: usize, domain_size: usize, arity: usize) -> Vec<usize> {
    let mut tuple = vec![0; arity];
    for slot in tuple.iter_mut().rev() {
        *slot = idx % domain_size;
        idx /= domain_size;
    }
    tuple
}

/// Iterates all `arity`-tuples over `{0..domain_size-1}` in table order.
pub fn all_tuples(domain_size: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = domain_size.pow(arity as u32);
    (0..count).map(move |i| index_tuple(i, domain_size, arity))
}

/// A total finitary operation on a domain, stored as a value table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Operation {
    pub domain_size: usize,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl Operation {
    pub fn new(domain_size: usize, arity: usize, table: Vec<usize>) -> Result<Self, Error> {
        assert!(arity >= 1, "operations have arity at least one");
        let expected = domain_size.pow(arity as u32);
        if table.len() != expected {
            return Err(Error::LengthMismatch {
                what: "operation table",
                arity,
                domain_size,
                expected,
                got: table.len(),
            });
        }
        if let Some(&v) = table.iter().find(|&&v| v >= domain_size) {
            return Err(Error::parse(
                "operation table",
                format!("value {v} outside domain of size {domain_size}"),
            ));
        }
        Ok(Operation {
            domain_size,
            arity,
            table,
        })
    }

    /// The projection onto coordinate `coord` (zero-based) at `arity`.
    pub fn projection(domain_size: usize, arity: usize, coord: usize) -> Self {
        assert!(coord < arity);
        let table = all_tuples(domain_size, arity).map(|t| t[coord]).collect();
        Operation {
            domain_size,
            arity,
            table,
        }
    }

    pub fn identity(domain_size: usize) -> Self {
        Operation::projection(domain_size, 1, 0)
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        self.table[tuple_index(args, self.domain_size)]
    }

    /// Applies the operation coordinatewise to `arity` tuples of equal length.
    pub fn apply_tuples(&self, tuples: &[&[usize]]) -> Vec<usize> {
        debug_assert_eq!(tuples.len(), self.arity);
        let len = tuples[0].len();
        let mut out = Vec::with_capacity(len);
        let mut args = vec![0; self.arity];
        for i in 0..len {
            for (a, t) in args.iter_mut().zip(tuples) {
                *a = t[i];
            }
            out.push(self.apply(&args));
        }
        out
    }

    /// Superposition `self[gs...]`: all `gs` share one arity, which the
    /// result takes.
    pub fn superpose(&self, gs: &[&Operation]) -> Operation {
        assert_eq!(gs.len(), self.arity);
        let inner = gs[0].arity;
        assert!(gs.iter().all(|g| g.arity == inner && g.domain_size == self.domain_size));
        let mut table = Vec::with_capacity(self.domain_size.pow(inner as u32));
        let mut args = vec![0; self.arity];
        for t in all_tuples(self.domain_size, inner) {
            for (a, g) in args.iter_mut().zip(gs) {
                *a = g.apply(&t);
            }
            table.push(self.apply(&args));
        }
        Operation {
            domain_size: self.domain_size,
            arity: inner,
            table,
        }
    }

    pub fn projection_coord(&self) -> Option<usize> {
        (0..self.arity).find(|&i| {
            all_tuples(self.domain_size, self.arity)
                .enumerate()
                .all(|(idx, t)| self.table[idx] == t[i])
        })
    }

    pub fn is_projection(&self) -> bool {
        self.projection_coord().is_some()
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.domain_size).all(|x| self.apply(&vec![x; self.arity]) == x)
    }

    /// Invariance under rotating the argument tuple by one; unary operations
    /// are trivially cyclic.
    pub fn is_cyclic(&self) -> bool {
        all_tuples(self.domain_size, self.arity).all(|t| {
            let mut rotated = t[1..].to_vec();
            rotated.push(t[0]);
            self.apply(&t) == self.apply(&rotated)
        })
    }

    pub fn is_majority(&self) -> bool {
        self.arity == 3
            && (0..self.domain_size).all(|x| {
                (0..self.domain_size).all(|y| {
                    self.apply(&[x, x, y]) == x
                        && self.apply(&[x, y, x]) == x
                        && self.apply(&[y, x, x]) == x
                })
            })
    }

    pub fn is_minority(&self) -> bool {
        self.arity == 3
            && (0..self.domain_size).all(|x| {
                (0..self.domain_size).all(|y| {
                    self.apply(&[x, x, y]) == y
                        && self.apply(&[x, y, x]) == y
                        && self.apply(&[y, x, x]) == y
                })
            })
    }

    pub fn is_conservative(&self) -> bool {
        all_tuples(self.domain_size, self.arity)
            .enumerate()
            .all(|(idx, t)| t.contains(&self.table[idx]))
    }

    pub fn is_bijective(&self) -> bool {
        if self.arity != 1 {
            return false;
        }
        let mut seen = vec![false; self.domain_size];
        for &v in &self.table {
            seen[v] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// Image of the operation as a sorted element list.
    pub fn image(&self) -> Vec<usize> {
        let mut seen = vec![false; self.domain_size];
        for &v in &self.table {
            seen[v] = true;
        }
        seen.iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect()
    }
}

/// A cost function: a table of extended rationals over `D^arity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostFunction {
    pub domain_size: usize,
    pub arity: usize,
    pub table: Vec<ExtendedRational>,
}

impl CostFunction {
    pub fn new(
        domain_size: usize,
        arity: usize,
        table: Vec<ExtendedRational>,
    ) -> Result<Self, Error> {
        assert!(arity >= 1, "cost functions have arity at least one");
        let expected = domain_size.pow(arity as u32);
        if table.len() != expected {
            return Err(Error::LengthMismatch {
                what: "cost function table",
                arity,
                domain_size,
                expected,
                got: table.len(),
            });
        }
        Ok(CostFunction {
            domain_size,
            arity,
            table,
        })
    }

    /// Builds a table from textual values; handy in tests and the guide.
    pub fn from_strs(domain_size: usize, arity: usize, values: &[&str]) -> Result<Self, Error> {
        let table = values
            .iter()
            .map(|s| ExtendedRational::from_str(s))
            .collect::<Result<Vec<_>, _>>()?;
        CostFunction::new(domain_size, arity, table)
    }

    pub fn value(&self, args: &[usize]) -> &ExtendedRational {
        &self.table[tuple_index(args, self.domain_size)]
    }

    /// The unary function pinning its argument to `element`: cost `0` there,
    /// infinite elsewhere.
    pub fn pin(domain_size: usize, element: usize) -> Self {
        assert!(element < domain_size);
        let table = (0..domain_size)
            .map(|x| {
                if x == element {
                    ExtendedRational::zero()
                } else {
                    ExtendedRational::Infinite
                }
            })
            .collect();
        CostFunction {
            domain_size,
            arity: 1,
            table,
        }
    }

    /// Crisp binary equality.
    pub fn equality(domain_size: usize) -> Self {
        let table = all_tuples(domain_size, 2)
            .map(|t| {
                if t[0] == t[1] {
                    ExtendedRational::zero()
                } else {
                    ExtendedRational::Infinite
                }
            })
            .collect();
        CostFunction {
            domain_size,
            arity: 2,
            table,
        }
    }

    /// Feasible tuples (finite cost), in table order.
    pub fn feas(&self) -> Vec<Vec<usize>> {
        all_tuples(self.domain_size, self.arity)
            .zip(&self.table)
            .filter_map(|(t, v)| v.is_finite().then_some(t))
            .collect()
    }

    /// Per-index finiteness mask, aligned with the table.
    pub fn feas_mask(&self) -> Vec<bool> {
        self.table.iter().map(|v| v.is_finite()).collect()
    }

    /// The crisp function worth `0` on feasible tuples and infinite
    /// elsewhere.
    pub fn feas_indicator(&self) -> CostFunction {
        let table = self
            .table
            .iter()
            .map(|v| {
                if v.is_finite() {
                    ExtendedRational::zero()
                } else {
                    ExtendedRational::Infinite
                }
            })
            .collect();
        CostFunction {
            domain_size: self.domain_size,
            arity: self.arity,
            table,
        }
    }

    pub fn is_crisp(&self) -> bool {
        self.table
            .iter()
            .all(|v| v.is_infinite() || *v == ExtendedRational::zero())
    }

    pub fn is_finite_valued(&self) -> bool {
        self.table.iter().all(|v| v.is_finite())
    }

    /// Restricts the table to a subset of the domain, re-indexing the kept
    /// elements in increasing order.
    pub fn restrict(&self, kept: &[usize]) -> CostFunction {
        let sub = Domain::new(kept.len());
        let table = all_tuples(sub.size, self.arity)
            .map(|t| {
                let orig: Vec<usize> = t.iter().map(|&i| kept[i]).collect();
                self.value(&orig).clone()
            })
            .collect();
        CostFunction {
            domain_size: sub.size,
            arity: self.arity,
            table,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LanguageKind {
    Crisp,
    FiniteValued,
    GeneralValued,
}

impl fmt::Display for LanguageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LanguageKind::Crisp => "crisp",
            LanguageKind::FiniteValued => "finite-valued",
            LanguageKind::GeneralValued => "general-valued",
        };
        f.write_str(s)
    }
}

/// A named, finite set of cost functions over one domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Language {
    pub domain: Domain,
    functions: Vec<(String, CostFunction)>,
}

impl Language {
    pub fn new(domain_size: usize) -> Self {
        Language {
            domain: Domain::new(domain_size),
            functions: Vec::new(),
        }
    }

    pub fn add(&mut self, name: impl Into<String>, function: CostFunction) -> Result<(), Error> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::parse("function name", "names are nonempty"));
        }
        if function.domain_size != self.domain.size {
            return Err(Error::parse(
                format!("cost function {name}"),
                format!(
                    "domain size {} does not match the language's {}",
                    function.domain_size, self.domain.size
                ),
            ));
        }
        if self.functions.iter().any(|(n, _)| *n == name) {
            return Err(Error::parse(
                format!("cost function {name}"),
                "duplicate function name",
            ));
        }
        self.functions.push((name, function));
        Ok(())
    }

    /// Adds `function` under `name`, suffixing with `_2`, `_3`, .. if taken.
    /// Returns the name actually used.
    pub fn add_fresh(&mut self, name: &str, function: CostFunction) -> String {
        let mut candidate = name.to_owned();
        let mut k = 1usize;
        while self.get(&candidate).is_some() {
            k += 1;
            candidate = format!("{name}_{k}");
        }
        self.add(candidate.clone(), function).expect("fresh name");
        candidate
    }

    pub fn get(&self, name: &str) -> Option<&CostFunction> {
        self.functions
            .iter()
            .find_map(|(n, f)| (n == name).then_some(f))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, &CostFunction)> {
        self.functions.iter().map(|(n, f)| (n.as_str(), f))
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn kind(&self) -> LanguageKind {
        if self.functions.iter().all(|(_, f)| f.is_crisp()) {
            LanguageKind::Crisp
        } else if self.functions.iter().all(|(_, f)| f.is_finite_valued()) {
            LanguageKind::FiniteValued
        } else {
            LanguageKind::GeneralValued
        }
    }

    /// Restricts every function to `kept` (sorted, distinct domain elements),
    /// re-indexing onto `{0..kept.len()-1}`.
    pub fn restrict(&self, kept: &[usize]) -> Language {
        debug_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(kept.iter().all(|&e| e < self.domain.size));
        let mut out = Language::new(kept.len());
        for (name, f) in &self.functions {
            out.add(name.clone(), f.restrict(kept)).expect("unique names survive");
        }
        out
    }
}

/// Classifies a language as crisp, finite-valued, or general-valued.
pub fn classify_kind(language: &Language) -> LanguageKind {
    language.kind()
}

// On-disk form.  Unknown fields are rejected so that typos surface instead of
// silently vanishing.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LanguageFile {
    domain_size: usize,
    cost_functions: Vec<CostFunctionFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostFunctionFile {
    name: String,
    arity: usize,
    values: Vec<String>,
}

/// Parses the textual language format.
pub fn parse_language(text: &str) -> Result<Language, Error> {
    let file: LanguageFile = serde_json::from_str(text).map_err(|e| {
        Error::parse(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    if file.domain_size < 1 {
        return Err(Error::parse("domain_size", "must be at least 1"));
    }
    let mut language = Language::new(file.domain_size);
    for (fi, cf) in file.cost_functions.iter().enumerate() {
        let loc = |field: String| format!("cost_functions[{fi}] ({}): {field}", cf.name);
        if cf.arity < 1 {
            return Err(Error::parse(loc("arity".into()), "must be at least 1"));
        }
        let expected = file.domain_size.pow(cf.arity as u32);
        if cf.values.len() != expected {
            return Err(Error::parse(
                loc("values".into()),
                format!("expected {expected} entries, got {}", cf.values.len()),
            ));
        }
        let mut table = Vec::with_capacity(expected);
        for (vi, v) in cf.values.iter().enumerate() {
            let parsed = ExtendedRational::from_str(v)
                .map_err(|e| Error::parse(loc(format!("values[{vi}]")), e.to_string()))?;
            table.push(parsed);
        }
        let function = CostFunction::new(file.domain_size, cf.arity, table)?;
        language.add(cf.name.clone(), function).map_err(|e| {
            Error::parse(loc("name".into()), e.to_string())
        })?;
    }
    Ok(language)
}

/// Canonical textual form; `parse_language` inverts it exactly.
pub fn serialize_language(language: &Language) -> String {
    let file = LanguageFile {
        domain_size: language.domain.size,
        cost_functions: language
            .functions()
            .map(|(name, f)| CostFunctionFile {
                name: name.to_owned(),
                arity: f.arity,
                values: f.table.iter().map(|v| v.to_string()).collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("language serialization");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn xor_cost() -> CostFunction {
        CostFunction::from_strs(2, 2, &["1", "0", "0", "1"]).unwrap()
    }

    #[test]
    fn tuple_indexing_is_lexicographic() {
        // Leftmost coordinate most significant: (1,0) comes after (0,1).
        assert_eq!(tuple_index(&[0, 1], 2), 1);
        assert_eq!(tuple_index(&[1, 0], 2), 2);
        assert_eq!(index_tuple(5, 3, 2), vec![1, 2]);
        for n in 1..=3usize {
            for r in 1..=3usize {
                for (i, t) in all_tuples(n, r).enumerate() {
                    assert_eq!(tuple_index(&t, n), i);
                    assert_eq!(index_tuple(i, n, r), t);
                }
            }
        }
    }

    #[test]
    fn projections_and_predicates() {
        let p0 = Operation::projection(2, 2, 0);
        assert_eq!(p0.table, vec![0, 0, 1, 1]);
        assert!(p0.is_projection());
        assert!(p0.is_idempotent());
        assert!(p0.is_conservative());
        assert!(!p0.is_cyclic());

        let min = Operation::new(2, 2, vec![0, 0, 0, 1]).unwrap();
        assert!(!min.is_projection());
        assert!(min.is_cyclic());
        assert!(min.is_conservative());

        let mjrty = Operation::new(2, 3, vec![0, 0, 0, 1, 0, 1, 1, 1]).unwrap();
        assert!(mjrty.is_majority());
        assert!(!mjrty.is_minority());
        let mnrty = Operation::new(2, 3, vec![0, 1, 1, 0, 1, 0, 0, 1]).unwrap();
        assert!(mnrty.is_minority());
        assert!(mnrty.is_cyclic());

        let inv = Operation::new(2, 1, vec![1, 0]).unwrap();
        assert!(inv.is_bijective());
        assert!(inv.is_cyclic());
        assert!(!inv.is_idempotent());
    }

    #[test]
    fn superposition_composes_tables() {
        let min = Operation::new(2, 2, vec![0, 0, 0, 1]).unwrap();
        let max = Operation::new(2, 2, vec![0, 1, 1, 1]).unwrap();
        let p0 = Operation::projection(2, 2, 0);
        // min(max(x,y), x) == x for booleans.
        let composed = min.superpose(&[&max, &p0]);
        assert_eq!(composed, p0);
    }

    #[test]
    fn feasibility_and_kind() {
        let xor = xor_cost();
        assert_eq!(xor.feas().len(), 4);
        assert!(xor.is_finite_valued());

        let pin = CostFunction::pin(2, 0);
        assert_eq!(pin.feas(), vec![vec![0]]);
        assert!(pin.is_crisp());

        let mut lang = Language::new(2);
        lang.add("xor", xor).unwrap();
        assert_eq!(lang.kind(), LanguageKind::FiniteValued);
        lang.add("n0", pin).unwrap();
        assert_eq!(lang.kind(), LanguageKind::GeneralValued);

        let mut crisp = Language::new(2);
        crisp.add("eq", CostFunction::equality(2)).unwrap();
        assert_eq!(crisp.kind(), LanguageKind::Crisp);
    }

    #[test]
    fn language_rejects_duplicates_and_mismatches() {
        let mut lang = Language::new(2);
        lang.add("f", CostFunction::pin(2, 0)).unwrap();
        assert!(lang.add("f", CostFunction::pin(2, 1)).is_err());
        assert!(lang.add("g", CostFunction::pin(3, 0)).is_err());
    }

    #[test]
    fn parse_round_trip() {
        let text = r#"{
  "domain_size": 2,
  "cost_functions": [
    { "name": "xor", "arity": 2, "values": ["1", "0", "0", "1"] },
    { "name": "n0", "arity": 1, "values": ["0", "inf"] }
  ]
}"#;
        let lang = parse_language(text).unwrap();
        assert_eq!(lang.len(), 2);
        assert_eq!(lang.get("xor").unwrap().table, xor_cost().table);
        let canonical = serialize_language(&lang);
        assert_eq!(parse_language(&canonical).unwrap(), lang);
        let twice = serialize_language(&parse_language(&canonical).unwrap());
        assert_eq!(canonical, twice);
    }

    #[test]
    fn parse_rejects_unknown_fields_and_bad_values() {
        let unknown = r#"{"domain_size": 2, "cost_functions": [], "extra": 1}"#;
        assert!(matches!(parse_language(unknown), Err(Error::Parse { .. })));

        let bad_len = r#"{"domain_size": 2, "cost_functions": [
            {"name": "f", "arity": 2, "values": ["0"]}]}"#;
        let err = parse_language(bad_len).unwrap_err();
        assert!(err.to_string().contains("cost_functions[0]"), "{err}");

        let bad_value = r#"{"domain_size": 2, "cost_functions": [
            {"name": "f", "arity": 1, "values": ["0", "oops"]}]}"#;
        let err = parse_language(bad_value).unwrap_err();
        assert!(err.to_string().contains("values[1]"), "{err}");

        let dup = r#"{"domain_size": 2, "cost_functions": [
            {"name": "f", "arity": 1, "values": ["0", "1"]},
            {"name": "f", "arity": 1, "values": ["1", "0"]}]}"#;
        assert!(parse_language(dup).is_err());
    }

    #[test]
    fn restriction_reindexes() {
        let mut lang = Language::new(3);
        lang.add(
            "f",
            CostFunction::from_strs(3, 1, &["5", "7", "inf"]).unwrap(),
        )
        .unwrap();
        let restricted = lang.restrict(&[0, 2]);
        assert_eq!(restricted.domain.size, 2);
        let f = restricted.get("f").unwrap();
        assert_eq!(f.table[0], ExtendedRational::from_integer(5));
        assert!(f.table[1].is_infinite());
    }

    proptest! {
        #[test]
        fn serialize_parse_identity(seed in 0u64..500) {
            // Tiny deterministic language driven by the seed.
            let n = 2 + (seed % 2) as usize;
            let r = 1 + (seed % 2) as usize;
            let count = n.pow(r as u32);
            let values: Vec<ExtendedRational> = (0..count)
                .map(|i| {
                    let x = seed.wrapping_mul(31).wrapping_add(i as u64) % 5;
                    if x == 4 {
                        ExtendedRational::Infinite
                    } else {
                        ExtendedRational::from_integer(x as i64)
                    }
                })
                .collect();
            let mut lang = Language::new(n);
            lang.add("f", CostFunction::new(n, r, values).unwrap()).unwrap();
            let text = serialize_language(&lang);
            prop_assert_eq!(parse_language(&text).unwrap(), lang);
        }
    }
}
