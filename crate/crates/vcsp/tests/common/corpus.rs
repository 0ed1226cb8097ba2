// Seeded generation of small Boolean core languages and random instances.
// Everything is driven by an explicit seed so failures replay exactly.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vcsp::budget::Budget;
use vcsp::cores::core_report;
use vcsp::instance::Instance;
use vcsp::lang::{serialize_language, CostFunction, Language};
use vcsp::rational::ExtendedRational;

fn random_value(rng: &mut ChaCha8Rng) -> ExtendedRational {
    match rng.gen_range(0..4u8) {
        0 => ExtendedRational::from_integer(0),
        1 => ExtendedRational::from_integer(1),
        2 => ExtendedRational::from_integer(2),
        _ => ExtendedRational::Infinite,
    }
}

/// Random Boolean language, core or not.
pub fn random_boolean_language(rng: &mut ChaCha8Rng) -> Language {
    let mut language = Language::new(2);
    let count = rng.gen_range(1..=3);
    for i in 0..count {
        loop {
            let arity = rng.gen_range(1..=2usize);
            let values: Vec<ExtendedRational> =
                (0..1usize << arity).map(|_| random_value(rng)).collect();
            if values.iter().all(|v| !v.is_finite()) {
                continue;
            }
            let f = CostFunction::new(2, arity, values).unwrap();
            language.add(format!("f{i}"), f).unwrap();
            break;
        }
    }
    language
}

/// Distinct random Boolean core languages, arity at most 2, values in
/// {0, 1, 2, inf}.
pub fn boolean_core_corpus(count: usize, seed: u64) -> Vec<Language> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = Budget::default();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let language = random_boolean_language(&mut rng);
        if !core_report(&language, &budget).unwrap().is_core {
            continue;
        }
        if seen.insert(serialize_language(&language)) {
            out.push(language);
        }
    }
    out
}

/// Random instance over the language: up to `max_vars` variables, up to
/// `max_constraints` constraints with uniformly chosen functions and
/// scopes (repeats allowed).
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    language: &Language,
    max_vars: usize,
    max_constraints: usize,
) -> Instance {
    let num_vars = rng.gen_range(1..=max_vars);
    let names: Vec<String> = (0..num_vars).map(|i| format!("v{i}")).collect();
    let mut instance = Instance::new(language.domain.size, names).unwrap();
    let functions: Vec<(&str, &CostFunction)> = language.functions().collect();
    for _ in 0..rng.gen_range(1..=max_constraints) {
        let (name, f) = functions[rng.gen_range(0..functions.len())];
        let scope: Vec<usize> = (0..f.arity).map(|_| rng.gen_range(0..num_vars)).collect();
        instance.add_constraint(scope, name, f.clone()).unwrap();
    }
    instance
}
