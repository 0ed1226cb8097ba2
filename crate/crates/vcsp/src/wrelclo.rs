//! Closure operations on cost functions: scaling, constant shifts,
//! shared-argument addition, and minimizing out coordinates.

use num_rational::BigRational;
use num_traits::Signed;

use crate::error::Error;
use crate::lang::{all_tuples, CostFunction};
use crate::rational::ExtendedRational;

/// Pointwise scaling by a non-negative rational.  Scaling by zero maps
/// infinite entries to zero, so the result is the constant-zero function.
pub fn scale(f: &CostFunction, factor: &BigRational) -> Result<CostFunction, Error> {
    if factor.is_negative() {
        return Err(Error::parse("scale factor", "must be non-negative"));
    }
    let table = f.table.iter().map(|v| v.scale(factor)).collect();
    CostFunction::new(f.domain_size, f.arity, table)
}

/// Pointwise shift by a rational constant of either sign; infinite entries
/// stay infinite.
pub fn add_constant(f: &CostFunction, constant: &BigRational) -> CostFunction {
    let table = f.table.iter().map(|v| v.add_rational(constant)).collect();
    CostFunction::new(f.domain_size, f.arity, table).expect("length unchanged")
}

/// Shared-argument addition: the result at a tuple `x` of length
/// `result_arity` is `f(x[f_map]) + g(x[g_map])`.  The maps choose which
/// result coordinate feeds each argument, so any argument-sharing pattern
/// can be spelled out.
pub fn add(
    f: &CostFunction,
    g: &CostFunction,
    f_map: &[usize],
    g_map: &[usize],
    result_arity: usize,
) -> Result<CostFunction, Error> {
    if f.domain_size != g.domain_size {
        return Err(Error::parse(
            "addition",
            format!(
                "domain sizes {} and {} differ",
                f.domain_size, g.domain_size
            ),
        ));
    }
    if result_arity < 1 {
        return Err(Error::parse("addition", "result arity must be at least 1"));
    }
    if f_map.len() != f.arity || g_map.len() != g.arity {
        return Err(Error::parse(
            "addition",
            format!(
                "index maps of lengths {} and {} do not match arities {} and {}",
                f_map.len(),
                g_map.len(),
                f.arity,
                g.arity
            ),
        ));
    }
    if let Some(&i) = f_map.iter().chain(g_map).find(|&&i| i >= result_arity) {
        return Err(Error::parse(
            "addition",
            format!("index {i} exceeds result arity {result_arity}"),
        ));
    }
    let n = f.domain_size;
    let mut table = Vec::with_capacity(n.pow(result_arity as u32));
    for t in all_tuples(n, result_arity) {
        let fa: Vec<usize> = f_map.iter().map(|&i| t[i]).collect();
        let ga: Vec<usize> = g_map.iter().map(|&i| t[i]).collect();
        table.push(f.value(&fa) + g.value(&ga));
    }
    CostFunction::new(n, result_arity, table)
}

/// Minimizes out the named coordinates (zero-based, distinct).  At least one
/// coordinate must remain.
pub fn minimise(f: &CostFunction, coordinates: &[usize]) -> Result<CostFunction, Error> {
    let mut dropped = vec![false; f.arity];
    for &c in coordinates {
        if c >= f.arity {
            return Err(Error::parse(
                "minimise",
                format!("coordinate {c} exceeds arity {}", f.arity),
            ));
        }
        if dropped[c] {
            return Err(Error::parse("minimise", format!("coordinate {c} repeated")));
        }
        dropped[c] = true;
    }
    let kept: Vec<usize> = (0..f.arity).filter(|&c| !dropped[c]).collect();
    if kept.is_empty() {
        return Err(Error::parse(
            "minimise",
            "at least one coordinate must remain",
        ));
    }
    let n = f.domain_size;
    let mut table = vec![ExtendedRational::Infinite; n.pow(kept.len() as u32)];
    let mut projected = vec![0; kept.len()];
    for t in all_tuples(n, f.arity) {
        for (p, &c) in projected.iter_mut().zip(&kept) {
            *p = t[c];
        }
        let cell = &mut table[crate::lang::tuple_index(&projected, n)];
        let v = f.value(&t);
        if *v < *cell {
            *cell = v.clone();
        }
    }
    CostFunction::new(n, kept.len(), table)
}
