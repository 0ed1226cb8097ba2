// Direct multimorphism check: for a k-tuple of k-ary operations, the summed
// images must never cost more than the summed arguments on any tuple list
// with a finite right-hand side.  Computes nothing through the weighting
// machinery it cross-checks.

use itertools::Itertools;

use vcsp::lang::{all_tuples, Language, Operation};
use vcsp::rational::ExtendedRational;

pub fn multimorphism_holds(language: &Language, ops: &[Operation]) -> bool {
    let k = ops.len();
    let n = language.domain.size;
    for (_, f) in language.functions() {
        let lists = (0..k)
            .map(|_| all_tuples(n, f.arity).collect::<Vec<_>>())
            .multi_cartesian_product();
        for list in lists {
            let mut rhs = ExtendedRational::zero();
            for t in &list {
                rhs += f.value(t);
            }
            let ExtendedRational::Finite(rhs) = rhs else {
                continue;
            };
            let mut lhs = ExtendedRational::zero();
            let args: Vec<&[usize]> = list.iter().map(|t| t.as_slice()).collect();
            for op in ops {
                lhs += f.value(&op.apply_tuples(&args));
            }
            match lhs {
                ExtendedRational::Infinite => return false,
                ExtendedRational::Finite(lhs) => {
                    if lhs > rhs {
                        return false;
                    }
                }
            }
        }
    }
    true
}
