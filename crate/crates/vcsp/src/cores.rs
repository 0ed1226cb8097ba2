//! Core detection and the reductions that shrink a language to a core and
//! pin it into a rigid core.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::budget::Budget;
use crate::error::Error;
use crate::indicator::build_indicator;
use crate::instance::Instance;
use crate::lang::{CostFunction, Language, Operation};
use crate::poly::enumerate_polymorphisms;
use crate::posclone::positive_clone;
use crate::rational::ExtendedRational;

/// Outcome of the core test.  A language is a core when every positively
/// weighted unary polymorphism is bijective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreReport {
    pub is_core: bool,
    /// Least non-bijective member of the unary positive clone, when any.
    pub witness: Option<Operation>,
    /// Surviving original-domain elements after each restriction step,
    /// strictly shrinking.  Empty unless a core was computed.
    pub restriction_chain: Vec<Vec<usize>>,
}

impl CoreReport {
    /// Elements of the original domain that survive all recorded
    /// restrictions.
    pub fn surviving(&self, domain_size: usize) -> Vec<usize> {
        match self.restriction_chain.last() {
            Some(s) => s.clone(),
            None => (0..domain_size).collect(),
        }
    }
}

/// Tests whether the language is a core.
pub fn core_report(language: &Language, budget: &Budget) -> Result<CoreReport, Error> {
    let plus = positive_clone(language, 1, budget)?;
    let witness = plus.iter().find(|f| !f.is_bijective()).cloned();
    Ok(CoreReport {
        is_core: witness.is_none(),
        witness,
        restriction_chain: Vec::new(),
    })
}

/// Restricts the language to the image of a non-bijective witness until the
/// result is a core.  Surviving elements are re-indexed in increasing order;
/// the report's chain records them in original-domain terms.
pub fn compute_core(language: &Language, budget: &Budget) -> Result<(Language, CoreReport), Error> {
    let mut current = language.clone();
    // current index -> original element
    let mut names: Vec<usize> = (0..language.domain.size).collect();
    let mut first_witness: Option<Operation> = None;
    let mut chain: Vec<Vec<usize>> = Vec::new();

    loop {
        let report = core_report(&current, budget)?;
        let Some(witness) = report.witness else {
            return Ok((
                current,
                CoreReport {
                    is_core: chain.is_empty(),
                    witness: first_witness,
                    restriction_chain: chain,
                },
            ));
        };
        let image = witness.image();
        debug_assert!(image.len() < current.domain.size);
        if first_witness.is_none() {
            first_witness = Some(witness);
        }
        names = image.iter().map(|&i| names[i]).collect();
        chain.push(names.clone());
        current = current.restrict(&image);
    }
}

/// Adds one pin per domain element, forcing every polymorphism to be
/// idempotent.  The input must already be a core.
pub fn rigid_core(language: &Language, budget: &Budget) -> Result<Language, Error> {
    let report = core_report(language, budget)?;
    if let Some(witness) = report.witness {
        return Err(Error::NotACore {
            witness: format!("unary operation with table {:?}", witness.table),
        });
    }
    let n = language.domain.size;
    let mut out = language.clone();
    for d in 0..n {
        out.add_fresh(&format!("N_{d}"), CostFunction::pin(n, d));
    }
    let unary = enumerate_polymorphisms(&out, 1, budget)?;
    let id = Operation::identity(n);
    if unary.len() != 1 || !unary.contains(&id) {
        return Err(Error::Internal(
            "pinned language kept a non-identity unary polymorphism".into(),
        ));
    }
    Ok(out)
}

/// Gadget reduction from an instance over the pinned language to one over
/// the original core language extended with equality and the unary
/// indicator.
#[derive(Debug, Clone)]
pub struct RigidReduction {
    pub instance: Instance,
    /// Language of the output instance: the core plus equality and the
    /// expressed indicator.
    pub augmented_language: Language,
    /// Copies of the indicator constraint appended to the instance.
    pub copies_m: u64,
    /// Indicator value on the positively weighted unary polymorphisms.
    pub p: BigRational,
    /// Least indicator value above `p` among the remaining unary
    /// polymorphisms; `p + 1` when there are none.
    pub q: BigRational,
    /// Total finite mass of the transformed constraints, the threshold the
    /// indicator copies must dominate.
    pub bound_c: BigRational,
}

impl RigidReduction {
    /// Maps an optimum of the transformed instance back to the optimum of
    /// the pinned-language instance.
    pub fn recover_optimum(&self, transformed: &ExtendedRational) -> ExtendedRational {
        let ExtendedRational::Finite(value) = transformed else {
            return ExtendedRational::Infinite;
        };
        let m = BigRational::from_integer(self.copies_m.into());
        let base = &m * &self.p;
        if value <= &(&base + &self.bound_c) {
            ExtendedRational::Finite(value - base)
        } else {
            ExtendedRational::Infinite
        }
    }
}

// Least m with m(q - p) > c, for q > p and c >= 0.
fn least_copies(p: &BigRational, q: &BigRational, c: &BigRational) -> u64 {
    let gap = q - p;
    debug_assert!(gap > BigRational::zero());
    let mut m = 1u64;
    loop {
        if &(BigRational::from_integer(m.into()) * &gap) > c {
            return m;
        }
        m += 1;
    }
}

/// Rewrites an instance over the pinned language `Γ_c` as an instance over
/// the core language plus equality and the unary indicator: pins become
/// equalities against fresh anchor variables, and enough indicator copies
/// are appended that any non-idempotent labeling of the anchors costs more
/// than every feasible labeling of the rest.
pub fn reduce_rigid_instance(
    language: &Language,
    pinned_instance: &Instance,
    budget: &Budget,
) -> Result<RigidReduction, Error> {
    let n = language.domain.size;
    if pinned_instance.domain.size != n {
        return Err(Error::DomainSize {
            got: pinned_instance.domain.size,
            context: format!("instance domain must match the language domain {n}"),
        });
    }

    let gadget = build_indicator(language, 1, budget)?;
    let p = gadget.p.clone();
    let indicator = gadget.as_cost_function(budget)?;

    // Least indicator value above p; the unary positive clone sits exactly
    // at p, every other unary polymorphism strictly above.
    let q = indicator
        .table
        .iter()
        .filter_map(|v| v.as_finite())
        .filter(|v| *v > &p)
        .min()
        .cloned()
        .unwrap_or_else(|| &p + BigRational::from_integer(1.into()));

    let pins: Vec<CostFunction> = (0..n).map(|d| CostFunction::pin(n, d)).collect();
    let mut augmented = language.clone();
    let eq_label = augmented.add_fresh("EQ", CostFunction::equality(n));
    let ind_label = augmented.add_fresh("IND", indicator);

    let mut variables = pinned_instance.variables.clone();
    let anchor_base = variables.len();
    for d in 0..n {
        let mut name = format!("anchor_{d}");
        while variables.contains(&name) {
            name.push('_');
        }
        variables.push(name);
    }
    let mut out = Instance::new(n, variables)?;

    // Transformed constraints: pins turn into equalities with the anchors,
    // everything else is kept verbatim.  c accumulates the finite mass of
    // the kept constraints; negative entries count twice so that c bounds
    // the spread of any finite labeling, not only its positive part.
    let mut c = BigRational::zero();
    let eq = augmented.get(&eq_label).expect("equality was added").clone();
    for constraint in &pinned_instance.constraints {
        let pinned = pins.iter().position(|pin| *pin == constraint.function);
        let (scope, function, label) = match pinned {
            Some(d) => (
                vec![constraint.scope[0], anchor_base + d],
                eq.clone(),
                eq_label.clone(),
            ),
            None => (
                constraint.scope.clone(),
                constraint.function.clone(),
                constraint.label.clone(),
            ),
        };
        for value in &function.table {
            if let Some(v) = value.as_finite() {
                c += v.abs();
                if v < &BigRational::zero() {
                    c += v.abs();
                }
            }
        }
        out.add_constraint(scope, label, function)?;
    }

    let copies_m = least_copies(&p, &q, &c);
    let anchor_scope: Vec<usize> = (0..n).map(|d| anchor_base + d).collect();
    let ind = augmented.get(&ind_label).expect("indicator was added").clone();
    for _ in 0..copies_m {
        out.add_constraint(anchor_scope.clone(), ind_label.clone(), ind.clone())?;
    }

    Ok(RigidReduction {
        instance: out,
        augmented_language: augmented,
        copies_m,
        p,
        q,
        bound_c: c,
    })
}
