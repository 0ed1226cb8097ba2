// Exact feasibility oracle for mixed systems via double description.
//
// The system (nonnegative variables, optional free constant, >= and =
// rows) is homogenized into a pointed cone inside the nonnegative orthant:
// coordinates are the variables, the split constant (when present), and a
// homogenization coordinate t.  A row a.x >= b + C becomes the halfspace
// a.x - c_plus + c_minus - b t >= 0.  The original system is feasible
// exactly when the final cone contains a ray with t > 0.
//
// Rays are maintained with exact incidence sets and the standard
// combinatorial adjacency test, so the enumeration is exact; nothing here
// shares code with the simplex under test.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use vcsp::lp::{LinearSystem, RowKind};

struct Ray {
    v: Vec<BigInt>,
}

fn dot(h: &[BigRational], r: &[BigInt]) -> BigRational {
    h.iter()
        .zip(r)
        .map(|(a, b)| a * BigRational::from_integer(b.clone()))
        .sum()
}

// Primitive integer representative of the ray direction.
fn normalize(v: Vec<BigRational>) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * &lcm / x.denom()).collect();
    let gcd = ints
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        ints
    } else {
        ints.into_iter().map(|x| x / &gcd).collect()
    }
}

// Incidence bits: coordinate hyperplanes first, then each processed
// halfspace, recomputed exactly for every ray.
fn incidence(ray: &[BigInt], processed: &[Vec<BigRational>]) -> u128 {
    let mut bits: u128 = 0;
    for (i, x) in ray.iter().enumerate() {
        if x.is_zero() {
            bits |= 1 << i;
        }
    }
    for (k, h) in processed.iter().enumerate() {
        if dot(h, ray).is_zero() {
            bits |= 1 << (ray.len() + k);
        }
    }
    bits
}

/// True when the system admits a solution (nonnegative variables, free
/// constant allowed where declared).
pub fn dd_feasible(system: &LinearSystem) -> bool {
    let n = system.num_vars;
    let extra = if system.has_free_constant { 2 } else { 0 };
    let dim = n + extra + 1;
    let t_at = dim - 1;
    assert!(dim + 2 * system.rows.len() <= 128, "incidence bits fit u128");

    let mut halfspaces: Vec<Vec<BigRational>> = Vec::new();
    for row in &system.rows {
        let mut h = vec![BigRational::zero(); dim];
        h[..n].clone_from_slice(&row.coeffs);
        if system.has_free_constant {
            h[n] = -BigRational::one();
            h[n + 1] = BigRational::one();
        }
        h[t_at] = -row.rhs.clone();
        match row.kind {
            RowKind::Geq => halfspaces.push(h),
            RowKind::Eq => {
                halfspaces.push(h.iter().map(|x| -x).collect());
                halfspaces.push(h);
            }
        }
    }

    let mut rays: Vec<Ray> = (0..dim)
        .map(|i| {
            let mut v = vec![BigInt::zero(); dim];
            v[i] = BigInt::one();
            Ray { v }
        })
        .collect();

    let mut processed: Vec<Vec<BigRational>> = Vec::new();
    for h in halfspaces {
        let vals: Vec<BigRational> = rays.iter().map(|r| dot(&h, &r.v)).collect();
        let keep: Vec<usize> = (0..rays.len())
            .filter(|&i| !vals[i].is_negative())
            .collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();

        let inc: Vec<u128> = rays.iter().map(|r| incidence(&r.v, &processed)).collect();
        let mut fresh: Vec<Vec<BigInt>> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let shared = inc[p] & inc[q];
                let adjacent = (0..rays.len())
                    .all(|o| o == p || o == q || (inc[o] & shared) != shared);
                if !adjacent {
                    continue;
                }
                let combo: Vec<BigRational> = rays[p]
                    .v
                    .iter()
                    .zip(&rays[q].v)
                    .map(|(rp, rq)| {
                        &vals[p] * BigRational::from_integer(rq.clone())
                            - &vals[q] * BigRational::from_integer(rp.clone())
                    })
                    .collect();
                let w = normalize(combo);
                if !w.iter().all(|x| x.is_zero()) && !fresh.contains(&w) {
                    fresh.push(w);
                }
            }
        }

        let mut next: Vec<Ray> = keep.into_iter().map(|i| Ray { v: rays[i].v.clone() }).collect();
        for w in fresh {
            if next.iter().all(|r| r.v != w) {
                next.push(Ray { v: w });
            }
        }
        rays = next;
        processed.push(h);
        if rays.is_empty() {
            return false;
        }
    }

    rays.iter().any(|r| r.v[t_at].is_positive())
}
