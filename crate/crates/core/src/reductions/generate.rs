//! Random instance generators for the reduction drivers.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::base::circuit::{Bits, Circuit, Gate};

fn pow_bound(n: usize, exp: u32) -> i64 {
    (n.max(1) as i64).saturating_pow(exp)
}

/// `n x n` matrix and `n` vectors with entries in `[0, n^c]`.
pub fn minplus_instance<R: Rng>(n: usize, c: u32, rng: &mut R) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let hi = pow_bound(n, c);
    let mut square = || -> Vec<Vec<i64>> {
        (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(0..=hi)).collect())
            .collect()
    };
    let matrix = square();
    let vectors = square();
    (matrix, vectors)
}

fn distinct_set<R: Rng>(n: usize, hi: i64, rng: &mut R) -> Vec<i64> {
    let mut seen = HashSet::new();
    while seen.len() < n {
        seen.insert(rng.gen_range(-hi..=hi));
    }
    let mut v: Vec<i64> = seen.into_iter().collect();
    v.sort_unstable();
    v.shuffle(rng);
    v
}

/// Three sets of `n` distinct integers in `[-n^q, n^q]`. With `planted`, one
/// element each of `B` and `C` is replaced so that a zero triple exists.
pub fn threesum_instance<R: Rng>(
    n: usize,
    q: u32,
    planted: bool,
    rng: &mut R,
) -> (Vec<i64>, Vec<i64>, Vec<i64>) {
    let hi = pow_bound(n, q);
    let a = distinct_set(n, hi, rng);
    let mut b = distinct_set(n, hi, rng);
    let mut c = distinct_set(n, hi, rng);
    if planted && n > 0 {
        // Rewrite one element each of B and C so that a_i + b_j + c_k = 0,
        // keeping both sets distinct and in range.
        for _ in 0..1000 {
            let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            let cv = rng.gen_range(-hi..=hi);
            let bv = -(a[i] + cv);
            let fresh = |set: &[i64], slot: usize, v: i64| set.iter().enumerate().all(|(x, y)| x == slot || *y != v);
            if bv.abs() <= hi && fresh(&b, j, bv) && fresh(&c, k, cv) {
                b[j] = bv;
                c[k] = cv;
                break;
            }
        }
    }
    (a, b, c)
}

/// A random circuit on `u` inputs with at most `max_size` gates (at least
/// `u + 1`). The first `u` gates read the inputs. With `planted`, the output
/// is forced to 1 on a random assignment; otherwise the output is further
/// constrained by a random conjunction of literals, making UNSAT common.
pub fn random_circuit<R: Rng>(u: usize, max_size: usize, planted: bool, rng: &mut R) -> Circuit {
    let max_size = max_size.max(u + 3);
    let mut gates: Vec<Gate> = (0..u).map(Gate::Input).collect();
    let body = rng.gen_range(1..=max_size - u - 2);
    for _ in 0..body {
        let i = gates.len();
        let pick = |rng: &mut R| rng.gen_range(0..i.max(1));
        let gate = match (i, rng.gen_range(0..10)) {
            (0, _) => Gate::Const(rng.gen()),
            (_, 0) => Gate::Not(pick(rng)),
            (_, 1..=4) => Gate::And(pick(rng), pick(rng)),
            (_, 5..=8) => Gate::Or(pick(rng), pick(rng)),
            _ => Gate::Const(rng.gen()),
        };
        gates.push(gate);
    }
    if planted {
        let x: Vec<bool> = (0..u).map(|_| rng.gen()).collect();
        let c = Circuit::new(u, gates.clone());
        if !c.eval(&x).expect("generated circuits are well-formed") {
            let out = gates.len() - 1;
            gates.push(Gate::Not(out));
        }
    } else if u > 0 {
        // AND the output with a literal on a random input.
        let out = gates.len() - 1;
        let k = rng.gen_range(0..u);
        let lit = if rng.gen() {
            k
        } else {
            gates.push(Gate::Not(k));
            gates.len() - 1
        };
        gates.push(Gate::And(out, lit));
    }
    Circuit::new(u, gates)
}

/// Bit string of `len` random bits.
pub fn random_bits<R: Rng>(len: usize, rng: &mut R) -> Bits {
    Bits((0..len).map(|_| rng.gen()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::{brute_3sum, brute_csat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn threesum_sets_are_distinct_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 4, 16, 49] {
            let (a, b, c) = threesum_instance(n, 3, true, &mut rng);
            let hi = (n as i64).pow(3).max(1);
            for set in [&a, &b, &c] {
                assert_eq!(set.len(), n);
                assert_eq!(set.iter().collect::<HashSet<_>>().len(), n);
                assert!(set.iter().all(|x| x.abs() <= hi));
            }
        }
    }

    #[test]
    fn planting_works() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [4, 16, 49] {
            let (a, b, c) = threesum_instance(n, 3, true, &mut rng);
            assert!(brute_3sum(&a, &b, &c));
        }
        for u in [2, 4, 6] {
            let c = random_circuit(u, 32, true, &mut rng);
            assert!(c.size() <= 32);
            assert!(brute_csat(&c).unwrap());
        }
    }

    #[test]
    fn minplus_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (m, v) = minplus_instance(8, 2, &mut rng);
        assert_eq!(m.len(), 8);
        assert_eq!(v.len(), 8);
        assert!(m.iter().chain(&v).flatten().all(|x| (0..=64).contains(x)));
    }
}
