//! Structure of the multiplicative group mod m: a generating set realizing
//! the cyclic decomposition, plus a discrete-log table over it. This is all
//! the machinery character construction needs; the group is small (table
//! scale) so everything is precomputed densely.

use crate::arith::{euler_phi, factorize};
use crate::error::{Error, Result};

/// Largest modulus accepted for a field presentation. The character
/// machinery is O(phi(m)) in time and memory.
pub const MAX_MODULUS: u64 = 1_000_000;

const NOT_A_UNIT: u32 = u32::MAX;

/// (Z/m)* presented as a product of cyclic groups with explicit generators.
pub(crate) struct UnitGroup {
    pub modulus: u64,
    /// Generators of the cyclic factors, lifted to residues mod m.
    pub generators: Vec<u64>,
    /// Orders of the cyclic factors; their product is phi(m).
    pub orders: Vec<u64>,
    pub phi: u64,
    /// Exponent vectors, flattened: entry a*rank + i is the i-th digit of
    /// the discrete log of a, or NOT_A_UNIT markers when gcd(a, m) > 1.
    dlog: Vec<u32>,
}

impl UnitGroup {
    pub fn for_modulus(m: u64) -> Result<UnitGroup> {
        if m == 0 {
            return Err(Error::Descriptor("modulus must be positive".into()));
        }
        if m > MAX_MODULUS {
            return Err(Error::ResourceLimit(format!(
                "modulus {m} exceeds the supported maximum {MAX_MODULUS}"
            )));
        }
        let mut generators = Vec::new();
        let mut orders = Vec::new();
        for &(p, a) in &factorize(m) {
            let pa = p.pow(a);
            let rest = m / pa;
            if p == 2 {
                match a {
                    1 => {}
                    2 => {
                        generators.push(crt(3, pa, rest));
                        orders.push(2);
                    }
                    _ => {
                        generators.push(crt(pa - 1, pa, rest));
                        orders.push(2);
                        generators.push(crt(5, pa, rest));
                        orders.push(pa / 4);
                    }
                }
            } else {
                let g = primitive_root_prime_power(p, a);
                generators.push(crt(g, pa, rest));
                orders.push(pa / p * (p - 1));
            }
        }
        let phi = euler_phi(m);
        debug_assert_eq!(orders.iter().product::<u64>(), phi);

        let rank = generators.len();
        let mut dlog = vec![NOT_A_UNIT; (m as usize) * rank.max(1)];
        let mut exps = vec![0u32; rank];
        let mut filled = 0u64;
        fill_dlog(
            m,
            &generators,
            &orders,
            0,
            1 % m,
            &mut exps,
            &mut dlog,
            rank,
            &mut filled,
        );
        assert_eq!(filled, phi, "discrete log enumeration must cover the group");

        Ok(UnitGroup {
            modulus: m,
            generators,
            orders,
            phi,
            dlog,
        })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Exponent vector of `a` against the generators, `None` off the units.
    pub fn dlog(&self, a: u64) -> Option<&[u32]> {
        let width = self.rank().max(1);
        let start = (a % self.modulus) as usize * width;
        let row = &self.dlog[start..start + width];
        if row[0] == NOT_A_UNIT {
            None
        } else {
            Some(&row[..self.rank()])
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn fill_dlog(
    m: u64,
    gens: &[u64],
    orders: &[u64],
    level: usize,
    acc: u64,
    exps: &mut [u32],
    dlog: &mut [u32],
    rank: usize,
    filled: &mut u64,
) {
    if level == gens.len() {
        let start = acc as usize * rank.max(1);
        assert_eq!(dlog[start], NOT_A_UNIT, "duplicate residue in enumeration");
        if rank == 0 {
            dlog[start] = 0;
        } else {
            dlog[start..start + rank].copy_from_slice(&exps[..rank]);
        }
        *filled += 1;
        return;
    }
    let mut cur = acc;
    for e in 0..orders[level] {
        exps[level] = e as u32;
        fill_dlog(m, gens, orders, level + 1, cur, exps, dlog, rank, filled);
        cur = (cur as u128 * gens[level] as u128 % m as u128) as u64;
    }
}

/// CRT lift: the residue mod m1*m2 that is `a` mod m1 and 1 mod m2.
fn crt(a: u64, m1: u64, m2: u64) -> u64 {
    if m2 == 1 {
        return a % m1;
    }
    let m = m1 * m2;
    // x = a + m1*t with t = (1 - a) * m1^{-1} mod m2
    let inv = mod_inverse(m1 % m2, m2);
    let diff = (1 + m2 - a % m2) % m2;
    let t = (diff as u128 * inv as u128 % m2 as u128) as u64;
    (a + m1 * t) % m
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert_eq!(old_r, 1, "inverse requires coprime arguments");
    old_s.rem_euclid(m as i128) as u64
}

/// Primitive root mod p^a for odd p.
fn primitive_root_prime_power(p: u64, a: u32) -> u64 {
    let phi_p = p - 1;
    let prime_factors: Vec<u64> = factorize(phi_p).iter().map(|&(q, _)| q).collect();
    let mut g = 2u64;
    loop {
        if prime_factors
            .iter()
            .all(|&q| crate::arith::mod_pow(g, phi_p / q, p) != 1)
        {
            break;
        }
        g += 1;
    }
    if a == 1 {
        return g;
    }
    // g generates (Z/p)*; it lifts to p^a unless g^{p-1} = 1 mod p^2
    let p2 = p * p;
    if crate::arith::mod_pow(g, p - 1, p2) == 1 {
        g + p
    } else {
        g
    }
}

/// Elements of the subgroup of (Z/m)* generated by `gens`, sorted.
pub(crate) fn subgroup_closure(m: u64, gens: &[u64]) -> Vec<u64> {
    let identity = 1 % m;
    let mut seen = vec![false; m.max(1) as usize];
    seen[identity as usize] = true;
    let mut elements = vec![identity];
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = (x as u128 * g as u128 % m.max(1) as u128) as u64;
            if !seen[y as usize] {
                seen[y as usize] = true;
                elements.push(y);
                frontier.push(y);
            }
        }
    }
    elements.sort_unstable();
    elements
}

/// A small generating set for a subgroup given by its full element list.
pub(crate) fn minimal_generators(m: u64, subgroup: &[u64]) -> Vec<u64> {
    let mut gens: Vec<u64> = Vec::new();
    let mut closure = subgroup_closure(m, &gens);
    for &h in subgroup {
        if closure.binary_search(&h).is_err() {
            gens.push(h);
            closure = subgroup_closure(m, &gens);
            if closure.len() == subgroup.len() {
                break;
            }
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::mod_pow;

    fn check_group(m: u64) {
        let ug = UnitGroup::for_modulus(m).unwrap();
        assert_eq!(ug.phi, euler_phi(m));
        // every generator has the claimed order
        for (g, &d) in ug.generators.iter().zip(&ug.orders) {
            assert_eq!(mod_pow(*g, d, m), 1 % m, "m = {m}, g = {g}");
            for &(q, _) in &factorize(d) {
                assert_ne!(mod_pow(*g, d / q, m), 1 % m, "order of {g} mod {m} below {d}");
            }
        }
        // discrete logs reproduce the residue
        for a in 0..m {
            match ug.dlog(a) {
                Some(exps) => {
                    let mut prod = 1 % m;
                    for (g, &e) in ug.generators.iter().zip(exps) {
                        prod = (prod as u128 * mod_pow(*g, e as u64, m) as u128 % m as u128) as u64;
                    }
                    assert_eq!(prod, a, "m = {m}, a = {a}");
                    assert_eq!(gcd(a, m), 1, "non-unit {a} mod {m} has a dlog");
                }
                None => assert_ne!(gcd(a, m), 1, "unit {a} mod {m} missing a dlog"),
            }
        }
    }

    #[test]
    fn structures_across_moduli() {
        for m in [1u64, 2, 3, 4, 5, 8, 9, 15, 16, 24, 45, 100, 125, 256, 360] {
            check_group(m);
        }
    }

    #[test]
    fn closures() {
        assert_eq!(subgroup_closure(8, &[5]), vec![1, 5]);
        assert_eq!(subgroup_closure(4, &[3]), vec![1, 3]);
        assert_eq!(subgroup_closure(5, &[]), vec![1]);
        assert_eq!(subgroup_closure(1, &[]), vec![0]);
        assert_eq!(subgroup_closure(16, &[3]), vec![1, 3, 9, 11]);
    }

    #[test]
    fn minimal_generator_sets() {
        let sub = subgroup_closure(16, &[3, 9]);
        let gens = minimal_generators(16, &sub);
        assert_eq!(subgroup_closure(16, &gens), sub);
        assert!(gens.len() <= 2);
    }
}
