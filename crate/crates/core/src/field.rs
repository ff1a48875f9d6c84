//! Abelian field descriptors and their Dirichlet character groups.
//!
//! A field is presented as a pair (m, H): a modulus and a subgroup of
//! (Z/m)*, the Galois-theoretic data of a subfield of the m-th cyclotomic
//! field. Everything downstream — coefficient sieves, L-values, splitting
//! behavior — flows through the group of primitive Dirichlet characters
//! attached to that pair; the field itself is never materialized.
//!
//! Character values are exact roots of unity in exponent form. Floating
//! point only appears when a value is shipped to the analytic layer.

use std::sync::OnceLock;

use num_bigint::BigUint;
use serde::Deserialize;

use crate::arith::{self, euler_phi, gcd, lcm};
use crate::error::{Error, Result};
use crate::unitgroup::{minimal_generators, subgroup_closure, UnitGroup, MAX_MODULUS};

/// An exact root of unity e^{2*pi*i*numer/order}, stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    numer: u64,
    order: u64,
}

impl RootOfUnity {
    pub fn new(numer: u64, order: u64) -> RootOfUnity {
        assert!(order > 0, "order must be positive");
        let numer = numer % order;
        if numer == 0 {
            return RootOfUnity { numer: 0, order: 1 };
        }
        let g = gcd(numer, order);
        RootOfUnity {
            numer: numer / g,
            order: order / g,
        }
    }

    pub fn one() -> RootOfUnity {
        RootOfUnity { numer: 0, order: 1 }
    }

    pub fn is_one(&self) -> bool {
        self.numer == 0
    }

    /// Multiplicative order of the root.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Numerator of the normalized angle numer/order.
    pub fn angle_numer(&self) -> u64 {
        self.numer
    }

    pub fn mul(&self, other: &RootOfUnity) -> RootOfUnity {
        let d = lcm(self.order, other.order);
        let e = (self.numer * (d / self.order) + other.numer * (d / other.order)) % d;
        RootOfUnity::new(e, d)
    }

    pub fn inverse(&self) -> RootOfUnity {
        RootOfUnity::new(self.order - self.numer, self.order)
    }

    /// (re, im) to double precision; the exact-to-float boundary.
    pub fn to_complex(&self) -> (f64, f64) {
        let angle = 2.0 * std::f64::consts::PI * (self.numer as f64) / (self.order as f64);
        (angle.cos(), angle.sin())
    }
}

/// A primitive Dirichlet character in exponent representation: the value at
/// a unit residue a is e^{2*pi*i*values[a]/order}, and 0 off the units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    conductor: u64,
    order: u64,
    values: Box<[Option<u64>]>,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.conductor == 1
    }

    /// Real characters take values in {-1, 0, 1}.
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// Exponent of the value at `n` in Z/order, or `None` when the value is 0.
    pub fn value_exponent(&self, n: u64) -> Option<u64> {
        self.values[(n % self.modulus) as usize]
    }

    /// Value at `n` as an exact root of unity, or `None` when it is 0.
    pub fn value(&self, n: u64) -> Option<RootOfUnity> {
        self.value_exponent(n)
            .map(|e| RootOfUnity::new(e, self.order))
    }

    /// Sort key making character lists deterministic across presentations.
    fn sort_key(&self) -> (u64, u64, Vec<Option<u64>>) {
        (self.conductor, self.order, self.values.to_vec())
    }
}

/// Splitting behavior of a rational prime: ramification index,
/// residue degree and the number of primes above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplittingData {
    pub prime: u64,
    pub ramification: u32,
    pub residue_degree: u32,
    pub num_primes: u32,
}

/// An abelian number field presented as (modulus, unit subgroup).
#[derive(Debug)]
pub struct FieldDescriptor {
    modulus: u64,
    subgroup_generators: Vec<u64>,
    subgroup: Vec<u64>,
    degree: u64,
    characters: OnceLock<Vec<DirichletCharacter>>,
}

impl Clone for FieldDescriptor {
    fn clone(&self) -> Self {
        FieldDescriptor {
            modulus: self.modulus,
            subgroup_generators: self.subgroup_generators.clone(),
            subgroup: self.subgroup.clone(),
            degree: self.degree,
            characters: match self.characters.get() {
                Some(ch) => {
                    let lock = OnceLock::new();
                    let _ = lock.set(ch.clone());
                    lock
                }
                None => OnceLock::new(),
            },
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDescriptor {
    preset: Option<String>,
    m: Option<u64>,
    #[serde(rename = "D")]
    d: Option<i64>,
    generators: Option<Vec<u64>>,
}

impl FieldDescriptor {
    /// General constructor from a modulus and subgroup generators.
    pub fn new(modulus: u64, generators: &[u64]) -> Result<FieldDescriptor> {
        if modulus == 0 {
            return Err(Error::Descriptor("modulus must be positive".into()));
        }
        if modulus > MAX_MODULUS {
            return Err(Error::ResourceLimit(format!(
                "modulus {modulus} exceeds the supported maximum {MAX_MODULUS}"
            )));
        }
        let mut normalized = Vec::new();
        for &g in generators {
            let r = g % modulus;
            if modulus > 1 && gcd(r, modulus) != 1 {
                return Err(Error::Descriptor(format!(
                    "generator {g} is not coprime to the modulus {modulus}"
                )));
            }
            if r != 1 % modulus && !normalized.contains(&r) {
                normalized.push(r);
            }
        }
        normalized.sort_unstable();
        let subgroup = subgroup_closure(modulus, &normalized);
        let phi = euler_phi(modulus);
        debug_assert_eq!(phi % subgroup.len() as u64, 0);
        let degree = phi / subgroup.len() as u64;
        Ok(FieldDescriptor {
            modulus,
            subgroup_generators: normalized,
            subgroup,
            degree,
            characters: OnceLock::new(),
        })
    }

    /// The m-th cyclotomic field: trivial subgroup.
    pub fn cyclotomic(m: u64) -> Result<FieldDescriptor> {
        if m == 0 {
            return Err(Error::Descriptor("cyclotomic modulus must be positive".into()));
        }
        FieldDescriptor::new(m, &[])
    }

    /// The quadratic field of fundamental discriminant `d`, presented as the
    /// kernel of the Kronecker symbol character mod |d|.
    pub fn quadratic(d: i64) -> Result<FieldDescriptor> {
        if !arith::is_fundamental_discriminant(d) {
            return Err(Error::Descriptor(format!(
                "{d} is not a fundamental discriminant"
            )));
        }
        let m = d.unsigned_abs();
        if m > MAX_MODULUS {
            return Err(Error::ResourceLimit(format!(
                "|D| = {m} exceeds the supported maximum {MAX_MODULUS}"
            )));
        }
        let kernel: Vec<u64> = (1..m)
            .filter(|&a| gcd(a, m) == 1 && arith::kronecker(d, a as i64) == 1)
            .collect();
        let fd = FieldDescriptor::new(m, &kernel)?;
        debug_assert_eq!(fd.degree, 2);
        Ok(fd)
    }

    /// The rational field.
    pub fn rational() -> FieldDescriptor {
        FieldDescriptor::new(1, &[]).expect("modulus 1 is always valid")
    }

    /// Parse a JSON descriptor document. Accepted shapes:
    /// `{"preset": "cyclotomic", "m": 5}`, `{"preset": "quadratic", "D": -4}`,
    /// `{"preset": "rational"}`, or `{"m": 8, "generators": [5]}`.
    pub fn parse(text: &str) -> Result<FieldDescriptor> {
        let raw: RawDescriptor = serde_json::from_str(text)
            .map_err(|e| Error::Descriptor(format!("malformed document: {e}")))?;
        match raw.preset.as_deref() {
            Some("cyclotomic") => {
                if raw.d.is_some() || raw.generators.is_some() {
                    return Err(Error::Descriptor(
                        "cyclotomic preset takes only \"m\"".into(),
                    ));
                }
                let m = raw
                    .m
                    .ok_or_else(|| Error::Descriptor("cyclotomic preset requires \"m\"".into()))?;
                FieldDescriptor::cyclotomic(m)
            }
            Some("quadratic") => {
                if raw.m.is_some() || raw.generators.is_some() {
                    return Err(Error::Descriptor(
                        "quadratic preset takes only \"D\"".into(),
                    ));
                }
                let d = raw
                    .d
                    .ok_or_else(|| Error::Descriptor("quadratic preset requires \"D\"".into()))?;
                FieldDescriptor::quadratic(d)
            }
            Some("rational") => {
                if raw.m.is_some() || raw.d.is_some() || raw.generators.is_some() {
                    return Err(Error::Descriptor("rational preset takes no fields".into()));
                }
                Ok(FieldDescriptor::rational())
            }
            Some(other) => Err(Error::Descriptor(format!("unknown preset \"{other}\""))),
            None => {
                if raw.d.is_some() {
                    return Err(Error::Descriptor(
                        "\"D\" is only valid with the quadratic preset".into(),
                    ));
                }
                let m = raw
                    .m
                    .ok_or_else(|| Error::Descriptor("descriptor requires \"m\"".into()))?;
                FieldDescriptor::new(m, raw.generators.as_deref().unwrap_or(&[]))
            }
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn subgroup_generators(&self) -> &[u64] {
        &self.subgroup_generators
    }

    /// Field degree over the rationals: phi(m) / |H|.
    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// The primitive Dirichlet characters attached to the field, in a
    /// canonical order with the trivial character first. Computed on first
    /// use and cached.
    pub fn characters(&self) -> Result<&[DirichletCharacter]> {
        if let Some(ch) = self.characters.get() {
            return Ok(ch);
        }
        let computed = compute_characters(self.modulus, &self.subgroup, self.degree)?;
        let _ = self.characters.set(computed);
        Ok(self.characters.get().expect("just set"))
    }

    /// |d_K| as the product of the character conductors
    /// (conductor-discriminant formula).
    pub fn discriminant_magnitude(&self) -> Result<BigUint> {
        let mut d = BigUint::from(1u32);
        for chi in self.characters()? {
            d *= BigUint::from(chi.conductor());
        }
        Ok(d)
    }

    /// Splitting data of a rational prime, derived from the characters that
    /// survive at p: e = n/|S|, f = order of the value group at p, g = |S|/f.
    pub fn splitting_data(&self, p: u64) -> Result<SplittingData> {
        if !arith::is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        let chars = self.characters()?;
        let mut surviving = 0u64;
        let mut value_order = 1u64;
        for chi in chars {
            if let Some(e) = chi.value_exponent(p) {
                surviving += 1;
                value_order = lcm(value_order, chi.order() / gcd(chi.order(), e));
            }
        }
        let n = self.degree;
        assert!(surviving > 0 && n % surviving == 0 && surviving % value_order == 0);
        Ok(SplittingData {
            prime: p,
            ramification: (n / surviving) as u32,
            residue_degree: value_order as u32,
            num_primes: (surviving / value_order) as u32,
        })
    }
}

/// Enumerate the characters of (Z/m)* trivial on `subgroup`, reduce each to
/// its primitive version, and return them canonically sorted.
fn compute_characters(
    m: u64,
    subgroup: &[u64],
    expected: u64,
) -> Result<Vec<DirichletCharacter>> {
    let ug = UnitGroup::for_modulus(m)?;
    let rank = ug.rank();
    let common_order = ug.orders.iter().copied().fold(1u64, lcm);
    let weights: Vec<u64> = ug.orders.iter().map(|&d| common_order / d).collect();

    // triviality on H only needs checking on a small generating set
    let h_gens = minimal_generators(m, subgroup);
    let h_dlogs: Vec<Vec<u32>> = h_gens
        .iter()
        .map(|&h| ug.dlog(h).expect("subgroup elements are units").to_vec())
        .collect();

    let exponent_at = |tuple: &[u64], dl: &[u32]| -> u64 {
        let mut e: u128 = 0;
        for i in 0..rank {
            e += tuple[i] as u128 * dl[i] as u128 * weights[i] as u128;
        }
        (e % common_order as u128) as u64
    };

    let mut found = Vec::new();
    let mut tuple = vec![0u64; rank];
    loop {
        if h_dlogs.iter().all(|dl| exponent_at(&tuple, dl) == 0) {
            found.push(reduce_to_primitive(&ug, &tuple, &weights, common_order));
        }
        if !next_tuple(&mut tuple, &ug.orders) {
            break;
        }
    }

    if found.len() as u64 != expected {
        return Err(Error::Descriptor(format!(
            "expected {expected} characters trivial on the subgroup, found {}",
            found.len()
        )));
    }
    found.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    if found.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Descriptor(
            "duplicate primitive characters after reduction".into(),
        ));
    }
    if found.iter().filter(|c| c.is_trivial()).count() != 1 {
        return Err(Error::Descriptor(
            "character group must contain the trivial character exactly once".into(),
        ));
    }
    Ok(found)
}

/// Advance a mixed-radix counter; false once the space is exhausted.
fn next_tuple(tuple: &mut [u64], radices: &[u64]) -> bool {
    for k in (0..tuple.len()).rev() {
        tuple[k] += 1;
        if tuple[k] < radices[k] {
            return true;
        }
        tuple[k] = 0;
    }
    false
}

/// Reduce a character of (Z/m)*, given by its exponent tuple, to the
/// primitive character inducing it.
fn reduce_to_primitive(
    ug: &UnitGroup,
    tuple: &[u64],
    weights: &[u64],
    common_order: u64,
) -> DirichletCharacter {
    let m = ug.modulus;
    let rank = ug.rank();

    // exponents over the common order for every residue mod m
    let mut exps = vec![None; m as usize];
    for a in 0..m {
        if let Some(dl) = ug.dlog(a) {
            let mut e: u128 = 0;
            for i in 0..rank {
                e += tuple[i] as u128 * dl[i] as u128 * weights[i] as u128;
            }
            exps[a as usize] = Some((e % common_order as u128) as u64);
        }
    }

    // conductor: smallest divisor d of m with the character trivial on
    // every unit congruent to 1 mod d
    let mut conductor = m;
    'divisors: for d in arith::divisors(m) {
        let mut a = 1u64;
        while a < m {
            if exps[a as usize].map_or(false, |e| e != 0) {
                continue 'divisors;
            }
            a += d;
        }
        conductor = d;
        break;
    }
    if m == 1 {
        conductor = 1;
    }

    // values of the inducing primitive character mod the conductor; each
    // unit residue b mod q lifts to some unit a mod m with a = b mod q
    let q = conductor;
    let mut values: Vec<Option<u64>> = vec![None; q as usize];
    let mut order_gcd = common_order;
    for b in 0..q {
        if q > 1 && gcd(b, q) != 1 {
            continue;
        }
        let mut a = b;
        let e = loop {
            if let Some(e) = exps[(a % m) as usize] {
                break e;
            }
            a += q;
            assert!(a < b + m * 2, "no unit lift of {b} mod {q} found below 2m");
        };
        values[b as usize] = Some(e);
        order_gcd = gcd(order_gcd, e);
    }

    let order = common_order / order_gcd.max(1);
    let order = order.max(1);
    let scale = common_order / order;
    for v in values.iter_mut().flatten() {
        *v /= scale;
    }

    DirichletCharacter {
        modulus: q,
        conductor: q,
        order,
        values: values.into_boxed_slice(),
    }
}
