//! Exact coefficient tables for the ideal-count function and its Möbius
//! inverse, by segmented multiplicative sieving of local Euler factors.
//!
//! The value at n is assembled from prime-power local coefficients: for each
//! prime p with splitting data (e, f, g), the ideal-count coefficients at
//! p^k are those of (1 - T^f)^{-g}, and the Möbius coefficients those of
//! (1 - T^f)^{g}. Within a segment, every prime up to sqrt(limit) strips its
//! powers from the remainders; whatever is left is a single large prime whose
//! coefficient comes straight from the character values.
//!
//! All coefficients are exact machine integers with overflow checking;
//! overflow is an error, never a wraparound. Segmented and sequential runs
//! produce identical tables for every thread count.

use std::time::Instant;

use rayon::prelude::*;

use crate::arith::{checked_binomial, isqrt, primes_up_to};
use crate::config::ComputeConfig;
use crate::error::{Error, Result};
use crate::field::{DirichletCharacter, FieldDescriptor, SplittingData};

/// Which multiplicative coefficient family a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientKind {
    /// Number of integral ideals of norm exactly n.
    IdealCount,
    /// Sum of the Möbius function over ideals of norm exactly n.
    Moebius,
}

/// Exact integer coefficients indexed by norm 1..=limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    limit: u64,
    kind: CoefficientKind,
    values: Vec<i64>,
}

impl CoefficientTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn kind(&self) -> CoefficientKind {
        self.kind
    }

    /// Coefficient at norm n (1-based).
    pub fn get(&self, n: u64) -> i64 {
        assert!(n >= 1 && n <= self.limit, "norm {n} outside 1..={}", self.limit);
        self.values[(n - 1) as usize]
    }

    /// All coefficients, entry k holding the value at norm k + 1.
    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

/// Coefficients of the local factor at a prime, for T^0..T^kmax.
///
/// Ramified primes go through the same (f, g) machinery as everyone else;
/// the characters vanishing at p have already been dropped from the
/// splitting data.
pub fn local_factor_coeffs(
    sd: &SplittingData,
    kind: CoefficientKind,
    kmax: usize,
) -> Result<Vec<i64>> {
    let f = sd.residue_degree as usize;
    let g = sd.num_primes as u64;
    let mut out = vec![0i64; kmax + 1];
    for k in 0..=kmax {
        if k % f != 0 {
            continue;
        }
        let j = (k / f) as u64;
        out[k] = match kind {
            CoefficientKind::IdealCount => checked_binomial(j + g - 1, g - 1)?,
            CoefficientKind::Moebius => {
                if j > g {
                    0
                } else {
                    let b = checked_binomial(g, j)?;
                    if j % 2 == 0 {
                        b
                    } else {
                        -b
                    }
                }
            }
        };
    }
    Ok(out)
}

/// Coefficient at a prime q with no sieved prime below sqrt(limit):
/// g if q has residue degree 1, else 0 (negated for the Möbius kind).
fn large_prime_value(chars: &[DirichletCharacter], q: u64, kind: CoefficientKind) -> i64 {
    let mut surviving = 0i64;
    for chi in chars {
        match chi.value_exponent(q) {
            None => {}
            Some(0) => surviving += 1,
            Some(_) => return 0,
        }
    }
    match kind {
        CoefficientKind::IdealCount => surviving,
        CoefficientKind::Moebius => -surviving,
    }
}

struct SieveContext<'a> {
    chars: &'a [DirichletCharacter],
    /// Primes up to sqrt(limit) with their local coefficient lists.
    small_primes: Vec<(u64, Vec<i64>)>,
    kind: CoefficientKind,
}

impl<'a> SieveContext<'a> {
    fn build(fd: &'a FieldDescriptor, limit: u64, kind: CoefficientKind) -> Result<Self> {
        let chars = fd.characters()?;
        let mut small_primes = Vec::new();
        for p in primes_up_to(isqrt(limit)) {
            let sd = fd.splitting_data(p)?;
            let mut kmax = 0usize;
            let mut pk = p;
            while pk <= limit / p {
                pk *= p;
                kmax += 1;
            }
            kmax += 1;
            small_primes.push((p, local_factor_coeffs(&sd, kind, kmax)?));
        }
        Ok(SieveContext {
            chars,
            small_primes,
            kind,
        })
    }

    /// Exact coefficients for norms lo..=hi.
    fn segment(&self, lo: u64, hi: u64) -> Result<Vec<i64>> {
        let len = (hi - lo + 1) as usize;
        let mut val = vec![1i64; len];
        let mut rem: Vec<u64> = (lo..=hi).collect();
        for (p, coeffs) in &self.small_primes {
            let p = *p;
            let mut n = lo.div_ceil(p) * p;
            while n <= hi {
                let i = (n - lo) as usize;
                let mut v = 0usize;
                while rem[i] % p == 0 {
                    rem[i] /= p;
                    v += 1;
                }
                val[i] = val[i]
                    .checked_mul(coeffs[v])
                    .ok_or_else(|| Error::Overflow(format!("coefficient at {n}")))?;
                n += p;
            }
        }
        for i in 0..len {
            if rem[i] > 1 && val[i] != 0 {
                let c = large_prime_value(self.chars, rem[i], self.kind);
                val[i] = val[i]
                    .checked_mul(c)
                    .ok_or_else(|| Error::Overflow(format!("coefficient at {}", lo + i as u64)))?;
            } else if rem[i] > 1 {
                val[i] = 0;
            }
        }
        Ok(val)
    }
}

/// Stream exact coefficients for 1..=limit through `visit` in segments of
/// `config.segment_size` entries, in ascending order. Segments may be
/// computed in parallel; the visited values are identical for every thread
/// count and segment size.
pub fn sieve_streamed<F>(
    fd: &FieldDescriptor,
    limit: u64,
    kind: CoefficientKind,
    config: &ComputeConfig,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(u64, &[i64]),
{
    if limit == 0 {
        return Err(Error::Domain("sieve limit must be at least 1".into()));
    }
    let ctx = SieveContext::build(fd, limit, kind)?;
    let seg = config.segment_size.max(1) as u64;
    let deadline = config.time_budget.map(|b| Instant::now() + b);

    let starts: Vec<u64> = (0..)
        .map(|i| 1 + i * seg)
        .take_while(|&lo| lo <= limit)
        .collect();

    let pool = match config.threads {
        Some(t) if t > 1 => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?,
        ),
        _ => None,
    };
    let threads = config.threads.unwrap_or_else(rayon::current_num_threads);

    for group in starts.chunks(threads.max(1)) {
        if let Some(d) = deadline {
            if Instant::now() > d {
                return Err(Error::ResourceLimit("time budget exceeded".into()));
            }
        }
        if group.len() == 1 || threads <= 1 {
            for &lo in group {
                let hi = (lo + seg - 1).min(limit);
                let vals = ctx.segment(lo, hi)?;
                visit(lo, &vals);
            }
        } else {
            let compute = || -> Vec<Result<Vec<i64>>> {
                group
                    .par_iter()
                    .map(|&lo| ctx.segment(lo, (lo + seg - 1).min(limit)))
                    .collect()
            };
            let computed = match &pool {
                Some(p) => p.install(compute),
                None => compute(),
            };
            for (&lo, vals) in group.iter().zip(computed) {
                visit(lo, &vals?);
            }
        }
    }
    Ok(())
}

/// Full in-memory coefficient table for 1..=limit.
pub fn sieve(
    fd: &FieldDescriptor,
    limit: u64,
    kind: CoefficientKind,
    config: &ComputeConfig,
) -> Result<CoefficientTable> {
    let bytes = limit.saturating_mul(std::mem::size_of::<i64>() as u64);
    if bytes > config.memory_budget_bytes {
        return Err(Error::ResourceLimit(format!(
            "full table of {limit} entries needs {bytes} bytes, budget is {}",
            config.memory_budget_bytes
        )));
    }
    let mut values = Vec::with_capacity(limit as usize);
    sieve_streamed(fd, limit, kind, config, |_, vals| {
        values.extend_from_slice(vals);
    })?;
    Ok(CoefficientTable {
        limit,
        kind,
        values,
    })
}

/// Number of integral ideals of norm at most x; 0 for x < 1. Streams the
/// sieve so memory stays segment-bounded however large x is.
pub fn ideal_count(fd: &FieldDescriptor, x: f64, config: &ComputeConfig) -> Result<u64> {
    if !(x >= 1.0) {
        return Ok(0);
    }
    let limit = x.floor() as u64;
    Ok(counts_at(fd, &[limit], config)?[0])
}

/// Prefix sums of the ideal-count coefficients at each threshold, streamed
/// in one sieve pass. Thresholds may be unsorted and may repeat.
pub fn counts_at(fd: &FieldDescriptor, thresholds: &[u64], config: &ComputeConfig) -> Result<Vec<u64>> {
    if thresholds.is_empty() {
        return Ok(Vec::new());
    }
    let mut sorted: Vec<u64> = thresholds.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let mut at = std::collections::HashMap::new();
    if sorted[0] == 0 {
        at.insert(0u64, 0u64);
        sorted.remove(0);
    }
    if let Some(&limit) = sorted.last() {
        let mut running: u64 = 0;
        let mut next = 0usize;
        sieve_streamed(fd, limit, CoefficientKind::IdealCount, config, |lo, vals| {
            for (i, &v) in vals.iter().enumerate() {
                let n = lo + i as u64;
                running += v as u64;
                while next < sorted.len() && sorted[next] == n {
                    at.insert(n, running);
                    next += 1;
                }
            }
        })?;
    }
    Ok(thresholds.iter().map(|t| at[t]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> FieldDescriptor {
        FieldDescriptor::cyclotomic(4).unwrap()
    }

    fn zeta5() -> FieldDescriptor {
        FieldDescriptor::cyclotomic(5).unwrap()
    }

    #[test]
    fn local_factors_gaussian_split_prime() {
        let fd = gaussian();
        let sd = fd.splitting_data(5).unwrap();
        assert_eq!((sd.residue_degree, sd.num_primes), (1, 2));
        assert_eq!(
            local_factor_coeffs(&sd, CoefficientKind::IdealCount, 2).unwrap(),
            vec![1, 2, 3]
        );
        assert_eq!(
            local_factor_coeffs(&sd, CoefficientKind::Moebius, 2).unwrap(),
            vec![1, -2, 1]
        );
    }

    #[test]
    fn local_factors_inert_prime_below_residue_degree() {
        let fd = zeta5();
        let sd = fd.splitting_data(2).unwrap(); // inert, f = 4
        assert_eq!(
            local_factor_coeffs(&sd, CoefficientKind::IdealCount, 3).unwrap(),
            vec![1, 0, 0, 0]
        );
        assert_eq!(
            local_factor_coeffs(&sd, CoefficientKind::IdealCount, 8).unwrap(),
            vec![1, 0, 0, 0, 1, 0, 0, 0, 1]
        );
    }

    #[test]
    fn gaussian_ideal_counts_to_ten() {
        let table = sieve(
            &gaussian(),
            10,
            CoefficientKind::IdealCount,
            &ComputeConfig::default(),
        )
        .unwrap();
        assert_eq!(table.values(), &[1, 1, 0, 1, 2, 0, 0, 1, 1, 2]);
    }

    #[test]
    fn gaussian_moebius_to_ten() {
        let table = sieve(
            &gaussian(),
            10,
            CoefficientKind::Moebius,
            &ComputeConfig::default(),
        )
        .unwrap();
        // b(10) = b(2) b(5) = 2 by multiplicativity
        assert_eq!(table.values(), &[1, -1, 0, 0, -2, 0, 0, 0, -1, 2]);
    }

    #[test]
    fn zeta5_coefficients() {
        let table = sieve(
            &zeta5(),
            20,
            CoefficientKind::IdealCount,
            &ComputeConfig::default(),
        )
        .unwrap();
        assert_eq!(table.get(11), 4);
        assert_eq!(table.get(2), 0);
        assert_eq!(table.get(4), 0);
        assert_eq!(table.get(8), 0);
        assert_eq!(table.get(16), 1);
        assert_eq!(table.get(5), 1); // totally ramified
        assert_eq!(table.get(1), 1);
    }

    #[test]
    fn counting_function() {
        let cfg = ComputeConfig::default();
        let q = FieldDescriptor::rational();
        assert_eq!(ideal_count(&q, 10.7, &cfg).unwrap(), 10);
        assert_eq!(ideal_count(&q, 0.3, &cfg).unwrap(), 0);
        assert_eq!(ideal_count(&q, 1.0, &cfg).unwrap(), 1);
        assert_eq!(ideal_count(&gaussian(), 10.0, &cfg).unwrap(), 9);
        assert_eq!(ideal_count(&zeta5(), 1.0, &cfg).unwrap(), 1);
    }

    #[test]
    fn thresholds_match_prefix_sums() {
        let cfg = ComputeConfig::default().with_segment_size(64);
        let fd = zeta5();
        let table = sieve(&fd, 1000, CoefficientKind::IdealCount, &cfg).unwrap();
        let mut prefix = 0u64;
        let mut expected = Vec::new();
        let thresholds: Vec<u64> = vec![1, 7, 64, 65, 999, 1000];
        let mut it = thresholds.iter().peekable();
        for n in 1..=1000u64 {
            prefix += table.get(n) as u64;
            while let Some(&&t) = it.peek() {
                if t == n {
                    expected.push(prefix);
                    it.next();
                } else {
                    break;
                }
            }
        }
        assert_eq!(counts_at(&fd, &thresholds, &cfg).unwrap(), expected);
        // unsorted with duplicates
        assert_eq!(
            counts_at(&fd, &[64, 1, 64, 0], &cfg).unwrap(),
            vec![expected[2], expected[0], expected[2], 0]
        );
    }

    #[test]
    fn segmentation_and_threads_do_not_change_results() {
        let fd = zeta5();
        let base = sieve(
            &fd,
            30_000,
            CoefficientKind::Moebius,
            &ComputeConfig::default(),
        )
        .unwrap();
        for cfg in [
            ComputeConfig::default().with_segment_size(97),
            ComputeConfig::default().with_segment_size(1024).with_threads(3),
            ComputeConfig::default().with_threads(1),
        ] {
            let other = sieve(&fd, 30_000, CoefficientKind::Moebius, &cfg).unwrap();
            assert_eq!(base, other);
        }
    }

    #[test]
    fn dirichlet_inverse_small() {
        let cfg = ComputeConfig::default();
        for fd in [gaussian(), zeta5()] {
            let x = 2000u64;
            let a = sieve(&fd, x, CoefficientKind::IdealCount, &cfg).unwrap();
            let b = sieve(&fd, x, CoefficientKind::Moebius, &cfg).unwrap();
            let mut conv = vec![0i64; x as usize + 1];
            for d in 1..=x {
                let bd = b.get(d);
                if bd == 0 {
                    continue;
                }
                let mut n = d;
                while n <= x {
                    conv[n as usize] += bd * a.get(n / d);
                    n += d;
                }
            }
            assert_eq!(conv[1], 1);
            assert!(conv[2..].iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn memory_budget_guard() {
        let mut cfg = ComputeConfig::default();
        cfg.memory_budget_bytes = 1024;
        let err = sieve(&gaussian(), 1_000_000, CoefficientKind::IdealCount, &cfg).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
        // streaming is exempt from the full-table budget
        assert!(ideal_count(&gaussian(), 10_000.0, &cfg).is_ok());
    }
}
