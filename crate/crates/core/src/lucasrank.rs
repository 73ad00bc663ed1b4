//! Ranks of appearance `ρ_U(p)` modulo primes, and prime counts by rank.
//!
//! Direct-`γ` inputs need no separate path: their context carries a Lucas
//! pair `(a1, a2)` with the same root quotient, and `ρ_U(p) = ord_π(γ)` for
//! every `p ∤ 2a2Δ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::quadfield::SequenceContext;
use crate::{Error, Rational, Result};

/// Table sizes above this are refused.
pub const MAX_SIEVE: u64 = 1 << 31;

/// Smallest-prime-factor table for `0..=limit`.
#[derive(Clone, Debug)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Least prime factor of `n`; `0` for `n < 2`.
    pub fn get(&self, n: u64) -> u32 {
        self.spf[n as usize]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && u64::from(self.spf[n as usize]) == n
    }

    /// Distinct prime factors of `n ≤ limit`, increasing.
    pub fn prime_factors(&self, mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        while n > 1 {
            let p = u64::from(self.spf[n as usize]);
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        out
    }

    pub fn primes_in(&self, range: Range<u64>) -> impl Iterator<Item = u64> + '_ {
        let end = range.end.min(self.limit + 1);
        (range.start.max(2)..end).filter(move |&n| self.is_prime(n))
    }
}

/// Linear sieve.
pub fn spf_sieve(limit: u64) -> Result<SpfTable> {
    if limit < 2 {
        return Err(Error::Limit(format!("sieve limit {limit} below 2")));
    }
    if limit > MAX_SIEVE {
        return Err(Error::Limit(format!("sieve limit {limit} exceeds {MAX_SIEVE}")));
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let m = i * p as usize;
            if p > si || m > n {
                break;
            }
            spf[m] = p;
        }
    }
    Ok(SpfTable { limit, spf })
}

fn reduce(a: i128, p: u64) -> u64 {
    a.rem_euclid(p as i128) as u64
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    if p <= u32::MAX as u64 {
        return a * b % p;
    }
    ((a as u128 * b as u128) % p as u128) as u64
}

fn half(a: u64, p: u64) -> u64 {
    if a % 2 == 0 {
        a / 2
    } else {
        ((a as u128 + p as u128) / 2) as u64
    }
}

/// `(U_n mod p, V_n mod p)` by doubling.
pub fn lucas_pair_mod(n: u64, p: u64, a1: i64, a2: i64) -> Result<(u64, u64)> {
    if p < 3 || p % 2 == 0 {
        return Err(Error::Domain(format!("modulus {p} must be an odd prime")));
    }
    let (a1, q) = (reduce(a1 as i128, p), reduce(a2 as i128, p));
    if q == 0 {
        return Err(Error::Domain(format!("{p} divides a2")));
    }
    let delta = (mulm(a1, a1, p) + p - mulm(4 % p, q, p)) % p;
    let (mut u, mut v, mut qn) = (0u64, 2 % p, 1u64);
    for bit in (0..64 - n.leading_zeros()).rev() {
        // n -> 2n
        u = mulm(u, v, p);
        v = (mulm(v, v, p) + p - mulm(2, qn, p)) % p;
        qn = mulm(qn, qn, p);
        if (n >> bit) & 1 == 1 {
            let nu = half((mulm(a1, u, p) + v) % p, p);
            let nv = half((mulm(delta, u, p) + mulm(a1, v, p)) % p, p);
            u = nu;
            v = nv;
            qn = mulm(qn, q, p);
        }
    }
    Ok((u, v))
}

/// `(Δ/p)` for odd prime `p`.
pub fn legendre(a: i128, p: u64) -> i32 {
    crate::arith::jacobi(a, p as u128).unwrap_or_default()
}

fn eligible(p: u64, ctx: &SequenceContext) -> bool {
    p > 2 && ctx.a2 as i128 % p as i128 != 0 && ctx.delta as i128 % p as i128 != 0
}

/// `ρ_U(p)` by order descent from `p − (Δ/p)`.
pub fn rank(p: u64, ctx: &SequenceContext, spf: &SpfTable) -> Result<u64> {
    if !eligible(p, ctx) {
        return Err(Error::Domain(format!("{p} divides 2·a2·Δ")));
    }
    let j = legendre(ctx.delta as i128, p);
    let mut m = (p as i64 - j as i64) as u64;
    if m > spf.limit() {
        return Err(Error::Limit(format!("{m} exceeds the sieve limit {}", spf.limit())));
    }
    for q in spf.prime_factors(m) {
        while m % q == 0 && lucas_pair_mod(m / q, p, ctx.a1, ctx.a2)?.0 == 0 {
            m /= q;
        }
    }
    Ok(m)
}

/// Least `n ≥ 1` with `p | U_n`, by stepping the recurrence.
pub fn naive_rank(p: u64, a1: i64, a2: i64) -> Option<u64> {
    let (a1, a2) = (reduce(a1 as i128, p), reduce(a2 as i128, p));
    let (mut prev, mut cur) = (0u64, 1u64 % p);
    for n in 1..=2 * p + 2 {
        if cur == 0 {
            return Some(n);
        }
        let next = (mulm(a1, cur, p) + p - mulm(a2, prev, p)) % p;
        prev = cur;
        cur = next;
    }
    None
}

/// One eligible prime and its rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankRecord {
    pub p: u64,
    pub rank: u64,
    pub jacobi: i32,
    pub divisible: bool,
}

/// Counts of eligible primes in a range.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub eligible: u64,
    pub counted: u64,
    pub counted_plus: u64,
    pub counted_minus: u64,
}

impl Counts {
    pub fn merge(self, o: Counts) -> Counts {
        Counts {
            eligible: self.eligible + o.eligible,
            counted: self.counted + o.counted,
            counted_plus: self.counted_plus + o.counted_plus,
            counted_minus: self.counted_minus + o.counted_minus,
        }
    }

    pub fn add(&mut self, rec: &RankRecord) {
        self.eligible += 1;
        if rec.divisible {
            self.counted += 1;
            if rec.jacobi == 1 {
                self.counted_plus += 1;
            } else {
                self.counted_minus += 1;
            }
        }
    }
}

/// Ranks of all eligible primes in `range`, passed to `sink`.
pub fn scan_block(
    ctx: &SequenceContext,
    d: u64,
    range: Range<u64>,
    spf: &SpfTable,
    mut sink: impl FnMut(&RankRecord),
) -> Result<Counts> {
    if d == 0 {
        return Err(Error::Zero("d"));
    }
    let mut counts = Counts::default();
    for p in spf.primes_in(range) {
        if !eligible(p, ctx) {
            continue;
        }
        let r = rank(p, ctx, spf)?;
        let rec = RankRecord { p, rank: r, jacobi: legendre(ctx.delta as i128, p), divisible: r % d == 0 };
        counts.add(&rec);
        sink(&rec);
    }
    Ok(counts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalReport {
    pub a1: i64,
    pub a2: i64,
    pub d: u64,
    pub x: u64,
    pub counts: Counts,
    pub reference_delta: Option<Rational>,
}

impl EmpiricalReport {
    pub fn new(ctx: &SequenceContext, d: u64, x: u64, counts: Counts, reference_delta: Option<Rational>) -> Self {
        EmpiricalReport { a1: ctx.a1, a2: ctx.a2, d, x, counts, reference_delta }
    }

    fn share(&self, k: u64) -> Rational {
        if self.counts.eligible == 0 {
            return Rational::from_integer(0.into());
        }
        Rational::new(k.into(), self.counts.eligible.into())
    }

    pub fn ratio(&self) -> Rational {
        self.share(self.counts.counted)
    }

    pub fn ratio_plus(&self) -> Rational {
        self.share(self.counts.counted_plus)
    }

    pub fn ratio_minus(&self) -> Rational {
        self.share(self.counts.counted_minus)
    }
}

/// Serial count over primes `p ≤ x`.
pub fn empirical_density(
    ctx: &SequenceContext,
    d: u64,
    x: u64,
    spf: &SpfTable,
    reference: Option<Rational>,
) -> Result<EmpiricalReport> {
    if x > spf.limit() {
        return Err(Error::Limit(format!("x = {x} exceeds the sieve limit {}", spf.limit())));
    }
    let counts = scan_block(ctx, d, 2..x + 1, spf, |_| {})?;
    Ok(EmpiricalReport::new(ctx, d, x, counts, reference))
}

/// `3·sqrt(δ(1−δ)/n) + 0.002`.
pub fn tolerance(delta: f64, eligible: u64) -> f64 {
    3.0 * libm::sqrt(delta * (1.0 - delta) / eligible.max(1) as f64) + 0.002
}
