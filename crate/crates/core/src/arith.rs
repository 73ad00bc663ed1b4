//! Integer and rational utilities: factorization, squarefree kernels,
//! supernatural gcds, divisor enumeration and Jacobi symbols.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Rational, Result};

/// Prime factorization of `|n|`: `(prime, exponent)` pairs sorted by prime.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Multiply the factorization back out.
    pub fn value(&self) -> u128 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

const SMALL_PRIMES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const TRIAL_BOUND: u64 = 1 << 12;

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    // Shift-and-add keeps every intermediate below 2m < 2^128.
    let (mut a, mut b, mut acc) = (a % m, b % m, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

pub(crate) fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Miller–Rabin with the first thirteen prime bases, deterministic below
/// 3.3·10^24.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = p as u128;
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let odd = (n - 1) >> s;
    'bases: for &a in &SMALL_PRIMES {
        let mut x = pow_mod(a as u128, odd, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's variant of Pollard rho; `n` must be an odd composite.
fn rho(n: u128) -> u128 {
    let mut c = 1u128;
    loop {
        let f = |x: u128| add_mod(mul_mod(x, x, n), c, n);
        let (mut x, mut y, mut g, mut r, mut q) = (2u128, 2u128, 1u128, 1u64, 1u128);
        let mut ys = 2u128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..core::cmp::min(128, r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u128(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u128(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_into(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho(n);
    split_into(d, out);
    split_into(n / d, out);
}

fn collect(mut primes: Vec<u128>) -> Factorization {
    primes.sort_unstable();
    let mut factors: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { factors }
}

/// Exact prime factorization of `|n|`.
pub fn factorize(n: i128) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Zero("factorize argument"));
    }
    let mut m = n.unsigned_abs();
    let mut primes = Vec::new();
    let mut p = 2u128;
    while p < TRIAL_BOUND as u128 && p * p <= m {
        while m % p == 0 {
            primes.push(p);
            m /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    split_into(m, &mut primes);
    Ok(collect(primes))
}

pub fn factorize_u64(n: u64) -> Factorization {
    factorize(n as i128).expect("nonzero")
}

/// Factor an arbitrary nonzero big integer. Cofactors that exceed 128 bits
/// after trial division are split with rho over big integers.
pub fn factorize_big(n: &BigInt) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(Error::Zero("factorize argument"));
    }
    let mut m = n.magnitude().clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let push = |p: BigUint, out: &mut Vec<(BigUint, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some((_, e)) => *e += 1,
        None => out.push((p, 1)),
    };
    let mut p = 2u64;
    while p < (1 << 16) {
        let bp = BigUint::from(p);
        if &bp * &bp > m {
            break;
        }
        while (&m % &bp).is_zero() {
            push(bp.clone(), &mut out);
            m /= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![m];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u128() {
            for (q, e) in factorize(small as i128)?.factors {
                for _ in 0..e {
                    push(BigUint::from(q), &mut out);
                }
            }
            continue;
        }
        if is_probable_prime_big(&m) {
            push(m, &mut out);
            continue;
        }
        let d = rho_big(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out.sort();
    Ok(out)
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let odd = &n1 >> s;
    'bases: for &a in SMALL_PRIMES.iter() {
        let mut x = BigUint::from(a).modpow(&odd, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut g = BigUint::one();
        while g.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            g = diff.gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

/// Write `q = s·t²` with `s` a squarefree integer carrying the sign of `q`
/// and `t > 0` rational.
pub fn squarefree_kernel(q: &Rational) -> Result<(BigInt, Rational)> {
    if q.is_zero() {
        return Err(Error::Zero("squarefree_kernel argument"));
    }
    // q = n/m = (n·m)/m², so the kernel of q is the kernel of n·m.
    let prod = q.numer() * q.denom();
    let mut s = BigInt::one();
    let mut root = BigInt::one();
    for (p, e) in factorize_big(&prod)? {
        let p = BigInt::from(p);
        if e % 2 == 1 {
            s *= &p;
        }
        root *= num_traits::pow(p, (e / 2) as usize);
    }
    if q.is_negative() {
        s = -s;
    }
    let t = Rational::new(root, q.denom().clone());
    debug_assert_eq!(Rational::from(s.clone()) * &t * &t, *q);
    Ok((s, t))
}

/// `(h, m^∞)`: the largest divisor of `h` built from primes dividing `m`.
pub fn gcd_power_infinity(h: u64, m: u64) -> u64 {
    assert!(h >= 1 && m >= 1, "gcd_power_infinity needs positive arguments");
    let mut out = 1;
    let mut rest = h;
    loop {
        let g = rest.gcd(&m);
        if g == 1 {
            return out;
        }
        out *= g;
        rest /= g;
    }
}

/// `[v | d^∞]`: every prime of `v` divides `d`.
pub fn divides_power(v: u64, d: u64) -> bool {
    gcd_power_infinity(v, d) == v
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i128, n: u128) -> Result<i32> {
    if n % 2 == 0 {
        return Err(Error::Domain(alloc::format!("jacobi modulus {n} is even")));
    }
    let mut a = a.rem_euclid(n as i128) as u128;
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

pub fn jacobi_big(a: &BigInt, n: u128) -> Result<i32> {
    let r = a.mod_floor(&BigInt::from(n)).to_i128().expect("reduced below modulus");
    jacobi(r, n)
}

pub fn prime_factors(n: u64) -> Vec<u64> {
    factorize_u64(n).primes().map(|p| p as u64).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    factorize_u64(n)
        .factors
        .iter()
        .map(|&(p, e)| {
            let p = p as u64;
            (p - 1) * p.pow(e - 1)
        })
        .product()
}

/// Möbius function.
pub fn mobius(n: u64) -> i32 {
    let f = factorize_u64(n);
    if !f.is_squarefree() {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize_u64(n).factors {
        let p = p as u64;
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Squarefree divisors of `n` paired with their Möbius values.
pub fn squarefree_divisors(n: u64) -> Vec<(u64, i32)> {
    let mut out = vec![(1u64, 1i32)];
    for p in prime_factors(n) {
        let len = out.len();
        for i in 0..len {
            let (u, m) = out[i];
            out.push((u * p, -m));
        }
    }
    out.sort_unstable();
    out
}

/// All `v ≤ bound` with `v | d^∞`, sorted.
pub fn smooth_up_to(d: u64, bound: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for p in prime_factors(d) {
        let len = out.len();
        for i in 0..len {
            let mut v = out[i];
            while let Some(next) = v.checked_mul(p).filter(|&x| x <= bound) {
                out.push(next);
                v = next;
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

pub fn valuation_big(n: &BigInt, p: &BigUint) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let mut m = n.magnitude().clone();
    let mut k = 0;
    while (&m % p).is_zero() {
        m /= p;
        k += 1;
    }
    k
}

/// Exact integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Exact rational square root when `q` is a square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    Some(Rational::new(exact_sqrt(q.numer())?, exact_sqrt(q.denom())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use proptest::prelude::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().factors, vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(1369).unwrap().factors, vec![(37, 2)]);
        assert!(factorize(-1).unwrap().factors.is_empty());
        assert_eq!(factorize(0), Err(Error::Zero("factorize argument")));
    }

    #[test]
    fn factorize_large_semiprimes() {
        let p = 1_000_000_007u128;
        let q = 998_244_353u128;
        assert_eq!(factorize((p * q) as i128).unwrap().factors, vec![(q, 1), (p, 1)]);
        // Both factors above 2^40: product needs the wide multiplication path.
        let a = 1_099_511_627_791u128;
        let b = 1_099_511_628_401u128;
        assert!(is_prime(a) && is_prime(b));
        assert_eq!(factorize((a * a * b) as i128).unwrap().factors, vec![(a, 2), (b, 1)]);
    }

    #[test]
    fn factorize_big_recomposes() {
        let n = BigInt::from(2u32).pow(70) * BigInt::from(1_000_000_007u64).pow(3) * 37;
        let f = factorize_big(&n).unwrap();
        let back: BigInt = f.iter().map(|(p, e)| BigInt::from(p.clone()).pow(*e)).product();
        assert_eq!(back, n);
    }

    #[test]
    fn kernel_examples() {
        let (s, t) = squarefree_kernel(&ratio(-4, 5)).unwrap();
        assert_eq!((s, t), (BigInt::from(-5), ratio(2, 5)));
        let (s, t) = squarefree_kernel(&ratio(1, 40)).unwrap();
        assert_eq!((s, t), (BigInt::from(10), ratio(1, 20)));
        let (s, t) = squarefree_kernel(&ratio(9, 4)).unwrap();
        assert_eq!((s, t), (BigInt::from(1), ratio(3, 2)));
        assert!(squarefree_kernel(&ratio(0, 1)).is_err());
    }

    #[test]
    fn supernatural_gcd_examples() {
        assert_eq!(gcd_power_infinity(12, 2), 4);
        assert_eq!(gcd_power_infinity(4, 10), 4);
        assert_eq!(gcd_power_infinity(2, 3), 1);
        assert_eq!(gcd_power_infinity(7, 1), 1);
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(5, 11).unwrap(), 1);
        assert_eq!(jacobi(5, 13).unwrap(), -1);
        assert_eq!(jacobi(10, 5).unwrap(), 0);
        assert!(jacobi(3, 8).is_err());
    }

    #[test]
    fn jacobi_matches_legendre_brute_force() {
        for p in (3u128..1000).filter(|&p| is_prime(p)) {
            let squares: std::collections::BTreeSet<u128> = (1..p).map(|x| x * x % p).collect();
            for a in -5i128..(p as i128) {
                let r = a.rem_euclid(p as i128) as u128;
                let expected = if r == 0 {
                    0
                } else if squares.contains(&r) {
                    1
                } else {
                    -1
                };
                assert_eq!(jacobi(a, p).unwrap(), expected, "({a}/{p})");
            }
        }
    }

    #[test]
    fn multiplicative_helpers() {
        assert_eq!(euler_phi(36), 12);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(squarefree_divisors(12), vec![(1, 1), (2, -1), (3, -1), (6, 1)]);
        assert_eq!(smooth_up_to(6, 10), vec![1, 2, 3, 4, 6, 8, 9]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn factorize_recomposes(n in 2u64..1_000_000_000_000u64) {
            let f = factorize(n as i128).unwrap();
            prop_assert_eq!(f.value(), n as u128);
            prop_assert!(f.primes().all(is_prime));
        }
    }

    proptest! {
        #[test]
        fn kernel_is_squarefree(num in -100_000i64..100_000, den in 1i64..100_000) {
            prop_assume!(num != 0);
            let q = ratio(num, den);
            let (s, t) = squarefree_kernel(&q).unwrap();
            prop_assert_eq!(Rational::from(s.clone()) * &t * &t, q);
            prop_assert!(t.is_positive());
            let f = factorize(s.to_i128().unwrap()).unwrap();
            prop_assert!(f.is_squarefree());
        }

        #[test]
        fn supernatural_gcd_cofactor_coprime(h in 1u64..1_000_000, m in 1u64..10_000) {
            let g = gcd_power_infinity(h, m);
            prop_assert_eq!(h % g, 0);
            prop_assert_eq!(gcd(h / g, m), 1);
        }
    }
}
