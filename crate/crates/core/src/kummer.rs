//! Square-root data for `γ^{1/h₂}`, conductors of the cyclic quartic and
//! cubic fields cut out by higher roots of `γ`, and degrees of the Kummer
//! extensions `K(ζ_n, γ^{1/d})`.

mod round2;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, squarefree_kernel};
use crate::quadfield::{is_nth_power, mu_size, PowerIndexData, QuadElem, SequenceContext};
use crate::{Error, Rational, Result};

/// Fundamental discriminant of `Q(√q)`, or 1 when `q` is a square.
pub fn quad_disc(q: &Rational) -> Result<BigInt> {
    if q.is_zero() {
        return Err(Error::Zero("quad_disc argument"));
    }
    let (s, _) = squarefree_kernel(q)?;
    if s.is_one() {
        return Ok(s);
    }
    if s.mod_floor(&BigInt::from(4)).is_one() {
        Ok(s)
    } else {
        Ok(s * 4)
    }
}

fn divides(d: &BigInt, n: u64) -> bool {
    (BigInt::from(n) % d.abs()).is_zero()
}

/// Data attached to `y = γ^{1/h₂}` when its norm is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitData {
    /// `(u − 1)/2` for `y = u + v√Δ_K`.
    pub c: Rational,
    /// Discriminant of `Q(√c)`.
    pub delta1: BigInt,
    /// Discriminant of `Q(√(c/Δ_K))`.
    pub delta2: BigInt,
    pub c_positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtData {
    /// Whether `y` has norm 1.
    pub q_flag: bool,
    /// Present exactly when `q_flag` holds.
    pub split: Option<SplitData>,
}

impl SqrtData {
    /// Whether `y` is a square in `K(ζ_n)`.
    pub fn square_in_cyclotomic(&self, n: u64) -> bool {
        match &self.split {
            Some(s) => divides(&s.delta1, n) || divides(&s.delta2, n),
            None => false,
        }
    }
}

pub fn sqrt_data(y: &QuadElem) -> Result<SqrtData> {
    let norm = y.norm();
    if norm == -Rational::one() {
        return Ok(SqrtData { q_flag: false, split: None });
    }
    if !norm.is_one() {
        return Err(Error::Domain(format!("square-root data needs norm ±1, got {norm}")));
    }
    let c = (&y.u - Rational::one()) / Rational::from_integer(BigInt::from(2));
    if c.is_zero() {
        return Err(Error::Degenerate);
    }
    let delta1 = quad_disc(&c)?;
    let delta2 = quad_disc(&(&c / Rational::from_integer(BigInt::from(y.disc))))?;
    let c_positive = c.is_positive();
    Ok(SqrtData { q_flag: true, split: Some(SplitData { c, delta1, delta2, c_positive }) })
}

fn no_rational_root(f: &[BigInt]) -> Result<bool> {
    let a0 = &f[0];
    if a0.is_zero() {
        return Ok(false);
    }
    for d in big_divisors(a0)? {
        for r in [d.clone(), -d] {
            let mut acc = BigInt::zero();
            for c in f.iter().rev() {
                acc = acc * &r + c;
            }
            if acc.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn big_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut out = alloc::vec![BigInt::one()];
    for (p, e) in arith::factorize_big(n)? {
        let p = BigInt::from(p);
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    Ok(out)
}

/// Whether the monic quartic splits into two monic integer quadratics.
fn has_quadratic_factor(f: &[BigInt]) -> Result<bool> {
    let (a0, a1, a2, a3) = (&f[0], &f[1], &f[2], &f[3]);
    for d in big_divisors(a0)? {
        for c in [d.clone(), -d] {
            // (X² + bX + c)(X² + b'X + e): b + b' = a3, bb' = a2 − c − e
            let e = a0 / &c;
            let s = a2 - &c - &e;
            let disc = a3 * a3 - BigInt::from(4) * &s;
            if disc.is_negative() {
                continue;
            }
            let Some(r) = arith::exact_sqrt(&disc) else {
                continue;
            };
            for r in [r.clone(), -r] {
                let twice_b = a3 + &r;
                if twice_b.is_odd() {
                    continue;
                }
                let b = twice_b / 2;
                let b2 = a3 - &b;
                if &b * &e + &c * &b2 == *a1 {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Discriminant of `Q[X]/(f)` for a monic irreducible integer polynomial of
/// degree 2, 3 or 4, given with coefficients from the constant term upward.
pub fn poly_field_disc(coeffs: &[BigInt]) -> Result<BigInt> {
    let deg = coeffs.len().saturating_sub(1);
    if !(2..=4).contains(&deg) {
        return Err(Error::Domain(format!("degree {deg} outside 2..=4")));
    }
    if !coeffs[deg].is_one() {
        return Err(Error::Domain(String::from("polynomial must be monic")));
    }
    if round2::poly_disc(coeffs).is_zero() || !no_rational_root(coeffs)? {
        return Err(Error::Reducible);
    }
    if deg == 4 && has_quadratic_factor(coeffs)? {
        return Err(Error::Reducible);
    }
    round2::field_disc(coeffs)
}

/// Conductor `f(L)` of the abelian field cut out by a root of `γ`, written
/// as `p^exponent · cofactor` with `p = 2` (quartic) or `p = 3` (cubic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConductorData {
    pub value: u64,
    pub exponent: u32,
    /// Squarefree part coprime to `p`.
    pub cofactor: u64,
}

fn split_conductor(value: &BigInt, p: u64) -> Result<ConductorData> {
    let v = value.to_u64().ok_or_else(|| Error::Shape(format!("conductor {value} exceeds 64 bits")))?;
    let exponent = arith::valuation(v, p);
    let cofactor = v / p.pow(exponent);
    if !arith::factorize_u64(cofactor).is_squarefree() {
        return Err(Error::Shape(format!("{v}: part prime to {p} is not squarefree")));
    }
    Ok(ConductorData { value: v, exponent, cofactor })
}

fn check_root_input(y: &QuadElem, disc: i64, n: u32) -> Result<()> {
    if y.disc != disc {
        return Err(Error::Domain(format!("expected an element of discriminant {disc}, got {}", y.disc)));
    }
    if !y.norm().is_one() {
        return Err(Error::NormNotOne);
    }
    if is_nth_power(y, n)?.is_some() {
        return Err(Error::Domain(format!("{y} is already a {n}-th power in K")));
    }
    Ok(())
}

fn big(q: &Rational) -> (BigInt, BigInt) {
    (q.numer().clone(), q.denom().clone())
}

/// Conductor of `Q(i, y^{1/4})` for `y = γ^{1/h₂}` in `Q(i)` with norm 1.
pub fn quartic_conductor(y: &QuadElem) -> Result<ConductorData> {
    check_root_input(y, -4, 2)?;
    // y^{1/4} = α + i·β with 2α² = 1 + √c, 2β² = 1 − √c; this c is
    // (u + 1)/2, which lies in (0, 1) because u² + 4v² = 1.
    let c = (&y.u + Rational::one()) / Rational::from_integer(BigInt::from(2));
    // X⁴ − X² + (1 − c)/4 under X = Y/D
    let a = (Rational::one() - &c) / Rational::from_integer(BigInt::from(4));
    let (num, den) = big(&a);
    let f = [num * den.pow(3), BigInt::zero(), -(&den * &den), BigInt::zero(), BigInt::one()];
    let disc_f = poly_field_disc(&f)?;
    let delta1 = quad_disc(&c)?;
    let quotient = disc_f.abs().div_rem(&delta1.abs());
    let f_f = if quotient.1.is_zero() { arith::exact_sqrt(&quotient.0) } else { None }
        .ok_or_else(|| Error::Shape(format!("|disc F| = {} is not f(F)²·|{delta1}|", disc_f.abs())))?;
    let value = f_f.lcm(&BigInt::from(4));
    let data = split_conductor(&value, 2)?;
    if !(2..=4).contains(&data.exponent) {
        return Err(Error::Shape(format!("{}: 2-exponent {} outside 2..=4", data.value, data.exponent)));
    }
    Ok(data)
}

/// Conductor of the cyclic cubic field `Q(y^{1/3} + y^{-1/3})` for
/// `y = γ^{1/h₆}` in `Q(√−3)` with norm 1.
pub fn cubic_conductor(y: &QuadElem) -> Result<ConductorData> {
    check_root_input(y, -3, 3)?;
    // X³ − 3X − 2u under X = Y/b
    let (a, b) = big(&y.u);
    let b2 = &b * &b;
    let f = [-(BigInt::from(2) * a * &b2), -(BigInt::from(3) * &b2), BigInt::zero(), BigInt::one()];
    let disc = poly_field_disc(&f)?;
    let value =
        arith::exact_sqrt(&disc).ok_or_else(|| Error::Shape(format!("field discriminant {disc} is not a square")))?;
    let data = split_conductor(&value, 3)?;
    if data.exponent != 0 && data.exponent != 2 {
        return Err(Error::Shape(format!("{}: 3-exponent {} outside {{0, 2}}", data.value, data.exponent)));
    }
    if arith::prime_factors(data.cofactor).iter().any(|&p| p % 3 != 1) {
        return Err(Error::Shape(format!("{}: a prime factor is not 1 mod 3", data.value)));
    }
    Ok(data)
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

/// Whether `γ^{1/(m·h_m)} ∈ K(ζ_n)` for `m | #μ(K)`.
fn root_in_cyclotomic(m: u64, n: u64, disc: i64, sqrt: &SqrtData, cond: Option<&ConductorData>) -> Result<bool> {
    let need = |kind: i64| -> Result<u64> {
        match cond {
            Some(c) if disc == kind => Ok(c.value),
            _ => Err(Error::Domain(format!("conductor data required for discriminant {kind}"))),
        }
    };
    Ok(match m {
        1 => true,
        2 => sqrt.square_in_cyclotomic(n),
        4 => sqrt.square_in_cyclotomic(n) && lcm_u64(4, n) % need(-4)? == 0,
        3 => n % need(-3)? == 0,
        6 => sqrt.square_in_cyclotomic(n) && n % need(-3)? == 0,
        _ => unreachable!("m divides #μ(K)"),
    })
}

fn check_h_one(pix: &PowerIndexData) -> Result<()> {
    if pix.table[0] != pix.h {
        return Err(Error::Domain(format!("expected h = h(1), but h(1) = {} < h = {}", pix.table[0], pix.h)));
    }
    Ok(())
}

/// `[K(ζ_n, γ^{1/dd}) : Q]` for `dd | n`.
pub fn kummer_degree(
    n: u64,
    dd: u64,
    pix: &PowerIndexData,
    sqrt: &SqrtData,
    cond: Option<&ConductorData>,
) -> Result<u64> {
    if n == 0 || dd == 0 || n % dd != 0 {
        return Err(Error::Domain(format!("dd = {dd} must divide n = {n}")));
    }
    check_h_one(pix)?;
    let mu = mu_size(pix.disc) as u64;
    let mut t = 1;
    for m in arith::divisors(mu) {
        if dd % (m * pix.h_part(m)) == 0 && root_in_cyclotomic(m, n, pix.disc, sqrt, cond)? {
            t = t.max(m);
        }
    }
    let num = dd as u128 * arith::euler_phi(n) as u128;
    let den = dd.gcd(&pix.h) as u128 * t as u128;
    debug_assert_eq!(num % den, 0);
    let mut degree = num / den;
    if n % pix.disc.unsigned_abs() != 0 {
        degree *= 2;
    }
    u64::try_from(degree).map_err(|_| Error::Limit(format!("degree of level {n} exceeds 64 bits")))
}

/// Whether `Gal(K_{dv,uv}/Q)` contains an automorphism restricting to
/// complex conjugation on `K` and to `ζ ↦ ζ^{-1}` on `Q(ζ_dv)` while
/// inverting `γ^{1/uv}`.
pub fn sigma_exists(dv: u64, uv: u64, ctx: &SequenceContext, pix: &PowerIndexData, sqrt: &SqrtData) -> bool {
    if ctx.delta < 0 {
        return true;
    }
    let disc_divides = dv % ctx.disc_k.unsigned_abs() == 0;
    let h2 = pix.h_part(2);
    let square = uv % (2 * h2) == 0 && sqrt.square_in_cyclotomic(dv);
    if !square {
        return !disc_divides && (uv % h2 != 0 || sqrt.q_flag);
    }
    let s = sqrt.split.as_ref().expect("square test implies norm 1");
    !disc_divides && ((!s.c_positive && divides(&s.delta1, dv)) || (s.c_positive && divides(&s.delta2, dv)))
}
