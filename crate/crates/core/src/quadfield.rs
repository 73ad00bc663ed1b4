//! Exact arithmetic in a quadratic field `K = Q(√D)` with `D` a fundamental
//! discriminant, plus the power-index machinery that measures how far the
//! root quotient of a Lucas sequence is a perfect power in `K`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, squarefree_kernel};
use crate::{Error, Rational, Result};

/// `u + v·√disc` with rational coordinates over a fundamental discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub disc: i64,
    pub u: Rational,
    pub v: Rational,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn rat_to_f64(q: &Rational) -> f64 {
    // Large numerators and denominators are scaled down together so the
    // quotient survives the conversion.
    let (n, d) = (q.numer(), q.denom());
    let shift = core::cmp::max(n.bits(), d.bits()).saturating_sub(1000);
    let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
    nf / df
}

/// Fundamental discriminant of `Q(√n)` for a nonsquare integer `n`, together
/// with the scale `t` such that `√n = t·√D`.
pub fn fundamental_disc(n: &BigInt) -> Result<(i64, Rational)> {
    let (s, t) = squarefree_kernel(&Rational::from_integer(n.clone()))?;
    if s.is_one() {
        return Err(Error::Reducible);
    }
    let s = s.to_i64().ok_or_else(|| Error::Domain(format!("radicand kernel {s} too large")))?;
    if s.rem_euclid(4) == 1 {
        Ok((s, t))
    } else {
        // √s = √(4s)/2
        Ok((4 * s, t / rat(2)))
    }
}

impl QuadElem {
    pub fn new(disc: i64, u: Rational, v: Rational) -> Self {
        QuadElem { disc, u, v }
    }

    pub fn from_rational(disc: i64, u: Rational) -> Self {
        QuadElem { disc, u, v: Rational::zero() }
    }

    pub fn one(disc: i64) -> Self {
        Self::from_rational(disc, Rational::one())
    }

    /// `u + v·√radicand` for any nonsquare integer radicand, rewritten over the
    /// fundamental discriminant of its field.
    pub fn from_radicand(u: Rational, v: Rational, radicand: i64) -> Result<Self> {
        let (disc, t) = fundamental_disc(&BigInt::from(radicand))?;
        Ok(QuadElem { disc, u, v: v * t })
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.u.is_one() && self.v.is_zero()
    }

    pub fn norm(&self) -> Rational {
        &self.u * &self.u - rat(self.disc) * &self.v * &self.v
    }

    pub fn trace(&self) -> Rational {
        &self.u * rat(2)
    }

    pub fn conj(&self) -> Self {
        QuadElem { disc: self.disc, u: self.u.clone(), v: -&self.v }
    }

    pub fn neg(&self) -> Self {
        QuadElem { disc: self.disc, u: -&self.u, v: -&self.v }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.disc == other.disc {
            Ok(())
        } else {
            Err(Error::DiscMismatch { left: self.disc, right: other.disc })
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, o: &Self) -> Self {
        QuadElem {
            disc: self.disc,
            u: &self.u * &o.u + rat(self.disc) * &self.v * &o.v,
            v: &self.u * &o.v + &self.v * &o.u,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(QuadElem { disc: self.disc, u: &self.u + &other.u, v: &self.v + &other.v })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        QuadElem { disc: self.disc, u: &self.u * q, v: &self.v * q }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut exp = k.unsigned_abs();
        let mut acc = QuadElem::one(self.disc);
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(&sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.mul_unchecked(&sq);
            }
        }
        Ok(acc)
    }

    /// Coordinates `(c0, c1)` in the integral basis `1, ω` of the ring of
    /// integers, where `ω = √D/2` for `D ≡ 0 (mod 4)` and `(1+√D)/2` otherwise.
    pub fn integral_coords(&self) -> (Rational, Rational) {
        let two_v = &self.v * rat(2);
        if self.disc.rem_euclid(4) == 0 {
            (self.u.clone(), two_v)
        } else {
            (&self.u - &self.v, two_v)
        }
    }

    pub fn from_integral_coords(disc: i64, c0: Rational, c1: Rational) -> Self {
        let v = &c1 / rat(2);
        let u = if disc.rem_euclid(4) == 0 { c0 } else { c0 + &v };
        QuadElem { disc, u, v }
    }

    /// Smallest positive integer `m` with `m·x` in the ring of integers.
    pub fn denominator(&self) -> BigInt {
        let (c0, c1) = self.integral_coords();
        c0.denom().lcm(c1.denom())
    }

    pub fn is_integral(&self) -> bool {
        self.denominator().is_one()
    }

    /// Common denominator of the `u, v` coordinates (the printed form).
    pub fn coord_denominator(&self) -> BigInt {
        self.u.denom().lcm(self.v.denom())
    }

    /// Real embeddings `(u + v√D, u − v√D)` for `D > 0`, or the complex
    /// embedding `(re, im)` for `D < 0`.
    fn embed(&self) -> (f64, f64) {
        let u = rat_to_f64(&self.u);
        let v = rat_to_f64(&self.v);
        let r = libm::sqrt((self.disc.unsigned_abs()) as f64);
        if self.disc > 0 {
            // The smaller embedding comes from the exact norm; u ∓ v·√D cancels.
            let (big, small) = (u + v * r, u - v * r);
            let n = rat_to_f64(&self.norm());
            if libm::fabs(big) >= libm::fabs(small) {
                (big, if big != 0.0 { n / big } else { small })
            } else {
                (n / small, small)
            }
        } else {
            (u, v * r)
        }
    }

    /// Render as `(a + b√D)/c` with integer `a, b, c`.
    pub fn to_fraction_string(&self) -> String {
        let c = self.coord_denominator();
        let a = (&self.u * Rational::from_integer(c.clone())).to_integer();
        let b = (&self.v * Rational::from_integer(c.clone())).to_integer();
        let rad = format!("√{}", self.disc);
        let body = match (a.is_zero(), b.is_zero()) {
            (_, true) => format!("{a}"),
            (true, false) => format!("{}{rad}", coeff_str(&b)),
            (false, false) => {
                let sign = if b.is_negative() { "-" } else { "+" };
                format!("{a}{sign}{}{rad}", coeff_str(&b.abs()))
            }
        };
        if c.is_one() {
            body
        } else {
            format!("({body})/{c}")
        }
    }
}

fn coeff_str(b: &BigInt) -> String {
    if b.is_one() {
        String::new()
    } else if *b == -BigInt::one() {
        String::from("-")
    } else {
        format!("{b}")
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fraction_string())
    }
}

/// Free-function forms of the field operations.
pub fn qf_norm(x: &QuadElem) -> Rational {
    x.norm()
}
pub fn qf_conj(x: &QuadElem) -> QuadElem {
    x.conj()
}
pub fn qf_mul(x: &QuadElem, y: &QuadElem) -> Result<QuadElem> {
    x.mul(y)
}
pub fn qf_inv(x: &QuadElem) -> Result<QuadElem> {
    x.inv()
}
pub fn qf_pow(x: &QuadElem, k: i64) -> Result<QuadElem> {
    x.pow(k)
}

// ---------------------------------------------------------------------------
// Roots of unity

/// Number of roots of unity in `Q(√disc)`.
pub fn mu_size(disc: i64) -> u32 {
    match disc {
        -4 => 4,
        -3 => 6,
        _ => 2,
    }
}

/// `g^k` for the fixed generator `g` of `μ(K)`: `-1`, `i`, or `ζ6 = (1+√-3)/2`.
pub fn root_of_unity(disc: i64, k: u32) -> QuadElem {
    let n = mu_size(disc);
    let k = k % n;
    let gen = match disc {
        -4 => QuadElem::new(disc, Rational::zero(), crate::ratio(1, 2)),
        -3 => QuadElem::new(disc, crate::ratio(1, 2), crate::ratio(1, 2)),
        _ => QuadElem::from_rational(disc, rat(-1)),
    };
    gen.pow(k as i64).expect("roots of unity are invertible")
}

/// Human-readable name of `g^k`.
pub fn root_of_unity_name(disc: i64, k: u32) -> &'static str {
    match (mu_size(disc), k % mu_size(disc)) {
        (_, 0) => "1",
        (2, 1) | (4, 2) | (6, 3) => "-1",
        (4, 1) => "i",
        (4, 3) => "-i",
        (6, 1) => "zeta6",
        (6, 2) => "omega",
        (6, 4) => "omega^2",
        (6, 5) => "zeta6^5",
        _ => unreachable!(),
    }
}

/// Exponent of `-1` in the generator numbering.
pub fn minus_one_exponent(disc: i64) -> u32 {
    mu_size(disc) / 2
}

// ---------------------------------------------------------------------------
// Sequences

/// Parameters of a Lucas sequence together with its root quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceContext {
    pub a1: i64,
    pub a2: i64,
    /// `a1² − 4 a2`.
    pub delta: i64,
    pub disc_k: i64,
    pub gamma: QuadElem,
}

fn check_not_torsion(g: &QuadElem) -> Result<()> {
    let mut p = g.clone();
    for _ in 1..=6 {
        if p.is_one() {
            return Err(Error::Torsion);
        }
        p = p.mul_unchecked(g);
    }
    Ok(())
}

/// Context of `U(a1, a2)`: `γ = a/b` for the roots `a = (a1+√Δ)/2`, `b = (a1−√Δ)/2`.
pub fn make_context(a1: i64, a2: i64) -> Result<SequenceContext> {
    if a2 == 0 {
        return Err(Error::ZeroParameter("a2"));
    }
    if a1 == 0 {
        return Err(Error::ZeroParameter("a1"));
    }
    let delta = (a1 as i128) * (a1 as i128) - 4 * (a2 as i128);
    let delta_i64 = i64::try_from(delta).map_err(|_| Error::Domain(String::from("discriminant overflows i64")))?;
    if delta >= 0 && arith::exact_sqrt(&BigInt::from(delta)).is_some() {
        return Err(Error::Reducible);
    }
    let (disc_k, t) = fundamental_disc(&BigInt::from(delta))?;
    let two_a2 = BigInt::from(2 * a2 as i128);
    let u = Rational::new(BigInt::from(a1 as i128 * a1 as i128 - 2 * a2 as i128), two_a2.clone());
    let v = Rational::new(BigInt::from(a1), two_a2) * t;
    let gamma = QuadElem::new(disc_k, u, v);
    debug_assert!(gamma.norm().is_one());
    check_not_torsion(&gamma)?;
    Ok(SequenceContext { a1, a2, delta: delta_i64, disc_k, gamma })
}

/// Context for a root quotient given directly as `u + v·√radicand`.
///
/// A Lucas pair with the same root quotient is recovered from
/// `γ = α/ᾱ` with `α` a primitive integral multiple of `1 + γ`.
pub fn context_from_gamma(u: Rational, v: Rational, radicand: i64) -> Result<SequenceContext> {
    if v.is_zero() {
        return Err(Error::Domain(String::from("gamma must not be rational")));
    }
    let gamma = QuadElem::from_radicand(u, v, radicand)?;
    if !gamma.norm().is_one() {
        return Err(Error::NormNotOne);
    }
    check_not_torsion(&gamma)?;
    let z = gamma.add(&QuadElem::one(gamma.disc))?;
    let (c0, c1) = z.integral_coords();
    let den = c0.denom().lcm(c1.denom());
    let n0 = (&c0 * Rational::from_integer(den.clone())).to_integer();
    let n1 = (&c1 * Rational::from_integer(den)).to_integer();
    let g = n0.gcd(&n1);
    let alpha =
        QuadElem::from_integral_coords(gamma.disc, Rational::from_integer(n0 / &g), Rational::from_integer(n1 / &g));
    let a1 = alpha.trace().to_integer();
    let a2 = alpha.norm().to_integer();
    let to_i64 = |x: BigInt| x.to_i64().ok_or_else(|| Error::Domain(String::from("Lucas parameters overflow i64")));
    let (a1, a2) = (to_i64(a1)?, to_i64(a2)?);
    let delta = a1
        .checked_mul(a1)
        .and_then(|s| s.checked_sub(a2.checked_mul(4)?))
        .ok_or_else(|| Error::Domain(String::from("discriminant overflows i64")))?;
    debug_assert_eq!(alpha.div(&alpha.conj())?, gamma);
    Ok(SequenceContext { a1, a2, delta, disc_k: gamma.disc, gamma })
}

// ---------------------------------------------------------------------------
// n-th powers

fn round_to(x: f64, den: &BigInt) -> Option<Rational> {
    let scaled = x * den.to_f64()?;
    if !scaled.is_finite() {
        return None;
    }
    let r = libm::round(scaled);
    Some(Rational::new(BigInt::from(r as i128), den.clone()))
}

/// Nearest multiple of `1/den`.
fn snap(q: &Rational, den: &BigInt) -> Rational {
    let scaled = q * Rational::from_integer(den.clone());
    let r = (scaled + Rational::new(BigInt::one(), BigInt::from(2))).floor();
    r / Rational::from_integer(den.clone())
}

fn snap_elem(y: &QuadElem, den: &BigInt) -> QuadElem {
    QuadElem::new(y.disc, snap(&y.u, den), snap(&y.v, den))
}

fn max_coord(y: &QuadElem) -> Rational {
    core::cmp::max(y.u.abs(), y.v.abs())
}

/// Smallest `c` with `den | c^n`.
fn root_denominator(den: &BigInt, n: u32) -> Result<BigInt> {
    let mut c = BigInt::one();
    if den.is_one() {
        return Ok(c);
    }
    for (p, e) in arith::factorize_big(den)? {
        c *= BigInt::from(p).pow(e.div_ceil(n));
    }
    Ok(c)
}

/// Some `y ∈ K` with `y^n = x`, or `None` when `x` is not an n-th power.
///
/// Any root satisfies `c·y ∈ O_K` where `c` is the least integer with
/// `den(x) | c^n`, so its coordinates lie in `(1/2c)·Z`. Floating point roots
/// in each embedding are polished by Newton steps in `K` until they pin down
/// that lattice point, which is then re-powered exactly. A candidate whose
/// Newton iteration fails to settle makes the search report
/// [`Error::PrecisionExhausted`] rather than a false negative.
pub fn is_nth_power(x: &QuadElem, n: u32) -> Result<Option<QuadElem>> {
    if x.is_zero() {
        return Err(Error::Zero("is_nth_power argument"));
    }
    if n == 0 {
        return Err(Error::Domain(String::from("exponent must be positive")));
    }
    if n == 1 {
        return Ok(Some(x.clone()));
    }
    let lattice = root_denominator(&x.denominator(), n)? * BigInt::from(2);
    let sqrt_d = libm::sqrt(x.disc.unsigned_abs() as f64);
    let nf = n as f64;
    let (e1, e2) = x.embed();
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    let smallest;
    if x.disc > 0 {
        let root = |t: f64| -> Option<f64> {
            if t < 0.0 && n % 2 == 0 {
                None
            } else {
                Some(libm::copysign(libm::pow(libm::fabs(t), 1.0 / nf), t))
            }
        };
        if !(e1.is_finite() && e2.is_finite()) {
            return Err(Error::PrecisionExhausted);
        }
        let (r1, r2) = match (root(e1), root(e2)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(None),
        };
        smallest = libm::fmin(libm::fabs(r1), libm::fabs(r2));
        let signs: &[(f64, f64)] =
            if n % 2 == 0 { &[(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] } else { &[(1.0, 1.0)] };
        for &(s1, s2) in signs {
            let (c1, c2) = (s1 * r1, s2 * r2);
            candidates.push(((c1 + c2) / 2.0, (c1 - c2) / (2.0 * sqrt_d)));
        }
    } else {
        if !(e1.is_finite() && e2.is_finite()) {
            return Err(Error::PrecisionExhausted);
        }
        let modulus = libm::pow(libm::hypot(e1, e2), 1.0 / nf);
        let arg = libm::atan2(e2, e1);
        smallest = modulus;
        for k in 0..n {
            let theta = (arg + 2.0 * core::f64::consts::PI * k as f64) / nf;
            candidates.push((modulus * libm::cos(theta), modulus * libm::sin(theta) / sqrt_d));
        }
    }

    // Working grid: fine against both the target lattice and the spacing
    // n·|y|⁻¹ between neighbouring roots in an embedding.
    let need = 64.0 * nf * (1.0 + sqrt_d) / smallest;
    let lattice_f = lattice.to_f64().unwrap_or(f64::INFINITY);
    let mut grid = &lattice * BigInt::from(16);
    if need.is_finite() && need > 16.0 * lattice_f {
        grid = &lattice * (BigInt::one() << (libm::log2(need / lattice_f).ceil() as u64));
    }
    let tolerance = Rational::new(BigInt::one(), grid.clone());
    let mut unsettled = false;
    for (a, b) in candidates {
        let start = (round_to(a, &grid), round_to(b, &grid));
        let (Some(u), Some(v)) = start else {
            unsettled = true;
            continue;
        };
        let mut y = QuadElem::new(x.disc, u, v);
        let mut settled = false;
        for _ in 0..64 {
            if y.is_zero() {
                break;
            }
            // y ← y − (y − x·y^{1−n})/n
            let step = y.sub(&x.mul(&y.pow(1 - n as i64)?)?)?.scale(&Rational::new(BigInt::one(), BigInt::from(n)));
            y = snap_elem(&y.sub(&step)?, &grid);
            if max_coord(&step) < tolerance {
                settled = true;
                break;
            }
        }
        if !settled {
            unsettled = true;
            continue;
        }
        let cand = snap_elem(&y, &lattice);
        if cand.pow(n as i64)? == *x {
            return Ok(Some(cand));
        }
    }
    if unsettled {
        return Err(Error::PrecisionExhausted);
    }
    Ok(None)
}

/// Whether `disc` is the discriminant of a quadratic field.
pub fn is_fundamental(disc: i64) -> bool {
    if disc == 0 || disc == 1 {
        return false;
    }
    let squarefree = |m: i64| m != 0 && arith::factorize(m as i128).map(|f| f.is_squarefree()).unwrap_or(false);
    match disc.rem_euclid(4) {
        1 => squarefree(disc),
        0 => {
            let m = disc / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Units

/// Fundamental unit `ε > 1` of the ring of integers of `Q(√disc)`, `disc > 0`.
pub fn fundamental_unit(disc: i64) -> Result<QuadElem> {
    if disc <= 1 {
        return Err(Error::Domain(format!("fundamental unit needs a positive discriminant, got {disc}")));
    }
    if !is_fundamental(disc) {
        return Err(Error::Domain(format!("{disc} is not a fundamental discriminant")));
    }
    // Continued fraction of ω = (P + √N)/Q; its first convergent p/q with
    // N(p − qω) = ±1 yields ε = p − qω̄.
    let (n, p_, q_) = if disc % 4 == 0 { (disc / 4, 0i64, 1i64) } else { (disc, 1, 2) };
    let omega = if disc % 4 == 0 {
        QuadElem::new(disc, Rational::zero(), crate::ratio(1, 2))
    } else {
        QuadElem::new(disc, crate::ratio(1, 2), crate::ratio(1, 2))
    };
    let root = BigInt::from(n).sqrt();
    let (mut p0, mut p1) = (BigInt::zero(), BigInt::one());
    let (mut q0, mut q1) = (BigInt::one(), BigInt::zero());
    let (mut pb, mut qb) = (BigInt::from(p_), BigInt::from(q_));
    let nb = BigInt::from(n);
    for _ in 0..100_000 {
        let a = (&pb + &root).div_floor(&qb);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        p0 = core::mem::replace(&mut p1, p2);
        q0 = core::mem::replace(&mut q1, q2);
        let cand = QuadElem::from_rational(disc, Rational::from_integer(p1.clone()))
            .add(&omega.scale(&Rational::from_integer(-q1.clone())))?;
        let norm = cand.norm();
        if norm.abs().is_one() {
            let eps = QuadElem::from_rational(disc, Rational::from_integer(p1.clone()))
                .add(&omega.conj().scale(&Rational::from_integer(-q1.clone())))?;
            return Ok(eps);
        }
        pb = &a * &qb - &pb;
        qb = (&nb - &pb * &pb) / &qb;
    }
    Err(Error::Domain(format!("continued fraction for discriminant {disc} did not close")))
}

/// Write a unit as `sign·ε^k`.
fn unit_log(gamma: &QuadElem, eps: &QuadElem) -> Result<(i64, i64)> {
    let (e1, e2) = gamma.embed();
    let l = libm::log(libm::fmax(libm::fabs(e1), libm::fabs(e2)));
    let le = libm::log(eps.embed().0);
    let k = libm::round(l / le) as i64;
    for k in [k, -k] {
        let p = eps.pow(k)?;
        if p == *gamma {
            return Ok((1, k));
        }
        if p.neg() == *gamma {
            return Ok((-1, k));
        }
    }
    Err(Error::PrecisionExhausted)
}

// ---------------------------------------------------------------------------
// Power index

/// The table `ζ ↦ h(ζ)` over `μ(K)` and the maximizing data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerIndexData {
    pub disc: i64,
    /// `table[k] = h(g^k)` for the generator `g` of `μ(K)`.
    pub table: Vec<u64>,
    pub h: u64,
    /// Exponent `k` of the chosen `ζ* = g^k`.
    pub zeta_star: u32,
    /// `ζ*·γ`.
    pub gamma_tilde: QuadElem,
    /// Canonical `γ₀` with `γ₀^h = γ̃`.
    pub gamma0: QuadElem,
}

impl PowerIndexData {
    pub fn zeta_name(&self) -> &'static str {
        root_of_unity_name(self.disc, self.zeta_star)
    }

    pub fn h_of(&self, k: u32) -> u64 {
        self.table[(k % mu_size(self.disc)) as usize]
    }

    /// `h_m = (h, m^∞)`.
    pub fn h_part(&self, m: u64) -> u64 {
        arith::gcd_power_infinity(self.h, m)
    }

    /// Canonical `m`-th root of `γ̃` for `m | h`.
    pub fn root(&self, m: u64) -> QuadElem {
        assert!(self.h % m == 0, "root index must divide h");
        let y = self.gamma0.pow((self.h / m) as i64).expect("nonzero");
        canonical_root(&y, m)
    }
}

/// Among the `m`-th roots `ζy` (`ζ ∈ μ(K)`, `ζ^m = 1`) pick the one with the
/// smallest printed denominator, then positive rational part, then positive
/// irrational part.
pub fn canonical_root(y: &QuadElem, m: u64) -> QuadElem {
    let n = mu_size(y.disc);
    let mut best: Option<QuadElem> = None;
    for k in 0..n {
        let z = root_of_unity(y.disc, k);
        if !z.pow(m as i64).expect("unit").is_one() {
            continue;
        }
        let cand = z.mul_unchecked(y);
        let key = |q: &QuadElem| (q.coord_denominator(), q.u.is_negative(), q.v.is_negative(), q.u.abs(), q.v.abs());
        if best.as_ref().is_none_or(|b| key(&cand) < key(b)) {
            best = Some(cand);
        }
    }
    best.expect("the trivial twist always qualifies")
}

/// Tie-break order for `ζ*`: `1`, `−1`, then roots needing one reduction
/// (`±i`, `ω`, `ω²`), then `ζ6^{±1}`.
fn preference_order(disc: i64) -> &'static [u32] {
    match mu_size(disc) {
        2 => &[0, 1],
        4 => &[0, 2, 1, 3],
        _ => &[0, 3, 2, 4, 1, 5],
    }
}

/// Largest divisor `n` of `bound` such that `x` is an n-th power, with a root.
fn largest_power(x: &QuadElem, bound: u64) -> Result<(u64, QuadElem)> {
    let mut divs = arith::divisors(bound);
    divs.reverse();
    for n in divs {
        if let Some(y) = is_nth_power(x, n as u32)? {
            return Ok((n, y));
        }
    }
    unreachable!("1 always divides")
}

/// Compute `h(ζ)` for every `ζ ∈ μ(K)` and choose `ζ*`.
pub fn power_index(gamma: &QuadElem) -> Result<PowerIndexData> {
    if !gamma.norm().is_one() {
        return Err(Error::NormNotOne);
    }
    check_not_torsion(gamma)?;
    let disc = gamma.disc;
    let n = mu_size(disc);
    let mut table = Vec::with_capacity(n as usize);
    let mut roots = Vec::with_capacity(n as usize);
    let den = gamma.denominator();
    if den.is_one() {
        // A norm-one integer is a unit; imaginary fields only have torsion units.
        let eps = fundamental_unit(disc)?;
        let (sign, k) = unit_log(gamma, &eps)?;
        for z in 0..n {
            let twisted_sign = if z == 0 { sign } else { -sign };
            let h = if twisted_sign == 1 { k.unsigned_abs() } else { odd_part(k.unsigned_abs()) };
            let mut root = eps.pow(k / h as i64)?;
            if twisted_sign == -1 {
                root = root.neg();
            }
            table.push(h);
            roots.push(root);
        }
    } else {
        // γ = α/C with α primitive integral; N(α) = C², so the ideal exponents
        // of γ sit at split primes and equal ±v_p(C).
        let bound = arith::factorize_big(&den)?.iter().fold(0u64, |g, (_, e)| g.gcd(&(*e as u64)));
        for z in 0..n {
            let x = root_of_unity(disc, z).mul_unchecked(gamma);
            let (h, y) = largest_power(&x, bound)?;
            table.push(h);
            roots.push(y);
        }
    }
    let h = *table.iter().max().expect("nonempty");
    let zeta_star = *preference_order(disc).iter().find(|&&k| table[k as usize] == h).expect("max attained");
    let gamma_tilde = root_of_unity(disc, zeta_star).mul_unchecked(gamma);
    let gamma0 = canonical_root(&roots[zeta_star as usize], h);
    debug_assert_eq!(gamma0.pow(h as i64)?, gamma_tilde);
    Ok(PowerIndexData { disc, table, h, zeta_star, gamma_tilde, gamma0 })
}

fn odd_part(mut k: u64) -> u64 {
    while k % 2 == 0 && k > 0 {
        k /= 2;
    }
    k
}
