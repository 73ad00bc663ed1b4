//! Closed-form densities `δ_γ(d)` of primes whose rank of appearance is
//! divisible by `d`, split by the Legendre symbol of `Δ`.
//!
//! Every closed form is a rational combination of the sums
//! `S_{d,e,h}(ν) = Σ_{v|d^∞, e|v} Σ_{u|d} μ(u)(uv,h)[ν|uv] / (φ(dv)uv)`,
//! which [`s_eval`] evaluates as a finite product.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, divides_power, gcd_power_infinity};
use crate::kummer::{self, ConductorData, SqrtData};
use crate::quadfield::{context_from_gamma, mu_size, power_index, PowerIndexData, QuadElem, SequenceContext};
use crate::{Error, Rational, Result};

fn r(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `S_{d,e,h}(ν)` in closed form.
pub fn s_eval(d: u64, e: u64, h: u64, nu: u64) -> Result<Rational> {
    if d == 0 || e == 0 || h == 0 || nu == 0 {
        return Err(Error::Zero("s_eval argument"));
    }
    let h_nu = gcd_power_infinity(h, nu);
    if nu % h_nu != 0 {
        return Err(Error::Hypothesis { h, nu });
    }
    if !divides_power(e, d) || !divides_power(nu, d) {
        return Ok(Rational::zero());
    }
    let big_d = d / gcd_power_infinity(d, nu);
    let h_d = gcd_power_infinity(h, d);
    let h_big_d = gcd_power_infinity(h, big_d);
    let l = BigInt::from(e).lcm(&(BigInt::from(nu) * BigInt::from(h_big_d)));
    let mut value = Rational::new(
        BigInt::from(h_d) * BigInt::from(nu),
        BigInt::from(d) * BigInt::from(arith::euler_phi(nu)) * &l * &l,
    );
    let e_nu = e.gcd(&nu);
    for p in arith::prime_factors(nu) {
        let pe_nu = BigInt::from(p * e).gcd(&BigInt::from(nu));
        value *= Rational::one() - Rational::new(&pe_nu * &pe_nu, BigInt::from(p) * BigInt::from(e_nu * e_nu));
    }
    for p in arith::prime_factors(d) {
        value *= Rational::new(BigInt::from(p * p), BigInt::from(p * p - 1));
    }
    Ok(value)
}

/// Which closed form produced a density.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Q0,
    Q1Real,
    Q1Imag,
    Gauss,
    Eisen,
    SwitchMinus1,
    GaussHi,
    EisenHomega,
    OddGeneric,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::Q0 => "Q0",
            CaseTag::Q1Real => "Q1_real",
            CaseTag::Q1Imag => "Q1_imag",
            CaseTag::Gauss => "GAUSS",
            CaseTag::Eisen => "EISEN",
            CaseTag::SwitchMinus1 => "SWITCH_MINUS1",
            CaseTag::GaussHi => "GAUSS_HI",
            CaseTag::EisenHomega => "EISEN_HOMEGA",
            CaseTag::OddGeneric => "ODD_GENERIC",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One evaluated `S_{d,e,h}(ν)` with its weights in `δ⁺` and `δ⁻`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct STerm {
    pub d: u64,
    pub e: u64,
    pub h: u64,
    pub nu: u64,
    pub coeff_plus: Rational,
    pub coeff_minus: Rational,
    pub value: Rational,
}

/// An auxiliary index (`e`, `e1`, `f`, ...) used at some level `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EValue {
    pub at_d: u64,
    pub name: &'static str,
    pub value: u64,
}

/// Inputs that fed the closed form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Echo {
    pub h: u64,
    pub zeta: &'static str,
    /// Data of the `h = h(1)` form the formulas ran on.
    pub normal_form: Option<QuadElem>,
    pub normal_h: u64,
    pub q_flag: Option<bool>,
    pub delta1: Option<BigInt>,
    pub delta2: Option<BigInt>,
    /// `f(L)` of the quartic or cubic field, when `Δ_K ∈ {−4, −3}`.
    pub conductor: Option<u64>,
    pub e_values: Vec<EValue>,
    pub m: Option<u32>,
    pub k: Option<u32>,
    /// Set by the `±i` and `ω^{±1}` routes.
    pub reduction: Option<Reduction>,
    pub route: Vec<CaseTag>,
}

/// `δ_γ(d) = factor · δ_{γ̃}(d')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub d_prime: u64,
    pub base: Rational,
    pub factor: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityResult {
    pub delta: Rational,
    pub delta_plus: Rational,
    pub delta_minus: Rational,
    pub case_tag: CaseTag,
    pub trace: Vec<STerm>,
    pub echo: Echo,
}

impl DensityResult {
    fn scaled(mut self, factor: &Rational) -> Self {
        self.delta *= factor;
        self.delta_plus *= factor;
        self.delta_minus *= factor;
        for t in self.trace.iter_mut() {
            t.coeff_plus *= factor;
            t.coeff_minus *= factor;
        }
        self
    }

    /// Recompute `δ⁺, δ⁻` from the trace.
    pub fn trace_totals(&self) -> (Rational, Rational) {
        let mut plus = Rational::zero();
        let mut minus = Rational::zero();
        for t in &self.trace {
            plus += &t.coeff_plus * &t.value;
            minus += &t.coeff_minus * &t.value;
        }
        (plus, minus)
    }
}

/// Closed enclosure `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Everything derived from a `γ` with `h = h(1)`.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub ctx: SequenceContext,
    pub pix: PowerIndexData,
    pub sqrt: SqrtData,
    /// Quartic conductor (`Δ_K = −4`) or cubic conductor (`Δ_K = −3`).
    pub conductor: Option<ConductorData>,
}

impl NormalForm {
    pub fn new(gamma: &QuadElem) -> Result<Self> {
        let ctx = context_from_gamma(gamma.u.clone(), gamma.v.clone(), gamma.disc)?;
        let pix = power_index(gamma)?;
        if pix.table[0] != pix.h || pix.zeta_star != 0 {
            return Err(Error::Case(format!("{gamma} has h(1) = {} below h = {}", pix.table[0], pix.h)));
        }
        let sqrt = kummer::sqrt_data(&pix.root(pix.h_part(2)))?;
        let conductor = match gamma.disc {
            -4 => Some(kummer::quartic_conductor(&pix.root(pix.h_part(2)))?),
            -3 => Some(kummer::cubic_conductor(&pix.root(pix.h_part(6)))?),
            _ => None,
        };
        Ok(NormalForm { ctx, pix, sqrt, conductor })
    }

    pub fn disc(&self) -> i64 {
        self.pix.disc
    }

    pub fn h(&self) -> u64 {
        self.pix.h
    }

    fn conductor_value(&self) -> Result<u64> {
        self.conductor
            .as_ref()
            .map(|c| c.value)
            .ok_or_else(|| Error::Case(String::from("conductor missing for a cyclotomic field")))
    }

    fn deltas(&self) -> Result<(&BigInt, &BigInt, bool)> {
        let s = self.sqrt.split.as_ref().ok_or_else(|| Error::Case(String::from("square-root data has norm −1")))?;
        Ok((&s.delta1, &s.delta2, s.c_positive))
    }

    fn echo(&self) -> Echo {
        let split = self.sqrt.split.as_ref();
        Echo {
            h: self.pix.h,
            zeta: "1",
            normal_form: Some(self.ctx.gamma.clone()),
            normal_h: self.pix.h,
            q_flag: Some(self.sqrt.q_flag),
            delta1: split.map(|s| s.delta1.clone()),
            delta2: split.map(|s| s.delta2.clone()),
            conductor: self.conductor.as_ref().map(|c| c.value),
            ..Echo::default()
        }
    }
}

/// `n/(d, n)` for a discriminant or conductor `n`.
fn cofactor(n: &BigInt, d: u64) -> Result<u64> {
    let n = n.abs();
    let q = &n / n.gcd(&BigInt::from(d));
    u64::try_from(q).map_err(|_| Error::Limit(format!("{n} does not fit in 64 bits")))
}

struct Builder {
    d: u64,
    h: u64,
    terms: Vec<STerm>,
    e_values: Vec<EValue>,
}

impl Builder {
    fn new(d: u64, h: u64) -> Self {
        Builder { d, h, terms: Vec::new(), e_values: Vec::new() }
    }

    fn note(&mut self, name: &'static str, value: u64) {
        self.e_values.push(EValue { at_d: self.d, name, value });
    }

    fn term(&mut self, e: u64, nu: u64, plus: Rational, minus: Rational) -> Result<()> {
        let value = s_eval(self.d, e, self.h, nu)?;
        self.terms.push(STerm { d: self.d, e, h: self.h, nu, coeff_plus: plus, coeff_minus: minus, value });
        Ok(())
    }

    /// A term entering `δ` with weight `w`, split evenly between `δ⁺, δ⁻`.
    fn even(&mut self, e: u64, nu: u64, w: Rational) -> Result<()> {
        let half = w / r(2);
        self.term(e, nu, half.clone(), half)
    }

    fn finish(self, tag: CaseTag, nf: &NormalForm) -> DensityResult {
        let mut plus = Rational::zero();
        let mut minus = Rational::zero();
        for t in &self.terms {
            plus += &t.coeff_plus * &t.value;
            minus += &t.coeff_minus * &t.value;
        }
        let mut echo = nf.echo();
        echo.e_values = self.e_values;
        echo.route.push(tag);
        DensityResult {
            delta: &plus + &minus,
            delta_plus: plus,
            delta_minus: minus,
            case_tag: tag,
            trace: self.terms,
            echo,
        }
    }
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Case(String::from(what)))
    }
}

/// `Q = 0`, `2 | d`.
pub fn delta_q0(d: u64, nf: &NormalForm) -> Result<DensityResult> {
    require(d % 2 == 0, "Q0 formulas need 2 | d")?;
    require(!nf.sqrt.q_flag, "Q0 formulas need norm −1")?;
    let (dk, h, h2) = (nf.disc() as u64, nf.h(), nf.pix.h_part(2));
    let e = dk / dk.gcd(&d);
    let mut b = Builder::new(d, h);
    b.note("e", e);
    b.term(1, 1, frac(1, 2), frac(3, 2))?;
    let minus = if e % h2 != 0 { frac(-3, 2) } else { Rational::zero() };
    b.term(e, 1, frac(1, 2), minus)?;
    Ok(b.finish(CaseTag::Q0, nf))
}

/// `Q = 1`, `Δ_K ∉ {−3, −4}`, `2 | d`.
pub fn delta_q1(d: u64, nf: &NormalForm) -> Result<DensityResult> {
    require(d % 2 == 0, "Q1 formulas need 2 | d")?;
    require(nf.disc() != -3 && nf.disc() != -4, "Q1 formulas exclude Q(i) and Q(ω)")?;
    let (d1, d2, c_positive) = nf.deltas()?;
    let (h, h2) = (nf.h(), nf.pix.h_part(2));
    let dk = nf.disc().unsigned_abs();
    let e = dk / dk.gcd(&d);
    let (e1, e2) = (cofactor(d1, d)?, cofactor(d2, d)?);
    let nu = 2 * h2;
    let mut b = Builder::new(d, h);
    b.note("e", e);
    b.note("e1", e1);
    b.note("e2", e2);
    let half = frac(1, 2);
    if nf.disc() < 0 {
        for (ee, n) in [(1, 1), (e, 1), (e1, nu), (e2, nu)] {
            b.term(ee, n, half.clone(), half.clone())?;
        }
        return Ok(b.finish(CaseTag::Q1Imag, nf));
    }
    let sign = if c_positive { frac(-1, 2) } else { frac(1, 2) };
    b.term(1, 1, half.clone(), half.clone())?;
    b.term(e, 1, half.clone(), -half.clone())?;
    b.term(e1, nu, half.clone(), sign.clone())?;
    b.term(e2, nu, half, -sign)?;
    Ok(b.finish(CaseTag::Q1Real, nf))
}

/// `Δ_K = −4`, `h = h(1)`, `2 | d`.
pub fn delta_gauss(d: u64, nf: &NormalForm) -> Result<DensityResult> {
    require(d % 2 == 0, "Gaussian formula needs 2 | d")?;
    require(nf.disc() == -4, "Gaussian formula needs Δ_K = −4")?;
    let (d1, d2, _) = nf.deltas()?;
    let (h, h2) = (nf.h(), nf.pix.h_part(2));
    let e = 4 / 4u64.gcd(&d);
    let (e1, e2) = (cofactor(d1, d)?, cofactor(d2, d)?);
    let f = cofactor(&BigInt::from(nf.conductor_value()?), d)?;
    let mut b = Builder::new(d, h);
    b.note("e", e);
    b.note("e1", e1);
    b.note("e2", e2);
    b.note("f", f);
    b.even(1, 1, r(1))?;
    b.even(e, 1, r(1))?;
    b.even(e1, 2 * h2, r(1))?;
    b.even(e2, 2 * h2, r(1))?;
    b.even(f, 4 * h2, r(4))?;
    Ok(b.finish(CaseTag::Gauss, nf))
}

/// `Δ_K = −3`, `h = h(1)`, `(d, 6) > 1`.
pub fn delta_eisen(d: u64, nf: &NormalForm) -> Result<DensityResult> {
    require(d.gcd(&6) > 1, "Eisenstein formula needs (d, 6) > 1")?;
    require(nf.disc() == -3, "Eisenstein formula needs Δ_K = −3")?;
    let (d1, d2, _) = nf.deltas()?;
    let pix = &nf.pix;
    let (h2, h3, h6) = (pix.h_part(2), pix.h_part(3), pix.h_part(6));
    let e_t = cofactor(d1, d)?.min(cofactor(d2, d)?);
    let f = cofactor(&BigInt::from(nf.conductor_value()?), d)?;
    let scale = if d % 3 == 0 { r(2) } else { r(1) };
    let mut b = Builder::new(d, nf.h());
    b.note("e~", e_t);
    b.note("f", f);
    b.even(1, 1, scale.clone())?;
    b.even(e_t, 2 * h2, scale.clone())?;
    b.even(f, 3 * h3, &scale * r(2))?;
    b.even(e_t.lcm(&f), 6 * h6, &scale * r(2))?;
    Ok(b.finish(CaseTag::Eisen, nf))
}

/// `d` odd (and prime to 3 when `Δ_K = −3`); `d = 1` gives 1.
pub fn delta_odd_generic(d: u64, nf: &NormalForm) -> Result<DensityResult> {
    let disc = nf.disc();
    require(d % 2 == 1, "odd formulas need 2 ∤ d")?;
    require(disc != -3 || d % 3 != 0, "odd formulas need 3 ∤ d over Q(ω)")?;
    let dk = disc.unsigned_abs();
    let e = dk / dk.gcd(&d);
    let mut b = Builder::new(d, nf.h());
    let half = frac(1, 2);
    if disc > 0 {
        b.note("e", e);
        b.term(1, 1, half.clone(), half.clone())?;
        b.term(e, 1, half.clone(), -half)?;
    } else if disc == -3 || disc == -4 {
        b.even(1, 1, r(1))?;
    } else {
        b.note("e", e);
        b.even(1, 1, r(1))?;
        b.even(e, 1, r(1))?;
    }
    Ok(b.finish(CaseTag::OddGeneric, nf))
}

/// Route a `h = h(1)` form to its closed form.
fn h_one_path(d: u64, nf: &NormalForm) -> Result<DensityResult> {
    let disc = nf.disc();
    if disc == -3 {
        if d.gcd(&6) > 1 {
            return delta_eisen(d, nf);
        }
        return certified_odd(d, nf);
    }
    if d % 2 == 1 {
        return certified_odd(d, nf);
    }
    match disc {
        -4 => delta_gauss(d, nf),
        _ if nf.sqrt.q_flag => delta_q1(d, nf),
        _ => delta_q0(d, nf),
    }
}

/// Cutoff for the series enclosure that certifies the odd-`d` closed forms.
pub const CERTIFY_CUTOFF: u64 = 1 << 16;

fn certified_odd(d: u64, nf: &NormalForm) -> Result<DensityResult> {
    let res = delta_odd_generic(d, nf)?;
    if d > 1 {
        let iv = series_oracle(nf, d, CERTIFY_CUTOFF)?;
        if !iv.contains(&res.delta) {
            return Err(Error::OracleMismatch(format!(
                "closed form {} for d = {d} lies outside [{}, {}]",
                res.delta, iv.lo, iv.hi
            )));
        }
    }
    Ok(res)
}

/// `δ_γ(d)` from an evaluator of `δ_{−γ}`, valid for `δ, δ⁺, δ⁻` alike.
pub fn switch_minus_one(d: u64, mut eval_minus: impl FnMut(u64) -> Result<DensityResult>) -> Result<DensityResult> {
    if d == 0 {
        return Err(Error::Zero("d"));
    }
    let mut out = if arith::valuation(d, 2) == 1 {
        let a = eval_minus(2 * d)?;
        let b = eval_minus(d / 2)?;
        let c = eval_minus(d)?.scaled(&-Rational::one());
        let mut echo = c.echo.clone();
        for part in [&a, &b] {
            echo.e_values.extend(part.echo.e_values.iter().cloned());
        }
        let mut trace = a.trace;
        trace.extend(b.trace);
        trace.extend(c.trace);
        DensityResult {
            delta: a.delta + b.delta + c.delta,
            delta_plus: a.delta_plus + b.delta_plus + c.delta_plus,
            delta_minus: a.delta_minus + b.delta_minus + c.delta_minus,
            case_tag: CaseTag::SwitchMinus1,
            trace,
            echo,
        }
    } else {
        eval_minus(d)?
    };
    out.case_tag = CaseTag::SwitchMinus1;
    out.echo.route.insert(0, CaseTag::SwitchMinus1);
    Ok(out)
}

fn split_prime(d: u64, p: u64) -> (u32, u64) {
    let k = arith::valuation(d, p);
    (k, d / p.pow(k))
}

/// `Δ_K = −4` with `h` attained at `ζ* = ±i` only; `nf` is the normal form
/// of `γ̃ = ζ*γ`.
pub fn delta_gauss_hi(d: u64, nf: &NormalForm) -> Result<DensityResult> {
    require(nf.disc() == -4, "needs Δ_K = −4")?;
    let (k, odd) = split_prime(d, 2);
    if k == 0 {
        let mut res = h_one_path(d, nf)?;
        res.case_tag = CaseTag::GaussHi;
        res.echo.route.insert(0, CaseTag::GaussHi);
        res.echo.k = Some(0);
        res.echo.reduction = Some(Reduction { d_prime: d, base: res.delta.clone(), factor: Rational::one() });
        return Ok(res);
    }
    let h2 = nf.pix.h_part(2);
    let (d1, _, _) = nf.deltas()?;
    let m =
        u32::from((BigInt::from(8 * odd) % d1.abs()).is_zero()) + u32::from((8 * odd * 2) % nf.conductor_value()? == 0);
    let factor = if k <= 2 {
        Rational::one() - Rational::new(BigInt::from(1u64 << k), BigInt::from(3 * (1u64 << (m + 2)) * h2))
    } else {
        Rational::new(BigInt::from(8), BigInt::from(3u64) * (BigInt::one() << (k + m)) * BigInt::from(h2))
    };
    let base = h_one_path(odd, nf)?;
    let reduction = Reduction { d_prime: odd, base: base.delta.clone(), factor: factor.clone() };
    let mut res = base.scaled(&factor);
    res.echo.reduction = Some(reduction);
    res.case_tag = CaseTag::GaussHi;
    res.echo.route.insert(0, CaseTag::GaussHi);
    res.echo.m = Some(m);
    res.echo.k = Some(k);
    Ok(res)
}

/// `Δ_K = −3` with `h` attained at `ζ* = ω^{±1}` only; `nf` is the normal
/// form of `γ̃ = ζ*γ`.
pub fn delta_eisen_homega(d: u64, nf: &NormalForm) -> Result<DensityResult> {
    require(nf.disc() == -3, "needs Δ_K = −3")?;
    let (k, rest) = split_prime(d, 3);
    if k == 0 {
        let mut res = h_one_path(d, nf)?;
        res.case_tag = CaseTag::EisenHomega;
        res.echo.route.insert(0, CaseTag::EisenHomega);
        res.echo.k = Some(0);
        res.echo.reduction = Some(Reduction { d_prime: d, base: res.delta.clone(), factor: Rational::one() });
        return Ok(res);
    }
    let h3 = nf.pix.h_part(3);
    let m = u32::from((9 * rest) % nf.conductor_value()? == 0);
    let three_m = BigInt::from(3u64.pow(m));
    let factor = if k == 1 {
        Rational::one() - Rational::new(BigInt::one(), BigInt::from(4 * h3) * three_m)
    } else {
        Rational::new(BigInt::from(9), BigInt::from(4 * h3) * BigInt::from(3u64).pow(k) * three_m)
    };
    let base = h_one_path(rest, nf)?;
    let reduction = Reduction { d_prime: rest, base: base.delta.clone(), factor: factor.clone() };
    let mut res = base.scaled(&factor);
    res.echo.reduction = Some(reduction);
    res.case_tag = CaseTag::EisenHomega;
    res.echo.route.insert(0, CaseTag::EisenHomega);
    res.echo.m = Some(m);
    res.echo.k = Some(k);
    Ok(res)
}

fn trivial(nf: &NormalForm) -> DensityResult {
    let mut b = Builder::new(1, nf.h());
    b.terms.push(STerm { d: 1, e: 1, h: nf.h(), nu: 1, coeff_plus: frac(1, 2), coeff_minus: frac(1, 2), value: r(1) });
    b.finish(CaseTag::OddGeneric, nf)
}

fn dispatch_inner(gamma: &QuadElem, d: u64, depth: u32) -> Result<DensityResult> {
    if depth > 2 {
        return Err(Error::UnreachableCase(format!("routing for {gamma} did not terminate")));
    }
    let pix = power_index(gamma)?;
    let name = pix.zeta_name();
    let mut res = match name {
        "1" => {
            let nf = NormalForm::new(gamma)?;
            if d == 1 {
                trivial(&nf)
            } else {
                h_one_path(d, &nf)?
            }
        }
        "-1" | "zeta6" | "zeta6^5" => {
            if d == 1 {
                let mut r = dispatch_inner(&gamma.neg(), 1, depth + 1)?;
                r.echo.route.insert(0, CaseTag::SwitchMinus1);
                r
            } else {
                let minus = gamma.neg();
                switch_minus_one(d, |n| dispatch_inner(&minus, n, depth + 1))?
            }
        }
        "i" | "-i" => {
            let nf = NormalForm::new(&pix.gamma_tilde)?;
            if d == 1 {
                trivial(&nf)
            } else {
                delta_gauss_hi(d, &nf)?
            }
        }
        "omega" | "omega^2" => {
            let nf = NormalForm::new(&pix.gamma_tilde)?;
            if d == 1 {
                trivial(&nf)
            } else {
                delta_eisen_homega(d, &nf)?
            }
        }
        other => return Err(Error::UnreachableCase(format!("no route for ζ* = {other}"))),
    };
    res.echo.h = pix.h;
    res.echo.zeta = name;
    Ok(res)
}

/// `δ_γ(d)` for a norm-one, non-torsion `γ`.
pub fn dispatch(gamma: &QuadElem, d: u64) -> Result<DensityResult> {
    if d == 0 {
        return Err(Error::Zero("d"));
    }
    let res = dispatch_inner(gamma, d, 0).map_err(|e| match e {
        Error::Case(msg) => Error::UnreachableCase(msg),
        other => other,
    })?;
    debug_assert_eq!(res.trace_totals(), (res.delta_plus.clone(), res.delta_minus.clone()));
    if res.delta.is_negative()
        || res.delta > Rational::one()
        || res.delta_plus.is_negative()
        || res.delta_minus.is_negative()
    {
        return Err(Error::UnreachableCase(format!("density {} outside [0, 1]", res.delta)));
    }
    Ok(res)
}

/// `δ_U(d)` for the Lucas sequence with parameters `(a₁, a₂)`.
pub fn density(ctx: &SequenceContext, d: u64) -> Result<DensityResult> {
    dispatch(&ctx.gamma, d)
}

/// Exact partial sum of the defining series over `v ≤ cutoff`, widened by
/// a rigorous bound on the omitted terms. Needs `h = h(1)`.
pub fn series_oracle(nf: &NormalForm, d: u64, cutoff: u64) -> Result<Interval> {
    enclose(nf, d, cutoff, false)
}

/// As [`series_oracle`], for `δ⁺` (split primes only).
pub fn series_oracle_plus(nf: &NormalForm, d: u64, cutoff: u64) -> Result<Interval> {
    enclose(nf, d, cutoff, true)
}

fn enclose(nf: &NormalForm, d: u64, cutoff: u64, plus_only: bool) -> Result<Interval> {
    if d == 0 || cutoff == 0 {
        return Err(Error::Zero("series_oracle argument"));
    }
    let us = arith::squarefree_divisors(d);
    let vs = arith::smooth_up_to(d, cutoff);
    let cond = nf.conductor.as_ref();
    let mut partial = Rational::zero();
    let mut head = Rational::zero();
    for &v in &vs {
        for &(u, mu) in &us {
            let n = d.checked_mul(v).ok_or_else(|| Error::Limit(String::from("level dv overflows")))?;
            let uv = u * v;
            let degree = kummer::kummer_degree(n, uv, &nf.pix, &nf.sqrt, cond)?;
            let weight =
                if plus_only { 1 } else { 1 + u64::from(kummer::sigma_exists(n, uv, &nf.ctx, &nf.pix, &nf.sqrt)) };
            partial += Rational::new(BigInt::from(mu as i64 * weight as i64), BigInt::from(degree));
        }
        head += Rational::new(BigInt::one(), BigInt::from(v) * BigInt::from(v));
    }
    let mut full = Rational::one();
    for p in arith::prime_factors(d) {
        full *= Rational::new(BigInt::from(p * p), BigInt::from(p * p - 1));
    }
    let per_v = Rational::new(
        BigInt::from(us.len() as u64 * 2 * mu_size(nf.disc()) as u64 * nf.h()),
        BigInt::from(arith::euler_phi(d)),
    );
    let tail = per_v * (full - head);
    Ok(Interval { lo: &partial - &tail, hi: partial + tail })
}

/// Oracle enclosure for the density of `γ` at `d`, evaluated on the
/// `h = h(1)` forms the closed form was reduced to.
pub fn oracle_for(gamma: &QuadElem, d: u64, cutoff: u64) -> Result<Interval> {
    let pix = power_index(gamma)?;
    let name = pix.zeta_name();
    match name {
        "1" => {
            if d == 1 {
                return Ok(Interval { lo: Rational::one(), hi: Rational::one() });
            }
            series_oracle(&NormalForm::new(gamma)?, d, cutoff)
        }
        "-1" | "zeta6" | "zeta6^5" => {
            let minus = gamma.neg();
            if arith::valuation(d, 2) == 1 {
                let a = oracle_for(&minus, 2 * d, cutoff)?;
                let b = oracle_for(&minus, d / 2, cutoff)?;
                let c = oracle_for(&minus, d, cutoff)?;
                Ok(Interval { lo: a.lo + b.lo - &c.hi, hi: a.hi + b.hi - &c.lo })
            } else {
                oracle_for(&minus, d, cutoff)
            }
        }
        _ => Err(Error::Case(format!("no series enclosure for ζ* = {name}; only the reduced odd part is checked"))),
    }
}
