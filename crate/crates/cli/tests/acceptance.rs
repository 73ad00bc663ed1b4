//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Set `LUCAS_DENSITY_FULL=1` to add the slow run over primes up to `10^7`.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lucas_density::{empirical, ledger, to_f64, LedgerRow};
use lucas_density_core::density::{self, NormalForm};
use lucas_density_core::kummer;
use lucas_density_core::lucasrank::{self, EmpiricalReport};
use lucas_density_core::quadfield::{make_context, power_index, QuadElem};
use lucas_density_core::{arith, ratio, BigInt, Rational};
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

// Pinned tolerances.
const TABLE_BUDGET: Duration = Duration::from_secs(1);
const ORACLE_CUTOFF: u64 = 10_000;
const ORACLE_MAX_WIDTH: (i64, i64) = (1, 1000);
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const S_TUPLES: usize = 200;
const S_BRUTE_BOUND: u64 = 1 << 14;
const S_BUDGET: Duration = Duration::from_secs(60);
const EMPIRICAL_X: u64 = 1_000_000;
const EMPIRICAL_BUDGET: Duration = Duration::from_secs(300);
const FULL_X: u64 = 10_000_000;
const FULL_MAX_DEV: f64 = 1.5e-3;
const RANK_NAIVE_BELOW: u64 = 1000;
const RANK_DIVIDES_BELOW: u64 = 100_000;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(budget: Duration, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    ensure(took <= budget, || format!("took {took:?}, budget {budget:?}"))?;
    Ok(format!("{out} in {:.2}s", took.as_secs_f64()))
}

fn q(disc: i64, u: (i64, i64), v: (i64, i64)) -> QuadElem {
    QuadElem::new(disc, ratio(u.0, u.1), ratio(v.0, v.1))
}

fn exact_tables() -> Check {
    timed(TABLE_BUDGET, || {
        let rows = ledger();
        for row in &rows {
            let got = density::dispatch(&row.gamma(), row.d).map_err(|e| e.to_string())?.delta;
            ensure(got == row.expected(), || format!("{} d={}: {got} != {}", row.u, row.d, row.expected()))?;
        }
        let note = rows.iter().find_map(LedgerRow::note).ok_or("missing 661/8064 annotation")?;
        ensure(note.contains("661/8064") && note.contains("611/8064"), || note.clone())?;
        Ok(format!("{}/{} rows exact", rows.len(), rows.len()))
    })
}

/// Printed root column: `γ̃^{1/h2}` in the first two tables, `γ̃^{1/h6}` in the third.
fn printed_root(row: &LedgerRow) -> (QuadElem, Option<bool>) {
    match (row.u, row.radicand) {
        ("3", 8) => (q(8, (1, 1), (1, 2)), Some(false)),
        ("-27/2", _) => (q(29, (5, 2), (1, 2)), Some(false)),
        ("17/32", _) => (q(-15, (1, 4), (-1, 4)), Some(true)),
        ("-3/5", _) => (q(-4, (-3, 5), (2, 5)), None),
        ("48/50", _) => (q(-4, (3, 5), (2, 5)), None),
        ("-240/338", _) => (q(-4, (-24, 26), (5, 26)), None),
        ("-13/14", _) => (q(-3, (-13, 14), (3, 14)), None),
        ("683/686", _) => (q(-3, (1, 7), (4, 7)), None),
        ("1031/1369", _) => (q(-3, (13, 37), (20, 37)), None),
        _ => unreachable!("unknown ledger row"),
    }
}

fn is_root_of_unity(x: &QuadElem) -> bool {
    (1..=6).any(|k| x.pow(k).map(|p| p.is_one()).unwrap_or(false))
}

fn same_up_to_units(a: &QuadElem, b: &QuadElem) -> bool {
    [b.clone(), b.conj()].iter().any(|c| a.div(c).map(|r| is_root_of_unity(&r)).unwrap_or(false))
}

fn intermediates() -> Check {
    let mut seen = Vec::new();
    for row in ledger() {
        let g = row.gamma();
        let pix = power_index(&g).map_err(|e| e.to_string())?;
        let tag = format!("{} d={}", row.u, row.d);
        ensure(pix.h == row.h, || format!("{tag}: h = {} not {}", pix.h, row.h))?;
        ensure(pix.zeta_name() == row.zeta, || format!("{tag}: zeta = {} not {}", pix.zeta_name(), row.zeta))?;
        let (printed, q_flag) = printed_root(&row);
        let m = if row.radicand == -3 { pix.h_part(6) } else { pix.h_part(2) };
        let root = pix.root(m);
        ensure(same_up_to_units(&root, &printed), || format!("{tag}: root {root} vs printed {printed}"))?;
        if let Some(flag) = q_flag {
            let sq = kummer::sqrt_data(&pix.root(pix.h_part(2))).map_err(|e| e.to_string())?;
            ensure(sq.q_flag == flag, || format!("{tag}: Q = {}", sq.q_flag))?;
        }
        if let Some(f) = row.conductor {
            let nf = NormalForm::new(&pix.gamma_tilde).map_err(|e| e.to_string())?;
            let got = nf.conductor.map(|c| c.value);
            ensure(got == Some(f), || format!("{tag}: conductor {got:?} not {f}"))?;
            if !seen.contains(&f) {
                seen.push(f);
            }
        }
    }
    ensure(seen == [20, 40, 208, 7, 63, 333], || format!("conductors {seen:?}"))?;
    Ok(format!("h, zeta, roots, Q and conductors {seen:?} reproduced"))
}

fn fibonacci() -> Check {
    let ctx = make_context(1, -1).map_err(|e| e.to_string())?;
    let got = density::density(&ctx, 2).map_err(|e| e.to_string())?.delta;
    ensure(got == ratio(2, 3), || format!("got {got}"))?;
    Ok(String::from("Fibonacci d=2 gives 2/3"))
}

fn oracle() -> Check {
    timed(ORACLE_BUDGET, || {
        let max_width = ratio(ORACLE_MAX_WIDTH.0, ORACLE_MAX_WIDTH.1);
        let mut widest = Rational::zero();
        for row in ledger() {
            let pix = power_index(&row.gamma()).map_err(|e| e.to_string())?;
            let g = &pix.gamma_tilde;
            let value = density::dispatch(g, row.d).map_err(|e| e.to_string())?.delta;
            let nf = NormalForm::new(g).map_err(|e| e.to_string())?;
            let iv = density::series_oracle(&nf, row.d, ORACLE_CUTOFF).map_err(|e| e.to_string())?;
            let tag = format!("{} d={}", row.u, row.d);
            ensure(iv.contains(&value), || format!("{tag}: {value} outside [{}, {}]", iv.lo, iv.hi))?;
            ensure(iv.width() < max_width, || format!("{tag}: width {}", to_f64(&iv.width())))?;
            widest = widest.max(iv.width());
        }
        Ok(format!("18 normalized rows enclosed, widest {:.2e}", to_f64(&widest)))
    })
}

/// Truncated double sum with its tail bound.
fn brute_s(d: u64, e: u64, h: u64, nu: u64, bound: u64) -> (Rational, Rational) {
    let us = arith::squarefree_divisors(d);
    let mut sum = Rational::zero();
    let mut head = Rational::zero();
    for v in arith::smooth_up_to(d, bound) {
        head += Rational::new(BigInt::one(), BigInt::from(v * v));
        if v % e != 0 {
            continue;
        }
        for &(u, mu) in &us {
            if (u * v) % nu == 0 {
                let num = mu as i64 * arith::gcd(u * v, h) as i64;
                sum += Rational::new(BigInt::from(num), BigInt::from(arith::euler_phi(d * v) * u * v));
            }
        }
    }
    let mut full = Rational::one();
    for p in arith::prime_factors(d) {
        full *= Rational::new(BigInt::from(p * p), BigInt::from(p * p - 1));
    }
    let scale = Rational::new(BigInt::from(us.len() as u64 * h), BigInt::from(arith::euler_phi(d)));
    (sum, (full - head) * scale)
}

fn s_oracle() -> Check {
    timed(S_BUDGET, || {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        let mut checked = 0;
        while checked < S_TUPLES {
            let d = rng.gen_range(1..=60u64);
            let ps = arith::prime_factors(d);
            let mut e = 1u64;
            for p in &ps {
                e *= p.pow(rng.gen_range(0..3));
            }
            if rng.gen_bool(0.1) {
                e *= 7;
            }
            let h = rng.gen_range(1..=24u64);
            let nu = [1u64, 2, 3, 4, 6, 8, 12][rng.gen_range(0..7)];
            if nu % arith::gcd_power_infinity(h, nu) != 0 {
                continue;
            }
            let exact = density::s_eval(d, e, h, nu).map_err(|err| err.to_string())?;
            let (sum, tail) = brute_s(d, e, h, nu, S_BRUTE_BOUND);
            ensure((&exact - &sum).abs() <= tail, || format!("S({d},{e},{h},{nu}) = {exact}, sum {sum}"))?;
            checked += 1;
        }
        Ok(format!("{S_TUPLES} random tuples within the tail bound"))
    })
}

fn empirical_rows(
    x: u64,
    judge: impl Fn(&LedgerRow, f64, &EmpiricalReport) -> Result<f64, String>,
) -> Result<f64, String> {
    let spf = lucasrank::spf_sieve(x + 1).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for row in ledger() {
        let ctx = row.spec().context().map_err(|e| e.to_string())?;
        let (counts, _) = empirical(&ctx, row.d, x, &spf, false).map_err(|e| e.to_string())?;
        let rep = EmpiricalReport::new(&ctx, row.d, x, counts, Some(row.expected()));
        worst = worst.max(judge(&row, to_f64(&rep.ratio()), &rep)?);
    }
    Ok(worst)
}

fn empirical_gate() -> Check {
    timed(EMPIRICAL_BUDGET, || {
        let worst = empirical_rows(EMPIRICAL_X, |row, got, rep| {
            let delta = to_f64(&row.expected());
            let tol = lucasrank::tolerance(delta, rep.counts.eligible);
            let dev = (got - delta).abs();
            ensure(dev <= tol, || format!("{} d={}: deviation {dev:.6} > {tol:.6}", row.u, row.d))?;
            Ok(dev / tol)
        })?;
        let mut msg = format!("18 rows within tolerance at x=1e6 (worst {:.0}% of allowance)", worst * 100.0);
        if std::env::var_os("LUCAS_DENSITY_FULL").is_some() {
            let dev = empirical_rows(FULL_X, |row, got, _| {
                let dev = (got - row.experimental).abs();
                ensure(dev <= FULL_MAX_DEV, || {
                    format!("{} d={}: {got:.6} vs reference {}", row.u, row.d, row.experimental)
                })?;
                Ok(dev)
            })?;
            msg.push_str(&format!("; x=1e7 within {dev:.1e} of reference values"));
        } else {
            msg.push_str("; x=1e7 run skipped");
        }
        Ok(msg)
    })
}

fn properties() -> Check {
    let gammas = [
        q(8, (3, 1), (1, 1)),
        make_context(1, -1).map_err(|e| e.to_string())?.gamma,
        q(-4, (-3, 5), (2, 5)),
        q(-3, (-13, 14), (3, 14)),
        q(-15, (17, 32), (7, 32)),
    ];
    let mut checks = 0u32;
    for g in &gammas {
        let mut memo: HashMap<(bool, bool, u64), density::DensityResult> = HashMap::new();
        let mut get = |conj: bool, neg: bool, d: u64| -> Result<density::DensityResult, String> {
            if let Some(r) = memo.get(&(conj, neg, d)) {
                return Ok(r.clone());
            }
            let mut x = if conj { g.conj() } else { g.clone() };
            if neg {
                x = x.neg();
            }
            let r = density::dispatch(&x, d).map_err(|e| e.to_string())?;
            memo.insert((conj, neg, d), r.clone());
            Ok(r)
        };
        let one = get(false, false, 1)?;
        ensure(one.delta.is_one(), || format!("{g}: delta(1) = {}", one.delta))?;
        for d in 1..=60u64 {
            let r = get(false, false, d)?;
            let tag = format!("{g} d={d}");
            ensure(r.delta == &r.delta_plus + &r.delta_minus, || format!("{tag}: split does not add up"))?;
            if g.disc < 0 {
                ensure(r.delta_plus == r.delta_minus, || format!("{tag}: delta+ != delta-"))?;
            }
            ensure(get(true, false, d)?.delta == r.delta, || format!("{tag}: conjugate differs"))?;
            if arith::valuation(d, 2) != 1 {
                ensure(get(false, true, d)?.delta == r.delta, || format!("{tag}: -gamma differs"))?;
            }
            for m in (2 * d..=60).step_by(d as usize) {
                ensure(get(false, false, m)?.delta <= r.delta, || format!("{tag}: delta({m}) exceeds delta({d})"))?;
            }
            checks += 1;
        }
    }
    let minus = q(8, (-3, 1), (-1, 1));
    for d in [2u64, 6, 10, 8, 12] {
        let direct = density::dispatch(&minus, d).map_err(|e| e.to_string())?;
        let plus = q(8, (3, 1), (1, 1));
        let sw = density::switch_minus_one(d, |n| density::dispatch(&plus, n)).map_err(|e| e.to_string())?;
        ensure(direct.delta == sw.delta, || format!("switch formula at d={d}"))?;
    }
    Ok(format!("{checks} (gamma, d) pairs satisfy all identities"))
}

fn ranks() -> Check {
    let spf = lucasrank::spf_sieve(RANK_DIVIDES_BELOW + 1).map_err(|e| e.to_string())?;
    let mut n = 0u64;
    for (a1, a2) in [(1i64, -1i64), (3, 5), (2, 3), (5, -7)] {
        let ctx = make_context(a1, a2).map_err(|e| e.to_string())?;
        for p in spf.primes_in(3..RANK_DIVIDES_BELOW) {
            if ctx.a2 % p as i64 == 0 || ctx.delta % p as i64 == 0 {
                continue;
            }
            let r = lucasrank::rank(p, &ctx, &spf).map_err(|e| e.to_string())?;
            let m = (p as i64 - lucasrank::legendre(ctx.delta as i128, p) as i64) as u64;
            ensure(m % r == 0, || format!("({a1},{a2}) p={p}: rank {r} does not divide {m}"))?;
            if p < RANK_NAIVE_BELOW {
                let naive = lucasrank::naive_rank(p, a1, a2);
                ensure(naive == Some(r), || format!("({a1},{a2}) p={p}: {r} vs naive {naive:?}"))?;
            }
            n += 1;
        }
    }
    Ok(format!("{n} ranks checked"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exact table reproduction", exact_tables),
        ("intermediate columns", intermediates),
        ("Fibonacci anchor", fibonacci),
        ("series oracle consistency", oracle),
        ("S-sum brute force", s_oracle),
        ("empirical densities", empirical_gate),
        ("property suites", properties),
        ("rank correctness", ranks),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
