//! Field discriminants of monic integer polynomials of small degree, by
//! enlarging `Z[θ]` to a p-maximal order one prime at a time.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{arith, Error, Rational, Result};

/// Coefficients from the constant term upward; monic.
pub(crate) type Poly = [BigInt];

fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Discriminant of a monic polynomial, `(−1)^{n(n−1)/2}·Res(f, f')`.
pub(crate) fn poly_disc(f: &Poly) -> BigInt {
    let n = f.len() - 1;
    let df: Vec<BigInt> = (1..=n).map(|i| &f[i] * BigInt::from(i)).collect();
    let size = 2 * n - 1;
    let mut syl = vec![vec![BigInt::zero(); size]; size];
    // Sylvester rows carry coefficients from the leading one downward.
    for r in 0..n - 1 {
        for (k, c) in f.iter().rev().enumerate() {
            syl[r][r + k] = c.clone();
        }
    }
    for r in 0..n {
        for (k, c) in df.iter().rev().enumerate() {
            syl[n - 1 + r][r + k] = c.clone();
        }
    }
    let res = det_bareiss(syl);
    if (n * (n - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

/// `a·b mod f` on power-basis coordinates.
fn mul_mod(a: &[Rational], b: &[Rational], f: &Poly) -> Vec<Rational> {
    let n = f.len() - 1;
    let mut prod = vec![Rational::zero(); 2 * n - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    for k in (n..2 * n - 1).rev() {
        let c = core::mem::replace(&mut prod[k], Rational::zero());
        if c.is_zero() {
            continue;
        }
        for (j, fj) in f.iter().take(n).enumerate() {
            prod[k - n + j] -= &c * Rational::from_integer(fj.clone());
        }
    }
    prod.truncate(n);
    prod
}

fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..2 * n {
                    let t = &factor * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn det_rational(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            let factor = &a[r][col] / &a[col][col];
            for c in col..n {
                let t = &factor * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    det
}

/// Row vector times matrix.
fn vec_mat(v: &[Rational], m: &[Vec<Rational>]) -> Vec<Rational> {
    let n = m[0].len();
    (0..n).map(|j| v.iter().zip(m).map(|(x, row)| x * &row[j]).sum()).collect()
}

fn not_closed() -> Error {
    Error::Domain(String::from("order enlargement left the ring of integers"))
}

fn to_integers(v: &[Rational]) -> Result<Vec<BigInt>> {
    v.iter().map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(not_closed()) }).collect()
}

/// Hermite normal form basis of the lattice spanned by `rows` (full rank).
fn hnf(mut rows: Vec<Vec<BigInt>>, n: usize) -> Vec<Vec<BigInt>> {
    let mut out = Vec::with_capacity(n);
    for col in 0..n {
        loop {
            rows.retain(|r| r.iter().any(|x| !x.is_zero()));
            let Some((best, _)) = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .min_by(|a, b| a.1[col].abs().cmp(&b.1[col].abs()))
            else {
                break;
            };
            let pivot = rows.swap_remove(best);
            let mut reduced = false;
            for r in rows.iter_mut() {
                if r[col].is_zero() {
                    continue;
                }
                let q = r[col].div_floor(&pivot[col]);
                for (x, y) in r.iter_mut().zip(&pivot) {
                    *x -= &q * y;
                }
                if !r[col].is_zero() {
                    reduced = true;
                }
            }
            if !reduced {
                let mut pivot = pivot;
                if pivot[col].is_negative() {
                    pivot.iter_mut().for_each(|x| *x = -&*x);
                }
                out.push(pivot);
                break;
            }
            rows.push(pivot);
        }
    }
    out
}

/// Basis of `{x : M·x ≡ 0 mod p}`.
fn nullspace_mod(mat: &[Vec<BigInt>], cols: usize, p: &BigInt) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = mat.iter().map(|r| r.iter().map(|x| x.mod_floor(p)).collect()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(piv) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, piv);
        let inv = a[row][col].modpow(&(p - BigInt::from(2)), p);
        for x in a[row].iter_mut() {
            *x = (&*x * &inv).mod_floor(p);
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..cols {
                    let t = &factor * &a[row][c];
                    a[r][c] = (&a[r][c] - t).mod_floor(p);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigInt::zero(); cols];
        v[free] = BigInt::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = (-&a[r][free]).mod_floor(p);
        }
        basis.push(v);
    }
    basis
}

fn transpose(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// An order given by a basis in power-basis coordinates.
struct Order<'a> {
    #[allow(dead_code)]
    f: &'a Poly,
    basis: Vec<Vec<Rational>>,
    inv: Vec<Vec<Rational>>,
    /// `table[i][j]` = coordinates of `ω_i·ω_j`.
    table: Vec<Vec<Vec<BigInt>>>,
}

impl<'a> Order<'a> {
    fn new(f: &'a Poly, basis: Vec<Vec<Rational>>) -> Result<Self> {
        let inv = inverse(&basis).ok_or_else(not_closed)?;
        let n = basis.len();
        let mut table = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let c = to_integers(&vec_mat(&mul_mod(&basis[i], &basis[j], f), &inv))?;
                table[j][i] = c.clone();
                table[i][j] = c;
            }
        }
        Ok(Order { f, basis, inv, table })
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let n = self.dim();
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let s = &a[i] * &b[j];
                for k in 0..n {
                    out[k] += &s * &self.table[i][j][k];
                }
            }
        }
        out
    }

    fn pow_mod(&self, x: &[BigInt], e: &BigInt, p: &BigInt) -> Vec<BigInt> {
        let n = self.dim();
        // ω_0 need not be 1; express 1 in the basis.
        let mut one = vec![Rational::zero(); n];
        one[0] = Rational::one();
        let mut acc = to_integers(&vec_mat(&one, &self.inv)).expect("1 lies in every order");
        let mut base: Vec<BigInt> = x.iter().map(|c| c.mod_floor(p)).collect();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = self.mul(&acc, &base).iter().map(|c| c.mod_floor(p)).collect();
            }
            if i + 1 < bits {
                base = self.mul(&base, &base).iter().map(|c| c.mod_floor(p)).collect();
            }
        }
        acc
    }

    /// One enlargement step at `p`; `None` when the order is p-maximal.
    fn enlarge(&self, p: &BigInt) -> Result<Option<Vec<Vec<Rational>>>> {
        let n = self.dim();
        // q = smallest power of p that is at least n
        let mut q = p.clone();
        while q < BigInt::from(n) {
            q *= p;
        }
        let unit = |i: usize| -> Vec<BigInt> {
            let mut v = vec![BigInt::zero(); n];
            v[i] = BigInt::one();
            v
        };
        let frob: Vec<Vec<BigInt>> = (0..n).map(|i| self.pow_mod(&unit(i), &q, p)).collect();
        // Radical mod p: kernel of the Frobenius power, as left kernel.
        let radical = nullspace_mod(&transpose(&frob), n, p);
        let mut gens: Vec<Vec<BigInt>> = (0..n).map(|i| unit(i).into_iter().map(|x| x * p).collect()).collect();
        gens.extend(radical);
        let ideal = hnf(gens, n);
        let ideal_q: Vec<Vec<Rational>> =
            ideal.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
        let ideal_inv = inverse(&ideal_q).ok_or_else(not_closed)?;
        // Row i: coordinates (in the ideal basis, mod p) of ω_i·β_k for all k.
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n * n);
            for beta in &ideal {
                let prod: Vec<Rational> = self.mul(&unit(i), beta).into_iter().map(Rational::from_integer).collect();
                let c = to_integers(&vec_mat(&prod, &ideal_inv))?;
                row.extend(c.into_iter().map(|x| x.mod_floor(p)));
            }
            rows.push(row);
        }
        let kernel = nullspace_mod(&transpose(&rows), n, p);
        if kernel.is_empty() {
            return Ok(None);
        }
        let mut gens: Vec<Vec<BigInt>> = (0..n).map(|i| unit(i).into_iter().map(|x| x * p).collect()).collect();
        gens.extend(kernel);
        let u = hnf(gens, n);
        let pq = Rational::from_integer(p.clone());
        let basis = u
            .iter()
            .map(|r| {
                let coords: Vec<Rational> = r.iter().map(|x| Rational::from_integer(x.clone()) / &pq).collect();
                vec_mat(&coords, &self.basis)
            })
            .collect();
        Ok(Some(basis))
    }
}

/// Discriminant of the number field `Q[X]/(f)` for monic irreducible `f`.
pub(crate) fn field_disc(f: &Poly) -> Result<BigInt> {
    let n = f.len() - 1;
    let disc = poly_disc(f);
    if disc.is_zero() {
        return Err(Error::Reducible);
    }
    let mut basis: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    for (p, e) in arith::factorize_big(&disc)? {
        if e < 2 {
            continue;
        }
        let p = BigInt::from_biguint(Sign::Plus, p);
        loop {
            let order = Order::new(f, basis.clone())?;
            match order.enlarge(&p)? {
                Some(b) => basis = b,
                None => break,
            }
        }
    }
    let det = det_rational(&basis);
    let out = Rational::from_integer(disc) * &det * &det;
    if !out.is_integer() {
        return Err(not_closed());
    }
    Ok(out.to_integer())
}
