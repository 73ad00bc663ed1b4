//! Exact Dirichlet densities for divisibility of ranks of appearance in
//! Lucas sequences.
//!
//! Given a Lucas sequence `U(a1, a2)` with irreducible characteristic
//! polynomial and non-torsion root quotient `γ`, this crate computes, as an
//! exact rational, the density of primes `p` for which `d` divides the rank
//! of appearance `ρ_U(p)`. Every closed form is assembled from the sums
//! `S_{d,e,h}(ν)` evaluated in [`density::s_eval`], and each can be checked
//! against a direct partial sum of the defining series with a rigorous tail
//! enclosure ([`density::series_oracle`]).
//!
//! The crate is `no_std` and only needs `alloc`. Prime sieving and rank
//! computation live in [`lucasrank`]; parallel empirical runs, file formats
//! and the command line are provided by the companion `lucas-density` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arith;
pub mod density;
pub mod error;
pub mod kummer;
pub mod lucasrank;
pub mod quadfield;

pub use error::Error;
pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Exact rational numbers used throughout the crate.
pub type Rational = BigRational;

pub type Result<T> = core::result::Result<T, Error>;

/// Build a rational from a small numerator and denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
