//! Small exact-rational helpers shared by the other modules.
//!
//! Exponents, orders and matrix entries are [`Rational`] (`Ratio<i64>`);
//! series coefficients are [`BigRational`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = Ratio<i64>;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn big(x: Rational) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

pub fn big_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Narrow a big rational to `Ratio<i64>`, if it fits.
pub fn small(x: &BigRational) -> Option<Rational> {
    Some(Rational::new(x.numer().to_i64()?, x.denom().to_i64()?))
}

pub fn ceil(x: Rational) -> i64 {
    x.ceil().to_integer()
}

pub fn floor(x: Rational) -> i64 {
    x.floor().to_integer()
}

/// Fractional part `{t} = t - floor(t)`, always in `[0, 1)`.
pub fn frac(t: Rational) -> Rational {
    t - t.floor()
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Least common multiple of the denominators of `xs`.
pub fn denom_lcm<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> i64 {
    xs.into_iter().fold(1, |acc, x| acc.lcm(x.denom()))
}

pub fn is_even_integer(x: Rational) -> bool {
    x.is_integer() && x.to_integer() % 2 == 0
}

/// Smallest integer `n >= 0` with `n*n >= x`, for `x >= 0`.
pub fn isqrt_ceil(x: &BigRational) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let c = x.ceil().to_integer();
    let mut s = c.sqrt();
    if &s * &s < c {
        s += 1;
    }
    s
}

/// Parse `"3"`, `"-1/2"` or `"+7"` into a [`Rational`].
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<i64>().ok().map(Rational::from_integer),
    }
}

pub fn parse_big_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// `x^n` for a big rational and any integer `n` (`x != 0` when `n < 0`).
pub fn pow_big(x: &BigRational, n: i64) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = if n < 0 { x.recip() } else { x.clone() };
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}
