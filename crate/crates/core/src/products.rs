//! Product and theta building blocks: q-Pochhammer symbols, J-quotients,
//! the Jacobi triple product, bilateral theta sums, and Dedekind / generalized
//! eta factors.
//!
//! All products are expanded by multiplying or dividing binomials
//! `(1 - c q^e)` into one running buffer; each step is linear in the length.
//! Factors whose exponent reaches the working order are skipped.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::modularity::{p2, GEtaList};
use crate::rat::{self, Rational};
use crate::series::{Dense, Monomial, PSeries};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Length {
    Finite(u64),
    Infinite,
}

/// `(a; q^base)_length ^ power`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PochFactor {
    pub a: Monomial,
    pub base: Rational,
    pub length: Length,
    pub power: i64,
}

impl PochFactor {
    pub fn new(a: Monomial, base: Rational, length: Length, power: i64) -> Self {
        PochFactor { a, base, length, power }
    }

    /// `(a; q^base)_inf ^ power`.
    pub fn inf(a: Monomial, base: Rational, power: i64) -> Self {
        PochFactor { a, base, length: Length::Infinite, power }
    }

    /// `(q^e; q^m)_inf ^ power` with integer arguments.
    pub fn qinf(e: i64, m: i64, power: i64) -> Self {
        PochFactor::inf(Monomial::q(rat::int(e)), rat::int(m), power)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JKind {
    /// `J_m = (q^m; q^m)_inf`
    Full(i64),
    /// `J_{a,m} = (q^a, q^{m-a}, q^m; q^m)_inf`
    Pair(i64, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JSpec {
    pub kind: JKind,
    pub power: i64,
}

impl JSpec {
    pub fn j(m: i64, power: i64) -> Self {
        JSpec { kind: JKind::Full(m), power }
    }

    pub fn jam(a: i64, m: i64, power: i64) -> Self {
        JSpec { kind: JKind::Pair(a, m), power }
    }

    pub fn modulus(&self) -> i64 {
        match self.kind {
            JKind::Full(m) | JKind::Pair(_, m) => m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            JKind::Full(m) if m >= 1 => {}
            JKind::Pair(a, m) if 0 < a && a < m => {}
            _ => return Err(Error::InvalidArgument(format!("invalid J symbol {:?}", self.kind))),
        }
        if self.power == 0 {
            return Err(Error::InvalidArgument("J symbol with zero power".into()));
        }
        Ok(())
    }

    /// The equivalent Pochhammer factors.
    pub fn factors(&self) -> Vec<PochFactor> {
        let p = self.power;
        match self.kind {
            JKind::Full(m) => vec![PochFactor::qinf(m, m, p)],
            JKind::Pair(a, m) => {
                vec![PochFactor::qinf(a, m, p), PochFactor::qinf(m - a, m, p), PochFactor::qinf(m, m, p)]
            }
        }
    }
}

/// One binomial `(1 - coeff q^exp)^power`.
struct Binomial {
    coeff: BigRational,
    exp: Rational,
    power: i64,
}

/// Expand a product of Pochhammer symbols to `order`.
fn expand(factors: &[PochFactor], order: Rational) -> Result<PSeries> {
    for f in factors {
        if f.base <= Rational::zero() {
            return Err(Error::InvalidArgument(format!("Pochhammer base must be positive, got q^{}", f.base)));
        }
        if f.power == 0 {
            return Err(Error::InvalidArgument("Pochhammer factor with zero power".into()));
        }
    }
    // Numerator factors with negative exponents pull the valuation down;
    // widen the working order by that amount.
    let mut budget = Rational::zero();
    for f in factors.iter().filter(|f| f.power > 0 && !f.a.coeff.is_zero()) {
        let mut k = 0u64;
        loop {
            if let Length::Finite(n) = f.length {
                if k >= n {
                    break;
                }
            }
            let e = f.a.exp + f.base * (k as i64);
            if e >= Rational::zero() {
                break;
            }
            budget -= e * f.power;
            k += 1;
        }
    }
    let work = order + budget;
    let mut binomials = Vec::new();
    let mut zero = false;
    for f in factors {
        if f.a.coeff.is_zero() {
            continue;
        }
        let mut k = 0u64;
        loop {
            if let Length::Finite(n) = f.length {
                if k >= n {
                    break;
                }
            }
            let e = f.a.exp + f.base * (k as i64);
            if e >= work {
                if f.length == Length::Infinite {
                    break;
                }
                k += 1;
                continue;
            }
            if e.is_zero() && f.a.coeff.is_one() {
                if f.power < 0 {
                    return Err(Error::ZeroFactor(format!(
                        "({}; q^{})_{} in a denominator contains the factor (1 - 1)",
                        f.a,
                        f.base,
                        match f.length {
                            Length::Finite(n) => n.to_string(),
                            Length::Infinite => "inf".into(),
                        }
                    )));
                }
                zero = true;
            }
            binomials.push(Binomial { coeff: f.a.coeff.clone(), exp: e, power: f.power });
            k += 1;
        }
    }
    if zero {
        return Ok(PSeries::zero(order));
    }
    let d = rat::denom_lcm(binomials.iter().map(|b| &b.exp));
    let mut dense = Dense::one(d, work);
    // numerators first keeps the negative-exponent budget exact
    binomials.sort_by_key(|b| b.power < 0);
    for b in &binomials {
        let e = (b.exp * d).to_integer();
        for _ in 0..b.power.unsigned_abs() {
            if b.power > 0 {
                dense.mul_binomial(&b.coeff, e);
            } else {
                dense.div_binomial(&b.coeff, e)?;
            }
        }
    }
    dense.truncate(order);
    Ok(dense.into_series())
}

/// Expand a product of Pochhammer symbols, times a monomial prefactor.
pub fn poch_product(factors: &[PochFactor], prefactor: &Monomial, order: Rational) -> Result<PSeries> {
    if prefactor.coeff.is_zero() {
        return Ok(PSeries::zero(order));
    }
    let s = expand(factors, order - prefactor.exp)?;
    Ok(s.mul_monomial(prefactor))
}

/// `(a; q^m)_n ^ power` to `order`.
pub fn poch(f: &PochFactor, order: Rational) -> Result<PSeries> {
    expand(std::slice::from_ref(f), order)
}

/// `prefactor * prod J^power`.
pub fn jquot(spec: &[JSpec], prefactor: &Monomial, order: Rational) -> Result<PSeries> {
    let mut factors = Vec::new();
    for s in spec {
        s.validate()?;
        factors.extend(s.factors());
    }
    poch_product(&factors, prefactor, order)
}

/// Product side `(q, z, q/z; q)_inf` of the Jacobi triple product.
pub fn jacobi_triple_product(z: &Monomial, order: Rational) -> Result<PSeries> {
    if z.coeff.is_zero() {
        return Err(Error::InvalidArgument("Jacobi triple product needs z != 0".into()));
    }
    let inv = Monomial::new(z.coeff.recip(), Rational::one() - z.exp);
    let factors = [
        PochFactor::qinf(1, 1, 1),
        PochFactor::inf(z.clone(), Rational::one(), 1),
        PochFactor::inf(inv, Rational::one(), 1),
    ];
    expand(&factors, order)
}

/// All integers `n` with `a n^2 + b n + c < order`, for `a > 0`.
fn quadratic_range(a: Rational, b: Rational, c: Rational, order: Rational) -> Vec<i64> {
    debug_assert!(a > Rational::zero());
    let f = |n: i64| a * n * n + b * n + c;
    let center = rat::ceil(-b / (a * 2));
    let mut out = Vec::new();
    let mut n = center;
    while f(n) < order {
        out.push(n);
        n += 1;
    }
    let mut n = center - 1;
    while f(n) < order {
        out.push(n);
        n -= 1;
    }
    out.sort_unstable();
    out
}

/// Sum side `sum_n (-1)^n q^{n(n-1)/2} z^n` of the Jacobi triple product.
pub fn jacobi_triple_sum(z: &Monomial, order: Rational) -> Result<PSeries> {
    if z.coeff.is_zero() {
        return Err(Error::InvalidArgument("Jacobi triple sum needs z != 0".into()));
    }
    let half = rat::r(1, 2);
    let ns = quadratic_range(half, z.exp - half, Rational::zero(), order);
    let neg_z = -z.coeff.clone();
    Ok(PSeries::from_terms(
        order,
        ns.into_iter().map(|n| (half * n * n + (z.exp - half) * n, rat::pow_big(&neg_z, n))),
    ))
}

/// `sum_{n in Z + nu} q^{alpha n^2 / 2}`.
pub fn theta_sum(alpha: Rational, nu: Rational, order: Rational) -> Result<PSeries> {
    if alpha <= Rational::zero() {
        return Err(Error::DivergentTheta(alpha));
    }
    let a = alpha / 2;
    let (b, c) = (alpha * nu, alpha * nu * nu / 2);
    let ns = quadratic_range(a, b, c, order);
    Ok(PSeries::from_terms(order, ns.into_iter().map(|m| (a * m * m + b * m + c, BigRational::one()))))
}

/// Dedekind eta `q^{1/24} (q;q)_inf`.
pub fn eta_classical(order: Rational) -> Result<PSeries> {
    poch_product(&[PochFactor::qinf(1, 1, 1)], &Monomial::q(rat::r(1, 24)), order)
}

fn eta_gen_factors(delta: i64, g: i64, r: Rational) -> Result<(Vec<PochFactor>, Rational)> {
    if !(0 < g && g < delta) {
        return Err(Error::InvalidGeta(format!("need 0 < g < delta, got delta={delta}, g={g}")));
    }
    let pre = r * p2(rat::r(g, delta)) * delta / 2;
    if 2 * g == delta {
        let twice = r * 2;
        if !twice.is_integer() {
            return Err(Error::InvalidGeta(format!("exponent {r} on eta_{{{delta};{g}}} is not in Z/2")));
        }
        return Ok((vec![PochFactor::qinf(g, delta, twice.to_integer())], pre));
    }
    if !r.is_integer() {
        return Err(Error::InvalidGeta(format!("exponent {r} on eta_{{{delta};{g}}} must be an integer")));
    }
    let p = r.to_integer();
    Ok((vec![PochFactor::qinf(g, delta, p), PochFactor::qinf(delta - g, delta, p)], pre))
}

/// Generalized eta `eta_{delta;g}`, with the two residue classes `+-g`
/// taken as a multiset (so the product is squared when `g = delta/2`).
pub fn eta_gen(delta: i64, g: i64, order: Rational) -> Result<PSeries> {
    let (factors, pre) = eta_gen_factors(delta, g, Rational::one())?;
    poch_product(&factors, &Monomial::q(pre), order)
}

/// Expand a generalized eta-product.
pub fn geta_expand(list: &GEtaList, order: Rational) -> Result<PSeries> {
    let mut factors = Vec::new();
    let mut pre = Rational::zero();
    for f in &list.factors {
        if f.r.is_zero() {
            continue;
        }
        let (fs, p) = eta_gen_factors(f.delta, f.g, f.r)?;
        factors.extend(fs);
        pre += p;
    }
    poch_product(&factors, &Monomial::q(pre), order)
}
