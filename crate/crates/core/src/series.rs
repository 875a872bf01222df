//! Truncated Puiseux series in `q` with exact rational coefficients.
//!
//! A [`PSeries`] stores the coefficients of `q^{k/D}` for integer `k`
//! on a lattice `(1/D)Z`, together with a truncation order `O`: every
//! coefficient of `q^e` with `e < O` is known exactly, nothing above is.
//!
//! Internally the coefficients are integer numerators over one common
//! denominator, held densely from the lowest nonzero exponent upward. The
//! heavy kernels (binomial multiply/divide, convolution) work on [`Dense`],
//! a fixed-lattice buffer covering every slot below the order.
//!
//! Invariants of a `PSeries` (restored by every operation):
//! - every stored exponent is below the order;
//! - no leading or trailing zero numerators;
//! - `D` is the smallest lattice holding all stored exponents;
//! - the common denominator is positive and coprime to the numerators.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rat::{self, Rational};
use crate::{Error, Result};

/// `coeff * q^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: BigRational,
    pub exp: Rational,
}

impl Monomial {
    pub fn new(coeff: BigRational, exp: Rational) -> Self {
        Monomial { coeff, exp }
    }

    /// `c * q^e` with small rational `c`.
    pub fn of(c: Rational, e: Rational) -> Self {
        Monomial { coeff: rat::big(c), exp: e }
    }

    /// `q^e`.
    pub fn q(e: Rational) -> Self {
        Monomial { coeff: BigRational::one(), exp: e }
    }

    pub fn constant(c: Rational) -> Self {
        Monomial::of(c, Rational::zero())
    }

    pub fn one() -> Self {
        Monomial::q(Rational::zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.exp.is_zero()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { coeff: &self.coeff * &other.coeff, exp: self.exp + other.exp }
    }

    /// Parse the one-term series syntax (`-q^{1/2}`, `2q^3`, `(1/3)q`, `-5`).
    pub fn parse(text: &str) -> Result<Monomial> {
        let terms = parse_terms(text)?;
        match (terms.terms.as_slice(), terms.order) {
            ([(e, c)], None) => Ok(Monomial::new(c.clone(), *e)),
            ([], None) => Ok(Monomial::new(BigRational::zero(), Rational::zero())),
            _ => Err(Error::Parse { line: 1, column: 1, message: format!("expected a monomial, got '{text}'") }),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            return f.write_str("0");
        }
        write_term(f, &self.coeff, self.exp, true)
    }
}

/// Outcome of comparing two series up to an order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqReport {
    Equal,
    Mismatch { exponent: Rational, left: BigRational, right: BigRational },
}

impl EqReport {
    pub fn is_equal(&self) -> bool {
        matches!(self, EqReport::Equal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PSeries {
    lattice: i64,
    order: Rational,
    start: i64,
    nums: Vec<BigInt>,
    den: BigInt,
}

/// Exclusive upper bound on exponent numerators below `order` on lattice `d`.
pub(crate) fn index_limit(order: Rational, d: i64) -> i64 {
    rat::ceil(order * d)
}

impl PSeries {
    pub fn zero(order: Rational) -> Self {
        PSeries { lattice: 1, order, start: 0, nums: Vec::new(), den: BigInt::one() }
    }

    pub fn one(order: Rational) -> Self {
        PSeries::from_monomial(&Monomial::one(), order)
    }

    pub fn constant(c: Rational, order: Rational) -> Self {
        PSeries::from_monomial(&Monomial::constant(c), order)
    }

    pub fn from_monomial(m: &Monomial, order: Rational) -> Self {
        if m.coeff.is_zero() || m.exp >= order {
            return PSeries::zero(order);
        }
        PSeries {
            lattice: *m.exp.denom(),
            order,
            start: *m.exp.numer(),
            nums: vec![m.coeff.numer().clone()],
            den: m.coeff.denom().clone(),
        }
        .normalized()
    }

    /// Build from `(exponent, coefficient)` pairs; terms at or above `order`
    /// are dropped and repeated exponents are summed.
    pub fn from_terms<I>(order: Rational, terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, BigRational)>,
    {
        let terms: Vec<(Rational, BigRational)> =
            terms.into_iter().filter(|(e, c)| *e < order && !c.is_zero()).collect();
        if terms.is_empty() {
            return PSeries::zero(order);
        }
        let d = rat::denom_lcm(terms.iter().map(|(e, _)| e));
        let lo = terms.iter().map(|(e, _)| *e.numer() * (d / *e.denom())).min().unwrap();
        let den = terms.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut dense = Dense::zero(d, lo, order);
        dense.den = den.clone();
        for (e, c) in &terms {
            let k = *e.numer() * (d / *e.denom());
            let v = c.numer() * (&den / c.denom());
            dense.c[(k - lo) as usize] += v;
        }
        dense.into_series()
    }

    /// Shorthand for integer-exponent series with integer coefficients,
    /// `coeffs[i]` being the coefficient of `q^i`.
    pub fn from_ints(coeffs: &[i64], order: Rational) -> Self {
        PSeries::from_terms(
            order,
            coeffs.iter().enumerate().map(|(i, &c)| (Rational::from_integer(i as i64), rat::big_int(c))),
        )
    }

    pub fn order(&self) -> Rational {
        self.order
    }

    pub fn lattice(&self) -> i64 {
        self.lattice
    }

    pub fn is_zero(&self) -> bool {
        self.nums.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<Rational> {
        (!self.is_zero()).then(|| Rational::new(self.start, self.lattice))
    }

    /// Valuation, or the order for a series that is zero to its order.
    fn val_or_order(&self) -> Rational {
        self.valuation().unwrap_or(self.order)
    }

    pub fn leading(&self) -> Option<(Rational, BigRational)> {
        self.valuation().map(|e| (e, BigRational::new(self.nums[0].clone(), self.den.clone())))
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational, BigRational)> + '_ {
        self.nums.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| {
            (Rational::new(self.start + i as i64, self.lattice), BigRational::new(c.clone(), self.den.clone()))
        })
    }

    pub fn num_terms(&self) -> usize {
        self.nums.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn coeff(&self, e: Rational) -> Result<BigRational> {
        if e >= self.order {
            return Err(Error::BeyondTruncation { exponent: e, order: self.order });
        }
        let scaled = e * self.lattice;
        if !scaled.is_integer() {
            return Ok(BigRational::zero());
        }
        let i = scaled.to_integer() - self.start;
        if i < 0 || i >= self.nums.len() as i64 {
            return Ok(BigRational::zero());
        }
        Ok(BigRational::new(self.nums[i as usize].clone(), self.den.clone()))
    }

    /// True when every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.den.is_one()
    }

    pub fn truncate(&self, order: Rational) -> PSeries {
        if order >= self.order {
            return self.clone();
        }
        let mut d = self.to_dense(self.lattice, self.lo_for(self.lattice));
        d.truncate(order);
        d.into_series()
    }

    pub fn neg(&self) -> PSeries {
        let mut s = self.clone();
        for c in &mut s.nums {
            *c = -std::mem::take(c);
        }
        s
    }

    pub fn scale(&self, c: &BigRational) -> PSeries {
        if c.is_zero() {
            return PSeries::zero(self.order);
        }
        let mut d = self.to_dense(self.lattice, self.lo_for(self.lattice));
        d.scale(c);
        d.into_series()
    }

    /// Multiply by `q^e`; the order moves with it.
    pub fn shift(&self, e: Rational) -> PSeries {
        let d = rat::lcm(self.lattice, *e.denom());
        let mut dense = self.to_dense(d, self.lo_for(d));
        dense.shift((e * d).to_integer());
        dense.into_series()
    }

    pub fn mul_monomial(&self, m: &Monomial) -> PSeries {
        self.shift(m.exp).scale(&m.coeff)
    }

    pub fn add(&self, other: &PSeries) -> PSeries {
        let d = rat::lcm(self.lattice, other.lattice);
        let lo = self.lo_for(d).min(other.lo_for(d));
        let mut a = self.to_dense(d, lo);
        a.add_assign(&other.to_dense(d, lo));
        a.into_series()
    }

    pub fn sub(&self, other: &PSeries) -> PSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PSeries) -> PSeries {
        let d = rat::lcm(self.lattice, other.lattice);
        let a = self.to_dense(d, self.lo_for(d));
        let b = other.to_dense(d, other.lo_for(d));
        a.mul(&b).into_series()
    }

    /// Multiplicative inverse. The result has valuation `-v` and order
    /// `O - 2v`, where `v` is the valuation of `self`.
    pub fn inv(&self) -> Result<PSeries> {
        let Some(v) = self.valuation() else {
            return Err(Error::NonInvertible);
        };
        let d = self.lattice;
        let a = &self.nums;
        let n = (index_limit(self.order, d) - self.start).max(0) as usize;
        let c0 = &a[0];
        let unit = c0.abs().is_one();
        // B_k = -sum_{i=1..k} A_i B_{k-i} c0^{i-1}, with b_k = B_k / c0^{k+1}.
        let mut pw: Vec<BigInt> = Vec::new();
        if !unit {
            pw.push(BigInt::one());
            for i in 1..n.max(1) {
                let next = &pw[i - 1] * c0;
                pw.push(next);
            }
        }
        let nz: Vec<usize> = (1..a.len().min(n)).filter(|&i| !a[i].is_zero()).collect();
        let mut b: Vec<BigInt> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(BigInt::one());
                continue;
            }
            let mut acc = BigInt::zero();
            for &i in &nz {
                if i > k {
                    break;
                }
                if b[k - i].is_zero() {
                    continue;
                }
                let t = &a[i] * &b[k - i];
                if unit {
                    if c0.is_negative() && (i - 1) % 2 == 1 {
                        acc += t;
                    } else {
                        acc -= t;
                    }
                } else {
                    acc -= t * &pw[i - 1];
                }
            }
            b.push(acc);
        }
        // b_k = den * B_k / c0^{k+1}
        let mut dense = Dense::zero(d, -self.start, self.order - v * 2);
        debug_assert_eq!(dense.c.len(), n);
        if unit {
            for (k, bk) in b.into_iter().enumerate() {
                let neg = c0.is_negative() && k % 2 == 0;
                dense.c[k] = if neg { -bk * &self.den } else { bk * &self.den };
            }
        } else {
            // common denominator c0^n
            for (k, bk) in b.into_iter().enumerate() {
                dense.c[k] = bk * &self.den * &pw[n - 1 - k];
            }
            dense.den = &pw[n - 1] * c0;
            if dense.den.is_negative() {
                dense.den = -dense.den;
                for c in &mut dense.c {
                    *c = -std::mem::take(c);
                }
            }
        }
        Ok(dense.into_series())
    }

    pub fn pow(&self, n: i64) -> Result<PSeries> {
        if n == 0 {
            return Ok(PSeries::one(self.order - self.val_or_order()));
        }
        let mut base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc: Option<PSeries> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc.unwrap())
    }

    /// Formal substitution `q -> q^k` for rational `k > 0`.
    pub fn subst_power(&self, k: Rational) -> Result<PSeries> {
        if k <= Rational::zero() {
            return Err(Error::InvalidArgument(format!("substitution power must be positive, got {k}")));
        }
        let (p, r) = (*k.numer(), *k.denom());
        let order = self.order * k;
        if self.is_zero() {
            return Ok(PSeries::zero(order));
        }
        let d = self.lattice * r;
        let mut dense = Dense::zero(d, self.start * p, order);
        dense.den = self.den.clone();
        for (i, c) in self.nums.iter().enumerate() {
            if !c.is_zero() {
                dense.c[i * p as usize] = c.clone();
            }
        }
        Ok(dense.into_series())
    }

    /// Compare to `order`, reporting the lowest disagreeing exponent.
    pub fn eq_upto(&self, other: &PSeries, order: Rational) -> Result<EqReport> {
        let available = self.order.min(other.order);
        if order > available {
            return Err(Error::InsufficientTruncation { requested: order, available });
        }
        let diff = self.truncate(order).sub(&other.truncate(order));
        match diff.valuation() {
            Some(e) if e < order => Ok(EqReport::Mismatch {
                exponent: e,
                left: self.coeff(e)?,
                right: other.coeff(e)?,
            }),
            _ => Ok(EqReport::Equal),
        }
    }

    /// `m`-dissection: `self = sum_j q^j F_j(q^m)`. Needs integer exponents.
    pub fn dissect(&self, m: i64) -> Result<Vec<PSeries>> {
        if m < 1 {
            return Err(Error::InvalidArgument(format!("dissection modulus must be positive, got {m}")));
        }
        if self.lattice != 1 {
            return Err(Error::NonIntegralExponents);
        }
        let mut parts: Vec<Vec<(Rational, BigRational)>> = vec![Vec::new(); m as usize];
        for (e, c) in self.terms() {
            let k = e.to_integer();
            let j = k.rem_euclid(m);
            parts[j as usize].push((Rational::from_integer((k - j) / m), c));
        }
        Ok(parts
            .into_iter()
            .enumerate()
            .map(|(j, terms)| {
                let order = Rational::from_integer(rat::ceil((self.order - j as i64) / m));
                PSeries::from_terms(order, terms)
            })
            .collect())
    }

    /// Inverse of [`dissect`](Self::dissect): `sum_j q^j F_j(q^m)`.
    pub fn reassemble(parts: &[PSeries]) -> Result<PSeries> {
        let m = parts.len() as i64;
        let mut acc: Option<PSeries> = None;
        for (j, f) in parts.iter().enumerate() {
            let t = f.subst_power(Rational::from_integer(m))?.shift(Rational::from_integer(j as i64));
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t),
            });
        }
        acc.ok_or_else(|| Error::InvalidArgument("empty dissection".into()))
    }

    /// Text form followed by `+ O(q^N)`.
    pub fn to_string_with_order(&self) -> String {
        let body = self.to_string();
        let mut o = String::new();
        write_qpow(&mut o, self.order);
        if self.is_zero() {
            format!("O({o})")
        } else {
            format!("{body} + O({o})")
        }
    }

    /// Parse the text form. The order comes from a trailing `O(q^N)` term,
    /// or from `default_order` when there is none.
    pub fn parse(text: &str, default_order: Option<Rational>) -> Result<PSeries> {
        let parsed = parse_terms(text)?;
        let order = match (parsed.order, default_order) {
            (Some(o), _) | (None, Some(o)) => o,
            (None, None) => {
                return Err(Error::Parse { line: 1, column: text.len() + 1, message: "missing O(q^N) term".into() })
            }
        };
        if let Some((e, _)) = parsed.terms.iter().find(|(e, _)| *e >= order) {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("term q^{e} is not below the order {order}"),
            });
        }
        Ok(PSeries::from_terms(order, parsed.terms))
    }

    // Lowest index of self on a refined lattice d.
    fn lo_for(&self, d: i64) -> i64 {
        if self.is_zero() {
            index_limit(self.order, d)
        } else {
            self.start * (d / self.lattice)
        }
    }

    pub(crate) fn to_dense(&self, d: i64, lo: i64) -> Dense {
        debug_assert_eq!(d % self.lattice, 0);
        let f = d / self.lattice;
        let mut dense = Dense::zero(d, lo, self.order);
        dense.den = self.den.clone();
        for (i, c) in self.nums.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = (self.start + i as i64) * f - lo;
            debug_assert!(k >= 0);
            dense.c[k as usize] = c.clone();
        }
        dense
    }

    fn normalized(self) -> PSeries {
        let lo = self.start;
        Dense { lattice: self.lattice, lo, order: self.order, c: self.nums, den: self.den }.into_series_unchecked()
    }
}

/// Fixed-lattice working buffer: `c[i]/den` is the coefficient of
/// `q^{(lo+i)/lattice}`, and `c` covers every slot below `order`.
#[derive(Clone, Debug)]
pub(crate) struct Dense {
    pub lattice: i64,
    pub lo: i64,
    pub order: Rational,
    pub c: Vec<BigInt>,
    pub den: BigInt,
}

impl Dense {
    pub fn zero(lattice: i64, lo: i64, order: Rational) -> Dense {
        let len = (index_limit(order, lattice) - lo).max(0) as usize;
        Dense { lattice, lo, order, c: vec![BigInt::zero(); len], den: BigInt::one() }
    }

    /// The constant 1 on `lattice`, starting at exponent 0.
    pub fn one(lattice: i64, order: Rational) -> Dense {
        let mut d = Dense::zero(lattice, 0, order);
        if let Some(c) = d.c.first_mut() {
            *c = BigInt::one();
        }
        d
    }


    pub fn truncate(&mut self, order: Rational) {
        if order >= self.order {
            return;
        }
        self.order = order;
        let len = (index_limit(order, self.lattice) - self.lo).max(0) as usize;
        self.c.truncate(len);
    }

    pub fn shift(&mut self, s: i64) {
        self.lo += s;
        self.order += Rational::new(s, self.lattice);
    }

    pub fn scale(&mut self, x: &BigRational) {
        if x.is_one() {
            return;
        }
        let (p, q) = (x.numer(), x.denom());
        if !p.is_one() {
            for c in &mut self.c {
                if !c.is_zero() {
                    *c *= p;
                }
            }
        }
        if !q.is_one() {
            self.den *= q;
        }
    }

    fn first_nonzero(&self) -> Option<usize> {
        self.c.iter().position(|c| !c.is_zero())
    }

    /// `self *= (1 - x q^{e/lattice})`.
    pub fn mul_binomial(&mut self, x: &BigRational, e: i64) {
        if x.is_zero() {
            return;
        }
        if e == 0 {
            self.scale(&(BigRational::one() - x));
            return;
        }
        // With x = p/r: new[k] = r*old[k] - p*old[k-e], over den*r.
        let (p, r) = (x.numer(), x.denom());
        let r_one = r.is_one();
        let p_one = p.is_one();
        let p_neg_one = *p == BigInt::from(-1);
        let n = self.c.len();
        let step = |cur: &mut BigInt, src: Option<&BigInt>| {
            if !r_one && !cur.is_zero() {
                *cur *= r;
            }
            if let Some(src) = src.filter(|s| !s.is_zero()) {
                if p_one {
                    *cur -= src;
                } else if p_neg_one {
                    *cur += src;
                } else {
                    *cur -= src * p;
                }
            }
        };
        if e > 0 {
            let e = e as usize;
            for k in (0..n).rev() {
                let (lo, hi) = self.c.split_at_mut(k);
                step(&mut hi[0], k.checked_sub(e).map(|j| &lo[j]));
            }
        } else {
            // Negative exponent: the window slides down by |e|, length kept.
            // new[i] = r*old[i-s] - p*old[i]
            let s = (-e) as usize;
            self.lo += e;
            self.order += Rational::new(e, self.lattice);
            for i in (0..n).rev() {
                let old = std::mem::take(&mut self.c[i]);
                let mut v = match i.checked_sub(s) {
                    Some(j) => self.c[j].clone(),
                    None => BigInt::zero(),
                };
                step(&mut v, Some(&old));
                self.c[i] = v;
            }
        }
        if !r_one {
            self.den *= r;
        }
    }

    /// `self /= (1 - x q^{e/lattice})`.
    pub fn div_binomial(&mut self, x: &BigRational, e: i64) -> Result<()> {
        if x.is_zero() {
            return Ok(());
        }
        if e == 0 {
            let f = BigRational::one() - x;
            if f.is_zero() {
                return Err(Error::ZeroFactor("division by (1 - q^0)".into()));
            }
            self.scale(&f.recip());
            return Ok(());
        }
        if e < 0 {
            // 1/(1 - x q^e) = -(1/x) q^{-e} / (1 - (1/x) q^{-e})
            let xi = x.recip();
            self.shift(-e);
            self.scale(&-xi.clone());
            return self.div_binomial(&xi, -e);
        }
        let e = e as usize;
        let n = self.c.len();
        if x.is_integer() {
            let p = x.numer();
            let one = p.is_one();
            let neg_one = *p == BigInt::from(-1);
            for k in e..n {
                let (lo, hi) = self.c.split_at_mut(k);
                let src = &lo[k - e];
                if src.is_zero() {
                    continue;
                }
                if one {
                    hi[0] += src;
                } else if neg_one {
                    hi[0] -= src;
                } else {
                    hi[0] += src * p;
                }
            }
            return Ok(());
        }
        // Rational x: run the recurrence in rationals, then re-common.
        let mut v: Vec<BigRational> =
            self.c.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect();
        for k in e..n {
            if !v[k - e].is_zero() {
                let t = &v[k - e] * x;
                v[k] += t;
            }
        }
        let den = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        self.c = v.into_iter().map(|c| c.numer() * (&den / c.denom())).collect();
        self.den = den;
        Ok(())
    }

    /// `self += other` on the same lattice (orders combine by min).
    pub fn add_assign(&mut self, other: &Dense) {
        debug_assert_eq!(self.lattice, other.lattice);
        let order = self.order.min(other.order);
        let lo = self.lo.min(other.lo);
        if lo < self.lo {
            let pad = (self.lo - lo) as usize;
            let mut c = vec![BigInt::zero(); pad];
            c.append(&mut self.c);
            self.c = c;
            self.lo = lo;
        }
        self.truncate(order);
        let len = (index_limit(order, self.lattice) - self.lo).max(0) as usize;
        self.c.resize(len, BigInt::zero());
        self.order = order;
        let (fa, fb) = if self.den == other.den {
            (None, None)
        } else {
            let l = self.den.lcm(&other.den);
            (Some(&l / &self.den), Some(&l / &other.den))
        };
        if let Some(fa) = &fa {
            for c in &mut self.c {
                if !c.is_zero() {
                    *c *= fa;
                }
            }
            self.den *= fa;
        }
        for (i, oc) in other.c.iter().enumerate() {
            if oc.is_zero() {
                continue;
            }
            let k = other.lo + i as i64 - self.lo;
            if k < 0 || k as usize >= self.c.len() {
                continue;
            }
            match &fb {
                None => self.c[k as usize] += oc,
                Some(fb) => self.c[k as usize] += oc * fb,
            }
        }
    }

    /// `self += f * q^{shift} * other` over self's slots. `other` must have
    /// integer coefficients and cover `self`'s range after the shift.
    pub fn add_shifted_int(&mut self, other: &Dense, shift: i64, f: &BigInt) {
        debug_assert_eq!(self.lattice, other.lattice);
        debug_assert!(other.den.is_one());
        let scaled = if self.den.is_one() { None } else { Some(f * &self.den) };
        let f = scaled.as_ref().unwrap_or(f);
        let one = f.is_one();
        let neg_one = *f == BigInt::from(-1);
        let start = (other.lo + shift - self.lo).max(0) as usize;
        for k in start..self.c.len() {
            let j = self.lo + k as i64 - shift - other.lo;
            debug_assert!(j >= 0);
            let Some(src) = other.c.get(j as usize) else {
                debug_assert!(false, "shifted source does not cover target");
                break;
            };
            if src.is_zero() {
                continue;
            }
            if one {
                self.c[k] += src;
            } else if neg_one {
                self.c[k] -= src;
            } else {
                self.c[k] += src * f;
            }
        }
    }

    /// Convolution with the truncation rule `min(O_a + v_b, O_b + v_a)`.
    pub fn mul(&self, other: &Dense) -> Dense {
        debug_assert_eq!(self.lattice, other.lattice);
        let d = self.lattice;
        let va = self.first_nonzero();
        let vb = other.first_nonzero();
        let val = |s: &Dense, v: Option<usize>| match v {
            Some(i) => Rational::new(s.lo + i as i64, d),
            None => s.order,
        };
        let order = (self.order + val(other, vb)).min(other.order + val(self, va));
        let (Some(va), Some(vb)) = (va, vb) else {
            return Dense::zero(d, index_limit(order, d), order);
        };
        let lo = self.lo + va as i64 + other.lo + vb as i64;
        let mut out = Dense::zero(d, lo, order);
        out.den = &self.den * &other.den;
        let n = out.c.len();
        let a = &self.c[va..];
        let b = &other.c[vb..];
        for (i, x) in a.iter().enumerate() {
            if i >= n {
                break;
            }
            if x.is_zero() {
                continue;
            }
            let m = (n - i).min(b.len());
            let xo = x.is_one();
            for (j, y) in b[..m].iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                if xo {
                    out.c[i + j] += y;
                } else {
                    out.c[i + j] += x * y;
                }
            }
        }
        out
    }

    pub fn into_series(self) -> PSeries {
        self.into_series_unchecked()
    }

    fn into_series_unchecked(mut self) -> PSeries {
        let first = self.c.iter().position(|c| !c.is_zero());
        let Some(first) = first else {
            return PSeries::zero(self.order);
        };
        let last = self.c.iter().rposition(|c| !c.is_zero()).unwrap();
        self.c.truncate(last + 1);
        self.c.drain(..first);
        let start = self.lo + first as i64;
        let mut nums = self.c;
        let mut den = self.den;
        if den.is_negative() {
            den = -den;
            for c in &mut nums {
                *c = -std::mem::take(c);
            }
        }
        if !den.is_one() {
            let mut g = den.clone();
            for c in &nums {
                if g.is_one() {
                    break;
                }
                if !c.is_zero() {
                    g = g.gcd(c);
                }
            }
            if !g.is_one() {
                for c in &mut nums {
                    if !c.is_zero() {
                        *c /= &g;
                    }
                }
                den /= &g;
            }
        }
        // smallest lattice holding every stored exponent
        let mut g = self.lattice;
        for (i, c) in nums.iter().enumerate() {
            if g == 1 {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(&(start + i as i64));
            }
        }
        let g = g.abs().max(1);
        let (lattice, start) = if g > 1 {
            nums = nums.into_iter().step_by(g as usize).collect();
            (self.lattice / g, start / g)
        } else {
            (self.lattice, start)
        };
        PSeries { lattice, order: self.order, start, nums, den }
    }
}

impl fmt::Display for PSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if first {
                write_term(f, &c, e, true)?;
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
                write_term(f, &c.abs(), e, false)?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn write_qpow(out: &mut impl fmt::Write, e: Rational) {
    let _ = if e.is_integer() && e >= Rational::zero() {
        if e.is_one() {
            write!(out, "q")
        } else {
            write!(out, "q^{e}")
        }
    } else {
        write!(out, "q^{{{e}}}")
    };
}

fn write_term(f: &mut fmt::Formatter<'_>, c: &BigRational, e: Rational, leading: bool) -> fmt::Result {
    let mut c = c.clone();
    if leading && c.is_negative() {
        f.write_str("-")?;
        c = -c;
    }
    if e.is_zero() {
        return write!(f, "{c}");
    }
    if !c.is_one() {
        if c.is_integer() {
            write!(f, "{c}")?;
        } else {
            write!(f, "({c})")?;
        }
    }
    let mut s = String::new();
    write_qpow(&mut s, e);
    f.write_str(&s)
}

struct ParsedTerms {
    terms: Vec<(Rational, BigRational)>,
    order: Option<Rational>,
}

struct TermLexer<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> TermLexer<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: 1, column: self.i + 1, message: message.into() }
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, ch: u8) -> bool {
        self.ws();
        if self.peek() == Some(ch) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.ws();
        let st = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        (self.i > st).then(|| std::str::from_utf8(&self.s[st..self.i]).unwrap())
    }

    // unsigned rational `a` or `a/b`
    fn urational(&mut self) -> Result<Option<BigRational>> {
        let Some(n) = self.digits() else { return Ok(None) };
        let n: BigInt = n.parse().unwrap();
        let save = self.i;
        if self.eat(b'/') {
            let Some(d) = self.digits() else {
                return Err(self.err("expected denominator after '/'"));
            };
            let d: BigInt = d.parse().unwrap();
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            return Ok(Some(BigRational::new(n, d)));
        }
        self.i = save;
        Ok(Some(BigRational::from_integer(n)))
    }

    fn exponent(&mut self) -> Result<Rational> {
        self.ws();
        let braced = self.eat(b'{');
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let Some(v) = self.urational()? else {
            return Err(self.err("expected exponent"));
        };
        if braced && !self.eat(b'}') {
            return Err(self.err("expected '}'"));
        }
        let v = rat::small(&v).ok_or_else(|| self.err("exponent out of range"))?;
        Ok(if neg { -v } else { v })
    }

    // q, q^e ; returns None if no q follows
    fn qpart(&mut self) -> Result<Option<Rational>> {
        self.ws();
        if self.peek() != Some(b'q') {
            return Ok(None);
        }
        self.i += 1;
        if self.eat(b'^') {
            return self.exponent().map(Some);
        }
        Ok(Some(Rational::one()))
    }
}

fn parse_terms(text: &str) -> Result<ParsedTerms> {
    let mut lx = TermLexer { s: text.as_bytes(), i: 0 };
    let mut terms = Vec::new();
    let mut order = None;
    let mut first = true;
    loop {
        lx.ws();
        if lx.peek().is_none() {
            if first {
                return Err(lx.err("empty series"));
            }
            break;
        }
        let mut neg = false;
        if lx.eat(b'-') {
            neg = true;
        } else if !lx.eat(b'+') && !first {
            return Err(lx.err("expected '+' or '-'"));
        }
        first = false;
        lx.ws();
        if lx.peek() == Some(b'O') {
            lx.i += 1;
            if !lx.eat(b'(') {
                return Err(lx.err("expected '(' after O"));
            }
            let Some(e) = lx.qpart()? else {
                return Err(lx.err("expected q^N inside O(...)"));
            };
            if !lx.eat(b')') {
                return Err(lx.err("expected ')'"));
            }
            order = Some(e);
            lx.ws();
            if lx.peek().is_some() {
                return Err(lx.err("O(q^N) must be the last term"));
            }
            break;
        }
        let coeff = if lx.eat(b'(') {
            let n = lx.eat(b'-');
            let Some(v) = lx.urational()? else { return Err(lx.err("expected coefficient")) };
            if !lx.eat(b')') {
                return Err(lx.err("expected ')'"));
            }
            Some(if n { -v } else { v })
        } else {
            lx.urational()?
        };
        lx.eat(b'*');
        let e = lx.qpart()?;
        let (coeff, e) = match (coeff, e) {
            (None, None) => return Err(lx.err("expected a term")),
            (Some(c), None) => (c, Rational::zero()),
            (c, Some(e)) => (c.unwrap_or_else(BigRational::one), e),
        };
        terms.push((e, if neg { -coeff } else { coeff }));
    }
    Ok(ParsedTerms { terms, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, r};

    fn s(text: &str, order: i64) -> PSeries {
        PSeries::parse(text, Some(int(order))).unwrap()
    }

    #[test]
    fn monomial_construction() {
        let m = PSeries::from_monomial(&Monomial::of(int(3), r(1, 2)), int(2));
        assert_eq!(m.lattice(), 2);
        assert_eq!(m.to_string(), "3q^{1/2}");
        assert_eq!(PSeries::from_monomial(&Monomial::one(), int(5)).to_string(), "1");
        assert!(PSeries::from_monomial(&Monomial::of(int(2), int(3)), int(3)).is_zero());
    }

    #[test]
    fn ring_examples() {
        assert_eq!(s("1 + q", 5).mul(&s("1 - q", 5)).to_string(), "1 - q^2");
        let a = s("1 + q^{1/2}", 5).add(&s("1 - q^{1/2}", 5));
        assert_eq!(a.to_string(), "2");
        assert_eq!(a.lattice(), 1);
        let p = PSeries::parse("q^{-1}", Some(int(5))).unwrap().mul(&s("q", 5));
        assert_eq!(p.to_string(), "1");
        assert_eq!(p.order(), int(4));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(s("1 - q", 4).inv().unwrap().to_string(), "1 + q + q^2 + q^3");
        let euler = s("1 - q - q^2", 5);
        assert_eq!(euler.inv().unwrap().to_string(), "1 + q + 2q^2 + 3q^3 + 5q^4");
        assert_eq!(PSeries::zero(int(5)).inv(), Err(Error::NonInvertible));
        let two = s("2 + q", 4).inv().unwrap();
        assert_eq!(two.to_string(), "1/2 - (1/4)q + (1/8)q^2 - (1/16)q^3");
        let neg = s("-1 + q", 4).inv().unwrap();
        assert_eq!(neg.to_string(), "-1 - q - q^2 - q^3");
        let shifted = PSeries::parse("-3q^2 + q^3", Some(int(6))).unwrap().inv().unwrap();
        assert_eq!(shifted.order(), int(2));
        assert_eq!(shifted.to_string(), "-(1/3)q^{-2} - (1/9)q^{-1} - 1/27 - (1/81)q");
    }

    #[test]
    fn subst_examples() {
        assert_eq!(s("1 + q", 5).subst_power(int(2)).unwrap().to_string(), "1 + q^2");
        assert_eq!(s("1 + q^2", 5).subst_power(r(1, 2)).unwrap().to_string(), "1 + q");
        let a = s("1 + 3q - q^4", 7);
        let b = a.subst_power(r(2, 3)).unwrap().subst_power(r(3, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coeff_examples() {
        let a = s("1 + 2q", 3);
        assert_eq!(a.coeff(int(1)).unwrap(), rat::big_int(2));
        assert_eq!(a.coeff(r(1, 2)).unwrap(), rat::big_int(0));
        assert!(matches!(a.coeff(int(3)), Err(Error::BeyondTruncation { .. })));
    }

    #[test]
    fn eq_upto_examples() {
        let a = s("1 + q", 10);
        let b = s("1 + q + q^5", 10);
        assert_eq!(a.eq_upto(&b, int(3)).unwrap(), EqReport::Equal);
        assert_eq!(
            a.eq_upto(&b, int(6)).unwrap(),
            EqReport::Mismatch { exponent: int(5), left: rat::big_int(0), right: rat::big_int(1) }
        );
        assert!(matches!(a.eq_upto(&b, int(11)), Err(Error::InsufficientTruncation { .. })));
    }

    #[test]
    fn dissect_examples() {
        let parts = s("1 + q + 2q^2 + 3q^3 + 5q^4", 5).dissect(2).unwrap();
        assert_eq!(parts[0].to_string(), "1 + 2q + 5q^2");
        assert_eq!(parts[1].to_string(), "1 + 3q");
        assert_eq!(parts[0].order(), int(3));
        assert_eq!(parts[1].order(), int(2));
        let c = s("7", 5).dissect(3).unwrap();
        assert_eq!(c[0].to_string(), "7");
        assert!(c[1].is_zero() && c[2].is_zero());
        assert_eq!(s("1 + q^{1/2}", 5).dissect(2), Err(Error::NonIntegralExponents));
        let neg = PSeries::parse("q^{-3} + q^{-1} + 4", Some(int(4))).unwrap();
        let parts = neg.dissect(2).unwrap();
        assert_eq!(PSeries::reassemble(&parts).unwrap(), neg);
    }

    #[test]
    fn text_round_trip() {
        for t in ["1 + q + q^2 + q^3 + 2q^4", "-q^{-1} + (3/2)q^{1/3} - 7q^5", "0", "-1/2"] {
            let a = PSeries::parse(t, Some(int(9))).unwrap();
            assert_eq!(a.to_string(), t);
            let b = PSeries::parse(&a.to_string_with_order(), None).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn binomial_kernels() {
        let mut d = Dense::one(1, int(6));
        d.mul_binomial(&rat::big_int(-1), 1);
        d.mul_binomial(&rat::big_int(-1), 2);
        assert_eq!(d.clone().into_series().to_string(), "1 + q + q^2 + q^3");
        d.div_binomial(&rat::big_int(-1), 2).unwrap();
        assert_eq!(d.into_series().to_string(), "1 + q");
        let mut d = Dense::one(1, int(4));
        d.mul_binomial(&rat::big(r(1, 2)), -1);
        assert_eq!(d.order, int(3));
        assert_eq!(d.clone().into_series().to_string(), "-(1/2)q^{-1} + 1");
        d.div_binomial(&rat::big(r(1, 2)), -1).unwrap();
        assert_eq!(d.into_series().to_string(), "1");
        let mut d = Dense::one(1, int(4));
        d.div_binomial(&rat::big(r(1, 3)), 1).unwrap();
        assert_eq!(d.into_series().to_string(), "1 + (1/3)q + (1/9)q^2 + (1/27)q^3");
    }
}
