//! Nahm sums, multi-sums with per-index Pochhammer denominators, and
//! single-sum q-hypergeometric series.
//!
//! `f_{A,B,C}(q) = sum_n q^{n^T A n/2 + n^T B + C} / ((q)_{n_1} ... (q)_{n_r})`
//! over nonnegative integer vectors `n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::rat::{self, Rational};
use crate::series::{index_limit, Dense, Monomial, PSeries};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NahmTriple {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Rational,
}

impl NahmTriple {
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>, c: Rational) -> Result<NahmTriple> {
        let t = NahmTriple { a, b, c };
        t.validate()?;
        Ok(t)
    }

    pub fn rank(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_shape(&self.a, self.b.len())?;
        if !is_positive_definite(&self.a) {
            return Err(Error::NotNahmMatrix(format!("A = {} is not positive definite", fmt_matrix(&self.a))));
        }
        Ok(())
    }

    pub fn to_multi_sum(&self) -> MultiSum {
        MultiSum { q: self.a.clone(), l: self.b.clone(), c: self.c, d: vec![Rational::one(); self.rank()] }
    }
}

/// `sum_n q^{n^T Q n/2 + n^T L + c} / prod_i (q^{d_i}; q^{d_i})_{n_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiSum {
    pub q: Vec<Vec<Rational>>,
    pub l: Vec<Rational>,
    pub c: Rational,
    pub d: Vec<Rational>,
}

impl MultiSum {
    pub fn rank(&self) -> usize {
        self.l.len()
    }

    /// Either `Q` is positive definite, or the exponent is strictly
    /// increasing in every index (nonnegative `Q` with `Q_kk/2 + L_k > 0`),
    /// which still leaves finitely many terms below any order.
    pub fn validate(&self) -> Result<()> {
        check_shape(&self.q, self.l.len())?;
        if self.d.len() != self.l.len() {
            return Err(Error::InvalidArgument(format!(
                "{} denominator moduli for rank {}",
                self.d.len(),
                self.l.len()
            )));
        }
        if let Some(d) = self.d.iter().find(|d| !d.is_positive()) {
            return Err(Error::InvalidArgument(format!("denominator modulus must be positive, got {d}")));
        }
        if !is_positive_definite(&self.q) && !self.is_monotone() {
            return Err(Error::NotNahmMatrix(format!(
                "Q = {} is not positive definite and the exponent is not monotone",
                fmt_matrix(&self.q)
            )));
        }
        Ok(())
    }

    fn is_monotone(&self) -> bool {
        let half = rat::r(1, 2);
        self.q.iter().all(|row| row.iter().all(|x| !x.is_negative()))
            && (0..self.rank()).all(|k| (self.q[k][k] * half + self.l[k]).is_positive())
    }

    /// The exponent `n^T Q n/2 + n^T L + c`.
    pub fn exponent(&self, n: &[i64]) -> Rational {
        let mut e = self.c;
        for i in 0..n.len() {
            e += self.l[i] * n[i];
            e += self.q[i][i] * rat::r(n[i] * n[i], 2);
            for j in 0..i {
                e += self.q[i][j] * (n[i] * n[j]);
            }
        }
        e
    }
}

fn check_shape(a: &[Vec<Rational>], r: usize) -> Result<()> {
    if a.len() != r || a.iter().any(|row| row.len() != r) {
        return Err(Error::InvalidArgument(format!("matrix is not {r}x{r}")));
    }
    for i in 0..r {
        for j in 0..i {
            if a[i][j] != a[j][i] {
                return Err(Error::InvalidArgument(format!("matrix {} is not symmetric", fmt_matrix(a))));
            }
        }
    }
    Ok(())
}

fn fmt_matrix(a: &[Vec<Rational>]) -> String {
    let rows: Vec<String> = a
        .iter()
        .map(|row| format!("[{}]", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

fn to_big(a: &[Vec<Rational>]) -> Vec<Vec<BigRational>> {
    a.iter().map(|row| row.iter().map(|x| rat::big(*x)).collect()).collect()
}

/// Leading principal minors all positive (Sylvester), by exact elimination.
pub fn is_positive_definite(a: &[Vec<Rational>]) -> bool {
    let mut m = to_big(a);
    let n = m.len();
    for k in 0..n {
        // pivot equals the ratio of consecutive leading minors
        if !m[k][k].is_positive() {
            return false;
        }
        for i in k + 1..n {
            let f = &m[i][k] / &m[k][k];
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    true
}

/// Inverse of a positive definite matrix.
fn invert(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for k in 0..n {
        let p = m[k][k].clone();
        for x in m[k].iter_mut() {
            *x /= &p;
        }
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k].clone();
                for j in 0..2 * n {
                    let t = &f * &m[k][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    m.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// Ranges of each index, given the indices already fixed.
enum Bounds {
    /// Inverses of the trailing principal blocks `Q[k..][k..]`.
    Ellipsoid(Vec<Vec<Vec<BigRational>>>),
    Monotone,
}

struct Enumerator<'a> {
    s: &'a MultiSum,
    order: Rational,
    bounds: Bounds,
}

impl<'a> Enumerator<'a> {
    fn new(s: &'a MultiSum, order: Rational) -> Self {
        let r = s.rank();
        let bounds = if is_positive_definite(&s.q) {
            let q = to_big(&s.q);
            Bounds::Ellipsoid(
                (0..r)
                    .map(|k| invert(&q[k..].iter().map(|row| row[k..].to_vec()).collect::<Vec<_>>()))
                    .collect(),
            )
        } else {
            Bounds::Monotone
        };
        Enumerator { s, order, bounds }
    }

    /// Inclusive range of `n_k` (empty when `lo > hi`) containing every
    /// value that admits a term below the order.
    fn range(&self, prefix: &[i64]) -> (i64, i64) {
        let k = prefix.len();
        let s = self.s;
        match &self.bounds {
            Bounds::Monotone => {
                let mut n = prefix.to_vec();
                n.resize(s.rank(), 0);
                let mut hi = -1;
                loop {
                    n[k] = hi + 1;
                    if s.exponent(&n) >= self.order {
                        break;
                    }
                    hi += 1;
                }
                (0, hi)
            }
            Bounds::Ellipsoid(inv) => {
                let inv = &inv[k];
                let r = s.rank();
                // restricted linear part and constant
                let lin: Vec<BigRational> = (k..r)
                    .map(|i| {
                        let mut v = rat::big(s.l[i]);
                        for (j, &p) in prefix.iter().enumerate() {
                            v += rat::big(s.q[i][j] * p);
                        }
                        v
                    })
                    .collect();
                let mut full = prefix.to_vec();
                full.resize(r, 0);
                let c0 = rat::big(s.exponent(&full));
                // min over reals is c0 - lin^T inv lin / 2, at -inv lin
                let m = r - k;
                let mut quad = BigRational::zero();
                for i in 0..m {
                    for j in 0..m {
                        quad += &lin[i] * &inv[i][j] * &lin[j];
                    }
                }
                let half = BigRational::new(BigInt::one(), BigInt::from(2));
                let radius = rat::big(self.order) - &c0 + &half * &quad;
                if radius.is_negative() {
                    return (0, -1);
                }
                let mut center = BigRational::zero();
                for j in 0..m {
                    center -= &inv[0][j] * &lin[j];
                }
                let w = rat::isqrt_ceil(&(BigRational::from_integer(BigInt::from(2)) * radius * &inv[0][0]));
                let lo = center.floor().to_integer() - &w;
                let hi = center.ceil().to_integer() + &w;
                let lo = i64::try_from(lo).unwrap_or(i64::MIN).max(0);
                let hi = i64::try_from(hi).unwrap_or(i64::MAX);
                (lo, hi)
            }
        }
    }

    /// Minimal exponent below the order and the largest innermost index.
    fn scan(&self, prefix: &mut Vec<i64>, acc: &mut Option<(Rational, i64)>) {
        let (lo, hi) = self.range(prefix);
        let last = prefix.len() + 1 == self.s.rank();
        for n in lo..=hi {
            prefix.push(n);
            if last {
                let e = self.s.exponent(prefix);
                if e < self.order {
                    *acc = Some(match *acc {
                        None => (e, n),
                        Some((m, h)) => (m.min(e), h.max(n)),
                    });
                }
            } else {
                self.scan(prefix, acc);
            }
            prefix.pop();
        }
    }
}

/// Expand a [`NahmTriple`]; `A` must be positive definite.
pub fn nahm_sum(t: &NahmTriple, order: Rational) -> Result<PSeries> {
    t.validate()?;
    multi_sum(&t.to_multi_sum(), order)
}

pub fn multi_sum(s: &MultiSum, order: Rational) -> Result<PSeries> {
    s.validate()?;
    let r = s.rank();
    if r == 0 {
        return Ok(PSeries::from_monomial(&Monomial::q(s.c), order));
    }
    let en = Enumerator::new(s, order);
    let mut found = None;
    en.scan(&mut Vec::new(), &mut found);
    let Some((emin, nmax)) = found else {
        return Ok(PSeries::zero(order));
    };
    let mut lat = rat::denom_lcm(s.l.iter().chain(s.d.iter()).chain(std::iter::once(&s.c)));
    for i in 0..r {
        lat = rat::lcm(lat, *(s.q[i][i] / 2).denom());
        for j in 0..i {
            lat = rat::lcm(lat, *s.q[i][j].denom());
        }
    }
    let step = |k: usize| (s.d[k] * lat).to_integer();
    // 1/(q^d; q^d)_n for the innermost index, deep enough for every shift
    let inner = step(r - 1);
    let mut pochs = vec![Dense::one(lat, order - emin)];
    for n in 1..=nmax {
        let mut p = pochs[n as usize - 1].clone();
        p.div_binomial(&BigRational::one(), n * inner)?;
        pochs.push(p);
    }
    let ctx = Ctx { en: &en, lat, pochs: &pochs, step: &step };
    let out = ctx.level(&mut Vec::new())?;
    Ok(out.into_series())
}

struct Ctx<'a, F: Fn(usize) -> i64 + Sync> {
    en: &'a Enumerator<'a>,
    lat: i64,
    pochs: &'a [Dense],
    step: &'a F,
}

impl<F: Fn(usize) -> i64 + Sync> Ctx<'_, F> {
    fn zero(&self) -> Dense {
        let o = self.en.order;
        Dense::zero(self.lat, index_limit(o, self.lat), o)
    }

    /// Sum over the indices after `prefix`, including their denominators.
    fn level(&self, prefix: &mut Vec<i64>) -> Result<Dense> {
        let s = self.en.s;
        let k = prefix.len();
        let (lo, hi) = self.en.range(prefix);
        if lo > hi {
            return Ok(self.zero());
        }
        if k + 1 == s.rank() {
            let mut terms = Vec::new();
            for n in lo..=hi {
                prefix.push(n);
                let e = s.exponent(prefix);
                prefix.pop();
                if e < self.en.order {
                    terms.push((n, (e * self.lat).to_integer()));
                }
            }
            let Some(first) = terms.iter().map(|t| t.1).min() else {
                return Ok(self.zero());
            };
            let mut acc = Dense::zero(self.lat, first, self.en.order);
            let one = BigInt::one();
            for (n, e) in terms {
                acc.add_shifted_int(&self.pochs[n as usize], e, &one);
            }
            return Ok(acc);
        }
        // sum_{n=lo}^{hi} X_n/(q^d;q^d)_n by Horner from the top
        let xs: Vec<Dense> = if k == 0 {
            (lo..=hi)
                .into_par_iter()
                .map(|n| self.level(&mut vec![n]))
                .collect::<Result<Vec<_>>>()?
        } else {
            let mut v = Vec::new();
            for n in lo..=hi {
                prefix.push(n);
                v.push(self.level(prefix)?);
                prefix.pop();
            }
            v
        };
        let d = (self.step)(k);
        let one = BigRational::one();
        let mut xs = xs.into_iter().rev();
        let mut acc = xs.next().unwrap();
        let mut n = hi;
        for x in xs {
            acc.div_binomial(&one, n * d)?;
            acc.add_assign(&x);
            n -= 1;
        }
        for j in 1..=lo {
            acc.div_binomial(&one, j * d)?;
        }
        Ok(acc)
    }
}

/// `(a; q^base)_{mult*n + offset}` as a function of the summation index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PochTemplate {
    pub a: Monomial,
    pub base: Rational,
    pub mult: u32,
    pub offset: u32,
}

impl PochTemplate {
    pub fn new(a: Monomial, base: Rational, mult: u32, offset: u32) -> Self {
        PochTemplate { a, base, mult, offset }
    }

    fn len(&self, n: i64) -> i64 {
        self.mult as i64 * n + self.offset as i64
    }

    fn exp(&self, k: i64) -> Rational {
        self.a.exp + self.base * k
    }
}

/// `sum_{n>=0} (+-1)^n z^n q^{alpha n^2/2 + beta n + gamma} prod num / prod den`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperSum {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub z: Monomial,
    pub alternating: bool,
    pub num: Vec<PochTemplate>,
    pub den: Vec<PochTemplate>,
}

impl HyperSum {
    /// Exponent of `q` carried by the `n`-th term outside the products.
    pub fn shift(&self, n: i64) -> Rational {
        self.alpha * rat::r(n * n, 2) + (self.beta + self.z.exp) * n + self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_negative() {
            return Err(Error::DivergentSum(format!("alpha = {} is negative", self.alpha)));
        }
        if self.alpha.is_zero() && !(self.beta + self.z.exp).is_positive() {
            return Err(Error::DivergentSum("the term exponents do not grow".into()));
        }
        if self.z.coeff.is_zero() {
            return Err(Error::InvalidArgument("z must be nonzero".into()));
        }
        for t in self.num.iter().chain(&self.den) {
            if !t.base.is_positive() {
                return Err(Error::InvalidArgument(format!("Pochhammer base must be positive, got q^{}", t.base)));
            }
        }
        Ok(())
    }

    /// Least `n` from which the shift is nondecreasing.
    fn vertex(&self) -> i64 {
        if self.alpha.is_zero() {
            0
        } else {
            rat::ceil(-(self.beta + self.z.exp) / self.alpha).max(0)
        }
    }
}

/// How far numerator factors can pull a term's valuation below its shift.
fn negative_budget(h: &HyperSum) -> Rational {
    let mut budget = Rational::zero();
    for t in &h.num {
        let mut k = 0;
        while t.exp(k).is_negative() {
            budget -= t.exp(k);
            k += 1;
        }
    }
    budget
}

pub fn hyper_sum(h: &HyperSum, order: Rational) -> Result<PSeries> {
    h.validate()?;
    let vertex = h.vertex();
    let smin = (vertex.saturating_sub(1)..=vertex + 1).map(|n| h.shift(n.max(0))).min().unwrap().min(h.shift(0));
    let neg = negative_budget(h);
    let mut lat = rat::denom_lcm([h.alpha / 2, h.beta, h.gamma, h.z.exp].iter());
    for t in h.num.iter().chain(&h.den) {
        lat = rat::lcm(lat, rat::denom_lcm([t.a.exp, t.base].iter()));
    }
    let units = |e: Rational| (e * lat).to_integer();
    let mut running = Dense::one(lat, order - smin + neg);
    let mut acc: Option<Dense> = None;
    let sign = if h.alternating { -BigRational::one() } else { BigRational::one() };
    let factor = sign * &h.z.coeff;
    let mut zpow = BigRational::one();
    let mut n = 0i64;
    loop {
        let s = h.shift(n);
        if n >= vertex && s - neg >= order {
            break;
        }
        let mut dead = false;
        for t in &h.num {
            let from = if n == 0 { 0 } else { t.len(n - 1) };
            for k in from..t.len(n) {
                dead |= t.exp(k).is_zero() && t.a.coeff.is_one();
                running.mul_binomial(&t.a.coeff, units(t.exp(k)));
            }
        }
        if dead {
            // this and every later term vanish
            break;
        }
        for t in &h.den {
            let from = if n == 0 { 0 } else { t.len(n - 1) };
            for k in from..t.len(n) {
                if t.exp(k).is_zero() && t.a.coeff.is_one() {
                    return Err(Error::ZeroFactor(format!("denominator ({}; q^{}) vanishes at n = {n}", t.a, t.base)));
                }
                running.div_binomial(&t.a.coeff, units(t.exp(k)))?;
            }
        }
        if n > 0 {
            zpow *= &factor;
        }
        if s - neg < order {
            let mut term = running.clone();
            term.shift(units(s));
            term.scale(&zpow);
            term.truncate(order);
            if term.order < order {
                return Err(Error::InsufficientTruncation { requested: order, available: term.order });
            }
            match &mut acc {
                None => acc = Some(term),
                Some(a) => a.add_assign(&term),
            }
        }
        n += 1;
    }
    Ok(match acc {
        Some(a) => a.into_series(),
        None => PSeries::zero(order),
    })
}
