//! Recognize a q-expansion as `c q^v prod_n (1 - q^n)^{e_n}` and, when the
//! exponents are periodic, as a J-quotient.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::catalog::Expr;
use crate::products::{self, JKind, JSpec, Length, PochFactor};
use crate::rat::{self, Rational};
use crate::series::{Monomial, PSeries};
use crate::{Error, Result};

/// Exponents larger than this end the peel.
pub const EXPONENT_GUARD: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FitResult {
    pub scalar: BigRational,
    pub q_power: Rational,
    /// Nonzero `e_n` for every `n` below the working order.
    pub exponents: BTreeMap<i64, i64>,
    /// Equivalent J-quotient when the exponents have period `M` from `n = 1`
    /// and are symmetric under `n -> -n mod M`.
    pub jquot_form: Option<Vec<JSpec>>,
    /// Order up to which the fit was checked.
    pub order: Rational,
}

impl FitResult {
    /// `scalar q^q_power prod (1 - q^n)^{e_n}` to `order`.
    pub fn expand(&self, order: Rational) -> Result<PSeries> {
        let factors: Vec<_> = self
            .exponents
            .iter()
            .map(|(&n, &e)| PochFactor::new(Monomial::q(rat::int(n)), rat::int(n), Length::Finite(1), e))
            .collect();
        products::poch_product(&factors, &Monomial::new(self.scalar.clone(), self.q_power), order)
    }

    /// The J-quotient as a catalog expression.
    pub fn jquot_expr(&self) -> Option<Expr> {
        self.jquot_form
            .as_ref()
            .map(|spec| Expr::JQuot { spec: spec.clone(), pre: Monomial::new(self.scalar.clone(), self.q_power) })
    }
}

/// Peel `F` into product form and look for period `m`. Returns `None` when
/// the peel breaks down (non-integral or huge exponents) or the exponents
/// are not periodic with period `m` within the window.
pub fn fit_product(f: &PSeries, m: i64, order: Rational) -> Result<Option<FitResult>> {
    if m < 1 {
        return Err(Error::InvalidArgument(format!("modulus must be positive, got {m}")));
    }
    if f.lattice() != 1 {
        return Err(Error::NonIntegralExponents);
    }
    let order = order.min(f.order());
    let Some((v, c)) = f.leading() else {
        return Err(Error::InvalidArgument("cannot fit the zero series".into()));
    };
    // window for the normalized quotient: exponents 0..len
    let len = rat::ceil(order - v).max(0) as usize;
    if (len as i64) < 2 * m + 1 {
        return Err(Error::InsufficientTruncation { requested: Rational::from_integer(2 * m + 1) + v, available: order });
    }
    let mut g: Vec<BigRational> = vec![BigRational::zero(); len];
    for (e, x) in f.terms() {
        let k = (e - v).to_integer() as usize;
        if k < len {
            g[k] = x / &c;
        }
    }
    let mut exponents = BTreeMap::new();
    let mut seq = vec![0i64; len];
    for n in 1..len {
        let r = &g[n];
        if !r.is_integer() {
            return Ok(None);
        }
        let Some(e) = (-r.to_integer()).to_i64() else { return Ok(None) };
        if e.abs() > EXPONENT_GUARD {
            return Ok(None);
        }
        seq[n] = e;
        if e == 0 {
            continue;
        }
        exponents.insert(n as i64, e);
        // multiply the running quotient by (1 - q^n)^{-e}
        for _ in 0..e.abs() {
            if e > 0 {
                for k in n..len {
                    let t = g[k - n].clone();
                    g[k] += t;
                }
            } else {
                for k in (n..len).rev() {
                    let t = g[k - n].clone();
                    g[k] -= t;
                }
            }
        }
    }
    debug_assert!(g[1..].iter().all(|x| x.is_zero()));
    // period m, two full periods past the stabilization point
    let mut start = len;
    for n in (1..len).rev() {
        if n + (m as usize) < len && seq[n] != seq[n + m as usize] {
            break;
        }
        start = n;
    }
    if start + 2 * (m as usize) > len {
        return Ok(None);
    }
    let jquot_form = if start == 1 { jquot_pattern(&seq, m) } else { None };
    Ok(Some(FitResult { scalar: c, q_power: v, exponents, jquot_form, order }))
}

/// Write a symmetric period-`m` exponent pattern as `prod J_d^{c_d}` over
/// divisors `d | m` times `prod J_{a,m}^{p_a}`. Within each gcd class the
/// base value is the median pair value (ties to the lower one); pairs that
/// deviate from it become `J_{a,m}` factors.
fn jquot_pattern(seq: &[i64], m: i64) -> Option<Vec<JSpec>> {
    let mu = m as usize;
    let mut e: Vec<i64> = (0..mu).map(|r| seq[if r == 0 { mu } else { r }]).collect();
    for a in 1..mu {
        if e[a] != e[mu - a] {
            return None;
        }
    }
    let divisors: Vec<i64> = (1..=m).filter(|d| m % d == 0).collect();
    let mut pairs: Vec<JSpec> = Vec::new();
    let mut base: BTreeMap<i64, i64> = BTreeMap::new();
    for &d in &divisors {
        if d == m {
            continue;
        }
        // representatives a < m - a (or a = m/2) with gcd(a, m) = d
        let reps: Vec<i64> = (1..=m / 2).filter(|&a| a.gcd(&m) == d).collect();
        let mut vals: Vec<i64> = reps.iter().map(|&a| e[a as usize]).collect();
        vals.sort_unstable();
        let b = vals[(vals.len() - 1) / 2];
        base.insert(d, b);
        for &a in &reps {
            let p = e[a as usize] - b;
            if p != 0 {
                if 2 * a == m {
                    return None;
                }
                pairs.push(JSpec { kind: JKind::Pair(a, m), power: p });
                // J_{a,m} also carries (q^m;q^m)
                e[0] -= p;
            }
        }
    }
    base.insert(m, e[0]);
    // Moebius: base[g] = sum_{d | g} c_d
    let mut coef: BTreeMap<i64, i64> = BTreeMap::new();
    for &g in &divisors {
        let below: i64 = divisors.iter().filter(|&&d| d < g && g % d == 0).map(|d| coef[d]).sum();
        coef.insert(g, base[&g] - below);
    }
    let mut out: Vec<JSpec> =
        coef.into_iter().filter(|&(_, c)| c != 0).map(|(d, c)| JSpec { kind: JKind::Full(d), power: c }).collect();
    pairs.sort_by_key(|j| match j.kind {
        JKind::Pair(a, _) => a,
        JKind::Full(d) => d,
    });
    out.extend(pairs);
    Some(out)
}

impl std::fmt::Display for FitResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.jquot_expr() {
            Some(e) => write!(f, "{e}"),
            None => {
                write!(f, "{}", Monomial::new(self.scalar.clone(), self.q_power))?;
                for (n, e) in &self.exponents {
                    write!(f, " (1-q^{n})^{e}")?;
                }
                Ok(())
            }
        }
    }
}
