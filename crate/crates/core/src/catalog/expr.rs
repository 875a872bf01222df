//! Expression trees for the two sides of an identity.

use num_traits::Zero;

use crate::modularity::GEtaList;
use crate::nahm::{self, HyperSum, MultiSum, NahmTriple};
use crate::products::{self, JSpec, PochFactor};
use crate::rat::{self, Rational};
use crate::series::{Monomial, PSeries};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Nahm(NahmTriple),
    Multi(MultiSum),
    Hyper(HyperSum),
    /// `sum_{n in Z+nu} q^{alpha n^2/2}`
    Theta { alpha: Rational, nu: Rational },
    /// `sum_n (-1)^n q^{n(n-1)/2} z^n`
    JTriple(Monomial),
    Poch(Vec<PochFactor>),
    JQuot { spec: Vec<JSpec>, pre: Monomial },
    GEta(GEtaList),
    Monomial(Monomial),
    Scale(Box<Expr>, Rational),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Inv(Box<Expr>),
    /// `q -> q^k`
    Subst(Box<Expr>, Rational),
}

impl Expr {
    pub fn scale(self, c: Rational) -> Expr {
        Expr::Scale(Box::new(self), c)
    }

    pub fn inv(self) -> Expr {
        Expr::Inv(Box::new(self))
    }

    pub fn subst(self, k: Rational) -> Expr {
        Expr::Subst(Box::new(self), k)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Expr::Nahm(t) => t.validate(),
            Expr::Multi(s) => s.validate(),
            Expr::Hyper(h) => h.validate(),
            Expr::Theta { alpha, .. } if *alpha <= Rational::zero() => Err(Error::DivergentTheta(*alpha)),
            Expr::JQuot { spec, .. } => spec.iter().try_for_each(|s| s.validate()),
            Expr::GEta(l) => l.validate(),
            Expr::Scale(c, _) | Expr::Inv(c) => c.validate(),
            Expr::Subst(c, k) => {
                if *k <= Rational::zero() {
                    return Err(Error::InvalidArgument(format!("substitution power must be positive, got {k}")));
                }
                c.validate()
            }
            Expr::Sum(cs) | Expr::Product(cs) => cs.iter().try_for_each(|c| c.validate()),
            _ => Ok(()),
        }
    }

    /// Expand to at least `order`, then truncate to exactly `order`.
    pub fn eval(&self, order: Rational) -> Result<PSeries> {
        Ok(self.eval_raw(order)?.truncate(order))
    }

    // Result order is >= `order` (never less).
    fn eval_raw(&self, order: Rational) -> Result<PSeries> {
        match self {
            Expr::Nahm(t) => nahm::nahm_sum(t, order),
            Expr::Multi(s) => nahm::multi_sum(s, order),
            Expr::Hyper(h) => nahm::hyper_sum(h, order),
            Expr::Theta { alpha, nu } => products::theta_sum(*alpha, *nu, order),
            Expr::JTriple(z) => products::jacobi_triple_sum(z, order),
            Expr::Poch(fs) => products::poch_product(fs, &Monomial::one(), order),
            Expr::JQuot { spec, pre } => products::jquot(spec, pre, order),
            Expr::GEta(l) => products::geta_expand(l, order),
            Expr::Monomial(m) => Ok(PSeries::from_monomial(m, order)),
            Expr::Scale(c, x) => Ok(c.eval_raw(order)?.scale(&rat::big(*x))),
            Expr::Sum(cs) => {
                let mut acc = PSeries::zero(order);
                for c in cs {
                    acc = acc.add(&c.eval_raw(order)?);
                }
                Ok(acc)
            }
            Expr::Product(cs) => eval_product(cs, order),
            Expr::Inv(c) => eval_inv(c, order),
            Expr::Subst(c, k) => {
                if *k <= Rational::zero() {
                    return Err(Error::InvalidArgument(format!("substitution power must be positive, got {k}")));
                }
                c.eval_raw(order / *k)?.subst_power(*k)
            }
        }
    }
}

// Lower bound for the valuation of a truncated series.
fn val_bound(s: &PSeries) -> Rational {
    s.valuation().unwrap_or_else(|| s.order())
}

fn eval_product(cs: &[Expr], order: Rational) -> Result<PSeries> {
    if cs.is_empty() {
        return Ok(PSeries::one(order));
    }
    let mut parts: Vec<PSeries> = cs.iter().map(|c| c.eval_raw(order)).collect::<Result<_>>()?;
    // Each child needs order T - sum of the other valuations. Valuation bounds
    // only grow on re-evaluation, so this settles after a few rounds.
    for _ in 0..4 {
        let vals: Vec<Rational> = parts.iter().map(val_bound).collect();
        let total: Rational = vals.iter().copied().sum();
        let mut changed = false;
        for (i, c) in cs.iter().enumerate() {
            let need = order - (total - vals[i]);
            if need > parts[i].order() {
                parts[i] = c.eval_raw(need)?;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut acc = parts[0].clone();
    for p in &parts[1..] {
        acc = acc.mul(p);
    }
    Ok(acc)
}

fn eval_inv(c: &Expr, order: Rational) -> Result<PSeries> {
    let mut at = order;
    let mut s = c.eval_raw(at)?;
    // A child that is zero to `order` may still be invertible further out.
    let mut tries = 0;
    while s.is_zero() {
        tries += 1;
        if tries > 4 {
            return Err(Error::NonInvertible);
        }
        at = at + (at * 2).max(Rational::from_integer(8));
        s = c.eval_raw(at)?;
    }
    let v = s.valuation().unwrap();
    let need = order + v * 2;
    if need > s.order() {
        s = c.eval_raw(need)?;
    }
    s.inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    #[test]
    fn inverse_partitions() {
        let e = Expr::Poch(vec![PochFactor::qinf(1, 1, 1)]).inv();
        assert_eq!(e.eval(int(5)).unwrap(), PSeries::from_ints(&[1, 1, 2, 3, 5], int(5)));
    }

    #[test]
    fn product_with_negative_valuation() {
        // q^{-3} * q^3/(1-q) needs the second factor beyond the target order.
        let e = Expr::Product(vec![
            Expr::Monomial(Monomial::q(int(-3))),
            Expr::Product(vec![
                Expr::Monomial(Monomial::q(int(3))),
                Expr::Poch(vec![PochFactor::qinf(1, 1, -1)]),
            ]),
        ]);
        let s = e.eval(int(4)).unwrap();
        assert_eq!(s, PSeries::from_ints(&[1, 1, 2, 3], int(4)));
    }

    #[test]
    fn inverse_of_shifted() {
        let e = Expr::Product(vec![Expr::Monomial(Monomial::q(int(2))), Expr::Poch(vec![PochFactor::qinf(1, 1, 1)])])
            .inv();
        let s = e.eval(int(2)).unwrap();
        assert_eq!(s.order(), int(2));
        assert_eq!(s.valuation(), Some(int(-2)));
        assert_eq!(s.coeff(int(1)).unwrap(), rat::big_int(3));
    }
}
