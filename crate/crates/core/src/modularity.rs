//! Generalized eta-products and Robins' sufficient criterion for being a
//! modular function on Gamma_1(N).
//!
//! A [`GEtaList`] is the list `[[delta, g, r], ...]` at a level `N`. The
//! factor `eta_{delta;g}` is `q^{(delta/2) P2(g/delta)}` times the product of
//! `(1 - q^m)` over `m = +-g (mod delta)`, the two classes taken as a
//! multiset; so for `g = delta/2` the product is squared and half-integer
//! exponents are allowed.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::products::{JKind, JSpec};
use crate::rat::{self, Rational};
use crate::series::Monomial;
use crate::{Error, Result};

/// Second periodic Bernoulli polynomial `{t}^2 - {t} + 1/6`.
pub fn p2(t: Rational) -> Rational {
    let f = rat::frac(t);
    f * f - f + rat::r(1, 6)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GEtaFactor {
    pub delta: i64,
    pub g: i64,
    pub r: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GEtaList {
    pub level: i64,
    pub factors: Vec<GEtaFactor>,
}

impl GEtaList {
    pub fn new(level: i64, factors: Vec<GEtaFactor>) -> Result<GEtaList> {
        let list = GEtaList { level, factors };
        list.validate()?;
        Ok(list)
    }

    /// Build from `(delta, g, r)` triples with integer `r`.
    pub fn from_triples(level: i64, triples: &[(i64, i64, i64)]) -> Result<GEtaList> {
        GEtaList::new(
            level,
            triples.iter().map(|&(delta, g, r)| GEtaFactor { delta, g, r: rat::int(r) }).collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.level < 1 {
            return Err(Error::InvalidGeta(format!("level must be positive, got {}", self.level)));
        }
        for f in &self.factors {
            if f.delta < 1 || self.level % f.delta != 0 {
                return Err(Error::InvalidGeta(format!("delta={} does not divide N={}", f.delta, self.level)));
            }
            if !(0 < f.g && f.g < f.delta) {
                return Err(Error::InvalidGeta(format!("need 0 < g < delta, got [{}, {}]", f.delta, f.g)));
            }
            let ok = f.r.is_integer() || (2 * f.g == f.delta && (f.r * 2).is_integer());
            if !ok {
                return Err(Error::InvalidGeta(format!(
                    "exponent {} on [{}, {}] must be integral (half-integral only for g = delta/2)",
                    f.r, f.delta, f.g
                )));
            }
        }
        Ok(())
    }

    /// Parse the bracket syntax `[[N,g,r],...]`. Without an explicit level
    /// the lcm of the deltas is used.
    pub fn parse(text: &str, level: Option<i64>) -> Result<GEtaList> {
        let perr = |col: usize, message: String| Error::Parse { line: 1, column: col + 1, message };
        let compact: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let s: String = compact.iter().map(|(_, c)| *c).collect();
        let col_of = |i: usize| compact.get(i).map(|(c, _)| *c).unwrap_or(text.len());
        if !s.starts_with('[') || !s.ends_with(']') {
            return Err(perr(0, "geta-list must be enclosed in [ ]".into()));
        }
        let inner = &s[1..s.len() - 1];
        let mut factors = Vec::new();
        let mut i = 0;
        let b = inner.as_bytes();
        while i < b.len() {
            if b[i] != b'[' {
                return Err(perr(col_of(i + 1), "expected '['".into()));
            }
            let close = inner[i..].find(']').ok_or_else(|| perr(col_of(i + 1), "unclosed '['".into()))? + i;
            let parts: Vec<&str> = inner[i + 1..close].split(',').collect();
            if parts.len() != 3 {
                return Err(perr(col_of(i + 1), format!("expected [delta, g, r], got [{}]", &inner[i + 1..close])));
            }
            let delta = parts[0].parse::<i64>().map_err(|_| perr(col_of(i + 2), format!("bad delta '{}'", parts[0])))?;
            let g = parts[1].parse::<i64>().map_err(|_| perr(col_of(i + 2), format!("bad g '{}'", parts[1])))?;
            let r = rat::parse_rational(parts[2]).ok_or_else(|| perr(col_of(i + 2), format!("bad r '{}'", parts[2])))?;
            factors.push(GEtaFactor { delta, g, r });
            i = close + 1;
            if i < b.len() {
                if b[i] != b',' {
                    return Err(perr(col_of(i + 1), "expected ','".into()));
                }
                i += 1;
            }
        }
        let level = level.unwrap_or_else(|| factors.iter().fold(1, |acc, f| acc.lcm(&f.delta.max(1))));
        GEtaList::new(level, factors)
    }
}

impl fmt::Display for GEtaList {
    /// Bracket syntax, e.g. `[[56, 4, -3], [56, 12, -2]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "[{}, {}, {}]", x.delta, x.g, x.r)?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModularityReport {
    pub valinf: Rational,
    pub val0: Rational,
    pub is_modular: bool,
}

impl ModularityReport {
    /// Verdict wording: the criterion is sufficient only.
    pub fn verdict(&self, level: i64) -> String {
        if self.is_modular {
            format!("certified modular on Gamma1({level})")
        } else {
            format!("criterion not met on Gamma1({level})")
        }
    }

    /// Session-style trace of the two checks.
    pub fn trace(&self, list: &GEtaList) -> String {
        let parity = |v: Rational| {
            if rat::is_even_integer(v) {
                "which is even."
            } else {
                "which is not an even integer."
            }
        };
        format!(
            "* starting Gamma1ModFunc with L={} and N={}\nAll n are divisors of {}\nval0={}\n{}\nvalinf={}\n{}\n{}\n",
            list,
            list.level,
            list.level,
            self.val0,
            parity(self.val0),
            self.valinf,
            parity(self.valinf),
            self.verdict(list.level)
        )
    }
}

/// Evaluate both sums of Robins' criterion.
pub fn robins_check(list: &GEtaList) -> ModularityReport {
    let mut valinf = Rational::zero();
    let mut val0 = Rational::zero();
    for f in &list.factors {
        valinf += p2(rat::r(f.g, f.delta)) * f.delta * f.r;
        val0 += rat::r(list.level, f.delta) * rat::r(1, 6) * f.r;
    }
    ModularityReport { valinf, val0, is_modular: rat::is_even_integer(valinf) && rat::is_even_integer(val0) }
}

/// Least `k >= 1` with `k * v` an even integer.
fn least_even_multiplier(v: Rational) -> i64 {
    if v.is_zero() {
        return 1;
    }
    (1..).find(|&k| rat::is_even_integer(v * k)).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Scaling {
    pub k: i64,
    pub n0: i64,
    pub level: i64,
}

/// Least `k`, `N0` such that `L(k tau)` passes the criterion at level
/// `k * N0 * N`.
pub fn find_scaling(list: &GEtaList) -> Scaling {
    let rep = robins_check(list);
    let k = least_even_multiplier(rep.valinf);
    let n0 = least_even_multiplier(rep.val0);
    Scaling { k, n0, level: k * n0 * list.level }
}

/// Combine per-term scalings for a sum `f_1 + ... + f_s`: with `k` the lcm
/// of the `k_i`, each `f_i(k tau)` lives on `Gamma_1((k/k_i) N_i)`.
pub fn combine_scalings(parts: &[Scaling]) -> Scaling {
    let k = parts.iter().fold(1, |acc, s| acc.lcm(&s.k));
    let level = parts.iter().fold(1, |acc, s| acc.lcm(&(k / s.k * s.level)));
    Scaling { k, n0: 0, level }
}

/// `eta_{delta;g}(k tau) = eta_{k delta; k g}(tau)` applied factorwise.
pub fn geta_scale(list: &GEtaList, k: i64) -> GEtaList {
    GEtaList {
        level: list.level * k,
        factors: list.factors.iter().map(|f| GEtaFactor { delta: f.delta * k, g: f.g * k, r: f.r }).collect(),
    }
}

/// Rewrite `prefactor * prod J^power` as `coeff * q^residual * L` with `L`
/// a generalized eta-product at level `n`.
pub fn geta_from_jquot(spec: &[JSpec], prefactor: &Monomial, n: i64) -> Result<(GEtaList, Rational)> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("level must be positive, got {n}")));
    }
    // multiplicity of each residue mod n among the (1 - q^x) factors
    let mut count = vec![0i64; n as usize];
    for s in spec {
        s.validate()?;
        let m = s.modulus();
        if n % m != 0 {
            return Err(Error::InvalidArgument(format!("modulus {m} does not divide level {n}")));
        }
        let mut add = |x: i64| {
            for t in 0..n / m {
                count[((x + m * t) % n) as usize] += s.power;
            }
        };
        match s.kind {
            JKind::Full(_) => add(m),
            JKind::Pair(a, _) => {
                add(a);
                add(m - a);
                add(m);
            }
        }
    }
    if count[0] != 0 {
        return Err(Error::NotEtaProduct { level: n, exponent: rat::int(count[0]) });
    }
    let mut factors = Vec::new();
    let mut shift = Rational::zero();
    for g in 1..=n / 2 {
        debug_assert_eq!(count[g as usize], count[(n - g) as usize]);
        let c = count[g as usize];
        if c == 0 {
            continue;
        }
        let r = if 2 * g == n { rat::r(c, 2) } else { rat::int(c) };
        shift += r * p2(rat::r(g, n)) * n / 2;
        factors.push(GEtaFactor { delta: n, g, r });
    }
    Ok((GEtaList { level: n, factors }, prefactor.exp - shift))
}

/// The common `C` making every `q^C * term` an eta-product, for terms in a
/// variable where the Nahm sum appears as `f(q^k)`.
pub fn common_c(terms: &[(Vec<JSpec>, Monomial)], k: Rational) -> Result<Rational> {
    let mut residuals = Vec::new();
    for (spec, pre) in terms {
        let n = spec.iter().fold(1i64, |acc, s| acc.lcm(&s.modulus()));
        residuals.push(geta_from_jquot(spec, pre, n)?.1);
    }
    let Some(first) = residuals.first().copied() else {
        return Err(Error::InvalidArgument("common C needs at least one term".into()));
    };
    if residuals.iter().any(|r| *r != first) {
        return Err(Error::InconsistentC(residuals));
    }
    Ok(-first / k)
}

/// Exponents of `prod eta^r` grouped by `g/delta`, for comparing lists that
/// describe the same product at different levels.
pub fn normalized_exponents(list: &GEtaList) -> BTreeMap<Rational, Rational> {
    let mut out: BTreeMap<Rational, Rational> = BTreeMap::new();
    for f in &list.factors {
        *out.entry(rat::r(f.g, f.delta)).or_default() += f.r;
    }
    out.retain(|_, v| !v.is_zero());
    out
}
