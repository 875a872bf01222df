//! Text syntax for expressions and corpus documents.
//!
//! Expressions use a prefix grammar:
//!
//! ```text
//! nahm(A=[[2,1],[1,1]], B=[1,1/2], C=0)
//! multi(Q=[[2,4],[4,8]], L=[0,4], c=0, d=[4,8])
//! hyper(alpha=2, beta=1, gamma=0, z=q, alt=true, num=[(-q;q^2)_{n}], den=[(q;q)_{2n+1}])
//! theta(alpha=3, nu=1/2)         jtriple(z=-q^{1/2})
//! poch((q;q^5)_inf^-1, (-q;q^2)_{3})
//! jquot(num=[J(4)^3, J(6,28)], den=[J(2)^2], pre=2q)
//! geta(N=56, L=[[56,4,-3],[56,12,-2]])
//! scale(e, c=-1/2)  sum(e, ...)  prod(e, ...)  inv(e)  subst(e, k=4)
//! ```
//!
//! Anything else is a monomial: `2q^{-1}`, `-(1/2)q`, `q^3`, `-1`.
//!
//! A corpus is a sequence of documents separated by `---` lines. Each
//! document has `key: value` fields (`id`, `status`, `provenance`, `lhs`,
//! `rhs`); indented lines continue the previous field and `#` starts a
//! comment line.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::expr::Expr;
use super::{Identity, Status};
use crate::modularity::{GEtaFactor, GEtaList};
use crate::nahm::{HyperSum, MultiSum, NahmTriple, PochTemplate};
use crate::products::{JKind, JSpec, Length, PochFactor};
use crate::rat::Rational;
use crate::series::Monomial;
use crate::{Error, Result};

/// Parse a single expression.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text.bytes().enumerate().map(|(i, b)| (b, 1, i + 1)).collect());
    let e = p.expr()?;
    p.end()?;
    Ok(e)
}

/// Parse a corpus file.
pub fn parse_corpus(text: &str) -> Result<Vec<Identity>> {
    let mut out = Vec::new();
    let mut doc: Vec<Field> = Vec::new();
    let mut doc_line = 1;
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let trimmed = line.trim_end();
        if trimmed.trim_start().starts_with('#') {
            continue;
        }
        if trimmed == "---" {
            if !doc.is_empty() {
                out.push(build_identity(std::mem::take(&mut doc), doc_line)?);
            }
            doc_line = ln + 1;
            continue;
        }
        if trimmed.trim().is_empty() {
            continue;
        }
        if line.starts_with(' ') || line.starts_with('\t') {
            let Some(last) = doc.last_mut() else {
                return Err(perr(ln, 1, "continuation line outside a field"));
            };
            last.value.push((b' ', ln, 1));
            let start = line.len() - line.trim_start().len();
            for (i, b) in trimmed.bytes().enumerate().skip(start) {
                last.value.push((b, ln, i + 1));
            }
            continue;
        }
        let Some(colon) = line.find(':') else {
            return Err(perr(ln, 1, "expected 'key: value'"));
        };
        let key = line[..colon].trim().to_string();
        let rest = &trimmed[colon + 1..];
        let skip = rest.len() - rest.trim_start().len();
        let value = trimmed
            .bytes()
            .enumerate()
            .skip(colon + 1 + skip)
            .map(|(i, b)| (b, ln, i + 1))
            .collect();
        if doc.is_empty() {
            doc_line = ln;
        }
        doc.push(Field { key, line: ln, value });
    }
    if !doc.is_empty() {
        out.push(build_identity(doc, doc_line)?);
    }
    Ok(out)
}

/// Serialize identities in the corpus format.
pub fn write_corpus(ids: &[Identity]) -> String {
    let mut s = String::new();
    for (i, id) in ids.iter().enumerate() {
        if i > 0 {
            s.push_str("---\n");
        }
        let _ = writeln!(s, "id: {}", id.id);
        let _ = writeln!(s, "status: {}", id.status);
        let _ = writeln!(s, "provenance: {}", id.provenance);
        let _ = writeln!(s, "lhs: {}", id.lhs);
        let _ = writeln!(s, "rhs: {}", id.rhs);
    }
    s
}

struct Field {
    key: String,
    line: usize,
    value: Vec<(u8, usize, usize)>,
}

impl Field {
    fn text(&self) -> String {
        String::from_utf8_lossy(&self.value.iter().map(|x| x.0).collect::<Vec<_>>()).into_owned()
    }
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn build_identity(fields: Vec<Field>, line: usize) -> Result<Identity> {
    let mut id = None;
    let mut status = None;
    let mut provenance = None;
    let mut lhs = None;
    let mut rhs = None;
    for f in fields {
        let slot_taken = match f.key.as_str() {
            "id" => id.replace(f.text()).is_some(),
            "status" => {
                let s = f.text().parse::<Status>().map_err(|m| perr(f.line, f.value.first().map_or(1, |v| v.2), m))?;
                status.replace(s).is_some()
            }
            "provenance" => provenance.replace(f.text()).is_some(),
            "lhs" | "rhs" => {
                let mut p = Parser::new(f.value);
                let e = p.expr()?;
                p.end()?;
                if f.key == "lhs" {
                    lhs.replace(e).is_some()
                } else {
                    rhs.replace(e).is_some()
                }
            }
            other => return Err(perr(f.line, 1, format!("unknown field '{other}'"))),
        };
        if slot_taken {
            return Err(perr(f.line, 1, format!("duplicate field '{}'", f.key)));
        }
    }
    let missing = |name: &str| perr(line, 1, format!("document is missing '{name}'"));
    Ok(Identity {
        id: id.ok_or_else(|| missing("id"))?,
        status: status.ok_or_else(|| missing("status"))?,
        provenance: provenance.unwrap_or_default(),
        lhs: lhs.ok_or_else(|| missing("lhs"))?,
        rhs: rhs.ok_or_else(|| missing("rhs"))?,
    })
}

struct Parser {
    s: Vec<(u8, usize, usize)>,
    i: usize,
}

const HEADS: &[&str] =
    &["nahm", "multi", "hyper", "theta", "jtriple", "poch", "jquot", "geta", "scale", "sum", "prod", "inv", "subst"];

impl Parser {
    fn new(s: Vec<(u8, usize, usize)>) -> Self {
        Parser { s, i: 0 }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        self.err_at(self.i, message)
    }

    fn err_at(&self, i: usize, message: impl Into<String>) -> Error {
        let (line, column) = match self.s.get(i) {
            Some(&(_, l, c)) => (l, c),
            None => self.s.last().map_or((1, 1), |&(_, l, c)| (l, c + 1)),
        };
        perr(line, column, message)
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].0.is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).map(|x| x.0)
    }

    fn peek_at(&self, k: usize) -> Option<u8> {
        self.s.get(self.i + k).map(|x| x.0)
    }

    fn eat(&mut self, ch: u8) -> bool {
        if self.peek() == Some(ch) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.eat(ch) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |c| format!("'{}'", c as char));
            Err(self.err(format!("expected '{}', found {found}", ch as char)))
        }
    }

    fn end(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(())
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let st = self.i;
        while self.i < self.s.len() && (self.s[self.i].0.is_ascii_alphanumeric() || self.s[self.i].0 == b'_') {
            if self.i == st && !self.s[self.i].0.is_ascii_alphabetic() {
                break;
            }
            self.i += 1;
        }
        (self.i > st).then(|| self.s[st..self.i].iter().map(|x| x.0 as char).collect())
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        let at = {
            self.ws();
            self.i
        };
        match self.ident() {
            Some(w) if w == word => Ok(()),
            _ => Err(self.err_at(at, format!("expected '{word}'"))),
        }
    }

    /// `name=`; fails if the next key is something else.
    fn key(&mut self, name: &str) -> Result<()> {
        self.keyword(name)?;
        self.expect(b'=')
    }

    /// Optional `, name=` in fixed position.
    fn opt_key(&mut self, name: &str) -> bool {
        let save = self.i;
        if self.eat(b',') && self.ident().as_deref() == Some(name) && self.eat(b'=') {
            return true;
        }
        self.i = save;
        false
    }

    fn digits(&mut self) -> Option<BigInt> {
        self.ws();
        let st = self.i;
        while self.i < self.s.len() && self.s[self.i].0.is_ascii_digit() {
            self.i += 1;
        }
        if self.i == st {
            return None;
        }
        let t: String = self.s[st..self.i].iter().map(|x| x.0 as char).collect();
        t.parse().ok()
    }

    fn ubig(&mut self) -> Result<Option<BigRational>> {
        let Some(n) = self.digits() else { return Ok(None) };
        let save = self.i;
        if self.eat(b'/') {
            let at = self.i;
            let Some(d) = self.digits() else {
                return Err(self.err("expected a denominator"));
            };
            if d.is_zero() {
                return Err(self.err_at(at, "zero denominator"));
            }
            return Ok(Some(BigRational::new(n, d)));
        }
        self.i = save;
        Ok(Some(BigRational::from_integer(n)))
    }

    fn small(&self, at: usize, v: BigRational) -> Result<Rational> {
        crate::rat::small(&v).ok_or_else(|| self.err_at(at, "number out of range"))
    }

    fn rational(&mut self) -> Result<Rational> {
        self.ws();
        let at = self.i;
        let neg = self.eat(b'-');
        let Some(v) = self.ubig()? else {
            return Err(self.err("expected a rational number"));
        };
        let v = self.small(at, v)?;
        Ok(if neg { -v } else { v })
    }

    fn integer(&mut self) -> Result<i64> {
        self.ws();
        let at = self.i;
        let r = self.rational()?;
        if !r.is_integer() {
            return Err(self.err_at(at, "expected an integer"));
        }
        Ok(r.to_integer())
    }

    fn vector(&mut self) -> Result<Vec<Rational>> {
        self.expect(b'[')?;
        let mut v = Vec::new();
        if self.eat(b']') {
            return Ok(v);
        }
        loop {
            v.push(self.rational()?);
            if self.eat(b']') {
                return Ok(v);
            }
            self.expect(b',')?;
        }
    }

    fn matrix(&mut self) -> Result<Vec<Vec<Rational>>> {
        self.expect(b'[')?;
        let mut m = Vec::new();
        if self.eat(b']') {
            return Ok(m);
        }
        loop {
            m.push(self.vector()?);
            if self.eat(b']') {
                return Ok(m);
            }
            self.expect(b',')?;
        }
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.expect(b'[')?;
        let mut v = Vec::new();
        if self.eat(b']') {
            return Ok(v);
        }
        loop {
            v.push(item(self)?);
            if self.eat(b']') {
                return Ok(v);
            }
            self.expect(b',')?;
        }
    }

    // `e`, `-e`, `{e}`, `{-e}` with rational e
    fn exponent(&mut self) -> Result<Rational> {
        let braced = self.eat(b'{');
        let e = self.rational()?;
        if braced {
            self.expect(b'}')?;
        }
        Ok(e)
    }

    fn is_q(&mut self) -> bool {
        self.peek() == Some(b'q')
            && !self.peek_at(1).is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
    }

    fn monomial(&mut self) -> Result<Monomial> {
        self.ws();
        let at = self.i;
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let coeff = if self.peek() == Some(b'(') {
            self.i += 1;
            let cneg = self.eat(b'-');
            let Some(v) = self.ubig()? else {
                return Err(self.err("expected a coefficient"));
            };
            self.expect(b')')?;
            Some(if cneg { -v } else { v })
        } else {
            self.ubig()?
        };
        let exp = if self.is_q() {
            self.i += 1;
            if self.eat(b'^') {
                Some(self.exponent()?)
            } else {
                Some(Rational::one())
            }
        } else {
            None
        };
        if coeff.is_none() && exp.is_none() {
            return Err(self.err_at(at, "expected an expression"));
        }
        let c = coeff.unwrap_or_else(BigRational::one);
        Ok(Monomial::new(if neg { -c } else { c }, exp.unwrap_or_else(Rational::zero)))
    }

    // `q`, `q^2`, `q^{1/2}`
    fn base(&mut self) -> Result<Rational> {
        if !self.is_q() {
            return Err(self.err("expected a base q^m"));
        }
        self.i += 1;
        if self.eat(b'^') {
            self.exponent()
        } else {
            Ok(Rational::one())
        }
    }

    fn power(&mut self) -> Result<i64> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        let braced = self.eat(b'{');
        let p = self.integer()?;
        if braced {
            self.expect(b'}')?;
        }
        Ok(p)
    }

    fn poch_factor(&mut self) -> Result<PochFactor> {
        self.expect(b'(')?;
        let a = self.monomial()?;
        self.expect(b';')?;
        let base = self.base()?;
        self.expect(b')')?;
        self.expect(b'_')?;
        let length = if self.peek() == Some(b'i') {
            self.keyword("inf")?;
            Length::Infinite
        } else {
            let braced = self.eat(b'{');
            let at = self.i;
            let n = self.integer()?;
            if braced {
                self.expect(b'}')?;
            }
            if n < 0 {
                return Err(self.err_at(at, "negative Pochhammer length"));
            }
            Length::Finite(n as u64)
        };
        let power = self.power()?;
        Ok(PochFactor::new(a, base, length, power))
    }

    // `(a;q^m)_{2n+1}`
    fn template(&mut self) -> Result<PochTemplate> {
        self.expect(b'(')?;
        let a = self.monomial()?;
        self.expect(b';')?;
        let base = self.base()?;
        self.expect(b')')?;
        self.expect(b'_')?;
        let braced = self.eat(b'{');
        let at = self.i;
        let mut mult = BigInt::zero();
        let mut offset = BigInt::zero();
        let lead = self.digits();
        if self.peek() == Some(b'n') {
            self.i += 1;
            mult = lead.unwrap_or_else(BigInt::one);
            if self.eat(b'+') {
                offset = self.digits().ok_or_else(|| self.err("expected an offset"))?;
            }
        } else {
            offset = lead.ok_or_else(|| self.err("expected a length like 2n+1"))?;
        }
        if braced {
            self.expect(b'}')?;
        }
        let to_u32 = |v: BigInt| u32::try_from(v).map_err(|_| self.err_at(at, "length out of range"));
        Ok(PochTemplate::new(a, base, to_u32(mult)?, to_u32(offset)?))
    }

    // `J(m)^p` or `J(a,m)^p`, positive p
    fn jsym(&mut self) -> Result<JSpec> {
        self.ws();
        let at = self.i;
        self.keyword("J")?;
        self.expect(b'(')?;
        let x = self.integer()?;
        let kind = if self.eat(b',') { JKind::Pair(x, self.integer()?) } else { JKind::Full(x) };
        self.expect(b')')?;
        let power = self.power()?;
        if power < 1 {
            return Err(self.err_at(at, "J powers inside num/den lists must be positive"));
        }
        let j = JSpec { kind, power };
        j.validate().map_err(|e| self.err_at(at, e.to_string()))?;
        Ok(j)
    }

    fn boolean(&mut self) -> Result<bool> {
        self.ws();
        let at = self.i;
        match self.ident().as_deref() {
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            _ => Err(self.err_at(at, "expected true or false")),
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        let mut v = vec![self.expr()?];
        loop {
            let save = self.i;
            if !self.eat(b',') {
                break;
            }
            // stop before a `key=` argument
            let save2 = self.i;
            if self.ident().is_some() && self.eat(b'=') {
                self.i = save;
                break;
            }
            self.i = save2;
            v.push(self.expr()?);
        }
        Ok(v)
    }

    fn check<T>(&self, at: usize, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Parse { .. } => e,
            other => self.err_at(at, other.to_string()),
        })
    }

    pub fn expr(&mut self) -> Result<Expr> {
        self.ws();
        let at = self.i;
        let save = self.i;
        let head = match self.ident() {
            Some(h) if HEADS.contains(&h.as_str()) && self.peek() == Some(b'(') => h,
            Some(h) if h != "q" => return Err(self.err_at(at, format!("unknown expression '{h}'"))),
            _ => {
                self.i = save;
                return Ok(Expr::Monomial(self.monomial()?));
            }
        };
        self.expect(b'(')?;
        let e = match head.as_str() {
            "nahm" => {
                self.key("A")?;
                let a = self.matrix()?;
                self.expect(b',')?;
                self.key("B")?;
                let b = self.vector()?;
                self.expect(b',')?;
                self.key("C")?;
                let c = self.rational()?;
                Expr::Nahm(self.check(at, NahmTriple::new(a, b, c))?)
            }
            "multi" => {
                self.key("Q")?;
                let q = self.matrix()?;
                self.expect(b',')?;
                self.key("L")?;
                let l = self.vector()?;
                let c = if self.opt_key("c") { self.rational()? } else { Rational::zero() };
                let d = if self.opt_key("d") { self.vector()? } else { vec![Rational::one(); l.len()] };
                let s = MultiSum { q, l, c, d };
                self.check(at, s.validate())?;
                Expr::Multi(s)
            }
            "hyper" => {
                self.key("alpha")?;
                let alpha = self.rational()?;
                let beta = if self.opt_key("beta") { self.rational()? } else { Rational::zero() };
                let gamma = if self.opt_key("gamma") { self.rational()? } else { Rational::zero() };
                let z = if self.opt_key("z") { self.monomial()? } else { Monomial::one() };
                let alternating = if self.opt_key("alt") { self.boolean()? } else { false };
                let num = if self.opt_key("num") { self.list(Self::template)? } else { Vec::new() };
                let den = if self.opt_key("den") { self.list(Self::template)? } else { Vec::new() };
                let h = HyperSum { alpha, beta, gamma, z, alternating, num, den };
                self.check(at, h.validate())?;
                Expr::Hyper(h)
            }
            "theta" => {
                self.key("alpha")?;
                let alpha = self.rational()?;
                self.expect(b',')?;
                self.key("nu")?;
                let nu = self.rational()?;
                if alpha <= Rational::zero() {
                    return Err(self.err_at(at, Error::DivergentTheta(alpha).to_string()));
                }
                Expr::Theta { alpha, nu }
            }
            "jtriple" => {
                self.key("z")?;
                Expr::JTriple(self.monomial()?)
            }
            "poch" => {
                let mut fs = vec![self.poch_factor()?];
                while self.eat(b',') {
                    fs.push(self.poch_factor()?);
                }
                Expr::Poch(fs)
            }
            "jquot" => {
                let mut spec = Vec::new();
                let mut first = true;
                let mut pre = Monomial::one();
                for name in ["num", "den", "pre"] {
                    let present = if first {
                        let save = self.i;
                        if self.ident().as_deref() == Some(name) && self.eat(b'=') {
                            true
                        } else {
                            self.i = save;
                            false
                        }
                    } else {
                        self.opt_key(name)
                    };
                    if !present {
                        continue;
                    }
                    first = false;
                    match name {
                        "num" => spec.extend(self.list(Self::jsym)?),
                        "den" => spec.extend(self.list(Self::jsym)?.into_iter().map(|j| JSpec { power: -j.power, ..j })),
                        _ => pre = self.monomial()?,
                    }
                }
                if first {
                    return Err(self.err("expected num=, den= or pre="));
                }
                Expr::JQuot { spec, pre }
            }
            "geta" => {
                self.key("N")?;
                let level = self.integer()?;
                self.expect(b',')?;
                self.key("L")?;
                let factors = self.list(|p| {
                    p.expect(b'[')?;
                    let delta = p.integer()?;
                    p.expect(b',')?;
                    let g = p.integer()?;
                    p.expect(b',')?;
                    let r = p.rational()?;
                    p.expect(b']')?;
                    Ok(GEtaFactor { delta, g, r })
                })?;
                Expr::GEta(self.check(at, GEtaList::new(level, factors))?)
            }
            "scale" => {
                let child = self.expr()?;
                self.expect(b',')?;
                self.key("c")?;
                Expr::Scale(Box::new(child), self.rational()?)
            }
            "subst" => {
                let child = self.expr()?;
                self.expect(b',')?;
                self.key("k")?;
                let kat = self.i;
                let k = self.rational()?;
                if k <= Rational::zero() {
                    return Err(self.err_at(kat, "substitution power must be positive"));
                }
                Expr::Subst(Box::new(child), k)
            }
            "inv" => Expr::Inv(Box::new(self.expr()?)),
            "sum" => Expr::Sum(self.args()?),
            "prod" => Expr::Product(self.args()?),
            _ => unreachable!(),
        };
        self.expect(b')')?;
        Ok(e)
    }
}

fn write_vec(f: &mut fmt::Formatter<'_>, v: &[Rational]) -> fmt::Result {
    f.write_str("[")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("]")
}

fn write_mat(f: &mut fmt::Formatter<'_>, m: &[Vec<Rational>]) -> fmt::Result {
    f.write_str("[")?;
    for (i, row) in m.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write_vec(f, row)?;
    }
    f.write_str("]")
}

fn write_power(f: &mut fmt::Formatter<'_>, p: i64) -> fmt::Result {
    if p != 1 {
        write!(f, "^{p}")?;
    }
    Ok(())
}

impl fmt::Display for PochFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{})", self.a, Monomial::q(self.base))?;
        match self.length {
            Length::Infinite => f.write_str("_inf")?,
            Length::Finite(n) => write!(f, "_{{{n}}}")?,
        }
        write_power(f, self.power)
    }
}

impl fmt::Display for PochTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{})_{{", self.a, Monomial::q(self.base))?;
        match (self.mult, self.offset) {
            (0, s) => write!(f, "{s}")?,
            (m, s) => {
                if m != 1 {
                    write!(f, "{m}")?;
                }
                f.write_str("n")?;
                if s != 0 {
                    write!(f, "+{s}")?;
                }
            }
        }
        f.write_str("}")
    }
}

impl fmt::Display for JSpec {
    /// Power shown as its absolute value; the sign picks num or den.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            JKind::Full(m) => write!(f, "J({m})")?,
            JKind::Pair(a, m) => write!(f, "J({a},{m})")?,
        }
        write_power(f, self.power.abs())
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl IntoIterator<Item = T>) -> fmt::Result {
    f.write_str("[")?;
    for (i, x) in items.into_iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("]")
}

fn write_args(f: &mut fmt::Formatter<'_>, head: &str, cs: &[Expr]) -> fmt::Result {
    write!(f, "{head}(")?;
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Nahm(t) => {
                f.write_str("nahm(A=")?;
                write_mat(f, &t.a)?;
                f.write_str(", B=")?;
                write_vec(f, &t.b)?;
                write!(f, ", C={})", t.c)
            }
            Expr::Multi(s) => {
                f.write_str("multi(Q=")?;
                write_mat(f, &s.q)?;
                f.write_str(", L=")?;
                write_vec(f, &s.l)?;
                if !s.c.is_zero() {
                    write!(f, ", c={}", s.c)?;
                }
                if s.d.iter().any(|x| !x.is_one()) {
                    f.write_str(", d=")?;
                    write_vec(f, &s.d)?;
                }
                f.write_str(")")
            }
            Expr::Hyper(h) => {
                write!(f, "hyper(alpha={}", h.alpha)?;
                if !h.beta.is_zero() {
                    write!(f, ", beta={}", h.beta)?;
                }
                if !h.gamma.is_zero() {
                    write!(f, ", gamma={}", h.gamma)?;
                }
                if !h.z.is_one() {
                    write!(f, ", z={}", h.z)?;
                }
                if h.alternating {
                    f.write_str(", alt=true")?;
                }
                if !h.num.is_empty() {
                    f.write_str(", num=")?;
                    write_list(f, &h.num)?;
                }
                if !h.den.is_empty() {
                    f.write_str(", den=")?;
                    write_list(f, &h.den)?;
                }
                f.write_str(")")
            }
            Expr::Theta { alpha, nu } => write!(f, "theta(alpha={alpha}, nu={nu})"),
            Expr::JTriple(z) => write!(f, "jtriple(z={z})"),
            Expr::Poch(fs) => {
                f.write_str("poch(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Expr::JQuot { spec, pre } => {
                f.write_str("jquot(")?;
                let num: Vec<&JSpec> = spec.iter().filter(|j| j.power > 0).collect();
                let den: Vec<&JSpec> = spec.iter().filter(|j| j.power < 0).collect();
                let mut parts = 0;
                if !num.is_empty() {
                    f.write_str("num=")?;
                    write_list(f, num)?;
                    parts += 1;
                }
                if !den.is_empty() {
                    f.write_str(if parts > 0 { ", den=" } else { "den=" })?;
                    write_list(f, den)?;
                    parts += 1;
                }
                if !pre.is_one() || parts == 0 {
                    f.write_str(if parts > 0 { ", pre=" } else { "pre=" })?;
                    write!(f, "{pre}")?;
                }
                f.write_str(")")
            }
            Expr::GEta(l) => {
                write!(f, "geta(N={}, L=[", l.level)?;
                for (i, x) in l.factors.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "[{},{},{}]", x.delta, x.g, x.r)?;
                }
                f.write_str("])")
            }
            Expr::Monomial(m) => write!(f, "{m}"),
            Expr::Scale(c, x) => write!(f, "scale({c}, c={x})"),
            Expr::Sum(cs) => write_args(f, "sum", cs),
            Expr::Product(cs) => write_args(f, "prod", cs),
            Expr::Inv(c) => write!(f, "inv({c})"),
            Expr::Subst(c, k) => write!(f, "subst({c}, k={k})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(s: &str) {
        let e = parse_expr(s).unwrap();
        let t = e.to_string();
        assert_eq!(parse_expr(&t).unwrap(), e, "{s} -> {t}");
        assert_eq!(t, s);
    }

    #[test]
    fn round_trips() {
        round("nahm(A=[[2,1],[1,1]], B=[1,1/2], C=0)");
        round("multi(Q=[[2,4],[4,8]], L=[0,4], d=[4,8])");
        round("hyper(alpha=2, beta=1, z=-q^{1/2}, alt=true, num=[(-q;q^2)_{n}], den=[(q;q)_{2n+1}, (q^4;q^4)_{1}])");
        round("theta(alpha=3/2, nu=-1/2)");
        round("jtriple(z=-q^{1/2})");
        round("poch((q;q^5)_inf^-1, (-q^{1/2};q^{1/2})_{3}^2)");
        round("jquot(num=[J(4)^3, J(6,28)], den=[J(2)^2], pre=2q)");
        round("jquot(den=[J(3)], pre=-q^{-1})");
        round("geta(N=56, L=[[56,4,-3],[56,28,1/2]])");
        round("scale(sum(q, -(1/3)q^2, prod(2, inv(q^{-1}))), c=-1/2)");
        round("subst(nahm(A=[[2]], B=[0], C=0), k=4)");
    }

    #[test]
    fn diagnostics_have_positions() {
        match parse_expr("nahm(A=[[2,1],[1,1]], B=[1,1/2] C=0)") {
            Err(Error::Parse { line: 1, column, .. }) => assert_eq!(column, 33),
            other => panic!("{other:?}"),
        }
        match parse_expr("nahm(A=[[1,2],[2,1]], B=[0,0], C=0)") {
            Err(Error::Parse { line: 1, column: 1, message }) => assert!(message.contains("not a Nahm")),
            other => panic!("{other:?}"),
        }
        assert!(parse_expr("frob(1)").is_err());
        assert!(parse_expr("jquot(num=[J(3,3)])").is_err());
    }

    #[test]
    fn corpus_documents() {
        let text = "# comment\nid: a\nstatus: proved\nprovenance: x, y\nlhs: sum(q,\n   q^2)\nrhs: q\n---\nid: b\nstatus: auxiliary\nlhs: 1\nrhs: 1\n";
        let ids = parse_corpus(text).unwrap();
        assert_eq!(ids.len(), 2);
        assert_eq!(ids[0].provenance, "x, y");
        let again = parse_corpus(&write_corpus(&ids)).unwrap();
        assert_eq!(again, ids);
        match parse_corpus("id: a\nstatus: proved\nlhs: sum(q,\n   q^)\nrhs: q\n") {
            Err(Error::Parse { line: 4, column: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_corpus("id: a\nstatus: maybe\nlhs: 1\nrhs: 1\n").is_err());
    }
}
