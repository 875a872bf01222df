//! The shipped corpus and the generators for parametric families.

use num_traits::{One, Zero};

use super::expr::Expr;
use super::syntax::parse_expr;
use super::{parse_corpus, Catalog, Identity, Status};
use crate::nahm::{is_positive_definite, HyperSum, MultiSum, NahmTriple, PochTemplate};
use crate::products::{JSpec, PochFactor};
use crate::rat::{int, r, Rational};
use crate::series::Monomial;
use crate::{Error, Result};

const CORPUS: &str = include_str!("../../corpus/identities.txt");

/// Sampled `(alpha, nu)` pairs for the rank-two family with
/// `A = [[alpha, 1-alpha], [1-alpha, alpha]]`. The family holds for every
/// rational `alpha > 1/2` and `nu`; only these points are checked.
pub const EXAMPLE1_SAMPLES: &[((i64, i64), (i64, i64))] = &[
    ((1, 1), (0, 1)),
    ((1, 1), (1, 2)),
    ((1, 1), (1, 1)),
    ((3, 2), (0, 1)),
    ((3, 2), (1, 2)),
    ((3, 2), (1, 1)),
    ((2, 1), (0, 1)),
    ((2, 1), (1, 2)),
    ((2, 1), (1, 1)),
    ((3, 1), (0, 1)),
    ((3, 1), (1, 2)),
    ((3, 1), (1, 1)),
];

const VZ_SEEDS: &[((i64, i64), (i64, i64), (i64, i64))] = &[
    ((1, 2), (0, 1), (-1, 40)),
    ((1, 2), (1, 2), (1, 40)),
    ((1, 1), (0, 1), (-1, 48)),
    ((1, 1), (1, 2), (1, 24)),
    ((1, 1), (-1, 2), (1, 24)),
    ((2, 1), (0, 1), (-1, 60)),
    ((2, 1), (1, 1), (11, 60)),
];

/// The full shipped corpus: the text file plus the generated families.
pub fn builtin() -> Catalog {
    let mut all = parse_corpus(CORPUS).expect("shipped corpus parses");
    all.extend(generated());
    Catalog::new(all).expect("shipped corpus ids are unique")
}

fn generated() -> Vec<Identity> {
    let mut out = Vec::new();
    for z in [int(0), int(1), int(-1), int(-2)] {
        out.push(lebesgue(&Monomial::q(z)));
    }
    for n in -5..=5 {
        out.push(durfee(n));
    }
    for (a, t) in [(int(1), int(0)), (int(1), r(1, 2)), (int(2), int(1)), (r(1, 2), r(1, 4)), (int(3), int(-1))] {
        out.push(cao_wang(a, t).expect("valid specialization"));
    }
    for z in [int(0), int(-1), int(-2)] {
        out.push(lee(&Monomial::q(z)));
    }
    for k in 2..=4 {
        out.push(warnaar(k).expect("valid k"));
    }
    for &((an, ad), (nn, nd)) in EXAMPLE1_SAMPLES {
        out.extend(theorem_grid(r(an, ad), r(nn, nd)).expect("valid sample"));
    }
    for k in 2..=5 {
        for s in 1..=k {
            out.push(andrews_gordon(k, s).expect("valid k, s"));
        }
    }
    for &((a0, a1), (b0, b1), (c0, c1)) in VZ_SEEDS {
        let t = NahmTriple::new(vec![vec![r(a0, a1)]], vec![r(b0, b1)], r(c0, c1)).expect("valid seed");
        out.push(vz_double(&t).1);
    }
    for z in [Monomial::q(int(1)), Monomial::q(r(1, 2)), Monomial::of(r(-1, 2), int(1))] {
        out.extend(euler(&z).expect("valid z"));
    }
    out
}

fn qinf_inv() -> Expr {
    Expr::Poch(vec![PochFactor::qinf(1, 1, -1)])
}

fn mono(m: Monomial) -> Expr {
    Expr::Monomial(m)
}

fn ones(n: usize) -> Vec<Rational> {
    vec![Rational::one(); n]
}

fn tpl(a: Monomial, base: i64, mult: u32, offset: u32) -> PochTemplate {
    PochTemplate::new(a, int(base), mult, offset)
}

/// `sum q^{n(n+1)/2} (-zq;q)_n/(q;q)_n = (-zq^2;q^2)_inf (-q;q)_inf`.
pub fn lebesgue(z: &Monomial) -> Identity {
    let zq = Monomial::new(-z.coeff.clone(), z.exp + 1);
    let zq2 = Monomial::new(-z.coeff.clone(), z.exp + 2);
    let lhs = Expr::Hyper(HyperSum {
        alpha: int(1),
        beta: r(1, 2),
        gamma: int(0),
        z: Monomial::one(),
        alternating: false,
        num: vec![tpl(zq, 1, 1, 0)],
        den: vec![tpl(Monomial::q(int(1)), 1, 1, 0)],
    });
    let rhs = Expr::Poch(vec![
        PochFactor::inf(zq2, int(2), 1),
        PochFactor::inf(Monomial::of(int(-1), int(1)), int(1), 1),
    ]);
    Identity::new(format!("lebesgue-z={z}"), Status::Auxiliary, format!("Lebesgue, z={z}"), lhs, rhs)
}

/// `sum_j q^{j(j+n)}/((q;q)_j (q;q)_{j+n}) = 1/(q;q)_inf`. For `n < 0` the
/// terms with `j < -n` vanish and the sum is reindexed by `j -> j - n`.
pub fn durfee(n: i64) -> Identity {
    let m = n.unsigned_abs() as u32;
    let lhs = Expr::Hyper(HyperSum {
        alpha: int(2),
        beta: int(m as i64),
        gamma: int(0),
        z: Monomial::one(),
        alternating: false,
        num: vec![],
        den: vec![tpl(Monomial::q(int(1)), 1, 1, 0), tpl(Monomial::q(int(1)), 1, 1, m)],
    });
    let note = if n < 0 { ", reindexed j -> j+|n|" } else { "" };
    Identity::new(format!("durfee-n={n}"), Status::Auxiliary, format!("Durfee rectangle, n={n}{note}"), lhs, qinf_inv())
}

/// Cao-Wang with `u = q^t`:
/// `sum u^{i-j} q^{C(i,2)+C(j+1,2)+a C(j-i,2)}/((q;q)_i (q;q)_j)
///  = (-u q^a, -q/u, q^{a+1}; q^{a+1})_inf/(q;q)_inf`.
pub fn cao_wang(a: Rational, t: Rational) -> Result<Identity> {
    let half = r(1, 2);
    let am = vec![vec![a + 1, -a], vec![-a, a + 1]];
    let b = vec![(a - 1) * half + t, (-a + 1) * half - t];
    let lhs = Expr::Nahm(NahmTriple::new(am, b, int(0))?);
    let m = a + 1;
    let rhs = Expr::Product(vec![
        Expr::Poch(vec![
            PochFactor::inf(Monomial::of(int(-1), a + t), m, 1),
            PochFactor::inf(Monomial::of(int(-1), int(1) - t), m, 1),
            PochFactor::inf(Monomial::q(m), m, 1),
        ]),
        qinf_inv(),
    ]);
    let u = Monomial::q(t);
    Ok(Identity::new(format!("cao-wang-a={a}-u={u}"), Status::Auxiliary, format!("Cao-Wang, a={a}, u={u}"), lhs, rhs))
}

/// Lee's double-sum form of the Lebesgue sum.
pub fn lee(z: &Monomial) -> Identity {
    if !z.coeff.is_one() {
        // only z = q^t has a Nahm-sum right side
        panic!("lee: z must be a pure power of q");
    }
    let zq = Monomial::new(-z.coeff.clone(), z.exp + 1);
    let lhs = Expr::Hyper(HyperSum {
        alpha: int(1),
        beta: r(1, 2),
        gamma: int(0),
        z: Monomial::one(),
        alternating: false,
        num: vec![tpl(zq, 1, 1, 0)],
        den: vec![tpl(Monomial::q(int(1)), 1, 1, 0)],
    });
    let rhs = Expr::Nahm(
        NahmTriple::new(vec![vec![int(2), int(1)], vec![int(1), int(1)]], vec![z.exp + 1, r(1, 2)], int(0))
            .expect("positive definite"),
    );
    Identity::new(format!("lee-z={z}"), Status::Auxiliary, format!("Lee's double sum, z={z}"), lhs, rhs)
}

fn min_plus_one(n: usize, scale: i64) -> Vec<Vec<Rational>> {
    (0..n).map(|a| (0..n).map(|b| int(scale * (a.min(b) as i64 + 1))).collect()).collect()
}

/// Warnaar's identity for `k >= 2`.
pub fn warnaar(k: i64) -> Result<Identity> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("warnaar: need k >= 2, got {k}")));
    }
    let n = (k - 1) as usize;
    let lhs = Expr::Nahm(NahmTriple::new(min_plus_one(n, 1), vec![int(0); n], int(0))?);
    let m = int(k + 1);
    let rhs = Expr::Product(vec![
        Expr::Poch(vec![
            PochFactor::inf(Monomial::of(int(-1), r(1, 2)), int(1), 1),
            PochFactor::inf(Monomial::q(r(k, 2)), m, 1),
            PochFactor::inf(Monomial::q(r(k + 2, 2)), m, 1),
            PochFactor::inf(Monomial::q(m), m, 1),
        ]),
        qinf_inv(),
    ]);
    Ok(Identity::new(format!("warnaar-k={k}"), Status::Auxiliary, format!("Warnaar, k={k}"), lhs, rhs))
}

/// The rank-two family `A = [[alpha, 1-alpha], [1-alpha, alpha]]`,
/// `B = (alpha nu, -alpha nu)`: the product form with `C = 0` and the
/// theta form with `C = alpha nu^2/2 - 1/24`.
pub fn theorem_grid(alpha: Rational, nu: Rational) -> Result<Vec<Identity>> {
    if alpha <= r(1, 2) {
        return Err(Error::InvalidArgument(format!("need alpha > 1/2, got {alpha}")));
    }
    let a = vec![vec![alpha, int(1) - alpha], vec![int(1) - alpha, alpha]];
    let b = vec![alpha * nu, -alpha * nu];
    let tag = format!("alpha={alpha}-nu={nu}");
    let prov = format!("rank-two theta family, alpha={alpha}, nu={nu} (sampled point)");
    let h = alpha / 2;
    let product = Identity::new(
        format!("exam1-{tag}"),
        Status::Proved,
        prov.clone(),
        Expr::Nahm(NahmTriple::new(a.clone(), b.clone(), int(0))?),
        Expr::Product(vec![
            Expr::Poch(vec![
                PochFactor::inf(Monomial::of(int(-1), h + alpha * nu), alpha, 1),
                PochFactor::inf(Monomial::of(int(-1), h - alpha * nu), alpha, 1),
                PochFactor::inf(Monomial::q(alpha), alpha, 1),
            ]),
            qinf_inv(),
        ]),
    );
    let c = alpha * nu * nu / 2 - r(1, 24);
    let theta = Identity::new(
        format!("exam1-theta-{tag}"),
        Status::Proved,
        format!("{prov}, theta form"),
        Expr::Nahm(NahmTriple::new(a, b, c)?),
        Expr::Product(vec![mono(Monomial::q(r(-1, 24))), Expr::Theta { alpha, nu }, qinf_inv()]),
    );
    Ok(vec![product, theta])
}

/// Andrews-Gordon for `2 <= k <= 6`, `1 <= s <= k`, as a multi-sum over
/// `n_1..n_{k-1}` with `N_i = n_i + ... + n_{k-1}`.
pub fn andrews_gordon(k: i64, s: i64) -> Result<Identity> {
    if !(2..=6).contains(&k) || !(1..=k).contains(&s) {
        return Err(Error::InvalidArgument(format!("andrews_gordon: need 2 <= k <= 6 and 1 <= s <= k, got k={k}, s={s}")));
    }
    let n = (k - 1) as usize;
    // N_i for i >= s-1 (0-based) contributes to every n_j with j >= i.
    let l = (0..n as i64).map(|j| int((j - s + 2).max(0))).collect();
    let lhs = Expr::Multi(MultiSum { q: min_plus_one(n, 2), l, c: int(0), d: ones(n) });
    let rhs = Expr::JQuot { spec: vec![JSpec::jam(s, 2 * k + 1, 1), JSpec::j(1, -1)], pre: Monomial::one() };
    Ok(Identity::new(format!("AG-k={k}-s={s}"), Status::Auxiliary, format!("Andrews-Gordon, k={k}, s={s}"), lhs, rhs))
}

/// Vlasenko-Zwegers doubling. Returns the doubled sum and the identity
/// `f_{A',B',C'}(q) = q^{r/24} (q^2;q^2)^r_inf/(q;q)^r_inf f_{A,B,C}(q^2)`.
///
/// `A' = [[2A, I], [I, I]]` is only positive semidefinite in general
/// (it is singular for `A = 1/2`), so the doubled side is a [`MultiSum`].
pub fn vz_double(t: &NahmTriple) -> (MultiSum, Identity) {
    let n = t.rank();
    let mut q = vec![vec![Rational::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] = t.a[i][j] * 2;
        }
        q[i][n + i] = int(1);
        q[n + i][i] = int(1);
        q[n + i][n + i] = int(1);
    }
    let mut l: Vec<Rational> = t.b.iter().map(|b| *b * 2).collect();
    l.extend(std::iter::repeat_n(r(1, 2), n));
    let c = t.c * 2 + r(n as i64, 24);
    let ms = MultiSum { q, l, c, d: ones(2 * n) };
    let lhs = if is_positive_definite(&ms.q) {
        Expr::Nahm(NahmTriple { a: ms.q.clone(), b: ms.l.clone(), c })
    } else {
        Expr::Multi(ms.clone())
    };
    let rn = n as i64;
    let rhs = Expr::Product(vec![
        mono(Monomial::q(r(rn, 24))),
        Expr::Poch(vec![PochFactor::qinf(2, 2, rn), PochFactor::qinf(1, 1, -rn)]),
        Expr::Nahm(t.clone()).subst(int(2)),
    ]);
    let label = format!("{}", Expr::Nahm(t.clone()));
    let label = label.trim_start_matches("nahm(").trim_end_matches(')').replace(' ', "");
    let id = Identity::new(format!("VZ-{label}"), Status::Auxiliary, format!("Vlasenko-Zwegers doubling of {label}"), lhs, rhs);
    (ms, id)
}

/// Both of Euler's identities at `z`.
pub fn euler(z: &Monomial) -> Result<Vec<Identity>> {
    if z.exp <= Rational::zero() {
        return Err(Error::InvalidArgument(format!("euler: z must have positive q-exponent, got {z}")));
    }
    let den = vec![tpl(Monomial::q(int(1)), 1, 1, 0)];
    let first = Identity::new(
        format!("euler-1-z={z}"),
        Status::Auxiliary,
        format!("Euler, first identity, z={z}"),
        Expr::Hyper(HyperSum {
            alpha: int(0),
            beta: int(0),
            gamma: int(0),
            z: z.clone(),
            alternating: false,
            num: vec![],
            den: den.clone(),
        }),
        Expr::Poch(vec![PochFactor::inf(z.clone(), int(1), -1)]),
    );
    let second = Identity::new(
        format!("euler-2-z={z}"),
        Status::Auxiliary,
        format!("Euler, second identity, z={z}"),
        Expr::Hyper(HyperSum {
            alpha: int(1),
            beta: r(-1, 2),
            gamma: int(0),
            z: z.clone(),
            alternating: false,
            num: vec![],
            den,
        }),
        Expr::Poch(vec![PochFactor::inf(Monomial::new(-z.coeff.clone(), z.exp), int(1), 1)]),
    );
    Ok(vec![first, second])
}

/// A dissection claim: `lhs = sum_j q^j F_j(q^m)` with some `F_j` known.
#[derive(Clone, Debug)]
pub struct Dissection {
    pub name: &'static str,
    pub lhs: Expr,
    pub m: i64,
    /// `(j, None)` for a vanishing component, `(j, Some(F_j))` otherwise.
    pub expected: Vec<(usize, Option<Expr>)>,
}

fn ex(s: &str) -> Expr {
    parse_expr(s).expect("built-in expression parses")
}

/// Dissection claims for the rank-two examples 5, 7 and 9.
pub fn dissections() -> Vec<Dissection> {
    let e5 = "nahm(A=[[1/3,-1/3],[-1/3,4/3]], B=[{}], C=0)";
    let e7 = "subst(nahm(A=[[1/2,-1/2],[-1/2,1]], B=[0,0], C=0), k=4)";
    let e9 = "subst(nahm(A=[[1,-1/2],[-1/2,3/4]], B=[{}], C=0), k=8)";
    vec![
        Dissection {
            name: "exam5-1",
            lhs: ex(&e5.replace("{}", "-1/6,2/3")).subst(int(3)),
            m: 3,
            expected: vec![
                (2, None),
                (0, Some(ex("jquot(num=[J(2), J(15), J(6,30), J(9,30)], den=[J(1)^2, J(30)^2], pre=2)"))),
            ],
        },
        Dissection {
            name: "exam5-2",
            lhs: ex(&e5.replace("{}", "1/2,0")).subst(int(3)),
            m: 3,
            expected: vec![
                (1, None),
                (2, Some(ex("jquot(num=[J(2), J(15), J(3,30), J(12,30)], den=[J(1)^2, J(30)^2], pre=2)"))),
            ],
        },
        Dissection {
            name: "exam7-1",
            lhs: ex(e7),
            m: 2,
            expected: vec![
                (0, Some(ex("jquot(num=[J(2)^3, J(28), J(3,14)], den=[J(1)^2, J(4), J(4,28), J(12,28)])"))),
                (1, Some(ex("subst(jquot(num=[J(2), J(14), J(2,14)], den=[J(1)^2, J(1,14)], pre=2), k=2)"))),
            ],
        },
        Dissection {
            name: "exam9-1",
            lhs: ex(&e9.replace("{}", "-1/2,1/4")),
            m: 4,
            expected: vec![
                (2, None),
                (3, None),
                (
                    1,
                    Some(ex("jquot(num=[J(2), J(14)^2, J(28), J(2,28), J(6,28)], \
                             den=[J(1), J(1,28), J(4,28), J(7,28), J(12,28), J(13,28)])")),
                ),
            ],
        },
        Dissection { name: "exam9-2", lhs: ex(&e9.replace("{}", "0,0")), m: 4, expected: vec![(1, None), (2, None)] },
        Dissection { name: "exam9-3", lhs: ex(&e9.replace("{}", "0,1/2")), m: 4, expected: vec![(1, None), (2, None)] },
    ]
}

