//! Rational-function normal form.
//!
//! An expression is viewed as `N / D` where `N` is a polynomial over opaque
//! atoms and `D` is a product of denominator atoms (bases that appear with a
//! negative integer exponent). Denominator atoms that divide `N` exactly are
//! cancelled by multivariate division in lex order. The result is canonical
//! as long as the denominator atoms are irreducible and pairwise coprime,
//! which covers the linear denominators such as `a - b` or `1 - 2b` that
//! arise from similarity exponents.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{Expr, Node, Rational};

type Mono = Vec<(Expr, u32)>;

#[derive(Clone, Debug, Default)]
struct Poly(BTreeMap<Mono, Rational>);

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out: BTreeMap<Expr, u32> = a.iter().cloned().collect();
    for (v, k) in b {
        *out.entry(v.clone()).or_insert(0) += k;
    }
    out.into_iter().collect()
}

fn mono_div(a: &Mono, b: &Mono) -> Option<Mono> {
    let mut out: BTreeMap<Expr, u32> = a.iter().cloned().collect();
    for (v, k) in b {
        let slot = out.get_mut(v)?;
        if *slot < *k {
            return None;
        }
        *slot -= k;
        if *slot == 0 {
            out.remove(v);
        }
    }
    Some(out.into_iter().collect())
}

/// Lex order with the smallest atom as the most significant variable.
fn lex_cmp(a: &Mono, b: &Mono) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((va, ka)), Some((vb, kb))) => match va.cmp(vb) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => {
                    if ka != kb {
                        return ka.cmp(kb);
                    }
                    i += 1;
                    j += 1;
                }
            },
        }
    }
}

impl Poly {
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn constant(c: Rational) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.0.insert(Vec::new(), c);
        }
        p
    }

    fn atom(a: &Expr) -> Poly {
        let mut p = Poly::default();
        p.0.insert(vec![(a.clone(), 1)], Rational::one());
        p
    }

    fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(m.clone()).or_insert_with(Rational::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.0.remove(&m);
        }
    }

    fn add_poly(&mut self, other: &Poly) {
        for (m, c) in &other.0 {
            self.add_term(m.clone(), c.clone());
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn leading(&self) -> (&Mono, &Rational) {
        self.0
            .iter()
            .max_by(|a, b| lex_cmp(a.0, b.0))
            .expect("leading term of zero polynomial")
    }

    fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading();
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut r = self.clone();
        let mut q = Poly::default();
        while !r.is_zero() {
            let (rm, rc) = r.leading();
            let qm = mono_div(rm, &dm)?;
            let qc = rc / &dc;
            let mut step = Poly::default();
            step.add_term(qm.clone(), qc.clone());
            q.add_term(qm, qc);
            let sub = step.mul(d);
            for (m, c) in sub.0 {
                r.add_term(m, -c);
            }
        }
        Some(q)
    }

    fn to_expr(&self) -> Expr {
        let terms = self
            .0
            .iter()
            .map(|(m, c)| {
                let mut fs = Vec::with_capacity(m.len() + 1);
                fs.push(Expr::num(c.clone()));
                for (a, k) in m {
                    fs.push(Expr::powi(a, *k as i64));
                }
                Expr::mul(fs)
            })
            .collect();
        Expr::add(terms)
    }
}

/// Polynomial view of a sum used as a denominator; `None` if some term has
/// a nested denominator.
fn sum_as_poly(e: &Expr) -> Option<Poly> {
    let mut p = Poly::default();
    for t in e.terms() {
        let (c, m) = t.split_coeff();
        let mut mono: BTreeMap<Expr, u32> = BTreeMap::new();
        if !m.is_one() {
            for f in m.factors() {
                let (b, x) = f.as_base_exp();
                match x.as_int() {
                    Some(k) if k > 0 => *mono.entry(b).or_insert(0) += k as u32,
                    Some(_) => return None,
                    None => *mono.entry(f).or_insert(0) += 1,
                }
            }
        }
        p.add_term(mono.into_iter().collect(), c);
    }
    Some(p)
}

fn den_atom_poly(a: &Expr) -> Poly {
    match a.node() {
        Node::Add(_) => sum_as_poly(a).unwrap_or_else(|| Poly::atom(a)),
        _ => Poly::atom(a),
    }
}

struct SplitTerm {
    coeff: Rational,
    num: BTreeMap<Expr, u32>,
    den: BTreeMap<Expr, u32>,
}

fn split_term(t: &Expr) -> SplitTerm {
    let (coeff, m) = t.split_coeff();
    let mut num = BTreeMap::new();
    let mut den = BTreeMap::new();
    if !m.is_one() {
        for f in m.factors() {
            let (b, x) = f.as_base_exp();
            match x.as_int() {
                Some(k) if k > 0 => *num.entry(b).or_insert(0) += k as u32,
                Some(k) => *den.entry(b).or_insert(0) += (-k) as u32,
                None => *num.entry(f).or_insert(0) += 1,
            }
        }
    }
    SplitTerm { coeff, num, den }
}

/// Brings `e` over a common denominator and cancels denominator atoms that
/// divide the numerator. The result is expanded back into canonical form.
pub fn cancel(e: &Expr) -> Expr {
    let terms: Vec<SplitTerm> = e.terms().iter().map(split_term).collect();
    if terms.iter().all(|t| t.den.is_empty()) {
        return e.clone();
    }
    let mut den: BTreeMap<Expr, u32> = BTreeMap::new();
    for t in &terms {
        for (a, k) in &t.den {
            let slot = den.entry(a.clone()).or_insert(0);
            *slot = (*slot).max(*k);
        }
    }
    let den_polys: BTreeMap<Expr, Poly> =
        den.keys().map(|a| (a.clone(), den_atom_poly(a))).collect();

    let mut num = Poly::default();
    for t in &terms {
        let mono: Mono = t.num.iter().map(|(a, k)| (a.clone(), *k)).collect();
        let mut p = Poly::default();
        p.add_term(mono, t.coeff.clone());
        for (a, k) in &den {
            let own = t.den.get(a).copied().unwrap_or(0);
            if *k > own {
                p = p.mul(&den_polys[a].pow(k - own));
            }
        }
        num.add_poly(&p);
    }
    if num.is_zero() {
        return Expr::zero();
    }
    for (a, k) in den.iter_mut() {
        let d = &den_polys[a];
        while *k > 0 {
            match num.div_exact(d) {
                Some(q) => {
                    num = q;
                    *k -= 1;
                }
                None => break,
            }
        }
    }
    let mut fs = vec![num.to_expr()];
    for (a, k) in den {
        if k > 0 {
            fs.push(Expr::powi(&a, -(k as i64)));
        }
    }
    Expr::mul(fs)
}

/// Exact zero test for rational expressions in opaque atoms.
pub fn is_zero(e: &Expr) -> bool {
    e.is_zero() || cancel(e).is_zero()
}

pub fn symbolic_eq(a: &Expr, b: &Expr) -> bool {
    a == b || is_zero(&(a - b))
}

fn has_denominator(e: &Expr) -> bool {
    e.terms().iter().any(|t| {
        t.factors()
            .iter()
            .any(|f| matches!(f.node(), Node::Pow(b, x) if b.as_num().is_none() && x.as_int().map(|k| k < 0).unwrap_or(false)))
    })
}

/// Exponents are kept in rational normal form so that equal exponents are
/// structurally equal and powers of one base merge.
pub(super) fn normalize_exponent(e: Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e,
        _ if has_denominator(&e) => cancel(&e),
        _ => e,
    }
}
