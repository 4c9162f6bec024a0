//! Immutable symbolic expressions with exact rational coefficients.
//!
//! Every constructor returns a canonical form: sums and products are
//! flattened and sorted, numeric factors are folded into one leading
//! rational, equal bases in a product merge their exponents, and products
//! are fully expanded over sums. Sums only survive as the base of a power
//! whose exponent is not a positive integer; with an integer exponent the
//! base is made primitive (integer coefficients, positive leading term) so
//! that `(2b-1)^-1` and `(1-2b)^-1` share a base.
//!
//! All variables are assumed positive, so `(a*b)^e = a^e*b^e` and
//! `(a^e)^f = a^(e*f)` are applied unconditionally.

mod diff;
mod display;
mod eval;
mod jet;
mod ops;
mod poly;
mod rational;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub use diff::{diff, partial, total_derivative, total_derivative_t};
pub use eval::{eval_numeric, Bindings};
pub(crate) use eval::eval_with;
pub use jet::JetContext;
pub use ops::{collect_terms, group_by, replace_node, substitute, substitute_function, Collected};
pub use poly::{cancel, is_zero, symbolic_eq};
pub use rational::Rational;

use thiserror::Error;

pub type Symbol = Arc<str>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("pole of Gamma at {0}")]
    GammaPole(f64),
    #[error("cannot differentiate fractional derivative `{0}` in its memory variable")]
    FracInOwnVariable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("cyclic substitution through `{0}`")]
    CyclicBinding(String),
    #[error("term `{0}` is not expressible in the requested basis")]
    NotInBasis(String),
    #[error("fractional derivative `{0}` must be evaluated numerically")]
    UnresolvedFractional(String),
}

/// Named function application, optionally differentiated `order` times with
/// respect to its (single) argument: `h'(r)` is `FuncApp { name: h, order: 1 }`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FuncApp {
    pub name: Symbol,
    pub order: u32,
    pub args: Vec<Expr>,
}

/// Riemann–Liouville derivative of `inner` of order `order` in `var`, lower
/// terminal 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FracDeriv {
    pub inner: Expr,
    pub var: Symbol,
    pub order: Expr,
}

/// Node kinds. The variant order is the canonical ordering used for sorting:
/// constants, symbols, powers, products, sums, then function-like nodes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Node {
    Num(Rational),
    Sym(Symbol),
    Pow(Expr, Expr),
    Mul(Vec<Expr>),
    Add(Vec<Expr>),
    Func(FuncApp),
    Frac(FracDeriv),
    Gamma(Expr),
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            Ordering::Equal
        } else {
            self.0.cmp(&other.0)
        }
    }
}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Expr {
    fn raw(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(r: Rational) -> Expr {
        Expr::raw(Node::Num(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(Rational::from_int(n))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::num(Rational::new(num, den))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::raw(Node::Sym(Arc::from(name)))
    }

    pub fn sym_from(name: Symbol) -> Expr {
        Expr::raw(Node::Sym(name))
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_one())
    }

    /// Integer value of a numeric node.
    pub fn as_int(&self) -> Option<i64> {
        self.as_num().and_then(Rational::to_i64)
    }

    /// Terms of a sum, or the expression itself as a single term.
    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            Node::Add(ts) => ts.clone(),
            _ if self.is_zero() => Vec::new(),
            _ => vec![self.clone()],
        }
    }

    /// Factors of a product (including the numeric coefficient), or the
    /// expression itself.
    pub fn factors(&self) -> Vec<Expr> {
        match self.node() {
            Node::Mul(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    /// `(base, exponent)` view of a factor.
    pub fn as_base_exp(&self) -> (Expr, Expr) {
        match self.node() {
            Node::Pow(b, e) => (b.clone(), e.clone()),
            _ => (self.clone(), Expr::one()),
        }
    }

    /// Splits a term into its rational coefficient and the remaining monomial.
    pub fn split_coeff(&self) -> (Rational, Expr) {
        match self.node() {
            Node::Num(r) => (r.clone(), Expr::one()),
            Node::Mul(fs) => match fs[0].node() {
                Node::Num(r) => {
                    let rest = &fs[1..];
                    let mono = if rest.len() == 1 {
                        rest[0].clone()
                    } else {
                        Expr::raw(Node::Mul(rest.to_vec()))
                    };
                    (r.clone(), mono)
                }
                _ => (Rational::one(), self.clone()),
            },
            _ => (Rational::one(), self.clone()),
        }
    }

    /// Multiplies a monomial by a rational without re-canonicalizing.
    fn scaled(mono: &Expr, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        if c.is_one() {
            return mono.clone();
        }
        match mono.node() {
            Node::Num(r) => Expr::num(r * c),
            Node::Mul(fs) => {
                let mut v = Vec::with_capacity(fs.len() + 1);
                v.push(Expr::num(c.clone()));
                v.extend(fs.iter().cloned());
                Expr::raw(Node::Mul(v))
            }
            _ => Expr::raw(Node::Mul(vec![Expr::num(c.clone()), mono.clone()])),
        }
    }

    pub fn add(items: Vec<Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut terms: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut stack = items;
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Num(r) => constant = &constant + r,
                Node::Add(ts) => stack.extend(ts.iter().cloned()),
                _ => {
                    let (c, m) = t.split_coeff();
                    let slot = terms.entry(m).or_insert_with(Rational::zero);
                    *slot = &*slot + &c;
                }
            }
        }
        let mut out = Vec::with_capacity(terms.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        for (m, c) in terms {
            if !c.is_zero() {
                out.push(Expr::scaled(&m, &c));
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::raw(Node::Add(out)),
        }
    }

    pub fn mul(items: Vec<Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut powers: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
        let mut stack = items;
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Num(r) => {
                    if r.is_zero() {
                        return Expr::zero();
                    }
                    coeff = &coeff * r;
                }
                Node::Mul(fs) => stack.extend(fs.iter().cloned()),
                Node::Add(_) => {
                    let (c, prim) = primitive_part(&f);
                    coeff = &coeff * &c;
                    powers.entry(prim).or_default().push(Expr::one());
                }
                Node::Pow(b, e) => powers.entry(b.clone()).or_default().push(e.clone()),
                _ => powers.entry(f.clone()).or_default().push(Expr::one()),
            }
        }

        let mut factors = Vec::with_capacity(powers.len());
        let mut sums = Vec::new();
        let mut rerun = false;
        for (base, mut exps) in powers {
            let e = if exps.len() == 1 {
                exps.pop().unwrap()
            } else {
                Expr::add(exps)
            };
            let p = Expr::pow(base, e);
            match p.node() {
                Node::Num(r) => {
                    if r.is_zero() {
                        return Expr::zero();
                    }
                    coeff = &coeff * r;
                }
                Node::Add(_) => sums.push(p),
                Node::Mul(_) => {
                    rerun = true;
                    factors.push(p);
                }
                _ => factors.push(p),
            }
        }
        if rerun {
            let mut all = factors;
            all.extend(sums);
            all.push(Expr::num(coeff));
            return Expr::mul(all);
        }

        if !sums.is_empty() {
            let mut head = factors;
            head.push(Expr::num(coeff));
            let mut acc = vec![Expr::mul_flat(head)];
            for s in sums {
                let ts = s.terms();
                let mut next = Vec::with_capacity(acc.len() * ts.len());
                for a in &acc {
                    for t in &ts {
                        next.push(Expr::mul(vec![a.clone(), t.clone()]));
                    }
                }
                acc = next;
            }
            return Expr::add(acc);
        }

        Expr::assemble_product(coeff, factors)
    }

    /// Product of already-merged factors with distinct bases and no sums.
    fn mul_flat(items: Vec<Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut factors = Vec::new();
        for f in items {
            match f.node() {
                Node::Num(r) => coeff = &coeff * r,
                _ => factors.push(f),
            }
        }
        Expr::assemble_product(coeff, factors)
    }

    fn assemble_product(coeff: Rational, mut factors: Vec<Expr>) -> Expr {
        if coeff.is_zero() {
            return Expr::zero();
        }
        factors.sort();
        if factors.is_empty() {
            return Expr::num(coeff);
        }
        if factors.len() == 1 && coeff.is_one() {
            return factors.pop().unwrap();
        }
        let mut v = Vec::with_capacity(factors.len() + 1);
        if !coeff.is_one() {
            v.push(Expr::num(coeff));
        }
        v.extend(factors);
        Expr::raw(Node::Mul(v))
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        let exp = poly::normalize_exponent(exp);
        if exp.is_zero() {
            return Expr::one();
        }
        if exp.is_one() {
            return base;
        }
        let int_exp = exp.as_int();
        match base.node() {
            Node::Num(r) => {
                if r.is_one() {
                    return Expr::one();
                }
                if let Some(n) = int_exp {
                    if let Some(v) = r.pow(n) {
                        return Expr::num(v);
                    }
                    // 0^negative is kept and reported by `simplify`.
                    return Expr::raw(Node::Pow(base, exp));
                }
                if r.is_zero() {
                    if let Some(q) = exp.as_num() {
                        if q.is_positive() {
                            return Expr::zero();
                        }
                    }
                }
                Expr::raw(Node::Pow(base, exp))
            }
            Node::Pow(b, e) => Expr::pow(b.clone(), Expr::mul(vec![e.clone(), exp])),
            Node::Mul(fs) => Expr::mul(
                fs.iter()
                    .map(|f| Expr::pow(f.clone(), exp.clone()))
                    .collect(),
            ),
            Node::Add(_) => match int_exp {
                Some(n) if n > 0 => {
                    // Expand term by term; going through `mul` would regroup
                    // the repeated sum into this same power.
                    let ts = base.terms();
                    let mut acc = base.clone();
                    for _ in 1..n {
                        let next: Vec<Expr> = acc
                            .terms()
                            .iter()
                            .flat_map(|a| ts.iter().map(move |t| Expr::mul(vec![a.clone(), t.clone()])))
                            .collect();
                        acc = Expr::add(next);
                    }
                    acc
                }
                Some(n) => {
                    let (c, prim) = primitive_part(&base);
                    let raw = Expr::raw(Node::Pow(prim, exp));
                    if c.is_one() {
                        raw
                    } else {
                        // c is nonzero, so the power exists.
                        Expr::mul(vec![Expr::num(c.pow(n).unwrap()), raw])
                    }
                }
                None => Expr::raw(Node::Pow(base, exp)),
            },
            Node::Gamma(arg) => {
                // 1/Gamma has zeros at the nonpositive integers.
                let pole = arg
                    .as_num()
                    .map(|r| r.is_integer() && !r.is_positive())
                    .unwrap_or(false);
                if pole && int_exp.map(|n| n < 0).unwrap_or(false) {
                    Expr::zero()
                } else {
                    Expr::raw(Node::Pow(base, exp))
                }
            }
            _ => Expr::raw(Node::Pow(base, exp)),
        }
    }

    pub fn powi(base: &Expr, n: i64) -> Expr {
        Expr::pow(base.clone(), Expr::int(n))
    }

    pub fn recip(e: &Expr) -> Expr {
        Expr::powi(e, -1)
    }

    pub fn func(name: &str, order: u32, args: Vec<Expr>) -> Expr {
        if name == "exp" && order == 0 && args.len() == 1 && args[0].is_zero() {
            return Expr::one();
        }
        Expr::raw(Node::Func(FuncApp {
            name: Arc::from(name),
            order,
            args,
        }))
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::func("exp", 0, vec![arg])
    }

    pub fn frac(inner: Expr, var: &str, order: Expr) -> Expr {
        if inner.is_zero() {
            return Expr::zero();
        }
        if order.is_zero() {
            return inner;
        }
        Expr::raw(Node::Frac(FracDeriv {
            inner,
            var: Arc::from(var),
            order,
        }))
    }

    pub fn gamma(arg: Expr) -> Expr {
        if let Some(n) = arg.as_int() {
            if (1..=171).contains(&n) {
                return Expr::num(Rational::factorial((n - 1) as u32));
            }
        }
        Expr::raw(Node::Gamma(arg))
    }

    /// Rebuilds the expression through the canonical constructors.
    fn rebuild(&self) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            Node::Add(ts) => Expr::add(ts.iter().map(Expr::rebuild).collect()),
            Node::Mul(fs) => Expr::mul(fs.iter().map(Expr::rebuild).collect()),
            Node::Pow(b, e) => Expr::pow(b.rebuild(), e.rebuild()),
            Node::Func(f) => Expr::func(&f.name, f.order, f.args.iter().map(Expr::rebuild).collect()),
            Node::Frac(fd) => Expr::frac(fd.inner.rebuild(), &fd.var, fd.order.rebuild()),
            Node::Gamma(a) => Expr::gamma(a.rebuild()),
        }
    }

    /// Children of this node, in order.
    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => Vec::new(),
            Node::Add(v) | Node::Mul(v) => v.iter().collect(),
            Node::Pow(b, e) => vec![b, e],
            Node::Func(f) => f.args.iter().collect(),
            Node::Frac(fd) => vec![&fd.inner, &fd.order],
            Node::Gamma(a) => vec![a],
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self.node() {
            Node::Sym(s) => {
                out.insert(s.clone());
            }
            Node::Frac(fd) => {
                out.insert(fd.var.clone());
                fd.inner.collect_symbols(out);
                fd.order.collect_symbols(out);
            }
            _ => {
                for c in self.children() {
                    c.collect_symbols(out);
                }
            }
        }
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self.node() {
            Node::Sym(s) => &**s == name,
            Node::Frac(fd) => {
                &*fd.var == name || fd.inner.contains_symbol(name) || fd.order.contains_symbol(name)
            }
            _ => self.children().into_iter().any(|c| c.contains_symbol(name)),
        }
    }

    /// True if `target` occurs as a subexpression.
    pub fn contains(&self, target: &Expr) -> bool {
        self == target || self.children().into_iter().any(|c| c.contains(target))
    }

    /// All fractional-derivative nodes, deduplicated and sorted.
    pub fn frac_nodes(&self) -> BTreeSet<Expr> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if matches!(e.node(), Node::Frac(_)) {
                out.insert(e.clone());
            }
        });
        out
    }

    /// All function applications, deduplicated and sorted.
    pub fn func_nodes(&self) -> BTreeSet<Expr> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if matches!(e.node(), Node::Func(_)) {
                out.insert(e.clone());
            }
        });
        out
    }

    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

/// Canonical form of `e`; idempotent. Fails on `0^negative` left over from
/// constant folding.
pub fn simplify(e: &Expr) -> Result<Expr, ExprError> {
    let out = e.rebuild();
    let mut bad = None;
    out.walk(&mut |n| {
        if let Node::Pow(b, x) = n.node() {
            if b.is_zero() && x.as_num().map(Rational::is_negative).unwrap_or(true) {
                bad.get_or_insert_with(|| n.to_string());
            }
        }
    });
    match bad {
        Some(s) => Err(ExprError::DivisionByZero(s)),
        None => Ok(out),
    }
}

/// Splits a sum into `c * prim` with `prim` having coprime integer
/// coefficients and a positive leading term.
fn primitive_part(sum: &Expr) -> (Rational, Expr) {
    let ts = sum.terms();
    let coeffs: Vec<Rational> = ts.iter().map(|t| t.split_coeff().0).collect();
    let mut c = Rational::content_of(coeffs.iter());
    if coeffs.first().map(Rational::is_negative).unwrap_or(false) {
        c = -c;
    }
    if c.is_one() {
        return (c, sum.clone());
    }
    let inv = c.recip().expect("content of a nonzero sum");
    let prim = Expr::add(
        ts.iter()
            .map(|t| {
                let (k, m) = t.split_coeff();
                Expr::scaled(&m, &(&k * &inv))
            })
            .collect(),
    );
    (c, prim)
}

macro_rules! expr_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl std::ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl std::ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl std::ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
    };
}

expr_binop!(Add, add, |a, b| Expr::add(vec![a, b]));
expr_binop!(Sub, sub, |a, b| Expr::add(vec![a, Expr::mul(vec![Expr::int(-1), b])]));
expr_binop!(Mul, mul, |a, b| Expr::mul(vec![a, b]));
expr_binop!(Div, div, |a, b| Expr::mul(vec![a, Expr::powi(&b, -1)]));

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul(vec![Expr::int(-1), self])
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul(vec![Expr::int(-1), self.clone()])
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::num(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Expr {
        Expr::sym(n)
    }

    #[test]
    fn additive_identity() {
        let u = s("u");
        let ux = s("u_x");
        let e = Expr::int(2) * &u * &ux + Expr::zero();
        assert_eq!(e, Expr::int(2) * u * ux);
    }

    #[test]
    fn power_merge() {
        let x = s("x");
        assert_eq!(Expr::powi(&x, 1) * Expr::powi(&x, 2), Expr::powi(&x, 3));
        assert_eq!(Expr::powi(&x, 0), Expr::one());
        assert_eq!(Expr::powi(&x, 1), x);
    }

    #[test]
    fn repeated_sums_expand() {
        let (x, b) = (s("x"), s("b"));
        let sum = &x - &b;
        let sq = Expr::powi(&sum, 2);
        assert_eq!(sq, Expr::powi(&x, 2) - Expr::int(2) * &x * &b + Expr::powi(&b, 2));
        assert_eq!(sum.clone() * sum.clone(), sq);
        let twice = Expr::int(2) * &x - Expr::int(2) * &b;
        assert_eq!(Expr::powi(&twice, 3), Expr::int(8) * Expr::powi(&sum, 3));
    }

    #[test]
    fn opposite_terms_cancel() {
        let (a, b, x) = (s("a"), s("b"), s("x"));
        let e = (&a - &b) * &x + (&b - &a) * &x;
        assert!(e.is_zero());
    }

    #[test]
    fn identities() {
        let x = s("x");
        assert!((Expr::zero() * &x).is_zero());
        assert_eq!(Expr::one() * &x, x);
    }

    #[test]
    fn sums_are_sorted_and_flat() {
        let (x, y) = (s("x"), s("y"));
        let e1 = (&x + &y) + Expr::int(3);
        let e2 = Expr::int(3) + (&y + &x);
        assert_eq!(e1, e2);
        match e1.node() {
            Node::Add(ts) => {
                assert_eq!(ts.len(), 3);
                assert!(ts.iter().all(|t| !matches!(t.node(), Node::Add(_))));
                assert!(ts[0].as_num().is_some());
            }
            _ => panic!("expected sum"),
        }
    }

    #[test]
    fn products_expand() {
        let (x, y) = (s("x"), s("y"));
        let e = (&x + &y) * (&x - &y);
        assert_eq!(e, Expr::powi(&x, 2) - Expr::powi(&y, 2));
    }

    #[test]
    fn primitive_denominators_share_a_base() {
        let b = s("b");
        let one = Expr::one();
        let d1 = Expr::recip(&(Expr::int(2) * &b - &one));
        let d2 = Expr::recip(&(&one - Expr::int(2) * &b));
        assert!((d1 + d2).is_zero());
    }

    #[test]
    fn symbolic_exponents_merge() {
        let (t, b) = (s("t"), s("b"));
        let e = &t * Expr::pow(t.clone(), &b - Expr::one());
        assert_eq!(e, Expr::pow(t, b));
    }

    #[test]
    fn division_by_folded_zero_is_reported() {
        let a = s("a");
        let e = s("x") / (&a - &a);
        assert!(matches!(simplify(&e), Err(ExprError::DivisionByZero(_))));
    }

    #[test]
    fn reciprocal_gamma_pole_vanishes() {
        let e = Expr::recip(&Expr::gamma(Expr::zero()));
        assert!(e.is_zero());
        assert_eq!(Expr::gamma(Expr::int(5)), Expr::int(24));
    }

    #[test]
    fn sum_times_its_reciprocal() {
        let (a, b) = (s("a"), s("b"));
        let d = &a - &b;
        assert_eq!(&d * Expr::recip(&d), Expr::one());
        let d2 = Expr::int(2) * &a - Expr::int(2) * &b;
        assert_eq!(&d2 * Expr::recip(&d), Expr::int(2));
    }
}
