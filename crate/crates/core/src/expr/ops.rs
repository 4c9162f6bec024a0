use std::collections::{BTreeMap, BTreeSet};

use super::{diff, Expr, ExprError, Node};

/// Simultaneous substitution of symbols. Bindings whose right-hand sides
/// refer (directly or transitively) back to a bound symbol are rejected.
pub fn substitute(e: &Expr, bindings: &BTreeMap<String, Expr>) -> Result<Expr, ExprError> {
    check_acyclic(bindings)?;
    subst(e, bindings)
}

fn check_acyclic(bindings: &BTreeMap<String, Expr>) -> Result<(), ExprError> {
    fn visit(
        name: &str,
        bindings: &BTreeMap<String, Expr>,
        on_path: &mut BTreeSet<String>,
        done: &mut BTreeSet<String>,
    ) -> Result<(), ExprError> {
        if done.contains(name) {
            return Ok(());
        }
        if !on_path.insert(name.to_string()) {
            return Err(ExprError::CyclicBinding(name.to_string()));
        }
        if let Some(v) = bindings.get(name) {
            for s in v.free_symbols() {
                if bindings.contains_key(&*s) {
                    visit(&s, bindings, on_path, done)?;
                }
            }
        }
        on_path.remove(name);
        done.insert(name.to_string());
        Ok(())
    }
    let mut done = BTreeSet::new();
    for k in bindings.keys() {
        visit(k, bindings, &mut BTreeSet::new(), &mut done)?;
    }
    Ok(())
}

fn subst(e: &Expr, b: &BTreeMap<String, Expr>) -> Result<Expr, ExprError> {
    Ok(match e.node() {
        Node::Num(_) => e.clone(),
        Node::Sym(s) => b.get(&**s).cloned().unwrap_or_else(|| e.clone()),
        Node::Add(ts) => Expr::add(ts.iter().map(|t| subst(t, b)).collect::<Result<_, _>>()?),
        Node::Mul(fs) => Expr::mul(fs.iter().map(|f| subst(f, b)).collect::<Result<_, _>>()?),
        Node::Pow(x, y) => Expr::pow(subst(x, b)?, subst(y, b)?),
        Node::Func(f) => Expr::func(
            &f.name,
            f.order,
            f.args.iter().map(|a| subst(a, b)).collect::<Result<_, _>>()?,
        ),
        Node::Frac(fd) => {
            let var = match b.get(&*fd.var) {
                None => fd.var.to_string(),
                Some(v) => match v.as_sym() {
                    Some(s) => s.to_string(),
                    None => {
                        return Err(ExprError::Unsupported(format!(
                            "substituting a non-symbol for the memory variable of `{e}`"
                        )))
                    }
                },
            };
            Expr::frac(subst(&fd.inner, b)?, &var, subst(&fd.order, b)?)
        }
        Node::Gamma(a) => Expr::gamma(subst(a, b)?),
    })
}

/// Replaces every occurrence of the subexpression `target`.
pub fn replace_node(e: &Expr, target: &Expr, replacement: &Expr) -> Expr {
    if e == target {
        return replacement.clone();
    }
    if !e.contains(target) {
        return e.clone();
    }
    let r = |x: &Expr| replace_node(x, target, replacement);
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Add(ts) => Expr::add(ts.iter().map(r).collect()),
        Node::Mul(fs) => Expr::mul(fs.iter().map(r).collect()),
        Node::Pow(x, y) => Expr::pow(r(x), r(y)),
        Node::Func(f) => Expr::func(&f.name, f.order, f.args.iter().map(r).collect()),
        Node::Frac(fd) => Expr::frac(r(&fd.inner), &fd.var, r(&fd.order)),
        Node::Gamma(a) => Expr::gamma(r(a)),
    }
}

/// Replaces the unknown function `name` (and its derivatives) by
/// `body(var)`: `name^(k)(arg)` becomes `d^k body / d var^k` at `var = arg`.
pub fn substitute_function(e: &Expr, name: &str, var: &str, body: &Expr) -> Result<Expr, ExprError> {
    let mut derivs: BTreeMap<u32, Expr> = BTreeMap::new();
    derivs.insert(0, body.clone());
    sub_fn(e, name, var, &mut derivs)
}

fn sub_fn(
    e: &Expr,
    name: &str,
    var: &str,
    derivs: &mut BTreeMap<u32, Expr>,
) -> Result<Expr, ExprError> {
    let mut r = |x: &Expr| sub_fn(x, name, var, derivs);
    Ok(match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Add(ts) => Expr::add(ts.iter().map(&mut r).collect::<Result<_, _>>()?),
        Node::Mul(fs) => Expr::mul(fs.iter().map(&mut r).collect::<Result<_, _>>()?),
        Node::Pow(x, y) => {
            let (x, y) = (r(x)?, r(y)?);
            Expr::pow(x, y)
        }
        Node::Func(f) => {
            let args: Vec<Expr> = f.args.iter().map(&mut r).collect::<Result<_, _>>()?;
            if &*f.name == name {
                if args.len() != 1 {
                    return Err(ExprError::Unsupported(format!(
                        "`{name}` applied to {} arguments",
                        args.len()
                    )));
                }
                let dk = match derivs.get(&f.order) {
                    Some(d) => d.clone(),
                    None => {
                        let d = diff(&derivs[&0], var, f.order as usize, None)?;
                        derivs.insert(f.order, d.clone());
                        d
                    }
                };
                let mut b = BTreeMap::new();
                b.insert(var.to_string(), args[0].clone());
                subst(&dk, &b)?
            } else {
                Expr::func(&f.name, f.order, args)
            }
        }
        Node::Frac(fd) => {
            let (inner, order) = (r(&fd.inner)?, r(&fd.order)?);
            Expr::frac(inner, &fd.var, order)
        }
        Node::Gamma(a) => Expr::gamma(r(a)?),
    })
}

/// Coefficients of an expression over a set of monomials.
pub type Collected = BTreeMap<Expr, Expr>;

/// Splits every term of `e` into a basis part (factors whose base occurs in
/// some basis monomial) and a coefficient, and accumulates coefficients per
/// basis monomial. A term whose basis part is not one of the monomials is an
/// error naming that term.
pub fn collect_terms(e: &Expr, basis: &[Expr]) -> Result<Collected, ExprError> {
    let mut atoms = BTreeSet::new();
    for m in basis {
        for f in m.split_coeff().1.factors() {
            if !f.is_one() {
                atoms.insert(f.as_base_exp().0);
            }
        }
    }
    let wanted: BTreeSet<Expr> = basis.iter().map(|m| m.split_coeff().1).collect();
    let grouped = group_by(e, |f| atoms.contains(&f.as_base_exp().0));
    let mut out = Collected::new();
    for (mono, coeff) in grouped {
        if !wanted.contains(&mono) {
            let offending = Expr::mul(vec![coeff, mono]);
            return Err(ExprError::NotInBasis(offending.to_string()));
        }
        out.insert(mono, coeff);
    }
    Ok(out)
}

/// Groups the terms of `e` by the product of the factors selected by `key`;
/// the remaining factors (with the rational coefficient) form the value.
pub fn group_by(e: &Expr, key: impl Fn(&Expr) -> bool) -> Collected {
    let mut parts: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    for t in e.terms() {
        let (c, m) = t.split_coeff();
        let mut k = Vec::new();
        let mut rest = vec![Expr::num(c)];
        if !m.is_one() {
            for f in m.factors() {
                if key(&f) {
                    k.push(f);
                } else {
                    rest.push(f);
                }
            }
        }
        parts.entry(Expr::mul(k)).or_default().push(Expr::mul(rest));
    }
    parts
        .into_iter()
        .map(|(k, v)| (k, Expr::add(v)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}
