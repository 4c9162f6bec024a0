use super::{Expr, ExprError, JetContext, Node};

#[derive(Clone, Copy)]
enum Wrt<'a> {
    /// Partial derivative with respect to a jet coordinate (a symbol or a
    /// fractional-derivative node). Fractional nodes are independent
    /// coordinates here.
    Coordinate(&'a Expr),
    /// Ordinary partial derivative in a variable; fractional nodes commute
    /// with it unless it is their memory variable.
    Plain(&'a str),
}

fn d(e: &Expr, wrt: Wrt<'_>) -> Result<Expr, ExprError> {
    Ok(match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(s) => {
            let hit = match wrt {
                Wrt::Coordinate(w) => w == e,
                Wrt::Plain(v) => &**s == v,
            };
            if hit {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(ts) => Expr::add(ts.iter().map(|t| d(t, wrt)).collect::<Result<_, _>>()?),
        Node::Mul(fs) => {
            let mut terms = Vec::new();
            for i in 0..fs.len() {
                let di = d(&fs[i], wrt)?;
                if di.is_zero() {
                    continue;
                }
                let mut prod: Vec<Expr> = Vec::with_capacity(fs.len());
                for (j, f) in fs.iter().enumerate() {
                    prod.push(if i == j { di.clone() } else { f.clone() });
                }
                terms.push(Expr::mul(prod));
            }
            Expr::add(terms)
        }
        Node::Pow(b, x) => {
            let dx = d(x, wrt)?;
            if !dx.is_zero() {
                return Err(ExprError::Unsupported(format!(
                    "differentiating `{e}` with a variable exponent"
                )));
            }
            let db = d(b, wrt)?;
            if db.is_zero() {
                Expr::zero()
            } else {
                Expr::mul(vec![
                    x.clone(),
                    Expr::pow(b.clone(), x - Expr::one()),
                    db,
                ])
            }
        }
        Node::Func(f) => {
            if let Wrt::Coordinate(w) = wrt {
                if w == e {
                    return Ok(Expr::one());
                }
            }
            let dargs: Vec<Expr> = f.args.iter().map(|a| d(a, wrt)).collect::<Result<_, _>>()?;
            if dargs.iter().all(Expr::is_zero) {
                return Ok(Expr::zero());
            }
            if f.args.len() != 1 {
                return Err(ExprError::Unsupported(format!(
                    "derivative of multi-argument function `{}`",
                    f.name
                )));
            }
            let outer = if &*f.name == "exp" && f.order == 0 {
                e.clone()
            } else {
                Expr::func(&f.name, f.order + 1, f.args.clone())
            };
            outer * &dargs[0]
        }
        Node::Frac(fd) => match wrt {
            Wrt::Coordinate(w) => {
                if w == e {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Wrt::Plain(v) => {
                if &*fd.var == v {
                    return Err(ExprError::FracInOwnVariable(e.to_string()));
                }
                if !d(&fd.order, wrt)?.is_zero() {
                    return Err(ExprError::Unsupported(format!(
                        "derivative of `{e}` with respect to its order"
                    )));
                }
                Expr::frac(d(&fd.inner, wrt)?, &fd.var, fd.order.clone())
            }
        },
        Node::Gamma(a) => {
            if d(a, wrt)?.is_zero() {
                Expr::zero()
            } else {
                return Err(ExprError::Unsupported(format!("derivative of `{e}`")));
            }
        }
    })
}

/// Partial derivative with respect to a jet coordinate: a symbol such as `u`
/// or `u_xx`, or a fractional-derivative node such as `fdiff(u, t, a)`.
/// Every other coordinate is held fixed.
pub fn partial(e: &Expr, wrt: &Expr) -> Result<Expr, ExprError> {
    d(e, Wrt::Coordinate(wrt))
}

/// `k`-th derivative in `var`. Without a jet context this is the ordinary
/// partial derivative; with one it is the total derivative, so `u` expands
/// through `u_x`, `u_xx`, ...
pub fn diff(e: &Expr, var: &str, k: usize, ctx: Option<&JetContext>) -> Result<Expr, ExprError> {
    if k == 0 {
        return Err(ExprError::Unsupported("derivative order must be at least 1".into()));
    }
    let mut out = e.clone();
    for _ in 0..k {
        out = match ctx {
            Some(c) => total_derivative(&out, var, c)?,
            None => d(&out, Wrt::Plain(var))?,
        };
        if out.is_zero() {
            break;
        }
    }
    Ok(out)
}

/// Total derivative `D_var = d/dvar + sum_J u_{J,var} d/du_J`, including the
/// fractional coordinates `fdiff(u_J, t, b)` when `var` is not `t`.
pub fn total_derivative(e: &Expr, var: &str, ctx: &JetContext) -> Result<Expr, ExprError> {
    let mut terms = vec![partial(e, &Expr::sym(var))?];
    for s in e.free_symbols() {
        if !ctx.is_jet(&s) {
            continue;
        }
        let sym = Expr::sym_from(s.clone());
        let ds = partial(e, &sym)?;
        if ds.is_zero() {
            continue;
        }
        let raised = ctx.raise(&s, var).ok_or_else(|| {
            ExprError::Unsupported(format!("`{var}` is not an independent variable"))
        })?;
        terms.push(Expr::sym(&raised) * ds);
    }
    for node in e.frac_nodes() {
        let Node::Frac(fd) = node.node() else { unreachable!() };
        let dn = partial(e, &node)?;
        if dn.is_zero() {
            continue;
        }
        if &*fd.var == var {
            return Err(ExprError::FracInOwnVariable(node.to_string()));
        }
        let inner = fd
            .inner
            .as_sym()
            .filter(|s| ctx.is_jet(s))
            .ok_or_else(|| ExprError::Unsupported(format!("total derivative of `{node}`")))?;
        let raised = ctx.raise(inner, var).ok_or_else(|| {
            ExprError::Unsupported(format!("`{var}` is not an independent variable"))
        })?;
        terms.push(Expr::frac(Expr::sym(&raised), &fd.var, fd.order.clone()) * dn);
    }
    Ok(Expr::add(terms))
}

/// `D_t = d/dt + u_t d/du + u_xt d/du_x + u_tt d/du_t + ...`
pub fn total_derivative_t(e: &Expr, ctx: &JetContext) -> Result<Expr, ExprError> {
    total_derivative(e, "t", ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Expr {
        Expr::sym(n)
    }

    /// Repeated product rule on a list of factors, used as an independent
    /// oracle for the jet chain rule.
    fn brute_third_derivative_of_cube() -> Expr {
        // d/dx (u*u*u) three times, expanding each product by hand:
        // d1 = 3 u^2 u_x
        // d2 = 6 u u_x^2 + 3 u^2 u_xx
        // d3 = 6 u_x^3 + 12 u u_x u_xx + 6 u u_x u_xx + 3 u^2 u_xxx
        let (u, ux, uxx, uxxx) = (s("u"), s("u_x"), s("u_xx"), s("u_xxx"));
        Expr::int(6) * Expr::powi(&ux, 3)
            + Expr::int(12) * &u * &ux * &uxx
            + Expr::int(6) * &u * &ux * &uxx
            + Expr::int(3) * Expr::powi(&u, 2) * uxxx
    }

    #[test]
    fn cube_third_derivative_with_jets() {
        let ctx = JetContext::kmn();
        let u = s("u");
        let got = diff(&Expr::powi(&u, 3), "x", 3, Some(&ctx)).unwrap();
        assert_eq!(got, brute_third_derivative_of_cube());
    }

    #[test]
    fn power_rule_and_constants() {
        let (t, b) = (s("t"), s("b"));
        let got = diff(&Expr::pow(t.clone(), b.clone()), "t", 1, None).unwrap();
        assert_eq!(got, &b * Expr::pow(t, &b - Expr::one()));
        assert!(diff(&s("c"), "x", 1, None).unwrap().is_zero());
    }

    #[test]
    fn total_t_derivative_examples() {
        let ctx = JetContext::kmn();
        let (x, t, u) = (s("x"), s("t"), s("u"));
        assert_eq!(total_derivative_t(&(&x * &u), &ctx).unwrap(), &x * s("u_t"));
        assert_eq!(
            total_derivative_t(&Expr::powi(&u, 2), &ctx).unwrap(),
            Expr::int(2) * &u * s("u_t")
        );
        assert_eq!(
            total_derivative_t(&(&t * s("u_x")), &ctx).unwrap(),
            s("u_x") + &t * s("u_xt")
        );
    }

    #[test]
    fn frac_node_in_own_variable_is_rejected() {
        let fd = Expr::frac(s("h"), "t", s("a"));
        assert!(matches!(
            diff(&fd, "t", 1, None),
            Err(ExprError::FracInOwnVariable(_))
        ));
        let ctx = JetContext::kmn();
        let fu = Expr::frac(s("u"), "t", s("a"));
        assert!(total_derivative_t(&fu, &ctx).is_err());
        assert_eq!(
            total_derivative(&fu, "x", &ctx).unwrap(),
            Expr::frac(s("u_x"), "t", s("a"))
        );
    }

    #[test]
    fn chain_rule_through_function_argument() {
        let (t, x, q) = (s("t"), s("x"), s("q"));
        let arg = &t * Expr::pow(x.clone(), q.clone());
        let h = Expr::func("h", 0, vec![arg.clone()]);
        let got = diff(&h, "x", 1, None).unwrap();
        let want = Expr::func("h", 1, vec![arg]) * &t * &q * Expr::pow(x, &q - Expr::one());
        assert_eq!(got, want);
    }

    #[test]
    fn linearity() {
        let ctx = JetContext::kmn();
        let (u, x) = (s("u"), s("x"));
        let e1 = Expr::powi(&u, 2) * &x;
        let e2 = Expr::powi(&u, 3);
        let a = Expr::rational(3, 7);
        let lhs = diff(&(&a * &e1 + &e2), "x", 2, Some(&ctx)).unwrap();
        let rhs = &a * diff(&e1, "x", 2, Some(&ctx)).unwrap() + diff(&e2, "x", 2, Some(&ctx)).unwrap();
        assert_eq!(lhs, rhs);
    }
}
