use std::fmt::{self, Display, Write};

use super::{Expr, Node};

// Output is valid input for `parse::parse_expression`.

fn is_atomic(e: &Expr) -> bool {
    match e.node() {
        Node::Num(r) => r.is_integer() && !r.is_negative(),
        Node::Sym(_) | Node::Func(_) | Node::Frac(_) | Node::Gamma(_) => true,
        _ => false,
    }
}

fn write_atomic(f: &mut impl Write, e: &Expr) -> fmt::Result {
    if is_atomic(e) {
        write!(f, "{e}")
    } else {
        write!(f, "({e})")
    }
}

fn write_product(f: &mut fmt::Formatter<'_>, fs: &[Expr]) -> fmt::Result {
    let (coeff, rest) = match fs[0].node() {
        Node::Num(r) => (Some(r), &fs[1..]),
        _ => (None, fs),
    };
    if let Some(c) = coeff {
        if c == &-super::Rational::one() {
            f.write_str("-")?;
        } else {
            write!(f, "{c}*")?;
        }
    }
    for (i, x) in rest.iter().enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        match x.node() {
            Node::Add(_) => write!(f, "({x})")?,
            _ => write!(f, "{x}")?,
        }
    }
    Ok(())
}

impl Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Num(r) => write!(f, "{r}"),
            Node::Sym(s) => f.write_str(s),
            Node::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    let (c, m) = t.split_coeff();
                    if i == 0 {
                        write!(f, "{t}")?;
                    } else if c.is_negative() {
                        f.write_str(" - ")?;
                        let pos = Expr::scaled(&m, &c.abs());
                        write!(f, "{pos}")?;
                    } else {
                        write!(f, " + {t}")?;
                    }
                }
                Ok(())
            }
            Node::Mul(fs) => write_product(f, fs),
            Node::Pow(b, x) => {
                let mut s = String::new();
                write_atomic(&mut s, b)?;
                s.push('^');
                match x.node() {
                    Node::Sym(_) => write!(s, "{x}")?,
                    Node::Num(r) if r.is_integer() && !r.is_negative() => write!(s, "{x}")?,
                    _ => write!(s, "({x})")?,
                }
                f.write_str(&s)
            }
            Node::Func(fa) => {
                f.write_str(&fa.name)?;
                for _ in 0..fa.order {
                    f.write_str("'")?;
                }
                f.write_str("(")?;
                for (i, a) in fa.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Node::Frac(fd) => write!(f, "fdiff({}, {}, {})", fd.inner, fd.var, fd.order),
            Node::Gamma(a) => write!(f, "Gamma({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_canonical_forms() {
        let (x, y) = (Expr::sym("x"), Expr::sym("y"));
        let e = Expr::int(2) * &x - Expr::powi(&y, 3) + Expr::rational(1, 2);
        assert_eq!(e.to_string(), "1/2 + 2*x - y^3");
        let p = Expr::pow(&x + &y, Expr::rational(2, 3));
        assert_eq!(p.to_string(), "(x + y)^(2/3)");
        assert_eq!(Expr::recip(&x).to_string(), "x^(-1)");
        let h = Expr::func("h", 2, vec![Expr::sym("r")]);
        assert_eq!(h.to_string(), "h''(r)");
        let fd = Expr::frac(Expr::sym("u"), "t", Expr::sym("a"));
        assert_eq!(fd.to_string(), "fdiff(u, t, a)");
    }
}
