use std::collections::BTreeMap;

use super::{Expr, ExprError, Node};
use crate::numerics::gamma_fn;

pub type Bindings = BTreeMap<String, f64>;

/// IEEE double evaluation. Fractional-derivative nodes are rejected; see
/// `numerics::eval_fractional` for those.
pub fn eval_numeric(e: &Expr, point: &Bindings) -> Result<f64, ExprError> {
    eval_with(e, point, &|n, _| Err(ExprError::UnresolvedFractional(n.to_string())))
}

pub(crate) type FracHook<'a> = dyn Fn(&Expr, &Bindings) -> Result<f64, ExprError> + 'a;

/// Evaluation with a caller-supplied rule for fractional-derivative nodes.
pub(crate) fn eval_with(e: &Expr, point: &Bindings, frac: &FracHook<'_>) -> Result<f64, ExprError> {
    Ok(match e.node() {
        Node::Num(r) => r.to_f64(),
        Node::Sym(s) => *point
            .get(&**s)
            .ok_or_else(|| ExprError::Unbound(s.to_string()))?,
        Node::Add(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval_with(t, point, frac)?;
            }
            acc
        }
        Node::Mul(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= eval_with(f, point, frac)?;
            }
            acc
        }
        Node::Pow(b, x) => {
            let base = eval_with(b, point, frac)?;
            match x.as_int() {
                Some(n) if n.abs() < i32::MAX as i64 => {
                    if base == 0.0 && n < 0 {
                        return Err(ExprError::DivisionByZero(e.to_string()));
                    }
                    base.powi(n as i32)
                }
                _ => base.powf(eval_with(x, point, frac)?),
            }
        }
        Node::Func(f) => match (&*f.name, f.order, f.args.as_slice()) {
            ("exp", 0, [a]) => eval_with(a, point, frac)?.exp(),
            _ => return Err(ExprError::Unbound(e.to_string())),
        },
        Node::Frac(_) => frac(e, point)?,
        Node::Gamma(a) => {
            let x = eval_with(a, point, frac)?;
            gamma_fn(x).map_err(|_| ExprError::GammaPole(x))?
        }
    })
}
