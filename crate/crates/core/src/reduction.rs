//! Similarity reductions `u = x^p h(r)`, `r = t x^q` and the reduced
//! fractional equations in `h(r)`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{
    cancel, group_by, is_zero, partial, replace_node, substitute, substitute_function, symbolic_eq, Bindings,
    Expr, ExprError, Node, Rational,
};
use crate::numerics::{eval_fractional, Tolerance};
use crate::pde::{residual_of, Generator, PdeSpec};
use crate::symmetry::rl_power_symbolic;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("unsupported generator for reduction: {0}")]
    UnsupportedGenerator(String),
    #[error("substituted residual does not factor as a power of x; offending terms: {0}")]
    NoPowerFactor(String),
    #[error("order {0} is outside (0, 1)")]
    BadOrder(String),
    #[error("order 1 has the constant kernel instead of t^(a-1)/Gamma(a)")]
    ClassicalKernel,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Similarity variables `r = t x^q`, `z = u x^(-p)`; for the translation
/// `r = t`, `z = u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub p: Expr,
    pub q: Expr,
    pub translation_case: bool,
}

impl Invariants {
    pub fn r(&self) -> Expr {
        Expr::sym("t") * Expr::pow(Expr::sym("x"), self.q.clone())
    }

    pub fn z(&self) -> Expr {
        Expr::sym("u") * Expr::pow(Expr::sym("x"), -self.p.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityReduction {
    pub invariants: Invariants,
    /// The residual equals `x^s` times the reduced equation.
    pub s: Expr,
    pub reduced_ode: Expr,
}

/// Invariants from `dt/xi_t = dx/xi_x = du/eta`.
pub fn characteristic_invariants(gen: &Generator) -> Result<Invariants, ReductionError> {
    if gen.is_translation() {
        return Ok(Invariants {
            p: Expr::zero(),
            q: Expr::zero(),
            translation_case: true,
        });
    }
    let nf = gen
        .normal_form()
        .ok_or_else(|| ReductionError::UnsupportedGenerator(gen.to_string()))?;
    if !is_zero(&nf.a0) {
        return Err(ReductionError::UnsupportedGenerator(format!(
            "{gen}: translation mixed with scaling"
        )));
    }
    if is_zero(&nf.a1) {
        return Err(ReductionError::UnsupportedGenerator(format!("{gen}: no x-scaling")));
    }
    let inv = Expr::recip(&nf.a1);
    Ok(Invariants {
        p: cancel(&(nf.c.clone() * inv.clone())),
        q: cancel(&(-nf.e.clone() * inv)),
        translation_case: false,
    })
}

fn h_of(arg: Expr) -> Expr {
    Expr::func("h", 0, vec![arg])
}

/// Rewrites `fdiff(F * h(t*l), t, a)` with `F`, `l` free of `t` into
/// `F * l^a * fdiff(h(r), r, a)`.
fn scale_fractional(e: &Expr, q: &Expr) -> Result<Expr, ReductionError> {
    let mut out = e.clone();
    for node in e.frac_nodes() {
        let Node::Frac(fd) = node.node() else { unreachable!() };
        if &*fd.var != "t" {
            continue;
        }
        let mut replacement = Vec::new();
        for term in fd.inner.terms() {
            let (free, dep): (Vec<Expr>, Vec<Expr>) =
                term.factors().into_iter().partition(|f| !f.contains_symbol("t"));
            let matches = match dep.as_slice() {
                [h] => match h.node() {
                    Node::Func(fa) if &*fa.name == "h" && fa.order == 0 => {
                        is_zero(&(fa.args[0].clone() - Expr::sym("t") * Expr::pow(Expr::sym("x"), q.clone())))
                    }
                    _ => false,
                },
                _ => false,
            };
            if !matches {
                return Err(ReductionError::NoPowerFactor(format!(
                    "fractional term `{node}` is not of the form F(x) h(t x^q)"
                )));
            }
            replacement.push(
                Expr::mul(free)
                    * Expr::pow(Expr::sym("x"), q.clone() * fd.order.clone())
                    * Expr::frac(h_of(Expr::sym("r")), "r", fd.order.clone()),
            );
        }
        out = replace_node(&out, &node, &Expr::add(replacement));
    }
    Ok(out)
}

/// Substitutes the invariant ansatz into the equation and strips the common
/// power of `x`.
pub fn similarity_substitute(spec: &PdeSpec, inv: &Invariants) -> Result<SimilarityReduction, ReductionError> {
    let (t, x, r) = (Expr::sym("t"), Expr::sym("x"), Expr::sym("r"));
    if inv.translation_case {
        let res = residual_of(spec, &h_of(t.clone()))?;
        let bind = BTreeMap::from([("t".to_string(), r)]);
        let reduced = cancel(&substitute(&res, &bind)?);
        return Ok(SimilarityReduction {
            invariants: inv.clone(),
            s: Expr::zero(),
            reduced_ode: reduced,
        });
    }
    let arg = t.clone() * Expr::pow(x.clone(), inv.q.clone());
    let u = Expr::pow(x.clone(), inv.p.clone()) * h_of(arg);
    let res = residual_of(spec, &u)?;
    let res = scale_fractional(&res, &inv.q)?;
    let bind = BTreeMap::from([("t".to_string(), r * Expr::pow(x.clone(), -inv.q.clone()))]);
    let res = substitute(&res, &bind)?;
    let s = cancel(&(inv.p.clone() + inv.q.clone() * spec.alpha().clone()));
    let reduced = cancel(&(res * Expr::pow(x, -s.clone())));
    let offending: Vec<String> = reduced
        .terms()
        .into_iter()
        .filter(|term| term.contains_symbol("x") || term.contains_symbol("t"))
        .map(|term| term.to_string())
        .collect();
    if !offending.is_empty() {
        return Err(ReductionError::NoPowerFactor(offending.join(", ")));
    }
    Ok(SimilarityReduction {
        invariants: inv.clone(),
        s,
        reduced_ode: reduced,
    })
}

/// Invariants and reduced equation for a generator.
pub fn reduce(spec: &PdeSpec, gen: &Generator) -> Result<SimilarityReduction, ReductionError> {
    similarity_substitute(spec, &characteristic_invariants(gen)?)
}

fn is_reduced_variable(f: &Expr) -> bool {
    f.contains_symbol("r") || !f.func_nodes().is_empty()
}

/// The single fractional node of a reduced equation and its coefficient.
fn fractional_coefficient(e: &Expr) -> Result<(Expr, Expr), ExprError> {
    let nodes = e.frac_nodes();
    let node = match nodes.len() {
        1 => nodes.into_iter().next().expect("one node"),
        n => {
            return Err(ExprError::Unsupported(format!(
                "expected exactly one fractional derivative, found {n}"
            )))
        }
    };
    let c = cancel(&partial(e, &node)?);
    Ok((node, c))
}

/// One monomial of a reduced equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermComparison {
    pub monomial: Expr,
    pub derived: Expr,
    pub printed: Expr,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonReport {
    /// The fractional-derivative coefficient both sides were scaled to.
    pub normalization: Expr,
    pub terms: Vec<TermComparison>,
}

impl ComparisonReport {
    pub fn all_equal(&self) -> bool {
        self.terms.iter().all(|t| t.equal)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &TermComparison> {
        self.terms.iter().filter(|t| !t.equal)
    }
}

/// Termwise comparison after scaling `derived` so that its fractional
/// coefficient equals the one in `printed`.
pub fn compare_reduced_forms(derived: &Expr, printed: &Expr) -> Result<ComparisonReport, ReductionError> {
    let (dn, dc) = fractional_coefficient(derived)?;
    let (pn, pc) = fractional_coefficient(printed)?;
    if dn != pn {
        return Err(ExprError::Unsupported(format!("fractional terms differ: `{dn}` vs `{pn}`")).into());
    }
    if is_zero(&dc) || is_zero(&pc) {
        return Err(ExprError::DivisionByZero("fractional coefficient".into()).into());
    }
    let scaled = cancel(&(derived.clone() * pc.clone() * Expr::recip(&dc)));
    let d = group_by(&scaled, is_reduced_variable);
    let p = group_by(&cancel(printed), is_reduced_variable);
    let mut keys: Vec<Expr> = d.keys().chain(p.keys()).cloned().collect();
    keys.sort();
    keys.dedup();
    let terms = keys
        .into_iter()
        .map(|m| {
            let derived = d.get(&m).map(cancel).unwrap_or_else(Expr::zero);
            let printed = p.get(&m).map(cancel).unwrap_or_else(Expr::zero);
            let equal = symbolic_eq(&derived, &printed);
            TermComparison {
                monomial: m,
                derived,
                printed,
                equal,
            }
        })
        .collect();
    Ok(ComparisonReport {
        normalization: pc,
        terms,
    })
}

/// Evaluates both sides of `residual(x^p h(t x^q)) = x^s R(r)` for an
/// explicit power-sum profile and returns the largest deviation (relative
/// when both sides exceed the tolerance floor, absolute otherwise).
pub fn reduced_residual_identity_check(
    spec: &PdeSpec,
    red: &SimilarityReduction,
    h_test: &Expr,
    points: &[(f64, f64)],
    params: &Bindings,
) -> Result<f64, ReductionError> {
    let (t, x) = (Expr::sym("t"), Expr::sym("x"));
    let inv = &red.invariants;
    let r_expr = if inv.translation_case {
        t.clone()
    } else {
        t.clone() * Expr::pow(x.clone(), inv.q.clone())
    };
    let h_tx = substitute(h_test, &BTreeMap::from([("r".to_string(), r_expr.clone())]))?;
    let u = Expr::pow(x.clone(), inv.p.clone()) * h_tx;
    let lhs = residual_of(spec, &u)?;
    let rhs = Expr::pow(x, red.s.clone()) * substitute_function(&red.reduced_ode, "h", "r", h_test)?;
    let tol = Tolerance::default();
    let mut worst = 0.0f64;
    for &(xv, tv) in points {
        let mut b = params.clone();
        b.insert("x".into(), xv);
        b.insert("t".into(), tv);
        let rv = crate::expr::eval_numeric(&r_expr, &b)?;
        b.insert("r".into(), rv);
        let l = eval_fractional(&lhs, &b)?;
        let rr = eval_fractional(&rhs, &b)?;
        worst = worst.max(tol.deviation(l, rr));
    }
    Ok(worst)
}

/// `h(t) = kappa t^(a-1) / Gamma(a)` together with its fractional derivative,
/// which vanishes because `1/Gamma(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSolution {
    pub h: Expr,
    pub derivative: Expr,
}

/// The kernel profile for order `alpha`; a symbolic order is assumed to lie
/// in `(0, 1)`.
pub fn kernel_solution(alpha: &Expr, kappa: &Expr) -> Result<KernelSolution, ReductionError> {
    if let Some(r) = alpha.as_num() {
        if r.is_one() {
            return Err(ReductionError::ClassicalKernel);
        }
        if !r.is_positive() || r > &Rational::one() {
            return Err(ReductionError::BadOrder(r.to_string()));
        }
    }
    let h = kappa.clone()
        * Expr::pow(Expr::sym("t"), alpha.clone() - Expr::one())
        * Expr::recip(&Expr::gamma(alpha.clone()));
    let derivative = rl_power_symbolic(&h, "t", alpha)?;
    Ok(KernelSolution { h, derivative })
}
