//! Fractional prolongation, the invariance condition and the classification
//! of point symmetries `X = e t d/dt + (a0 + a1 x) d/dx + c u d/du`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{
    cancel, group_by, is_zero, partial, replace_node, substitute, total_derivative, Expr, ExprError, JetContext, Node,
    Rational,
};
use crate::parallel::{map_slice, Strategy};
use crate::pde::{pde_residual, CoeffTag, Generator, NormalForm, PdeError, PdeSpec};

/// Default number of retained terms in the Leibniz series.
pub const DEFAULT_TRUNCATION: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("unsupported ansatz: {0}")]
    UnsupportedAnsatz(String),
    #[error("outside catalog: {0}")]
    OutsideCatalog(String),
    #[error("series truncation must be at least 1")]
    BadTruncation,
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

fn jets() -> JetContext {
    JetContext::new(&["x", "t"], "u", 6).expect("valid jet space")
}

/// Generalized binomial `C(a, m) = a (a-1) ... (a-m+1) / m!`.
pub fn binomial(alpha: &Expr, m: usize) -> Expr {
    let mut out = Expr::one();
    for j in 0..m {
        out = out * (alpha.clone() - Expr::int(j as i64));
    }
    out * Expr::num(Rational::factorial(m as u32).recip().expect("nonzero"))
}

/// Riemann–Liouville derivative (lower terminal 0) of the explicit
/// dependence on `var`, term by term with
/// `D^a var^p = Gamma(p+1)/Gamma(p+1-a) var^(p-a)`. Factors free of `var`
/// (including `u` and its jets) are constants.
pub fn rl_power_symbolic(e: &Expr, var: &str, order: &Expr) -> Result<Expr, ExprError> {
    let v = Expr::sym(var);
    let mut out = Vec::new();
    for term in e.terms() {
        let mut p = Expr::zero();
        let mut rest = Vec::new();
        for f in term.factors() {
            let (base, exp) = f.as_base_exp();
            if base == v && !exp.contains_symbol(var) {
                p = p + exp;
            } else if f.contains_symbol(var) {
                return Err(ExprError::Unsupported(format!(
                    "`{term}` is not a power of `{var}` times a `{var}`-free factor"
                )));
            } else {
                rest.push(f);
            }
        }
        let p1 = p.clone() + Expr::one();
        rest.push(Expr::gamma(p1.clone()));
        rest.push(Expr::recip(&Expr::gamma(p1 - order.clone())));
        rest.push(Expr::pow(v.clone(), p - order.clone()));
        out.push(Expr::mul(rest));
    }
    Ok(Expr::add(out))
}

/// A surviving `D^(a-m)_t` term of the Leibniz series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTerm {
    pub m: usize,
    /// `fdiff(u, t, a - m)` or `fdiff(u_x, t, a - m)`.
    pub node: Expr,
    pub coefficient: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongationResult {
    pub eta_alpha: Expr,
    pub eta_x: Expr,
    pub eta_xx: Expr,
    pub eta_xxx: Expr,
    pub truncation: usize,
    pub series_terms: Vec<SeriesTerm>,
}

impl ProlongationResult {
    /// Coefficient of `fdiff(u, t, a)` in the fractional prolongation.
    pub fn leading_coefficient(&self, alpha: &Expr) -> Result<Expr, ExprError> {
        let node = Expr::frac(Expr::sym("u"), "t", alpha.clone());
        Ok(cancel(&partial(&self.eta_alpha, &node)?))
    }
}

fn iterate(e: &Expr, times: usize, f: impl Fn(&Expr) -> Result<Expr, ExprError>) -> Result<Expr, ExprError> {
    let mut out = e.clone();
    for _ in 0..times {
        out = f(&out)?;
    }
    Ok(out)
}

/// The coefficient `eta^(a)_t` of the prolonged generator, with the Leibniz
/// series truncated after `truncation` terms.
pub fn eta_alpha(gen: &Generator, alpha: &Expr, truncation: usize) -> Result<Expr, SymmetryError> {
    Ok(prolong_fractional(gen, alpha, truncation)?.0)
}

fn check_polynomial(gen: &Generator) -> Result<(), SymmetryError> {
    for comp in gen.components() {
        let mut bad = None;
        comp.walk(&mut |n| {
            let offending = match n.node() {
                Node::Pow(b, x) => {
                    ["t", "x", "u"].iter().any(|v| b.contains_symbol(v)) && !x.as_num().is_some_and(|r| r.is_integer() && !r.is_negative())
                }
                Node::Func(_) | Node::Frac(_) | Node::Gamma(_) => ["t", "x", "u"].iter().any(|v| n.contains_symbol(v)),
                _ => false,
            };
            if offending && bad.is_none() {
                bad = Some(n.clone());
            }
        });
        if let Some(b) = bad {
            return Err(SymmetryError::UnsupportedAnsatz(format!(
                "infinitesimal `{comp}` is not polynomial in (t, x, u): `{b}`"
            )));
        }
    }
    Ok(())
}

fn prolong_fractional(
    gen: &Generator,
    alpha: &Expr,
    truncation: usize,
) -> Result<(Expr, Vec<SeriesTerm>), SymmetryError> {
    if truncation == 0 {
        return Err(SymmetryError::BadTruncation);
    }
    check_polynomial(gen)?;
    let ctx = jets();
    let u = ctx.u();
    let t = Expr::sym("t");
    let ux = ctx.jet(&["x"]);
    let dt = |e: &Expr| total_derivative(e, "t", &ctx);
    let eta = gen.eta();
    let eta_u = partial(eta, &u)?;
    let fd = |inner: &Expr, m: usize| Expr::frac(inner.clone(), "t", alpha.clone() - Expr::int(m as i64));

    let mut out = vec![
        rl_power_symbolic(eta, "t", alpha)?,
        (eta_u.clone() - alpha.clone() * dt(gen.xi_t())?) * fd(&u, 0),
        -(u.clone() * rl_power_symbolic(&eta_u, "t", alpha)?),
    ];
    let mut series = Vec::new();
    for m in 1..=truncation {
        let du = iterate(&eta_u, m, |e| partial(e, &t))?;
        let on_u = cancel(&(binomial(alpha, m) * du - binomial(alpha, m + 1) * iterate(gen.xi_t(), m + 1, dt)?));
        let on_ux = cancel(&(-(binomial(alpha, m) * iterate(gen.xi_x(), m, dt)?)));
        for (inner, coefficient) in [(&u, on_u), (&ux, on_ux)] {
            if coefficient.is_zero() {
                continue;
            }
            let node = fd(inner, m);
            out.push(coefficient.clone() * node.clone());
            series.push(SeriesTerm { m, node, coefficient });
        }
    }
    Ok((cancel(&Expr::add(out)), series))
}

/// `(eta^x, eta^xx, eta^xxx)` from `eta^(J,x) = D_x eta^J - u_(J,x) D_x xi^x - u_(J,t) D_x xi^t`.
pub fn integer_prolongations(gen: &Generator) -> Result<(Expr, Expr, Expr), SymmetryError> {
    let ctx = jets();
    let dx = |e: &Expr| total_derivative(e, "x", &ctx);
    let dxi_x = dx(gen.xi_x())?;
    let dxi_t = dx(gen.xi_t())?;
    let mut prev = gen.eta().clone();
    let mut out = Vec::new();
    for order in 1..=3 {
        let xs = vec!["x"; order];
        let mut xt = vec!["x"; order - 1];
        xt.push("t");
        let next = dx(&prev)? - ctx.jet(&xs) * dxi_x.clone() - ctx.jet(&xt) * dxi_t.clone();
        prev = cancel(&next);
        out.push(prev.clone());
    }
    Ok((out[0].clone(), out[1].clone(), out[2].clone()))
}

/// Classical `eta^t = D_t eta - u_x D_t xi^x - u_t D_t xi^t`.
fn classical_eta_t(gen: &Generator) -> Result<Expr, SymmetryError> {
    let ctx = jets();
    let dt = |e: &Expr| total_derivative(e, "t", &ctx);
    Ok(cancel(
        &(dt(gen.eta())? - ctx.jet(&["x"]) * dt(gen.xi_x())? - ctx.jet(&["t"]) * dt(gen.xi_t())?),
    ))
}

/// Full prolongation data for a generator.
pub fn prolong(gen: &Generator, alpha: &Expr, truncation: usize) -> Result<ProlongationResult, SymmetryError> {
    let (eta_alpha, series_terms) = prolong_fractional(gen, alpha, truncation)?;
    let (eta_x, eta_xx, eta_xxx) = integer_prolongations(gen)?;
    Ok(ProlongationResult {
        eta_alpha,
        eta_x,
        eta_xx,
        eta_xxx,
        truncation,
        series_terms,
    })
}

/// The prolonged generator applied to the equation, restricted to solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceResult {
    pub residual: Expr,
    /// Terms carrying `D^(a-m)_t` nodes, which cannot be removed using the
    /// equation: `(node, coefficient)`.
    pub obstructions: Vec<(Expr, Expr)>,
    /// `xi^t` at `t = 0`. The lower terminal of the fractional derivative is
    /// fixed, so this must vanish; it is zero for the classical equation.
    pub lower_terminal: Expr,
}

impl InvarianceResult {
    pub fn is_symmetry(&self) -> bool {
        is_zero(&self.residual) && is_zero(&self.lower_terminal)
    }
}

/// Applies `X^(a)` to the residual and substitutes
/// `D^a_t u = -zeta (u^m)_x - g(t) (u^n)_xxx`.
pub fn invariance_residual(
    spec: &PdeSpec,
    gen: &Generator,
    truncation: usize,
) -> Result<InvarianceResult, SymmetryError> {
    let ctx = jets();
    let delta = pde_residual(spec);
    let time = spec.time_term();
    let (eta_x, eta_xx, eta_xxx) = integer_prolongations(gen)?;
    let eta_time = if spec.is_classical() {
        classical_eta_t(gen)?
    } else {
        eta_alpha(gen, spec.alpha(), truncation)?
    };
    let t = Expr::sym("t");
    let x = Expr::sym("x");
    let terms = vec![
        gen.xi_t().clone() * partial(&delta, &t)?,
        gen.xi_x().clone() * partial(&delta, &x)?,
        gen.eta().clone() * partial(&delta, &ctx.u())?,
        eta_x * partial(&delta, &ctx.jet(&["x"]))?,
        eta_xx * partial(&delta, &ctx.jet(&["x", "x"]))?,
        eta_xxx * partial(&delta, &ctx.jet(&["x", "x", "x"]))?,
        eta_time * partial(&delta, &time)?,
    ];
    let applied = Expr::add(terms);
    let on_solution = replace_node(&applied, &time, &-spec.spatial_part());
    let residual = cancel(&on_solution);
    let grouped = group_by(&residual, |f| !f.frac_nodes().is_empty());
    let obstructions = grouped
        .into_iter()
        .filter(|(k, _)| !k.frac_nodes().is_empty())
        .collect();
    let lower_terminal = if spec.is_classical() {
        Expr::zero()
    } else {
        cancel(&substitute(gen.xi_t(), &[("t".to_string(), Expr::zero())].into())?)
    };
    Ok(InvarianceResult {
        residual,
        obstructions,
        lower_terminal,
    })
}

pub const UNKNOWNS: [&str; 4] = ["c", "a1", "e", "a0"];

/// One linear homogeneous equation in `(c, a1, e, a0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearEquation {
    pub coefficients: [Expr; 4],
    /// The monomial in jets, coordinates and `g` whose coefficient this is.
    pub source: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminingSystem {
    pub equations: Vec<LinearEquation>,
}

fn is_variable_factor(f: &Expr) -> bool {
    let ctx = jets();
    f.free_symbols().iter().any(|s| ctx.is_jet(s) || ["t", "x"].contains(&&**s))
        || !f.func_nodes().is_empty()
        || !f.frac_nodes().is_empty()
}

fn ansatz() -> Generator {
    Generator::from_normal_form(NormalForm {
        e: Expr::sym("e"),
        a0: Expr::sym("a0"),
        a1: Expr::sym("a1"),
        c: Expr::sym("c"),
    })
    .expect("nonzero ansatz")
}

/// The linear system on `(c, a1, e, a0)` obtained from the invariance
/// condition with the affine ansatz.
pub fn determining_system(spec: &PdeSpec, truncation: usize) -> Result<DeterminingSystem, SymmetryError> {
    if matches!(spec.g().tag(), CoeffTag::ShiftedPower23 | CoeffTag::QuadPower13) {
        return Err(SymmetryError::OutsideCatalog(format!(
            "g(t) = {} is checked by verification only",
            spec.g()
        )));
    }
    for p in spec.alpha().free_symbols().iter().chain(spec.g().k().free_symbols().iter()).chain(spec.g().b().free_symbols().iter()) {
        if UNKNOWNS.contains(&&**p) || ["t", "x", "u"].contains(&&**p) {
            return Err(SymmetryError::UnsupportedAnsatz(format!("parameter name `{p}` is reserved")));
        }
    }
    let inv = invariance_residual(spec, &ansatz(), truncation)?;
    let grouped = group_by(&inv.residual, is_variable_factor);
    let unknowns: Vec<Expr> = UNKNOWNS.iter().map(|s| Expr::sym(s)).collect();
    let mut seen = BTreeMap::new();
    for (source, coeff) in grouped {
        let mut coefficients = Vec::with_capacity(4);
        let mut rest = coeff.clone();
        for u in &unknowns {
            let cu = cancel(&partial(&coeff, u)?);
            if cu.free_symbols().iter().any(|s| UNKNOWNS.contains(&&**s)) {
                return Err(SymmetryError::UnsupportedAnsatz(format!(
                    "coefficient of `{source}` is nonlinear in the unknowns"
                )));
            }
            rest = rest - cu.clone() * u.clone();
            coefficients.push(cu);
        }
        if !is_zero(&rest) {
            return Err(SymmetryError::UnsupportedAnsatz(format!(
                "coefficient of `{source}` has a part free of the unknowns: `{}`",
                cancel(&rest)
            )));
        }
        let coefficients: [Expr; 4] = coefficients.try_into().expect("four unknowns");
        if coefficients.iter().all(Expr::is_zero) {
            continue;
        }
        seen.entry(coefficients).or_insert(source);
    }
    let equations = seen
        .into_iter()
        .map(|(coefficients, source)| LinearEquation { coefficients, source })
        .collect();
    Ok(DeterminingSystem { equations })
}

impl DeterminingSystem {
    /// Basis of the solution space, assuming every parameter polynomial that
    /// is not identically zero is nonzero. Vectors are ordered as
    /// `(c, a1, e, a0)`.
    pub fn kernel(&self) -> Vec<[Expr; 4]> {
        let mut rows: Vec<Vec<Expr>> = self.equations.iter().map(|e| e.coefficients.to_vec()).collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0;
        for col in 0..4 {
            let candidates: Vec<usize> = (r..rows.len()).filter(|&i| !is_zero(&rows[i][col])).collect();
            let Some(&best) = candidates
                .iter()
                .find(|&&i| rows[i][col].as_num().is_some())
                .or_else(|| candidates.iter().min_by_key(|&&i| rows[i][col].size()))
            else {
                continue;
            };
            rows.swap(r, best);
            let piv = rows[r][col].clone();
            let inv = Expr::recip(&piv);
            rows[r] = rows[r].iter().map(|v| cancel(&(v.clone() * inv.clone()))).collect();
            for i in 0..rows.len() {
                if i == r || is_zero(&rows[i][col]) {
                    continue;
                }
                let f = rows[i][col].clone();
                rows[i] = (0..4).map(|j| cancel(&(rows[i][j].clone() - f.clone() * rows[r][j].clone()))).collect();
            }
            pivots.push((r, col));
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|p| p.1).collect();
        let mut basis = Vec::new();
        for free in (0..4).filter(|c| !pivot_cols.contains(c)) {
            let mut v: [Expr; 4] = std::array::from_fn(|_| Expr::zero());
            v[free] = Expr::one();
            for &(row, col) in &pivots {
                v[col] = cancel(&-rows[row][free].clone());
            }
            basis.push(v);
        }
        basis
    }
}

/// Turns a kernel vector `(c, a1, e, a0)` into a generator, scaled so that
/// the `t d/dt` coefficient is `-1` when present.
fn generator_from_vector(v: &[Expr; 4]) -> Result<Generator, SymmetryError> {
    let [c, a1, e, a0] = v.clone();
    let scale = if is_zero(&e) { Expr::one() } else { -Expr::recip(&e) };
    let s = |x: Expr| cancel(&(x * scale.clone()));
    Ok(Generator::from_normal_form(NormalForm {
        e: s(e),
        a0: s(a0),
        a1: s(a1),
        c: s(c),
    })?)
}

/// Outcome of [`classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub generators: Vec<Generator>,
    /// True when the basis was verified rather than solved for.
    pub verification_only: bool,
    pub system: Option<DeterminingSystem>,
}

fn is_one_third(alpha: &Expr) -> bool {
    alpha.as_num().is_some_and(|r| r == &Rational::new(1, 3))
}

/// Basis of the point symmetries within the affine ansatz. Translations
/// come first; scalings are normalized to `-t d/dt`.
pub fn classify(spec: &PdeSpec) -> Result<Classification, SymmetryError> {
    classify_with(spec, DEFAULT_TRUNCATION)
}

pub fn classify_with(spec: &PdeSpec, truncation: usize) -> Result<Classification, SymmetryError> {
    if matches!(spec.g().tag(), CoeffTag::ShiftedPower23 | CoeffTag::QuadPower13) {
        if !is_one_third(spec.alpha()) {
            return Err(SymmetryError::OutsideCatalog(format!(
                "g(t) = {} is only catalogued for order 1/3",
                spec.g()
            )));
        }
        let tr = Generator::translation();
        let inv = invariance_residual(spec, &tr, truncation)?;
        if !inv.is_symmetry() {
            return Err(SymmetryError::OutsideCatalog(format!(
                "translation fails for g(t) = {}: {}",
                spec.g(),
                inv.residual
            )));
        }
        return Ok(Classification {
            generators: vec![tr],
            verification_only: true,
            system: None,
        });
    }
    let system = determining_system(spec, truncation)?;
    let mut generators = system
        .kernel()
        .iter()
        .map(generator_from_vector)
        .collect::<Result<Vec<_>, _>>()?;
    generators.sort_by_key(|g| !g.is_translation());
    Ok(Classification {
        generators,
        verification_only: false,
        system: Some(system),
    })
}

/// Classifies several equations; output order follows the input.
pub fn classify_all(
    specs: &[PdeSpec],
    strategy: Strategy,
) -> Vec<Result<Classification, SymmetryError>> {
    map_slice(specs, strategy, classify)
}
