//! The time-fractional K(m,n) family
//! `D^a_t u + zeta (u^m)_x + g(t) (u^n)_xxx = 0` and its scaling weights.

use std::fmt;

use thiserror::Error;

use crate::expr::{cancel, diff, is_zero, partial, symbolic_eq, Expr, ExprError, JetContext};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error("invalid equation: {0}")]
    InvalidSpec(String),
    #[error("g(t) = {0} is not weight-homogeneous")]
    NotHomogeneous(String),
    #[error("generator has all infinitesimals identically zero")]
    ZeroGenerator,
    #[error("scaling weights are all zero")]
    ZeroWeights,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoeffTag {
    /// An unspecified nonvanishing `g(t)`.
    Arbitrary,
    /// `k`
    Constant,
    /// `k t^b`
    Power,
    /// `k e^(b t)`
    Exponential,
    /// `k (t - b)^(2/3)`
    ShiftedPower23,
    /// `k (t^2 - b)^(1/3)`
    QuadPower13,
}

impl CoeffTag {
    pub fn name(self) -> &'static str {
        match self {
            CoeffTag::Arbitrary => "arbitrary",
            CoeffTag::Constant => "constant",
            CoeffTag::Power => "power",
            CoeffTag::Exponential => "exponential",
            CoeffTag::ShiftedPower23 => "shifted-power-2/3",
            CoeffTag::QuadPower13 => "quad-power-1/3",
        }
    }
}

/// A `g(t)` from the closed catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffForm {
    tag: CoeffTag,
    k: Expr,
    b: Expr,
}

impl CoeffForm {
    fn make(tag: CoeffTag, k: Expr, b: Expr) -> Result<Self, PdeError> {
        if tag != CoeffTag::Arbitrary && is_zero(&k) {
            return Err(PdeError::InvalidSpec("g(t) must not vanish (k = 0)".into()));
        }
        Ok(CoeffForm { tag, k, b })
    }

    pub fn arbitrary() -> Self {
        CoeffForm {
            tag: CoeffTag::Arbitrary,
            k: Expr::one(),
            b: Expr::zero(),
        }
    }

    pub fn constant(k: Expr) -> Result<Self, PdeError> {
        Self::make(CoeffTag::Constant, k, Expr::zero())
    }

    pub fn power(k: Expr, b: Expr) -> Result<Self, PdeError> {
        Self::make(CoeffTag::Power, k, b)
    }

    pub fn exponential(k: Expr, b: Expr) -> Result<Self, PdeError> {
        Self::make(CoeffTag::Exponential, k, b)
    }

    pub fn shifted_power23(k: Expr, b: Expr) -> Result<Self, PdeError> {
        Self::make(CoeffTag::ShiftedPower23, k, b)
    }

    pub fn quad_power13(k: Expr, b: Expr) -> Result<Self, PdeError> {
        Self::make(CoeffTag::QuadPower13, k, b)
    }

    /// `g = k` with symbolic `k`.
    pub fn symbolic_constant() -> Self {
        Self::constant(Expr::sym("k")).expect("k is nonzero")
    }

    /// `g = k t^b` with symbolic `k`, `b`.
    pub fn symbolic_power() -> Self {
        Self::power(Expr::sym("k"), Expr::sym("b")).expect("k is nonzero")
    }

    pub fn tag(&self) -> CoeffTag {
        self.tag
    }

    pub fn k(&self) -> &Expr {
        &self.k
    }

    pub fn b(&self) -> &Expr {
        &self.b
    }

    /// `g(t)` as an expression in `t`.
    pub fn g_expr(&self) -> Expr {
        let t = Expr::sym("t");
        let k = self.k.clone();
        let b = self.b.clone();
        match self.tag {
            CoeffTag::Arbitrary => Expr::func("g", 0, vec![t]),
            CoeffTag::Constant => k,
            CoeffTag::Power => k * Expr::pow(t, b),
            CoeffTag::Exponential => k * Expr::exp(b * t),
            CoeffTag::ShiftedPower23 => k * Expr::pow(t - b, Expr::rational(2, 3)),
            CoeffTag::QuadPower13 => k * Expr::pow(Expr::powi(&t, 2) - b, Expr::rational(1, 3)),
        }
    }

    /// Recognizes a catalog form from an expression in `t`. `k` is the
    /// `t`-free factor; the remaining factor fixes the tag.
    pub fn recognize(g: &Expr) -> Result<Self, PdeError> {
        if let Some(f) = g.func_nodes().into_iter().find(|f| {
            matches!(f.node(), crate::expr::Node::Func(fa) if &*fa.name == "g")
        }) {
            if symbolic_eq(&f, g) {
                return Ok(Self::arbitrary());
            }
            return Err(PdeError::InvalidSpec(format!("`{g}` mixes g(t) with other terms")));
        }
        if !g.contains_symbol("t") {
            return Self::constant(g.clone());
        }
        let (k, rest): (Vec<Expr>, Vec<Expr>) = g.factors().into_iter().partition(|f| !f.contains_symbol("t"));
        let k = Expr::mul(k);
        let rest = Expr::mul(rest);
        let t = Expr::sym("t");
        let unknown = || PdeError::InvalidSpec(format!("g(t) = `{g}` is not a catalog form"));
        let (base, exp) = rest.as_base_exp();
        if base == t {
            if exp.contains_symbol("t") {
                return Err(unknown());
            }
            return Self::power(k, exp);
        }
        if let crate::expr::Node::Func(fa) = rest.node() {
            if &*fa.name == "exp" && fa.order == 0 {
                let b = partial(&fa.args[0], &t)?;
                if !b.contains_symbol("t") && is_zero(&(fa.args[0].clone() - b.clone() * t.clone())) {
                    return Self::exponential(k, b);
                }
            }
            return Err(unknown());
        }
        if exp == Expr::rational(2, 3) {
            let b = t.clone() - base.clone();
            if !b.contains_symbol("t") {
                return Self::shifted_power23(k, b);
            }
        }
        if exp == Expr::rational(1, 3) {
            let b = Expr::powi(&t, 2) - base.clone();
            if !b.contains_symbol("t") {
                return Self::quad_power13(k, b);
            }
        }
        Err(unknown())
    }
}

impl fmt::Display for CoeffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.g_expr())
    }
}

/// One member of the K(m,n) family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdeSpec {
    alpha: Expr,
    m: u32,
    n: u32,
    zeta: i8,
    g: CoeffForm,
}

pub const MAX_POWER: u32 = 6;

impl PdeSpec {
    pub fn new(alpha: Expr, m: u32, n: u32, zeta: i8, g: CoeffForm) -> Result<Self, PdeError> {
        if let Some(a) = alpha.as_num() {
            if !a.is_positive() || a > &crate::expr::Rational::one() {
                return Err(PdeError::InvalidSpec(format!("order {a} outside (0, 1]")));
            }
        }
        for (name, v) in [("m", m), ("n", n)] {
            if !(1..=MAX_POWER).contains(&v) {
                return Err(PdeError::InvalidSpec(format!("{name} = {v} outside 1..={MAX_POWER}")));
            }
        }
        if zeta != 1 && zeta != -1 {
            return Err(PdeError::InvalidSpec(format!("zeta = {zeta} must be +1 or -1")));
        }
        Ok(PdeSpec { alpha, m, n, zeta, g })
    }

    /// K(2,3) with `zeta = +1`.
    pub fn k23(alpha: Expr, g: CoeffForm) -> Result<Self, PdeError> {
        Self::new(alpha, 2, 3, 1, g)
    }

    /// K(2,3) with symbolic order `a`.
    pub fn k23_generic(g: CoeffForm) -> Self {
        Self::k23(Expr::sym("a"), g).expect("symbolic order is valid")
    }

    pub fn alpha(&self) -> &Expr {
        &self.alpha
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn zeta(&self) -> i8 {
        self.zeta
    }

    pub fn g(&self) -> &CoeffForm {
        &self.g
    }

    /// True for `alpha = 1`, where the time term is the ordinary `u_t`.
    pub fn is_classical(&self) -> bool {
        self.alpha.is_one()
    }

    /// The time-derivative term `D^a_t u` (or `u_t`) in jet coordinates.
    pub fn time_term(&self) -> Expr {
        let ctx = JetContext::kmn();
        if self.is_classical() {
            ctx.jet(&["t"])
        } else {
            Expr::frac(ctx.u(), "t", self.alpha.clone())
        }
    }

    /// `zeta (u^m)_x + g(t) (u^n)_xxx` expanded in jet symbols, so that on
    /// solutions the time term equals its negative.
    pub fn spatial_part(&self) -> Expr {
        let ctx = JetContext::kmn();
        let u = ctx.u();
        let adv = diff(&Expr::powi(&u, self.m as i64), "x", 1, Some(&ctx)).expect("polynomial in jets");
        let disp = diff(&Expr::powi(&u, self.n as i64), "x", 3, Some(&ctx)).expect("polynomial in jets");
        Expr::int(self.zeta as i64) * adv + self.g.g_expr() * disp
    }
}

impl fmt::Display for PdeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fdiff(u, t, {}) {} (u^{})_x + ({}) (u^{})_xxx = 0",
            self.alpha,
            if self.zeta > 0 { "+" } else { "-" },
            self.m,
            self.g,
            self.n
        )
    }
}

/// The residual `D^a_t u + zeta (u^m)_x + g(t) (u^n)_xxx` in jet symbols.
pub fn pde_residual(spec: &PdeSpec) -> Expr {
    spec.time_term() + spec.spatial_part()
}

/// The residual for an explicit `u(x, t)`. The fractional term stays as an
/// unevaluated node.
pub fn residual_of(spec: &PdeSpec, u: &Expr) -> Result<Expr, ExprError> {
    let time = if spec.is_classical() {
        diff(u, "t", 1, None)?
    } else {
        Expr::frac(u.clone(), "t", spec.alpha.clone())
    };
    let adv = diff(&Expr::powi(u, spec.m as i64), "x", 1, None)?;
    let disp = diff(&Expr::powi(u, spec.n as i64), "x", 3, None)?;
    Ok(time + Expr::int(spec.zeta as i64) * adv + spec.g.g_expr() * disp)
}

/// Coefficients of `X = e t d/dt + (a0 + a1 x) d/dx + c u d/du`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub e: Expr,
    pub a0: Expr,
    pub a1: Expr,
    pub c: Expr,
}

impl NormalForm {
    pub fn coefficients(&self) -> [&Expr; 4] {
        [&self.e, &self.a0, &self.a1, &self.c]
    }
}

/// Infinitesimal generator `xi_t d/dt + xi_x d/dx + eta d/du`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    xi_t: Expr,
    xi_x: Expr,
    eta: Expr,
    normal: Option<NormalForm>,
}

fn free_of_coordinates(e: &Expr) -> bool {
    !["t", "x", "u"].iter().any(|v| e.contains_symbol(v))
}

impl Generator {
    pub fn new(xi_t: Expr, xi_x: Expr, eta: Expr) -> Result<Self, PdeError> {
        if is_zero(&xi_t) && is_zero(&xi_x) && is_zero(&eta) {
            return Err(PdeError::ZeroGenerator);
        }
        let normal = Self::detect_normal_form(&xi_t, &xi_x, &eta);
        Ok(Generator { xi_t, xi_x, eta, normal })
    }

    fn detect_normal_form(xi_t: &Expr, xi_x: &Expr, eta: &Expr) -> Option<NormalForm> {
        let (t, x, u) = (Expr::sym("t"), Expr::sym("x"), Expr::sym("u"));
        let e = cancel(&(xi_t.clone() / t));
        let c = cancel(&(eta.clone() / u));
        let a1 = partial(xi_x, &x).ok()?;
        let a0 = cancel(&(xi_x.clone() - a1.clone() * x));
        [&e, &a0, &a1, &c]
            .iter()
            .all(|v| free_of_coordinates(v))
            .then_some(NormalForm { e, a0, a1, c })
    }

    pub fn from_normal_form(nf: NormalForm) -> Result<Self, PdeError> {
        let (t, x, u) = (Expr::sym("t"), Expr::sym("x"), Expr::sym("u"));
        Self::new(nf.e.clone() * t, nf.a0.clone() + nf.a1.clone() * x, nf.c.clone() * u)
    }

    /// `d/dx`
    pub fn translation() -> Self {
        Self::new(Expr::zero(), Expr::one(), Expr::zero()).expect("nonzero")
    }

    /// `w_t t d/dt + w_x x d/dx + w_u u d/du`
    pub fn scaling(w: &ScalingWeights) -> Result<Self, PdeError> {
        Self::from_normal_form(NormalForm {
            e: w.w_t.clone(),
            a0: Expr::zero(),
            a1: w.w_x.clone(),
            c: w.w_u.clone(),
        })
    }

    pub fn xi_t(&self) -> &Expr {
        &self.xi_t
    }

    pub fn xi_x(&self) -> &Expr {
        &self.xi_x
    }

    pub fn eta(&self) -> &Expr {
        &self.eta
    }

    pub fn normal_form(&self) -> Option<&NormalForm> {
        self.normal.as_ref()
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.xi_t, &self.xi_x, &self.eta]
    }

    /// True for a pure `x`-translation (up to scale).
    pub fn is_translation(&self) -> bool {
        is_zero(&self.xi_t) && is_zero(&self.eta) && free_of_coordinates(&self.xi_x)
    }

    /// Scaling weights `(e, a1, c)` when the generator is a pure scaling.
    pub fn weights(&self) -> Option<ScalingWeights> {
        let nf = self.normal.as_ref()?;
        if !is_zero(&nf.a0) {
            return None;
        }
        ScalingWeights::new(nf.e.clone(), nf.a1.clone(), nf.c.clone()).ok()
    }

    /// Same ray: `self = lambda * other` for a nonzero factor `lambda`.
    pub fn same_ray(&self, other: &Generator) -> bool {
        let a = self.components();
        let b = other.components();
        for i in 0..3 {
            if is_zero(a[i]) != is_zero(b[i]) {
                return false;
            }
            for j in (i + 1)..3 {
                let minor = a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone();
                if !is_zero(&minor) {
                    return false;
                }
            }
        }
        true
    }

    /// Multiplies every infinitesimal by `factor`.
    pub fn scaled(&self, factor: &Expr) -> Result<Self, PdeError> {
        Self::new(
            cancel(&(self.xi_t.clone() * factor.clone())),
            cancel(&(self.xi_x.clone() * factor.clone())),
            cancel(&(self.eta.clone() * factor.clone())),
        )
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (coef, v) in [(&self.xi_t, "t"), (&self.xi_x, "x"), (&self.eta, "u")] {
            if coef.is_zero() {
                continue;
            }
            if coef.is_one() {
                parts.push(format!("d/d{v}"));
            } else {
                parts.push(format!("({coef}) d/d{v}"));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Exponents of `t -> l^w_t t, x -> l^w_x x, u -> l^w_u u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalingWeights {
    pub w_t: Expr,
    pub w_x: Expr,
    pub w_u: Expr,
}

impl ScalingWeights {
    pub fn new(w_t: Expr, w_x: Expr, w_u: Expr) -> Result<Self, PdeError> {
        if is_zero(&w_t) && is_zero(&w_x) && is_zero(&w_u) {
            return Err(PdeError::ZeroWeights);
        }
        Ok(ScalingWeights { w_t, w_x, w_u })
    }

    pub fn scaled(&self, factor: &Expr) -> Result<Self, PdeError> {
        Self::new(
            cancel(&(self.w_t.clone() * factor.clone())),
            cancel(&(self.w_x.clone() * factor.clone())),
            cancel(&(self.w_u.clone() * factor.clone())),
        )
    }
}

/// The scaling exponent of each of the three terms: time derivative,
/// advection, dispersion.
pub fn term_weights(spec: &PdeSpec, w: &ScalingWeights) -> Result<Vec<Expr>, PdeError> {
    let g_weight = match spec.g.tag {
        CoeffTag::Constant => Expr::zero(),
        CoeffTag::Power => spec.g.b.clone() * w.w_t.clone(),
        _ => return Err(PdeError::NotHomogeneous(spec.g.to_string())),
    };
    let time = w.w_u.clone() - spec.alpha.clone() * w.w_t.clone();
    let adv = Expr::int(spec.m as i64) * w.w_u.clone() - w.w_x.clone();
    let disp = g_weight + Expr::int(spec.n as i64) * w.w_u.clone() - Expr::int(3) * w.w_x.clone();
    Ok(vec![cancel(&time), cancel(&adv), cancel(&disp)])
}

/// True iff all three term weights agree exactly.
pub fn scaling_invariance_check(spec: &PdeSpec, w: &ScalingWeights) -> Result<bool, PdeError> {
    let ws = term_weights(spec, w)?;
    Ok(ws.windows(2).all(|p| symbolic_eq(&p[0], &p[1])))
}
