//! Numerical fractional calculus used as the independent oracle for the
//! symbolic engine: Gamma, the Riemann–Liouville power rule, the
//! Grünwald–Letnikov discretization and pointwise residual evaluation.
//!
//! The lower terminal of every Riemann–Liouville derivative is 0.

use thiserror::Error;

use crate::expr::{eval_numeric, eval_with, substitute_function, Bindings, Expr, ExprError, Node};
use crate::parallel::{map_range, map_slice, Strategy};
use crate::pde::{residual_of, PdeSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("Gamma has a pole at {0}")]
    GammaPole(f64),
    #[error("power rule needs p > -1 and t > 0, got p = {p}, t = {t}")]
    PowerDomain { p: f64, t: f64 },
    #[error("fractional order {0} outside (0, 1)")]
    BadOrder(f64),
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function (Lanczos, g = 7, reflection below 1/2).
pub fn gamma_fn(x: f64) -> Result<f64, NumericsError> {
    if x <= 0.0 && x == x.floor() {
        return Err(NumericsError::GammaPole(x));
    }
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin();
        return Ok(std::f64::consts::PI / (s * gamma_fn(1.0 - x)?));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let w = x + LANCZOS_G + 0.5;
    Ok((2.0 * std::f64::consts::PI).sqrt() * w.powf(x + 0.5) * (-w).exp() * acc)
}

fn is_nonpositive_integer(x: f64) -> bool {
    let r = x.round();
    r <= 0.0 && (x - r).abs() <= 1e-12 * r.abs().max(1.0)
}

/// `D^alpha t^p = Gamma(p+1)/Gamma(p+1-alpha) t^(p-alpha)`; exactly zero when
/// `p + 1 - alpha` is a nonpositive integer.
pub fn rl_power_rule(p: f64, alpha: f64, t: f64) -> Result<f64, NumericsError> {
    if !(p > -1.0) || !(t > 0.0) {
        return Err(NumericsError::PowerDomain { p, t });
    }
    let shifted = p + 1.0 - alpha;
    if is_nonpositive_integer(shifted) {
        return Ok(0.0);
    }
    Ok(gamma_fn(p + 1.0)? / gamma_fn(shifted)? * t.powf(p - alpha))
}

/// Samples of a function at uniform nodes `t0, t0 + dt, ..., t1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    t0: f64,
    t1: f64,
    values: Vec<f64>,
}

impl Grid {
    pub fn new(t0: f64, t1: f64, values: Vec<f64>) -> Result<Self, NumericsError> {
        if values.len() < 2 {
            return Err(NumericsError::BadGrid("need at least two samples".into()));
        }
        if !(t1 > t0) || t0 < 0.0 {
            return Err(NumericsError::BadGrid(format!("bad interval [{t0}, {t1}]")));
        }
        Ok(Grid { t0, t1, values })
    }

    pub fn sample(t0: f64, t1: f64, steps: usize, f: impl Fn(f64) -> f64) -> Result<Self, NumericsError> {
        if steps < 2 {
            return Err(NumericsError::BadGrid("need at least two samples".into()));
        }
        let dt = (t1 - t0) / (steps - 1) as f64;
        let values = (0..steps).map(|j| f(t0 + j as f64 * dt)).collect();
        Grid::new(t0, t1, values)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / (self.values.len() - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("grid is nonempty")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracConfig {
    pub alpha: f64,
    /// Lower terminal of the derivative; must coincide with the grid start.
    pub history_start: f64,
    /// Short-memory window: history older than this is dropped.
    pub window: Option<f64>,
}

impl FracConfig {
    pub fn new(alpha: f64) -> Self {
        FracConfig {
            alpha,
            history_start: 0.0,
            window: None,
        }
    }
}

/// Grünwald–Letnikov weights `w_0 = 1, w_i = w_{i-1} (1 - (alpha+1)/i)`.
pub fn gl_weights(alpha: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n);
    let mut prev = 1.0;
    for i in 0..n {
        if i > 0 {
            prev *= 1.0 - (alpha + 1.0) / i as f64;
        }
        w.push(prev);
    }
    w
}

/// Neumaier-compensated sum of `w[i] * f[j - i]` for `i = 0..len`.
fn gl_history_sum(w: &[f64], f: &[f64], j: usize, len: usize) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for i in 0..len {
        let x = w[i] * f[j - i];
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_config(samples: &Grid, cfg: &FracConfig) -> Result<(), NumericsError> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(NumericsError::BadOrder(cfg.alpha));
    }
    if (cfg.history_start - samples.t0).abs() > 1e-12 {
        return Err(NumericsError::BadGrid(format!(
            "grid starts at {} but the lower terminal is {}",
            samples.t0, cfg.history_start
        )));
    }
    Ok(())
}

/// First-order Grünwald–Letnikov approximation of the RL derivative at every
/// grid node.
pub fn gl_rl_derivative(samples: &Grid, cfg: &FracConfig) -> Result<Grid, NumericsError> {
    gl_rl_derivative_with(samples, cfg, Strategy::default())
}

pub fn gl_rl_derivative_with(
    samples: &Grid,
    cfg: &FracConfig,
    strategy: Strategy,
) -> Result<Grid, NumericsError> {
    check_config(samples, cfg)?;
    let n = samples.steps();
    let dt = samples.dt();
    let w = gl_weights(cfg.alpha, n);
    let memory = cfg
        .window
        .map(|l| ((l / dt).floor() as usize).saturating_add(1))
        .unwrap_or(n);
    let scale = dt.powf(-cfg.alpha);
    let f = samples.values();
    let out = map_range(n, strategy, |j| {
        scale * gl_history_sum(&w, f, j, (j + 1).min(memory))
    });
    Grid::new(samples.t0, samples.t1, out)
}

/// GL value at a single point `t` with step close to `dt`, sampling `f` on
/// `[0, t]`.
pub fn gl_rl_derivative_at(
    f: impl Fn(f64) -> f64,
    alpha: f64,
    t: f64,
    dt: f64,
) -> Result<f64, NumericsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(NumericsError::BadOrder(alpha));
    }
    let n = ((t / dt).round() as usize).max(1);
    let h = t / n as f64;
    let samples: Vec<f64> = (0..=n).map(|i| f(i as f64 * h)).collect();
    let w = gl_weights(alpha, n + 1);
    Ok(h.powf(-alpha) * gl_history_sum(&w, &samples, n, n + 1))
}

/// Evaluates `fdiff(inner, var, order)` term by term with the power rule.
/// Every term of `inner` must be `var^p` times factors free of `var`.
fn power_sum_rl(node: &Expr, point: &Bindings) -> Result<f64, ExprError> {
    let Node::Frac(fd) = node.node() else {
        unreachable!("hook is only called on fractional nodes")
    };
    let alpha = eval_numeric(&fd.order, point)?;
    let var = &*fd.var;
    let t = *point
        .get(var)
        .ok_or_else(|| ExprError::Unbound(var.to_string()))?;
    let mut acc = 0.0;
    for term in fd.inner.terms() {
        let mut p = 0.0;
        let mut rest = 1.0;
        for f in term.factors() {
            let (b, x) = f.as_base_exp();
            if b.as_sym().map(|s| &**s == var).unwrap_or(false) && !x.contains_symbol(var) {
                p += eval_numeric(&x, point)?;
            } else if f.contains_symbol(var) {
                return Err(ExprError::Unsupported(format!(
                    "`{}` is not a finite sum of powers of `{var}`; use the Grünwald–Letnikov path",
                    fd.inner
                )));
            } else {
                rest *= eval_fractional(&f, point)?;
            }
        }
        let d = rl_power_rule(p, alpha, t).map_err(|e| ExprError::Unsupported(e.to_string()))?;
        acc += rest * d;
    }
    Ok(acc)
}

/// Numeric evaluation where fractional-derivative nodes are resolved by the
/// power rule.
pub fn eval_fractional(e: &Expr, point: &Bindings) -> Result<f64, ExprError> {
    eval_with(e, point, &power_sum_rl)
}

/// Residual of the PDE for an explicit `u(x, t)` at each `(x, t)` point.
/// `params` binds `a`, `b`, `k`, ... as needed.
pub fn pde_residual_on_grid(
    spec: &PdeSpec,
    u_closed_form: &Expr,
    points: &[(f64, f64)],
    params: &Bindings,
) -> Result<Vec<f64>, NumericsError> {
    pde_residual_on_grid_with(spec, u_closed_form, points, params, Strategy::default())
}

pub fn pde_residual_on_grid_with(
    spec: &PdeSpec,
    u_closed_form: &Expr,
    points: &[(f64, f64)],
    params: &Bindings,
    strategy: Strategy,
) -> Result<Vec<f64>, NumericsError> {
    let residual = residual_of(spec, u_closed_form)?;
    let vals = map_slice(points, strategy, |&(x, t)| {
        let mut b = params.clone();
        b.insert("x".into(), x);
        b.insert("t".into(), t);
        eval_fractional(&residual, &b)
    });
    vals.into_iter().map(|v| v.map_err(NumericsError::from)).collect()
}

/// Residual of a reduced equation in `h(r)` for an explicit profile `h`.
pub fn fode_residual_on_grid(
    reduced_ode: &Expr,
    h_closed_form: &Expr,
    r_points: &[f64],
    params: &Bindings,
) -> Result<Vec<f64>, NumericsError> {
    let e = substitute_function(reduced_ode, "h", "r", h_closed_form)?;
    let vals = map_slice(r_points, Strategy::default(), |&r| {
        let mut b = params.clone();
        b.insert("r".into(), r);
        eval_fractional(&e, &b)
    });
    vals.into_iter().map(|v| v.map_err(NumericsError::from)).collect()
}

/// Default comparison: relative when both magnitudes exceed `floor`,
/// absolute otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-8,
            abs: 1e-10,
            floor: 1e-6,
        }
    }
}

impl Tolerance {
    /// Relative deviation when both values are above the floor, otherwise
    /// the absolute difference.
    pub fn deviation(&self, a: f64, b: f64) -> f64 {
        if a.abs() > self.floor && b.abs() > self.floor {
            (a - b).abs() / a.abs().max(b.abs())
        } else {
            (a - b).abs()
        }
    }

    pub fn accepts(&self, a: f64, b: f64) -> bool {
        if a.abs() > self.floor && b.abs() > self.floor {
            self.deviation(a, b) <= self.rel
        } else {
            (a - b).abs() <= self.abs
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_integers_and_half() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-12);
        let g = gamma_fn(0.5).unwrap();
        assert!((g * g - std::f64::consts::PI).abs() < 1e-13);
        assert!((g - 1.772_453_850_905_52).abs() < 1e-12);
        assert!(matches!(gamma_fn(0.0), Err(NumericsError::GammaPole(_))));
        assert!(matches!(gamma_fn(-3.0), Err(NumericsError::GammaPole(_))));
    }

    #[test]
    fn gamma_reflection_and_duplication() {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        for &z in &[0.1, 0.25, 0.3, 0.7, -0.4, -1.3] {
            let lhs = gamma_fn(z).unwrap() * gamma_fn(1.0 - z).unwrap();
            let rhs = std::f64::consts::PI / (std::f64::consts::PI * z).sin();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs(), "z = {z}");
        }
        // Gamma(z) Gamma(z + 1/2) = 2^(1-2z) sqrt(pi) Gamma(2z)
        for &z in &[0.3, 1.1, 2.75, 6.2] {
            let lhs = gamma_fn(z).unwrap() * gamma_fn(z + 0.5).unwrap();
            let rhs = 2f64.powf(1.0 - 2.0 * z) * std::f64::consts::PI.sqrt() * gamma_fn(2.0 * z).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs(), "z = {z}");
        }
    }

    #[test]
    fn power_rule_values() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((rl_power_rule(1.0, 0.5, 1.0).unwrap() - 2.0 / sqrt_pi).abs() < 1e-12);
        assert!((rl_power_rule(0.0, 0.5, 1.0).unwrap() - 1.0 / sqrt_pi).abs() < 1e-12);
        for &a in &[0.25, 0.5, 0.75] {
            assert_eq!(rl_power_rule(a - 1.0, a, 2.3).unwrap(), 0.0);
        }
        assert!(rl_power_rule(-1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn power_rule_classical_limit() {
        let a = 1.0 - 1e-8;
        for p in [1.0, 2.0, 3.0] {
            let v = rl_power_rule(p, a, 1.0).unwrap();
            assert!((v - p).abs() < 1e-6);
        }
    }

    #[test]
    fn gl_matches_power_rule() {
        let g = Grid::sample(0.0, 1.0, 10_001, |t| t).unwrap();
        let d = gl_rl_derivative(&g, &FracConfig::new(0.5)).unwrap();
        assert!((d.last() - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-3);

        let g = Grid::sample(0.0, 1.0, 10_001, |t| t * t).unwrap();
        let d = gl_rl_derivative(&g, &FracConfig::new(0.25)).unwrap();
        let exact = rl_power_rule(2.0, 0.25, 1.0).unwrap();
        // Gamma(3)/Gamma(2.75)
        assert!((exact - 1.243_503_145).abs() < 1e-8);
        assert!((d.last() - exact).abs() < 2e-3);
    }

    #[test]
    fn gl_zero_and_linearity() {
        let z = Grid::sample(0.0, 1.0, 101, |_| 0.0).unwrap();
        let d = gl_rl_derivative(&z, &FracConfig::new(0.3)).unwrap();
        assert!(d.values().iter().all(|v| *v == 0.0));

        let cfg = FracConfig::new(0.6);
        let f = Grid::sample(0.0, 2.0, 501, |t| t.powi(3)).unwrap();
        let g = Grid::sample(0.0, 2.0, 501, |t| t.sin()).unwrap();
        let a = 2.5;
        let comb = Grid::sample(0.0, 2.0, 501, |t| a * t.powi(3) + t.sin()).unwrap();
        let (df, dg, dc) = (
            gl_rl_derivative(&f, &cfg).unwrap(),
            gl_rl_derivative(&g, &cfg).unwrap(),
            gl_rl_derivative(&comb, &cfg).unwrap(),
        );
        for j in 0..comb.steps() {
            let lhs = dc.values()[j];
            let rhs = a * df.values()[j] + dg.values()[j];
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn gl_weight_partial_sums() {
        for &a in &[0.25, 0.5, 0.75] {
            let w = gl_weights(a, 100_001);
            let mut partial = 0.0;
            let mut prev = f64::INFINITY;
            for (i, wi) in w.iter().enumerate() {
                partial += wi;
                if i >= 1 {
                    assert!(partial.abs() <= prev, "not monotone at {i}");
                }
                prev = partial.abs();
            }
            // The tail decays like N^(-a) / Gamma(1 - a).
            let tail = (w.len() as f64).powf(-a) / gamma_fn(1.0 - a).unwrap();
            assert!((partial - tail).abs() < 0.05 * tail, "a = {a}: {partial} vs {tail}");
        }
    }

    #[test]
    fn gl_rejects_bad_config() {
        let g = Grid::sample(0.0, 1.0, 11, |t| t).unwrap();
        assert!(gl_rl_derivative(&g, &FracConfig::new(1.0)).is_err());
        let shifted = Grid::sample(0.5, 1.0, 11, |t| t).unwrap();
        assert!(gl_rl_derivative(&shifted, &FracConfig::new(0.5)).is_err());
        assert!(Grid::new(0.0, 1.0, vec![1.0]).is_err());
    }

    #[test]
    fn windowed_memory_is_truncated() {
        let g = Grid::sample(0.0, 1.0, 1001, |t| t).unwrap();
        let mut cfg = FracConfig::new(0.5);
        let full = gl_rl_derivative(&g, &cfg).unwrap();
        cfg.window = Some(0.1);
        let short = gl_rl_derivative(&g, &cfg).unwrap();
        assert_eq!(full.values()[50], short.values()[50]);
        assert!(full.last() != short.last());
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let g = Grid::sample(0.0, 1.0, 2001, |t| t.powf(1.5)).unwrap();
        let cfg = FracConfig::new(0.4);
        let a = gl_rl_derivative_with(&g, &cfg, Strategy::Sequential).unwrap();
        let b = gl_rl_derivative_with(&g, &cfg, Strategy::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tolerance_policy() {
        let tol = Tolerance::default();
        assert!(tol.accepts(1.0, 1.0 + 5e-9));
        assert!(!tol.accepts(1.0, 1.0 + 5e-8));
        assert!(tol.accepts(1e-11, 5e-11));
        assert!(!tol.accepts(1e-7, 1e-9));
    }
}
