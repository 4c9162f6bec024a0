//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria that cannot hold for a mathematical reason are listed in
//! `KNOWN_UNATTAINABLE`; they still print FAIL but do not fail the run. Any
//! other failure exits nonzero.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kmn_cli::parse::parse_expression;
use kmn_cli::printed::printed_form;
use kmn_core::catalog::{classification_case, reduction_case, CLASSIFICATION_KEYS};
use kmn_core::expr::{eval_numeric, simplify, substitute, symbolic_eq, Bindings, Expr};
use kmn_core::numerics::{gl_rl_derivative, pde_residual_on_grid, rl_power_rule, FracConfig, Grid};
use kmn_core::pde::{scaling_invariance_check, CoeffForm, Generator, NormalForm, PdeSpec};
use kmn_core::reduction::{
    characteristic_invariants, compare_reduced_forms, kernel_solution, reduce, reduced_residual_identity_check,
};
use kmn_core::symmetry::{classify_with, eta_alpha, invariance_residual, Classification};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criterion 2 asks that every +1 perturbation of a generator breaks
/// invariance. Adding 1 to the `d/dx` coefficient adds a multiple of the
/// translation, which is itself a symmetry, so those perturbations stay
/// symmetries.
const KNOWN_UNATTAINABLE: [usize; 1] = [2];

const TRUNCATION: usize = 5;
const SEED: u64 = 20240601;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn p(s: &str) -> Expr {
    parse_expression(s).unwrap_or_else(|e| panic!("`{s}`: {e}"))
}

fn generator(xi_t: &str, xi_x: &str, eta: &str) -> Generator {
    Generator::new(p(xi_t), p(xi_x), p(eta)).expect("nonzero generator")
}

fn expected_generators(key: &str) -> Vec<Generator> {
    let dx = generator("0", "1", "0");
    let mut out = vec![dx];
    match key {
        "1.2" => out.push(generator("-t", "(a-b)*x", "(2*a-b)*u")),
        "1.3" => out.push(generator("-t", "a*x", "2*a*u")),
        "2.2" => out.push(generator("2*t", "(2*b-1)*x", "2*(b-1)*u")),
        "2.3" => out.push(generator("-2*t", "x", "2*u")),
        "3.2" => out.push(generator("3*t", "(3*b-1)*x", "(3*b-2)*u")),
        "3.3" => out.push(generator("-3*t", "x", "2*u")),
        _ => {}
    }
    out
}

/// Every expected generator matched by a distinct derived one, up to scale.
fn bases_match(derived: &[Generator], expected: &[Generator]) -> bool {
    if derived.len() != expected.len() {
        return false;
    }
    let mut used = vec![false; derived.len()];
    expected.iter().all(|e| {
        let hit = derived.iter().enumerate().find(|(i, d)| !used[*i] && d.same_ray(e));
        match hit {
            Some((i, _)) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}

fn all_classifications() -> Vec<(String, PdeSpec, Classification)> {
    let mut out = Vec::new();
    for key in CLASSIFICATION_KEYS {
        for spec in classification_case(key).expect("listed key").specs {
            let cl = classify_with(&spec, TRUNCATION).expect("catalog case classifies");
            out.push((key.to_string(), spec, cl));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cls = all_classifications();
    let elapsed = start.elapsed();
    let mut bad = Vec::new();
    for (key, spec, cl) in &cls {
        if !bases_match(&cl.generators, &expected_generators(key)) {
            let got: Vec<String> = cl.generators.iter().map(|g| g.to_string()).collect();
            bad.push(format!("{key} (g = {}): got [{}]", spec.g(), got.join("; ")));
        }
    }
    let fast = elapsed < Duration::from_secs(60);
    Outcome::new(
        bad.is_empty() && fast,
        format!(
            "{} equations in {:.2?}{}",
            cls.len(),
            elapsed,
            if bad.is_empty() { String::new() } else { format!("; mismatches: {}", bad.join(", ")) }
        ),
    )
}

fn perturbed(nf: &NormalForm, which: usize) -> Generator {
    let mut nf = nf.clone();
    let slot = match which {
        0 => &mut nf.e,
        1 => &mut nf.a0,
        2 => &mut nf.a1,
        _ => &mut nf.c,
    };
    *slot = slot.clone() + Expr::one();
    Generator::from_normal_form(nf).expect("nonzero after perturbation")
}

fn criterion_2() -> Outcome {
    let names = ["e (t d/dt)", "a0 (d/dx)", "a1 (x d/dx)", "c (u d/du)"];
    let mut nonzero = Vec::new();
    let mut survivors = Vec::new();
    let mut checked = 0;
    for (key, spec, cl) in all_classifications() {
        for (i, g) in cl.generators.iter().enumerate() {
            let inv = invariance_residual(&spec, g, TRUNCATION).expect("invariance residual");
            if !inv.is_symmetry() {
                nonzero.push(format!("{key} X{i}"));
            }
            let nf = g.normal_form().expect("affine generator");
            for (which, name) in names.iter().enumerate() {
                checked += 1;
                let pg = perturbed(nf, which);
                let inv = invariance_residual(&spec, &pg, TRUNCATION).expect("invariance residual");
                if inv.is_symmetry() {
                    survivors.push(format!("{key} X{i} {name}"));
                }
            }
        }
    }
    let mut detail = format!("{checked} perturbations");
    if !nonzero.is_empty() {
        detail.push_str(&format!("; nonzero residual for {}", nonzero.join(", ")));
    }
    if !survivors.is_empty() {
        detail.push_str(&format!(
            "; {} perturbations remain symmetries since d/dx is one: {}",
            survivors.len(),
            survivors.join(", ")
        ));
    }
    Outcome::new(nonzero.is_empty() && survivors.is_empty(), detail)
}

fn reduction_generator(key: &str) -> (PdeSpec, Generator) {
    let rc = reduction_case(key).expect("listed key");
    let cl = classify_with(&rc.spec, TRUNCATION).expect("classifies");
    (rc.spec, cl.generators[rc.generator_index].clone())
}

fn criterion_3() -> Outcome {
    let expected: [(&str, Option<(&str, &str)>); 7] = [
        ("1", None),
        ("2.1", Some(("t*x^(1/(a-b))", "u*x^((b-2*a)/(a-b))"))),
        ("2.2", Some(("t*x^(1/a)", "u*x^(-2)"))),
        ("3.1", Some(("t*x^(2/(1-2*b))", "u*x^((2*b-2)/(1-2*b))"))),
        ("3.2", Some(("t*x^2", "u*x^(-2)"))),
        ("4.1", Some(("t*x^(3/(1-3*b))", "u*x^((3*b-2)/(1-3*b))"))),
        ("4.2", Some(("t*x^3", "u*x^(-2)"))),
    ];
    let mut bad = Vec::new();
    for (key, pair) in expected {
        let (_, g) = reduction_generator(key);
        let inv = characteristic_invariants(&g).expect("invariants");
        let ok = match pair {
            None => inv.translation_case,
            Some((r, z)) => !inv.translation_case && symbolic_eq(&inv.r(), &p(r)) && symbolic_eq(&inv.z(), &p(z)),
        };
        if !ok {
            bad.push(format!("{key}: r = {}, z = {}", inv.r(), inv.z()));
        }
    }
    Outcome::new(bad.is_empty(), if bad.is_empty() { "7 pairs".into() } else { bad.join("; ") })
}

fn printed(key: &str) -> Expr {
    let src = printed_form(key).expect("shipped form");
    let line = src
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .expect("one expression");
    p(line)
}

fn criterion_4() -> Outcome {
    let required: [(&str, &[&str]); 2] = [
        ("2.2", &["120*k*a^3", "4*a^3"]),
        ("4.2", &["120*k", "162*k", "1296*k", "486*k", "1152*k", "648*k", "81*k"]),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (key, coefficients) in required {
        let (spec, g) = reduction_generator(key);
        let red = reduce(&spec, &g).expect("reduces");
        let report = compare_reduced_forms(&red.reduced_ode, &printed(key)).expect("comparable");
        let present = coefficients
            .iter()
            .all(|c| report.terms.iter().any(|t| t.equal && symbolic_eq(&t.printed, &p(c))));
        let mism: Vec<String> = report
            .mismatches()
            .map(|t| format!("{}: {} vs {}", t.monomial, t.derived, t.printed))
            .collect();
        pass &= report.all_equal() && present;
        notes.push(format!(
            "{key}: {}/{} terms equal{}{}",
            report.terms.len() - mism.len(),
            report.terms.len(),
            if present { "" } else { ", listed coefficients missing" },
            if mism.is_empty() { String::new() } else { format!(" ({})", mism.join("; ")) }
        ));
    }
    Outcome::new(pass, notes.join("; "))
}

fn params() -> Bindings {
    BTreeMap::from([("a".into(), 0.25), ("b".into(), 0.3), ("k".into(), 0.7)])
}

fn seeded_points(n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..n)
        .map(|_| (rng.gen_range(0.5..=2.0), rng.gen_range(0.5..=2.0)))
        .collect()
}

fn criterion_5() -> Outcome {
    let points = seeded_points(20);
    let mut pass = true;
    let mut notes = Vec::new();
    for key in ["2.1", "3.1", "3.2", "4.1"] {
        let (spec, g) = reduction_generator(key);
        let red = reduce(&spec, &g).expect("reduces");
        let mut worst = 0.0f64;
        for j in 1..=3 {
            let h = Expr::powi(&Expr::sym("r"), j);
            let d = reduced_residual_identity_check(&spec, &red, &h, &points, &params()).expect("oracle evaluates");
            worst = worst.max(d);
        }
        pass &= worst <= 1e-8;
        let report = compare_reduced_forms(&red.reduced_ode, &printed(key)).expect("comparable");
        let mism: Vec<String> = report
            .mismatches()
            .map(|t| format!("{}: derived {} vs printed {}", t.monomial, t.derived, t.printed))
            .collect();
        notes.push(format!(
            "{key}: oracle {worst:.1e}, printed {}",
            if mism.is_empty() { "agrees".to_string() } else { format!("differs ({})", mism.join("; ")) }
        ));
    }
    Outcome::new(pass, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let points: Vec<(f64, f64)> = seeded_points(10);
    let mut pass = true;
    let mut notes = Vec::new();
    for (num, den) in [(1, 4), (1, 3), (1, 2), (3, 4)] {
        let alpha = Expr::rational(num, den);
        let kernel = kernel_solution(&alpha, &Expr::sym("kappa")).expect("kernel");
        let spec = PdeSpec::k23(alpha.clone(), CoeffForm::symbolic_constant()).expect("valid spec");
        let mut b = params();
        b.insert("kappa".into(), 0.7);
        let res = pde_residual_on_grid(&spec, &kernel.h, &points, &b).expect("grid residual");
        let worst = res.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ok = kernel.derivative.is_zero() && worst <= 1e-14;
        pass &= ok;
        notes.push(format!("{num}/{den}: symbolic {}, grid {worst:.1e}", kernel.derivative));
    }
    Outcome::new(pass, notes.join("; "))
}

fn gl_at_one(p: f64, alpha: f64, dt: f64) -> f64 {
    let steps = (1.0 / dt).round() as usize + 1;
    let grid = Grid::sample(0.0, 1.0, steps, |t| t.powf(p)).expect("grid");
    gl_rl_derivative(&grid, &FracConfig::new(alpha)).expect("GL derivative").last()
}

fn criterion_7() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for p in [1.0, 2.0, 3.0] {
        for alpha in [0.25, 0.5, 0.75] {
            let start = Instant::now();
            let exact = rl_power_rule(p, alpha, 1.0).expect("power rule");
            let rel = |dt: f64| ((gl_at_one(p, alpha, dt) - exact) / exact).abs();
            let fine = rel(1e-4);
            let ratio = rel(1e-3) / rel(5e-4);
            let elapsed = start.elapsed();
            let ok = fine <= 1e-3 && (1.7..=2.3).contains(&ratio) && elapsed < Duration::from_secs(5);
            pass &= ok;
            notes.push(format!("({p}, {alpha}): err {fine:.1e}, ratio {ratio:.3}, {elapsed:.2?}"));
        }
    }
    Outcome::new(pass, notes.join("; "))
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Expr {
    Expr::rational(rng.gen_range(lo..=hi), rng.gen_range(1..=9))
}

/// Order strictly inside (0, 1).
fn random_order(rng: &mut ChaCha8Rng) -> Expr {
    let den = rng.gen_range(2..=12);
    Expr::rational(rng.gen_range(1..den), den)
}

fn random_g(rng: &mut ChaCha8Rng) -> CoeffForm {
    let k = Expr::rational(rng.gen_range(1..=9), rng.gen_range(1..=9));
    let b = random_rational(rng, -9, 9);
    match rng.gen_range(0..6) {
        0 => Ok(CoeffForm::arbitrary()),
        1 => CoeffForm::constant(k),
        2 => CoeffForm::power(k, b),
        3 => CoeffForm::exponential(k, b),
        4 => CoeffForm::shifted_power23(k, b),
        _ => CoeffForm::quad_power13(k, b),
    }
    .expect("k is nonzero")
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => random_rational(rng, -5, 5),
            1 => Expr::sym("x"),
            2 => Expr::sym("y"),
            _ => Expr::sym("z"),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..6) {
        0 | 1 => a + random_expr(rng, depth - 1),
        2 | 3 => a * random_expr(rng, depth - 1),
        4 => Expr::powi(&a, rng.gen_range(-1..=2)),
        _ => Expr::exp(a * Expr::rational(1, 10)),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 * a.abs().max(b.abs()).max(1.0)
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();

    let mut universality = 0;
    for _ in 0..50 {
        let alpha = random_order(&mut rng);
        let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let zeta = if rng.gen_bool(0.5) { 1 } else { -1 };
        let spec = PdeSpec::new(alpha, m, n, zeta, random_g(&mut rng)).expect("valid spec");
        let inv = invariance_residual(&spec, &Generator::translation(), TRUNCATION).expect("residual");
        if inv.is_symmetry() {
            universality += 1;
        } else {
            failures.push(format!("translation fails for m={m}, n={n}, g={}", spec.g()));
        }
    }

    let mut cancellation = 0;
    for _ in 0..20 {
        let alpha = random_order(&mut rng);
        let c = random_rational(&mut rng, -9, 9);
        let u = Expr::sym("u");
        let g = Generator::new(Expr::zero(), Expr::zero(), c.clone() * u.clone());
        let Ok(g) = g else { continue };
        let eta = eta_alpha(&g, &alpha, TRUNCATION).expect("prolongation");
        let expected = c * Expr::frac(u, "t", alpha.clone());
        if symbolic_eq(&eta, &expected) {
            cancellation += 1;
        } else {
            failures.push(format!("c u prolongation at order {alpha}: {eta}"));
        }
    }

    let mut homogeneous = 0;
    for (key, spec, cl) in all_classifications() {
        for g in &cl.generators {
            if let Some(w) = g.weights() {
                if scaling_invariance_check(&spec, &w).unwrap_or(false) {
                    homogeneous += 1;
                } else {
                    failures.push(format!("{key}: {g} is not weight-homogeneous"));
                }
            }
        }
    }

    let mut idempotent = 0;
    let mut commuting = 0;
    for _ in 0..1000 {
        let depth = rng.gen_range(1..=6);
        let e = random_expr(&mut rng, depth);
        let Ok(s1) = simplify(&e) else { continue };
        match simplify(&s1) {
            Ok(s2) if s2 == s1 => idempotent += 1,
            _ => failures.push(format!("simplify not idempotent on {e}")),
        }
        let point: Bindings = BTreeMap::from([
            ("x".into(), rng.gen_range(0.5..2.0)),
            ("y".into(), rng.gen_range(0.5..2.0)),
            ("z".into(), rng.gen_range(0.5..2.0)),
        ]);
        let replacement = Expr::sym("y") + Expr::rational(1, 2);
        let subbed = substitute(&e, &BTreeMap::from([("x".to_string(), replacement)])).expect("substitution");
        let mut shifted = point.clone();
        shifted.insert("x".into(), point["y"] + 0.5);
        match (eval_numeric(&subbed, &point), eval_numeric(&e, &shifted)) {
            (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => {
                if close(a, b) {
                    commuting += 1;
                } else {
                    failures.push(format!("substitution changes the value of {e}: {a} vs {b}"));
                }
            }
            _ => {}
        }
    }

    let detail = format!(
        "translation {universality}/50, cancellation {cancellation}/20, homogeneous {homogeneous}, \
         idempotent {idempotent}, commuting {commuting}{}",
        if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
    );
    Outcome::new(failures.is_empty() && universality == 50 && cancellation == 20, detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("classification table", criterion_1),
        ("invariance and perturbations", criterion_2),
        ("similarity invariants", criterion_3),
        ("reduced equations, exact targets", criterion_4),
        ("reduced equations, oracle targets", criterion_5),
        ("kernel solution", criterion_6),
        ("Grünwald–Letnikov numerics", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let number = i + 1;
        let start = Instant::now();
        let outcome = run();
        let label = if outcome.pass { "PASS" } else { "FAIL" };
        let known = !outcome.pass && KNOWN_UNATTAINABLE.contains(&number);
        println!(
            "{label} criterion {number} ({name}){} [{:.2?}]: {}",
            if known { " [known unattainable]" } else { "" },
            start.elapsed(),
            outcome.detail
        );
        if !outcome.pass && !known {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
