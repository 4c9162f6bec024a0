//! The classify / reduce / verify / frac-deriv workflows.

use kmn_core::catalog::{classification_case, reduction_case};
use kmn_core::expr::{eval_numeric, Bindings, Expr};
use kmn_core::numerics::{eval_fractional, gl_rl_derivative_at, pde_residual_on_grid, Tolerance};
use kmn_core::pde::{scaling_invariance_check, term_weights, Generator, PdeSpec};
use kmn_core::reduction::{
    compare_reduced_forms, kernel_solution, reduce, reduced_residual_identity_check, ComparisonReport,
    SimilarityReduction,
};
use kmn_core::symmetry::{classify_with, invariance_residual, SymmetryError};
use thiserror::Error;

use crate::config::{ConfigError, SessionConfig};
use crate::parse::{parse_expression, parse_lines, ParseError};
use crate::printed::printed_form;
use crate::report::{CheckRecord, GeneratorDoc, InvariantsDoc, ReportDoc, Status};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{field}: {source}")]
    Parse { field: String, source: ParseError },
    #[error("unknown {kind} case `{key}`")]
    UnknownCase { kind: &'static str, key: String },
    #[error("{0}")]
    Engine(String),
}

fn engine(e: impl std::fmt::Display) -> CliError {
    CliError::Engine(e.to_string())
}

fn excerpt(e: &Expr) -> String {
    let s = e.to_string();
    if s.chars().count() <= 240 {
        s
    } else {
        let head: String = s.chars().take(240).collect();
        format!("{head} ...")
    }
}

fn generator_doc(g: &Generator) -> GeneratorDoc {
    GeneratorDoc {
        xi_t: g.xi_t().to_string(),
        xi_x: g.xi_x().to_string(),
        eta: g.eta().to_string(),
    }
}

fn invariance_check(name: String, spec: &PdeSpec, g: &Generator, truncation: usize) -> Result<CheckRecord, CliError> {
    let inv = invariance_residual(spec, g, truncation).map_err(engine)?;
    Ok(if inv.is_symmetry() {
        CheckRecord::new(name, Status::Pass, "residual is identically zero")
    } else {
        let mut detail = format!("residual {}", excerpt(&inv.residual));
        if !inv.lower_terminal.is_zero() {
            detail.push_str(&format!("; xi_t = {} at t = 0 moves the lower terminal", inv.lower_terminal));
        }
        if !inv.obstructions.is_empty() {
            let nodes: Vec<String> = inv.obstructions.iter().map(|(n, _)| n.to_string()).collect();
            detail.push_str(&format!("; series obstructions: {}", nodes.join(", ")));
        }
        CheckRecord::new(name, Status::Fail, detail)
    })
}

fn weight_check(name: String, spec: &PdeSpec, g: &Generator) -> Option<CheckRecord> {
    let w = g.weights()?;
    let table = term_weights(spec, &w).ok()?;
    let ok = scaling_invariance_check(spec, &w).ok()?;
    let detail = format!("time {}, advection {}, dispersion {}", table[0], table[1], table[2]);
    Some(CheckRecord::new(name, if ok { Status::Pass } else { Status::Fail }, detail))
}

fn specs_for_classify(cfg: &SessionConfig) -> Result<(String, Vec<PdeSpec>), CliError> {
    match &cfg.case {
        Some(key) => {
            let case = classification_case(key).ok_or_else(|| CliError::UnknownCase {
                kind: "classification",
                key: key.clone(),
            })?;
            Ok((case.key.to_string(), case.specs))
        }
        None => Ok(("custom".to_string(), vec![cfg.spec()?])),
    }
}

/// Classifies the configured equation(s) and verifies every generator.
pub fn run_classify(cfg: &SessionConfig) -> Result<ReportDoc, CliError> {
    let (key, specs) = specs_for_classify(cfg)?;
    let mut doc = ReportDoc::new(key, cfg.echo());
    for spec in &specs {
        let label = format!("g = {}", spec.g());
        match classify_with(spec, cfg.truncation) {
            Ok(cl) => {
                for (i, g) in cl.generators.iter().enumerate() {
                    let gd = generator_doc(g);
                    if !doc.generators.contains(&gd) {
                        doc.generators.push(gd);
                    }
                    doc.checks
                        .push(invariance_check(format!("invariance X{i} ({label})"), spec, g, cfg.truncation)?);
                    if let Some(c) = weight_check(format!("weights X{i} ({label})"), spec, g) {
                        doc.checks.push(c);
                    }
                }
                if cl.verification_only {
                    doc.checks.push(CheckRecord::new(
                        format!("catalog ({label})"),
                        Status::Pass,
                        "verified translation; no determining system is solved for this form",
                    ));
                }
            }
            Err(e @ (SymmetryError::OutsideCatalog(_) | SymmetryError::UnsupportedAnsatz(_))) => {
                doc.checks.push(CheckRecord::new(format!("catalog ({label})"), Status::Fail, e.to_string()));
            }
            Err(e) => return Err(engine(e)),
        }
    }
    Ok(doc)
}

fn oracle_checks(
    doc: &mut ReportDoc,
    label: &str,
    spec: &PdeSpec,
    red: &SimilarityReduction,
    cfg: &SessionConfig,
) -> Result<Option<f64>, CliError> {
    let params = cfg.params()?;
    let points = cfg.sample_points();
    let r = Expr::sym("r");
    let mut worst: Option<f64> = Some(0.0);
    for j in 1..=3 {
        let h = Expr::powi(&r, j);
        match reduced_residual_identity_check(spec, red, &h, &points, &params) {
            Ok(dev) => {
                worst = worst.map(|w| w.max(dev));
                if !label.is_empty() {
                    let status = if dev <= cfg.tol_rel { Status::Pass } else { Status::Fail };
                    doc.checks.push(
                        CheckRecord::new(format!("{label} h = {h}"), status, format!("{} points", points.len()))
                            .with_deviation(dev),
                    );
                }
            }
            Err(e) => {
                if label.is_empty() {
                    return Ok(None);
                }
                doc.checks.push(CheckRecord::new(format!("{label} h = {h}"), Status::Fail, e.to_string()));
                worst = None;
            }
        }
    }
    Ok(worst)
}

fn comparison_detail(report: &ComparisonReport) -> String {
    report
        .mismatches()
        .map(|t| format!("{}: derived {} vs printed {}", t.monomial, t.derived, t.printed))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Reduces the configured equation by one of its generators.
pub fn run_reduce(cfg: &SessionConfig, generator_index: Option<usize>) -> Result<ReportDoc, CliError> {
    let (key, spec, default_index) = match &cfg.case {
        Some(key) => {
            let rc = reduction_case(key).ok_or_else(|| CliError::UnknownCase {
                kind: "reduction",
                key: key.clone(),
            })?;
            (rc.key.to_string(), rc.spec, Some(rc.generator_index))
        }
        None => ("custom".to_string(), cfg.spec()?, None),
    };
    let mut doc = ReportDoc::new(key.clone(), cfg.echo());
    let cl = classify_with(&spec, cfg.truncation).map_err(engine)?;
    let index = generator_index
        .or(default_index)
        .unwrap_or(cl.generators.len().saturating_sub(1));
    let gen = cl.generators.get(index).ok_or_else(|| {
        CliError::Engine(format!(
            "generator {index} does not exist; the classification has {}",
            cl.generators.len()
        ))
    })?;
    doc.generators.push(generator_doc(gen));
    let red = match reduce(&spec, gen) {
        Ok(r) => r,
        Err(e) => {
            doc.checks.push(CheckRecord::new("reduction", Status::Fail, e.to_string()));
            return Ok(doc);
        }
    };
    let inv = &red.invariants;
    doc.invariants = Some(if inv.translation_case {
        InvariantsDoc {
            r: "t".into(),
            z: "u".into(),
        }
    } else {
        InvariantsDoc {
            r: inv.r().to_string(),
            z: inv.z().to_string(),
        }
    });
    doc.reduced_ode = Some(red.reduced_ode.to_string());

    if inv.translation_case {
        let kernel = kernel_solution(spec.alpha(), &Expr::sym("kappa")).map_err(engine)?;
        let status = if kernel.derivative.is_zero() { Status::Pass } else { Status::Fail };
        doc.checks.push(CheckRecord::new(
            "kernel solution",
            status,
            format!("h(r) = {}", kmn_core::expr::substitute(&kernel.h, &[("t".to_string(), Expr::sym("r"))].into()).map_err(engine)?),
        ));
    }

    let derived_dev = oracle_checks(&mut doc, "oracle derived", &spec, &red, cfg)?;
    if let Some(src) = printed_form(&key) {
        let printed = parse_lines(src)
            .map_err(|(line, source)| CliError::Parse {
                field: format!("printed form {key}, line {line}"),
                source,
            })?
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Engine(format!("printed form {key} is empty")))?;
        let report = compare_reduced_forms(&red.reduced_ode, &printed).map_err(engine)?;
        if report.all_equal() {
            doc.checks.push(CheckRecord::new(
                "printed form",
                Status::Pass,
                format!("{} coefficients equal after scaling to {}", report.terms.len(), report.normalization),
            ));
        } else {
            let normalized = SimilarityReduction {
                reduced_ode: printed.clone() * Expr::recip(&report.normalization),
                ..red.clone()
            };
            let printed_dev = oracle_checks(&mut doc, "", &spec, &normalized, cfg)?;
            let verdict = match (derived_dev, printed_dev) {
                (Some(d), Some(p)) => format!("oracle deviation derived {d:.3e}, printed {p:.3e}"),
                (Some(d), None) => format!("oracle deviation derived {d:.3e}, printed not evaluable"),
                _ => "oracle inconclusive".to_string(),
            };
            let derived_ok = derived_dev.is_some_and(|d| d <= cfg.tol_rel);
            let mut rec = CheckRecord::new(
                "printed form",
                if derived_ok { Status::MismatchAdjudicated } else { Status::Fail },
                format!("{}; {verdict}", comparison_detail(&report)),
            );
            if let Some(p) = printed_dev {
                rec = rec.with_deviation(p);
            }
            doc.checks.push(rec);
        }
    }
    Ok(doc)
}

/// Checks a user-supplied generator against the configured equation.
pub fn run_verify(cfg: &SessionConfig, triple: [&str; 3]) -> Result<ReportDoc, CliError> {
    let names = ["xi_t", "xi_x", "eta"];
    let mut parts = Vec::with_capacity(3);
    for (field, src) in names.iter().zip(triple) {
        parts.push(parse_expression(src).map_err(|source| CliError::Parse {
            field: field.to_string(),
            source,
        })?);
    }
    let (key, spec) = match &cfg.case {
        Some(key) => {
            let case = classification_case(key).ok_or_else(|| CliError::UnknownCase {
                kind: "classification",
                key: key.clone(),
            })?;
            (case.key.to_string(), case.specs[0].clone())
        }
        None => ("custom".to_string(), cfg.spec()?),
    };
    let gen = Generator::new(parts[0].clone(), parts[1].clone(), parts[2].clone()).map_err(engine)?;
    let mut doc = ReportDoc::new(key, cfg.echo());
    doc.generators.push(generator_doc(&gen));
    doc.checks.push(invariance_check("invariance".into(), &spec, &gen, cfg.truncation)?);
    if let Some(c) = weight_check("weights".into(), &spec, &gen) {
        doc.checks.push(c);
    }
    Ok(doc)
}

/// Power-rule and Grünwald–Letnikov values of `D^a_t expr` at `t = at`.
pub fn run_fracderiv(cfg: &SessionConfig, expr: &str, at: f64, dt: f64) -> Result<ReportDoc, CliError> {
    let e = parse_expression(expr).map_err(|source| CliError::Parse {
        field: "expr".into(),
        source,
    })?;
    let alpha = cfg.alpha_value()?;
    let mut bindings: Bindings = cfg.params()?;
    bindings.insert("a".into(), alpha);
    bindings.insert("t".into(), at);
    let mut doc = ReportDoc::new("frac-deriv", cfg.echo());
    let node = Expr::frac(e.clone(), "t", Expr::sym("a"));
    let exact = match eval_fractional(&node, &bindings) {
        Ok(v) => v,
        Err(err) => {
            doc.checks.push(CheckRecord::new("power rule", Status::Fail, err.to_string()));
            return Ok(doc);
        }
    };
    doc.checks.push(CheckRecord::new("power rule", Status::Pass, format!("value {exact:.12}")));
    let f = |t: f64| {
        let mut b = bindings.clone();
        b.insert("t".into(), t);
        eval_numeric(&e, &b).unwrap_or(f64::NAN)
    };
    match gl_rl_derivative_at(f, alpha, at, dt) {
        Ok(gl) if gl.is_finite() => {
            let tol = Tolerance {
                rel: 1e-3,
                abs: 1e-3,
                floor: 1e-6,
            };
            let dev = tol.deviation(gl, exact);
            let status = if tol.accepts(gl, exact) { Status::Pass } else { Status::Fail };
            doc.checks.push(
                CheckRecord::new("grunwald-letnikov", status, format!("value {gl:.12}, step {dt:e}"))
                    .with_deviation(dev),
            );
        }
        Ok(_) => doc.checks.push(CheckRecord::new(
            "grunwald-letnikov",
            Status::Pass,
            "not applicable: the profile is singular at the lower terminal",
        )),
        Err(err) => doc.checks.push(CheckRecord::new("grunwald-letnikov", Status::Fail, err.to_string())),
    }
    Ok(doc)
}

/// Residual of the equation for an explicit `u(x, t)` at the seeded points.
pub fn pde_check(cfg: &SessionConfig, spec: &PdeSpec, u: &Expr) -> Result<Vec<f64>, CliError> {
    pde_residual_on_grid(spec, u, &cfg.sample_points(), &cfg.params()?).map_err(engine)
}
