//! Seeded property checks for prolongation and classification.

use kmn_core::catalog::{classification_cases, reduction_cases};
use kmn_core::expr::{symbolic_eq, Expr};
use kmn_core::parallel::Strategy;
use kmn_core::pde::{CoeffForm, Generator, PdeSpec};
use kmn_core::symmetry::{classify_all, classify_with, eta_alpha, invariance_residual, prolong};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(7)
}

fn order(rng: &mut ChaCha8Rng) -> Expr {
    let den = rng.gen_range(2..=12);
    Expr::rational(rng.gen_range(1..den), den)
}

fn coefficient(rng: &mut ChaCha8Rng) -> CoeffForm {
    let k = Expr::rational(rng.gen_range(1..=9), rng.gen_range(1..=9));
    let b = Expr::rational(rng.gen_range(-9..=9), rng.gen_range(1..=9));
    match rng.gen_range(0..6) {
        0 => Ok(CoeffForm::arbitrary()),
        1 => CoeffForm::constant(k),
        2 => CoeffForm::power(k, b),
        3 => CoeffForm::exponential(k, b),
        4 => CoeffForm::shifted_power23(k, b),
        _ => CoeffForm::quad_power13(k, b),
    }
    .unwrap()
}

#[test]
fn translation_is_universal() {
    let mut rng = rng();
    for _ in 0..50 {
        let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let zeta = if rng.gen_bool(0.5) { 1 } else { -1 };
        let spec = PdeSpec::new(order(&mut rng), m, n, zeta, coefficient(&mut rng)).unwrap();
        let inv = invariance_residual(&spec, &Generator::translation(), 5).unwrap();
        assert!(inv.is_symmetry(), "m={m} n={n} g={}", spec.g());
    }
}

#[test]
fn dependent_scaling_prolongs_without_remainder() {
    let mut rng = rng();
    let u = Expr::sym("u");
    for _ in 0..20 {
        let alpha = order(&mut rng);
        let c = Expr::rational(rng.gen_range(1..=9), rng.gen_range(1..=9));
        let g = Generator::new(Expr::zero(), Expr::zero(), c.clone() * u.clone()).unwrap();
        let eta = eta_alpha(&g, &alpha, 5).unwrap();
        assert!(symbolic_eq(&eta, &(c * Expr::frac(u.clone(), "t", alpha.clone()))), "{eta}");
    }
}

#[test]
fn truncation_does_not_change_the_classification() {
    for case in classification_cases() {
        for spec in &case.specs {
            let short = classify_with(spec, 1).unwrap();
            let long = classify_with(spec, 8).unwrap();
            assert_eq!(short.generators.len(), long.generators.len(), "{}", case.key);
            for (a, b) in short.generators.iter().zip(&long.generators) {
                assert!(a.same_ray(b), "{}: {a} vs {b}", case.key);
            }
        }
    }
}

#[test]
fn affine_series_terms_vanish_for_any_truncation() {
    let g = Generator::new(-Expr::sym("t"), Expr::sym("a") * Expr::sym("x"), Expr::int(2) * Expr::sym("a") * Expr::sym("u")).unwrap();
    for m in [1, 3, 8] {
        let p = prolong(&g, &Expr::sym("a"), m).unwrap();
        assert!(p.series_terms.is_empty(), "M = {m}");
    }
}

#[test]
fn parallel_and_sequential_classification_agree() {
    let specs: Vec<PdeSpec> = reduction_cases().into_iter().map(|c| c.spec).collect();
    let par = classify_all(&specs, Strategy::Parallel);
    let seq = classify_all(&specs, Strategy::Sequential);
    for (a, b) in par.iter().zip(&seq) {
        let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
        assert_eq!(a.generators, b.generators);
    }
}

#[test]
fn every_classified_generator_is_a_symmetry() {
    for case in classification_cases() {
        for spec in &case.specs {
            for g in classify_with(spec, 5).unwrap().generators {
                assert!(invariance_residual(spec, &g, 5).unwrap().is_symmetry(), "{}: {g}", case.key);
            }
        }
    }
}
