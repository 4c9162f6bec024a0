//! Every catalog reduction satisfies `residual(x^p h(t x^q)) = x^s R(r)`
//! for explicit power-sum profiles.

use std::collections::BTreeMap;

use kmn_core::catalog::reduction_cases;
use kmn_core::expr::{Bindings, Expr};
use kmn_core::numerics::fode_residual_on_grid;
use kmn_core::reduction::{reduce, reduced_residual_identity_check};
use kmn_core::symmetry::classify;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> Bindings {
    BTreeMap::from([("a".into(), 0.25), ("b".into(), 0.3), ("k".into(), 0.7)])
}

#[test]
fn reductions_pass_the_identity_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let points: Vec<(f64, f64)> = (0..20).map(|_| (rng.gen_range(0.5..=2.0), rng.gen_range(0.5..=2.0))).collect();
    let r = Expr::sym("r");
    let profiles = [
        r.clone(),
        Expr::powi(&r, 2) + Expr::rational(1, 3) * r.clone(),
        Expr::pow(r.clone(), Expr::rational(3, 2)),
    ];
    for case in reduction_cases() {
        let cl = classify(&case.spec).unwrap();
        let red = reduce(&case.spec, &cl.generators[case.generator_index]).unwrap();
        for h in &profiles {
            let d = reduced_residual_identity_check(&case.spec, &red, h, &points, &params()).unwrap();
            assert!(d <= 1e-8, "case {}: h = {h}, deviation {d}", case.key);
        }
    }
}

#[test]
fn reduced_equations_are_free_of_x_and_t() {
    for case in reduction_cases() {
        let cl = classify(&case.spec).unwrap();
        let red = reduce(&case.spec, &cl.generators[case.generator_index]).unwrap();
        let free = red.reduced_ode.free_symbols();
        assert!(!free.iter().any(|s| &**s == "x" || &**s == "t"), "case {}", case.key);
    }
}

#[test]
fn translation_reduction_kernel_solves_the_reduced_equation() {
    let case = reduction_cases().into_iter().find(|c| c.key == "1").unwrap();
    let cl = classify(&case.spec).unwrap();
    let red = reduce(&case.spec, &cl.generators[0]).unwrap();
    let a = Expr::sym("a");
    let h = Expr::pow(Expr::sym("r"), a.clone() - Expr::one()) * Expr::recip(&Expr::gamma(a));
    let res = fode_residual_on_grid(&red.reduced_ode, &h, &[0.5, 1.0, 1.5], &params()).unwrap();
    assert!(res.iter().all(|v| v.abs() < 1e-14), "{res:?}");
}
