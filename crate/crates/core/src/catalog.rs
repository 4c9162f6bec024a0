//! Named equation instances: the nine classification cases and the seven
//! similarity reductions, addressable by key.

use crate::expr::Expr;
use crate::pde::{CoeffForm, PdeSpec};

/// A classification case. Case `3.1` covers three coefficient forms.
#[derive(Clone, Debug)]
pub struct ClassificationCase {
    pub key: &'static str,
    pub specs: Vec<PdeSpec>,
}

/// A similarity reduction: the equation and the index of the generator in
/// its classification (0 is the translation, 1 the scaling).
#[derive(Clone, Debug)]
pub struct ReductionCase {
    pub key: &'static str,
    pub spec: PdeSpec,
    pub generator_index: usize,
    /// Key of the classification case the generator comes from.
    pub classification_key: &'static str,
}

fn k() -> Expr {
    Expr::sym("k")
}

fn b() -> Expr {
    Expr::sym("b")
}

fn half() -> Expr {
    Expr::rational(1, 2)
}

fn third() -> Expr {
    Expr::rational(1, 3)
}

fn k23(alpha: Expr, g: CoeffForm) -> PdeSpec {
    PdeSpec::k23(alpha, g).expect("catalog entries are valid")
}

fn exponential() -> CoeffForm {
    CoeffForm::exponential(k(), b()).expect("k is nonzero")
}

pub const CLASSIFICATION_KEYS: [&str; 9] = ["1.1", "1.2", "1.3", "2.1", "2.2", "2.3", "3.1", "3.2", "3.3"];

pub const REDUCTION_KEYS: [&str; 7] = ["1", "2.1", "2.2", "3.1", "3.2", "4.1", "4.2"];

pub fn classification_case(key: &str) -> Option<ClassificationCase> {
    let generic = || Expr::sym("a");
    let power = CoeffForm::symbolic_power;
    let constant = CoeffForm::symbolic_constant;
    let (key, specs) = match key {
        "1.1" => ("1.1", vec![k23(generic(), CoeffForm::arbitrary())]),
        "1.2" => ("1.2", vec![k23(generic(), power())]),
        "1.3" => ("1.3", vec![k23(generic(), constant())]),
        "2.1" => ("2.1", vec![k23(half(), exponential())]),
        "2.2" => ("2.2", vec![k23(half(), power())]),
        "2.3" => ("2.3", vec![k23(half(), constant())]),
        "3.1" => (
            "3.1",
            vec![
                k23(third(), CoeffForm::shifted_power23(k(), b()).expect("k is nonzero")),
                k23(third(), CoeffForm::quad_power13(k(), b()).expect("k is nonzero")),
                k23(third(), exponential()),
            ],
        ),
        "3.2" => ("3.2", vec![k23(third(), power())]),
        "3.3" => ("3.3", vec![k23(third(), constant())]),
        _ => return None,
    };
    Some(ClassificationCase { key, specs })
}

pub fn classification_cases() -> Vec<ClassificationCase> {
    CLASSIFICATION_KEYS
        .iter()
        .map(|k| classification_case(k).expect("listed key"))
        .collect()
}

pub fn reduction_case(key: &str) -> Option<ReductionCase> {
    let generic = || Expr::sym("a");
    let power = CoeffForm::symbolic_power;
    let constant = CoeffForm::symbolic_constant;
    let (key, spec, generator_index, classification_key) = match key {
        "1" => ("1", k23(generic(), CoeffForm::arbitrary()), 0, "1.1"),
        "2.1" => ("2.1", k23(generic(), power()), 1, "1.2"),
        "2.2" => ("2.2", k23(generic(), constant()), 1, "1.3"),
        "3.1" => ("3.1", k23(half(), power()), 1, "2.2"),
        "3.2" => ("3.2", k23(half(), constant()), 1, "2.3"),
        "4.1" => ("4.1", k23(third(), power()), 1, "3.2"),
        "4.2" => ("4.2", k23(third(), constant()), 1, "3.3"),
        _ => return None,
    };
    Some(ReductionCase {
        key,
        spec,
        generator_index,
        classification_key,
    })
}

pub fn reduction_cases() -> Vec<ReductionCase> {
    REDUCTION_KEYS
        .iter()
        .map(|k| reduction_case(k).expect("listed key"))
        .collect()
}
