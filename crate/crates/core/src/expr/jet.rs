use super::{Expr, ExprError};

/// Jet-space coordinates: independent variables, one dependent variable and
/// its partial derivatives named `u_x`, `u_xt`, `u_xxx`, ...
///
/// Derivative indices are written in the order of `independents`, so with
/// `[x, t]` the mixed derivative is `u_xt`, never `u_tx`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetContext {
    independents: Vec<String>,
    dependent: String,
    max_order: usize,
}

impl JetContext {
    pub fn new(independents: &[&str], dependent: &str, max_order: usize) -> Result<Self, ExprError> {
        if independents.contains(&dependent) {
            return Err(ExprError::Unsupported(format!(
                "dependent variable `{dependent}` is also independent"
            )));
        }
        if independents.iter().any(|v| v.chars().count() != 1) {
            return Err(ExprError::Unsupported(
                "jet independents must be single characters".into(),
            ));
        }
        Ok(JetContext {
            independents: independents.iter().map(|s| s.to_string()).collect(),
            dependent: dependent.to_string(),
            max_order,
        })
    }

    /// `(x, t; u)` up to third order, as needed for the K(m,n) family.
    pub fn kmn() -> Self {
        JetContext::new(&["x", "t"], "u", 3).expect("valid context")
    }

    pub fn independents(&self) -> &[String] {
        &self.independents
    }

    pub fn dependent(&self) -> &str {
        &self.dependent
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Multi-index counts (one per independent) of a jet symbol name, or
    /// `None` if `name` is not a jet coordinate. `u` itself has all zeros.
    pub fn parse_jet(&self, name: &str) -> Option<Vec<usize>> {
        if name == self.dependent {
            return Some(vec![0; self.independents.len()]);
        }
        let rest = name.strip_prefix(&self.dependent)?.strip_prefix('_')?;
        if rest.is_empty() {
            return None;
        }
        let mut counts = vec![0; self.independents.len()];
        let mut last = 0;
        for ch in rest.chars() {
            let idx = self
                .independents
                .iter()
                .position(|v| v.starts_with(ch))?;
            if idx < last {
                return None;
            }
            last = idx;
            counts[idx] += 1;
        }
        Some(counts)
    }

    pub fn jet_name(&self, counts: &[usize]) -> String {
        if counts.iter().all(|c| *c == 0) {
            return self.dependent.clone();
        }
        let mut s = format!("{}_", self.dependent);
        for (v, c) in self.independents.iter().zip(counts) {
            for _ in 0..*c {
                s.push_str(v);
            }
        }
        s
    }

    pub fn is_jet(&self, name: &str) -> bool {
        self.parse_jet(name).is_some()
    }

    pub fn u(&self) -> Expr {
        Expr::sym(&self.dependent)
    }

    /// Jet symbol for the derivative along `vars` (any order).
    pub fn jet(&self, vars: &[&str]) -> Expr {
        let mut counts = vec![0; self.independents.len()];
        for v in vars {
            let idx = self
                .independents
                .iter()
                .position(|i| i == v)
                .expect("unknown independent variable");
            counts[idx] += 1;
        }
        Expr::sym(&self.jet_name(&counts))
    }

    /// Name of the jet obtained by differentiating `name` once more in `var`.
    pub fn raise(&self, name: &str, var: &str) -> Option<String> {
        let mut counts = self.parse_jet(name)?;
        let idx = self.independents.iter().position(|v| v == var)?;
        counts[idx] += 1;
        Some(self.jet_name(&counts))
    }
}
