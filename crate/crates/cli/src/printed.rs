//! Reference reduced equations shipped with the crate, keyed by reduction
//! case. Each file holds one expression in the parser grammar.

const FORMS: [(&str, &str); 7] = [
    ("1", include_str!("../data/printed/1.expr")),
    ("2.1", include_str!("../data/printed/2.1.expr")),
    ("2.2", include_str!("../data/printed/2.2.expr")),
    ("3.1", include_str!("../data/printed/3.1.expr")),
    ("3.2", include_str!("../data/printed/3.2.expr")),
    ("4.1", include_str!("../data/printed/4.1.expr")),
    ("4.2", include_str!("../data/printed/4.2.expr")),
];

/// Source text of the reference form for a reduction case.
pub fn printed_form(key: &str) -> Option<&'static str> {
    FORMS.iter().find(|(k, _)| *k == key).map(|(_, src)| *src)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_lines;

    #[test]
    fn every_form_parses_to_one_expression() {
        for key in kmn_core::catalog::REDUCTION_KEYS {
            let src = printed_form(key).unwrap();
            let exprs = parse_lines(src).unwrap();
            assert_eq!(exprs.len(), 1, "{key}");
            assert_eq!(exprs[0].frac_nodes().len(), 1, "{key}");
        }
    }
}
