//! One module per experiment family.

pub mod bayes;
pub mod games;
pub mod learn;
pub mod plan;
pub mod rules;
pub mod seqdec;
pub mod uncertain;

use mtl_core::{builtin, format_significant};

use crate::Table;

pub fn builtins() -> Table {
    let mut table = Table::new(&["kind", "name"]);
    for (kind, name) in builtin::catalog() {
        table.push(vec![kind.into(), name.into()]);
    }
    table
}

/// Numbers joined by spaces at the usual precision.
pub(crate) fn join_numbers(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format_significant(*v))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Comma-separated numbers such as `0.5,0.5`.
pub(crate) fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
        .collect()
}
