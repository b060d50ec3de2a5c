//! Solver and verification tools for scalar conservation laws whose flux
//! jumps from `g` to `f` across `x = 0`.

pub mod acceptance;
pub mod diagnostics;
pub mod driver;
pub mod flux;
pub mod godunov;
pub mod hj;
pub mod interface;
pub mod lax_oleinik;
pub mod numeric;
pub mod paths;
pub mod scenarios;

/// Comma-joined floats with 17 significant digits.
pub fn fmt_row(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}
