//! Coefficient tables for `tvhp coeffs`.

use serde::Serialize;
use tvhp_core::hermite::hermite_coeffs;

/// One coefficient of `H_{m,n}`: the term `(num/den) u^j v^k`.
///
/// Numerators and denominators are decimal strings; they outgrow 64 bits
/// quickly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoeffRow {
    pub j: u32,
    pub k: u32,
    pub numerator: String,
    pub denominator: String,
}

/// Rows of `H_{m,n}` in descending total degree.
pub fn coefficient_rows(m: u32, n: u32) -> Vec<CoeffRow> {
    hermite_coeffs(m, n)
        .terms()
        .rev()
        .map(|(&(j, k), c)| CoeffRow {
            j,
            k,
            numerator: c.re().numer().to_string(),
            denominator: c.re().denom().to_string(),
        })
        .collect()
}

pub fn to_text(rows: &[CoeffRow]) -> String {
    rows.iter()
        .map(|r| format!("{} {} {} {}\n", r.j, r.k, r.numerator, r.denominator))
        .collect()
}

pub fn to_csv(rows: &[CoeffRow]) -> String {
    let mut out = String::from("j,k,numerator,denominator\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.j, r.k, r.numerator, r.denominator));
    }
    out
}
