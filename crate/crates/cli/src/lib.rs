//! Library side of the `tvhp` command: the identity registry, report
//! types and the parsers shared with the binary.

pub mod registry;
pub mod report;
pub mod table;

pub use registry::{verify_all, verify_one, BatchSettings, Case, IdentityId, RunStatus};
pub use report::{Measure, Verdict, VerificationReport, REPORT_SCHEMA, SCHEMA_VERSION};

use num_complex::Complex64;

/// Parses `RE,IM` or a bare `RE`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("invalid number '{}'", p.trim()));
    let z = match s.split_once(',') {
        Some((re, im)) => Complex64::new(num(re)?, num(im)?),
        None => Complex64::new(num(s)?, 0.0),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(z)
}
