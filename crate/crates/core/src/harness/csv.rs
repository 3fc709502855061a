//! CSV output: `snapshot,algorithm,mean_sinr_db,cum_update_fraction`.
//!
//! One row per (snapshot, algorithm), snapshots ascending and algorithms in
//! configuration order. Numbers use `%g`-style formatting with six
//! significant digits, so the bytes depend only on the values.

use std::fmt::Write as _;
use std::path::Path;

use super::runner::SinrCurve;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "snapshot,algorithm,mean_sinr_db,cum_update_fraction";

/// Formats like C's `%.6g`.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    const PRECISION: i32 = 6;
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders the curves as CSV text.
pub fn render_csv(curves: &[SinrCurve]) -> Result<String> {
    let n = curves
        .first()
        .map(SinrCurve::len)
        .ok_or_else(|| Error::Argument("no curves to write".into()))?;
    if curves
        .iter()
        .any(|c| c.len() != n || c.cum_update_fraction.len() != n)
    {
        return Err(Error::Argument("curves have different lengths".into()));
    }
    let mut out = String::with_capacity(48 * n * curves.len() + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..n {
        for c in curves {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                i + 1,
                c.label,
                format_sig6(c.mean_sinr_db[i]),
                format_sig6(c.cum_update_fraction[i])
            );
        }
    }
    Ok(out)
}

pub fn write_csv(curves: &[SinrCurve], path: &Path) -> Result<()> {
    let text = render_csv(curves)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
