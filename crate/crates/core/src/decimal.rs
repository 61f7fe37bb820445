use crate::error::{Error, Result};

/// Parses a plain decimal literal such as `0.35`, `-2`, or `.5`.
///
/// Exponents, `inf`, `nan` and hex forms are rejected.
pub fn parse_decimal(s: &str) -> Result<f64> {
    let t = s.trim();
    let digits = t.strip_prefix(['+', '-']).unwrap_or(t);
    let mut parts = digits.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    let ok = !digits.is_empty()
        && int.chars().all(|c| c.is_ascii_digit())
        && frac.is_none_or(|f| f.chars().all(|c| c.is_ascii_digit()))
        && (!int.is_empty() || frac.is_some_and(|f| !f.is_empty()));
    if !ok {
        return Err(Error::Invalid(format!("expected a decimal literal, got {s:?}")));
    }
    t.parse::<f64>().map_err(|e| Error::Invalid(format!("{s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_decimals_only() {
        assert_eq!(parse_decimal("0.35").unwrap(), 0.35);
        assert_eq!(parse_decimal("-2").unwrap(), -2.0);
        assert_eq!(parse_decimal(".5").unwrap(), 0.5);
        assert_eq!(parse_decimal("1.").unwrap(), 1.0);
        for bad in ["1e-3", "inf", "nan", "", ".", "0x10", "1.2.3", "--1", "1_000"] {
            assert!(parse_decimal(bad).is_err(), "{bad}");
        }
    }
}
