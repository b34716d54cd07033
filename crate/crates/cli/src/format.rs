//! Locale-independent number formatting and parsing for CSV output and flags.

/// Renders `x` with 12 significant digits, in plain decimal when the decimal
/// exponent lies in `[-5, 12)` and in `1.5e-7` style otherwise. Infinities
/// print as `inf` / `-inf`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Parses a searcher count such as `10000` or `1e4`. The mantissa must be an
/// integer; the result must fit in `u64`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let bad = || format!("`{s}` is not an integer count (use digits, optionally with an exponent such as 1e6)");
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.strip_prefix('+').unwrap_or(e)),
        None => (s, "0"),
    };
    if mantissa.is_empty() || !mantissa.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if exp.is_empty() || !exp.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let base: u64 = mantissa.parse().map_err(|_| format!("`{s}` is too large"))?;
    let exp: u32 = exp.parse().map_err(|_| format!("`{s}` is too large"))?;
    10u64
        .checked_pow(exp)
        .and_then(|p| base.checked_mul(p))
        .ok_or_else(|| format!("`{s}` is too large"))
}

/// Comma-separated list of counts.
pub fn parse_count_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',').map(parse_count).collect()
}
