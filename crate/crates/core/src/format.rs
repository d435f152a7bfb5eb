//! Text formatting shared by the report writers.

/// Nine significant digits. Fixed notation for moderate magnitudes,
/// scientific otherwise; non-finite values as `nan`, `inf`, `-inf`.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.00000000".into();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..9).contains(&exp) {
        format!("{:.*}", (8 - exp) as usize, x)
    } else {
        sci
    }
}

/// Rounds to nine significant digits, for numbers emitted in JSON.
pub fn round9(x: f64) -> f64 {
    if x.is_finite() {
        sig9(x).parse().unwrap_or(x)
    } else {
        x
    }
}
