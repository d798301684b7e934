//! Number formatting shared by the CSV writers.

/// Formats `x` with 17 significant digits, in positional notation when the
/// exponent is moderate and scientific notation otherwise.
///
/// ```
/// assert_eq!(robnet::text::sig17(2.0 / 3.0), "0.66666666666666663");
/// assert_eq!(robnet::text::sig17(1.0), "1.0000000000000000");
/// assert_eq!(robnet::text::sig17(0.0), "0.0000000000000000");
/// ```
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..=16).contains(&exp) {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::with_capacity(24);
    if negative {
        out.push('-');
    }
    if exp >= 0 {
        let int_len = exp as usize + 1;
        out.push_str(&digits[..int_len]);
        out.push('.');
        if int_len < digits.len() {
            out.push_str(&digits[int_len..]);
        } else {
            out.push('0');
        }
    } else {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    }
    out
}
