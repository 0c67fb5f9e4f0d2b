//! Fixed number formatting for byte-stable output.

/// Values whose magnitude is below this print as `0`.
const ZERO_CUTOFF: f64 = 1e-12;

/// Rounds to 12 significant digits and prints the shortest form of the
/// rounded value. Exponent notation outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < ZERO_CUTOFF {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Residuals keep their raw magnitude: `0.0e0`, `3.1e-16`.
pub fn residual(x: f64) -> String {
    format!("{x:.1e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(num(-1.0000000000000002), "-1");
        assert_eq!(num(2.220446049250313e-16), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(num(1.23456789e-7), "1.23456789e-7");
        assert_eq!(num(2e20), "2e20");
        assert_eq!(residual(0.0), "0.0e0");
        assert_eq!(residual(3.14e-16), "3.1e-16");
    }
}
