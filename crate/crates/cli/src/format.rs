/// 17 significant digits in scientific notation; parses back to the same
/// bits. Non-finite values print as `NaN`, `inf`, `-inf`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_bits() {
        for x in [0.0, -0.0, 1.0 / 3.0, 1e-300, 5e-324, f64::MAX, -2.5e17, std::f64::consts::PI] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
        assert!(fmt_f64(f64::NAN).parse::<f64>().unwrap().is_nan());
        assert_eq!(fmt_f64(f64::INFINITY).parse::<f64>().unwrap(), f64::INFINITY);
    }
}
