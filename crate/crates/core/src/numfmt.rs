//! Fixed 17-significant-digit decimal formatting, lossless for `f64`.

/// Format `x` with exactly 17 significant digits. Values whose decimal
/// exponent lies in `-5..=16` are written positionally, others in
/// scientific notation. Parsing the output recovers `x` bit-for-bit.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-5..=16).contains(&exp) {
        return format!("{sign}{mantissa}e{exp}");
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    } else {
        let split = exp as usize + 1;
        let (int, frac) = digits.split_at(split);
        let frac = if frac.is_empty() { "0" } else { frac };
        format!("{sign}{int}.{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(sig17(std::f64::consts::FRAC_PI_2), "1.5707963267948966");
        assert_eq!(sig17(0.0), "0.0000000000000000");
        assert_eq!(sig17(-0.3), "-0.29999999999999999");
        assert_eq!(sig17(1e-7), "9.9999999999999995e-8");
        assert_eq!(sig17(1e-3), "0.0010000000000000000");
        assert_eq!(sig17(2.0), "2.0000000000000000");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = sig17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
