//! Exact fixed-point arithmetic on arbitrary-precision decimals.
//!
//! A [`PackedNumber`] is a value S + W/Q with Q = 10^f: an integer part and a
//! fraction field of exactly `f` decimal digits. Addition is exact;
//! multiplication truncates the product below the fraction field, so
//! `x.mul(&y)` computes floor(x*y*Q)/Q. Floor and modulo by powers of ten are
//! digit slices and never round. These are the only operations the packing
//! engines need, and all of them keep the operands' scale explicit: mixing
//! scales is an error, not a coercion.

mod biguint;

pub use biguint::{BigUint, LIMB_DIGITS, LIMB_RADIX};

use std::fmt;

/// Errors from packed fixed-point construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApfixedError {
    /// Two operands carry different fraction widths.
    ScaleMismatch { left: u32, right: u32 },
    /// A fraction field holds a value not below 10^f.
    FractionTooWide { digits: u64, scale: u32 },
    /// Modulo by zero.
    ZeroModulus,
    /// Rescaling to fewer fraction digits would drop information.
    CannotNarrow { from: u32, to: u32 },
    /// A decimal string did not match `digits[.digits]`.
    Parse { input: String },
}

impl fmt::Display for ApfixedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApfixedError::ScaleMismatch { left, right } => {
                write!(f, "fraction scales differ: {left} vs {right}")
            }
            ApfixedError::FractionTooWide { digits, scale } => {
                write!(f, "fraction field has {digits} digits, scale allows {scale}")
            }
            ApfixedError::ZeroModulus => write!(f, "modulo by zero"),
            ApfixedError::CannotNarrow { from, to } => {
                write!(f, "cannot narrow scale from {from} to {to} fraction digits")
            }
            ApfixedError::Parse { input } => write!(f, "not a decimal number: {input:?}"),
        }
    }
}

impl std::error::Error for ApfixedError {}

/// A nonnegative fixed-point decimal: integer part `s` plus fraction `w/10^f`.
///
/// The fraction field always satisfies `w < 10^f`. Operations require both
/// operands to share the same `f`; use [`PackedNumber::widen`] to move a value
/// to a larger scale first.
#[derive(Clone, PartialEq, Eq)]
pub struct PackedNumber {
    s: BigUint,
    w: BigUint,
    f: u32,
}

impl PackedNumber {
    /// Build from integer part and fraction field. Fails if `w >= 10^f`.
    pub fn new(s: BigUint, w: BigUint, f: u32) -> Result<Self, ApfixedError> {
        if w >= BigUint::pow10(f) {
            return Err(ApfixedError::FractionTooWide { digits: w.decimal_digits(), scale: f });
        }
        Ok(PackedNumber { s, w, f })
    }

    /// Zero at scale `f`.
    pub fn zero(f: u32) -> Self {
        PackedNumber { s: BigUint::zero(), w: BigUint::zero(), f }
    }

    /// An integer at scale `f` (fraction field zero).
    pub fn from_int(s: BigUint, f: u32) -> Self {
        PackedNumber { s, w: BigUint::zero(), f }
    }

    /// An integer at scale `f`, from a machine word.
    pub fn from_u64(v: u64, f: u32) -> Self {
        Self::from_int(BigUint::from_u64(v), f)
    }

    /// Reinterpret `z` as a value scaled by 10^f: the result is z / 10^f.
    pub fn from_scaled(z: BigUint, f: u32) -> Self {
        let (s, w) = z.div_rem_pow10(f);
        PackedNumber { s, w, f }
    }

    /// Integer part S.
    pub fn int_part(&self) -> &BigUint {
        &self.s
    }

    /// Fraction field W (the value is S + W/10^f).
    pub fn frac_part(&self) -> &BigUint {
        &self.w
    }

    /// Fraction width f.
    pub fn scale(&self) -> u32 {
        self.f
    }

    /// The value multiplied by 10^f, as one integer: S * 10^f + W.
    pub fn scaled(&self) -> BigUint {
        self.s.mul_pow10(self.f).add(&self.w)
    }

    /// Total decimal digits the representation occupies: digits(S) + f.
    pub fn digit_footprint(&self) -> u64 {
        self.s.decimal_digits() + self.f as u64
    }

    fn check_scale(&self, other: &Self) -> Result<(), ApfixedError> {
        if self.f == other.f {
            Ok(())
        } else {
            Err(ApfixedError::ScaleMismatch { left: self.f, right: other.f })
        }
    }

    /// Exact sum. Fraction fields add with a single carry into the integer part.
    pub fn add(&self, other: &Self) -> Result<Self, ApfixedError> {
        self.check_scale(other)?;
        let mut w = self.w.add(&other.w);
        let mut s = self.s.add(&other.s);
        let radix = BigUint::pow10(self.f);
        if w >= radix {
            w = w.checked_sub(&radix).expect("carry below radix");
            s = s.add(&BigUint::one());
        }
        Ok(PackedNumber { s, w, f: self.f })
    }

    /// Truncating product: floor(x * y * 10^f) / 10^f.
    ///
    /// Computed from the cross products S1*S2*Q^2 + (S1*W2 + S2*W1)*Q + W1*W2
    /// so integer-only operands never materialize their fraction padding.
    pub fn mul(&self, other: &Self) -> Result<Self, ApfixedError> {
        self.check_scale(other)?;
        let f = self.f;
        let ss = self.s.mul(&other.s);
        let cross = self.s.mul(&other.w).add(&self.w.mul(&other.s));
        let ww = self.w.mul(&other.w);
        // z = x * y * Q^2 exactly; dividing by Q once truncates to scale f.
        let z = ss.mul_pow10(2 * f).add(&cross.mul_pow10(f)).add(&ww);
        let (kept, _) = z.div_rem_pow10(f);
        Ok(Self::from_scaled(kept, f))
    }

    /// Floor: the integer part, exactly. The fraction digits are discarded.
    pub fn floor(&self) -> BigUint {
        self.s.clone()
    }

    /// Remainder modulo another packed value: x - floor(x/y) * y, carried out
    /// on the scaled integers so the result is exact at scale f.
    pub fn mod_general(&self, modulus: &Self) -> Result<Self, ApfixedError> {
        self.check_scale(modulus)?;
        let m = modulus.scaled();
        if m.is_zero() {
            return Err(ApfixedError::ZeroModulus);
        }
        let r = self.scaled().checked_rem(&m).expect("nonzero modulus");
        Ok(Self::from_scaled(r, self.f))
    }

    /// Multiply by 10^k (k may be negative), truncating digits that fall below
    /// the fraction field. The scale f is unchanged.
    pub fn shift_pow10(&self, k: i64) -> Self {
        let f = self.f;
        if k >= 0 {
            let k = k as u32;
            if k >= f {
                let s = self.s.mul_pow10(k).add(&self.w.mul_pow10(k - f));
                return PackedNumber { s, w: BigUint::zero(), f };
            }
            let (wq, wr) = self.w.div_rem_pow10(f - k);
            let s = self.s.mul_pow10(k).add(&wq);
            PackedNumber { s, w: wr.mul_pow10(k), f }
        } else {
            let j = (-k) as u32;
            let (sq, sr) = self.s.div_rem_pow10(j);
            if j <= f {
                let (wq, _) = self.w.div_rem_pow10(j);
                let w = sr.mul_pow10(f - j).add(&wq);
                PackedNumber { s: sq, w, f }
            } else {
                let (wq, _) = sr.div_rem_pow10(j - f);
                PackedNumber { s: sq, w: wq, f }
            }
        }
    }

    /// Move to a wider scale without changing the value.
    pub fn widen(&self, f2: u32) -> Result<Self, ApfixedError> {
        if f2 < self.f {
            return Err(ApfixedError::CannotNarrow { from: self.f, to: f2 });
        }
        Ok(PackedNumber { s: self.s.clone(), w: self.w.mul_pow10(f2 - self.f), f: f2 })
    }

    /// Parse `digits[.digits]`; the scale is the number of fraction digits.
    pub fn from_decimal_str(input: &str) -> Result<Self, ApfixedError> {
        let err = || ApfixedError::Parse { input: input.to_string() };
        let (int_str, frac_str) = match input.split_once('.') {
            None => (input, ""),
            Some((i, w)) => {
                if w.is_empty() {
                    return Err(err());
                }
                (i, w)
            }
        };
        let s = BigUint::parse_decimal(int_str).ok_or_else(err)?;
        let f = frac_str.len() as u32;
        let w = if frac_str.is_empty() {
            BigUint::zero()
        } else {
            BigUint::parse_decimal(frac_str).ok_or_else(err)?
        };
        Ok(PackedNumber { s, w, f })
    }
}

impl fmt::Display for PackedNumber {
    /// Prints the value with trailing fraction zeros trimmed; integers print bare.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.w.is_zero() {
            return write!(out, "{}", self.s);
        }
        let digits = self.w.to_string();
        let padded = format!("{}{}", "0".repeat(self.f as usize - digits.len()), digits);
        write!(out, "{}.{}", self.s, padded.trim_end_matches('0'))
    }
}

impl fmt::Debug for PackedNumber {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{} (f={})", self, self.f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PackedNumber {
        PackedNumber::from_decimal_str(s).unwrap()
    }

    fn pw(s: &str, f: u32) -> PackedNumber {
        p(s).widen(f).unwrap()
    }

    #[test]
    fn construction_enforces_fraction_width() {
        let ok = PackedNumber::new(BigUint::from_u64(3), BigUint::from_u64(99), 2);
        assert!(ok.is_ok());
        let bad = PackedNumber::new(BigUint::from_u64(3), BigUint::from_u64(100), 2);
        assert_eq!(bad.unwrap_err(), ApfixedError::FractionTooWide { digits: 3, scale: 2 });
        let bad = PackedNumber::new(BigUint::zero(), BigUint::one(), 0);
        assert!(matches!(bad, Err(ApfixedError::FractionTooWide { .. })));
    }

    #[test]
    fn parse_and_display_roundtrip() {
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(p("42").to_string(), "42");
        assert_eq!(p("3.0004").to_string(), "3.0004");
        assert_eq!(p("0.5000").to_string(), "0.5");
        assert_eq!(p("0.5000").scale(), 4);
        assert!(PackedNumber::from_decimal_str("1.").is_err());
        assert!(PackedNumber::from_decimal_str("").is_err());
        assert!(PackedNumber::from_decimal_str("1.2.3").is_err());
        assert!(PackedNumber::from_decimal_str("-1").is_err());
    }

    #[test]
    fn add_carries_across_the_point() {
        let sum = p("0.7").add(&p("0.6")).unwrap();
        assert_eq!(sum.to_string(), "1.3");
        let sum = p("1.99").add(&p("0.01")).unwrap();
        assert_eq!(sum.to_string(), "2");
        assert_eq!(sum.scale(), 2);
        assert!(p("0.7").add(&p("0.61")).is_err());
    }

    #[test]
    fn mul_truncates_below_scale() {
        // Exact product 180039.00240020 truncated to four fraction digits.
        let prod = p("3.0004").mul(&pw("60005", 4)).unwrap();
        assert_eq!(prod.to_string(), "180039.002");
        assert_eq!(prod.frac_part().to_string(), "20");
        assert_eq!(prod.int_part().to_string(), "180039");

        let prod = p("0.5").mul(&p("0.3")).unwrap();
        assert_eq!(prod.to_string(), "0.1");
    }

    #[test]
    fn packed_product_extraction() {
        let a = p("8.00000005000800080004");
        let b = pw("6000000020006000400010004", 20);
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.int_part().to_string(), "48000000460096009000780116");
        assert_eq!(format!("{:0>20}", prod.frac_part().to_string()), "00930084005600360016");
        let floored = prod.floor();
        assert_eq!(floored.mod_pow10(4).to_u64(), Some(116));
    }

    #[test]
    fn shift_by_powers_of_ten() {
        let x = p("8.00000005000800080004");
        assert_eq!(x.shift_pow10(4).to_string(), "80000.0005000800080004");
        assert_eq!(x.shift_pow10(-4).to_string(), "0.00080000000500080008");
        assert_eq!(x.shift_pow10(0), x);
        // Digits shifted below the fraction field are truncated, not rounded.
        assert_eq!(p("123.45").shift_pow10(-3).to_string(), "0.12");
        assert_eq!(pw("987", 2).shift_pow10(-5).to_string(), "0");
        assert_eq!(pw("987", 2).shift_pow10(-5).scale(), 2);
        assert_eq!(p("5.25").shift_pow10(3).to_string(), "5250");
        assert_eq!(p("5.25").shift_pow10(3).scale(), 2);
    }

    #[test]
    fn widen_preserves_value_and_narrowing_fails() {
        let x = p("3.14");
        let wide = x.widen(6).unwrap();
        assert_eq!(wide.to_string(), "3.14");
        assert_eq!(wide.scale(), 6);
        assert_eq!(wide.frac_part().to_string(), "140000");
        assert_eq!(x.widen(1).unwrap_err(), ApfixedError::CannotNarrow { from: 2, to: 1 });
    }

    #[test]
    fn mod_general_on_scaled_integers() {
        let x = pw("116.25", 4);
        let m = pw("10", 4);
        assert_eq!(x.mod_general(&m).unwrap().to_string(), "6.25");
        assert!(x.mod_general(&PackedNumber::zero(4)).is_err());
        assert!(x.mod_general(&p("10")).is_err());
    }

    #[test]
    fn scaled_and_footprint() {
        let x = p("3.0004");
        assert_eq!(x.scaled().to_string(), "30004");
        assert_eq!(x.digit_footprint(), 1 + 4);
        assert_eq!(pw("60005", 4).scaled().to_string(), "600050000");
    }
}
