//! Property tests pitting PackedNumber against an independent rational
//! implementation. Every operation law is phrased over the exact value
//! S + W/10^f; the packed side must land on floor(value * 10^f) / 10^f.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use proptest::prelude::*;

use packmm::{BigUint, PackedNumber};

fn pow10(exp: u32) -> BigInt {
    BigInt::from(10u32).pow(exp)
}

fn rational_of(p: &PackedNumber) -> BigRational {
    let numer = BigInt::parse_bytes(p.scaled().to_string().as_bytes(), 10).unwrap();
    BigRational::new(numer, pow10(p.scale()))
}

fn truncated(v: &BigRational, f: u32) -> BigRational {
    let scale = pow10(f);
    let scaled = v * BigRational::from(scale.clone());
    BigRational::new(scaled.floor().to_integer(), scale)
}

fn packed(scaled: u128, f: u32) -> PackedNumber {
    PackedNumber::from_scaled(BigUint::from_u128(scaled), f)
}

prop_compose! {
    fn scale_and_pair()(f in 0u32..=24, x in any::<u128>(), y in any::<u128>()) -> (u32, u128, u128) {
        let span = 10u128.pow(f + 12);
        (f, x % span, y % span)
    }
}

proptest! {
    #[test]
    fn addition_is_exact((f, x, y) in scale_and_pair()) {
        let (a, b) = (packed(x, f), packed(y, f));
        let sum = a.add(&b).unwrap();
        prop_assert_eq!(rational_of(&sum), rational_of(&a) + rational_of(&b));
        prop_assert_eq!(sum.scale(), f);
    }

    #[test]
    fn multiplication_truncates_at_scale((f, x, y) in scale_and_pair()) {
        let (a, b) = (packed(x, f), packed(y, f));
        let prod = a.mul(&b).unwrap();
        let expected = truncated(&(rational_of(&a) * rational_of(&b)), f);
        prop_assert_eq!(rational_of(&prod), expected);
    }

    #[test]
    fn multiplication_error_stays_below_one_ulp((f, x, y) in scale_and_pair()) {
        let (a, b) = (packed(x, f), packed(y, f));
        let prod = a.mul(&b).unwrap();
        let exact = rational_of(&a) * rational_of(&b);
        let error = &exact - &rational_of(&prod);
        prop_assert!(error >= BigRational::zero());
        prop_assert!(error < BigRational::new(BigInt::one(), pow10(f)));
    }

    #[test]
    fn floor_drops_the_fraction((f, x, _y) in scale_and_pair()) {
        let a = packed(x, f);
        let floored = BigInt::parse_bytes(a.floor().to_string().as_bytes(), 10).unwrap();
        prop_assert_eq!(floored, rational_of(&a).floor().to_integer());
    }

    #[test]
    fn modulus_matches_euclidean_remainder((f, x, y) in scale_and_pair()) {
        let a = packed(x, f);
        let m = packed(y.max(1), f);
        let r = a.mod_general(&m).unwrap();
        let (ra, rm) = (rational_of(&a), rational_of(&m));
        let expected = &ra - &rm * (&ra / &rm).floor();
        prop_assert_eq!(rational_of(&r), expected);
    }

    #[test]
    fn shifting_scales_by_powers_of_ten((f, x, _y) in scale_and_pair(), k in -30i64..=30) {
        let a = packed(x, f);
        let shifted = a.shift_pow10(k);
        let factor = BigRational::new(pow10(k.unsigned_abs() as u32), BigInt::one());
        let moved = if k >= 0 { rational_of(&a) * factor } else { rational_of(&a) / factor };
        prop_assert_eq!(rational_of(&shifted), truncated(&moved, f));
        prop_assert_eq!(shifted.scale(), f);
    }

    #[test]
    fn widening_preserves_the_value((f, x, _y) in scale_and_pair(), extra in 0u32..=10) {
        let a = packed(x, f);
        let wide = a.widen(f + extra).unwrap();
        prop_assert_eq!(rational_of(&wide), rational_of(&a));
        prop_assert_eq!(wide.scale(), f + extra);
    }

    #[test]
    fn display_round_trips((f, x, _y) in scale_and_pair()) {
        let a = packed(x, f);
        let reparsed = PackedNumber::from_decimal_str(&a.to_string()).unwrap();
        // Display trims trailing zeros, so the scale may shrink but the
        // value may not.
        prop_assert_eq!(rational_of(&reparsed), rational_of(&a));
    }

    #[test]
    fn scaled_split_is_consistent((f, x, _y) in scale_and_pair()) {
        let a = packed(x, f);
        let rebuilt = PackedNumber::new(a.int_part().clone(), a.frac_part().clone(), f).unwrap();
        prop_assert_eq!(rebuilt.scaled(), a.scaled());
        prop_assert!(a.frac_part() < &BigUint::pow10(f));
    }
}

#[test]
fn mixed_scales_are_rejected() {
    let narrow = packed(12345, 2);
    let wide = packed(12345, 4);
    assert!(narrow.add(&wide).is_err());
    assert!(narrow.mul(&wide).is_err());
    assert!(narrow.mod_general(&wide).is_err());
}
