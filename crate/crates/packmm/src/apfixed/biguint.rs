//! Arbitrary-precision unsigned integers over a decimal-power radix.
//!
//! Limbs are base 10^18, stored little-endian. Keeping the radix a power of
//! ten makes multiplication and division by 10^e, floor and mod 10^e pure
//! digit-slicing operations, and makes the decimal digit count of a value
//! exact rather than an estimate.

use std::cmp::Ordering;
use std::fmt;

/// Decimal digits held by one limb.
pub const LIMB_DIGITS: u32 = 18;

/// The limb radix, 10^18. Every stored limb is strictly below this.
pub const LIMB_RADIX: u64 = 1_000_000_000_000_000_000;

const LIMB_RADIX_128: u128 = LIMB_RADIX as u128;

/// Unsigned big integer with base-10^18 limbs, least significant first.
///
/// Canonical form: the most significant limb is nonzero; zero is the empty
/// limb vector. All constructors and operations maintain this.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BigUint {
    limbs: Vec<u64>,
}

impl BigUint {
    /// The value 0.
    pub fn zero() -> Self {
        BigUint { limbs: Vec::new() }
    }

    /// The value 1.
    pub fn one() -> Self {
        BigUint { limbs: vec![1] }
    }

    pub fn from_u64(v: u64) -> Self {
        Self::from_u128(v as u128)
    }

    pub fn from_u128(mut v: u128) -> Self {
        let mut limbs = Vec::new();
        while v > 0 {
            limbs.push((v % LIMB_RADIX_128) as u64);
            v /= LIMB_RADIX_128;
        }
        BigUint { limbs }
    }

    /// 10^e.
    pub fn pow10(e: u32) -> Self {
        let whole = (e / LIMB_DIGITS) as usize;
        let rest = e % LIMB_DIGITS;
        let mut limbs = vec![0u64; whole];
        limbs.push(10u64.pow(rest));
        BigUint { limbs }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// The value as `u64` if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        let v = self.to_u128()?;
        u64::try_from(v).ok()
    }

    /// The value as `u128` if it fits.
    pub fn to_u128(&self) -> Option<u128> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0] as u128),
            2 => Some(self.limbs[0] as u128 + self.limbs[1] as u128 * LIMB_RADIX_128),
            3 => {
                let high = (self.limbs[2] as u128).checked_mul(LIMB_RADIX_128 * LIMB_RADIX_128)?;
                high.checked_add(self.limbs[0] as u128 + self.limbs[1] as u128 * LIMB_RADIX_128)
            }
            _ => None,
        }
    }

    /// Number of decimal digits; 1 for zero.
    pub fn decimal_digits(&self) -> u64 {
        match self.limbs.last() {
            None => 1,
            Some(&top) => {
                (self.limbs.len() as u64 - 1) * LIMB_DIGITS as u64 + (top.ilog10() as u64 + 1)
            }
        }
    }

    fn trim(limbs: &mut Vec<u64>) {
        while limbs.last() == Some(&0) {
            limbs.pop();
        }
    }

    pub fn add(&self, other: &BigUint) -> BigUint {
        let (long, short) = if self.limbs.len() >= other.limbs.len() {
            (&self.limbs, &other.limbs)
        } else {
            (&other.limbs, &self.limbs)
        };
        let mut out = Vec::with_capacity(long.len() + 1);
        let mut carry = 0u64;
        for (i, &limb) in long.iter().enumerate() {
            let mut sum = limb + carry;
            if let Some(&s) = short.get(i) {
                sum += s;
            }
            if sum >= LIMB_RADIX {
                out.push(sum - LIMB_RADIX);
                carry = 1;
            } else {
                out.push(sum);
                carry = 0;
            }
        }
        if carry > 0 {
            out.push(carry);
        }
        BigUint { limbs: out }
    }

    /// `self - other`, or `None` when the result would be negative.
    pub fn checked_sub(&self, other: &BigUint) -> Option<BigUint> {
        if self.limbs.len() < other.limbs.len() {
            return None;
        }
        let mut out = Vec::with_capacity(self.limbs.len());
        let mut borrow = 0u64;
        for i in 0..self.limbs.len() {
            let sub = other.limbs.get(i).copied().unwrap_or(0) + borrow;
            if self.limbs[i] >= sub {
                out.push(self.limbs[i] - sub);
                borrow = 0;
            } else {
                out.push(self.limbs[i] + LIMB_RADIX - sub);
                borrow = 1;
            }
        }
        if borrow > 0 {
            return None;
        }
        Self::trim(&mut out);
        Some(BigUint { limbs: out })
    }

    /// Schoolbook product with per-column accumulation.
    pub fn mul(&self, other: &BigUint) -> BigUint {
        if self.is_zero() || other.is_zero() {
            return BigUint::zero();
        }
        let a = &self.limbs;
        let b = &other.limbs;
        let cols = a.len() + b.len() - 1;
        let mut out = Vec::with_capacity(cols + 1);
        let mut carry: u128 = 0;
        for t in 0..cols {
            // Accumulate one output column. A u128 holds ~340 limb products,
            // so on overflow the high part is spilled into next column units.
            let mut acc = carry;
            let mut spill: u128 = 0;
            let lo = t.saturating_sub(b.len() - 1);
            let hi = t.min(a.len() - 1);
            for i in lo..=hi {
                let p = a[i] as u128 * b[t - i] as u128;
                match acc.checked_add(p) {
                    Some(x) => acc = x,
                    None => {
                        spill += acc / LIMB_RADIX_128;
                        acc = acc % LIMB_RADIX_128 + p;
                    }
                }
            }
            out.push((acc % LIMB_RADIX_128) as u64);
            carry = acc / LIMB_RADIX_128 + spill;
        }
        while carry > 0 {
            out.push((carry % LIMB_RADIX_128) as u64);
            carry /= LIMB_RADIX_128;
        }
        Self::trim(&mut out);
        BigUint { limbs: out }
    }

    /// `self * 10^e` as a limb/digit shift.
    pub fn mul_pow10(&self, e: u32) -> BigUint {
        if self.is_zero() {
            return BigUint::zero();
        }
        if e == 0 {
            return self.clone();
        }
        let whole = (e / LIMB_DIGITS) as usize;
        let rest = e % LIMB_DIGITS;
        let mut limbs = vec![0u64; whole];
        if rest == 0 {
            limbs.extend_from_slice(&self.limbs);
        } else {
            let mult = 10u64.pow(rest) as u128;
            let mut carry: u128 = 0;
            for &l in &self.limbs {
                let v = l as u128 * mult + carry;
                limbs.push((v % LIMB_RADIX_128) as u64);
                carry = v / LIMB_RADIX_128;
            }
            if carry > 0 {
                limbs.push(carry as u64);
            }
        }
        Self::trim(&mut limbs);
        BigUint { limbs }
    }

    /// `(self / 10^e, self % 10^e)` as a digit shift and a digit slice.
    pub fn div_rem_pow10(&self, e: u32) -> (BigUint, BigUint) {
        if e == 0 {
            return (self.clone(), BigUint::zero());
        }
        let whole = (e / LIMB_DIGITS) as usize;
        let rest = e % LIMB_DIGITS;
        if whole >= self.limbs.len() {
            return (BigUint::zero(), self.clone());
        }
        if rest == 0 {
            let mut rem = self.limbs[..whole].to_vec();
            Self::trim(&mut rem);
            let quot = self.limbs[whole..].to_vec();
            return (BigUint { limbs: quot }, BigUint { limbs: rem });
        }
        let pow = 10u64.pow(rest);
        let shift_up = 10u64.pow(LIMB_DIGITS - rest);
        let upper = &self.limbs[whole..];
        let mut quot = Vec::with_capacity(upper.len());
        for i in 0..upper.len() {
            let low = upper[i] / pow;
            let high = upper.get(i + 1).copied().unwrap_or(0) % pow;
            quot.push(low + high * shift_up);
        }
        Self::trim(&mut quot);
        let mut rem = self.limbs[..whole].to_vec();
        rem.push(upper[0] % pow);
        Self::trim(&mut rem);
        (BigUint { limbs: quot }, BigUint { limbs: rem })
    }

    /// `self % 10^e`.
    pub fn mod_pow10(&self, e: u32) -> BigUint {
        self.div_rem_pow10(e).1
    }

    /// `(self / other, self % other)`. `None` when `other` is zero.
    ///
    /// Long division (Knuth volume 2, algorithm D) carried out in the limb
    /// radix, with a single-limb fast path.
    pub fn checked_div_rem(&self, other: &BigUint) -> Option<(BigUint, BigUint)> {
        if other.is_zero() {
            return None;
        }
        if self < other {
            return Some((BigUint::zero(), self.clone()));
        }
        if other.limbs.len() == 1 {
            let d = other.limbs[0] as u128;
            let mut quot = vec![0u64; self.limbs.len()];
            let mut rem: u128 = 0;
            for i in (0..self.limbs.len()).rev() {
                let cur = rem * LIMB_RADIX_128 + self.limbs[i] as u128;
                quot[i] = (cur / d) as u64;
                rem = cur % d;
            }
            Self::trim(&mut quot);
            return Some((BigUint { limbs: quot }, BigUint::from_u128(rem)));
        }

        // Normalize so the top divisor limb is at least RADIX/2.
        let scale = (LIMB_RADIX_128 / (other.limbs.last().copied().unwrap() as u128 + 1)) as u64;
        let scale_big = BigUint::from_u64(scale);
        let mut u = self.mul(&scale_big).limbs;
        let v = other.mul(&scale_big).limbs;
        let n = v.len();
        let m = u.len().saturating_sub(n);
        u.push(0);

        let v_top = v[n - 1] as u128;
        let v_next = v[n - 2] as u128;
        let mut quot = vec![0u64; m + 1];
        for j in (0..=m).rev() {
            let top = u[j + n] as u128 * LIMB_RADIX_128 + u[j + n - 1] as u128;
            let mut qhat = top / v_top;
            let mut rhat = top % v_top;
            while qhat >= LIMB_RADIX_128
                || qhat * v_next > rhat * LIMB_RADIX_128 + u[j + n - 2] as u128
            {
                qhat -= 1;
                rhat += v_top;
                if rhat >= LIMB_RADIX_128 {
                    break;
                }
            }
            // Multiply-subtract qhat * v from u[j..j+n+1].
            let mut borrow: i128 = 0;
            for i in 0..n {
                let sub = qhat as i128 * v[i] as i128;
                let cur = u[j + i] as i128 - borrow - (sub % LIMB_RADIX_128 as i128);
                borrow = sub / LIMB_RADIX_128 as i128;
                if cur < 0 {
                    u[j + i] = (cur + LIMB_RADIX_128 as i128) as u64;
                    borrow += 1;
                } else {
                    u[j + i] = cur as u64;
                }
            }
            let cur = u[j + n] as i128 - borrow;
            if cur < 0 {
                // qhat was one too large: add the divisor back.
                u[j + n] = (cur + LIMB_RADIX_128 as i128) as u64;
                qhat -= 1;
                let mut carry = 0u64;
                for i in 0..n {
                    let s = u[j + i] + v[i] + carry;
                    if s >= LIMB_RADIX {
                        u[j + i] = s - LIMB_RADIX;
                        carry = 1;
                    } else {
                        u[j + i] = s;
                        carry = 0;
                    }
                }
                u[j + n] = u[j + n].wrapping_add(carry);
                if u[j + n] >= LIMB_RADIX {
                    u[j + n] -= LIMB_RADIX;
                }
            } else {
                u[j + n] = cur as u64;
            }
            quot[j] = qhat as u64;
        }
        Self::trim(&mut quot);
        u.truncate(n);
        Self::trim(&mut u);
        let rem_scaled = BigUint { limbs: u };
        let (rem, check) = rem_scaled.checked_div_rem_small(&scale_big);
        debug_assert!(check.is_zero());
        Some((BigUint { limbs: quot }, rem))
    }

    fn checked_div_rem_small(&self, other: &BigUint) -> (BigUint, BigUint) {
        debug_assert_eq!(other.limbs.len(), 1);
        let d = other.limbs[0] as u128;
        let mut quot = vec![0u64; self.limbs.len()];
        let mut rem: u128 = 0;
        for i in (0..self.limbs.len()).rev() {
            let cur = rem * LIMB_RADIX_128 + self.limbs[i] as u128;
            quot[i] = (cur / d) as u64;
            rem = cur % d;
        }
        Self::trim(&mut quot);
        (BigUint { limbs: quot }, BigUint::from_u128(rem))
    }

    /// `self % other`. `None` when `other` is zero.
    pub fn checked_rem(&self, other: &BigUint) -> Option<BigUint> {
        Some(self.checked_div_rem(other)?.1)
    }

    /// Parse a plain decimal digit string (no sign, no separators).
    pub fn parse_decimal(s: &str) -> Option<BigUint> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let trimmed = s.trim_start_matches('0');
        if trimmed.is_empty() {
            return Some(BigUint::zero());
        }
        let bytes = trimmed.as_bytes();
        let mut limbs = Vec::with_capacity(bytes.len() / LIMB_DIGITS as usize + 1);
        let mut end = bytes.len();
        while end > 0 {
            let start = end.saturating_sub(LIMB_DIGITS as usize);
            let chunk = std::str::from_utf8(&bytes[start..end]).unwrap();
            limbs.push(chunk.parse::<u64>().unwrap());
            end = start;
        }
        Self::trim(&mut limbs);
        Some(BigUint { limbs })
    }
}

impl PartialOrd for BigUint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigUint {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.limbs.len().cmp(&other.limbs.len()) {
            Ordering::Equal => self.limbs.iter().rev().cmp(other.limbs.iter().rev()),
            ord => ord,
        }
    }
}

impl fmt::Display for BigUint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.limbs.split_last() {
            None => write!(f, "0"),
            Some((top, rest)) => {
                write!(f, "{top}")?;
                for limb in rest.iter().rev() {
                    write!(f, "{limb:018}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for BigUint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
