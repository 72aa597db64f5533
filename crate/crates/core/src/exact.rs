//! Exact integer comparisons of `n p` for decimal probabilities.
//!
//! A probability written as a decimal literal (say `0.05`) parses to a double
//! that is not exactly `5/100`, so `100 * 0.05` may land on either side of 5.
//! Here the double is turned back into its shortest round-trip decimal string
//! and read as `num / 10^d`, and `floor(n p)` / `ceil(n p)` are computed in
//! `u128` arithmetic.

use core::fmt::Write;

use libm::{ceil, floor};

/// `num / den` with `den` a power of ten.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecimalProb {
    num: u128,
    den: u128,
}

struct StackBuf {
    bytes: [u8; 64],
    len: usize,
}

impl Write for StackBuf {
    fn write_str(&mut self, s: &str) -> core::fmt::Result {
        let end = self.len + s.len();
        if end > self.bytes.len() {
            return Err(core::fmt::Error);
        }
        self.bytes[self.len..end].copy_from_slice(s.as_bytes());
        self.len = end;
        Ok(())
    }
}

const MAX_DIGITS: u32 = 28;

impl DecimalProb {
    /// `None` unless `0 <= p <= 1` and the shortest decimal has at most 28
    /// fractional digits.
    pub fn from_f64(p: f64) -> Option<Self> {
        if !(0.0..=1.0).contains(&p) {
            return None;
        }
        let mut buf = StackBuf {
            bytes: [0; 64],
            len: 0,
        };
        write!(buf, "{p}").ok()?;
        let text = core::str::from_utf8(&buf.bytes[..buf.len]).ok()?;
        let (int_part, frac) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        if frac.len() as u32 > MAX_DIGITS {
            return None;
        }
        let den = 10u128.pow(frac.len() as u32);
        let mut num: u128 = 0;
        for c in int_part.bytes().chain(frac.bytes()) {
            if !c.is_ascii_digit() {
                return None;
            }
            num = num.checked_mul(10)?.checked_add(u128::from(c - b'0'))?;
        }
        Some(Self { num, den })
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn denominator(&self) -> u128 {
        self.den
    }

    /// `floor(n p)` exactly, or `None` on overflow.
    pub fn floor_mul(&self, n: u64) -> Option<u64> {
        let prod = u128::from(n).checked_mul(self.num)?;
        u64::try_from(prod / self.den).ok()
    }

    /// `ceil(n p)` exactly, or `None` on overflow.
    pub fn ceil_mul(&self, n: u64) -> Option<u64> {
        let prod = u128::from(n).checked_mul(self.num)?;
        u64::try_from(prod.div_ceil(self.den)).ok()
    }
}

/// `floor(n p)`, exact when `p` has a short decimal form.
pub fn floor_np(n: u64, p: f64) -> u64 {
    DecimalProb::from_f64(p)
        .and_then(|d| d.floor_mul(n))
        .unwrap_or_else(|| floor(n as f64 * p) as u64)
}

/// `ceil(n p)`, exact when `p` has a short decimal form.
pub fn ceil_np(n: u64, p: f64) -> u64 {
    DecimalProb::from_f64(p)
        .and_then(|d| d.ceil_mul(n))
        .unwrap_or_else(|| ceil(n as f64 * p) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_shortest_decimal() {
        let d = DecimalProb::from_f64(0.05).unwrap();
        assert_eq!((d.numerator(), d.denominator()), (5, 100));
        let d = DecimalProb::from_f64(1.0).unwrap();
        assert_eq!((d.numerator(), d.denominator()), (1, 1));
        let d = DecimalProb::from_f64(0.1).unwrap();
        assert_eq!((d.numerator(), d.denominator()), (1, 10));
        assert!(DecimalProb::from_f64(1e-40).is_none());
        assert!(DecimalProb::from_f64(-0.5).is_none());
    }

    #[test]
    fn integer_products_are_exact() {
        // 0.07 * 100 = 7.000000000000001 in floating point
        let (a, b) = (0.07, 0.57);
        assert!(a * 100.0 > 7.0);
        assert_eq!(floor_np(100, 0.07), 7);
        assert_eq!(ceil_np(100, 0.07), 7);
        // 0.57 * 100 = 56.99999999999999
        assert!(b * 100.0 < 57.0);
        assert_eq!(ceil_np(100, 0.57), 57);
        assert_eq!(floor_np(100, 0.57), 57);
        assert_eq!(floor_np(10, 0.55), 5);
        assert_eq!(ceil_np(10, 0.55), 6);
    }

    #[test]
    fn falls_back_for_tiny_p() {
        assert_eq!(floor_np(10, 1e-40), 0);
        assert_eq!(ceil_np(10, 1e-40), 1);
    }
}
