use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default slack reserved for accumulated rounding error.
pub const DEFAULT_GUARD_BITS: u32 = 64;

/// Smallest working precision accepted by the library.
pub const MIN_BITS: u32 = 128;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision for a computation.
///
/// Values produced under a context carry a relative error of at most
/// `2^(-bits + guard_bits)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    bits: u32,
    guard_bits: u32,
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Result<Self> {
        Self::with_guard(bits, DEFAULT_GUARD_BITS)
    }

    pub fn with_guard(bits: u32, guard_bits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::domain(format!(
                "working precision {bits} bits is below the minimum of {MIN_BITS}"
            )));
        }
        if guard_bits == 0 || guard_bits >= bits {
            return Err(Error::domain(format!(
                "guard bits {guard_bits} must be positive and below {bits}"
            )));
        }
        Ok(PrecisionContext { bits, guard_bits })
    }

    /// Context whose certified part holds `digits` decimal digits.
    pub fn from_digits(digits: u32) -> Result<Self> {
        let certified = (f64::from(digits) * LOG2_10).ceil() as u32;
        Self::new((certified + DEFAULT_GUARD_BITS).max(MIN_BITS))
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn guard_bits(&self) -> u32 {
        self.guard_bits
    }

    /// Bits expected to be correct in a value computed under this context.
    pub fn certified_bits(&self) -> u32 {
        self.bits - self.guard_bits
    }

    /// Decimal digits expected to be correct.
    pub fn digits(&self) -> u32 {
        (f64::from(self.certified_bits()) / LOG2_10).floor() as u32
    }

    /// Exponent `e` of the accuracy claim `2^e`.
    pub fn accuracy_exp(&self) -> i64 {
        -(i64::from(self.bits)) + i64::from(self.guard_bits)
    }

    /// Context with the working precision scaled by `factor`, guard unchanged.
    pub fn scaled(&self, factor: f64) -> Self {
        let bits = ((f64::from(self.bits) * factor).ceil() as u32).max(self.guard_bits + 1);
        PrecisionContext {
            bits: bits.max(MIN_BITS),
            guard_bits: self.guard_bits,
        }
    }

    pub fn doubled(&self) -> Self {
        self.scaled(2.0)
    }

    /// Context with `extra` additional working bits.
    pub fn widened(&self, extra: u32) -> Self {
        PrecisionContext {
            bits: self.bits + extra,
            guard_bits: self.guard_bits,
        }
    }

    /// Context with at least `bits` working bits.
    pub fn at_least(&self, bits: u32) -> Self {
        PrecisionContext {
            bits: self.bits.max(bits),
            guard_bits: self.guard_bits,
        }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            bits: 256,
            guard_bits: DEFAULT_GUARD_BITS,
        }
    }
}

/// Number of decimal digits represented by `bits` binary digits.
pub fn bits_to_digits(bits: i64) -> i64 {
    (bits as f64 / LOG2_10).floor() as i64
}

/// Number of bits needed to hold `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * LOG2_10).ceil() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_inconsistent_contexts() {
        assert!(PrecisionContext::new(64).is_err());
        assert!(PrecisionContext::with_guard(200, 200).is_err());
        assert!(PrecisionContext::with_guard(200, 0).is_err());
        assert!(PrecisionContext::with_guard(200, 64).is_ok());
    }

    #[test]
    fn digits_round_trip() {
        let ctx = PrecisionContext::from_digits(1000).unwrap();
        assert!(ctx.digits() >= 1000);
        assert!(ctx.digits() <= 1001);
        assert_eq!(ctx.guard_bits(), DEFAULT_GUARD_BITS);
    }

    #[test]
    fn scaling_keeps_guard() {
        let ctx = PrecisionContext::new(400).unwrap();
        let wide = ctx.scaled(1.25);
        assert_eq!(wide.bits(), 500);
        assert_eq!(wide.guard_bits(), ctx.guard_bits());
        assert_eq!(ctx.doubled().bits(), 800);
    }
}
