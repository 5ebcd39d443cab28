//! Digit maps: a base b together with a digit table f*, extended to all
//! non-negative integers by summing f* over base-b digits.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(u64),
    #[error("digit table has {got} entries, base {base} requires exactly {base}")]
    TableLength { base: u64, got: usize },
    #[error("digit table entry overflows u64 (base {base}, exponent {exponent})")]
    TableOverflow { base: u64, exponent: u32 },
    #[error("threshold exceeds the supported range for this map")]
    ThresholdOverflow,
}

/// A base together with its digit table. `table[m]` holds f*(m).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitMap {
    base: u64,
    table: Vec<u64>,
}

/// On-disk form: either an explicit table or an (e, b) power map.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapFile {
    Power { base: u64, exponent: u32 },
    Table { base: u64, table: Vec<u64> },
}

impl DigitMap {
    pub fn new(base: u64, table: Vec<u64>) -> Result<Self, MapError> {
        if base < 2 {
            return Err(MapError::BaseTooSmall(base));
        }
        if table.len() as u64 != base {
            return Err(MapError::TableLength {
                base,
                got: table.len(),
            });
        }
        Ok(DigitMap { base, table })
    }

    /// The (e, b) power map, f*(m) = m^e.
    pub fn power(exponent: u32, base: u64) -> Result<Self, MapError> {
        if base < 2 {
            return Err(MapError::BaseTooSmall(base));
        }
        let table = (0..base)
            .map(|m| {
                m.checked_pow(exponent)
                    .ok_or(MapError::TableOverflow { base, exponent })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DigitMap { base, table })
    }

    pub fn from_file(spec: MapFile) -> Result<Self, MapError> {
        match spec {
            MapFile::Power { base, exponent } => Self::power(exponent, base),
            MapFile::Table { base, table } => Self::new(base, table),
        }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn digit_value(&self, digit: u64) -> u64 {
        self.table[digit as usize]
    }

    pub fn max_digit_value(&self) -> u64 {
        *self.table.iter().max().unwrap()
    }

    /// f(b-1). The paper writes both f(b-1) and f*(b-1); for a single digit
    /// they coincide.
    pub fn top_digit_value(&self) -> u64 {
        self.table[self.base as usize - 1]
    }

    /// f(n): sum of f* over the base-b digits of n.
    pub fn eval(&self, mut n: u64) -> u64 {
        let mut sum = 0u64;
        if n == 0 {
            return 0;
        }
        while n > 0 {
            sum += self.table[(n % self.base) as usize];
            n /= self.base;
        }
        sum
    }

    /// f(n) for arbitrary-precision n, by repeated division by the base.
    pub fn eval_big(&self, n: &BigUint) -> BigUint {
        if n.is_zero() {
            return BigUint::zero();
        }
        let mut sum = BigUint::zero();
        if self.base <= 256 {
            for d in n.to_radix_le(self.base as u32) {
                sum += self.table[d as usize];
            }
        } else {
            let base = BigUint::from(self.base);
            let mut v = n.clone();
            while !v.is_zero() {
                let (q, r) = v.div_rem(&base);
                sum += self.table[r.to_usize().unwrap()];
                v = q;
            }
        }
        sum
    }

    /// f^r(n); r = 0 is the identity.
    pub fn iterate(&self, mut n: u64, r: u64) -> u64 {
        for _ in 0..r {
            n = self.eval(n);
        }
        n
    }

    pub fn iterate_big(&self, n: &BigUint, r: u64) -> BigUint {
        let mut v = n.clone();
        for _ in 0..r {
            v = self.eval_big(&v);
        }
        v
    }

    /// Number of base-b digits of n (0 has one digit).
    pub fn digit_count(&self, mut n: u64) -> u64 {
        let mut d = 1;
        while n >= self.base {
            n /= self.base;
            d += 1;
        }
        d
    }

    /// Explicit bound T with f(n) < n for all n > T: with M = max f* and
    /// d0 the least digit count satisfying d0*M < b^(d0-1), any n > b^(d0-1)-1
    /// has d >= d0 digits and f(n) <= d*M < b^(d-1) <= n.
    pub fn threshold(&self) -> Result<u64, MapError> {
        let m = self.max_digit_value() as u128;
        let mut pow: u128 = 1; // b^(d-1)
        let mut d: u128 = 1;
        loop {
            if d * m < pow {
                let t = pow - 1;
                return u64::try_from(t.max(1)).map_err(|_| MapError::ThresholdOverflow);
            }
            pow = pow
                .checked_mul(self.base as u128)
                .ok_or(MapError::ThresholdOverflow)?;
            d += 1;
            if d > 200 {
                return Err(MapError::ThresholdOverflow);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn happy() -> DigitMap {
        DigitMap::power(2, 10).unwrap()
    }

    #[test]
    fn power_map_tables() {
        assert_eq!(happy().table(), &[0, 1, 4, 9, 16, 25, 36, 49, 64, 81]);
        let id = DigitMap::power(1, 7).unwrap();
        assert_eq!(id.table(), &[0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(DigitMap::power(3, 2).unwrap().table(), &[0, 1]);
    }

    #[test]
    fn eval_examples() {
        let h = happy();
        assert_eq!(h.eval(7), 49);
        assert_eq!(h.eval(19), 82);
        assert_eq!(h.eval(0), 0);
    }

    #[test]
    fn iterate_examples() {
        let h = happy();
        // 19 -> 82 -> 68 -> 100 -> 1
        assert_eq!(h.iterate(19, 4), 1);
        // the 8-cycle through 4
        assert_eq!(h.iterate(4, 8), 4);
        assert_eq!(h.iterate(5, 0), 5);
    }

    #[test]
    fn eval_big_matches_eval() {
        let h = happy();
        for n in [0u64, 1, 19, 999_999, 123_456_789_012_345] {
            assert_eq!(h.eval_big(&BigUint::from(n)), BigUint::from(h.eval(n)));
        }
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(happy().threshold().unwrap(), 999);
        assert_eq!(DigitMap::new(2, vec![0, 1]).unwrap().threshold().unwrap(), 3);
        assert_eq!(DigitMap::power(1, 10).unwrap().threshold().unwrap(), 99);
    }

    #[test]
    fn threshold_contracts_above() {
        let h = happy();
        let t = h.threshold().unwrap();
        for n in t + 1..=t * 10 {
            assert!(h.eval(n) < n, "f({n}) = {} >= {n}", h.eval(n));
        }
    }

    #[test]
    fn invalid_maps_rejected() {
        assert!(DigitMap::new(1, vec![0]).is_err());
        assert!(DigitMap::new(3, vec![0, 1]).is_err());
        assert!(DigitMap::power(9, u32::MAX as u64).is_err());
    }

    #[test]
    fn map_file_forms() {
        let p: MapFile = serde_json::from_str(r#"{"base":10,"exponent":2}"#).unwrap();
        assert_eq!(DigitMap::from_file(p).unwrap(), happy());
        let t: MapFile = serde_json::from_str(r#"{"base":2,"table":[0,1]}"#).unwrap();
        assert_eq!(DigitMap::from_file(t).unwrap().base(), 2);
    }
}
