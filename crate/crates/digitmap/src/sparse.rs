//! Sparse integers: a non-negative integer stored as disjoint
//! arithmetic-progression runs of equal base-b digits. Supports f-evaluation
//! and modular residues even when the dense value is astronomically large.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::map::DigitMap;
use crate::nt;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(u64),
    #[error("digit {digit} out of range [1, {max}]")]
    DigitOutOfRange { digit: u64, max: u64 },
    #[error("run has zero count or stride")]
    DegenerateRun,
    #[error("runs overlap or are out of order")]
    OverlappingRuns,
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u64, u64),
    #[error("residue modulus {q} shares a factor with base {base}")]
    NonCoprimeModulus { base: u64, q: u64 },
    #[error("dense expansion would exceed {limit} digits")]
    TooLarge { limit: u64 },
}

/// `count` digits equal to `digit` at exponents start, start+stride, ...
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    #[serde(with = "crate::serde_util::biguint_string")]
    pub start: BigUint,
    #[serde(with = "crate::serde_util::biguint_string")]
    pub stride: BigUint,
    #[serde(with = "crate::serde_util::biguint_string")]
    pub count: BigUint,
    pub digit: u64,
}

impl Run {
    pub fn new(
        start: impl Into<BigUint>,
        stride: impl Into<BigUint>,
        count: impl Into<BigUint>,
        digit: u64,
    ) -> Self {
        Run {
            start: start.into(),
            stride: stride.into(),
            count: count.into(),
            digit,
        }
    }

    /// Exponent of the last digit in the run.
    pub fn end(&self) -> BigUint {
        &self.start + (&self.count - 1u32) * &self.stride
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseNumber {
    base: u64,
    runs: Vec<Run>,
}

impl SparseNumber {
    pub fn zero(base: u64) -> Self {
        SparseNumber { base, runs: vec![] }
    }

    /// Validates ordering, exponent-interval disjointness, and digit range.
    pub fn new(base: u64, runs: Vec<Run>) -> Result<Self, SparseError> {
        if base < 2 {
            return Err(SparseError::BaseTooSmall(base));
        }
        for r in &runs {
            if r.digit == 0 || r.digit >= base {
                return Err(SparseError::DigitOutOfRange {
                    digit: r.digit,
                    max: base - 1,
                });
            }
            if r.count.is_zero() || r.stride.is_zero() {
                return Err(SparseError::DegenerateRun);
            }
        }
        for w in runs.windows(2) {
            if w[0].end() >= w[1].start {
                return Err(SparseError::OverlappingRuns);
            }
        }
        Ok(SparseNumber { base, runs })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn is_zero(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn max_exponent(&self) -> Option<BigUint> {
        self.runs.last().map(|r| r.end())
    }

    /// Total number of nonzero digit positions.
    pub fn digit_positions(&self) -> BigUint {
        self.runs.iter().map(|r| r.count.clone()).sum()
    }

    /// Canonical run decomposition of a dense integer: maximal stride-1
    /// blocks of equal nonzero digits.
    pub fn from_dense(base: u64, n: &BigUint) -> Result<Self, SparseError> {
        if base < 2 {
            return Err(SparseError::BaseTooSmall(base));
        }
        let mut digits: Vec<u64> = Vec::new();
        if base <= 256 {
            digits.extend(n.to_radix_le(base as u32).into_iter().map(u64::from));
        } else {
            let b = BigUint::from(base);
            let mut v = n.clone();
            while !v.is_zero() {
                let (q, r) = v.div_rem(&b);
                digits.push(r.to_u64().unwrap());
                v = q;
            }
        }
        if n.is_zero() {
            digits.clear();
        }
        let mut runs = Vec::new();
        let mut i = 0usize;
        while i < digits.len() {
            if digits[i] == 0 {
                i += 1;
                continue;
            }
            let d = digits[i];
            let start = i;
            while i < digits.len() && digits[i] == d {
                i += 1;
            }
            runs.push(Run::new(start as u64, 1u64, (i - start) as u64, d));
        }
        Ok(SparseNumber { base, runs })
    }

    pub fn from_u64(base: u64, n: u64) -> Result<Self, SparseError> {
        Self::from_dense(base, &BigUint::from(n))
    }

    /// Exact dense value; errors when any digit sits at exponent
    /// >= limit_digits.
    pub fn to_dense(&self, limit_digits: u64) -> Result<BigUint, SparseError> {
        if let Some(top) = self.max_exponent() {
            if top >= BigUint::from(limit_digits) || top.to_u32().is_none() {
                return Err(SparseError::TooLarge {
                    limit: limit_digits,
                });
            }
        }
        let base = BigUint::from(self.base);
        let mut total = BigUint::zero();
        for r in &self.runs {
            // digit * b^start * (b^(stride*count) - 1) / (b^stride - 1)
            let start = r.start.to_u64().unwrap();
            let stride = r.stride.to_u64().unwrap();
            let count = r.count.to_u64().unwrap();
            let bs = base.pow(stride as u32);
            let geom = (bs.pow(count as u32) - 1u32) / (&bs - 1u32);
            total += r.digit * base.pow(start as u32) * geom;
        }
        Ok(total)
    }

    /// f applied to the represented integer: sum over runs of count * f*(digit).
    pub fn f_eval(&self, map: &DigitMap) -> Result<BigUint, SparseError> {
        if map.base() != self.base {
            return Err(SparseError::BaseMismatch(map.base(), self.base));
        }
        let mut sum = BigUint::zero();
        for r in &self.runs {
            sum += &r.count * map.digit_value(r.digit);
        }
        Ok(sum)
    }

    /// Value modulo q, requiring gcd(base, q) = 1 so exponents can be
    /// reduced by the multiplicative order of b mod q.
    pub fn residue(&self, q: u64) -> Result<u64, SparseError> {
        if q == 0 {
            return Err(SparseError::NonCoprimeModulus {
                base: self.base,
                q,
            });
        }
        if q == 1 {
            return Ok(0);
        }
        if nt::gcd(self.base % q, q) != 1 {
            return Err(SparseError::NonCoprimeModulus {
                base: self.base,
                q,
            });
        }
        let d = nt::multiplicative_order(self.base % q, q).unwrap();
        let d_big = BigUint::from(d);
        let mut acc = 0u64;
        for r in &self.runs {
            let e0 = (&r.start % &d_big).to_u64().unwrap();
            let es = (&r.stride % &d_big).to_u64().unwrap();
            let ratio = nt::mod_pow(self.base, es, q);
            let geom = geom_sum_mod(ratio, &r.count, q);
            let term = (r.digit % q) as u128 * nt::mod_pow(self.base, e0, q) as u128 % q as u128;
            let term = term * geom as u128 % q as u128;
            acc = ((acc as u128 + term) % q as u128) as u64;
        }
        Ok(acc)
    }

    /// Sum of two sparse numbers whose runs occupy disjoint exponent
    /// intervals; no carries can occur. Overlap signals a construction bug.
    pub fn add_disjoint(&self, other: &SparseNumber) -> Result<SparseNumber, SparseError> {
        if self.base != other.base {
            return Err(SparseError::BaseMismatch(self.base, other.base));
        }
        let mut runs: Vec<Run> = self
            .runs
            .iter()
            .chain(other.runs.iter())
            .cloned()
            .collect();
        runs.sort_by(|a, b| a.start.cmp(&b.start));
        // coalesce abutting runs with identical digit and stride
        let mut merged: Vec<Run> = Vec::with_capacity(runs.len());
        for r in runs {
            if let Some(last) = merged.last_mut() {
                if last.digit == r.digit
                    && last.stride == r.stride
                    && last.end() + &last.stride == r.start
                {
                    last.count += &r.count;
                    continue;
                }
            }
            merged.push(r);
        }
        SparseNumber::new(self.base, merged)
    }
}

/// (1 + ratio + ... + ratio^(count-1)) mod q by recursive doubling.
pub fn geom_sum_mod(ratio: u64, count: &BigUint, q: u64) -> u64 {
    if q == 1 {
        return 0;
    }
    // returns (sum, ratio^count mod q)
    fn go(ratio: u64, count: &BigUint, q: u64) -> (u64, u64) {
        if count.is_zero() {
            return (0, 1 % q);
        }
        let half = count >> 1u32;
        let (s, p) = go(ratio, &half, q);
        // S(2k) = S(k)(1 + p), p_{2k} = p^2
        let mut s2 = (s as u128 * ((1 + p as u128) % q as u128) % q as u128) as u64;
        let mut p2 = (p as u128 * p as u128 % q as u128) as u64;
        if count.is_odd() {
            s2 = ((s2 as u128 + p2 as u128) % q as u128) as u64;
            p2 = (p2 as u128 * (ratio % q) as u128 % q as u128) as u64;
        }
        (s2, p2)
    }
    go(ratio % q, count, q).0
}
