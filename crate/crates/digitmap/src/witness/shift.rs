//! Additive shift witness: an l with f^r(l + y) = x + f^r(y) for every
//! 1 <= y <= m. Built from blocks of 1-digits placed above the additand's
//! digits so no carries occur; deeper r recurses through a bound on f(y).

use num_bigint::BigUint;
use serde::Serialize;

use crate::map::DigitMap;
use crate::sparse::{Run, SparseNumber};

use super::{WitnessConfig, WitnessError};

#[derive(Clone, Debug, Serialize)]
pub struct ShiftLevel {
    pub r: u64,
    /// y ranges over [1, m_bound] at this level.
    pub m_bound: u64,
    /// Exponent of the lowest 1-digit; the base power exceeds m_bound.
    pub start: u64,
    /// Number of 1-digits; equals the dense value of the level below.
    #[serde(with = "crate::serde_util::biguint_string")]
    pub count: BigUint,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftTrace {
    pub x: u64,
    pub m: u64,
    pub r: u64,
    pub base: u64,
    /// Levels from r = 1 upward.
    pub levels: Vec<ShiftLevel>,
    pub witness: SparseNumber,
}

/// Smallest s with b^s > m.
fn block_start(map: &DigitMap, m: u64) -> u64 {
    let mut s = 0u64;
    let mut pow = 1u128;
    while pow <= m as u128 {
        pow *= map.base() as u128;
        s += 1;
    }
    s
}

pub fn shift_witness(
    map: &DigitMap,
    x: u64,
    m: u64,
    r: u64,
    config: &WitnessConfig,
) -> Result<ShiftTrace, WitnessError> {
    if x == 0 || m == 0 || r == 0 {
        return Err(WitnessError::InvalidInput(
            "shift witness needs x >= 1, m >= 1, r >= 1".into(),
        ));
    }
    if r > config.depth_limit {
        return Err(WitnessError::DepthExceeded {
            what: format!("shift witness with r = {r} (limit {})", config.depth_limit),
        });
    }
    let mut levels = Vec::new();
    let mut count = BigUint::from(x);
    let mut witness = None;
    // level at depth i handles r = i+1; the count of 1-digits is the dense
    // value of the previous level's witness
    for depth in 1..=r {
        let m_bound = bound_for(map, m, r - depth);
        let start = block_start(map, m_bound);
        let w = SparseNumber::new(
            map.base(),
            vec![Run::new(start, 1u64, count.clone(), 1)],
        )?;
        levels.push(ShiftLevel {
            r: depth,
            m_bound,
            start,
            count: count.clone(),
        });
        if depth < r {
            count = w
                .to_dense(config.dense_digit_limit)
                .map_err(|_| WitnessError::DepthExceeded {
                    what: format!("shift witness level {depth} dense value"),
                })?;
        }
        witness = Some(w);
    }
    // levels were built for the innermost recursion first; the outermost
    // block must clear the original m, which bound_for(map, m, 0) = arg
    // ordering above already arranged (depth r pairs with the raw m)
    Ok(ShiftTrace {
        x,
        m,
        r,
        base: map.base(),
        levels,
        witness: witness.unwrap(),
    })
}

/// The y-range bound after peeling `peel` applications of f off the
/// recursion: each application of f maps y <= m into [0, digits(m) * max f*].
fn bound_for(map: &DigitMap, m: u64, peel: u64) -> u64 {
    let mut bound = m;
    for _ in 0..peel {
        bound = map.digit_count(bound) * map.max_digit_value();
    }
    bound.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn happy() -> DigitMap {
        DigitMap::power(2, 10).unwrap()
    }

    fn verify(map: &DigitMap, trace: &ShiftTrace) {
        let f_l = trace.witness.f_eval(map).unwrap();
        for y in 1..=trace.m {
            // l's digits sit above y's, so f(l + y) = f_eval(l) + f(y)
            let mut v = &f_l + map.eval(y);
            for _ in 1..trace.r {
                v = map.eval_big(&v);
            }
            let expected = trace.x + map.iterate(y, trace.r);
            assert_eq!(v, BigUint::from(expected), "y={y}");
        }
    }

    #[test]
    fn r1_examples() {
        let map = happy();
        let cfg = WitnessConfig::default();
        let t = shift_witness(&map, 3, 99, 1, &cfg).unwrap();
        assert_eq!(
            t.witness.to_dense(100).unwrap(),
            BigUint::from(11100u64)
        );
        verify(&map, &t);

        let t = shift_witness(&map, 1, 9, 1, &cfg).unwrap();
        assert_eq!(t.witness.to_dense(100).unwrap(), BigUint::from(10u64));
        verify(&map, &t);
    }

    #[test]
    fn r2_example() {
        let map = happy();
        let t = shift_witness(&map, 2, 9, 2, &WitnessConfig::default()).unwrap();
        assert!(!t.witness.f_eval(&map).unwrap().is_zero());
        verify(&map, &t);
    }

    #[test]
    fn depth_limit_honored() {
        let map = happy();
        let err = shift_witness(&map, 2, 9, 3, &WitnessConfig::default());
        assert!(matches!(err, Err(WitnessError::DepthExceeded { .. })));
    }

    #[test]
    fn rejects_zero_inputs() {
        let map = happy();
        assert!(shift_witness(&map, 0, 9, 1, &WitnessConfig::default()).is_err());
    }
}
