//! Cycle atlas: every cycle of a digit map, the attractor set D, and a
//! per-integer entry table up to the contraction threshold T.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::map::{DigitMap, MapError};

/// Largest entry table we are willing to materialize.
pub const DEFAULT_ATLAS_LIMIT: u64 = 50_000_000;

#[derive(Debug, Error)]
pub enum AtlasError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("threshold {threshold} exceeds the atlas limit {limit}")]
    ThresholdTooLarge { threshold: u64, limit: u64 },
    #[error("{0} is not a cycle number of this map")]
    NotACycleNumber(u64),
    #[error("classification requires a positive integer")]
    NotPositive,
}

#[derive(Clone, Copy)]
struct Entry {
    cycle: u32,
    steps: u32,
}

/// Read-only after construction; safe to share across workers.
pub struct CycleAtlas {
    map: DigitMap,
    threshold: u64,
    cycles: Vec<Vec<u64>>,
    /// cycle element -> (cycle index, position within the cycle)
    position: HashMap<u64, (usize, usize)>,
    /// entry[n-1] for n in 1..=threshold
    entry: Vec<Entry>,
}

/// Where n ends up, and when, relative to a chosen cycle element u.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    #[serde(with = "crate::serde_util::biguint_string")]
    pub n: BigUint,
    pub u: u64,
    pub cycle_index: usize,
    pub entry_steps: u64,
    pub is_u_integer: bool,
    /// Smallest r >= 1 with f^r(n) = u, when n is a u-integer.
    pub steps_to_u: Option<u64>,
    /// steps_to_u mod the cycle length of u.
    pub phase: Option<u64>,
    pub cycle_len: u64,
}

impl CycleAtlas {
    pub fn compute(map: &DigitMap) -> Result<Self, AtlasError> {
        Self::compute_with_limit(map, DEFAULT_ATLAS_LIMIT)
    }

    pub fn compute_with_limit(map: &DigitMap, limit: u64) -> Result<Self, AtlasError> {
        let threshold = map.threshold()?;
        if threshold > limit {
            return Err(AtlasError::ThresholdTooLarge { threshold, limit });
        }
        let t = threshold as usize;
        const UNSEEN: u32 = u32::MAX;
        const ON_PATH: u32 = u32::MAX - 1;
        let mut state: Vec<Entry> = vec![
            Entry {
                cycle: UNSEEN,
                steps: 0
            };
            t + 1
        ];
        let mut cycles: Vec<Vec<u64>> = Vec::new();
        let mut path: Vec<u64> = Vec::new();

        for start in 1..=threshold {
            if state[start as usize].cycle != UNSEEN {
                continue;
            }
            path.clear();
            let mut cur = start;
            // Walk until we hit resolved territory or close a new cycle.
            // f maps [1, T] into [1, T]: n <= T has < d0 digits, so
            // f(n) <= (d0-1)M < b^(d0-1) = T+1.
            // anchor = index in path where the resolved tail begins
            let (tail_cycle, tail_steps, anchor) = loop {
                let st = state[cur as usize];
                if st.cycle == ON_PATH {
                    // new cycle: everything in path from cur onwards
                    let pos = path.iter().position(|&v| v == cur).unwrap();
                    let cyc: Vec<u64> = path[pos..].to_vec();
                    let idx = cycles.len() as u32;
                    for &v in &cyc {
                        state[v as usize] = Entry {
                            cycle: idx,
                            steps: 0,
                        };
                    }
                    cycles.push(cyc);
                    break (idx, 0u32, pos);
                }
                if st.cycle != UNSEEN {
                    break (st.cycle, st.steps, path.len());
                }
                state[cur as usize].cycle = ON_PATH;
                path.push(cur);
                cur = map.eval(cur);
            };
            // unwind the non-cycle prefix of the path
            for (i, &v) in path.iter().enumerate().take(anchor) {
                state[v as usize] = Entry {
                    cycle: tail_cycle,
                    steps: tail_steps + (anchor - i) as u32,
                };
            }
        }

        // Deterministic indexing: sort cycles by minimum element and rotate
        // each to start at its minimum.
        let mut order: Vec<usize> = (0..cycles.len()).collect();
        let mins: Vec<u64> = cycles.iter().map(|c| *c.iter().min().unwrap()).collect();
        order.sort_by_key(|&i| mins[i]);
        let mut remap = vec![0u32; cycles.len()];
        for (new_idx, &old_idx) in order.iter().enumerate() {
            remap[old_idx] = new_idx as u32;
        }
        let mut sorted_cycles = Vec::with_capacity(cycles.len());
        for &old_idx in &order {
            let c = &cycles[old_idx];
            let min_pos = c
                .iter()
                .enumerate()
                .min_by_key(|(_, &v)| v)
                .map(|(i, _)| i)
                .unwrap();
            let mut rot = Vec::with_capacity(c.len());
            rot.extend_from_slice(&c[min_pos..]);
            rot.extend_from_slice(&c[..min_pos]);
            sorted_cycles.push(rot);
        }
        let mut entry = Vec::with_capacity(t);
        for n in 1..=t {
            let e = state[n];
            entry.push(Entry {
                cycle: remap[e.cycle as usize],
                steps: e.steps,
            });
        }
        let mut position = HashMap::new();
        for (ci, c) in sorted_cycles.iter().enumerate() {
            for (pi, &v) in c.iter().enumerate() {
                position.insert(v, (ci, pi));
            }
        }

        Ok(CycleAtlas {
            map: map.clone(),
            threshold,
            cycles: sorted_cycles,
            position,
            entry,
        })
    }

    pub fn map(&self) -> &DigitMap {
        &self.map
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn cycles(&self) -> &[Vec<u64>] {
        &self.cycles
    }

    /// The attractor set D, ascending.
    pub fn attractor_set(&self) -> Vec<u64> {
        let mut d: Vec<u64> = self.cycles.iter().flatten().copied().collect();
        d.sort_unstable();
        d
    }

    pub fn is_cycle_number(&self, u: u64) -> bool {
        self.position.contains_key(&u)
    }

    /// (cycle index, position) of a cycle element.
    pub fn cycle_position(&self, u: u64) -> Result<(usize, usize), AtlasError> {
        self.position
            .get(&u)
            .copied()
            .ok_or(AtlasError::NotACycleNumber(u))
    }

    /// (cycle index, entry steps) for n >= 1 in machine range.
    pub fn eventual_cycle(&self, n: u64) -> Result<(usize, u64), AtlasError> {
        if n == 0 {
            return Err(AtlasError::NotPositive);
        }
        let mut steps = 0u64;
        let mut v = n;
        while v > self.threshold {
            v = self.map.eval(v);
            steps += 1;
        }
        let e = self.entry[v as usize - 1];
        Ok((e.cycle as usize, steps + e.steps as u64))
    }

    pub fn classify(&self, n: u64, u: u64) -> Result<Classification, AtlasError> {
        self.classify_big(&BigUint::from(n), u)
    }

    pub fn classify_big(&self, n: &BigUint, u: u64) -> Result<Classification, AtlasError> {
        use num_traits::Zero;
        let (u_cycle, u_pos) = self.cycle_position(u)?;
        if n.is_zero() {
            return Err(AtlasError::NotPositive);
        }
        // shrink to machine range first; values above T are never in D
        let mut big_steps = 0u64;
        let mut v = n.clone();
        let small = loop {
            if let Some(s) = v.to_u64() {
                break s;
            }
            v = self.map.eval_big(&v);
            big_steps += 1;
        };
        let (cycle_index, small_steps) = self.eventual_cycle(small)?;
        let entry_steps = big_steps + small_steps;
        let c = self.cycles[u_cycle].len() as u64;
        if cycle_index != u_cycle {
            return Ok(Classification {
                n: n.clone(),
                u,
                cycle_index,
                entry_steps,
                is_u_integer: false,
                steps_to_u: None,
                phase: None,
                cycle_len: c,
            });
        }
        // landing element in D, then walk the cycle to u
        let landing = self.map.iterate(small, small_steps);
        let (_, land_pos) = self.position[&landing];
        let dist = (u_pos as u64 + c - land_pos as u64) % c;
        let mut steps_to_u = entry_steps + dist;
        if steps_to_u == 0 {
            steps_to_u = c; // the definition requires r >= 1
        }
        Ok(Classification {
            n: n.clone(),
            u,
            cycle_index,
            entry_steps,
            is_u_integer: true,
            steps_to_u: Some(steps_to_u),
            phase: Some(steps_to_u % c),
            cycle_len: c,
        })
    }

    pub fn is_u_integer(&self, n: u64, u: u64) -> Result<bool, AtlasError> {
        let (u_cycle, _) = self.cycle_position(u)?;
        Ok(self.eventual_cycle(n)?.0 == u_cycle)
    }

    /// m and n reach u at a common time r >= 1 iff both are u-integers with
    /// equal phase modulo u's cycle length.
    pub fn are_concurrent(&self, m: u64, n: u64, u: u64) -> Result<bool, AtlasError> {
        let cm = self.classify(m, u)?;
        let cn = self.classify(n, u)?;
        Ok(cm.is_u_integer && cn.is_u_integer && cm.phase == cn.phase)
    }

    pub fn cycle_len(&self, u: u64) -> Result<u64, AtlasError> {
        let (ci, _) = self.cycle_position(u)?;
        Ok(self.cycles[ci].len() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn happy_atlas() -> CycleAtlas {
        CycleAtlas::compute(&DigitMap::power(2, 10).unwrap()).unwrap()
    }

    #[test]
    fn happy_cycles() {
        let atlas = happy_atlas();
        assert_eq!(atlas.cycles().len(), 2);
        assert_eq!(atlas.cycles()[0], vec![1]);
        assert_eq!(atlas.cycles()[1], vec![4, 16, 37, 58, 89, 145, 42, 20]);
        assert_eq!(atlas.attractor_set().len(), 9);
    }

    #[test]
    fn digit_sum_cycles_are_fixed_points() {
        let atlas = CycleAtlas::compute(&DigitMap::power(1, 10).unwrap()).unwrap();
        assert_eq!(atlas.cycles().len(), 9);
        for (i, c) in atlas.cycles().iter().enumerate() {
            assert_eq!(c, &vec![i as u64 + 1]);
        }
    }

    #[test]
    fn base_two_single_cycle() {
        let atlas = CycleAtlas::compute(&DigitMap::new(2, vec![0, 1]).unwrap()).unwrap();
        assert_eq!(atlas.cycles(), &[vec![1]]);
    }

    #[test]
    fn cycle_consistency() {
        let atlas = happy_atlas();
        for c in atlas.cycles() {
            for (i, &v) in c.iter().enumerate() {
                assert_eq!(atlas.map().eval(v), c[(i + 1) % c.len()]);
            }
        }
    }

    #[test]
    fn everything_stabilizes() {
        let atlas = happy_atlas();
        let d = atlas.attractor_set();
        for n in 1..=atlas.threshold() {
            let v = atlas.map().iterate(n, atlas.threshold());
            assert!(d.contains(&v), "n={n} did not stabilize");
        }
    }

    #[test]
    fn classify_examples() {
        let atlas = happy_atlas();
        let c = atlas.classify(19, 1).unwrap();
        assert!(c.is_u_integer);
        assert_eq!(c.steps_to_u, Some(4));

        let c = atlas.classify(16, 4).unwrap();
        assert_eq!(c.steps_to_u, Some(7));
        assert_eq!(c.phase, Some(7));

        let c = atlas.classify(19, 4).unwrap();
        assert!(!c.is_u_integer);
    }

    #[test]
    fn u_is_a_u_integer_with_steps_c() {
        let atlas = happy_atlas();
        assert_eq!(atlas.classify(1, 1).unwrap().steps_to_u, Some(1));
        assert_eq!(atlas.classify(4, 4).unwrap().steps_to_u, Some(8));
    }

    #[test]
    fn entry_steps_minimality() {
        let atlas = happy_atlas();
        let d = atlas.attractor_set();
        for n in 1..2000u64 {
            let (_, steps) = atlas.eventual_cycle(n).unwrap();
            assert!(d.contains(&atlas.map().iterate(n, steps)));
            if steps > 0 {
                assert!(!d.contains(&atlas.map().iterate(n, steps - 1)));
            }
        }
    }

    #[test]
    fn concurrency_examples() {
        let atlas = happy_atlas();
        assert!(atlas.are_concurrent(31, 32, 1).unwrap());
        assert!(!atlas.are_concurrent(16, 37, 4).unwrap());
        assert!(atlas.are_concurrent(16, 16, 4).unwrap());
    }

    #[test]
    fn concurrency_agrees_with_brute_force() {
        let atlas = happy_atlas();
        for m in 1..120u64 {
            for n in 1..120u64 {
                for &u in &[1u64, 4] {
                    let fast = atlas.are_concurrent(m, n, u).unwrap();
                    let cm = atlas.classify(m, u).unwrap();
                    let cn = atlas.classify(n, u).unwrap();
                    let bound = cm.entry_steps.max(cn.entry_steps) + 2 * cm.cycle_len;
                    let mut slow = false;
                    let (mut a, mut b) = (m, n);
                    for _ in 1..=bound {
                        a = atlas.map().eval(a);
                        b = atlas.map().eval(b);
                        if a == u && b == u {
                            slow = true;
                            break;
                        }
                    }
                    assert_eq!(fast, slow, "m={m} n={n} u={u}");
                }
            }
        }
    }

    #[test]
    fn classify_big_matches_small() {
        let atlas = happy_atlas();
        for n in [7u64, 19, 1000, 44488] {
            let a = atlas.classify(n, 1).unwrap();
            let b = atlas.classify_big(&BigUint::from(n), 1).unwrap();
            assert_eq!(a.steps_to_u, b.steps_to_u);
            assert_eq!(a.cycle_index, b.cycle_index);
        }
        // a number too large for u64
        let big = BigUint::parse_bytes(b"123456789012345678901234567890123", 10).unwrap();
        let c = atlas.classify_big(&big, 1).unwrap();
        let mut v = big.clone();
        let mut steps = 0;
        let d = atlas.attractor_set();
        loop {
            if let Some(s) = v.to_u64() {
                if d.contains(&s) {
                    break;
                }
            }
            v = atlas.map().eval_big(&v);
            steps += 1;
        }
        assert_eq!(c.entry_steps, steps);
    }

    #[test]
    fn rejects_bad_inputs() {
        let atlas = happy_atlas();
        assert!(atlas.classify(5, 3).is_err());
        assert!(atlas.classify(0, 1).is_err());
    }
}
