//! Brute-force range classifier and run explorer: the verification oracle
//! for every witness construction, and the empirical answer to gap queries.

use serde::Serialize;

use crate::atlas::{AtlasError, CycleAtlas};

/// A maximal block of consecutive u-integers found by a scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub u: u64,
    pub start: u64,
    pub length: u64,
    /// True when the run touches the scan boundary, so maximality on that
    /// side is unknown.
    pub clipped: bool,
}

pub struct Sieve<'a> {
    atlas: &'a CycleAtlas,
    /// memo[n] = cycle index of n, for n in 1..=cap
    memo: Vec<u32>,
    cap: u64,
}

impl<'a> Sieve<'a> {
    /// Builds the memo table over [1, max(cap, T)]. Beyond it a single
    /// f-step lands back inside, since f contracts above T.
    pub fn new(atlas: &'a CycleAtlas, cap: u64) -> Self {
        let cap = cap.max(atlas.threshold());
        let map = atlas.map();
        let mut memo = vec![0u32; cap as usize + 1];
        for n in 1..=atlas.threshold() {
            memo[n as usize] = atlas.eventual_cycle(n).unwrap().0 as u32;
        }
        for n in atlas.threshold() + 1..=cap {
            memo[n as usize] = memo[map.eval(n) as usize];
        }
        Sieve { atlas, memo, cap }
    }

    pub fn atlas(&self) -> &CycleAtlas {
        self.atlas
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn cycle_index(&self, n: u64) -> u32 {
        let mut v = n;
        while v > self.cap {
            v = self.atlas.map().eval(v);
        }
        self.memo[v as usize]
    }

    /// Cycle index of each n in [lo, hi]. Chunk boundaries are fixed by
    /// position, so the output is identical for any worker count.
    pub fn classify_range(&self, lo: u64, hi: u64, threads: usize) -> Vec<u32> {
        assert!(lo >= 1 && lo <= hi);
        let len = (hi - lo + 1) as usize;
        let mut out = vec![0u32; len];
        let threads = threads.max(1);
        if threads == 1 || len < 4096 {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = self.cycle_index(lo + i as u64);
            }
            return out;
        }
        const CHUNK: usize = 65_536;
        let next = std::sync::atomic::AtomicUsize::new(0);
        let chunks: Vec<&mut [u32]> = out.chunks_mut(CHUNK).collect();
        let n_chunks = chunks.len();
        let chunks = std::sync::Mutex::new(chunks.into_iter().map(Some).collect::<Vec<_>>());
        std::thread::scope(|s| {
            for _ in 0..threads.min(n_chunks) {
                s.spawn(|| loop {
                    let idx = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if idx >= n_chunks {
                        break;
                    }
                    let chunk = chunks.lock().unwrap()[idx].take().unwrap();
                    let base = lo + (idx * CHUNK) as u64;
                    for (i, slot) in chunk.iter_mut().enumerate() {
                        *slot = self.cycle_index(base + i as u64);
                    }
                });
            }
        });
        out
    }

    /// All maximal runs of u-integers in [1, bound] with length >= min_len.
    pub fn find_runs(
        &self,
        u: u64,
        bound: u64,
        min_len: u64,
        threads: usize,
    ) -> Result<Vec<RunRecord>, AtlasError> {
        let (u_cycle, _) = self.atlas.cycle_position(u)?;
        let classes = self.classify_range(1, bound, threads);
        let mut out = Vec::new();
        let mut run_start: Option<u64> = None;
        for n in 1..=bound {
            let hit = classes[(n - 1) as usize] == u_cycle as u32;
            match (hit, run_start) {
                (true, None) => run_start = Some(n),
                (false, Some(start)) => {
                    let length = n - start;
                    if length >= min_len {
                        out.push(RunRecord {
                            u,
                            start,
                            length,
                            clipped: false,
                        });
                    }
                    run_start = None;
                }
                _ => {}
            }
        }
        if let Some(start) = run_start {
            let length = bound - start + 1;
            if length >= min_len {
                out.push(RunRecord {
                    u,
                    start,
                    length,
                    clipped: true,
                });
            }
        }
        Ok(out)
    }

    /// Smallest start of a run of length >= m within the budget.
    pub fn first_run_of_length(
        &self,
        u: u64,
        m: u64,
        budget: u64,
    ) -> Result<Option<RunRecord>, AtlasError> {
        let (u_cycle, _) = self.atlas.cycle_position(u)?;
        let mut start = 0u64;
        let mut len = 0u64;
        for n in 1..=budget {
            if self.cycle_index(n) == u_cycle as u32 {
                if len == 0 {
                    start = n;
                }
                len += 1;
                if len >= m {
                    // extend to the maximal run for an honest record
                    let mut end = n;
                    while end + 1 <= budget && self.cycle_index(end + 1) == u_cycle as u32 {
                        end += 1;
                    }
                    return Ok(Some(RunRecord {
                        u,
                        start,
                        length: end - start + 1,
                        clipped: end == budget,
                    }));
                }
            } else {
                len = 0;
            }
        }
        Ok(None)
    }
}
