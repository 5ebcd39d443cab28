//! Concurrent pair: a u-integer l such that l and l + x are concurrently
//! u-integers. CONSTRUCT executes the proof chain verbatim, recording every
//! intermediate for replay; SEARCH scans small l directly.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::nt;
use crate::sparse::{Run, SparseNumber};

use super::{require_premises, Strategy, Witness, WitnessContext, WitnessError};

#[derive(Clone, Debug, Serialize)]
pub struct PairAnchor {
    /// Cycle element this anchor is concurrent with.
    pub v: u64,
    /// A u-integer congruent to 1 mod f(b-1) sharing v's phase.
    pub l_v: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairConstruct {
    /// Smallest s with b^s > x.
    pub s: u64,
    /// x1 = b^s - x.
    pub x1: u64,
    pub f_x1: u64,
    /// Seed u-integer congruent to f(x1) mod f(b-1).
    #[serde(with = "crate::serde_util::biguint_string")]
    pub h_prime: BigUint,
    /// The cycle V containing u.
    pub cycle: Vec<u64>,
    pub anchors: Vec<PairAnchor>,
    /// M = max over the anchors.
    pub m_max: u64,
    /// Number of b^phi(f(b-1)) boosts applied to h'.
    pub boost: u64,
    #[serde(with = "crate::serde_util::biguint_string")]
    pub h: BigUint,
    /// Cycle element concurrent with h.
    pub v: u64,
    /// N = the anchor for v.
    #[serde(with = "crate::serde_util::biguint_string")]
    pub n_value: BigUint,
    #[serde(with = "crate::serde_util::biguint_string")]
    pub t: BigUint,
    pub x2: SparseNumber,
    #[serde(with = "crate::serde_util::biguint_string")]
    pub k: BigUint,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairTrace {
    pub u: u64,
    pub x: u64,
    /// f(b-1)
    pub modulus: u64,
    pub strategy: Strategy,
    pub construct: Option<PairConstruct>,
    pub witness: Witness,
}

pub fn concurrent_pair(
    ctx: &WitnessContext,
    u: u64,
    x: u64,
    strategy: Strategy,
) -> Result<PairTrace, WitnessError> {
    require_premises(ctx.premises)?;
    if x == 0 {
        return Err(WitnessError::InvalidInput("x must be positive".into()));
    }
    ctx.atlas.cycle_position(u)?;
    match strategy {
        Strategy::Search => search(ctx, u, x, 1),
        Strategy::Construct => construct(ctx, u, x),
    }
}

/// SEARCH with a lower bound on l; shift-all glue needs l above u or x.
pub(crate) fn search(
    ctx: &WitnessContext,
    u: u64,
    x: u64,
    min_l: u64,
) -> Result<PairTrace, WitnessError> {
    let atlas = ctx.atlas;
    for l in min_l..=ctx.config.search_budget {
        if atlas.are_concurrent(l, l + x, u)? {
            return Ok(PairTrace {
                u,
                x,
                modulus: ctx.premises.f_top,
                strategy: Strategy::Search,
                construct: None,
                witness: Witness::Dense(BigUint::from(l)),
            });
        }
    }
    Err(WitnessError::BudgetExhausted {
        what: format!("l with l and l+{x} concurrently {u}-integers"),
        budget: ctx.config.search_budget,
    })
}

/// Smallest u-integer congruent to a mod q with the given phase, or any
/// phase when `phase` is None.
fn scan_u_integer(
    ctx: &WitnessContext,
    u: u64,
    a: u64,
    phase: Option<u64>,
) -> Result<u64, WitnessError> {
    let q = ctx.premises.f_top;
    for n in 1..=ctx.config.search_budget {
        if n % q != a % q {
            continue;
        }
        let c = ctx.atlas.classify(n, u)?;
        if c.is_u_integer && (phase.is_none() || c.phase == phase) {
            return Ok(n);
        }
    }
    Err(WitnessError::StrategyInfeasible(format!(
        "no small u-integer congruent to {a} mod {q} for the proof chain; \
         the symbolic alternative would make the run count tower"
    )))
}

fn construct(ctx: &WitnessContext, u: u64, x: u64) -> Result<PairTrace, WitnessError> {
    let atlas = ctx.atlas;
    let map = atlas.map();
    let b = map.base();
    let q = ctx.premises.f_top;

    // s minimal with b^s > x
    let mut s = 0u64;
    let mut pow = 1u128;
    while pow <= x as u128 {
        pow = pow
            .checked_mul(b as u128)
            .ok_or_else(|| WitnessError::InvalidInput("x too large".into()))?;
        s += 1;
    }
    let x1 = (pow - x as u128) as u64;
    let f_x1 = map.eval(x1);

    // h': a u-integer congruent to f(x1) mod f(b-1)
    let h_prime = BigUint::from(scan_u_integer(ctx, u, f_x1 % q.max(1), None)?);

    // anchors: for each v' in u's cycle, l_{v'} = 1 (mod f(b-1)) concurrent
    // with v'
    let (ci, _) = atlas.cycle_position(u)?;
    let cycle = atlas.cycles()[ci].clone();
    let mut anchors = Vec::with_capacity(cycle.len());
    for &v_prime in &cycle {
        let phase = atlas.classify(v_prime, u)?.phase;
        let l_v = scan_u_integer(ctx, u, 1 % q.max(1), phase)?;
        anchors.push(PairAnchor { v: v_prime, l_v });
    }
    let m_max = anchors.iter().map(|a| a.l_v).max().unwrap();

    // boost h' by powers of b^phi(f(b-1)) until h > f(x1) + M; multiplying
    // by a power of b preserves the residue and the phase
    let phi = nt::euler_phi(q.max(1));
    let b_phi = BigUint::from(b).pow(phi as u32);
    let bound = BigUint::from(f_x1) + m_max;
    let mut h = h_prime.clone();
    let mut boost = 0u64;
    while h <= bound {
        h *= &b_phi;
        boost += 1;
    }

    // v: the cycle element concurrent with h; N: its anchor
    let h_phase = atlas.classify_big(&h, u)?.phase.unwrap();
    let v = *cycle
        .iter()
        .find(|&&w| atlas.classify(w, u).unwrap().phase == Some(h_phase))
        .unwrap();
    let n_value = BigUint::from(
        anchors.iter().find(|a| a.v == v).unwrap().l_v,
    );

    // t with b^t > b^(s + floor(h / f(b-1)) + 1)
    let t = BigUint::from(s) + &h / q.max(1) + 2u32;

    // x2 = x1 + b^t * (b + b^2 + ... + b^(N-1))
    let mut x2 = SparseNumber::from_u64(b, x1)?;
    if n_value > BigUint::one() {
        x2 = x2.add_disjoint(&SparseNumber::new(
            b,
            vec![Run {
                start: &t + 1u32,
                stride: BigUint::one(),
                count: &n_value - 1u32,
                digit: 1,
            }],
        )?)?;
    }
    let f_x2 = x2.f_eval(map)?;
    debug_assert_eq!(f_x2, BigUint::from(f_x1) + &n_value - 1u32);

    // h = f(b-1) k + f(x2) with k >= 1 and k < t - s
    let (k, rem) = (&h - &f_x2).div_rem(&BigUint::from(q.max(1)));
    if !rem.is_zero() || k.is_zero() {
        return Err(WitnessError::InvalidInput(format!(
            "proof chain violated: h = {h}, f(x2) = {f_x2}, q = {q}"
        )));
    }

    // l = x2 + (b-1)(b^s + ... + b^(s+k-1))
    let l = x2.add_disjoint(&SparseNumber::new(
        b,
        vec![Run {
            start: BigUint::from(s),
            stride: BigUint::one(),
            count: k.clone(),
            digit: b - 1,
        }],
    )?)?;

    Ok(PairTrace {
        u,
        x,
        modulus: q,
        strategy: Strategy::Construct,
        construct: Some(PairConstruct {
            s,
            x1,
            f_x1,
            h_prime,
            cycle,
            anchors,
            m_max,
            boost,
            h,
            v,
            n_value,
            t,
            x2,
            k,
        }),
        witness: Witness::Sparse(l),
    })
}

/// The digit expansion of l + x, derived without carrying arithmetic:
/// l + x = b^(s+k) + b^t (b + ... + b^(N-1)).
pub(crate) fn shifted_sum(construct: &PairConstruct, base: u64) -> Result<SparseNumber, WitnessError> {
    let mut runs = vec![Run {
        start: BigUint::from(construct.s) + &construct.k,
        stride: BigUint::one(),
        count: BigUint::one(),
        digit: 1,
    }];
    if construct.n_value > BigUint::one() {
        runs.push(Run {
            start: &construct.t + 1u32,
            stride: BigUint::one(),
            count: &construct.n_value - 1u32,
            digit: 1,
        });
    }
    SparseNumber::new(base, runs).map_err(Into::into)
}
