//! Congruent u-preimage: a u-integer l with l = a (mod f(b-1)) that is
//! concurrently a u-integer with a given h. CONSTRUCT builds an exact
//! f-preimage chain out of 1-digit blocks and an m*-digit block; SEARCH
//! scans small integers.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::nt;
use crate::sparse::{Run, SparseNumber};

use super::{
    require_premises, DeepWitness, Strategy, Witness, WitnessContext, WitnessError,
};

#[derive(Clone, Debug, Serialize)]
pub struct PreimageConstruct {
    pub m_star: u64,
    pub f_m_star: u64,
    /// d = ord_{f(b-1)}(b)
    pub order: u64,
    /// Dense seed of the preimage chain (a scaled copy of u).
    #[serde(with = "crate::serde_util::biguint_string")]
    pub l1: BigUint,
    /// Solution of l1 - r(f(m*) - m*) = a (mod f(b-1)), 0 <= r < f(b-1).
    pub r: u64,
    /// l1 - r*f(m*): number of 1-digit terms in the first preimage.
    #[serde(with = "crate::serde_util::biguint_string")]
    pub ones_count: BigUint,
    /// Layer index of the returned witness (the seed is layer 1).
    pub chain_depth: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PreimageTrace {
    pub u: u64,
    pub a: u64,
    /// f(b-1)
    pub modulus: u64,
    /// Concurrency anchor: the returned witness shares a phase with h.
    #[serde(with = "crate::serde_util::biguint_string")]
    pub h: BigUint,
    pub strategy: Strategy,
    pub construct: Option<PreimageConstruct>,
    pub witness: Witness,
}

pub fn congruent_u_preimage(
    ctx: &WitnessContext,
    u: u64,
    a: u64,
    h: &BigUint,
    strategy: Strategy,
) -> Result<PreimageTrace, WitnessError> {
    require_premises(ctx.premises)?;
    let atlas = ctx.atlas;
    let q = ctx.premises.f_top;
    let a = if q == 0 { a } else { a % q };
    let h_class = atlas.classify_big(h, u)?;
    if !h_class.is_u_integer {
        return Err(WitnessError::InvalidInput(format!("h = {h} is not a {u}-integer")));
    }
    let target_phase = h_class.phase.unwrap();
    match strategy {
        Strategy::Search => search(ctx, u, a, h, target_phase),
        Strategy::Construct => construct(ctx, u, a, h, target_phase),
    }
}

fn search(
    ctx: &WitnessContext,
    u: u64,
    a: u64,
    h: &BigUint,
    target_phase: u64,
) -> Result<PreimageTrace, WitnessError> {
    let q = ctx.premises.f_top;
    for n in 1..=ctx.config.search_budget {
        if n % q != a {
            continue;
        }
        let c = ctx.atlas.classify(n, u)?;
        if c.is_u_integer && c.phase == Some(target_phase) {
            return Ok(PreimageTrace {
                u,
                a,
                modulus: q,
                h: h.clone(),
                strategy: Strategy::Search,
                construct: None,
                witness: Witness::Dense(BigUint::from(n)),
            });
        }
    }
    Err(WitnessError::BudgetExhausted {
        what: format!("u-integer congruent to {a} mod {q} in phase {target_phase}"),
        budget: ctx.config.search_budget,
    })
}

fn construct(
    ctx: &WitnessContext,
    u: u64,
    a: u64,
    h: &BigUint,
    target_phase: u64,
) -> Result<PreimageTrace, WitnessError> {
    let atlas = ctx.atlas;
    let map = atlas.map();
    let b = map.base();
    let q = ctx.premises.f_top;
    let c = atlas.cycle_len(u)?;

    if q == 1 {
        // every residue is 0 mod 1: the cycle element sharing h's phase works
        let (ci, _) = atlas.cycle_position(u)?;
        let cycle = &atlas.cycles()[ci];
        let l = cycle
            .iter()
            .copied()
            .find(|&w| atlas.classify(w, u).unwrap().phase == Some(target_phase))
            .unwrap();
        return Ok(PreimageTrace {
            u,
            a: 0,
            modulus: 1,
            h: h.clone(),
            strategy: Strategy::Construct,
            construct: None,
            witness: Witness::Dense(BigUint::from(l)),
        });
    }

    let m_star = ctx
        .premises
        .m_star()
        .ok_or_else(|| WitnessError::PremisesNotSatisfied(vec!["no m* digit".into()]))?;
    let f_m_star = map.digit_value(m_star);
    let d = nt::multiplicative_order(b % q, q).ok_or_else(|| {
        WitnessError::InvalidInput(format!("gcd(b, f(b-1)) = gcd({b}, {q}) > 1"))
    })?;

    // seed: scale u by b^d (which is 1 mod q) until it clears f(b-1)*f(m*)
    let bound = BigUint::from(q) * f_m_star;
    let bd = BigUint::from(b).pow(d as u32);
    let mut l1 = BigUint::from(u);
    while l1 <= bound {
        l1 *= &bd;
    }

    // solve l1 - r*(f(m*) - m*) = a (mod q)
    let delta = ((f_m_star as i128 - m_star as i128).rem_euclid(q as i128)) as u64;
    let inv = nt::mod_inverse(delta, q).expect("gcd(f(m*) - m*, f(b-1)) = 1 by premise");
    let l1_mod = (&l1 % q).to_u64().unwrap();
    let r = (l1_mod + q - a) % q * inv % q;

    let ones_count = &l1 - r * f_m_star;
    // l2 = sum of ones_count 1-digits at d, 2d, ... plus r m*-digits spaced
    // by d just above; b^d > m* keeps the blocks separated
    let mut runs = vec![Run::new(d, d, ones_count.clone(), 1)];
    if r > 0 {
        let t_start = (&ones_count + 1u32) * d;
        runs.push(Run {
            start: t_start,
            stride: BigUint::from(d),
            count: BigUint::from(r),
            digit: m_star,
        });
    }
    let l2 = SparseNumber::new(b, runs)?;

    let phase_l1 = atlas.classify_big(&l1, u)?.phase.unwrap();
    let phase_l2 = (phase_l1 + 1) % c;
    let extra = (target_phase + c - phase_l2) % c;
    let chain_depth = 2 + extra;

    let witness = if extra == 0 {
        Witness::Sparse(l2.clone())
    } else {
        // deeper layers repeat the recipe with r = 0: layer i+1 is
        // value(layer i) many 1-digits at exponents d, 2d, ...; each layer
        // advances the phase by exactly 1 and keeps the residue at a
        Witness::Deep(DeepWitness {
            base: b,
            u,
            level: chain_depth,
            concrete_level: 2,
            base_witness: l2.clone(),
            residue: a,
            modulus: q,
            order: d,
            phase: target_phase,
            cycle_len: c,
        })
    };

    Ok(PreimageTrace {
        u,
        a,
        modulus: q,
        h: h.clone(),
        strategy: Strategy::Construct,
        construct: Some(PreimageConstruct {
            m_star,
            f_m_star,
            order: d,
            l1,
            r,
            ones_count,
            chain_depth,
        }),
        witness,
    })
}
