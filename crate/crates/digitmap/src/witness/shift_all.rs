//! All-offsets shift: an h such that h + x is a u-integer for every x in
//! the attractor set D. SEARCH scans a sieve bitmap; CONSTRUCT runs the
//! subset induction, manufacturing each pairwise hypothesis from a
//! concurrent-pair witness and lifting with an additive shift witness.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::sieve::Sieve;

use super::{pair, require_premises, shift_witness, Strategy, Witness, WitnessContext, WitnessError};

#[derive(Clone, Debug, Serialize)]
pub struct ShiftAllCert {
    pub x: u64,
    #[serde(with = "crate::serde_util::biguint_string")]
    pub value: BigUint,
    pub steps_to_u: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftAllTrace {
    pub u: u64,
    pub strategy: Strategy,
    pub witness: Witness,
    /// One entry per x in D, confirming h + x is a u-integer.
    pub certificates: Vec<ShiftAllCert>,
}

pub fn shift_all_witness(
    ctx: &WitnessContext,
    u: u64,
    strategy: Strategy,
) -> Result<ShiftAllTrace, WitnessError> {
    require_premises(ctx.premises)?;
    ctx.atlas.cycle_position(u)?;
    let h = match strategy {
        Strategy::Search => search(ctx, u)?,
        Strategy::Construct => {
            let d: BTreeSet<u64> = ctx.atlas.attractor_set().into_iter().collect();
            construct_for_subset(ctx, u, &d)?
        }
    };
    let certificates = certify(ctx, u, &h)?;
    Ok(ShiftAllTrace {
        u,
        strategy,
        witness: Witness::Dense(h),
        certificates,
    })
}

fn certify(
    ctx: &WitnessContext,
    u: u64,
    h: &BigUint,
) -> Result<Vec<ShiftAllCert>, WitnessError> {
    let mut out = Vec::new();
    for x in ctx.atlas.attractor_set() {
        let value = h + x;
        let class = ctx.atlas.classify_big(&value, u)?;
        if !class.is_u_integer {
            return Err(WitnessError::InvalidInput(format!(
                "certificate failure: {value} is not a {u}-integer"
            )));
        }
        out.push(ShiftAllCert {
            x,
            value,
            steps_to_u: class.steps_to_u.unwrap(),
        });
    }
    Ok(out)
}

fn search(ctx: &WitnessContext, u: u64) -> Result<BigUint, WitnessError> {
    let atlas = ctx.atlas;
    let d = atlas.attractor_set();
    let max_d = *d.iter().max().unwrap();
    let budget = ctx.config.search_budget;
    let (u_cycle, _) = atlas.cycle_position(u)?;
    let sieve = Sieve::new(atlas, budget + max_d);
    'outer: for h in 1..=budget {
        for &x in &d {
            if sieve.cycle_index(h + x) != u_cycle as u32 {
                continue 'outer;
            }
        }
        return Ok(BigUint::from(h));
    }
    Err(WitnessError::BudgetExhausted {
        what: format!("h with h + x a {u}-integer for all x in D"),
        budget,
    })
}

/// Subset induction: h for X = D is assembled from h for a strictly
/// smaller image set X*.
fn construct_for_subset(
    ctx: &WitnessContext,
    u: u64,
    xs: &BTreeSet<u64>,
) -> Result<BigUint, WitnessError> {
    let atlas = ctx.atlas;
    let map = atlas.map();
    if xs.len() <= 1 {
        // only u itself: any u-integer beyond u shifted back works
        let l = smallest_u_integer_above(ctx, u, u)?;
        return Ok(BigUint::from(l - u));
    }
    let x = *xs.iter().find(|&&y| y != u).unwrap();
    // pairwise hypothesis: h_x with h_x + u and h_x + x concurrently
    // u-integers, manufactured from a concurrent-pair witness by offset
    let h_x = if x > u {
        let l = pair::search(ctx, u, x - u, u + 1)?.witness.as_u64().unwrap();
        l - u
    } else {
        let l = pair::search(ctx, u, u - x, x + 1)?.witness.as_u64().unwrap();
        l - x
    };
    if xs.len() == 2 {
        return Ok(BigUint::from(h_x));
    }
    let c = atlas.cycle_len(u)?;
    let su = atlas.classify(h_x + u, u)?.steps_to_u.unwrap();
    let sx = atlas.classify(h_x + x, u)?.steps_to_u.unwrap();
    let max_entry = xs
        .iter()
        .map(|&y| atlas.eventual_cycle(h_x + y).map(|(_, s)| s))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap();
    let mut r = su.max(sx).max(max_entry).max(1);
    while r % c != su % c {
        r += 1;
    }
    let image: BTreeSet<u64> = xs.iter().map(|&y| map.iterate(h_x + y, r)).collect();
    debug_assert!(image.contains(&u) && image.len() < xs.len());
    let h_star = construct_for_subset(ctx, u, &image)?;
    let h_star_small = h_star.to_u64().ok_or(WitnessError::DepthExceeded {
        what: "inductive shift target exceeds machine range".into(),
    })?;
    let m = xs.iter().map(|&y| h_x + y).max().unwrap();
    let lift = shift_witness(map, h_star_small, m, r, &ctx.config)?;
    let l_value = lift
        .witness
        .to_dense(ctx.config.dense_digit_limit)
        .map_err(|_| WitnessError::DepthExceeded {
            what: "inductive lift is not densifiable".into(),
        })?;
    Ok(l_value + h_x)
}

fn smallest_u_integer_above(
    ctx: &WitnessContext,
    u: u64,
    above: u64,
) -> Result<u64, WitnessError> {
    for n in above + 1..=above + ctx.config.search_budget {
        if ctx.atlas.is_u_integer(n, u)? {
            return Ok(n);
        }
    }
    Err(WitnessError::BudgetExhausted {
        what: format!("u-integer above {above}"),
        budget: ctx.config.search_budget,
    })
}
