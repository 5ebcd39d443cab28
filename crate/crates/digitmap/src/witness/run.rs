//! Consecutive runs: an l such that l+1, ..., l+n are all u-integers.
//! SEARCH takes the first suitable run from the sieve; CONSTRUCT lifts an
//! all-offsets shift witness through an additive shift.

use num_bigint::BigUint;
use serde::Serialize;

use crate::sieve::Sieve;

use super::{
    require_premises, shift_all_witness, shift_witness, Strategy, Witness, WitnessContext,
    WitnessError,
};

#[derive(Clone, Debug, Serialize)]
pub struct RunCheck {
    pub offset: u64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunTrace {
    pub u: u64,
    pub n: u64,
    pub strategy: Strategy,
    /// Iteration depth of the lift (CONSTRUCT only).
    pub r: Option<u64>,
    /// The all-offsets shift witness feeding the lift (CONSTRUCT only).
    pub h: Option<Witness>,
    pub witness: Witness,
    pub verified: Vec<RunCheck>,
}

pub fn consecutive_run(
    ctx: &WitnessContext,
    u: u64,
    n: u64,
    strategy: Strategy,
) -> Result<RunTrace, WitnessError> {
    require_premises(ctx.premises)?;
    ctx.atlas.cycle_position(u)?;
    if n == 0 {
        return Err(WitnessError::InvalidInput("run length must be positive".into()));
    }
    match strategy {
        Strategy::Search => search(ctx, u, n),
        Strategy::Construct => construct(ctx, u, n),
    }
}

fn search(ctx: &WitnessContext, u: u64, n: u64) -> Result<RunTrace, WitnessError> {
    let atlas = ctx.atlas;
    let budget = ctx.config.search_budget;
    let sieve = Sieve::new(atlas, budget);
    let runs = sieve.find_runs(u, budget, n, 1)?;
    // l must stay positive, so a run starting at 1 cannot serve
    let record = runs
        .iter()
        .find(|r| r.start >= 2)
        .ok_or(WitnessError::BudgetExhausted {
            what: format!("run of {n} consecutive {u}-integers"),
            budget,
        })?;
    let l = record.start - 1;
    let verified = (1..=n)
        .map(|offset| {
            Ok(RunCheck {
                offset,
                ok: atlas.is_u_integer(l + offset, u)?,
            })
        })
        .collect::<Result<Vec<_>, WitnessError>>()?;
    Ok(RunTrace {
        u,
        n,
        strategy: Strategy::Search,
        r: None,
        h: None,
        witness: Witness::Dense(BigUint::from(l)),
        verified,
    })
}

fn construct(ctx: &WitnessContext, u: u64, n: u64) -> Result<RunTrace, WitnessError> {
    let atlas = ctx.atlas;
    let map = atlas.map();
    // the all-offsets hypothesis; searched, then verified, never trusted
    let shift_all = shift_all_witness(ctx, u, Strategy::Search)?;
    let h_value = shift_all
        .witness
        .as_u64()
        .ok_or(WitnessError::DepthExceeded {
            what: "all-offsets witness exceeds machine range".into(),
        })?;
    // r large enough that every y in [1, n] has stabilized into D
    let r = (1..=n)
        .map(|y| atlas.eventual_cycle(y).map(|(_, s)| s))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap()
        .max(1);
    let lift = shift_witness(map, h_value, n, r, &ctx.config)?;
    let l = lift.witness.clone();
    // f^r(l + y) = h + f^r(y), and h + D consists of u-integers
    let f_l = l.f_eval(map)?;
    let mut verified = Vec::new();
    for offset in 1..=n {
        let mut v = &f_l + map.eval(offset);
        for _ in 1..r {
            v = map.eval_big(&v);
        }
        let expected = BigUint::from(h_value + map.iterate(offset, r));
        let ok = v == expected && atlas.classify_big(&v, u)?.is_u_integer;
        verified.push(RunCheck { offset, ok });
    }
    Ok(RunTrace {
        u,
        n,
        strategy: Strategy::Construct,
        r: Some(r),
        h: Some(shift_all.witness),
        witness: Witness::Sparse(l),
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::CycleAtlas;
    use crate::map::DigitMap;
    use crate::premises::check_premises;
    use crate::witness::WitnessConfig;

    #[test]
    fn search_runs_for_both_cycles() {
        let map = DigitMap::power(2, 10).unwrap();
        let atlas = CycleAtlas::compute(&map).unwrap();
        let prem = check_premises(&map);
        let ctx = WitnessContext::with_config(
            &atlas,
            &prem,
            WitnessConfig {
                search_budget: 100_000,
                ..WitnessConfig::default()
            },
        );
        let t = consecutive_run(&ctx, 1, 3, Strategy::Search).unwrap();
        assert_eq!(t.witness.as_u64(), Some(1879)); // run 1880..1882
        assert!(t.verified.iter().all(|c| c.ok));

        let t = consecutive_run(&ctx, 4, 5, Strategy::Search).unwrap();
        assert_eq!(t.witness.as_u64(), Some(1)); // 2..6 all in the 4-cycle
        assert!(t.verified.iter().all(|c| c.ok));
    }

    #[test]
    fn trivial_single_run() {
        let map = DigitMap::power(2, 10).unwrap();
        let atlas = CycleAtlas::compute(&map).unwrap();
        let prem = check_premises(&map);
        let ctx = WitnessContext::with_config(
            &atlas,
            &prem,
            WitnessConfig {
                search_budget: 1_000,
                ..WitnessConfig::default()
            },
        );
        let t = consecutive_run(&ctx, 4, 1, Strategy::Search).unwrap();
        assert_eq!(t.witness.as_u64(), Some(1));
    }

    #[test]
    fn construct_base_two() {
        let map = DigitMap::new(2, vec![0, 1]).unwrap();
        let atlas = CycleAtlas::compute(&map).unwrap();
        let prem = check_premises(&map);
        let ctx = WitnessContext::new(&atlas, &prem);
        let t = consecutive_run(&ctx, 1, 2, Strategy::Construct).unwrap();
        assert!(t.verified.iter().all(|c| c.ok));
    }
}
