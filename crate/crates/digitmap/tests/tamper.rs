//! Fault injection: a verifier that accepts doctored traces is worthless.

use num_bigint::BigUint;

use digitmap::atlas::CycleAtlas;
use digitmap::map::DigitMap;
use digitmap::premises::{check_premises, PremiseReport};
use digitmap::witness::{
    concurrent_pair, congruent_u_preimage, consecutive_run, shift_all_witness, shift_witness,
    verify_witness, Strategy, Witness, WitnessConfig, WitnessContext, WitnessTrace,
};

fn happy() -> (CycleAtlas, PremiseReport) {
    let map = DigitMap::power(2, 10).unwrap();
    let atlas = CycleAtlas::compute(&map).unwrap();
    let premises = check_premises(&map);
    (atlas, premises)
}

fn failed_names(ctx: &WitnessContext, trace: &WitnessTrace) -> Vec<String> {
    verify_witness(ctx, trace)
        .checks
        .into_iter()
        .filter(|c| !c.pass)
        .map(|c| c.name)
        .collect()
}

#[test]
fn tampered_pair_k_is_caught() {
    let (atlas, premises) = happy();
    let ctx = WitnessContext::new(&atlas, &premises);
    let mut trace = concurrent_pair(&ctx, 1, 2, Strategy::Construct).unwrap();
    assert!(verify_witness(&ctx, &WitnessTrace::Pair(trace.clone())).ok());
    trace.construct.as_mut().unwrap().k += 1u32;
    let failed = failed_names(&ctx, &WitnessTrace::Pair(trace));
    assert!(
        failed.contains(&"k-decomposition".to_string())
            || failed.contains(&"l-shape".to_string()),
        "bumped k slipped through: {failed:?}"
    );
}

#[test]
fn tampered_pair_h_is_caught() {
    let (atlas, premises) = happy();
    let ctx = WitnessContext::new(&atlas, &premises);
    let mut trace = concurrent_pair(&ctx, 1, 1, Strategy::Construct).unwrap();
    trace.construct.as_mut().unwrap().h += 81u32; // keeps the residue, breaks f(l) = h
    let failed = failed_names(&ctx, &WitnessTrace::Pair(trace));
    assert!(!failed.is_empty(), "bumped h slipped through");
}

#[test]
fn tampered_deep_residue_is_caught() {
    let (atlas, premises) = happy();
    let ctx = WitnessContext::new(&atlas, &premises);
    let h = BigUint::from(16u32);
    let mut trace = congruent_u_preimage(&ctx, 4, 3, &h, Strategy::Construct).unwrap();
    assert!(verify_witness(&ctx, &WitnessTrace::Preimage(trace.clone())).ok());
    match &mut trace.witness {
        Witness::Deep(d) => d.residue = (d.residue + 1) % 81,
        _ => panic!("expected a deep witness for the 8-cycle"),
    }
    let failed = failed_names(&ctx, &WitnessTrace::Preimage(trace));
    assert!(
        failed.contains(&"layer-residue".to_string()),
        "forged residue slipped through: {failed:?}"
    );
}

#[test]
fn tampered_deep_phase_is_caught() {
    let (atlas, premises) = happy();
    let ctx = WitnessContext::new(&atlas, &premises);
    let h = BigUint::from(16u32);
    let mut trace = congruent_u_preimage(&ctx, 4, 3, &h, Strategy::Construct).unwrap();
    match &mut trace.witness {
        Witness::Deep(d) => d.level += 1, // claims one more symbolic layer
        _ => panic!("expected a deep witness"),
    }
    let failed = failed_names(&ctx, &WitnessTrace::Preimage(trace));
    assert!(
        failed.contains(&"phase-arithmetic".to_string()),
        "forged layer count slipped through: {failed:?}"
    );
}

#[test]
fn tampered_sparse_preimage_residue_is_caught() {
    let (atlas, premises) = happy();
    let ctx = WitnessContext::new(&atlas, &premises);
    let one = BigUint::from(1u32);
    let mut trace = congruent_u_preimage(&ctx, 1, 5, &one, Strategy::Construct).unwrap();
    trace.a = 6; // claim a different residue for the same witness
    let failed = failed_names(&ctx, &WitnessTrace::Preimage(trace));
    assert!(failed.contains(&"residue".to_string()), "{failed:?}");
}

#[test]
fn tampered_shift_all_certificate_is_caught() {
    let map = DigitMap::new(2, vec![0, 1]).unwrap();
    let atlas = CycleAtlas::compute(&map).unwrap();
    let premises = check_premises(&map);
    let ctx = WitnessContext::new(&atlas, &premises);
    let mut trace = shift_all_witness(&ctx, 1, Strategy::Search).unwrap();
    assert!(verify_witness(&ctx, &WitnessTrace::ShiftAll(trace.clone())).ok());
    trace.certificates[0].steps_to_u += 1;
    let failed = failed_names(&ctx, &WitnessTrace::ShiftAll(trace));
    assert!(failed.contains(&"offset".to_string()), "{failed:?}");
}

#[test]
fn tampered_run_witness_is_caught() {
    let (atlas, premises) = happy();
    let ctx = WitnessContext::with_config(
        &atlas,
        &premises,
        WitnessConfig {
            search_budget: 100_000,
            ..WitnessConfig::default()
        },
    );
    let mut trace = consecutive_run(&ctx, 1, 3, Strategy::Search).unwrap();
    assert!(verify_witness(&ctx, &WitnessTrace::Run(trace.clone())).ok());
    trace.witness = Witness::Dense(BigUint::from(1880u32)); // run shifts off by one
    let failed = failed_names(&ctx, &WitnessTrace::Run(trace));
    assert!(failed.contains(&"member".to_string()), "{failed:?}");
}

#[test]
fn tampered_shift_target_is_caught() {
    let (atlas, premises) = happy();
    let ctx = WitnessContext::new(&atlas, &premises);
    let map = atlas.map();
    let mut trace = shift_witness(map, 3, 99, 1, &ctx.config).unwrap();
    assert!(verify_witness(&ctx, &WitnessTrace::Shift(trace.clone())).ok());
    trace.x = 4;
    let failed = failed_names(&ctx, &WitnessTrace::Shift(trace));
    assert!(failed.contains(&"iterated-value".to_string()), "{failed:?}");
}
