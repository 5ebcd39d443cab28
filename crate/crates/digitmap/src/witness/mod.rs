//! Constructive witnesses: explicit integers realizing the additive-shift,
//! congruent-preimage, concurrent-pair, all-offsets-shift, and
//! consecutive-run statements, each with a SEARCH strategy (small
//! brute-forced witnesses) and a CONSTRUCT strategy (the proof recipe),
//! plus an exact replay verifier.

mod pair;
mod preimage;
mod run;
mod shift;
mod shift_all;
mod verify;

pub use pair::{concurrent_pair, PairConstruct, PairTrace};
pub use preimage::{congruent_u_preimage, PreimageConstruct, PreimageTrace};
pub use run::{consecutive_run, RunCheck, RunTrace};
pub use shift::{shift_witness, ShiftLevel, ShiftTrace};
pub use shift_all::{shift_all_witness, ShiftAllCert, ShiftAllTrace};
pub use verify::{verify_witness, VerificationReport, VerifyCheck};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::atlas::AtlasError;
use crate::map::MapError;
use crate::premises::PremiseReport;
use crate::sparse::{SparseError, SparseNumber};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Search,
    Construct,
}

#[derive(Clone, Debug)]
pub struct WitnessConfig {
    /// Candidates a SEARCH scan may try before giving up.
    pub search_budget: u64,
    /// Concrete recursion layers allowed before a construction must go
    /// symbolic or report depth-exceeded.
    pub depth_limit: u64,
    /// Largest dense expansion (in digits) any intermediate may take.
    pub dense_digit_limit: u64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            search_budget: 10_000_000,
            depth_limit: 2,
            dense_digit_limit: 200_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("theorem premises not satisfied: {0:?}")]
    PremisesNotSatisfied(Vec<String>),
    #[error("{what}: no witness within budget {budget}")]
    BudgetExhausted { what: String, budget: u64 },
    #[error("{what}: construction exceeds the concrete depth limit")]
    DepthExceeded { what: String },
    #[error("strategy infeasible: {0}")]
    StrategyInfeasible(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// A symbolic k-fold preimage: layers beyond `concrete_level` exist only as
/// the recipe "next layer = value-of-this-layer one-digits at exponents
/// order, 2*order, 3*order, ...", which applies f to drop one layer.
#[derive(Clone, Debug, Serialize)]
pub struct DeepWitness {
    pub base: u64,
    pub u: u64,
    /// Index of the layer this witness denotes (layer 1 is the dense seed).
    pub level: u64,
    /// Layer actually stored in `base_witness`.
    pub concrete_level: u64,
    pub base_witness: SparseNumber,
    /// Declared residue of every layer >= 2 modulo `modulus` = f(b-1).
    pub residue: u64,
    pub modulus: u64,
    /// d = ord_{f(b-1)}(b); all symbolic exponents are multiples of d.
    pub order: u64,
    /// Phase of the denoted layer modulo the cycle length.
    pub phase: u64,
    pub cycle_len: u64,
}

/// A witness in whichever representation stayed feasible.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Witness {
    Dense(#[serde(with = "crate::serde_util::biguint_string")] BigUint),
    Sparse(SparseNumber),
    Deep(DeepWitness),
}

impl Witness {
    /// Exact dense value when the representation permits one.
    pub fn dense_value(&self, limit_digits: u64) -> Option<BigUint> {
        match self {
            Witness::Dense(v) => Some(v.clone()),
            Witness::Sparse(s) => s.to_dense(limit_digits).ok(),
            Witness::Deep(_) => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Witness::Dense(v) => v.to_u64(),
            _ => None,
        }
    }
}

pub(crate) fn require_premises(report: &PremiseReport) -> Result<(), WitnessError> {
    if report.ok {
        Ok(())
    } else {
        Err(WitnessError::PremisesNotSatisfied(report.failures.clone()))
    }
}

/// Everything a witness construction is allowed to see.
pub struct WitnessContext<'a> {
    pub atlas: &'a crate::atlas::CycleAtlas,
    pub premises: &'a PremiseReport,
    pub config: WitnessConfig,
}

impl<'a> WitnessContext<'a> {
    pub fn new(atlas: &'a crate::atlas::CycleAtlas, premises: &'a PremiseReport) -> Self {
        WitnessContext {
            atlas,
            premises,
            config: WitnessConfig::default(),
        }
    }

    pub fn with_config(
        atlas: &'a crate::atlas::CycleAtlas,
        premises: &'a PremiseReport,
        config: WitnessConfig,
    ) -> Self {
        WitnessContext {
            atlas,
            premises,
            config,
        }
    }
}

/// Full record of one witness construction, kept for replay verification.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "statement")]
pub enum WitnessTrace {
    #[serde(rename = "L21")]
    Shift(ShiftTrace),
    #[serde(rename = "L23")]
    Preimage(PreimageTrace),
    #[serde(rename = "C22")]
    Pair(PairTrace),
    #[serde(rename = "L22")]
    ShiftAll(ShiftAllTrace),
    #[serde(rename = "T11")]
    Run(RunTrace),
}
