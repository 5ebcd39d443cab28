//! Dynamics of digit maps f(sum a_i b^i) = sum f*(a_i): cycle atlases over
//! the finite attractor range, premise checking for the density theorem,
//! constructive witnesses with replay verification, sparse big-integer
//! digit arithmetic, and a brute-force sieve.

pub mod atlas;
pub mod map;
pub mod nt;
pub mod premises;
pub mod serde_util;
pub mod sieve;
pub mod sparse;
pub mod witness;

pub use atlas::{Classification, CycleAtlas};
pub use map::DigitMap;
pub use premises::{check_premises, construct_g, pan_condition, PremiseReport};
pub use sieve::Sieve;
pub use sparse::SparseNumber;
pub use witness::{
    concurrent_pair, congruent_u_preimage, consecutive_run, shift_all_witness, shift_witness,
    verify_witness, Strategy, Witness, WitnessConfig, WitnessContext, WitnessError, WitnessTrace,
};
