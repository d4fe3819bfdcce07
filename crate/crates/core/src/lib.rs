//! Thompson's group F acting on the dyadic rationals of (0, 1): the Schreier
//! graph with its skeleton and hairs, superharmonic vertex functions, min-
//! functions on the lamplighter, exact strong-approximation verifiers and
//! constructors, random-walk statistics, and the free-group counterexample.

pub mod address;
pub mod approx;
pub mod config;
pub mod dyadic;
pub mod error;
pub mod freegroup;
pub mod harmonic;
pub mod lamplighter;
pub mod minfn;
pub mod pl;
pub mod registry;
pub mod schreier;
pub mod value;
pub mod walk;
pub mod word;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use pl::{cocycle_eval, cocycle_identity_check, gen_a, gen_b, kernel_sample, word_to_pl, PLMap};
pub use value::Value;
pub use word::{FWord, Gen};
pub use address::{HairSide, Orientation, SkeletonPath, StructuralAddress};
pub use config::Config;
pub use schreier::{Ball, BallEdge, GraphConfig, SchreierGraph};
pub use harmonic::{canonical_phi_u, phi_family, SharedFn, VertexFn};
pub use lamplighter::{apply_letter, apply_word, markov_apply_set, markov_iterate, orbit_enumerate, Caps, LampWord, Letter, SetFn, SharedSetFn};
pub use minfn::{minfun, MinFn, PhiFamilySum};
pub use approx::{strong_verify, weak_verify, BetaSchedule, VerifyReport};
pub use walk::WalkConfig;
