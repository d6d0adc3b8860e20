#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]
pub mod composites;
pub mod error;
pub mod exact;
pub mod gpt;
pub mod lp;
pub mod minkowski;
pub mod oracle;
pub mod poincare_rep;
pub mod report;
pub mod rotation;
pub mod scalar;
pub mod zoo;

pub use error::{GptError, Result};
pub use gpt::{
    apply_map, convex_mix, is_normalized_effect, is_reversible, probability, ConvexSet,
    EffectConvention, EffectSpace, GptVector, LinearMap, MembershipReport, TheorySpec,
    DEFAULT_TOL,
};
pub use report::VerificationReport;
