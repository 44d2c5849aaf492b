//! Numerical approximation of Fatou sets, Julia sets and completely
//! invariant Julia sets of finitely generated semigroups of entire and
//! rational maps, on a finite rectangular grid.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod hull;
pub mod invariance;
pub mod output;
pub mod pipeline;

pub use classify::{
    classify_single, fatou_mask, julia_mask_semigroup, julia_mask_single, ClassifyParams,
    OrbitClassification, Reason, Verdict,
};
pub use dynamics::{
    enumerate_words, eval_generator, eval_word, inverse_images, BranchRequest, Family,
    GeneratorSpec, InverseImages, SemigroupWord,
};
pub use error::{Error, Result};
pub use grid::{Cell, Metric, SetMask, Viewport};
pub use hull::{
    build_seed, iterate_hull, perfectness_report, step_hull, subset_report, unboundedness_report,
    HullMode, HullParams, HullResult, HullStatus,
};
pub use invariance::{
    backward_invariance, complete_invariance, forward_invariance, Direction, InvarianceParams,
    InvarianceReport,
};
pub use config::{Output, Scenario, ScenarioConfig, ViewportSpec};
pub use output::{emit_mask_image, emit_report, RunManifest};
pub use pipeline::{render, run_scenario, verify, RenderSet, VerifyOutcome};
