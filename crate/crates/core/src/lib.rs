//! Exact-arithmetic toolkit for modal logics of high probability.
//!
//! Two semantics for knowledge `K` and belief `B`: probability models where
//! `Bφ` means the conditional probability of `φ` exceeds a threshold, and
//! neighborhood models. The crate checks formulas on both, relates them by
//! thresholding and by exact LP synthesis of agreeing measures, and checks
//! Hilbert-style derivations in the calculi KB, KB½ and KB½⁻.

pub mod calculus;
pub mod corpus;
pub mod event;
pub mod formula;
pub mod model;
pub mod modelfile;
pub mod neighborhood;
pub mod rational;
pub mod semantics;
pub mod synthesis;

pub use event::EventSet;
pub use formula::{parse_kb, parse_l, translate, Formula, ProbFormula, SegerbergMode, Term, Threshold};
pub use model::{
    bayesian_update, conditional_probability, make_probability_model, Frame, ModelError, NeighborhoodModel,
    NeighborhoodSystem, ProbabilityModel,
};
pub use neighborhood::{
    check_agreement, check_base_properties, check_conjectured, check_mid_threshold, derive_neighborhoods,
    BruteForceBudget, PropertyReport, Verdict, Witness,
};
pub use rational::Rational;
pub use semantics::{eval_kb_nbhd, eval_kb_prob, eval_l, eval_segerberg_direct, valid_in_model, ModelRef};
