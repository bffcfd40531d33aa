//! Derivability in calculi with modus ponens and substitution.

mod chain;
mod closure;
mod oracle;
mod trace;

pub use chain::{axiom_link, chain_check, chain_to_trace, derive_weakening, ChainProof};
pub use closure::{
    closure_level, closure_level_with, condensed_detach, condensed_detach_full, derives, derives_in, ClosureConfig,
    ClosureLevel, Detachment, Generator, Verdict, DEFAULT_GENERATOR_CAP, GENERATOR_CAP_ENV,
};
pub use oracle::{naive_closure_oracle, naive_closure_oracle_with, DEFAULT_ORACLE_BUDGET};
pub use trace::{check_trace, DerivationTrace, Step, StepJson, TraceFault, TraceJson};
