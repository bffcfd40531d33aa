pub mod calculus;
pub mod codec;
pub mod engine;
pub mod error;
pub mod formula;
pub mod lemmas;
pub mod reduction;
pub mod subst;
pub mod tag;
pub mod unify;

pub use calculus::Calculus;
pub use codec::{HatTemplate, WordCodec};
pub use error::{Error, ParseError, Result};
pub use formula::{parse_formula, render_formula, Formula, Kind, Symbol};
pub use subst::{apply_substitution, Substitution};
pub use tag::{parse_tag_system, TagSystem, Word};
pub use unify::{alpha_equal, match_instance, unify, unify_apart};
