//! Exact extended rationals, continued fractions, depth and rank, and the
//! homeomorphism `φ(x) = x/(x+1)` between `[0, ∞]` and `[0, 1]`.

mod cont_frac;
mod ext_rat;

pub use cont_frac::{eval_terms, parse_terms, ContFrac};
pub use ext_rat::ExtRat;
