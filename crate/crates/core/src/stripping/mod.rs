//! Iterated ground-state removal with compact-support cutoffs, the error
//! ledger, and the moment-inequality verdicts.

mod ledger;
mod verdict;

pub use ledger::{strip_all, strip_once, StripOptions, StripOutcome, StripStep, StrippingTrace, Termination};
pub use verdict::{half_moment_bounds, half_moment_verdict, theorem1_verdict, verify_theorem1, HalfMomentVerdict, Theorem1Verdict};
