//! LTL syntax, progression and three-valued verdicts.

pub mod formula;
pub mod lasso;
pub mod parser;
pub mod progress;
pub mod render;
pub mod simplify;

pub use formula::{is_valid_prop_name, verdict_of, Formula, TruthAssignment, Verdict};
pub use lasso::{evaluate_lasso, LassoError};
pub use parser::{parse, ParseError, ParseErrorKind};
pub use progress::{progress, progress_simplified};
pub use render::{render, Style};
pub use simplify::simplify;
