//! Counting metric temporal logic (CTMTL) over finite timed words.
//!
//! The crate evaluates formulas pointwise, normalizes threshold untils,
//! compiles CTMTL into plain MTL up to temporal projections, builds the
//! witness extensions that justify the compilation, and solves counting
//! Ehrenfeucht–Fraïssé games.

pub mod eval;
pub mod formula;
pub mod game;
pub mod gen;
pub mod interval;
pub mod posset;
pub mod transform;
pub mod witness;
pub mod word;

pub use formula::{parse_formula, Formula, F};
pub use interval::Interval;
pub use word::TimedWord;
