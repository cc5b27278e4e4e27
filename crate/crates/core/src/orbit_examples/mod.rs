//! The worked examples: closed-form orbits, closure predicates, witness
//! sequences and the full separating-triple check.

mod checks;
mod model;
mod ops;

pub use checks::*;
pub use model::*;
pub use ops::*;
