//! Boolean polynomials over GF(2), the polynomial system with its per-variable
//! state, and ANF propagation.

mod fact;
mod poly;
mod system;

pub use fact::{FactKind, LearntFact};
pub use poly::{poly, Monomial, Polynomial, Var};
pub use system::{AnfSystem, Lit, Resolved, VarState};
