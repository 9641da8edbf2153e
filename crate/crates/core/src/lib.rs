//! Fact-learning bridge between Algebraic Normal Form and Conjunctive Normal Form.
//!
//! A polynomial system over GF(2) is repeatedly handed to eXtended
//! Linearization, ElimLin and a conflict-bounded CDCL solver. Each technique
//! works on a copy of the system; the linear and all-ones-monomial facts it
//! learns are fed back into the master system through ANF propagation until
//! no technique learns anything new.

pub mod anf;
pub mod cnf;
pub mod elimlin;
pub mod error;
pub mod gen;
pub mod gf2;
pub mod io;
pub mod par;
pub mod pipeline;
pub mod sat;
pub mod xl;

pub use anf::{AnfSystem, FactKind, LearntFact, Monomial, Polynomial, Var};
pub use error::{AnfError, ConvertError, GenError, LinalgError, ParseError, ReconstructError};
