use thiserror::Error;

use crate::anf::{Polynomial, Var};

#[derive(Debug, Error)]
pub enum AnfError {
    #[error("cannot substitute {0} by a polynomial that contains it")]
    SelfSubstitution(Var),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("row {index} out of range for a matrix with {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("cannot xor row {0} into itself")]
    SameRow(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConvertError {
    #[error("polynomial {poly} has {vars} variables, more than the Karnaugh bound {bound}")]
    TooManyVars {
        poly: Polynomial,
        vars: usize,
        bound: usize,
    },
    #[error("invalid conversion parameters: {0}")]
    Params(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReconstructError {
    #[error("no value supplied for free variable {0}")]
    MissingVar(Var),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}
