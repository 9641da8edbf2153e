//! CNF clauses and the conversions between ANF and CNF.

mod anf2cnf;
mod cnf2anf;
mod karnaugh;
mod map;

use std::fmt;
use std::ops::Not;

pub use anf2cnf::{anf_to_cnf, anf_to_cnf_with, xor_to_clauses, ConvParams};
pub use cnf2anf::{cnf_to_anf, split_clause};
pub use karnaugh::{karnaugh_minimize, minimize_cnf};
pub use map::MonomialVarMap;

/// A CNF literal over 0-based variables; `code = 2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: u32, negated: bool) -> Self {
        Lit(var << 1 | negated as u32)
    }

    #[inline]
    pub fn pos(var: u32) -> Self {
        Self::new(var, false)
    }

    #[inline]
    pub fn neg(var: u32) -> Self {
        Self::new(var, true)
    }

    #[inline]
    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Self {
        Lit(code as u32)
    }

    /// Value of the literal when its variable takes `value`.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value ^ self.is_negated()
    }

    pub fn from_dimacs(x: i64) -> Option<Self> {
        if x == 0 || x.unsigned_abs() > u32::MAX as u64 / 2 {
            return None;
        }
        Some(Self::new((x.unsigned_abs() - 1) as u32, x < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals, sorted by variable, free of duplicates and of
/// complementary pairs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause(Vec<Lit>);

impl Clause {
    /// Normalizes `lits`; returns `None` for a tautology.
    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Option<Self> {
        let mut v: Vec<Lit> = lits.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.windows(2).any(|w| w[0].var() == w[1].var()) {
            return None;
        }
        Some(Clause(v))
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn unit(l: Lit) -> Self {
        Clause(vec![l])
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_var(&self) -> Option<u32> {
        self.0.iter().map(|l| l.var()).max()
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.0.iter().any(|l| l.eval(assignment[l.var() as usize]))
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l:?}")?;
        }
        f.write_str(")")
    }
}

/// A clause list with its declared variable count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Self {
        let needed = clauses
            .iter()
            .filter_map(Clause::max_var)
            .map(|v| v as usize + 1)
            .max()
            .unwrap_or(0);
        Cnf {
            num_vars: num_vars.max(needed),
            clauses,
        }
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.satisfied_by(assignment))
    }
}
