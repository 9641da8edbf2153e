use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::fact::LearntFact;
use super::poly::{Monomial, Polynomial, Var};
use crate::error::AnfError;

/// A variable with a negation flag. `x = Lit { var: y, negated: true }` encodes `x = ¬y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lit {
    pub var: Var,
    pub negated: bool,
}

impl Lit {
    pub fn positive(var: Var) -> Self {
        Lit {
            var,
            negated: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VarState {
    pub value: Option<bool>,
    /// Canonical representative with parity; the variable itself when canonical or determined.
    pub equiv: Lit,
    pub occurrences: BTreeSet<usize>,
}

impl VarState {
    fn fresh(v: Var) -> Self {
        VarState {
            value: None,
            equiv: Lit::positive(v),
            occurrences: BTreeSet::new(),
        }
    }
}

/// How a variable currently resolves against the system state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolved {
    Value(bool),
    /// Equal to `var ⊕ negated`, where `var` is a free canonical variable.
    Free(Lit),
}

#[derive(Clone, Copy, Debug)]
enum Trigger {
    Value(Var, bool),
    AllOnes,
    Equiv(Var, Var, bool),
}

/// A GF(2) polynomial system with per-variable value, equivalence literal and
/// occurrence list.
///
/// Polynomials live in stable slots; a vacated slot holds the zero polynomial.
/// Determined and non-canonical variables are substituted out eagerly, so every
/// stored polynomial mentions only free canonical variables.
#[derive(Clone, Debug, Default)]
pub struct AnfSystem {
    polys: Vec<Polynomial>,
    lookup: HashMap<Polynomial, usize>,
    states: Vec<VarState>,
    // class members of each canonical variable, excluding itself
    members: Vec<Vec<Var>>,
    contradiction: bool,
    known_facts: HashSet<Polynomial>,
    queue: VecDeque<usize>,
}

impl AnfSystem {
    pub fn new(num_vars: usize) -> Self {
        let mut s = AnfSystem::default();
        s.ensure_vars(num_vars);
        s
    }

    /// Loads polynomials without propagating. Duplicates and zeros are dropped.
    pub fn from_polys<I: IntoIterator<Item = Polynomial>>(num_vars: usize, polys: I) -> Self {
        let mut s = AnfSystem::new(num_vars);
        for p in polys {
            s.insert_poly(p);
        }
        s
    }

    pub fn ensure_vars(&mut self, n: usize) {
        while self.states.len() < n {
            let v = Var(self.states.len() as u32);
            self.states.push(VarState::fresh(v));
            self.members.push(Vec::new());
        }
    }

    pub fn num_vars(&self) -> usize {
        self.states.len()
    }

    pub fn is_contradiction(&self) -> bool {
        self.contradiction
    }

    pub fn state(&self, v: Var) -> &VarState {
        &self.states[v.index()]
    }

    /// Live polynomials in slot order.
    pub fn polys(&self) -> impl Iterator<Item = &Polynomial> {
        self.polys.iter().filter(|p| !p.is_zero())
    }

    pub fn poly_slots(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn poly_count(&self) -> usize {
        self.lookup.len()
    }

    pub fn contains_poly(&self, p: &Polynomial) -> bool {
        self.lookup.contains_key(p)
    }

    pub fn occurrence_count(&self, v: Var) -> usize {
        self.states
            .get(v.index())
            .map_or(0, |s| s.occurrences.len())
    }

    /// Variables that occur in at least one live polynomial, ascending.
    pub fn active_vars(&self) -> Vec<Var> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.occurrences.is_empty())
            .map(|(i, _)| Var(i as u32))
            .collect()
    }

    pub fn num_undetermined(&self) -> usize {
        self.states.iter().filter(|s| s.value.is_none()).count()
    }

    pub fn resolve(&self, v: Var) -> Resolved {
        let s = &self.states[v.index()];
        if let Some(c) = s.value {
            return Resolved::Value(c);
        }
        let rep = &self.states[s.equiv.var.index()];
        match rep.value {
            Some(c) => Resolved::Value(c ^ s.equiv.negated),
            None => Resolved::Free(s.equiv),
        }
    }

    pub fn value(&self, v: Var) -> Option<bool> {
        match self.resolve(v) {
            Resolved::Value(c) => Some(c),
            Resolved::Free(_) => None,
        }
    }

    /// Free canonical variables (undetermined and their own representative).
    pub fn free_canonical_vars(&self) -> Vec<Var> {
        (0..self.states.len() as u32)
            .map(Var)
            .filter(|&v| self.resolve(v) == Resolved::Free(Lit::positive(v)))
            .collect()
    }

    /// Rewrites `p` through the current values and equivalences.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        let clean = p.monomials().iter().all(|m| {
            m.vars().all(|v| {
                v.index() >= self.states.len()
                    || matches!(self.resolve(v), Resolved::Free(l) if l.var == v)
            })
        });
        if clean {
            return p.clone();
        }
        let mut acc: Vec<Monomial> = Vec::new();
        for m in p.monomials() {
            let mut prod = Polynomial::one();
            for v in m.vars() {
                let image = if v.index() >= self.states.len() {
                    Polynomial::var(v)
                } else {
                    match self.resolve(v) {
                        Resolved::Value(false) => {
                            prod = Polynomial::zero();
                            break;
                        }
                        Resolved::Value(true) => continue,
                        Resolved::Free(l) => Polynomial::var_plus(l.var, l.negated),
                    }
                };
                prod = prod.mul(&image);
            }
            acc.extend(prod.into_monomials());
        }
        Polynomial::normalize(acc)
    }

    /// Inserts `p` after reducing it through the state. Returns the slot, or
    /// `None` if it reduced to zero or duplicates a live polynomial.
    pub fn insert_poly(&mut self, p: Polynomial) -> Option<usize> {
        if let Some(v) = p.max_var() {
            self.ensure_vars(v.index() + 1);
        }
        let p = self.reduce(&p);
        if p.is_zero() || self.lookup.contains_key(&p) {
            return None;
        }
        let idx = self.polys.len();
        for v in p.vars() {
            self.states[v.index()].occurrences.insert(idx);
        }
        if p.is_one() {
            self.contradiction = true;
        }
        self.lookup.insert(p.clone(), idx);
        self.polys.push(p);
        self.queue.push_back(idx);
        Some(idx)
    }

    fn vacate(&mut self, idx: usize) {
        let old = std::mem::take(&mut self.polys[idx]);
        if old.is_zero() {
            return;
        }
        for v in old.vars() {
            self.states[v.index()].occurrences.remove(&idx);
        }
        self.lookup.remove(&old);
    }

    fn replace_poly(&mut self, idx: usize, new: Polynomial) {
        self.vacate(idx);
        if new.is_zero() || self.lookup.contains_key(&new) {
            return;
        }
        if let Some(v) = new.max_var() {
            self.ensure_vars(v.index() + 1);
        }
        for v in new.vars() {
            self.states[v.index()].occurrences.insert(idx);
        }
        if new.is_one() {
            self.contradiction = true;
        }
        self.lookup.insert(new.clone(), idx);
        self.polys[idx] = new;
        self.queue.push_back(idx);
    }

    /// Replaces `v` by `replacement` in every polynomial on its occurrence list.
    /// Variable states are not touched.
    pub fn substitute(&mut self, v: Var, replacement: &Polynomial) -> Result<(), AnfError> {
        if replacement.contains(v) {
            return Err(AnfError::SelfSubstitution(v));
        }
        if v.index() >= self.states.len() {
            return Ok(());
        }
        let touched: Vec<usize> = self.states[v.index()].occurrences.iter().copied().collect();
        for idx in touched {
            let p = self.polys[idx].substitute(v, replacement);
            self.replace_poly(idx, p);
        }
        Ok(())
    }

    /// Removes live polynomials for which `drop` returns true.
    pub fn remove_where<F: FnMut(&Polynomial) -> bool>(&mut self, mut drop: F) {
        for idx in 0..self.polys.len() {
            if !self.polys[idx].is_zero() && drop(&self.polys[idx]) {
                self.vacate(idx);
            }
        }
    }

    fn trigger(p: &Polynomial) -> Option<Trigger> {
        let ms = p.monomials();
        match ms.len() {
            1 if ms[0].degree() == 1 => Some(Trigger::Value(ms[0].vars().next()?, false)),
            2 if ms[0].is_one() => {
                if ms[1].degree() == 1 {
                    Some(Trigger::Value(ms[1].vars().next()?, true))
                } else {
                    Some(Trigger::AllOnes)
                }
            }
            2 if ms[0].degree() == 1 && ms[1].degree() == 1 => Some(Trigger::Equiv(
                ms[0].vars().next()?,
                ms[1].vars().next()?,
                false,
            )),
            3 if ms[0].is_one() && ms[1].degree() == 1 && ms[2].degree() == 1 => Some(
                Trigger::Equiv(ms[1].vars().next()?, ms[2].vars().next()?, true),
            ),
            _ => None,
        }
    }

    fn assign(&mut self, v: Var, c: bool) {
        debug_assert_eq!(self.resolve(v), Resolved::Free(Lit::positive(v)));
        let s = &mut self.states[v.index()];
        s.value = Some(c);
        let members = std::mem::take(&mut self.members[v.index()]);
        for m in members {
            let s = &mut self.states[m.index()];
            s.value = Some(c ^ s.equiv.negated);
            s.equiv = Lit::positive(m);
        }
        self.substitute(v, &Polynomial::constant(c))
            .expect("constant replacement never contains the variable");
    }

    /// Records `x = y ⊕ c`; the lower index becomes the representative.
    fn merge(&mut self, x: Var, y: Var, c: bool) {
        let (rep, other) = if x < y { (x, y) } else { (y, x) };
        let moved = std::mem::take(&mut self.members[other.index()]);
        for m in &moved {
            let s = &mut self.states[m.index()];
            s.equiv = Lit {
                var: rep,
                negated: s.equiv.negated ^ c,
            };
        }
        self.states[other.index()].equiv = Lit {
            var: rep,
            negated: c,
        };
        let rm = &mut self.members[rep.index()];
        rm.extend(moved);
        rm.push(other);
        self.substitute(other, &Polynomial::var_plus(rep, c))
            .expect("representative differs from the replaced variable");
    }

    /// Runs ANF propagation to a fixed point. Every value or equivalence
    /// assignment made is returned as a linear fact.
    pub fn propagate(&mut self) -> Vec<LearntFact> {
        let mut facts = Vec::new();
        while let Some(idx) = self.queue.pop_front() {
            if self.contradiction {
                self.queue.clear();
                break;
            }
            let p = &self.polys[idx];
            if p.is_zero() {
                continue;
            }
            let Some(trigger) = Self::trigger(p) else {
                continue;
            };
            let p = p.clone();
            self.vacate(idx);
            match trigger {
                Trigger::Value(v, c) => {
                    self.assign(v, c);
                    facts.extend(LearntFact::classify(Polynomial::var_plus(v, c)));
                }
                Trigger::AllOnes => {
                    for v in p.monomials()[1].vars() {
                        // an earlier assignment in this loop may have resolved v already
                        if self.value(v).is_none() {
                            self.assign(v, true);
                            facts.extend(LearntFact::classify(Polynomial::var_plus(v, true)));
                        }
                    }
                }
                Trigger::Equiv(x, y, c) => {
                    self.merge(x, y, c);
                    facts.extend(LearntFact::classify(
                        Polynomial::var(x).add(&Polynomial::var_plus(y, c)),
                    ));
                }
            }
        }
        facts
    }

    /// True if `p` is not yet recorded and does not reduce to zero or to a live polynomial.
    pub fn is_new_fact(&self, p: &Polynomial) -> bool {
        if self.known_facts.contains(p) {
            return false;
        }
        let r = self.reduce(p);
        !r.is_zero() && !self.lookup.contains_key(&r)
    }

    /// Records a fact without propagating. Returns whether it was new.
    pub fn accept_fact(&mut self, p: &Polynomial) -> bool {
        let new = self.is_new_fact(p);
        if !self.known_facts.contains(p) {
            self.known_facts.insert(p.clone());
            self.insert_poly(p.clone());
        }
        new
    }

    /// Adds facts and re-propagates. Syntactic duplicates are ignored.
    /// Returns the number of facts that were new.
    pub fn add_facts<'a, I: IntoIterator<Item = &'a LearntFact>>(&mut self, facts: I) -> usize {
        let mut added = 0;
        for f in facts {
            if self.accept_fact(f.poly()) {
                added += 1;
            }
        }
        self.propagate();
        added
    }

    /// Checks `assignment` against every live polynomial and every recorded
    /// value and equivalence.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        if self.contradiction {
            return false;
        }
        let state_ok = (0..self.states.len()).all(|i| match self.resolve(Var(i as u32)) {
            Resolved::Value(c) => assignment[i] == c,
            Resolved::Free(l) => assignment[i] == assignment[l.var.index()] ^ l.negated,
        });
        state_ok && self.polys().all(|p| !p.eval(assignment))
    }

    /// Polynomials equivalent to the recorded values and equivalences, in variable order.
    pub fn state_polys(&self) -> Vec<Polynomial> {
        let mut out = Vec::new();
        for i in 0..self.states.len() {
            let v = Var(i as u32);
            match self.resolve(v) {
                Resolved::Value(c) => out.push(Polynomial::var_plus(v, c)),
                Resolved::Free(l) if l.var != v => {
                    out.push(Polynomial::var(v).add(&Polynomial::var_plus(l.var, l.negated)))
                }
                Resolved::Free(_) => {}
            }
        }
        out
    }

    /// Verifies occurrence lists, lookup table and canonical-variable invariants.
    #[doc(hidden)]
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, p) in self.polys.iter().enumerate() {
            for v in p.vars() {
                if !self.states[v.index()].occurrences.contains(&i) {
                    return Err(format!("{v} in poly {i} but not in its occurrence list"));
                }
                if self.resolve(v) != Resolved::Free(Lit::positive(v)) {
                    return Err(format!("poly {i} mentions non-free variable {v}"));
                }
            }
            if !p.is_zero() && self.lookup.get(p) != Some(&i) {
                return Err(format!("lookup out of sync for poly {i}"));
            }
        }
        for (vi, s) in self.states.iter().enumerate() {
            for &i in &s.occurrences {
                if !self.polys[i].contains(Var(vi as u32)) {
                    return Err(format!(
                        "x{} lists poly {i} but does not occur in it",
                        vi + 1
                    ));
                }
            }
            if s.value.is_some() && s.equiv.var.index() != vi {
                return Err(format!("x{} determined but not self-equivalent", vi + 1));
            }
            let rep = &self.states[s.equiv.var.index()];
            if rep.equiv.var != s.equiv.var {
                return Err(format!("x{} has an uncompressed equivalence chain", vi + 1));
            }
        }
        if self.contradiction != self.lookup.contains_key(&Polynomial::one()) {
            return Err("contradiction flag out of sync".into());
        }
        Ok(())
    }
}
