//! A small deterministic CDCL solver: two watched literals, first-UIP
//! learning, VSIDS branching, Luby restarts and phase saving. Search stops
//! after a fixed number of conflicts.

use std::collections::BTreeSet;

use crate::anf::LearntFact;
use crate::anf::Polynomial;
use crate::cnf::{Clause, Cnf, Lit, MonomialVarMap};

/// Conflict budget with the escalation schedule `current`, `+step`, … `cap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConflictBudget {
    pub current: u64,
    pub step: u64,
    pub cap: u64,
}

impl Default for ConflictBudget {
    fn default() -> Self {
        ConflictBudget {
            current: 10_000,
            step: 10_000,
            cap: 100_000,
        }
    }
}

impl ConflictBudget {
    /// A budget that never escalates.
    pub fn fixed(c: u64) -> Self {
        ConflictBudget {
            current: c,
            step: 0,
            cap: c,
        }
    }

    pub fn at_cap(&self) -> bool {
        self.current >= self.cap
    }

    /// Steps the budget up; returns false when already at the cap.
    pub fn escalate(&mut self) -> bool {
        if self.at_cap() || self.step == 0 {
            return false;
        }
        self.current = self.current.saturating_add(self.step).min(self.cap);
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// A satisfying assignment over all CNF variables when `Sat`.
    pub model: Option<Vec<bool>>,
    /// Every learnt clause, in learning order.
    pub learnt: Vec<Clause>,
    /// Literals fixed at decision level 0 when search ended.
    pub units: Vec<Lit>,
    pub conflicts: u64,
}

const UNDEF: u8 = 2;

struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

impl VarHeap {
    const ABSENT: usize = usize::MAX;

    fn new(n: usize) -> Self {
        VarHeap {
            heap: Vec::with_capacity(n),
            pos: vec![Self::ABSENT; n],
        }
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != Self::ABSENT
    }

    fn better(act: &[f64], a: u32, b: u32) -> bool {
        act[a as usize] > act[b as usize] || (act[a as usize] == act[b as usize] && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) {
                r
            } else {
                l
            };
            if !Self::better(act, self.heap[c], v) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = i;
        self.sift_up(i, act);
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v as usize], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = Self::ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }
}

fn luby(mut i: u64) -> u64 {
    // i-th element (0-based) of 1 1 2 1 1 2 4 ...
    let (mut size, mut seq) = (1u64, 0u32);
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

const RESTART_BASE: u64 = 64;
const VAR_DECAY: f64 = 0.95;

/// CDCL solver over a fixed clause set.
pub struct Solver {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    inconsistent: bool,
    learnt: Vec<Clause>,
    conflicts: u64,
}

impl Solver {
    pub fn new(cnf: &Cnf) -> Self {
        let n = cnf.num_vars;
        let mut s = Solver {
            num_vars: n,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            heap: VarHeap::new(n),
            phase: vec![false; n],
            seen: vec![false; n],
            inconsistent: false,
            learnt: Vec::new(),
            conflicts: 0,
        };
        for v in 0..n as u32 {
            s.heap.insert(v, &s.activity);
        }
        for c in &cnf.clauses {
            s.add_clause(c.lits());
        }
        s
    }

    fn value(&self, l: Lit) -> u8 {
        let a = self.assigns[l.var() as usize];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ l.is_negated() as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var() as usize;
        self.assigns[v] = !l.is_negated() as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        if self.inconsistent {
            return;
        }
        match lits.len() {
            0 => self.inconsistent = true,
            1 => match self.value(lits[0]) {
                0 => self.inconsistent = true,
                1 => {}
                _ => self.enqueue(lits[0], None),
            },
            _ => {
                let cref = self.clauses.len();
                self.clauses.push(lits.to_vec());
                self.watches[lits[0].code()].push(cref);
                self.watches[lits[1].code()].push(cref);
            }
        }
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cref = ws[i];
                i += 1;
                let c = &mut self.clauses[cref];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.value_of(first) == 1 {
                    ws[j] = cref;
                    j += 1;
                    continue;
                }
                let c = &self.clauses[cref];
                if let Some(k) = (2..c.len()).find(|&k| self.value_of(c[k]) != 0) {
                    let c = &mut self.clauses[cref];
                    c.swap(1, k);
                    let w = c[1].code();
                    self.watches[w].push(cref);
                    continue;
                }
                ws[j] = cref;
                j += 1;
                if self.value_of(first) == 0 {
                    conflict = Some(cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, Some(cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    #[inline]
    fn value_of(&self, l: Lit) -> u8 {
        self.value(l)
    }

    fn bump(&mut self, v: u32) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut out = vec![Lit::pos(0)];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();
        loop {
            let skip = usize::from(p.is_some());
            let lits = self.clauses[confl][skip..].to_vec();
            for q in lits {
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(q.var());
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        out.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[lit.var() as usize] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var() as usize].expect("implied literal has a reason");
        }
        out[0] = !p.unwrap();
        for l in &out[1..] {
            self.seen[l.var() as usize] = false;
        }
        let mut back = 0;
        if out.len() > 1 {
            let mut best = 1;
            for k in 2..out.len() {
                if self.level[out[k].var() as usize] > self.level[out[best].var() as usize] {
                    best = k;
                }
            }
            out.swap(1, best);
            back = self.level[out[1].var() as usize];
        }
        self.var_inc /= VAR_DECAY;
        (out, back)
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var() as usize;
            self.phase[v] = !l.is_negated();
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.heap.insert(l.var(), &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn root_units(&self) -> Vec<Lit> {
        let end = self.trail_lim.first().copied().unwrap_or(self.trail.len());
        self.trail[..end].to_vec()
    }

    fn finish(&mut self, status: SolveStatus) -> SolveOutcome {
        let model =
            (status == SolveStatus::Sat).then(|| self.assigns.iter().map(|&a| a == 1).collect());
        let units = if status == SolveStatus::Unsat {
            Vec::new()
        } else {
            self.root_units()
        };
        SolveOutcome {
            status,
            model,
            learnt: self.learnt.clone(),
            units,
            conflicts: self.conflicts,
        }
    }

    /// Searches until a model, a refutation, or `max_conflicts` analyzed
    /// conflicts.
    pub fn solve(&mut self, max_conflicts: u64) -> SolveOutcome {
        if self.inconsistent {
            return self.finish(SolveStatus::Unsat);
        }
        let mut restart_idx = 0;
        let mut until_restart = luby(restart_idx) * RESTART_BASE;
        loop {
            if let Some(confl) = self.propagate() {
                if self.decision_level() == 0 {
                    self.inconsistent = true;
                    return self.finish(SolveStatus::Unsat);
                }
                if self.conflicts >= max_conflicts {
                    self.cancel_until(0);
                    return self.finish(SolveStatus::Unknown);
                }
                self.conflicts += 1;
                let (lits, back) = self.analyze(confl);
                self.cancel_until(back);
                self.learnt.push(
                    Clause::new(lits.iter().copied()).expect("learnt clauses are not tautologies"),
                );
                if lits.len() == 1 {
                    self.enqueue(lits[0], None);
                } else {
                    let cref = self.clauses.len();
                    self.watches[lits[0].code()].push(cref);
                    self.watches[lits[1].code()].push(cref);
                    let first = lits[0];
                    self.clauses.push(lits);
                    self.enqueue(first, Some(cref));
                }
                until_restart -= 1;
                if until_restart == 0 {
                    restart_idx += 1;
                    until_restart = luby(restart_idx) * RESTART_BASE;
                    self.cancel_until(0);
                }
            } else {
                let next = loop {
                    match self.heap.pop(&self.activity) {
                        None => break None,
                        Some(v) if self.assigns[v as usize] == UNDEF => break Some(v),
                        Some(_) => {}
                    }
                };
                let Some(v) = next else {
                    return self.finish(SolveStatus::Sat);
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(Lit::new(v, !self.phase[v as usize]), None);
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }
}

/// Runs a fresh solver on `cnf`.
pub fn solve(cnf: &Cnf, max_conflicts: u64) -> SolveOutcome {
    Solver::new(cnf).solve(max_conflicts)
}

/// Translates solver output into facts over the ANF variables.
///
/// Root-level units on monomial-mapped variables give `m + 1` or, for single
/// variables, `x`. Binary clause pairs among `original` and the learnt
/// clauses that fix two ANF variables equal or opposite give `x + y` or
/// `x + y + 1`. Cutting auxiliaries never contribute.
pub fn extract_sat_facts(
    outcome: &SolveOutcome,
    map: &MonomialVarMap,
    original: &[Clause],
) -> Vec<LearntFact> {
    if outcome.status == SolveStatus::Unsat {
        return vec![LearntFact::contradiction()];
    }
    let mut facts = Vec::new();
    let mut units: Vec<Lit> = outcome.units.clone();
    units.sort_unstable();
    for l in units {
        let Some(m) = map.monomial(l.var()) else {
            continue;
        };
        let p = Polynomial::from_monomial(m.clone());
        if !l.is_negated() {
            facts.extend(LearntFact::classify(p.add_constant(true)));
        } else if m.degree() == 1 {
            facts.extend(LearntFact::classify(p));
        }
    }

    let single = |v: u32| (v as usize) < map.anf_vars();
    let binaries: BTreeSet<Clause> = original
        .iter()
        .chain(&outcome.learnt)
        .filter(|c| c.len() == 2 && c.lits().iter().all(|l| single(l.var())))
        .cloned()
        .collect();
    for c in &binaries {
        let (a, b) = (c.lits()[0], c.lits()[1]);
        // take each pair once, from its clause with a positive first literal
        if a.is_negated() {
            continue;
        }
        let partner = Clause::new([!a, !b]).unwrap();
        if binaries.contains(&partner) {
            let p = Polynomial::var(crate::anf::Var(a.var()))
                .add(&Polynomial::var(crate::anf::Var(b.var())))
                .add_constant(!b.is_negated());
            facts.extend(LearntFact::classify(p));
        }
    }
    facts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: usize, cs: &[&[i64]]) -> Cnf {
        Cnf::new(
            n,
            cs.iter()
                .map(|c| Clause::new(c.iter().map(|&x| Lit::from_dimacs(x).unwrap())).unwrap())
                .collect(),
        )
    }

    #[test]
    fn luby_prefix() {
        let got: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(got, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn contradictory_units() {
        let out = solve(&cnf(1, &[&[1], &[-1]]), 100);
        assert_eq!(out.status, SolveStatus::Unsat);
    }

    #[test]
    fn pigeonhole_three_into_two() {
        // p(i,j): pigeon i in hole j, var 2*i + j + 1
        let mut cs: Vec<Vec<i64>> = (0..3).map(|i| vec![2 * i + 1, 2 * i + 2]).collect();
        for j in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    cs.push(vec![-(2 * a + j + 1), -(2 * b + j + 1)]);
                }
            }
        }
        let refs: Vec<&[i64]> = cs.iter().map(|c| c.as_slice()).collect();
        let out = solve(&cnf(6, &refs), 1000);
        assert_eq!(out.status, SolveStatus::Unsat);
        let out = solve(&cnf(6, &refs), 0);
        assert_eq!(out.status, SolveStatus::Unknown);
        assert_eq!(out.conflicts, 0);
    }

    #[test]
    fn sat_model_checks() {
        let c = cnf(3, &[&[1, 2], &[-1, 3], &[-2, -3], &[2, 3]]);
        let out = solve(&c, 100);
        assert_eq!(out.status, SolveStatus::Sat);
        assert!(c.satisfied_by(out.model.as_ref().unwrap()));
    }

    #[test]
    fn budget_escalation() {
        let mut b = ConflictBudget::default();
        let mut seen = vec![b.current];
        while b.escalate() {
            seen.push(b.current);
        }
        assert_eq!(seen.len(), 10);
        assert_eq!(*seen.last().unwrap(), 100_000);
        assert!(!ConflictBudget::fixed(5).clone().escalate());
    }

    #[test]
    fn unsat_gives_contradiction_fact() {
        let out = solve(&cnf(1, &[&[1], &[-1]]), 10);
        let facts = extract_sat_facts(&out, &MonomialVarMap::new(1), &[]);
        assert_eq!(facts, vec![LearntFact::contradiction()]);
    }

    #[test]
    fn antivalence_pair_gives_linear_fact() {
        let c = cnf(2, &[&[1, 2], &[-1, -2]]);
        let out = solve(&c, 10);
        let facts = extract_sat_facts(&out, &MonomialVarMap::new(2), &c.clauses);
        let polys: Vec<String> = facts.iter().map(|f| f.poly().to_string()).collect();
        assert_eq!(polys, ["x2 + x1 + 1"]);
    }
}
