//! The fact-learning loop: propagate the input, then repeat XL, ElimLin and
//! conflict-bounded SAT, feeding every new fact back into the master system.

use std::time::{Duration, Instant};

use crate::anf::{AnfSystem, LearntFact, Resolved, Var};
use crate::cnf::{anf_to_cnf_with, Cnf, ConvParams, MonomialVarMap};
use crate::elimlin::{elimlin, SubstitutionRecord};
use crate::error::{ConvertError, ReconstructError};
use crate::par::Exec;
use crate::sat::{extract_sat_facts, solve, ConflictBudget, SolveStatus};
use crate::xl::{xl_learn, XlParams};

/// When learnt facts are propagated into the master system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PassMode {
    /// After every phase.
    #[default]
    Eager,
    /// Once per pass. Each phase sees the pass-start system plus the facts
    /// accepted earlier in the same pass, unpropagated.
    Deferred,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PipelineConfig {
    pub xl: XlParams,
    pub conv: ConvParams,
    pub budget: ConflictBudget,
    pub max_time: Option<Duration>,
    pub stop_on_sat: bool,
    pub mode: PassMode,
    pub exec: Exec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PipelineStatus {
    Sat,
    Unsat,
    Fixpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Xl,
    ElimLin,
    Sat,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Xl => "xl",
            Phase::ElimLin => "elimlin",
            Phase::Sat => "sat",
        }
    }
}

/// A fact that was new to the master system when its phase produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseFact {
    pub iteration: usize,
    pub phase: Phase,
    pub fact: LearntFact,
}

/// Per-pass counters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IterationTrace {
    pub iteration: usize,
    pub xl_facts: usize,
    pub elimlin_facts: usize,
    pub sat_facts: usize,
    /// Conflict budget used by this pass's SAT phase.
    pub budget: u64,
    pub sat_status: Option<SolveStatus>,
    pub conflicts: u64,
    pub xl_time: Duration,
    pub elimlin_time: Duration,
    pub sat_time: Duration,
}

impl IterationTrace {
    pub fn total(&self) -> usize {
        self.xl_facts + self.elimlin_facts + self.sat_facts
    }
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub status: PipelineStatus,
    /// Set when the wall-time limit ended the loop.
    pub budget_terminated: bool,
    pub system: AnfSystem,
    pub cnf: Cnf,
    pub map: MonomialVarMap,
    pub facts: Vec<PhaseFact>,
    /// A model over the input variables when `status` is `Sat`.
    pub model: Option<Vec<bool>>,
    pub trace: Vec<IterationTrace>,
}

impl PipelineResult {
    pub fn facts_from(&self, phase: Phase) -> impl Iterator<Item = &LearntFact> {
        self.facts
            .iter()
            .filter(move |f| f.phase == phase)
            .map(|f| &f.fact)
    }
}

/// Any assignment consistent with the recorded values and equivalences,
/// free canonical variables set to 0.
fn state_model(sys: &AnfSystem) -> Vec<bool> {
    (0..sys.num_vars() as u32)
        .map(|i| match sys.resolve(Var(i)) {
            Resolved::Value(c) => c,
            Resolved::Free(l) => l.negated,
        })
        .collect()
}

struct Run<'a> {
    cfg: &'a PipelineConfig,
    master: AnfSystem,
    facts: Vec<PhaseFact>,
    model: Option<Vec<bool>>,
}

impl Run<'_> {
    fn accept(&mut self, iteration: usize, phase: Phase, learnt: Vec<LearntFact>) -> usize {
        let mut n = 0;
        for f in learnt {
            if self.master.accept_fact(f.poly()) {
                n += 1;
                self.facts.push(PhaseFact {
                    iteration,
                    phase,
                    fact: f,
                });
            }
        }
        if self.cfg.mode == PassMode::Eager {
            self.master.propagate();
        }
        n
    }

    fn settled(&self) -> Option<PipelineStatus> {
        if self.master.is_contradiction() {
            Some(PipelineStatus::Unsat)
        } else if self.cfg.mode == PassMode::Eager && self.master.poly_count() == 0 {
            Some(PipelineStatus::Sat)
        } else {
            None
        }
    }
}

/// Runs the learning loop on `input` until SAT, UNSAT, a fixed point, or the
/// time limit.
pub fn run(input: &AnfSystem, cfg: &PipelineConfig) -> Result<PipelineResult, ConvertError> {
    cfg.conv.validate()?;
    let start = Instant::now();
    let mut master = input.clone();
    master.propagate();
    let mut run = Run {
        cfg,
        master,
        facts: Vec::new(),
        model: None,
    };
    let mut trace = Vec::new();
    let mut budget = cfg.budget;
    let mut budget_terminated = false;
    let out_of_time = || cfg.max_time.is_some_and(|t| start.elapsed() >= t);

    let mut status = if run.master.is_contradiction() {
        Some(PipelineStatus::Unsat)
    } else if run.master.poly_count() == 0 {
        Some(PipelineStatus::Sat)
    } else {
        None
    };

    let mut iteration = 0;
    while status.is_none() {
        if out_of_time() {
            budget_terminated = true;
            break;
        }
        iteration += 1;
        let mut t = IterationTrace {
            iteration,
            budget: budget.current,
            ..Default::default()
        };
        let xl = XlParams {
            seed: cfg.xl.seed.wrapping_add(iteration as u64 - 1),
            ..cfg.xl
        };

        let clock = Instant::now();
        let learnt = xl_learn(&run.master, &xl, cfg.exec);
        t.xl_facts = run.accept(iteration, Phase::Xl, learnt);
        t.xl_time = clock.elapsed();
        if let Some(s) = run.settled() {
            status = Some(s);
            trace.push(t);
            break;
        }
        if out_of_time() {
            budget_terminated = true;
            trace.push(t);
            break;
        }

        let clock = Instant::now();
        let learnt = elimlin(&run.master, &xl, cfg.exec).facts;
        t.elimlin_facts = run.accept(iteration, Phase::ElimLin, learnt);
        t.elimlin_time = clock.elapsed();
        if let Some(s) = run.settled() {
            status = Some(s);
            trace.push(t);
            break;
        }
        if out_of_time() {
            budget_terminated = true;
            trace.push(t);
            break;
        }

        let clock = Instant::now();
        let (cnf, map) = anf_to_cnf_with(&run.master, &cfg.conv, cfg.exec)?;
        let outcome = solve(&cnf, budget.current);
        t.sat_status = Some(outcome.status);
        t.conflicts = outcome.conflicts;
        if let Some(m) = &outcome.model {
            run.model = Some(m[..input.num_vars()].to_vec());
        }
        let learnt = extract_sat_facts(&outcome, &map, &cnf.clauses);
        t.sat_facts = run.accept(iteration, Phase::Sat, learnt);
        t.sat_time = clock.elapsed();
        if outcome.status == SolveStatus::Sat && cfg.stop_on_sat {
            status = Some(PipelineStatus::Sat);
            trace.push(t);
            break;
        }
        if cfg.mode == PassMode::Deferred {
            run.master.propagate();
        }
        let total = t.total();
        trace.push(t);
        if run.master.is_contradiction() {
            status = Some(PipelineStatus::Unsat);
        } else if run.master.poly_count() == 0 {
            status = Some(PipelineStatus::Sat);
        } else {
            // more conflicts only help when the solver ran out of them
            let escalated = trace.last().unwrap().sat_facts == 0
                && outcome.status == SolveStatus::Unknown
                && budget.escalate();
            if total == 0 && !escalated {
                status = Some(PipelineStatus::Fixpoint);
            }
        }
    }

    let Run {
        mut master,
        facts,
        model,
        ..
    } = run;
    if cfg.mode == PassMode::Deferred {
        master.propagate();
    }
    let mut status = status.unwrap_or(PipelineStatus::Fixpoint);
    let model = match status {
        PipelineStatus::Unsat => None,
        _ if master.poly_count() == 0 && !master.is_contradiction() => Some(state_model(&master)),
        _ => model,
    };
    if model.is_some() && status == PipelineStatus::Fixpoint {
        status = PipelineStatus::Sat;
    }
    debug_assert!(model.as_ref().is_none_or(|m| input.satisfied_by(m)));
    let (cnf, map) = anf_to_cnf_with(&master, &cfg.conv, cfg.exec)?;
    Ok(PipelineResult {
        status,
        budget_terminated,
        system: master,
        cnf,
        map,
        facts,
        model,
        trace,
    })
}

/// Converts without learning and runs the solver once at the capped budget.
pub fn convert_only(
    input: &AnfSystem,
    cfg: &PipelineConfig,
) -> Result<PipelineResult, ConvertError> {
    let clock = Instant::now();
    let (cnf, map) = anf_to_cnf_with(input, &cfg.conv, cfg.exec)?;
    let outcome = solve(&cnf, cfg.budget.cap);
    let sat_time = clock.elapsed();
    let status = match outcome.status {
        SolveStatus::Sat => PipelineStatus::Sat,
        SolveStatus::Unsat => PipelineStatus::Unsat,
        SolveStatus::Unknown => PipelineStatus::Fixpoint,
    };
    Ok(PipelineResult {
        status,
        budget_terminated: false,
        system: input.clone(),
        model: outcome.model.map(|m| m[..input.num_vars()].to_vec()),
        cnf,
        map,
        facts: Vec::new(),
        trace: vec![IterationTrace {
            iteration: 1,
            budget: cfg.budget.cap,
            sat_status: Some(outcome.status),
            conflicts: outcome.conflicts,
            sat_time,
            ..Default::default()
        }],
    })
}

/// Completes an assignment of the surviving free variables of `sys` (the
/// system a substitution record was applied to) into a full assignment.
pub fn reconstruct_model(
    partial: &[Option<bool>],
    rec: &SubstitutionRecord,
    sys: &AnfSystem,
) -> Result<Vec<bool>, ReconstructError> {
    let n = sys.num_vars();
    let eliminated: std::collections::HashSet<Var> = rec.eliminated().collect();
    let mut out = vec![false; n];
    for i in 0..n {
        let v = Var(i as u32);
        if eliminated.contains(&v) {
            continue;
        }
        if let Resolved::Free(l) = sys.resolve(v) {
            if l.var == v {
                out[i] = partial
                    .get(i)
                    .copied()
                    .flatten()
                    .ok_or(ReconstructError::MissingVar(v))?;
            }
        }
    }
    for i in 0..n {
        let v = Var(i as u32);
        if eliminated.contains(&v) {
            continue;
        }
        match sys.resolve(v) {
            Resolved::Value(c) => out[i] = c,
            Resolved::Free(l) if l.var != v => {
                if eliminated.contains(&l.var) {
                    continue;
                }
                out[i] = out[l.var.index()] ^ l.negated;
            }
            Resolved::Free(_) => {}
        }
    }
    rec.replay(&mut out);
    // equivalences to an eliminated representative resolve after replay
    for i in 0..n {
        let v = Var(i as u32);
        if let Resolved::Free(l) = sys.resolve(v) {
            if l.var != v && eliminated.contains(&l.var) {
                out[i] = out[l.var.index()] ^ l.negated;
            }
        }
    }
    Ok(out)
}
