//! ElimLin: Gauss-Jordan on the linearization, harvest the linear rows,
//! eliminate one variable per linear row by substitution, repeat.

use crate::anf::{AnfSystem, LearntFact, Polynomial, Var};
use crate::par::Exec;
use crate::xl::{linearize_with, rng_for, subsample, XlParams};

/// Ordered eliminations `v := replacement`. Replaying them in reverse
/// recovers every eliminated variable from a solution of the reduced system.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubstitutionRecord {
    steps: Vec<(Var, Polynomial)>,
}

impl SubstitutionRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: Var, replacement: Polynomial) {
        self.steps.push((v, replacement));
    }

    pub fn steps(&self) -> &[(Var, Polynomial)] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn eliminated(&self) -> impl Iterator<Item = Var> + '_ {
        self.steps.iter().map(|(v, _)| *v)
    }

    /// Overwrites eliminated variables in `assignment`, last elimination first.
    pub fn replay(&self, assignment: &mut [bool]) {
        for (v, r) in self.steps.iter().rev() {
            assignment[v.index()] = r.eval(assignment);
        }
    }
}

#[derive(Clone, Debug)]
pub struct ElimLinOutcome {
    /// The reduced system, free of linear equations.
    pub system: AnfSystem,
    /// Every harvested linear equation, in harvest order.
    pub facts: Vec<LearntFact>,
    pub record: SubstitutionRecord,
}

/// Runs ElimLin on a copy of the live polynomials of `sys`, subsampled to a
/// linearized size of about `2^M`.
pub fn elimlin(sys: &AnfSystem, params: &XlParams, exec: Exec) -> ElimLinOutcome {
    let polys: Vec<Polynomial> = sys.polys().cloned().collect();
    let mut rng = rng_for(params.seed, 2);
    let picked = subsample(&polys, params.sample_exp, &mut rng);
    elimlin_polys(
        sys.num_vars(),
        picked.into_iter().map(|i| polys[i].clone()).collect(),
        exec,
    )
}

/// ElimLin on an explicit polynomial list, without subsampling.
pub fn elimlin_polys(num_vars: usize, polys: Vec<Polynomial>, exec: Exec) -> ElimLinOutcome {
    let mut work = AnfSystem::from_polys(num_vars, polys);
    let mut facts = Vec::new();
    let mut record = SubstitutionRecord::new();

    loop {
        let current: Vec<Polynomial> = work.polys().cloned().collect();
        if current.is_empty() {
            break;
        }
        let (mut m, map) = linearize_with(&current, exec);
        let ech = m.gauss_jordan_with(exec);
        let mut linear = Vec::new();
        let mut rest = Vec::new();
        for r in 0..ech.rank {
            let p = map.delinearize(&m, r);
            if p.is_linear() {
                linear.push(p);
            } else {
                rest.push(p);
            }
        }
        if linear.is_empty() {
            break;
        }
        if linear.iter().any(Polynomial::is_one) {
            facts.push(LearntFact::contradiction());
            work = AnfSystem::from_polys(num_vars, [Polynomial::one()]);
            break;
        }

        work = AnfSystem::from_polys(num_vars, rest);
        let round_start = record.steps.len();
        for l in linear {
            let mut reduced = l.clone();
            for (v, r) in &record.steps[round_start..] {
                reduced = reduced.substitute(*v, r);
            }
            facts.extend(LearntFact::classify(l));
            if reduced.is_zero() {
                continue;
            }
            // fewest occurrences in the remainder, ties to the lowest index
            let Some(v) = reduced
                .vars()
                .into_iter()
                .min_by_key(|&v| (work.occurrence_count(v), v))
            else {
                // a bare constant 1 after reduction
                facts.push(LearntFact::contradiction());
                work = AnfSystem::from_polys(num_vars, [Polynomial::one()]);
                return ElimLinOutcome {
                    system: work,
                    facts,
                    record,
                };
            };
            let replacement = reduced.add(&Polynomial::var(v));
            work.substitute(v, &replacement)
                .expect("replacement comes from a linear equation without v");
            record.push(v, replacement);
        }
        if record.steps.len() == round_start {
            break;
        }
    }

    ElimLinOutcome {
        system: work,
        facts,
        record,
    }
}
