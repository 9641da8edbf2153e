//! Brute-force oracles and random instance builders shared by the integration tests.
#![allow(dead_code)]

use anfbridge::cnf::{Clause, Lit};
use anfbridge::{Monomial, Polynomial, Var};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Truth table of `p` over `n` variables, one bit per assignment (bit i of
/// the assignment index is variable i).
pub fn truth_table(p: &Polynomial, n: usize) -> Vec<u64> {
    let words = (1usize << n).div_ceil(64);
    let mut out = vec![0u64; words];
    for m in p.monomials() {
        let mut t = vec![u64::MAX; words];
        for v in m.vars() {
            for (w, word) in t.iter_mut().enumerate() {
                let mut bits = 0u64;
                for b in 0..64 {
                    let a = w * 64 + b;
                    if a >> v.index() & 1 == 1 {
                        bits |= 1 << b;
                    }
                }
                *word &= bits;
            }
        }
        for (o, x) in out.iter_mut().zip(&t) {
            *o ^= x;
        }
    }
    if n < 6 {
        out[0] &= (1u64 << (1 << n)) - 1;
    }
    out
}

/// Every assignment of `n` variables on which all `polys` vanish.
pub fn solutions(polys: &[Polynomial], n: usize) -> Vec<Vec<bool>> {
    let words = (1usize << n).div_ceil(64);
    let mut bad = vec![0u64; words];
    for p in polys {
        for (b, t) in bad.iter_mut().zip(truth_table(p, n)) {
            *b |= t;
        }
    }
    (0..1usize << n)
        .filter(|&a| bad[a / 64] >> (a % 64) & 1 == 0)
        .map(|a| (0..n).map(|i| a >> i & 1 == 1).collect())
        .collect()
}

/// Counts assignments of variables `fixed.len()..num_vars` that satisfy
/// `clauses` given the prefix `fixed`, by backtracking over the free
/// variables in index order. Stops counting at `limit`.
pub fn count_extensions(
    clauses: &[Clause],
    num_vars: usize,
    fixed: &[bool],
    limit: usize,
) -> usize {
    let mut by_max: Vec<Vec<&Clause>> = vec![Vec::new(); num_vars + 1];
    for c in clauses {
        let top = c.max_var().map_or(0, |v| v as usize);
        by_max[top.max(fixed.len().saturating_sub(1))].push(c);
    }
    let mut asg = fixed.to_vec();
    asg.resize(num_vars, false);
    let ok = |asg: &[bool], cs: &[&Clause]| cs.iter().all(|c| c.satisfied_by(asg));
    if fixed.is_empty() {
        // clauses with no variables are empty clauses
        if clauses.iter().any(|c| c.is_empty()) {
            return 0;
        }
    } else if !ok(&asg, &by_max[fixed.len() - 1]) {
        return 0;
    }
    fn go(
        depth: usize,
        asg: &mut Vec<bool>,
        by_max: &[Vec<&Clause>],
        limit: usize,
        count: &mut usize,
    ) {
        if *count >= limit {
            return;
        }
        if depth == asg.len() {
            *count += 1;
            return;
        }
        for b in [false, true] {
            asg[depth] = b;
            if by_max[depth].iter().all(|c| c.satisfied_by(asg)) {
                go(depth + 1, asg, by_max, limit, count);
            }
        }
    }
    let mut count = 0;
    go(fixed.len(), &mut asg, &by_max, limit, &mut count);
    count
}

/// Whether the polynomial system has a solution, by backtracking with
/// pruning on fully assigned polynomials.
pub fn anf_satisfiable(polys: &[Polynomial], num_vars: usize) -> bool {
    if polys.iter().any(|p| p.is_one()) {
        return false;
    }
    let mut by_max: Vec<Vec<&Polynomial>> = vec![Vec::new(); num_vars];
    for p in polys {
        if let Some(v) = p.max_var() {
            by_max[v.index()].push(p);
        }
    }
    fn go(depth: usize, asg: &mut Vec<bool>, by_max: &[Vec<&Polynomial>]) -> bool {
        if depth == asg.len() {
            return true;
        }
        for b in [false, true] {
            asg[depth] = b;
            if by_max[depth].iter().all(|p| !p.eval(asg)) && go(depth + 1, asg, by_max) {
                return true;
            }
        }
        false
    }
    let mut asg = vec![false; num_vars];
    go(0, &mut asg, &by_max)
}

pub fn random_monomial(rng: &mut ChaCha8Rng, n: usize, max_degree: usize) -> Monomial {
    if n == 0 {
        return Monomial::one();
    }
    let d = rng.gen_range(0..=max_degree.min(n));
    Monomial::from_vars(sample(rng, n, d).into_iter().map(|i| Var(i as u32)))
}

pub fn random_poly(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_degree: usize,
    max_terms: usize,
) -> Polynomial {
    let t = rng.gen_range(1..=max_terms);
    Polynomial::normalize(
        (0..t)
            .map(|_| random_monomial(rng, n, max_degree))
            .collect::<Vec<_>>(),
    )
}

/// A random system; when `planted` is set the constants are adjusted so a
/// random assignment satisfies every polynomial.
pub fn random_system(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    max_degree: usize,
    planted: bool,
) -> Vec<Polynomial> {
    let target: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    (0..m)
        .map(|_| {
            let p = random_poly(rng, n, max_degree, 5);
            if planted && p.eval(&target) {
                p.add_constant(true)
            } else {
                p
            }
        })
        .collect()
}

pub fn random_clause(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Clause {
    loop {
        let len = rng.gen_range(1..=max_len.min(n));
        let lits = sample(rng, n, len)
            .into_iter()
            .map(|v| Lit::new(v as u32, rng.gen()));
        if let Some(c) = Clause::new(lits) {
            return c;
        }
    }
}
