//! Exact two-level minimization for small Boolean functions.
//!
//! The falsifying assignments of a constraint are covered by prime implicants
//! (Quine–McCluskey tabulation) and a minimum-cardinality cover is found by
//! branch and bound. Each chosen cube becomes one clause that blocks it.

use std::collections::HashSet;

use super::{Clause, Lit};
use crate::anf::Polynomial;
use crate::error::ConvertError;

/// Hard ceiling on truth-table width.
pub(crate) const MAX_TABLE_VARS: usize = 12;

type Bits = Vec<u64>;

fn bits_new(n: usize) -> Bits {
    vec![0; n.div_ceil(64)]
}

fn bit_set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn bit_get(b: &Bits, i: usize) -> bool {
    (b[i / 64] >> (i % 64)) & 1 == 1
}

fn bits_empty(b: &Bits) -> bool {
    b.iter().all(|&w| w == 0)
}

fn bits_and(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bits_andnot(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & !y).collect()
}

fn bits_subset(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn bits_count(a: &Bits) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

fn bits_iter(a: &Bits) -> impl Iterator<Item = usize> + '_ {
    a.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * 64 + b)
        })
    })
}

/// A cube: `mask` bits are free, the rest are fixed to the bits of `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cube {
    value: u32,
    mask: u32,
}

impl Cube {
    fn covers(self, point: u32) -> bool {
        (point & !self.mask) == self.value
    }
}

fn prime_implicants(k: usize, minterms: &[u32]) -> Vec<Cube> {
    let mut level: HashSet<Cube> = minterms
        .iter()
        .map(|&value| Cube { value, mask: 0 })
        .collect();
    let mut primes = Vec::new();
    while !level.is_empty() {
        let mut next = HashSet::new();
        let mut merged = HashSet::new();
        for &c in &level {
            for b in 0..k {
                let bit = 1u32 << b;
                if c.mask & bit != 0 || c.value & bit != 0 {
                    continue;
                }
                let other = Cube {
                    value: c.value | bit,
                    mask: c.mask,
                };
                if level.contains(&other) {
                    next.insert(Cube {
                        value: c.value,
                        mask: c.mask | bit,
                    });
                    merged.insert(c);
                    merged.insert(other);
                }
            }
        }
        primes.extend(level.iter().filter(|c| !merged.contains(c)).copied());
        level = next;
    }
    primes.sort_by_key(|c| (std::cmp::Reverse(c.mask.count_ones()), c.mask, c.value));
    primes
}

struct CoverSearch<'a> {
    covers: &'a [Bits],
    best: Vec<usize>,
}

impl CoverSearch<'_> {
    fn candidates_for<'a>(
        &'a self,
        cand: &'a [usize],
        m: usize,
    ) -> impl Iterator<Item = usize> + 'a {
        cand.iter()
            .copied()
            .filter(move |&p| bit_get(&self.covers[p], m))
    }

    fn search(&mut self, mut unc: Bits, mut cand: Vec<usize>, chosen: &mut Vec<usize>) {
        let base = chosen.len();
        loop {
            if bits_empty(&unc) {
                if chosen.len() < self.best.len() {
                    self.best = chosen.clone();
                }
                chosen.truncate(base);
                return;
            }
            if chosen.len() + 1 >= self.best.len() {
                chosen.truncate(base);
                return;
            }
            // essential primes
            let mut forced = None;
            for m in bits_iter(&unc) {
                let mut it = self.candidates_for(&cand, m);
                match (it.next(), it.next()) {
                    (None, _) => {
                        chosen.truncate(base);
                        return;
                    }
                    (Some(p), None) => {
                        forced = Some(p);
                        break;
                    }
                    _ => {}
                }
            }
            if let Some(p) = forced {
                chosen.push(p);
                unc = bits_andnot(&unc, &self.covers[p]);
                cand.retain(|&q| q != p);
                continue;
            }
            // drop primes dominated by another candidate on the uncovered set
            let restricted: Vec<Bits> = cand
                .iter()
                .map(|&p| bits_and(&self.covers[p], &unc))
                .collect();
            let mut keep = vec![true; cand.len()];
            for i in 0..cand.len() {
                if bits_empty(&restricted[i]) {
                    keep[i] = false;
                    continue;
                }
                for j in 0..cand.len() {
                    if i == j || !keep[j] {
                        continue;
                    }
                    if bits_subset(&restricted[i], &restricted[j])
                        && (restricted[i] != restricted[j] || j < i)
                    {
                        keep[i] = false;
                        break;
                    }
                }
            }
            if keep.iter().all(|&k| k) {
                break;
            }
            let mut it = keep.iter();
            cand.retain(|_| *it.next().unwrap());
        }

        // lower bound: minterms that pairwise share no candidate
        let mut blocked = bits_new(unc.len() * 64);
        let mut order: Vec<(usize, usize)> = bits_iter(&unc)
            .map(|m| (self.candidates_for(&cand, m).count(), m))
            .collect();
        order.sort_unstable();
        let mut lb = 0;
        for &(_, m) in &order {
            if bit_get(&blocked, m) {
                continue;
            }
            lb += 1;
            for p in self.candidates_for(&cand, m) {
                for (b, c) in blocked.iter_mut().zip(&self.covers[p]) {
                    *b |= c;
                }
            }
        }
        if chosen.len() + lb >= self.best.len() {
            chosen.truncate(base);
            return;
        }

        let (_, pivot) = order[0];
        let mut branch: Vec<usize> = self.candidates_for(&cand, pivot).collect();
        branch.sort_by_key(|&p| std::cmp::Reverse(bits_count(&bits_and(&self.covers[p], &unc))));
        let mut remaining = cand;
        for p in branch {
            remaining.retain(|&q| q != p);
            chosen.push(p);
            self.search(
                bits_andnot(&unc, &self.covers[p]),
                remaining.clone(),
                chosen,
            );
            chosen.pop();
        }
        chosen.truncate(base);
    }
}

fn greedy_cover(covers: &[Bits], all: &Bits) -> Vec<usize> {
    let mut unc = all.clone();
    let mut out = Vec::new();
    while !bits_empty(&unc) {
        let (best, _) = covers
            .iter()
            .enumerate()
            .map(|(i, c)| (i, bits_count(&bits_and(c, &unc))))
            .max_by_key(|&(i, n)| (n, std::cmp::Reverse(i)))
            .expect("every minterm is covered by some prime");
        out.push(best);
        unc = bits_andnot(&unc, &covers[best]);
    }
    out
}

/// Minimum clause set over `vars` whose models are exactly the assignments for
/// which `violating` is false. Bit `i` of the assignment passed to
/// `violating` is the value of `vars[i]`.
pub fn minimize_cnf<F: Fn(u32) -> bool>(vars: &[u32], violating: F) -> Vec<Clause> {
    let k = vars.len();
    assert!(k <= MAX_TABLE_VARS, "truth table too wide");
    let minterms: Vec<u32> = (0..1u32 << k).filter(|&a| violating(a)).collect();
    if minterms.is_empty() {
        return Vec::new();
    }
    let primes = prime_implicants(k, &minterms);
    let covers: Vec<Bits> = primes
        .iter()
        .map(|c| {
            let mut b = bits_new(minterms.len());
            for (i, &m) in minterms.iter().enumerate() {
                if c.covers(m) {
                    bit_set(&mut b, i);
                }
            }
            b
        })
        .collect();
    let mut all = bits_new(minterms.len());
    for i in 0..minterms.len() {
        bit_set(&mut all, i);
    }
    let mut search = CoverSearch {
        covers: &covers,
        best: greedy_cover(&covers, &all),
    };
    search.search(all, (0..primes.len()).collect(), &mut Vec::new());
    let mut chosen = search.best;
    chosen.sort_unstable();
    chosen
        .into_iter()
        .map(|p| {
            let c = primes[p];
            let lits = (0..k)
                .filter(|&i| c.mask >> i & 1 == 0)
                .map(|i| Lit::new(vars[i], c.value >> i & 1 == 1));
            Clause::new(lits).expect("a cube fixes each variable once")
        })
        .collect()
}

/// Minimal CNF for `poly = 0` over its own variables (ANF variable `i` is CNF
/// variable `i`).
pub fn karnaugh_minimize(poly: &Polynomial, max_vars: usize) -> Result<Vec<Clause>, ConvertError> {
    let vars = poly.vars();
    if vars.len() > max_vars.min(MAX_TABLE_VARS) {
        return Err(ConvertError::TooManyVars {
            poly: poly.clone(),
            vars: vars.len(),
            bound: max_vars,
        });
    }
    let masks: Vec<u32> = poly
        .monomials()
        .iter()
        .map(|m| {
            m.vars()
                .map(|v| 1u32 << vars.binary_search(&v).expect("variable listed"))
                .fold(0, |a, b| a | b)
        })
        .collect();
    let cnf_vars: Vec<u32> = vars.iter().map(|v| v.0).collect();
    Ok(minimize_cnf(&cnf_vars, |a| {
        masks.iter().filter(|&&m| a & m == m).count() % 2 == 1
    }))
}
