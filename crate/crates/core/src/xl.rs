//! Linearization, eXtended Linearization (XL) and fact extraction from the
//! reduced row echelon form.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::anf::{AnfSystem, LearntFact, Monomial, Polynomial, Var};
use crate::gf2::BitMatrix;
use crate::par::{self, Exec};

/// Column assignment for a linearized system. Columns run from the largest
/// monomial in graded-lex order down to the constant, which is always last
/// when present.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearizationMap {
    cols: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl LinearizationMap {
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(monomials: I) -> Self {
        let set: BTreeSet<Monomial> = monomials.into_iter().collect();
        let cols: Vec<Monomial> = set.into_iter().rev().collect();
        let index = cols
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        LinearizationMap { cols, index }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn col_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn monomial(&self, col: usize) -> &Monomial {
        &self.cols[col]
    }

    pub fn columns(&self) -> &[Monomial] {
        &self.cols
    }

    pub fn delinearize(&self, m: &BitMatrix, row: usize) -> Polynomial {
        Polynomial::normalize(m.row_ones(row).map(|c| self.cols[c].clone()))
    }
}

/// Parameters for XL and for ElimLin's subsampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XlParams {
    /// Expansion degree `D`.
    pub degree: usize,
    /// Subsampling budget exponent `M`: sample until rows × columns ≳ 2^M.
    pub sample_exp: u32,
    /// Expansion allowance `δM`: expand until rows × columns ≈ 2^(M+δM).
    pub expand_exp: u32,
    pub seed: u64,
}

impl Default for XlParams {
    fn default() -> Self {
        XlParams {
            degree: 1,
            sample_exp: 30,
            expand_exp: 4,
            seed: 0,
        }
    }
}

fn pow2(e: u32) -> u128 {
    1u128.checked_shl(e).unwrap_or(u128::MAX)
}

/// Linearizes `polys`; zero polynomials produce no row.
pub fn linearize(polys: &[Polynomial]) -> (BitMatrix, LinearizationMap) {
    linearize_with(polys, Exec::default())
}

pub fn linearize_with(polys: &[Polynomial], exec: Exec) -> (BitMatrix, LinearizationMap) {
    let map =
        LinearizationMap::from_monomials(polys.iter().flat_map(|p| p.monomials().iter().cloned()));
    let nonzero: Vec<&Polynomial> = polys.iter().filter(|p| !p.is_zero()).collect();
    let rows: Vec<Vec<usize>> = par::map(exec, &nonzero, |p| {
        p.monomials()
            .iter()
            .map(|m| map.index[m])
            .collect::<Vec<_>>()
    });
    (BitMatrix::from_sparse_rows(map.len(), &rows), map)
}

/// Number of rows times number of distinct monomials.
pub(crate) fn linearized_size<'a, I: IntoIterator<Item = &'a Polynomial>>(polys: I) -> u128 {
    let mut monos: HashSet<&Monomial> = HashSet::new();
    let mut rows = 0u128;
    for p in polys {
        rows += 1;
        monos.extend(p.monomials());
    }
    rows * monos.len() as u128
}

/// Uniformly subsamples polynomial indices until the linearized size reaches
/// `2^exp`. Returns all indices when the whole system is below the budget.
/// The result is in ascending index order.
pub(crate) fn subsample(polys: &[Polynomial], exp: u32, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let budget = pow2(exp);
    if linearized_size(polys) <= budget {
        return (0..polys.len()).collect();
    }
    let mut order: Vec<usize> = (0..polys.len()).collect();
    order.shuffle(rng);
    let mut monos: HashSet<&Monomial> = HashSet::new();
    let mut taken = Vec::new();
    for i in order {
        taken.push(i);
        monos.extend(polys[i].monomials());
        if taken.len() as u128 * monos.len() as u128 >= budget {
            break;
        }
    }
    taken.sort_unstable();
    taken
}

/// All monomials over `vars` of degree at most `degree`, ascending graded-lex.
pub fn multipliers(vars: &[Var], degree: usize) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut layer = vec![(Monomial::one(), 0usize)];
    for _ in 0..degree.min(vars.len()) {
        let mut next = Vec::new();
        for (m, start) in &layer {
            for (k, &v) in vars.iter().enumerate().skip(*start) {
                next.push((m.mul(&Monomial::var(v)), k + 1));
            }
        }
        next.sort_by(|a, b| a.0.cmp(&b.0));
        out.extend(next.iter().map(|(m, _)| m.clone()));
        layer = next;
    }
    out
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Expands `polys` by multiplying each selected polynomial with every monomial
/// of degree ≤ D over the system's variables.
///
/// Selected polynomials are always kept; products are appended polynomial by
/// polynomial in ascending degree order (ties by input order) until the
/// linearized size would exceed `2^(M+δM)`. Products that vanish are kept in
/// the output so the count matches the full-expansion formula.
pub fn xl_expand(polys: &[Polynomial], params: &XlParams, exec: Exec) -> Vec<Polynomial> {
    let mut rng = rng_for(params.seed, 1);
    let mut selected = subsample(polys, params.sample_exp, &mut rng);
    selected.sort_by_key(|&i| (polys[i].degree(), i));

    let vars: Vec<Var> = {
        let set: BTreeSet<Var> = polys.iter().flat_map(|p| p.vars()).collect();
        set.into_iter().collect()
    };
    let mults = multipliers(&vars, params.degree);
    let budget = pow2(params.sample_exp.saturating_add(params.expand_exp));

    let mut monos: HashSet<Monomial> = HashSet::new();
    for &i in &selected {
        monos.extend(polys[i].monomials().iter().cloned());
    }
    let mut rows = selected.len() as u128;
    let mut products: Vec<Vec<Polynomial>> = vec![Vec::new(); selected.len()];

    const BATCH: usize = 64;
    'outer: for (b, chunk) in selected.chunks(BATCH).enumerate() {
        let expanded: Vec<Vec<Polynomial>> = par::map(exec, chunk, |&i| {
            mults[1..]
                .iter()
                .map(|m| polys[i].mul_monomial(m))
                .collect()
        });
        for (k, prods) in expanded.into_iter().enumerate() {
            for p in prods {
                let fresh = p.monomials().iter().filter(|m| !monos.contains(*m)).count();
                if (rows + 1) * (monos.len() + fresh) as u128 > budget {
                    break 'outer;
                }
                monos.extend(p.monomials().iter().cloned());
                rows += 1;
                products[b * BATCH + k].push(p);
            }
        }
    }

    let mut out = Vec::with_capacity(rows as usize);
    for (k, &i) in selected.iter().enumerate() {
        out.push(polys[i].clone());
        out.append(&mut products[k]);
    }
    out
}

/// Keeps RREF rows that are linear, or that are exactly one monomial of
/// degree ≥ 2 plus the constant.
pub fn extract_facts(rref: &BitMatrix, map: &LinearizationMap) -> Vec<LearntFact> {
    (0..rref.rows())
        .filter(|&r| !rref.row_is_zero(r))
        .filter_map(|r| LearntFact::classify(map.delinearize(rref, r)))
        .collect()
}

/// XL on a system: expand, linearize, eliminate, extract.
pub fn xl_learn(sys: &AnfSystem, params: &XlParams, exec: Exec) -> Vec<LearntFact> {
    let polys: Vec<Polynomial> = sys.polys().cloned().collect();
    xl_learn_polys(&polys, params, exec)
}

pub fn xl_learn_polys(polys: &[Polynomial], params: &XlParams, exec: Exec) -> Vec<LearntFact> {
    let expanded = xl_expand(polys, params, exec);
    let (mut m, map) = linearize_with(&expanded, exec);
    m.gauss_jordan_with(exec);
    extract_facts(&m, &map)
}
