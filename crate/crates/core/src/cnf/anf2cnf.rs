use super::karnaugh::{minimize_cnf, MAX_TABLE_VARS};
use super::{Clause, Cnf, Lit, MonomialVarMap};
use crate::anf::{AnfSystem, Monomial, Resolved, Var};
use crate::error::ConvertError;
use crate::par::{self, Exec};

/// Conversion parameters: Karnaugh bound `K`, XOR-cutting length `L` and
/// clause-cutting length `L'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvParams {
    pub karnaugh: usize,
    pub xor_cut: usize,
    pub clause_cut: usize,
}

impl Default for ConvParams {
    fn default() -> Self {
        ConvParams {
            karnaugh: 8,
            xor_cut: 5,
            clause_cut: 5,
        }
    }
}

impl ConvParams {
    pub fn validate(&self) -> Result<(), ConvertError> {
        if !(1..=MAX_TABLE_VARS).contains(&self.karnaugh) {
            return Err(ConvertError::Params(format!(
                "Karnaugh bound must be in 1..={MAX_TABLE_VARS}, got {}",
                self.karnaugh
            )));
        }
        if self.xor_cut < 3 {
            return Err(ConvertError::Params(format!(
                "XOR-cutting length must be at least 3, got {}",
                self.xor_cut
            )));
        }
        if self.clause_cut < 2 {
            return Err(ConvertError::Params(format!(
                "clause-cutting length must be at least 2, got {}",
                self.clause_cut
            )));
        }
        Ok(())
    }
}

/// CNF for `lits[0] ⊕ … ⊕ lits[l-1] = parity`: one clause per violating
/// sign pattern, `2^(l-1)` in total.
pub fn xor_to_clauses(lits: &[Lit], parity: bool) -> Vec<Clause> {
    let l = lits.len();
    if l == 0 {
        return if parity {
            vec![Clause::empty()]
        } else {
            Vec::new()
        };
    }
    assert!(l < 32, "XOR too long to enumerate");
    (0..1u32 << l)
        .filter(|a| (a.count_ones() % 2 == 1) != parity)
        .filter_map(|a| {
            Clause::new(
                lits.iter()
                    .enumerate()
                    .map(|(i, &lit)| if a >> i & 1 == 1 { !lit } else { lit }),
            )
        })
        .collect()
}

#[derive(Clone, Debug)]
enum Term {
    Mono(Monomial),
    Aux(u32),
}

#[derive(Clone, Debug)]
enum Encoding {
    Karnaugh,
    Tseitin { defs: Vec<(u32, Monomial)> },
}

#[derive(Clone, Debug)]
struct Piece {
    terms: Vec<Term>,
    parity: bool,
    encoding: Encoding,
}

fn term_vars(t: &Term) -> Vec<u32> {
    match t {
        Term::Mono(m) => m.vars().map(|v| v.0).collect(),
        Term::Aux(a) => vec![*a],
    }
}

fn cut(
    terms: Vec<Term>,
    parity: bool,
    len: usize,
    map: &mut MonomialVarMap,
) -> Vec<(Vec<Term>, bool)> {
    if terms.len() <= len {
        return vec![(terms, parity)];
    }
    let mut link = map.new_aux();
    let mut first = terms[..len - 1].to_vec();
    first.push(Term::Aux(link));
    let mut out = vec![(first, parity)];
    let mut start = len - 1;
    loop {
        let mut piece = vec![Term::Aux(link)];
        if terms.len() - start < len {
            piece.extend_from_slice(&terms[start..]);
            out.push((piece, false));
            return out;
        }
        piece.extend_from_slice(&terms[start..start + len - 2]);
        link = map.new_aux();
        piece.push(Term::Aux(link));
        out.push((piece, false));
        start += len - 2;
    }
}

fn encode(piece: &Piece, map: &MonomialVarMap) -> Vec<Clause> {
    match &piece.encoding {
        Encoding::Karnaugh => {
            let mut vars: Vec<u32> = piece.terms.iter().flat_map(term_vars).collect();
            vars.sort_unstable();
            vars.dedup();
            let masks: Vec<u32> = piece
                .terms
                .iter()
                .map(|t| {
                    term_vars(t)
                        .iter()
                        .map(|v| 1u32 << vars.binary_search(v).unwrap())
                        .fold(0, |a, b| a | b)
                })
                .collect();
            minimize_cnf(&vars, |a| {
                let odd = masks.iter().filter(|&&m| a & m == m).count() % 2 == 1;
                odd != piece.parity
            })
        }
        Encoding::Tseitin { defs } => {
            let mut out = Vec::new();
            for (v, m) in defs {
                for x in m.vars() {
                    out.push(Clause::new([Lit::neg(*v), Lit::pos(x.0)]).unwrap());
                }
                out.push(
                    Clause::new(
                        std::iter::once(Lit::pos(*v)).chain(m.vars().map(|x| Lit::neg(x.0))),
                    )
                    .unwrap(),
                );
            }
            let lits: Vec<Lit> = piece
                .terms
                .iter()
                .map(|t| match t {
                    Term::Aux(a) => Lit::pos(*a),
                    Term::Mono(m) => Lit::pos(map.var_of(m).expect("allocated before encoding")),
                })
                .collect();
            out.extend(xor_to_clauses(&lits, piece.parity));
            out
        }
    }
}

/// Converts the system with default parallelism.
pub fn anf_to_cnf(
    sys: &AnfSystem,
    params: &ConvParams,
) -> Result<(Cnf, MonomialVarMap), ConvertError> {
    anf_to_cnf_with(sys, params, Exec::default())
}

/// Converts values to unit clauses, equivalences to clause pairs and every
/// live polynomial to cut pieces encoded by the Karnaugh or Tseitin path.
///
/// Auxiliary and monomial variables are numbered in polynomial order before
/// any piece is encoded, so the output does not depend on `exec`.
pub fn anf_to_cnf_with(
    sys: &AnfSystem,
    params: &ConvParams,
    exec: Exec,
) -> Result<(Cnf, MonomialVarMap), ConvertError> {
    params.validate()?;
    let n = sys.num_vars();
    let mut map = MonomialVarMap::new(n);
    if sys.is_contradiction() {
        return Ok((Cnf::new(n, vec![Clause::empty()]), map));
    }

    let mut clauses = Vec::new();
    let mut equivs = Vec::new();
    for i in 0..n as u32 {
        match sys.resolve(Var(i)) {
            Resolved::Value(c) => clauses.push(Clause::unit(Lit::new(i, !c))),
            Resolved::Free(l) if l.var.0 != i => equivs.push((i, l)),
            Resolved::Free(_) => {}
        }
    }
    for (i, l) in equivs {
        clauses.extend(xor_to_clauses(&[Lit::pos(i), Lit::pos(l.var.0)], l.negated));
    }

    let mut pieces = Vec::new();
    for p in sys.polys() {
        let terms: Vec<Term> = p.non_constant().cloned().map(Term::Mono).collect();
        for (terms, parity) in cut(terms, p.has_constant(), params.xor_cut, &mut map) {
            let mut vars: Vec<u32> = terms.iter().flat_map(term_vars).collect();
            vars.sort_unstable();
            vars.dedup();
            let encoding = if vars.len() <= params.karnaugh {
                Encoding::Karnaugh
            } else {
                let mut defs = Vec::new();
                for t in &terms {
                    if let Term::Mono(m) = t {
                        if m.degree() >= 2 {
                            let (v, created) = map.get_or_insert(m);
                            if created {
                                defs.push((v, m.clone()));
                            }
                        }
                    }
                }
                Encoding::Tseitin { defs }
            };
            pieces.push(Piece {
                terms,
                parity,
                encoding,
            });
        }
    }

    let encoded = par::map(exec, &pieces, |piece| encode(piece, &map));
    clauses.extend(encoded.into_iter().flatten());
    Ok((Cnf::new(map.num_vars(), clauses), map))
}
