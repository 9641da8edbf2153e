use super::{Clause, Cnf, ConvParams, Lit};
use crate::anf::{AnfSystem, Polynomial, Var};
use crate::error::ConvertError;

/// Splits `clause` so that no piece has more than `max_pos` positive
/// literals. Fresh linking variables are taken from `next_aux`.
///
/// `(n ∨ p1 ∨ … ∨ pk)` becomes `(n ∨ p1 ∨ … ∨ p(j-1) ∨ a1)`,
/// `(¬a1 ∨ pj ∨ … ∨ a2)`, …, `(¬ar ∨ … ∨ pk)`.
pub fn split_clause(clause: &Clause, max_pos: usize, next_aux: &mut u32) -> Vec<Clause> {
    assert!(
        max_pos >= 2,
        "cannot chain with fewer than two positives per piece"
    );
    let (pos, neg): (Vec<Lit>, Vec<Lit>) = clause.lits().iter().partition(|l| !l.is_negated());
    if pos.len() <= max_pos {
        return vec![clause.clone()];
    }
    let mut out = Vec::new();
    let mut fresh = || {
        let a = *next_aux;
        *next_aux += 1;
        a
    };
    let mut link = fresh();
    out.push(
        Clause::new(
            neg.into_iter()
                .chain(pos[..max_pos - 1].iter().copied())
                .chain([Lit::pos(link)]),
        )
        .expect("fresh link variable"),
    );
    let mut start = max_pos - 1;
    loop {
        if pos.len() - start <= max_pos {
            out.push(
                Clause::new(std::iter::once(Lit::neg(link)).chain(pos[start..].iter().copied()))
                    .expect("fresh link variable"),
            );
            return out;
        }
        let next = fresh();
        out.push(
            Clause::new(
                std::iter::once(Lit::neg(link))
                    .chain(pos[start..start + max_pos - 1].iter().copied())
                    .chain([Lit::pos(next)]),
            )
            .expect("fresh link variable"),
        );
        link = next;
        start += max_pos - 1;
    }
}

/// The polynomial that is 1 exactly when `clause` is false: the product of
/// its negated literals.
pub(crate) fn clause_poly(clause: &Clause) -> Polynomial {
    clause.lits().iter().fold(Polynomial::one(), |acc, l| {
        let factor = Polynomial::var_plus(Var(l.var()), !l.is_negated());
        acc.mul(&factor)
    })
}

/// Converts every clause into a polynomial equation after clause cutting.
/// Linking variables are numbered from `cnf.num_vars` upward in clause order.
pub fn cnf_to_anf(cnf: &Cnf, params: &ConvParams) -> Result<AnfSystem, ConvertError> {
    params.validate()?;
    let mut next = cnf.num_vars as u32;
    let mut polys = Vec::new();
    for c in &cnf.clauses {
        for piece in split_clause(c, params.clause_cut, &mut next) {
            polys.push(clause_poly(&piece));
        }
    }
    Ok(AnfSystem::from_polys(next as usize, polys))
}
