//! ANF to CNF and back: projection equivalence for both encodings, XOR and
//! clause cutting.

mod common;

use anfbridge::anf::poly;
use anfbridge::cnf::{
    anf_to_cnf, cnf_to_anf, split_clause, xor_to_clauses, Clause, Cnf, ConvParams, Lit,
};
use anfbridge::{AnfSystem, Polynomial, Var};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << n).map(move |a| (0..n).map(|i| a >> i & 1 == 1).collect())
}

/// Each ANF solution extends uniquely; each non-solution not at all.
fn exact_projection(polys: &[Polynomial], n: usize, cnf: &Cnf) -> Result<(), String> {
    for asg in assignments(n) {
        let want = usize::from(polys.iter().all(|p| !p.eval(&asg)));
        let got = common::count_extensions(&cnf.clauses, cnf.num_vars, &asg, 2);
        if got != want {
            return Err(format!("{asg:?}: {got} extensions, expected {want}"));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn karnaugh_and_tseitin_agree(seed in any::<u64>(), n in 1usize..9, xor_cut in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_poly(&mut rng, n, 3, 8);
        let sys = AnfSystem::from_polys(n, [p.clone()]);
        for karnaugh in [1, 4, 12] {
            let params = ConvParams { karnaugh, xor_cut, clause_cut: 3 };
            let (cnf, map) = anf_to_cnf(&sys, &params).unwrap();
            prop_assert_eq!(map.num_vars(), cnf.num_vars);
            prop_assert!(cnf.clauses.iter().all(|c| c.max_var().is_none_or(|v| (v as usize) < cnf.num_vars)));
            let r = exact_projection(std::slice::from_ref(&p), n, &cnf);
            prop_assert!(r.is_ok(), "K={} {}: {:?}", karnaugh, p, r);
            // monomial variables equal their products in every model
            for asg in assignments(n) {
                if p.eval(&asg) {
                    continue;
                }
                for (v, m) in map.monomial_vars().filter(|(_, m)| m.degree() >= 2) {
                    let forced: Vec<Clause> = cnf.clauses.iter().cloned()
                        .chain([Clause::unit(Lit::new(v, m.eval(&asg)))])
                        .collect();
                    prop_assert_eq!(common::count_extensions(&forced, cnf.num_vars, &asg, 1), 0);
                }
            }
        }
    }

    #[test]
    fn xor_clauses_are_exact(len in 1usize..7, parity in any::<bool>(), negs in any::<u8>()) {
        let lits: Vec<Lit> = (0..len as u32).map(|v| Lit::new(v, negs >> v & 1 == 1)).collect();
        let cs = xor_to_clauses(&lits, parity);
        prop_assert_eq!(cs.len(), 1 << (len - 1));
        for asg in assignments(len) {
            let x = lits.iter().fold(false, |acc, l| acc ^ l.eval(asg[l.var() as usize]));
            prop_assert_eq!(cs.iter().all(|c| c.satisfied_by(&asg)), x == parity);
        }
    }

    #[test]
    fn clause_cutting_is_equisatisfiable(negs in any::<u16>(), len in 1usize..12, max_pos in 2usize..6) {
        let c = Clause::new((0..len as u32).map(|v| Lit::new(v, negs >> v & 1 == 1))).unwrap();
        let mut next = len as u32;
        let pieces = split_clause(&c, max_pos, &mut next);
        prop_assert!(pieces.iter().all(|p| p.lits().iter().filter(|l| !l.is_negated()).count() <= max_pos));
        let total = next as usize;
        for asg in assignments(len) {
            let want = usize::from(c.satisfied_by(&asg));
            let got = common::count_extensions(&pieces, total, &asg, 1);
            prop_assert_eq!(got.min(1), want);
        }
    }

    #[test]
    fn cnf_round_trip_projects_exactly(seed in any::<u64>(), n in 1usize..8, m in 0usize..12, cut in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cnf = Cnf::new(n, (0..m).map(|_| common::random_clause(&mut rng, n, 5)).collect());
        let params = ConvParams { clause_cut: cut, ..ConvParams::default() };
        let anf = cnf_to_anf(&cnf, &params).unwrap();
        let polys: Vec<Polynomial> = anf.polys().cloned().collect();
        for asg in assignments(n) {
            let pinned: Vec<Polynomial> = polys
                .iter()
                .cloned()
                .chain((0..n).map(|i| Polynomial::var_plus(Var(i as u32), asg[i])))
                .collect();
            prop_assert_eq!(common::anf_satisfiable(&pinned, anf.num_vars()), cnf.satisfied_by(&asg));
        }
    }
}

#[test]
fn monomials_shared_across_polynomials() {
    let sys = AnfSystem::from_polys(
        4,
        [
            poly(&[&[1, 2], &[3], &[4], &[1, 3, 4]]),
            poly(&[&[1, 2], &[4], &[2, 3], &[]]),
        ],
    );
    let params = ConvParams {
        karnaugh: 2,
        ..ConvParams::default()
    };
    let (cnf, map) = anf_to_cnf(&sys, &params).unwrap();
    let x1x2 = map.var_of(&poly(&[&[1, 2]]).monomials()[0]).unwrap();
    assert!(x1x2 >= 4);
    assert_eq!(
        map.monomial_vars()
            .filter(|(_, m)| m.to_string() == "x1*x2")
            .count(),
        1
    );
    let polys: Vec<Polynomial> = sys.polys().cloned().collect();
    exact_projection(&polys, 4, &cnf).unwrap();
}

#[test]
fn empty_and_contradictory_systems() {
    let (cnf, _) = anf_to_cnf(&AnfSystem::new(3), &ConvParams::default()).unwrap();
    assert!(cnf.clauses.is_empty());
    let mut bad = AnfSystem::from_polys(1, [poly(&[&[1]]), poly(&[&[1], &[]])]);
    bad.propagate();
    let (cnf, _) = anf_to_cnf(&bad, &ConvParams::default()).unwrap();
    assert_eq!(cnf.clauses, vec![Clause::empty()]);
}
