use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::anf::{Monomial, Var};

/// Bidirectional map between ANF monomials and CNF variables.
///
/// ANF variable `i` is CNF variable `i`. Monomials of degree ≥ 2 get fresh
/// CNF variables on demand; cutting auxiliaries are fresh variables with no
/// monomial behind them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonomialVarMap {
    anf_vars: usize,
    num_vars: usize,
    by_monomial: HashMap<Monomial, u32>,
    by_var: BTreeMap<u32, Monomial>,
    aux: BTreeSet<u32>,
}

impl MonomialVarMap {
    pub fn new(anf_vars: usize) -> Self {
        MonomialVarMap {
            anf_vars,
            num_vars: anf_vars,
            ..Default::default()
        }
    }

    pub fn anf_vars(&self) -> usize {
        self.anf_vars
    }

    /// Total CNF variables allocated.
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn monomial(&self, var: u32) -> Option<Monomial> {
        if (var as usize) < self.anf_vars {
            Some(Monomial::var(Var(var)))
        } else {
            self.by_var.get(&var).cloned()
        }
    }

    pub fn var_of(&self, m: &Monomial) -> Option<u32> {
        match m.degree() {
            0 => None,
            1 => m
                .vars()
                .next()
                .map(|v| v.0)
                .filter(|&v| (v as usize) < self.anf_vars),
            _ => self.by_monomial.get(m).copied(),
        }
    }

    pub fn is_aux(&self, var: u32) -> bool {
        self.aux.contains(&var)
    }

    pub fn aux_vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.aux.iter().copied()
    }

    /// Monomial-mapped variables of degree ≥ 2, ascending.
    pub fn monomial_vars(&self) -> impl Iterator<Item = (u32, &Monomial)> {
        self.by_var.iter().map(|(&v, m)| (v, m))
    }

    pub fn new_aux(&mut self) -> u32 {
        let v = self.num_vars as u32;
        self.num_vars += 1;
        self.aux.insert(v);
        v
    }

    /// Returns the variable for `m` (degree ≥ 2) and whether it was just created.
    pub fn get_or_insert(&mut self, m: &Monomial) -> (u32, bool) {
        if let Some(v) = self.var_of(m) {
            return (v, false);
        }
        assert!(m.degree() >= 2, "only products get fresh variables");
        let v = self.num_vars as u32;
        self.num_vars += 1;
        self.by_monomial.insert(m.clone(), v);
        self.by_var.insert(v, m.clone());
        (v, true)
    }

    /// Rebuilds a map from explicit entries, as read back from a map file.
    pub(crate) fn from_entries(
        anf_vars: usize,
        num_vars: usize,
        monomials: Vec<(u32, Monomial)>,
        aux: Vec<u32>,
    ) -> Self {
        let mut map = MonomialVarMap::new(anf_vars);
        map.num_vars = num_vars;
        for (v, m) in monomials {
            map.by_monomial.insert(m.clone(), v);
            map.by_var.insert(v, m);
        }
        map.aux.extend(aux);
        map
    }
}
