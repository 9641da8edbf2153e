use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// An ANF variable. Indices are 0-based internally and printed 1-based (`x1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0 + 1)
    }
}

/// A product of distinct variables. The empty product is the constant 1.
///
/// Ordering is graded lexicographic: degree first, then the sorted variable
/// indices compared lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Self {
        let mut s = SmallVec::new();
        s.push(v.0);
        Monomial(s)
    }

    /// Builds a monomial from any variable list; duplicates collapse (x·x = x).
    pub fn from_vars<I: IntoIterator<Item = Var>>(vars: I) -> Self {
        let mut s: SmallVec<[u32; 4]> = vars.into_iter().map(|v| v.0).collect();
        s.sort_unstable();
        s.dedup();
        Monomial(s)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl DoubleEndedIterator<Item = Var> + ExactSizeIterator + '_ {
        self.0.iter().map(|&i| Var(i))
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.binary_search(&v.0).is_ok()
    }

    /// Product of two monomials (sorted merge with idempotence).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Removes `v` from the product; `None` if `v` is absent.
    pub fn without(&self, v: Var) -> Option<Monomial> {
        let pos = self.0.binary_search(&v.0).ok()?;
        let mut s = self.0.clone();
        s.remove(pos);
        Some(Monomial(s))
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.0.iter().all(|&i| assignment[i as usize])
    }

    pub fn max_var(&self) -> Option<Var> {
        self.0.last().map(|&i| Var(i))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (k, v) in self.vars().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A GF(2) polynomial: an XOR of distinct monomials, kept sorted ascending in
/// graded-lex order. The empty polynomial is zero. A polynomial `p` stands for
/// the equation `p = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Polynomial(Vec<Monomial>);

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial(Vec::new())
    }

    pub fn one() -> Self {
        Polynomial(vec![Monomial::one()])
    }

    pub fn constant(c: bool) -> Self {
        if c {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn var(v: Var) -> Self {
        Polynomial(vec![Monomial::var(v)])
    }

    /// `x ⊕ c`
    pub fn var_plus(v: Var, c: bool) -> Self {
        let mut p = Self::var(v);
        if c {
            p.0.insert(0, Monomial::one());
        }
        p
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Polynomial(vec![m])
    }

    /// Canonicalizes a raw multiset of monomials: equal monomials cancel in pairs.
    pub fn normalize<I: IntoIterator<Item = Monomial>>(monomials: I) -> Self {
        let mut v: Vec<Monomial> = monomials.into_iter().collect();
        v.sort_unstable();
        let mut out: Vec<Monomial> = Vec::with_capacity(v.len());
        for m in v {
            if out.last() == Some(&m) {
                out.pop();
            } else {
                out.push(m);
            }
        }
        Polynomial(out)
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.0
    }

    pub fn into_monomials(self) -> Vec<Monomial> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    pub fn degree(&self) -> usize {
        self.0.last().map_or(0, Monomial::degree)
    }

    pub fn has_constant(&self) -> bool {
        self.0.first().is_some_and(Monomial::is_one)
    }

    /// Terms other than the constant, highest first.
    pub fn non_constant(&self) -> impl Iterator<Item = &Monomial> {
        self.0.iter().rev().filter(|m| !m.is_one())
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.iter().any(|m| m.contains(v))
    }

    pub fn contains_monomial(&self, m: &Monomial) -> bool {
        self.0.binary_search(m).is_ok()
    }

    /// Sorted distinct variables.
    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.0.iter().flat_map(|m| m.vars()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn max_var(&self) -> Option<Var> {
        self.0.iter().filter_map(Monomial::max_var).max()
    }

    pub fn is_linear(&self) -> bool {
        self.degree() <= 1
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Polynomial(out)
    }

    pub fn add_constant(&self, c: bool) -> Polynomial {
        if c {
            self.add(&Polynomial::one())
        } else {
            self.clone()
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        if m.is_one() {
            return self.clone();
        }
        Polynomial::normalize(self.0.iter().map(|t| t.mul(m)))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        Polynomial::normalize(
            self.0
                .iter()
                .flat_map(|a| other.0.iter().map(move |b| a.mul(b))),
        )
    }

    /// Replaces every occurrence of `v` by `replacement`.
    pub fn substitute(&self, v: Var, replacement: &Polynomial) -> Polynomial {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut with_v = Vec::new();
        for m in &self.0 {
            match m.without(v) {
                Some(stripped) => with_v.push(stripped),
                None => rest.push(m.clone()),
            }
        }
        if with_v.is_empty() {
            return self.clone();
        }
        let mut all = rest;
        for m in &with_v {
            for r in &replacement.0 {
                all.push(m.mul(r));
            }
        }
        Polynomial::normalize(all)
    }

    /// Value of the polynomial under a full assignment (`true` means `p = 1`).
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.0.iter().fold(false, |acc, m| acc ^ m.eval(assignment))
    }
}

impl From<Monomial> for Polynomial {
    fn from(m: Monomial) -> Self {
        Polynomial(vec![m])
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, m) in self.0.iter().rev().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Shorthand used in tests and examples: `poly(&[&[1, 2], &[1], &[]])` is
/// `x1*x2 + x1 + 1` with 1-based variable indices.
pub fn poly(terms: &[&[u32]]) -> Polynomial {
    Polynomial::normalize(
        terms
            .iter()
            .map(|t| Monomial::from_vars(t.iter().map(|&i| Var(i - 1)))),
    )
}
