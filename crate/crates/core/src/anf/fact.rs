use std::fmt;

use super::poly::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactKind {
    /// `x_{i1} + ... + x_{ip} + c`
    Linear,
    /// `x_{i1}*...*x_{ip} + 1` with `p >= 2`
    MonomialOne,
}

/// A learnt fact. Only the two shapes above are ever fed back into a system.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LearntFact {
    kind: FactKind,
    poly: Polynomial,
}

impl LearntFact {
    /// Classifies `p`; returns `None` for zero and for anything outside the two fact kinds.
    pub fn classify(p: Polynomial) -> Option<Self> {
        if p.is_zero() {
            return None;
        }
        if p.is_linear() {
            return Some(LearntFact {
                kind: FactKind::Linear,
                poly: p,
            });
        }
        if p.len() == 2 && p.has_constant() {
            return Some(LearntFact {
                kind: FactKind::MonomialOne,
                poly: p,
            });
        }
        None
    }

    /// The equation `1 = 0`.
    pub fn contradiction() -> Self {
        LearntFact {
            kind: FactKind::Linear,
            poly: Polynomial::one(),
        }
    }

    pub fn kind(&self) -> FactKind {
        self.kind
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn into_poly(self) -> Polynomial {
        self.poly
    }

    pub fn is_contradiction(&self) -> bool {
        self.poly.is_one()
    }
}

impl fmt::Display for LearntFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.poly, f)
    }
}

impl fmt::Debug for LearntFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({})", self.kind, self.poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anf::poly;

    #[test]
    fn classify_shapes() {
        assert_eq!(
            LearntFact::classify(poly(&[&[1], &[3], &[]]))
                .unwrap()
                .kind(),
            FactKind::Linear
        );
        assert_eq!(
            LearntFact::classify(poly(&[&[2, 3, 4], &[]]))
                .unwrap()
                .kind(),
            FactKind::MonomialOne
        );
        assert!(LearntFact::classify(poly(&[&[1, 2]])).is_none());
        assert!(LearntFact::classify(poly(&[&[1, 2], &[3]])).is_none());
        assert!(LearntFact::classify(Polynomial::zero()).is_none());
        assert!(LearntFact::classify(Polynomial::one())
            .unwrap()
            .is_contradiction());
    }
}
