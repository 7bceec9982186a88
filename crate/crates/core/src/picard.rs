//! Orbifold line bundles on a genus-zero 2-orbifold `S^2(a_1, ..., a_n)`.
//!
//! A bundle is recorded by its normalized data `(e; b_1, ..., b_n)` with
//! `0 <= b_i < a_i`: `e` is the degree of the desingularized bundle and
//! `b_i` the isotropy at the i-th orbifold point. Raw data is a vector in
//! `Z^(n+1)`; normalization moves multiples of `a_i` out of `b_i` into `e`,
//! which is exactly the quotient map onto the Picard group.

use num_integer::Integer;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PicardError {
    #[error("an orbifold needs at least one orbifold point")]
    NoOrbifoldPoints,
    #[error("isotropy order must be >= 2, got {0}")]
    IsotropyTooSmall(i64),
    #[error("expected {expected} isotropy residues, got {got}")]
    ResidueCount { expected: usize, got: usize },
    #[error("line bundles live on different orbifolds: {left:?} vs {right:?}")]
    OrbifoldMismatch { left: Vec<i64>, right: Vec<i64> },
}

/// The 2-orbifold `S^2(a_1, ..., a_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Orbifold {
    alphas: Vec<i64>,
}

impl Orbifold {
    pub fn new(alphas: Vec<i64>) -> Result<Self, PicardError> {
        if alphas.is_empty() {
            return Err(PicardError::NoOrbifoldPoints);
        }
        if let Some(&a) = alphas.iter().find(|&&a| a < 2) {
            return Err(PicardError::IsotropyTooSmall(a));
        }
        Ok(Orbifold { alphas })
    }

    pub fn alphas(&self) -> &[i64] {
        &self.alphas
    }

    /// Number of orbifold points.
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Product of the isotropy orders.
    pub fn order_product(&self) -> i128 {
        self.alphas.iter().map(|&a| a as i128).product()
    }

    /// Orbifold Euler characteristic `2 - n + sum 1/a_i`.
    pub fn euler_char(&self) -> Rational {
        let n = self.alphas.len() as i64;
        Rational::from_integer(2 - n) + self.alphas.iter().map(|&a| Rational::new(1, a)).sum::<Rational>()
    }

    /// Canonical bundle, data `(-2; a_1 - 1, ..., a_n - 1)`.
    pub fn canonical_bundle(&self) -> LineBundle {
        LineBundle {
            e: -2,
            betas: self.alphas.iter().map(|a| a - 1).collect(),
            orbifold: self.clone(),
        }
    }

    pub fn trivial_bundle(&self) -> LineBundle {
        LineBundle {
            e: 0,
            betas: vec![0; self.alphas.len()],
            orbifold: self.clone(),
        }
    }
}

/// Orbifold line bundle in normalized form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LineBundle {
    e: i64,
    betas: Vec<i64>,
    orbifold: Orbifold,
}

impl LineBundle {
    /// Reduce each raw residue mod `a_i` into `[0, a_i)`, carrying the
    /// quotients into `e`. The orbifold degree is unchanged.
    pub fn normalize(e: i64, raw_betas: &[i64], orbifold: &Orbifold) -> Result<Self, PicardError> {
        if raw_betas.len() != orbifold.len() {
            return Err(PicardError::ResidueCount {
                expected: orbifold.len(),
                got: raw_betas.len(),
            });
        }
        let mut carry = 0i64;
        let betas = raw_betas
            .iter()
            .zip(&orbifold.alphas)
            .map(|(&b, &a)| {
                let (q, r) = b.div_mod_floor(&a);
                carry += q;
                r
            })
            .collect();
        Ok(LineBundle {
            e: e + carry,
            betas,
            orbifold: orbifold.clone(),
        })
    }

    pub fn e(&self) -> i64 {
        self.e
    }

    pub fn betas(&self) -> &[i64] {
        &self.betas
    }

    pub fn orbifold(&self) -> &Orbifold {
        &self.orbifold
    }

    pub fn is_trivial(&self) -> bool {
        self.e == 0 && self.betas.iter().all(|&b| b == 0)
    }

    /// Orbifold degree `e + sum b_i / a_i`.
    pub fn degree(&self) -> Rational {
        Rational::from_integer(self.e)
            + self
                .betas
                .iter()
                .zip(&self.orbifold.alphas)
                .map(|(&b, &a)| Rational::new(b, a))
                .sum::<Rational>()
    }

    pub fn tensor(&self, other: &LineBundle) -> Result<LineBundle, PicardError> {
        if self.orbifold != other.orbifold {
            return Err(PicardError::OrbifoldMismatch {
                left: self.orbifold.alphas.clone(),
                right: other.orbifold.alphas.clone(),
            });
        }
        let raw: Vec<i64> = self.betas.iter().zip(&other.betas).map(|(a, b)| a + b).collect();
        LineBundle::normalize(self.e + other.e, &raw, &self.orbifold)
    }

    pub fn dual(&self) -> LineBundle {
        self.power(-1)
    }

    /// `m`-fold tensor power; negative `m` powers the dual.
    pub fn power(&self, m: i64) -> LineBundle {
        let raw: Vec<i64> = self.betas.iter().map(|b| b * m).collect();
        LineBundle::normalize(self.e * m, &raw, &self.orbifold)
            .expect("residue count matches by construction")
    }

    /// Dimension of the space of holomorphic sections, `max(0, e + 1)` on a
    /// genus-zero base.
    pub fn h0(&self) -> i64 {
        (self.e + 1).max(0)
    }
}

impl Serialize for LineBundle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("LineBundle", 2)?;
        s.serialize_field("betas", &self.betas)?;
        s.serialize_field("e", &self.e)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orb(a: &[i64]) -> Orbifold {
        Orbifold::new(a.to_vec()).unwrap()
    }

    fn bundle(e: i64, b: &[i64], o: &Orbifold) -> LineBundle {
        LineBundle::normalize(e, b, o).unwrap()
    }

    #[test]
    fn orbifold_validation() {
        assert_eq!(Orbifold::new(vec![]), Err(PicardError::NoOrbifoldPoints));
        assert_eq!(Orbifold::new(vec![2, 1]), Err(PicardError::IsotropyTooSmall(1)));
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(orb(&[2, 3, 5]).euler_char(), Rational::new(1, 30));
        assert_eq!(orb(&[2, 3, 7]).euler_char(), Rational::new(-1, 42));
        assert_eq!(orb(&[2]).euler_char(), Rational::new(3, 2));
    }

    #[test]
    fn canonical_bundles() {
        let c = orb(&[2, 3, 7]);
        let k = c.canonical_bundle();
        assert_eq!((k.e(), k.betas()), (-2, &[1, 2, 6][..]));
        assert_eq!(k.degree(), Rational::new(1, 42));

        let k = orb(&[2, 3, 5]).canonical_bundle();
        assert_eq!((k.e(), k.betas()), (-2, &[1, 2, 4][..]));
        assert_eq!(k.degree(), Rational::new(-1, 30));

        let k = orb(&[3]).canonical_bundle();
        assert_eq!((k.e(), k.betas()), (-2, &[2][..]));
        assert_eq!(k.degree(), Rational::new(-4, 3));
    }

    #[test]
    fn normalize_examples() {
        let c = orb(&[2, 3, 5]);
        let l = bundle(0, &[2, 0, 0], &c);
        assert_eq!((l.e(), l.betas()), (1, &[0, 0, 0][..]));
        assert_eq!(bundle(0, &[0, 0, 0], &c), c.trivial_bundle());

        let c = orb(&[2, 3, 7]);
        let l = bundle(-4, &[2, 4, 12], &c);
        assert_eq!((l.e(), l.betas()), (-1, &[0, 1, 5][..]));

        // Negative residues borrow from e.
        let l = bundle(0, &[-1, 0, 0], &c);
        assert_eq!((l.e(), l.betas()), (-1, &[1, 0, 0][..]));

        assert_eq!(
            LineBundle::normalize(0, &[0, 0], &c),
            Err(PicardError::ResidueCount { expected: 3, got: 2 })
        );
    }

    #[test]
    fn tensor_examples() {
        let c = orb(&[2, 3, 7]);
        let k = c.canonical_bundle();
        let kk = k.tensor(&k).unwrap();
        assert_eq!((kk.e(), kk.betas()), (-1, &[0, 1, 5][..]));
        assert_eq!(k.tensor(&c.trivial_bundle()).unwrap(), k);
        assert!(k.tensor(&k.dual()).unwrap().is_trivial());

        let other = orb(&[2, 3, 5]).trivial_bundle();
        assert!(matches!(k.tensor(&other), Err(PicardError::OrbifoldMismatch { .. })));
    }

    #[test]
    fn power_examples() {
        let c = orb(&[2, 3, 7]);
        let n = bundle(-1, &[1, 1, 1], &c);
        assert!(n.power(0).is_trivial());
        let n2 = n.power(2);
        assert_eq!((n2.e(), n2.betas()), (-1, &[0, 2, 2][..]));
        assert_eq!(n.power(-1), n.dual());
        let nd = n.dual();
        assert_eq!(nd, c.canonical_bundle());
    }

    #[test]
    fn h0_examples() {
        let c = orb(&[2, 3, 7]);
        assert_eq!(c.trivial_bundle().h0(), 1);
        assert_eq!(bundle(-1, &[0, 1, 5], &c).h0(), 0);
        assert_eq!(bundle(2, &[0, 0, 0], &c).h0(), 3);
    }

    #[test]
    fn serializes_without_orbifold() {
        let c = orb(&[2, 3, 7]);
        let json = serde_json::to_string(&c.canonical_bundle()).unwrap();
        assert_eq!(json, r#"{"betas":[1,2,6],"e":-2}"#);
    }
}
