//! Seifert invariants `(b; (a_1, g_1), ..., (a_n, g_n))` of `Y = S(N) -> C`.

use num_integer::Integer;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::Rational;
use crate::picard::{LineBundle, Orbifold, PicardError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeifertError {
    #[error("need at least {min} exceptional fibers, got {got}")]
    TooFewFibers { min: usize, got: usize },
    #[error("multiplicity must be >= 2, got {0}")]
    MultiplicityTooSmall(i64),
    #[error("multiplicities {0} and {1} are not coprime")]
    NotCoprime(i64, i64),
    #[error("invalid fiber ({alpha}, {gamma}): need 0 < gamma < alpha and gcd(alpha, gamma) = 1")]
    InvalidFiber { alpha: i64, gamma: i64 },
    #[error("Euler number of the Seifert fibration vanishes")]
    ZeroEulerNumber,
    #[error("not an integral homology sphere: A*e(Y) = {a_times_e}")]
    NotHomologySphere { a_times_e: i128 },
    #[error("degree ratio {ratio} is not an integer")]
    NonIntegralLog { ratio: Rational },
    #[error("N^{power} does not reproduce the requested bundle")]
    LogMismatch { power: i64 },
    #[error("arithmetic overflow for multiplicities {0:?}")]
    Overflow(Vec<i64>),
    #[error(transparent)]
    Picard(#[from] PicardError),
}

/// Seifert data with `0 < g_i < a_i` and `gcd(a_i, g_i) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeifertData {
    b: i64,
    fibers: Vec<(i64, i64)>,
}

/// Outcome of the homology-sphere test together with its diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HomologySphereCheck {
    pub is_homology_sphere: bool,
    /// `A * e(Y)` with `A` the product of the multiplicities.
    pub a_times_e: i128,
}

impl SeifertData {
    pub fn new(b: i64, fibers: Vec<(i64, i64)>) -> Result<Self, SeifertError> {
        if fibers.is_empty() {
            return Err(SeifertError::TooFewFibers { min: 1, got: 0 });
        }
        for &(alpha, gamma) in &fibers {
            if alpha < 2 {
                return Err(SeifertError::MultiplicityTooSmall(alpha));
            }
            if gamma <= 0 || gamma >= alpha || alpha.gcd(&gamma) != 1 {
                return Err(SeifertError::InvalidFiber { alpha, gamma });
            }
        }
        let data = SeifertData { b, fibers };
        if data.euler_number().is_zero() {
            return Err(SeifertError::ZeroEulerNumber);
        }
        Ok(data)
    }

    /// Seifert data of the Brieskorn sphere `Sigma(a_1, ..., a_n)`, oriented as
    /// a singularity link: the unique `(b, g_i)` with `0 < g_i < a_i` and
    /// `A * e(Y) = -1`.
    pub fn brieskorn(alphas: &[i64]) -> Result<Self, SeifertError> {
        check_brieskorn_exponents(alphas)?;
        let overflow = || SeifertError::Overflow(alphas.to_vec());
        let a: i128 = alphas
            .iter()
            .try_fold(1i128, |acc, &x| acc.checked_mul(x as i128))
            .ok_or_else(overflow)?;

        // g_i * (A / a_i) = -1 mod a_i
        let mut gammas = Vec::with_capacity(alphas.len());
        let mut weighted = 0i128;
        for &alpha in alphas {
            let alpha = alpha as i128;
            let cofactor = a / alpha;
            let inv = mod_inverse(cofactor.rem_euclid(alpha), alpha)
                .expect("cofactor is a unit modulo a pairwise-coprime multiplicity");
            let gamma = (-inv).rem_euclid(alpha);
            weighted = gamma
                .checked_mul(cofactor)
                .and_then(|t| weighted.checked_add(t))
                .ok_or_else(overflow)?;
            gammas.push(gamma as i64);
        }
        let numerator = -1 - weighted;
        debug_assert_eq!(numerator.rem_euclid(a), 0);
        let b = i64::try_from(numerator / a).map_err(|_| overflow())?;
        SeifertData::new(b, alphas.iter().copied().zip(gammas).collect())
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn fibers(&self) -> &[(i64, i64)] {
        &self.fibers
    }

    pub fn alphas(&self) -> Vec<i64> {
        self.fibers.iter().map(|&(a, _)| a).collect()
    }

    pub fn gammas(&self) -> Vec<i64> {
        self.fibers.iter().map(|&(_, g)| g).collect()
    }

    pub fn orbifold(&self) -> Orbifold {
        Orbifold::new(self.alphas()).expect("multiplicities validated at construction")
    }

    /// `e(Y) = b + sum g_i / a_i`.
    pub fn euler_number(&self) -> Rational {
        Rational::from_integer(self.b)
            + self
                .fibers
                .iter()
                .map(|&(a, g)| Rational::new(g, a))
                .sum::<Rational>()
    }

    pub fn validate_homology_sphere(&self) -> HomologySphereCheck {
        let a: Rational = Rational::from_integer(self.orbifold().order_product());
        let product = &a * &self.euler_number();
        let a_times_e = product
            .to_integer()
            .and_then(|n| i128::try_from(n).ok())
            .expect("A * e(Y) is an integer");
        HomologySphereCheck {
            is_homology_sphere: a_times_e.abs() == 1,
            a_times_e,
        }
    }

    pub fn require_homology_sphere(&self) -> Result<(), SeifertError> {
        let check = self.validate_homology_sphere();
        if check.is_homology_sphere {
            Ok(())
        } else {
            Err(SeifertError::NotHomologySphere {
                a_times_e: check.a_times_e,
            })
        }
    }

    /// The orbifold line bundle `N` with `Y = S(N)`; its degree is `e(Y)`.
    pub fn n_bundle(&self) -> LineBundle {
        LineBundle::normalize(self.b, &self.gammas(), &self.orbifold())
            .expect("one residue per fiber")
    }

    /// The unique `m` with `N^m = bundle`.
    pub fn bundle_log(&self, bundle: &LineBundle) -> Result<i64, SeifertError> {
        let n = self.n_bundle();
        let ratio = &bundle.degree() / &n.degree();
        let m = ratio
            .to_integer()
            .and_then(|m| i64::try_from(m).ok())
            .ok_or_else(|| SeifertError::NonIntegralLog { ratio: ratio.clone() })?;
        if &n.power(m) != bundle {
            return Err(SeifertError::LogMismatch { power: m });
        }
        Ok(m)
    }
}

/// Brieskorn exponents: at least three, each `>= 2`, pairwise coprime.
pub fn check_brieskorn_exponents(alphas: &[i64]) -> Result<(), SeifertError> {
    if alphas.len() < 3 {
        return Err(SeifertError::TooFewFibers {
            min: 3,
            got: alphas.len(),
        });
    }
    if let Some(&a) = alphas.iter().find(|&&a| a < 2) {
        return Err(SeifertError::MultiplicityTooSmall(a));
    }
    for (i, &x) in alphas.iter().enumerate() {
        for &y in &alphas[i + 1..] {
            if x.gcd(&y) != 1 {
                return Err(SeifertError::NotCoprime(x, y));
            }
        }
    }
    Ok(())
}

fn mod_inverse(x: i128, m: i128) -> Option<i128> {
    let egcd = x.extended_gcd(&m);
    (egcd.gcd == 1).then(|| egcd.x.rem_euclid(m))
}

impl Serialize for SeifertData {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SeifertData", 2)?;
        s.serialize_field("b", &self.b)?;
        let pairs: Vec<[i64; 2]> = self.fibers.iter().map(|&(a, g)| [a, g]).collect();
        s.serialize_field("fibers", &pairs)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive search over `0 < g_i < a_i` and a window of `b` values.
    fn brute_force(alphas: &[i64]) -> Vec<(i64, Vec<i64>)> {
        let a: i64 = alphas.iter().product();
        let mut found = Vec::new();
        let mut gammas = vec![1i64; alphas.len()];
        loop {
            for b in -(alphas.len() as i64) - 1..=1 {
                let total = a * b + gammas.iter().zip(alphas).map(|(g, al)| g * (a / al)).sum::<i64>();
                if total == -1 {
                    found.push((b, gammas.clone()));
                }
            }
            let mut i = 0;
            loop {
                if i == gammas.len() {
                    return found;
                }
                gammas[i] += 1;
                if gammas[i] < alphas[i] {
                    break;
                }
                gammas[i] = 1;
                i += 1;
            }
        }
    }

    #[test]
    fn brieskorn_examples() {
        let s = SeifertData::brieskorn(&[2, 3, 5]).unwrap();
        assert_eq!((s.b(), s.gammas()), (-2, vec![1, 2, 4]));
        assert_eq!(s.euler_number(), Rational::new(-1, 30));

        let s = SeifertData::brieskorn(&[2, 3, 7]).unwrap();
        assert_eq!((s.b(), s.gammas()), (-1, vec![1, 1, 1]));
        assert_eq!(s.euler_number(), Rational::new(-1, 42));

        let s = SeifertData::brieskorn(&[2, 3, 5, 7]).unwrap();
        assert_eq!(brute_force(&[2, 3, 5, 7]), vec![(s.b(), s.gammas())]);
        assert_eq!(s.validate_homology_sphere().a_times_e, -1);
    }

    #[test]
    fn brieskorn_matches_brute_force_up_to_ten_thousand() {
        let tuples: &[&[i64]] = &[
            &[2, 3, 11],
            &[3, 4, 5],
            &[2, 5, 7],
            &[5, 7, 9],
            &[7, 11, 13],
            &[2, 3, 5, 7],
            &[3, 4, 5, 7],
            &[2, 3, 5, 7, 11],
            &[9, 10, 11, 7],
        ];
        for alphas in tuples {
            let s = SeifertData::brieskorn(alphas).unwrap();
            assert_eq!(brute_force(alphas), vec![(s.b(), s.gammas())], "{alphas:?}");
        }
    }

    #[test]
    fn brieskorn_rejects_bad_input() {
        assert_eq!(SeifertData::brieskorn(&[2, 4, 5]), Err(SeifertError::NotCoprime(2, 4)));
        assert_eq!(
            SeifertData::brieskorn(&[2, 3]),
            Err(SeifertError::TooFewFibers { min: 3, got: 2 })
        );
        assert_eq!(SeifertData::brieskorn(&[1, 3, 5]), Err(SeifertError::MultiplicityTooSmall(1)));
    }

    #[test]
    fn fiber_validation() {
        assert_eq!(
            SeifertData::new(-1, vec![(4, 2)]),
            Err(SeifertError::InvalidFiber { alpha: 4, gamma: 2 })
        );
        assert_eq!(
            SeifertData::new(-1, vec![(3, 3)]),
            Err(SeifertError::InvalidFiber { alpha: 3, gamma: 3 })
        );
        // e(Y) = -1 + 1/2 + 1/2 = 0
        assert_eq!(SeifertData::new(-1, vec![(2, 1), (2, 1)]), Err(SeifertError::ZeroEulerNumber));
    }

    #[test]
    fn homology_sphere_validation() {
        let s = SeifertData::brieskorn(&[2, 3, 5]).unwrap();
        assert_eq!(
            s.validate_homology_sphere(),
            HomologySphereCheck { is_homology_sphere: true, a_times_e: -1 }
        );
        let s = SeifertData::new(-1, vec![(2, 1), (4, 1)]).unwrap();
        assert_eq!(
            s.validate_homology_sphere(),
            HomologySphereCheck { is_homology_sphere: false, a_times_e: -2 }
        );
        assert_eq!(
            s.require_homology_sphere(),
            Err(SeifertError::NotHomologySphere { a_times_e: -2 })
        );
        let s = SeifertData::new(-1, vec![(2, 1), (3, 1), (7, 1)]).unwrap();
        assert!(s.validate_homology_sphere().is_homology_sphere);
    }

    #[test]
    fn n_bundle_examples() {
        let s = SeifertData::brieskorn(&[2, 3, 7]).unwrap();
        let n = s.n_bundle();
        assert_eq!((n.e(), n.betas()), (-1, &[1, 1, 1][..]));
        assert_eq!(n.degree(), Rational::new(-1, 42));

        let s = SeifertData::brieskorn(&[2, 3, 5]).unwrap();
        let n = s.n_bundle();
        assert_eq!((n.e(), n.betas()), (-2, &[1, 2, 4][..]));
        assert_eq!(n, s.orbifold().canonical_bundle());
    }

    #[test]
    fn bundle_log_examples() {
        let s = SeifertData::brieskorn(&[2, 3, 7]).unwrap();
        let c = s.orbifold();
        assert_eq!(s.bundle_log(&c.trivial_bundle()), Ok(0));
        assert_eq!(s.bundle_log(&c.canonical_bundle()), Ok(-1));
        assert_eq!(s.bundle_log(&s.n_bundle()), Ok(1));
        for m in -20..=20 {
            assert_eq!(s.bundle_log(&s.n_bundle().power(m)), Ok(m));
        }
    }

    #[test]
    fn bundle_log_rejects_non_generators() {
        // Not homology spheres: N does not generate.
        let s = SeifertData::new(-1, vec![(2, 1), (4, 1)]).unwrap();
        let l = LineBundle::normalize(0, &[1, 0], &s.orbifold()).unwrap();
        assert_eq!(s.bundle_log(&l), Err(SeifertError::LogMismatch { power: -2 }));

        let s = SeifertData::new(-1, vec![(3, 1), (4, 1)]).unwrap();
        let l = LineBundle::normalize(0, &[1, 0], &s.orbifold()).unwrap();
        assert!(matches!(s.bundle_log(&l), Err(SeifertError::NonIntegralLog { .. })));
    }

    #[test]
    fn serializes_as_pairs() {
        let s = SeifertData::brieskorn(&[2, 3, 7]).unwrap();
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"b":-1,"fibers":[[2,1],[3,1],[7,1]]}"#
        );
    }
}
