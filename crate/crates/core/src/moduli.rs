//! Lattice vectors indexing the effective divisors of degree `< deg K`, the
//! decomposition of the critical locus `Z` and the Poincaré polynomials built
//! from it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{cp_poincare, euler_eval, hat_normalize, LaurentPoly, Rational};
use crate::picard::{LineBundle, Orbifold};
use crate::seifert::{SeifertData, SeifertError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuliError {
    #[error("exponent {value} of vector {vector:?} is not a non-negative integer")]
    BadExponent { vector: Vec<i64>, value: Rational },
    #[error("exponent routes disagree on {vector:?}: closed form {closed}, bundles {bundles}")]
    ExponentRoutes { vector: Vec<i64>, closed: i64, bundles: i64 },
    #[error("parity equation for L0 has no solution (m_L = {m_l}, m_K = {m_k})")]
    Parity { m_l: i64, m_k: i64 },
    #[error("ambient dimension mismatch on {vector:?}: {from_index} vs {from_bundles}")]
    AmbientDimension { vector: Vec<i64>, from_index: i64, from_bundles: i64 },
    #[error("lattice of vectors below the canonical degree is too large")]
    TooLarge,
    #[error(transparent)]
    Seifert(#[from] SeifertError),
}

/// `(e; b_1, ..., b_n)` with `e >= 0`, `0 <= b_i < a_i` and degree `< -chi(C)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EVector {
    pub e: i64,
    pub betas: Vec<i64>,
    pub degree: Rational,
}

impl EVector {
    /// `[e, b_1, ..., b_n]`
    pub fn as_vec(&self) -> Vec<i64> {
        std::iter::once(self.e).chain(self.betas.iter().copied()).collect()
    }

    pub fn bundle(&self, orbifold: &Orbifold) -> LineBundle {
        LineBundle::normalize(self.e, &self.betas, orbifold).expect("residue count matches")
    }
}

const MAX_VECTORS: usize = 5_000_000;

/// All vectors of the enumeration, sorted by degree and then lexicographically.
pub fn enumerate_e_vectors(orbifold: &Orbifold) -> Result<Vec<EVector>, ModuliError> {
    let alphas = orbifold.alphas();
    // Work with degrees scaled by lcm(a_i) so every comparison is integral.
    let l: i128 = alphas.iter().fold(1i128, |acc, &a| acc.lcm(&(a as i128)));
    let bound = &orbifold.canonical_bundle().degree() * &Rational::from_integer(l);
    let bound = bound.to_integer().and_then(|b| b.to_i128()).expect("scaled degree is integral");
    if bound <= 0 {
        return Ok(Vec::new());
    }
    let weights: Vec<i128> = alphas.iter().map(|&a| l / a as i128).collect();

    let mut out: Vec<(i128, Vec<i64>)> = Vec::new();
    let mut current = vec![0i64; alphas.len() + 1];
    // Prefix pruning is exact because every term is non-negative.
    fn recurse(
        pos: usize,
        partial: i128,
        bound: i128,
        l: i128,
        alphas: &[i64],
        weights: &[i128],
        current: &mut Vec<i64>,
        out: &mut Vec<(i128, Vec<i64>)>,
    ) -> Result<(), ModuliError> {
        if pos == alphas.len() {
            let mut e = 0i64;
            while partial + e as i128 * l < bound {
                current[0] = e;
                out.push((partial + e as i128 * l, current.clone()));
                if out.len() > MAX_VECTORS {
                    return Err(ModuliError::TooLarge);
                }
                e += 1;
            }
            return Ok(());
        }
        for beta in 0..alphas[pos] {
            let next = partial + beta as i128 * weights[pos];
            if next >= bound {
                break;
            }
            current[pos + 1] = beta;
            recurse(pos + 1, next, bound, l, alphas, weights, current, out)?;
        }
        Ok(())
    }
    recurse(0, 0, bound, l, alphas, &weights, &mut current, &mut out)?;

    out.sort();
    Ok(out
        .into_iter()
        .map(|(scaled, v)| EVector {
            e: v[0],
            betas: v[1..].to_vec(),
            degree: Rational::new(BigInt::from(scaled), BigInt::from(l)),
        })
        .collect())
}

/// `-chi(C) - deg - 1 + sum {(b_i + 1) / a_i}` evaluated exactly.
pub fn exponent_closed_form(orbifold: &Orbifold, v: &EVector) -> Result<i64, ModuliError> {
    let frac_sum: Rational = v
        .betas
        .iter()
        .zip(orbifold.alphas())
        .map(|(&b, &a)| Rational::new(b + 1, a).frac())
        .sum();
    let value = -orbifold.euler_char() - &v.degree - Rational::one() + frac_sum;
    match value.to_integer().and_then(|n| n.to_i64()) {
        Some(n) if n >= 0 => Ok(n),
        _ => Err(ModuliError::BadExponent {
            vector: v.as_vec(),
            value,
        }),
    }
}

/// `h^0(L^{-1} K^2)` for the bundle `L` with data `v`.
pub fn exponent_via_bundles(orbifold: &Orbifold, v: &EVector) -> i64 {
    let k = orbifold.canonical_bundle();
    v.bundle(orbifold)
        .dual()
        .tensor(&k)
        .and_then(|b| b.tensor(&k))
        .expect("same orbifold")
        .h0()
}

/// Both exponent routes, required to agree.
pub fn exponent(orbifold: &Orbifold, v: &EVector) -> Result<i64, ModuliError> {
    let closed = exponent_closed_form(orbifold, v)?;
    let bundles = exponent_via_bundles(orbifold, v);
    if closed != bundles {
        return Err(ModuliError::ExponentRoutes {
            vector: v.as_vec(),
            closed,
            bundles,
        });
    }
    Ok(closed)
}

/// `(m0, k)` with `L = L0^{-2} N^k K` and `L0 = N^{m0}`.
pub fn solve_l0_k(bundle: &LineBundle, seifert: &SeifertData) -> Result<(i64, u8), ModuliError> {
    L0Solver::new(seifert)?.solve(bundle)
}

/// The data of `solve_l0_k` that does not depend on the bundle.
struct L0Solver<'a> {
    seifert: &'a SeifertData,
    n: LineBundle,
    k_bundle: LineBundle,
    m_k: i64,
}

impl<'a> L0Solver<'a> {
    fn new(seifert: &'a SeifertData) -> Result<Self, ModuliError> {
        let k_bundle = seifert.orbifold().canonical_bundle();
        let m_k = seifert.bundle_log(&k_bundle)?;
        Ok(L0Solver { seifert, n: seifert.n_bundle(), k_bundle, m_k })
    }

    fn solve(&self, bundle: &LineBundle) -> Result<(i64, u8), ModuliError> {
        let m_k = self.m_k;
        let m_l = self.seifert.bundle_log(bundle)?;
        let k = (m_l - m_k).rem_euclid(2);
        let twice = k + m_k - m_l;
        if twice % 2 != 0 {
            return Err(ModuliError::Parity { m_l, m_k });
        }
        let m0 = twice / 2;
        let rebuilt = self
            .n
            .power(-2 * m0)
            .tensor(&self.n.power(k))
            .and_then(|b| b.tensor(&self.k_bundle))
            .expect("same orbifold");
        if &rebuilt != bundle {
            return Err(ModuliError::Parity { m_l, m_k });
        }
        Ok((m0, k as u8))
    }
}

/// A connected piece of the critical locus `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZComponent {
    Su2,
    Cpe(CpeComponent),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpeComponent {
    pub vector: EVector,
    pub morse_index: i64,
    pub ambient_dim_c: i64,
    pub divisor_bundle: LineBundle,
    pub l0_power: i64,
    pub k: u8,
}

impl Serialize for ZComponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ZComponent::Su2 => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("kind", "su2")?;
                m.end()
            }
            ZComponent::Cpe(c) => {
                let mut m = serializer.serialize_map(Some(7))?;
                m.serialize_entry("ambient_dim_c", &c.ambient_dim_c)?;
                m.serialize_entry("e", &c.vector.e)?;
                m.serialize_entry("k", &c.k)?;
                m.serialize_entry("kind", "cpe")?;
                m.serialize_entry("l0_power", &c.l0_power)?;
                m.serialize_entry("morse_index", &c.morse_index)?;
                m.serialize_entry("vector", &c.vector.as_vec())?;
                m.end()
            }
        }
    }
}

/// The SU(2) piece followed by one `CP^e` piece per enumerated vector.
pub fn z_decomposition(seifert: &SeifertData) -> Result<Vec<ZComponent>, ModuliError> {
    seifert.require_homology_sphere()?;
    let orbifold = seifert.orbifold();
    let k_bundle = orbifold.canonical_bundle();
    let n = seifert.n_bundle();
    let solver = L0Solver::new(seifert)?;
    let mut out = vec![ZComponent::Su2];
    for v in enumerate_e_vectors(&orbifold)? {
        let exp = exponent(&orbifold, &v)?;
        let bundle = v.bundle(&orbifold);
        let (m0, k) = solver.solve(&bundle)?;

        let ambient_dim_c = 2 * (v.e + exp);
        // Independent count: L0^{-2} N^k K and L0^2 N^{-k} K.
        let l0 = n.power(m0);
        let nk = n.power(k as i64);
        let first = l0.power(-2).tensor(&nk).and_then(|b| b.tensor(&k_bundle)).expect("same orbifold");
        let second = l0
            .power(2)
            .tensor(&nk.dual())
            .and_then(|b| b.tensor(&k_bundle))
            .expect("same orbifold");
        let from_bundles = 2 * (first.h0() + second.h0() - 1);
        if from_bundles != ambient_dim_c {
            return Err(ModuliError::AmbientDimension {
                vector: v.as_vec(),
                from_index: ambient_dim_c,
                from_bundles,
            });
        }

        out.push(ZComponent::Cpe(CpeComponent {
            morse_index: 2 * exp,
            ambient_dim_c,
            divisor_bundle: bundle,
            l0_power: m0,
            k,
            vector: v,
        }));
    }
    Ok(out)
}

/// Effective powers `N^{-l}`, `l >= 0`, of degree below `deg K`, in order of `l`.
pub fn effective_powers_below_canonical(seifert: &SeifertData) -> Vec<LineBundle> {
    let n = seifert.n_bundle();
    let deg_k = seifert.orbifold().canonical_bundle().degree();
    let step = -n.degree();
    assert!(step.is_positive(), "deg N < 0 required");
    let mut out = Vec::new();
    let mut l = 0i64;
    while &step * &Rational::from_integer(l) < deg_k {
        let b = n.power(-l);
        if b.e() >= 0 {
            out.push(b);
        }
        l += 1;
    }
    out
}

/// `sum_v T^(2 exp(v)) P_T(CP^e)`
pub fn excess_poincare(seifert: &SeifertData) -> Result<LaurentPoly, ModuliError> {
    let mut total = LaurentPoly::zero();
    for c in z_decomposition(seifert)? {
        if let ZComponent::Cpe(c) = c {
            let cp = cp_poincare(c.vector.e).expect("e >= 0");
            total = &total + &cp.shift(c.morse_index);
        }
    }
    Ok(total)
}

/// `chi(M*) = -2 lambda + chi(excess)`
pub fn sl2c_euler(seifert: &SeifertData, casson: i64) -> Result<i64, ModuliError> {
    let excess = euler_eval(&excess_poincare(seifert)?);
    Ok(-2 * casson + excess.to_i64().expect("excess Euler characteristic fits in i64"))
}

/// A polynomial that may be missing its externally supplied SU(2) summand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assembled {
    pub poly: LaurentPoly,
    pub partial: bool,
}

pub fn sl2c_poincare(
    seifert: &SeifertData,
    su2_poly: Option<&LaurentPoly>,
) -> Result<Assembled, ModuliError> {
    let excess = excess_poincare(seifert)?;
    Ok(match su2_poly {
        Some(p) => Assembled { poly: p + &excess, partial: false },
        None => Assembled { poly: excess, partial: true },
    })
}

/// Excess part `sum_v hat(P_T(CP^e))` normalized by the real dimension `2e`.
pub fn hp_excess(seifert: &SeifertData) -> Result<LaurentPoly, ModuliError> {
    seifert.require_homology_sphere()?;
    let mut total = LaurentPoly::zero();
    for v in enumerate_e_vectors(&seifert.orbifold())? {
        let cp = cp_poincare(v.e).expect("e >= 0");
        total = &total + &hat_normalize(&cp, 2 * v.e);
    }
    Ok(total)
}

pub fn hp_poincare(
    seifert: &SeifertData,
    su2_hat_poly: Option<&LaurentPoly>,
) -> Result<Assembled, ModuliError> {
    let excess = hp_excess(seifert)?;
    Ok(match su2_hat_poly {
        Some(p) => Assembled { poly: p + &excess, partial: false },
        None => Assembled { poly: excess, partial: true },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuliReport {
    pub z_components: Vec<ZComponent>,
    pub excess_poincare: LaurentPoly,
    pub pg: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_sl2c: Option<i64>,
    pub hp_excess: LaurentPoly,
}

pub fn moduli_report(seifert: &SeifertData, casson: Option<i64>) -> Result<ModuliReport, ModuliError> {
    let z_components = z_decomposition(seifert)?;
    let excess = excess_poincare(seifert)?;
    let pg = euler_eval(&excess).to_i64().expect("fits in i64");
    Ok(ModuliReport {
        z_components,
        pg,
        euler_sl2c: casson.map(|l| -2 * l + pg),
        hp_excess: hp_excess(seifert)?,
        excess_poincare: excess,
    })
}
