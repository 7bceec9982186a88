//! Invariants of the Brieskorn singularity `x^p + y^q + z^r = 0` and of its
//! Milnor fiber, checked against the Seifert-side computations.

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{euler_eval, Rational};
use crate::moduli::{self, ModuliError};
use crate::seifert::{check_brieskorn_exponents, SeifertData, SeifertError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SingularityError {
    #[error("deg N = {degree} must be negative (singularity-link orientation)")]
    WrongOrientation { degree: Rational },
    #[error("b- = milnor - 2 pg is negative (pg = {pg}, milnor = {milnor})")]
    NegativeBMinus { pg: i64, milnor: i64 },
    #[error("p*q*r = {0} exceeds the lattice oracle limit")]
    TooLarge(i128),
    #[error("lattice point ({i}, {j}, {k}) lies on a wall")]
    Boundary { i: i64, j: i64, k: i64 },
    #[error("signature {0} is not divisible by 8")]
    SignatureNotDivisible(i64),
    #[error(transparent)]
    Seifert(#[from] SeifertError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
}

pub const LATTICE_LIMIT: i128 = 1_000_000;

fn check_triple(p: i64, q: i64, r: i64) -> Result<(), SingularityError> {
    check_brieskorn_exponents(&[p, q, r])?;
    Ok(())
}

/// `(p-1)(q-1)(r-1)`
pub fn milnor_number(p: i64, q: i64, r: i64) -> Result<i64, SingularityError> {
    check_triple(p, q, r)?;
    Ok((p - 1) * (q - 1) * (r - 1))
}

/// Pinkham-Dolgachev sum `sum_l max(0, -N(l) - 1)` with
/// `N(l) = -l b - sum ceil(l g_i / a_i)`.
pub fn geometric_genus_pd(seifert: &SeifertData) -> Result<i64, SingularityError> {
    seifert.require_homology_sphere()?;
    let deg_n = seifert.euler_number();
    if !deg_n.is_negative() {
        return Err(SingularityError::WrongOrientation { degree: deg_n });
    }
    let deg_k = seifert.orbifold().canonical_bundle().degree();
    let l_max = (&deg_k / &(-deg_n)).floor().to_i64().expect("range fits in i64");
    let b = seifert.b() as i128;
    let mut pg = 0i64;
    for l in 0..=l_max {
        let l = l as i128;
        let ceil_sum: i128 = seifert
            .fibers()
            .iter()
            .map(|&(a, g)| Integer::div_ceil(&(l * g as i128), &(a as i128)))
            .sum();
        let n_l = -l * b - ceil_sum;
        pg += (-n_l - 1).max(0) as i64;
    }
    Ok(pg)
}

/// `sum h^0(N^{-l})` over `l >= 0` with `0 <= deg N^{-l} < deg K`.
pub fn geometric_genus_divisors(seifert: &SeifertData) -> Result<i64, SingularityError> {
    seifert.require_homology_sphere()?;
    let deg_n = seifert.euler_number();
    if !deg_n.is_negative() {
        return Err(SingularityError::WrongOrientation { degree: deg_n });
    }
    Ok(moduli::effective_powers_below_canonical(seifert)
        .iter()
        .map(|b| b.h0())
        .sum())
}

/// `sigma = b+ - b- = 4 pg - milnor`, using `b+ = 2 pg`.
pub fn signature_durfee(pg: i64, milnor: i64) -> Result<i64, SingularityError> {
    if milnor - 2 * pg < 0 {
        return Err(SingularityError::NegativeBMinus { pg, milnor });
    }
    Ok(4 * pg - milnor)
}

/// Signature of the Milnor fiber by counting `0<i<p, 0<j<q, 0<k<r` according
/// to whether `i/p + j/q + k/r mod 2` lies in `(0,1)` or `(1,2)`.
pub fn signature_lattice_oracle(p: i64, q: i64, r: i64) -> Result<i64, SingularityError> {
    check_triple(p, q, r)?;
    let pqr = p as i128 * q as i128 * r as i128;
    if pqr > LATTICE_LIMIT {
        return Err(SingularityError::TooLarge(pqr));
    }
    let (p, q, r) = (p as i64, q as i64, r as i64);
    let n = p * q * r;
    let (qr, pr, pq) = (q * r, p * r, p * q);
    // s * pqr = i qr + j pr + k pq, reduced mod 2pqr and compared with pqr.
    let counts: Result<Vec<i64>, SingularityError> = (1..p)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0i64;
            for j in 1..q {
                for k in 1..r {
                    let s = (i * qr + j * pr + k * pq) % (2 * n);
                    if s == 0 || s == n {
                        return Err(SingularityError::Boundary { i, j, k });
                    }
                    acc += if s < n { 1 } else { -1 };
                }
            }
            Ok(acc)
        })
        .collect();
    Ok(counts?.into_iter().sum())
}

/// `lambda = sigma / 8` from the lattice oracle.
pub fn casson_invariant(p: i64, q: i64, r: i64) -> Result<i64, SingularityError> {
    let sigma = signature_lattice_oracle(p, q, r)?;
    if sigma % 8 != 0 {
        return Err(SingularityError::SignatureNotDivisible(sigma));
    }
    Ok(sigma / 8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainChecks {
    pub pg_routes: bool,
    pub sigma_routes: bool,
    pub milnor_quarter: bool,
}

impl ChainChecks {
    pub fn all(&self) -> bool {
        self.pg_routes && self.sigma_routes && self.milnor_quarter
    }
}

/// Every intermediate value of the identity chain
/// `-2 lambda + pg = -sigma/4 + b+/2 = milnor/4 = chi(M*)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularityInvariants {
    pub exponents: [i64; 3],
    pub milnor: i64,
    pub pg: i64,
    pub pg_divisors: i64,
    pub pg_enumeration: i64,
    pub b_plus: i64,
    pub signature: i64,
    pub signature_durfee: i64,
    pub casson: i64,
    pub euler_sl2c: i64,
    pub checks: ChainChecks,
    pub mismatches: Vec<String>,
}

impl SingularityInvariants {
    pub fn passed(&self) -> bool {
        self.checks.all()
    }
}

pub fn verify_identity_chain(p: i64, q: i64, r: i64) -> Result<SingularityInvariants, SingularityError> {
    let milnor = milnor_number(p, q, r)?;
    let seifert = SeifertData::brieskorn(&[p, q, r])?;
    let pg = geometric_genus_pd(&seifert)?;
    let pg_divisors = geometric_genus_divisors(&seifert)?;
    let excess = moduli::excess_poincare(&seifert)?;
    let pg_enumeration = euler_eval(&excess).to_i64().expect("fits in i64");
    let signature = signature_lattice_oracle(p, q, r)?;
    let casson = casson_invariant(p, q, r)?;
    let euler_sl2c = moduli::sl2c_euler(&seifert, casson)?;

    let mut mismatches = Vec::new();
    let pg_routes = pg == pg_divisors && pg == pg_enumeration;
    if !pg_routes {
        mismatches.push(format!(
            "pg: pinkham-dolgachev {pg}, divisors {pg_divisors}, enumeration {pg_enumeration}"
        ));
    }
    let signature_durfee = match signature_durfee(pg, milnor) {
        Ok(s) => s,
        Err(e) => {
            mismatches.push(e.to_string());
            4 * pg - milnor
        }
    };
    let sigma_routes = signature_durfee == signature && milnor - 2 * pg >= 0;
    if signature_durfee != signature {
        mismatches.push(format!("signature: durfee {signature_durfee}, lattice {signature}"));
    }
    let milnor_quarter =
        milnor % 4 == 0 && -2 * casson + pg == milnor / 4 && euler_sl2c == milnor / 4;
    if !milnor_quarter {
        mismatches.push(format!(
            "milnor/4: milnor {milnor}, -2 lambda + pg = {}, chi(M*) = {euler_sl2c}",
            -2 * casson + pg
        ));
    }

    Ok(SingularityInvariants {
        exponents: [p, q, r],
        milnor,
        pg,
        pg_divisors,
        pg_enumeration,
        b_plus: 2 * pg,
        signature,
        signature_durfee,
        casson,
        euler_sl2c,
        checks: ChainChecks { pg_routes, sigma_routes, milnor_quarter },
        mismatches,
    })
}

/// Pairwise-coprime triples `2 <= p < q < r <= max`.
pub fn coprime_triples(max: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for p in 2..=max {
        for q in p + 1..=max {
            if p.gcd(&q) != 1 {
                continue;
            }
            for r in q + 1..=max {
                if p.gcd(&r) == 1 && q.gcd(&r) == 1 {
                    out.push((p, q, r));
                }
            }
        }
    }
    out
}
