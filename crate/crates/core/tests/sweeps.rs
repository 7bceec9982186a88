use std::collections::BTreeSet;

use num_integer::Integer;
use sfinv_core::algebra::{euler_eval, LaurentPoly};
use sfinv_core::moduli::{
    self, enumerate_e_vectors, exponent_closed_form, exponent_via_bundles, z_decomposition, ZComponent,
};
use sfinv_core::seifert::SeifertData;
use sfinv_core::singularity::{self, coprime_triples, verify_identity_chain};

/// Increasing pairwise-coprime tuples of length `3..=max_len` with entries in `2..=max`.
fn coprime_tuples(max_len: usize, max: i64) -> Vec<Vec<i64>> {
    fn extend(prefix: &mut Vec<i64>, max_len: usize, max: i64, out: &mut Vec<Vec<i64>>) {
        if prefix.len() >= 3 {
            out.push(prefix.clone());
        }
        if prefix.len() == max_len {
            return;
        }
        let start = prefix.last().map_or(2, |&x| x + 1);
        for a in start..=max {
            if prefix.iter().all(|&x| x.gcd(&a) == 1) {
                prefix.push(a);
                extend(prefix, max_len, max, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), max_len, max, &mut out);
    out
}

fn data_vec(e: i64, betas: &[i64]) -> Vec<i64> {
    std::iter::once(e).chain(betas.iter().copied()).collect()
}

#[test]
fn sweep_covers_expected_tuples() {
    let tuples = coprime_tuples(5, 12);
    assert!(tuples.contains(&vec![2, 3, 5, 7, 11]));
    assert!(tuples.contains(&vec![5, 7, 8, 9, 11]));
    assert!(!tuples.iter().any(|t| t.len() > 5));
}

#[test]
fn homology_sphere_data_for_small_brieskorn_tuples() {
    for t in coprime_tuples(5, 15) {
        let s = SeifertData::brieskorn(&t).unwrap();
        let check = s.validate_homology_sphere();
        assert!(check.is_homology_sphere && check.a_times_e == -1, "{t:?}");
        assert!(s.n_bundle().degree().is_negative(), "{t:?}");
        let k = s.orbifold().canonical_bundle();
        let m_k = s.bundle_log(&k).unwrap();
        assert_eq!(s.n_bundle().power(m_k), k);
    }
}

#[test]
fn enumeration_is_the_set_of_effective_powers() {
    for t in coprime_tuples(5, 12) {
        let s = SeifertData::brieskorn(&t).unwrap();
        let enumerated: BTreeSet<Vec<i64>> = enumerate_e_vectors(&s.orbifold())
            .unwrap()
            .iter()
            .map(|v| v.as_vec())
            .collect();
        let powers: BTreeSet<Vec<i64>> = moduli::effective_powers_below_canonical(&s)
            .iter()
            .map(|b| data_vec(b.e(), b.betas()))
            .collect();
        assert_eq!(enumerated, powers, "{t:?}");
    }
}

#[test]
fn exponents_are_non_negative_integers_by_both_routes() {
    for t in coprime_tuples(5, 12) {
        let o = SeifertData::brieskorn(&t).unwrap().orbifold();
        for v in enumerate_e_vectors(&o).unwrap() {
            let closed = exponent_closed_form(&o, &v).unwrap_or_else(|e| panic!("{t:?}: {e}"));
            assert!(closed >= 0);
            assert_eq!(closed, exponent_via_bundles(&o, &v), "{t:?} {:?}", v.as_vec());
        }
    }
}

#[test]
fn triples_have_finite_character_varieties() {
    for t in coprime_tuples(3, 15) {
        let s = SeifertData::brieskorn(&t).unwrap();
        for c in z_decomposition(&s).unwrap() {
            if let ZComponent::Cpe(c) = c {
                assert_eq!((c.vector.e, c.morse_index, c.ambient_dim_c), (0, 0, 0), "{t:?}");
            }
        }
    }
}

#[test]
fn index_never_exceeds_ambient_dimension() {
    for t in coprime_tuples(5, 12) {
        let s = SeifertData::brieskorn(&t).unwrap();
        for c in z_decomposition(&s).unwrap() {
            if let ZComponent::Cpe(c) = c {
                assert!(c.morse_index >= 0 && c.morse_index % 2 == 0);
                assert!(c.morse_index <= c.ambient_dim_c, "{t:?}");
            }
        }
    }
}

#[test]
fn geometric_genus_routes_agree() {
    for t in coprime_tuples(5, 12) {
        let s = SeifertData::brieskorn(&t).unwrap();
        let pd = singularity::geometric_genus_pd(&s).unwrap();
        let div = singularity::geometric_genus_divisors(&s).unwrap();
        let excess = moduli::excess_poincare(&s).unwrap();
        let from_sizes: i64 = enumerate_e_vectors(&s.orbifold())
            .unwrap()
            .iter()
            .map(|v| v.e + 1)
            .sum();
        assert_eq!(pd, div, "{t:?}");
        assert_eq!(euler_eval(&excess), pd.into(), "{t:?}");
        assert_eq!(from_sizes, pd, "{t:?}");
    }
}

#[test]
fn identity_chain_holds_up_to_fifteen() {
    let triples = coprime_triples(15);
    assert!(!triples.is_empty());
    for (p, q, r) in triples {
        let rep = verify_identity_chain(p, q, r).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.milnor % 4, 0);
    }
}

#[test]
fn hp_euler_equals_sl2c_euler_on_triples() {
    for (p, q, r) in coprime_triples(15) {
        let s = SeifertData::brieskorn(&[p, q, r]).unwrap();
        let lambda = singularity::casson_invariant(p, q, r).unwrap();
        let su2_chi = LaurentPoly::constant(-2 * lambda);
        let hp = moduli::hp_poincare(&s, Some(&su2_chi)).unwrap();
        assert!(!hp.partial);
        let chi = moduli::sl2c_euler(&s, lambda).unwrap();
        assert_eq!(euler_eval(&hp.poly), chi.into(), "({p},{q},{r})");
        let pg = singularity::geometric_genus_pd(&s).unwrap();
        assert_eq!(euler_eval(&moduli::hp_excess(&s).unwrap()), pg.into());
    }
}

#[test]
fn hp_excess_exponents_lie_between_minus_two_e_max_and_zero() {
    // Each CP^e contributes T^-2e + ... + 1, so exponents lie in [-2e_max, 0].
    let s = SeifertData::brieskorn(&[3, 4, 5, 7, 11]).unwrap();
    let hp = moduli::hp_excess(&s).unwrap();
    assert_eq!(hp.max_exponent(), Some(0));
    let e_max = enumerate_e_vectors(&s.orbifold()).unwrap().iter().map(|v| v.e).max().unwrap();
    assert_eq!(hp.min_exponent(), Some(-2 * e_max));
}
