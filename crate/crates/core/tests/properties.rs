use proptest::prelude::*;

use trcalc::arith::{cokernel, homology_all, smith_normal_form, PGroup, PMatrix, PresentedModule, SparseComplex, Zpr};
use trcalc::cli::{CellRecord, ChartFile, JobSpec, Target};
use trcalc::witt::{
    from_coordinates, teichmuller_expand, witt_sum_oracle, CharPPoly, MonomialAlgebra, PRational, Role,
};

fn ring_strategy() -> impl Strategy<Value = Zpr> {
    prop_oneof![Just((2u64, 1u32)), Just((2, 2)), Just((2, 3)), Just((3, 1)), Just((3, 2))]
        .prop_map(|(p, r)| Zpr::new(p, r).unwrap())
}

fn matrix(ring: Zpr, rows: usize, cols: usize, entries: &[u64]) -> PMatrix {
    let mut m = PMatrix::zeros(ring, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, entries[i * cols + j] % ring.modulus());
        }
    }
    m
}

/// Every element of ⊕ Z/p^{e_i}.
fn elements(p: u64, exps: &[u32]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &e in exps {
        let m = p.pow(e);
        out = out.into_iter().flat_map(|v| (0..m).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn apply(m: &PMatrix, target: &[u32], x: &[u64]) -> Vec<u64> {
    let ring = m.ring();
    (0..m.rows())
        .map(|i| {
            let s = (0..m.cols()).fold(0, |acc, j| ring.add(acc, ring.mul(m.get(i, j), x[j])));
            s % ring.p().pow(target[i])
        })
        .collect()
}

/// Exponents of a finite abelian p-group from |H[p^j]| for j = 0..=r.
fn group_from_torsion_counts(p: u64, r: u32, logs: &[u32]) -> PGroup {
    let mut exps = Vec::new();
    for j in 1..=r as usize {
        let at_least_j = logs[j] - logs[j - 1];
        let at_least_next = if j < r as usize { logs[j + 1] - logs[j] } else { 0 };
        exps.extend(std::iter::repeat_n(j as u32, (at_least_j - at_least_next) as usize));
    }
    PGroup::from_exponents(p, exps)
}

fn log_p(p: u64, mut n: usize) -> u32 {
    let mut k = 0;
    while n > 1 {
        assert_eq!(n as u64 % p, 0);
        n /= p as usize;
        k += 1;
    }
    k
}

/// Homology at the middle of C0 → C1 → C2 by enumerating every element.
fn brute_middle(ring: Zpr, exps: [&[u32]; 3], d0: &PMatrix, d1: &PMatrix) -> PGroup {
    let p = ring.p();
    let c1 = elements(p, exps[1]);
    let cycles: Vec<Vec<u64>> = c1.into_iter().filter(|x| apply(d1, exps[2], x).iter().all(|&c| c == 0)).collect();
    let mut bounds: Vec<Vec<u64>> = elements(p, exps[0]).iter().map(|x| apply(d0, exps[1], x)).collect();
    bounds.sort();
    bounds.dedup();
    let scale =
        |x: &[u64], q: u64| -> Vec<u64> { x.iter().zip(exps[1]).map(|(&c, &e)| ring.mul(c, q) % p.pow(e)).collect() };
    let logs: Vec<u32> = (0..=ring.r())
        .map(|j| {
            let q = ring.p_pow(j);
            let killed = cycles.iter().filter(|z| bounds.binary_search(&scale(z, q)).is_ok()).count();
            log_p(p, killed) - log_p(p, bounds.len())
        })
        .collect();
    group_from_torsion_counts(p, ring.r(), &logs)
}

/// A random homomorphism between presented modules: the entry at (t, s)
/// is a multiple of p^{e_t - e_s} so the torsion of s is respected.
fn hom(ring: Zpr, src: &[u32], dst: &[u32], seed: &[u64]) -> PMatrix {
    let mut m = PMatrix::zeros(ring, dst.len(), src.len());
    for (t, &et) in dst.iter().enumerate() {
        for (s, &es) in src.iter().enumerate() {
            let shift = ring.p_pow(et.saturating_sub(es));
            m.set(t, s, ring.mul(seed[t * src.len() + s], shift) % ring.p().pow(et));
        }
    }
    m
}

fn exps_strategy(r: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1..=r, 0..=2)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn snf_is_an_equivalence_with_monotone_pivots(
        ring in ring_strategy(),
        (rows, cols) in (1usize..4, 1usize..4),
        entries in prop::collection::vec(0u64..1000, 9),
    ) {
        let m = matrix(ring, rows, cols, &entries);
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert!(s.pivots.windows(2).all(|w| w[0] <= w[1]));
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    prop_assert_eq!(s.d.get(i, j), 0);
                }
            }
        }
        // U and V are invertible: their own SNF has only unit pivots
        prop_assert!(smith_normal_form(&s.u).pivots.iter().all(|&v| v == 0));
        prop_assert_eq!(smith_normal_form(&s.v).pivots.len(), cols);
        prop_assert!(smith_normal_form(&s.v).pivots.iter().all(|&v| v == 0));
    }

    #[test]
    fn cokernel_order_matches_enumeration(
        ring in ring_strategy(),
        (rows, cols) in (1usize..3, 1usize..4),
        entries in prop::collection::vec(0u64..1000, 9),
    ) {
        let m = matrix(ring, rows, cols, &entries);
        let full = vec![ring.r(); rows];
        let mut image: Vec<Vec<u64>> = elements(ring.p(), &vec![ring.r(); cols]).iter().map(|x| apply(&m, &full, x)).collect();
        image.sort();
        image.dedup();
        let expected = ring.r() * rows as u32 - log_p(ring.p(), image.len());
        prop_assert_eq!(cokernel(&m).log_order(), expected as u64);
    }

    #[test]
    fn homology_matches_enumeration(
        ring in ring_strategy(),
        seed in prop::collection::vec(0u64..1000, 12),
        picks in prop::collection::vec(0usize..10_000, 2),
        e0 in exps_strategy(3), e1 in exps_strategy(3), e2 in exps_strategy(3),
    ) {
        let r = ring.r();
        let clamp = |v: Vec<u32>| v.into_iter().map(|e| e.min(r)).collect::<Vec<_>>();
        let (e0, e1, e2) = (clamp(e0), clamp(e1), clamp(e2));
        let p = ring.p();
        let d1 = hom(ring, &e1, &e2, &seed);
        // d0: each column a random cycle of d1 that respects the source torsion
        let mut d0 = PMatrix::zeros(ring, e1.len(), e0.len());
        for (s, &es) in e0.iter().enumerate() {
            let q = ring.p_pow(es);
            let ok: Vec<Vec<u64>> = elements(p, &e1)
                .into_iter()
                .filter(|x| apply(&d1, &e2, x).iter().all(|&c| c == 0))
                .filter(|x| x.iter().zip(&e1).all(|(&c, &e)| ring.mul(c, q) % p.pow(e) == 0))
                .collect();
            let x = &ok[picks[s] % ok.len()];
            for (t, &c) in x.iter().enumerate() {
                d0.set(t, s, c);
            }
        }
        let modules = [&e0, &e1, &e2].map(|e| PresentedModule::new(ring, e.clone()).unwrap());
        let h = homology_all(&modules, &[d0.clone(), d1.clone()]).unwrap();
        prop_assert_eq!(h[1].clone(), brute_middle(ring, [&e0, &e1, &e2], &d0, &d1));

        let mut sparse = SparseComplex::new(ring, vec![e0.clone(), e1.clone(), e2.clone()]).unwrap();
        for (k, d) in [&d0, &d1].into_iter().enumerate() {
            for s in 0..d.cols() {
                sparse.set_boundary(k, s, (0..d.rows()).map(|t| (t, d.get(t, s))).filter(|&(_, c)| c != 0));
            }
        }
        prop_assert_eq!(sparse.homology().unwrap(), h);
    }

    #[test]
    fn teichmuller_is_multiplicative(
        (p, r) in prop_oneof![Just((2u64, 2u32)), Just((2, 3)), Just((3, 2))],
        f in prop::collection::vec(((0u64..3, 0u64..3), 1u64..3), 1..3),
        g in prop::collection::vec(((0u64..3, 0u64..3), 1u64..3), 1..3),
    ) {
        let alg = MonomialAlgebra::new(p, r - 1, vec![Role::X, Role::X]);
        let q = p.pow(r - 1);
        let poly = |terms: &[((u64, u64), u64)]| {
            let mut out = CharPPoly::zero();
            for &((a, b), c) in terms {
                out.add_term(&alg, vec![a * q, b * q], c % p);
            }
            out
        };
        let (f, g) = (poly(&f), poly(&g));
        let lhs = teichmuller_expand(&f.mul(&alg, &g), &alg, r).unwrap();
        let rhs = teichmuller_expand(&f, &alg, r).unwrap().mul(&alg, &teichmuller_expand(&g, &alg, r).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn flat_addition_matches_universal_polynomials(
        (p, r) in prop_oneof![Just((2u64, 2u32)), Just((2, 3)), Just((3, 2)), Just((3, 3))],
        a in prop::collection::vec(prop::collection::vec(((0u64..4, 0u64..4), 1u64..3), 0..3), 3),
        b in prop::collection::vec(prop::collection::vec(((0u64..4, 0u64..4), 1u64..3), 0..3), 3),
    ) {
        let alg = MonomialAlgebra::new(p, 1, vec![Role::X, Role::X]);
        let coords = |v: &[Vec<((u64, u64), u64)>]| -> Vec<CharPPoly> {
            v.iter().take(r as usize).map(|terms| {
                let mut out = CharPPoly::zero();
                for &((x, y), c) in terms {
                    out.add_term(&alg, vec![x, y], c % p);
                }
                out
            }).collect()
        };
        let (a, b) = (coords(&a), coords(&b));
        let oracle = witt_sum_oracle(p, r).unwrap();
        let s = oracle.sum(&alg, &a, &b);
        let work = 1 + 2 * (r - 1);
        let walg = alg.at_level(work);
        let flat = from_coordinates(&a, &alg, r, work).unwrap().add(&walg, &from_coordinates(&b, &alg, r, work).unwrap());
        prop_assert_eq!(flat, from_coordinates(&s, &alg, r, work).unwrap());
    }

    #[test]
    fn chart_files_round_trip(
        cells in prop::collection::vec(
            (prop::collection::vec(0u64..9, 1..3), 0i64..12, prop::collection::vec(1u32..4, 0..3), prop::collection::vec("[a-z0-9^ ]{0,6}", 0..2)),
            0..6,
        ),
        num in 0u64..50, level in 0u32..4,
    ) {
        let spec = JobSpec {
            target: Target::Tr, p: 3, r: 2, vars: 2, max_weight: 8, max_dim: 12, i: 0,
            deg: None, kmax: None, denom: Some(level), full: false,
        };
        let cells = cells.into_iter().map(|(deg, dim, exps, labels)| CellRecord { deg, dim, exps, labels }).collect();
        let file = ChartFile::new(spec, "oracle", cells);
        let text = file.to_json();
        prop_assert_eq!(ChartFile::from_json(&text).unwrap().to_json(), text);
        let q = PRational::new(3, num, level);
        prop_assert_eq!(PRational::parse(&q.to_string()), Some(q));
    }
}
