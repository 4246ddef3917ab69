//! Acceptance run: one line per criterion. Every comparison is exact; the
//! only tolerances are the wall-clock budgets below.

use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trcalc::arith::{valuation, PGroup};
use trcalc::cobar::{dim0_complex, multivar_e2, symbolic_e2};
use trcalc::oracle::{
    build_chart, e3alg_chart, e3alg_order_by_relations, filtration_chart, gr_chart, r1_chart, theorem1_chart, tr_chart,
    ChartKind,
};
use trcalc::reps::{cyclotomic_restriction, w_mackey};
use trcalc::witt::{from_coordinates, torsion_order, witt_sum_oracle, CharPPoly, MonomialAlgebra, PRational, Role};

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn row_exponent(p: u64, r: u32, d: u64) -> u32 {
    valuation(d, p).map_or(r, |v| (v + 1).min(r))
}

fn tr_of_fp() -> Check {
    let mut cells = 0;
    for p in [2u64, 3, 5] {
        for r in 1..=4 {
            let chart = build_chart(ChartKind::Tr, p, r, 1, 0, 20);
            let page = symbolic_e2(p, r, 0, 20, 2).map_err(|e| e.to_string())?;
            for n in 0..=20 {
                let want = if n % 2 == 0 { PGroup::cyclic(p, r) } else { PGroup::trivial(p) };
                let got = chart.group(&[0], n);
                ensure(got == want, || format!("p={p} r={r} n={n}: chart {got}"))?;
                let e2 = page.abutment(n);
                ensure(e2 == want, || format!("p={p} r={r} n={n}: E_2 {e2}"))?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells, chart and weight-0 E_2"))
}

fn length_one() -> Check {
    let mut cells = 0;
    for p in [2u64, 3] {
        for d in 0..=6u64 {
            let kmax = d as usize + 2;
            let h = dim0_complex(p, 1, d, kmax, 1, true)
                .and_then(|c| c.homology())
                .map_err(|e| format!("p={p} d={d}: {e}"))?;
            let page = symbolic_e2(p, 1, d, 8, kmax).map_err(|e| format!("p={p} d={d}: {e}"))?;
            for (k, g) in h.iter().enumerate() {
                let want = if k == 0 { PGroup::cyclic(p, 1) } else { PGroup::trivial(p) };
                ensure(*g == want, || format!("p={p} d={d}: Witt H^{k} = {g}"))?;
                ensure(page.group(k, 0) == *g, || format!("p={p} d={d}: row 0 column {k} differs from the Witt row"))?;
            }
            for n in 0..=8 {
                let got = page.abutment(n);
                let want = r1_chart(p, d, n);
                ensure(got == want, || format!("p={p} d={d} n={n}: E_2 {got}, expected {want}"))?;
                ensure(want.rank() == usize::from(d > 0 || n % 2 == 0), || format!("rank at d={d} n={n}"))?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells, Witt row and E_2 agree"))
}

fn witt_row() -> Check {
    let mut runs = 0;
    for r in [2u32, 3] {
        for d in 0..=8u64 {
            let kmax = d as usize + 2;
            let mut seen: Option<Vec<PGroup>> = None;
            for level in [r - 1, r] {
                let h = dim0_complex(2, r, d, kmax, level, true)
                    .and_then(|c| c.homology())
                    .map_err(|e| format!("r={r} d={d} N={level}: {e}"))?;
                let want = PGroup::cyclic(2, row_exponent(2, r, d));
                ensure(h[0] == want, || format!("r={r} d={d} N={level}: H^0 = {}, expected {want}", h[0]))?;
                ensure(h[1..].iter().all(PGroup::is_trivial), || format!("r={r} d={d} N={level}: higher H nonzero"))?;
                if let Some(prev) = &seen {
                    ensure(*prev == h, || format!("r={r} d={d}: homology changes with N"))?;
                }
                seen = Some(h);
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} complexes, stable in N"))
}

fn random_poly(rng: &mut ChaCha8Rng, alg: &MonomialAlgebra, p: u64) -> CharPPoly {
    let mut out = CharPPoly::zero();
    for _ in 0..rng.random_range(0..4) {
        let m = vec![rng.random_range(0..5u64), rng.random_range(0..5u64)];
        out.add_term(alg, m, rng.random_range(1..p));
    }
    out
}

fn witt_addition() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut report = Vec::new();
    for p in [2u64, 3] {
        for r in [2u32, 3] {
            let alg = MonomialAlgebra::new(p, 1, vec![Role::X, Role::X]);
            let oracle = witt_sum_oracle(p, r).map_err(|e| e.to_string())?;
            let work = 1 + 2 * (r - 1);
            let walg = alg.at_level(work);
            let mut carries = 0;
            for case in 0..100 {
                let a: Vec<CharPPoly> = (0..r).map(|_| random_poly(&mut rng, &alg, p)).collect();
                let b: Vec<CharPPoly> = (0..r).map(|_| random_poly(&mut rng, &alg, p)).collect();
                let flat = |c: &[CharPPoly]| from_coordinates(c, &alg, r, work).map_err(|e| e.to_string());
                let sum = oracle.sum(&alg, &a, &b);
                let lhs = flat(&a)?.add(&walg, &flat(&b)?);
                ensure(lhs == flat(&sum)?, || format!("p={p} r={r} case {case}: flat sum differs"))?;
                let naive: Vec<CharPPoly> = a.iter().zip(&b).map(|(x, y)| x.add(&alg, y)).collect();
                if naive != sum {
                    carries += 1;
                }
            }
            report.push(format!("({p},{r}) 100 cases/{carries} carries"));
        }
    }
    Ok(report.join(", "))
}

fn descent_vs_closed_form() -> Check {
    let mut cells = 0;
    for p in [2u64, 3] {
        for r in 1..=3u32 {
            for d in 0..=2 * p * p {
                let max_dim = 2 * d as i64 + 4;
                let page =
                    symbolic_e2(p, r, d, max_dim, d as usize + 2).map_err(|e| format!("p={p} r={r} d={d}: {e}"))?;
                let row0 = page.group(0, 0);
                let want0 = PGroup::cyclic(p, row_exponent(p, r, d));
                ensure(row0 == want0, || format!("p={p} r={r} d={d}: dimension-0 survivor {row0}"))?;
                for n in 0..=max_dim {
                    let got = page.abutment(n);
                    let want = tr_chart(p, r, &[d], n);
                    ensure(got == want, || format!("p={p} r={r} d={d} n={n}: E_2 {got}, tr {want}"))?;
                    for i in 1..=4u32 {
                        let piece = page
                            .cells
                            .iter()
                            .filter(|((k, dim), _)| dim - *k as i64 == n && *dim >= 2 * i as i64)
                            .fold(PGroup::trivial(p), |acc, (_, c)| acc.direct_sum(&c.group));
                        let want = filtration_chart(p, r, i, &[d], n);
                        ensure(piece == want, || {
                            format!("p={p} r={r} d={d} n={n} i={i}: F^i {piece}, expected {want}")
                        })?;
                    }
                    cells += 1;
                }
            }
        }
    }
    Ok(format!("{cells} cells, tr and F^1..F^4"))
}

fn sigma_orders() -> Check {
    let mut checks = 0;
    for p in [2u64, 3, 5] {
        for r in 1..=4u32 {
            for level in 0..=3u32 {
                let alg = MonomialAlgebra::new(p, level, vec![Role::Y]);
                for num in 0..2 * p.pow(level) {
                    let s = PRational::new(p, num, level);
                    let want = torsion_order(&[num], &alg, r);
                    let got = e3alg_chart(p, r, 0, s);
                    ensure(got == want, || format!("p={p} r={r} s={s}: {got:?} vs {want:?}"))?;
                    checks += 1;
                }
                for ell in 1..=4u64 {
                    for num in 0..(ell + 2) * p.pow(level) {
                        let s = PRational::new(p, num, level);
                        let got = e3alg_chart(p, r, ell, s);
                        let want = e3alg_order_by_relations(p, r, ell, s);
                        ensure(got == want, || format!("p={p} r={r} l={ell} s={s}: {got:?} vs {want:?}"))?;
                        checks += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checks} exponents"))
}

fn fiber_decomposition() -> Check {
    let mut cells = 0;
    for r in 1..=3u32 {
        for d in 0..=8u64 {
            for n in 0..=12i64 {
                let total = tr_chart(2, r, &[d], n);
                let mut graded = PGroup::trivial(2);
                for i in 0..=8u32 {
                    graded = graded.direct_sum(&gr_chart(2, r, i, &[d], n));
                }
                ensure(graded == total, || format!("r={r} d={d} n={n}: sum of gr {graded}, total {total}"))?;
                for i in 0..=3u32 {
                    let f = filtration_chart(2, r, i, &[d], n);
                    let t = theorem1_chart(2, r, i, d, n).map_err(|e| e.to_string())?;
                    ensure(t == f, || format!("r={r} d={d} i={i} n={n}: fiber {t}, F^i {f}"))?;
                    let next = filtration_chart(2, r, i + 1, &[d], n);
                    ensure(next.is_submultiset_of(&f), || format!("r={r} d={d} i={i} n={n}: F^(i+1) not inside F^i"))?;
                    cells += 1;
                }
            }
        }
    }
    Ok(format!("{cells} cells, nested, graded pieces sum to the total"))
}

fn two_variables() -> Check {
    let mut cells = 0;
    for d1 in 0..=4u64 {
        for d2 in 0..=4 - d1 {
            let deg = [d1, d2];
            let lead = if d1 > 0 { d1 } else { d2 };
            let page = multivar_e2(2, 2, &deg, 8, lead as usize + 2).map_err(|e| format!("{deg:?}: {e}"))?;
            for n in 0..=8 {
                let got = page.abutment(n);
                let want = tr_chart(2, 2, &deg, n);
                ensure(got == want, || format!("{deg:?} n={n}: E_2 {got}, tr {want}"))?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells"))
}

fn mackey_relations() -> Check {
    let mut charts = 0;
    for p in [2u64, 3, 5] {
        for r in 1..=4u32 {
            for dim in (0..=8).step_by(2) {
                let m = w_mackey(p, r, dim).map_err(|e| e.to_string())?;
                ensure(m.relations_hold(), || format!("p={p} r={r} dim={dim}"))?;
                for l in 1..r {
                    ensure(m.res_after_tr(l) == Some(p % p.pow(l)), || format!("res tr at level {l}"))?;
                    ensure(m.tr_after_res(l + 1) == Some(p), || format!("tr res at level {}", l + 1))?;
                }
                charts += 1;
            }
            if r >= 2 {
                let phi = cyclotomic_restriction(p, r).map_err(|e| e.to_string())?;
                ensure(phi.is_multiplicative(6), || format!("p={p} r={r}: not multiplicative"))?;
            }
        }
    }
    Ok(format!("{charts} Mackey charts, restriction multiplicative up to a = 6"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("TR^r(F_p) = Z/p^r[s], p in {2,3,5}, r <= 4, dims <= 20", Duration::from_secs(1), tr_of_fp),
        ("r = 1: Witt row and E_2 give Z/p in every (d, n), d <= 6", Duration::from_secs(60), length_one),
        ("Witt row H^0 = Z/p^min(v+1,r), H^>0 = 0, p = 2, d <= 8, N in {r-1, r}", Duration::from_secs(600), witt_row),
        ("flat Witt addition = universal sum polynomials", Duration::from_secs(60), witt_addition),
        ("E_2 = tr and F^i (i <= 4), p in {2,3}, r <= 3, d <= 2p^2", Duration::from_secs(300), descent_vs_closed_form),
        ("sigma-graded orders vs torsion orders and relation ideals", Duration::from_secs(1), sigma_orders),
        ("fiber charts = F^i, nesting, sum of gr = total, p = 2", Duration::from_secs(60), fiber_decomposition),
        ("two variables: E_2 = tr, p = 2, r = 2, d1 + d2 <= 4", Duration::from_secs(900), two_variables),
        ("Mackey res/tr = p, restriction multiplicative", Duration::from_secs(1), mackey_relations),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] {}. {name}: {detail} ({:.2}s of {}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
