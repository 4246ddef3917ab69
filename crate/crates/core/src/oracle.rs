//! Closed-form answer charts: TR^r of polynomial rings, the motivic
//! filtration and its graded pieces, the fiber decomposition, and the
//! σ-graded orders. These are the ground truth for the spectral sequence.

use crate::arith::{homology, valuation, ArithError, PGroup, PMatrix, PresentedModule, Zpr};
use crate::chart::Chart;
use crate::reps::{region_exponent, Rep};
use crate::witt::PRational;

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    num_integer::binomial(n, k)
}

fn support(deg: &[u64]) -> Vec<usize> {
    (0..deg.len()).filter(|&s| deg[s] != 0).collect()
}

/// i = min(v_p(gcd of the nonzero degrees), r-1); r-1 for the zero degree.
pub fn divisibility_index(p: u64, r: u32, deg: &[u64]) -> u32 {
    let g = deg.iter().fold(0u64, |g, &d| num_integer::gcd(g, d));
    match valuation(g, p) {
        Some(v) => v.min(r - 1),
        None => r - 1,
    }
}

fn subsets_label(a: &[usize], q: usize) -> Vec<String> {
    // lexicographic q-subsets of the support, named by variable index
    fn go(a: &[usize], q: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<String>) {
        if cur.len() == q {
            let names: Vec<String> = cur.iter().map(|s| format!("u{}", s + 1)).collect();
            out.push(names.join(""));
            return;
        }
        for i in start..a.len() {
            cur.push(a[i]);
            go(a, q, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(a, q, 0, &mut Vec::new(), &mut out);
    out
}

/// TR^r_n(F_p[x_1..x_ℓ]) in multidegree `deg`, with a label per summand.
pub fn tr_chart_labeled(p: u64, r: u32, deg: &[u64], n: i64) -> (PGroup, Vec<String>) {
    if n < 0 {
        return (PGroup::trivial(p), Vec::new());
    }
    let a = support(deg);
    if a.is_empty() {
        if n % 2 == 0 {
            return (PGroup::cyclic(p, r), vec![format!("s^{}", n / 2)]);
        }
        return (PGroup::trivial(p), Vec::new());
    }
    let e = (divisibility_index(p, r, deg) + 1).min(r);
    let mut exps = Vec::new();
    let mut labels = Vec::new();
    for q in 0..=a.len().min(n as usize) {
        if !(n as usize - q).is_multiple_of(2) {
            continue;
        }
        let k = (n as usize - q) / 2;
        for name in subsets_label(&a, q) {
            exps.push(e);
            labels.push(if name.is_empty() { format!("s^{k}") } else { format!("s^{k} {name}") });
        }
    }
    (PGroup::from_exponents(p, exps), labels)
}

pub fn tr_chart(p: u64, r: u32, deg: &[u64], n: i64) -> PGroup {
    tr_chart_labeled(p, r, deg, n).0
}

/// The summand of (S^V ∧ T(F_p[x̄]))^{Z/p^{r-1}} in multidegree `deg`:
/// 2j-suspensions of an exterior algebra on |A| generators over Z/p^{i'},
/// with i' read off the region of j for length i+1.
pub fn smash_tr_chart(p: u64, r: u32, v: &Rep, deg: &[u64], n: i64) -> PGroup {
    if n < 0 {
        return PGroup::trivial(p);
    }
    let a = support(deg).len();
    let i = divisibility_index(p, r, deg);
    let fixed = v.fixed_dims(i + 1);
    let mut exps = Vec::new();
    for q in 0..=a.min(n as usize) {
        if !(n as usize - q).is_multiple_of(2) {
            continue;
        }
        let j = ((n as usize - q) / 2) as i64;
        let e = region_exponent(&fixed, j);
        exps.extend(std::iter::repeat_n(e, binomial(a as u64, q as u64) as usize));
    }
    PGroup::from_exponents(p, exps)
}

/// Summands (q, k) of the TR chart with q + 2k = n; q is the de Rham–Witt
/// degree and the filtration degree is q + k.
fn summands(p: u64, r: u32, deg: &[u64], n: i64) -> Vec<(usize, usize, u32, String)> {
    if n < 0 {
        return Vec::new();
    }
    let a = support(deg);
    if a.is_empty() {
        return if n % 2 == 0 { vec![(0, n as usize / 2, r, format!("s^{}", n / 2))] } else { Vec::new() };
    }
    let e = (divisibility_index(p, r, deg) + 1).min(r);
    let mut out = Vec::new();
    for q in 0..=a.len().min(n as usize) {
        if !(n as usize - q).is_multiple_of(2) {
            continue;
        }
        let k = (n as usize - q) / 2;
        for name in subsets_label(&a, q) {
            let label = if name.is_empty() { format!("s^{k}") } else { format!("s^{k} {name}") };
            out.push((q, k, e, label));
        }
    }
    out
}

/// F^i TR^r_n: the summands with q + k ≥ i.
pub fn filtration_chart_labeled(p: u64, r: u32, i: u32, deg: &[u64], n: i64) -> (PGroup, Vec<String>) {
    let kept: Vec<_> = summands(p, r, deg, n).into_iter().filter(|(q, k, _, _)| q + k >= i as usize).collect();
    (PGroup::from_exponents(p, kept.iter().map(|s| s.2)), kept.into_iter().map(|s| s.3).collect())
}

pub fn filtration_chart(p: u64, r: u32, i: u32, deg: &[u64], n: i64) -> PGroup {
    filtration_chart_labeled(p, r, i, deg, n).0
}

/// gr^i: the summands with q + k = i.
pub fn gr_chart_labeled(p: u64, r: u32, i: u32, deg: &[u64], n: i64) -> (PGroup, Vec<String>) {
    let kept: Vec<_> = summands(p, r, deg, n).into_iter().filter(|(q, k, _, _)| q + k == i as usize).collect();
    (PGroup::from_exponents(p, kept.iter().map(|s| s.2)), kept.into_iter().map(|s| s.3).collect())
}

pub fn gr_chart(p: u64, r: u32, i: u32, deg: &[u64], n: i64) -> PGroup {
    gr_chart_labeled(p, r, i, deg, n).0
}

/// W_rΩ^q(F_p[x̄]) in multidegree `deg`, read as the q-layer of the chart.
pub fn de_rham_witt(p: u64, r: u32, q: usize, deg: &[u64]) -> PGroup {
    let a = support(deg).len();
    if q > a || (a == 0 && q > 0) {
        return PGroup::trivial(p);
    }
    let e = if a == 0 { r } else { (divisibility_index(p, r, deg) + 1).min(r) };
    PGroup::from_exponents(p, std::iter::repeat_n(e, binomial(a as u64, q as u64) as usize))
}

fn map_kernel_cokernel(ring: Zpr, src: u32, dst: u32, coef: u64) -> Result<(PGroup, PGroup), ArithError> {
    let p = ring.p();
    if src == 0 {
        let coker = if dst == 0 { PGroup::trivial(p) } else { PGroup::cyclic(p, dst) };
        return Ok((PGroup::trivial(p), coker));
    }
    if dst == 0 {
        return Ok((PGroup::cyclic(p, src), PGroup::trivial(p)));
    }
    let s = PresentedModule::new(ring, vec![src])?;
    let t = PresentedModule::new(ring, vec![dst])?;
    let mut m = PMatrix::zeros(ring, 1, 1);
    m.set(0, 0, coef % p.pow(dst));
    let mods = [s, t];
    let ker = homology(&mods, std::slice::from_ref(&m), 0)?;
    let coker = homology(&mods, std::slice::from_ref(&m), 1)?;
    Ok((ker, coker))
}

/// π_n of the weight-d fiber summand at level r, computed from
/// the long exact sequence of T(F_p)_{≥2i} → (S^{λ_d} ∧ T(F_p))_{≥2i}.
///
/// The target is a Z/p^r[σ]-module with Z/p^{r-1-j} in dimension 0 (j =
/// min(v_p(d), r-1)) and Z/p^r above, σ acting from dimension 0 by the
/// injection 1 ↦ p^{j+1}. The map sends 1 to the dimension-0 generator and
/// is σ-linear, so it is reduction in dimension 0 and ·p^{j+1} above.
/// Weight 0 is T(F_p)_{≥2i} itself.
pub fn theorem1_chart(p: u64, r: u32, i: u32, d: u64, n: i64) -> Result<PGroup, ArithError> {
    let ring = Zpr::new(p, r)?;
    let floor = 2 * i as i64;
    if d == 0 {
        let keep = n >= floor && n >= 0 && n % 2 == 0;
        return Ok(if keep { PGroup::cyclic(p, r) } else { PGroup::trivial(p) });
    }
    let j = valuation(d, p).expect("d > 0").min(r - 1);
    let map_in = |dim: i64| -> Result<(PGroup, PGroup), ArithError> {
        if dim < 0 || dim % 2 != 0 || dim < floor {
            return Ok((PGroup::trivial(p), PGroup::trivial(p)));
        }
        if dim == 0 {
            map_kernel_cokernel(ring, r, r - 1 - j, 1)
        } else {
            map_kernel_cokernel(ring, r, r, ring.p_pow(j + 1))
        }
    };
    // 0 → coker f_{n+1} → π_n F → ker f_n → 0; f lives in even dimensions
    if n % 2 == 0 {
        Ok(map_in(n)?.0)
    } else {
        Ok(map_in(n + 1)?.1)
    }
}

/// Order exponent of z_ℓ^s in σ-degree ℓ: min(r, min{j : s·p^j ≥ ℓ+1});
/// `None` when the monomial is already in the ideal.
pub fn e3alg_chart(p: u64, r: u32, ell: u64, s: PRational) -> Option<u32> {
    let bound = (ell + 1) * p.pow(s.level);
    if s.num >= bound {
        return None;
    }
    let mut j = 0;
    let mut x = s.num;
    while j < r && x < bound {
        x *= p;
        j += 1;
    }
    Some(j)
}

/// The relation list z^{ℓ+1}, p z^{(ℓ+1)/p}, …, p^{r-1} z^{(ℓ+1)/p^{r-1}}
/// as (power of p, exponent) pairs at denominator level r-1.
pub fn e3alg_relations(p: u64, r: u32, ell: u64) -> Vec<(u32, PRational)> {
    let level = r - 1;
    (0..r).map(|j| (j, PRational::new(p, (ell + 1) * p.pow(level - j), level))).collect()
}

/// Order exponent of z_ℓ^s found by testing p^j z^s for membership in the
/// ideal spanned by the relation list.
pub fn e3alg_order_by_relations(p: u64, r: u32, ell: u64, s: PRational) -> Option<u32> {
    let rels = e3alg_relations(p, r, ell);
    let level = s.level.max(r - 1);
    let sn = s.numerator_at(level).expect("deeper level");
    let member = |j: u32| rels.iter().any(|(jr, e)| *jr <= j && sn >= e.numerator_at(level).expect("deeper level"));
    let order = (0..r).find(|&j| member(j)).unwrap_or(r);
    (order > 0).then_some(order)
}

/// TR^1 in weight d: one copy of Z/p in every dimension n ≥ 0 (even for
/// d = 0 only in even dimensions).
pub fn r1_chart(p: u64, d: u64, n: i64) -> PGroup {
    if n < 0 || (d == 0 && n % 2 != 0) {
        PGroup::trivial(p)
    } else {
        PGroup::cyclic(p, 1)
    }
}

/// All multidegrees in N_0^ℓ with total weight at most `max_weight`, in
/// lexicographic order.
pub fn multidegrees(ell: usize, max_weight: u64) -> Vec<Vec<u64>> {
    fn go(ell: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == ell {
            out.push(cur.clone());
            return;
        }
        for d in 0..=left {
            cur.push(d);
            go(ell, left - d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(ell, max_weight, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Which closed-form chart to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Tr,
    Filtration(u32),
    Gr(u32),
}

/// Tabulates a chart over all multidegrees up to `max_weight` and
/// dimensions 0..=max_dim; trivial cells are omitted.
pub fn build_chart(kind: ChartKind, p: u64, r: u32, ell: usize, max_weight: u64, max_dim: i64) -> Chart {
    let mut chart = Chart::new(p, r, ell);
    for deg in multidegrees(ell, max_weight) {
        for n in 0..=max_dim {
            let (g, labels) = match kind {
                ChartKind::Tr => tr_chart_labeled(p, r, &deg, n),
                ChartKind::Filtration(i) => filtration_chart_labeled(p, r, i, &deg, n),
                ChartKind::Gr(i) => gr_chart_labeled(p, r, i, &deg, n),
            };
            if !g.is_trivial() {
                chart.insert(deg.clone(), n, g, labels);
            }
        }
    }
    chart
}
