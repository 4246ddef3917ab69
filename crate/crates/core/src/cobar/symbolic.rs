//! E_2 of the one-variable descent spectral sequence.
//!
//! Row 2a of E_1 has a summand x^m ⊗ V_{n_1} ⊗ … ⊗ V_{n_k} for every word
//! with m + Σ n_i = d, carrying Z/p^i with i the region exponent of
//! V_{n_1} ⊕ … ⊕ V_{n_k} at a. The d_1 differential is the cobar
//! differential of the comodule F_p[x] over the divided-power coalgebra:
//!
//! * coaction x^m ↦ x^{m-u} ⊗ V_u,
//! * split V_n ↦ V_u ⊗ V_{n-u} at position j with sign (−1)^j.
//!
//! In row 0 each summand is a quotient of the Z/p^r in the top cell and the
//! coefficients are binomial. In rows a ≥ 1 each summand is the subgroup
//! p^{r-i}Z/p^r and the coaction picks up p^u·m!/(m-u)! from σ; splits are 1.
//!
//! The complex is reduced by cancelling the pairs of an acyclic matching on
//! words (split a non-p-power into p^v and the rest, or merge a p-power with
//! its right neighbour), then by greedy cancellation of remaining
//! isomorphisms, and the residue goes through Smith normal form.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::e1::{cell_label, compositions, word_exponent};
use super::CobarError;
use crate::arith::{homology_all, valuation, PGroup, SparseComplex, Zpr};
use crate::chart::Chart;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Action {
    Critical,
    /// The word is the lower cell; the partner splits one letter.
    Down(Vec<u64>),
    /// The word is the upper cell; the partner merges two letters.
    Up(Vec<u64>),
}

fn is_p_power(mut n: u64, p: u64) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

fn merge_ok(a: u64, b: u64, p: u64) -> bool {
    valuation(a + b, p) == valuation(a, p)
}

fn stuck(a: u64, b: u64, p: u64) -> bool {
    !(is_p_power(a, p) && merge_ok(a, b, p))
}

/// The matching: scan left to right; the first letter that can move
/// decides, provided the letters to its left stay stuck.
fn action(w: &[u64], p: u64) -> Action {
    for j in 0..w.len() {
        let n = w[j];
        if !is_p_power(n, p) {
            let q = p.pow(valuation(n, p).expect("positive letter"));
            if j > 0 && !(stuck(w[j - 1], n, p) && stuck(w[j - 1], q, p)) {
                return Action::Critical;
            }
            let mut new = w[..j].to_vec();
            new.extend([q, n - q]);
            new.extend_from_slice(&w[j + 1..]);
            return Action::Down(new);
        }
        if j + 1 < w.len() && merge_ok(n, w[j + 1], p) {
            if j > 0 && !stuck(w[j - 1], n + w[j + 1], p) {
                return Action::Critical;
            }
            let mut new = w[..j].to_vec();
            new.push(n + w[j + 1]);
            new.extend_from_slice(&w[j + 2..]);
            return Action::Up(new);
        }
        if j > 0 && !stuck(w[j - 1], n, p) {
            return Action::Critical;
        }
    }
    Action::Critical
}

struct RowComplex {
    words: Vec<Vec<Vec<u64>>>,
    index: Vec<HashMap<Vec<u64>, usize>>,
    complex: SparseComplex,
}

fn pascal(n: u64, modulus: u64) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = vec![vec![1 % modulus]];
    for m in 1..=n as usize {
        let prev = &rows[m - 1];
        let mut row = vec![1 % modulus; m + 1];
        for u in 1..m {
            row[u] = (prev[u - 1] + prev[u]) % modulus;
        }
        rows.push(row);
    }
    rows
}

fn build_row(p: u64, r: u32, d: u64, a: i64, kmax: usize) -> Result<RowComplex, CobarError> {
    let ring = Zpr::new(p, r)?;
    let modulus = ring.modulus();
    let mut words = Vec::with_capacity(kmax + 2);
    let mut exps = Vec::with_capacity(kmax + 2);
    for k in 0..=kmax + 1 {
        let mut ws = Vec::new();
        let mut es = Vec::new();
        for tot in 0..=d {
            for w in compositions(tot, k) {
                let e = word_exponent(p, r, &[], &w, a);
                if e > 0 {
                    ws.push(w);
                    es.push(e);
                }
            }
        }
        words.push(ws);
        exps.push(es);
    }
    let index: Vec<HashMap<Vec<u64>, usize>> =
        words.iter().map(|ws| ws.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect()).collect();
    let binom = pascal(d, modulus);
    let mut complex = SparseComplex::new(ring, exps.clone())?;
    for k in 0..=kmax {
        for (s, w) in words[k].iter().enumerate() {
            let m = d - w.iter().sum::<u64>();
            let i_s = exps[k][s];
            let mut acc: HashMap<Vec<u64>, u64> = HashMap::new();
            let mut falling = 1u64;
            for u in 1..=m {
                let mut t = Vec::with_capacity(w.len() + 1);
                t.push(u);
                t.extend_from_slice(w);
                let coef = if a == 0 {
                    binom[m as usize][u as usize]
                } else {
                    falling = ring.mul(falling, ring.mul(p % modulus, (m - u + 1) % modulus));
                    falling
                };
                let slot = acc.entry(t).or_insert(0);
                *slot = ring.add(*slot, coef);
            }
            for (jj, &n) in w.iter().enumerate() {
                let negative = jj % 2 == 0;
                for u in 1..n {
                    let mut t = w[..jj].to_vec();
                    t.extend([u, n - u]);
                    t.extend_from_slice(&w[jj + 1..]);
                    let c = if a == 0 { binom[n as usize][u as usize] } else { 1 % modulus };
                    let coef = if negative { ring.neg(c) } else { c };
                    let slot = acc.entry(t).or_insert(0);
                    *slot = ring.add(*slot, coef);
                }
            }
            let mut entries = Vec::with_capacity(acc.len());
            for (t, coef) in acc {
                let target = index[k + 1].get(&t).copied();
                let i_t = target.map_or(0, |i| exps[k + 1][i]);
                let closed_fail = || CobarError::NotClosed {
                    source_cell: cell_label(m, w),
                    target: cell_label(d - t.iter().sum::<u64>(), &t),
                };
                if a == 0 {
                    let Some(ti) = target else { continue };
                    if ring.mul(coef, ring.p_pow(i_s)) % p.pow(i_t) != 0 {
                        return Err(closed_fail());
                    }
                    entries.push((ti, coef % p.pow(i_t)));
                } else {
                    let img = ring.mul(coef, ring.p_pow(r - i_s));
                    match target {
                        None => {
                            if img != 0 {
                                return Err(closed_fail());
                            }
                        }
                        Some(ti) => {
                            let q = p.pow(r - i_t);
                            if img % q != 0 {
                                return Err(closed_fail());
                            }
                            entries.push((ti, (img / q) % p.pow(i_t)));
                        }
                    }
                }
            }
            complex.set_boundary(k, s, entries);
        }
    }
    Ok(RowComplex { words, index, complex })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Pending,
    Active,
    Done,
}

/// Cancels the matched pairs, top degree first and, inside a degree, each
/// pair only after the pairs its boundary flows into.
fn cancel_matching(row: &mut RowComplex, p: u64) -> usize {
    let degrees = row.words.len();
    let mut cancelled = 0;
    for k in (0..degrees - 1).rev() {
        let mut lower_partner: Vec<Option<usize>> = vec![None; row.words[k].len()];
        let mut upper_partner: Vec<Option<usize>> = vec![None; row.words[k + 1].len()];
        for (s, w) in row.words[k].iter().enumerate() {
            if let Action::Down(t) = action(w, p) {
                if let Some(&ti) = row.index[k + 1].get(&t) {
                    lower_partner[s] = Some(ti);
                    upper_partner[ti] = Some(s);
                }
            }
        }
        let mut state = vec![State::Pending; row.words[k].len()];
        for start in 0..row.words[k].len() {
            if lower_partner[start].is_none() || state[start] != State::Pending {
                continue;
            }
            let mut stack = vec![start];
            while let Some(&s) = stack.last() {
                state[s] = State::Active;
                let t = lower_partner[s].expect("only matched cells are stacked");
                let next = row.complex.boundary(k, s).iter().find_map(|&(t1, _)| {
                    let t1 = t1 as usize;
                    if t1 == t {
                        return None;
                    }
                    upper_partner[t1].filter(|&s1| state[s1] == State::Pending)
                });
                match next {
                    Some(s1) => stack.push(s1),
                    None => {
                        if row.complex.cancel(k, s, t) {
                            cancelled += 1;
                        }
                        state[s] = State::Done;
                        stack.pop();
                    }
                }
            }
        }
    }
    cancelled
}

/// E_2 of one row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowE2 {
    pub a: i64,
    /// Columns 0..=k_max.
    pub groups: Vec<PGroup>,
    /// Generators left after elimination, per column.
    pub labels: Vec<Vec<String>>,
    /// Non-unit maps between the leftover generators.
    pub residual: Vec<String>,
    pub e1_cells: usize,
    pub cancelled: usize,
    /// Σ_k (−1)^k log_p |E_1^{k,2a}|.
    pub euler: i64,
}

/// Runs row 2a of the spectral sequence for weight d.
pub fn row_e2(p: u64, r: u32, d: u64, a: i64, kmax: usize) -> Result<RowE2, CobarError> {
    let mut row = build_row(p, r, d, a, kmax)?;
    let e1_cells = row.words.iter().map(Vec::len).sum();
    let euler = (0..row.words.len().min(kmax + 1))
        .map(|k| {
            let total: i64 = (0..row.words[k].len()).map(|i| row.complex.exponent(k, i) as i64).sum();
            if k % 2 == 0 {
                total
            } else {
                -total
            }
        })
        .sum();
    let mut cancelled = cancel_matching(&mut row, p);
    cancelled += row.complex.reduce_greedy();
    let (modules, maps, idx) = row.complex.to_dense();
    let mut groups = homology_all(&modules, &maps)?;
    groups.truncate(kmax + 1);
    let name = |k: usize, i: usize| {
        let w = &row.words[k][i];
        cell_label(d - w.iter().sum::<u64>(), w)
    };
    let labels = (0..=kmax).map(|k| idx[k].iter().map(|&i| name(k, i)).collect()).collect();
    let mut residual = Vec::new();
    for (k, m) in maps.iter().enumerate().take(kmax + 1) {
        for (col, &s) in idx[k].iter().enumerate() {
            for (rw, &t) in idx[k + 1].iter().enumerate() {
                let c = m.get(rw, col);
                if c != 0 {
                    residual.push(format!("{} -> {} : {}", name(k, s), name(k + 1, t), c));
                }
            }
        }
    }
    Ok(RowE2 { a, groups, labels, residual, e1_cells, cancelled, euler })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageCell {
    pub group: PGroup,
    pub labels: Vec<String>,
}

/// E_2 cells (column k, row dimension 2a) of one multidegree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub p: u64,
    pub r: u32,
    pub deg: Vec<u64>,
    pub kmax: usize,
    pub max_dim: i64,
    pub cells: BTreeMap<(usize, i64), PageCell>,
    pub residual: Vec<String>,
    pub e1_cells: usize,
    pub cancelled: usize,
    /// Highest column that may be nonzero without forcing a differential
    /// past E_2.
    pub max_column: usize,
}

impl Page {
    pub fn group(&self, k: usize, dim: i64) -> PGroup {
        self.cells.get(&(k, dim)).map(|c| c.group.clone()).unwrap_or_else(|| PGroup::trivial(self.p))
    }

    /// The associated graded of the abutment in dimension n = 2a − k.
    pub fn abutment(&self, n: i64) -> PGroup {
        self.cells
            .iter()
            .filter(|((k, dim), _)| dim - *k as i64 == n)
            .fold(PGroup::trivial(self.p), |acc, (_, c)| acc.direct_sum(&c.group))
    }

    pub fn abutment_labels(&self, n: i64) -> Vec<String> {
        self.cells
            .iter()
            .filter(|((k, dim), _)| dim - *k as i64 == n)
            .flat_map(|(_, c)| c.labels.iter().cloned())
            .collect()
    }

    /// Nonzero cells beyond `max_column`.
    pub fn violations(&self) -> Vec<(usize, i64)> {
        self.cells
            .iter()
            .filter(|((k, _), c)| *k > self.max_column && !c.group.is_trivial())
            .map(|(key, _)| *key)
            .collect()
    }

    /// Abutment in dimensions 0..=max_dim as a chart cell list.
    pub fn to_chart(&self) -> Chart {
        let mut chart = Chart::new(self.p, self.r, self.deg.len());
        for n in 0..=self.max_dim {
            let g = self.abutment(n);
            if !g.is_trivial() {
                chart.insert(self.deg.clone(), n, g, self.abutment_labels(n));
            }
        }
        chart
    }
}

/// E_2 for weight d in abutment dimensions 0..=max_dim. Rows with a ≥ d
/// all see the full group Z/p^r in every summand, so only rows up to d are
/// computed and the last one is reused. Fails with a collapse violation if
/// anything survives in columns ≥ 2.
pub fn symbolic_e2(p: u64, r: u32, d: u64, max_dim: i64, kmax: usize) -> Result<Page, CobarError> {
    if max_dim < 0 {
        return Err(CobarError::Input("negative dimension window".into()));
    }
    let amax = (max_dim + 1) / 2;
    let distinct = amax.min(d.max(1) as i64);
    let rows: Vec<RowE2> =
        (0..=distinct).into_par_iter().map(|a| row_e2(p, r, d, a, kmax)).collect::<Result<_, _>>()?;
    let mut cells = BTreeMap::new();
    let mut residual = Vec::new();
    let (mut e1_cells, mut cancelled) = (0, 0);
    for a in 0..=amax {
        let row = &rows[a.min(distinct) as usize];
        if a <= distinct {
            e1_cells += row.e1_cells;
            cancelled += row.cancelled;
            residual.extend(row.residual.iter().map(|s| format!("row {}: {s}", 2 * a)));
        }
        for (k, g) in row.groups.iter().enumerate() {
            if g.is_trivial() || 2 * a - k as i64 > max_dim {
                continue;
            }
            let labels = row.labels[k].iter().map(|l| format!("s^{a} {l}")).collect();
            cells.insert((k, 2 * a), PageCell { group: g.clone(), labels });
        }
    }
    let page = Page { p, r, deg: vec![d], kmax, max_dim, cells, residual, e1_cells, cancelled, max_column: 1 };
    let bad = page.violations();
    if !bad.is_empty() {
        return Err(CobarError::CollapseViolation { cells: bad });
    }
    Ok(page)
}
