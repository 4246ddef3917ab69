//! Group sizes of the E_1 page.

use std::collections::BTreeMap;

use crate::arith::PGroup;
use crate::reps::{region_exponent, word_fixed_dims, Rep};

/// One summand x^m ⊗ V_{n_1} ⊗ … ⊗ V_{n_k} in row 2a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub k: usize,
    pub m: u64,
    pub word: Vec<u64>,
    pub d: u64,
    pub dim: i64,
    pub exponent: u32,
}

impl Summand {
    pub fn label(&self) -> String {
        cell_label(self.m, &self.word)
    }
}

pub(crate) fn cell_label(m: u64, word: &[u64]) -> String {
    let words: Vec<String> = word.iter().map(u64::to_string).collect();
    if word.is_empty() {
        format!("x^{m}")
    } else {
        format!("x^{m}[{}]", words.join(","))
    }
}

/// Compositions of `total` into exactly `k` positive parts, in
/// lexicographic order.
pub(crate) fn compositions(total: u64, k: usize) -> Vec<Vec<u64>> {
    fn go(left: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if k == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if left < k as u64 {
            return;
        }
        for first in 1..=left - (k as u64 - 1) {
            cur.push(first);
            go(left - first, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, k, &mut Vec::new(), &mut out);
    out
}

/// Region exponent of a word in row a with an ambient representation.
pub(crate) fn word_exponent(p: u64, r: u32, ambient: &[u64], word: &[u64], a: i64) -> u32 {
    let mut fixed = word_fixed_dims(p, r, word);
    for (f, g) in fixed.iter_mut().zip(ambient) {
        *f += g;
    }
    region_exponent(&fixed, a)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E1Table {
    pub p: u64,
    pub r: u32,
    pub d: u64,
    pub kmax: usize,
    pub max_dim: i64,
    pub summands: Vec<Summand>,
    pub cells: BTreeMap<(usize, i64), PGroup>,
}

impl E1Table {
    pub fn group(&self, k: usize, dim: i64) -> PGroup {
        self.cells.get(&(k, dim)).cloned().unwrap_or_else(|| PGroup::trivial(self.p))
    }

    /// Σ_k (−1)^k log_p |E_1^{k, dim}|; d_1 stays inside a row, so this is
    /// also the Euler characteristic of the row on E_2.
    pub fn row_euler(&self, dim: i64) -> i64 {
        self.cells
            .iter()
            .filter(|((_, d), _)| *d == dim)
            .map(|((k, _), g)| if k % 2 == 0 { g.log_order() as i64 } else { -(g.log_order() as i64) })
            .sum()
    }
}

/// Enumerates every summand of weight d in columns 0..=k_max and even
/// dimensions 0..=max_dim, with the ambient representation added to each
/// wedge word.
pub fn e1_sizes(p: u64, r: u32, d: u64, ambient: &Rep, max_dim: i64, kmax: usize) -> E1Table {
    let amb = ambient.fixed_dims(r);
    let mut summands = Vec::new();
    let mut cells: BTreeMap<(usize, i64), Vec<u32>> = BTreeMap::new();
    for k in 0..=kmax {
        for tot in 0..=d {
            for word in compositions(tot, k) {
                for a in 0..=max_dim / 2 {
                    let e = word_exponent(p, r, &amb, &word, a);
                    if e == 0 {
                        continue;
                    }
                    cells.entry((k, 2 * a)).or_default().push(e);
                    summands.push(Summand { k, m: d - tot, word: word.clone(), d, dim: 2 * a, exponent: e });
                }
            }
        }
    }
    let cells = cells.into_iter().map(|(key, e)| (key, PGroup::from_exponents(p, e))).collect();
    E1Table { p, r, d, kmax, max_dim, summands, cells }
}
