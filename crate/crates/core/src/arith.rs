//! Exact linear algebra over the local principal ideal ring Z/p^r.
//!
//! Everything is dense `u64` arithmetic with the modulus capped at 2^40, so a
//! product of two residues always fits in a `u128`. Modules are presented as
//! direct sums of cyclic groups with explicit torsion exponents; the lift to a
//! free Z/p^r-module happens inside [`homology`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus accepted anywhere in the crate.
pub const MAX_MODULUS: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("length r must be at least 1")]
    ZeroLength,
    #[error("modulus {p}^{r} exceeds 2^40")]
    ModulusTooLarge { p: u64, r: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generator exponent {e} outside 1..={r}")]
    BadExponent { e: u32, r: u32 },
    #[error("boundary {index} does not respect the torsion of source generator {generator}")]
    NotAHomomorphism { index: usize, generator: usize },
    #[error("boundaries {index} and {next} compose to a nonzero map")]
    NotAComplex { index: usize, next: usize },
    #[error("index {at} outside a complex with {len} modules")]
    IndexOutOfRange { at: usize, len: usize },
    #[error("ring mismatch between operands")]
    RingMismatch,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// p-adic valuation of a nonzero integer, `None` for zero.
pub fn valuation(mut n: u64, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    Some(v)
}

/// The ring Z/p^r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Zpr {
    p: u64,
    r: u32,
    modulus: u64,
}

impl Zpr {
    pub fn new(p: u64, r: u32) -> Result<Self, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime { p });
        }
        if r == 0 {
            return Err(ArithError::ZeroLength);
        }
        let mut m: u64 = 1;
        for _ in 0..r {
            m = m.checked_mul(p).filter(|&m| m <= MAX_MODULUS).ok_or(ArithError::ModulusTooLarge { p, r })?;
        }
        Ok(Self { p, r, modulus: m })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// p^e reduced mod p^r (zero once e ≥ r).
    pub fn p_pow(&self, e: u32) -> u64 {
        if e >= self.r {
            0
        } else {
            self.p.pow(e)
        }
    }

    pub fn reduce(&self, x: u64) -> u64 {
        x % self.modulus
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b % self.modulus) % self.modulus
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        // reduced operands below 2^32 cannot overflow u64
        if self.modulus <= 1 << 32 && a < self.modulus && b < self.modulus {
            return a * b % self.modulus;
        }
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    /// Valuation of a residue; r for zero.
    pub fn val(&self, x: u64) -> u32 {
        valuation(x % self.modulus, self.p).unwrap_or(self.r)
    }

    pub fn is_unit(&self, x: u64) -> bool {
        !x.is_multiple_of(self.p)
    }

    pub fn inv(&self, x: u64) -> Option<u64> {
        if !self.is_unit(x) {
            return None;
        }
        let m = self.modulus as i128;
        let (mut a, mut b) = ((x % self.modulus) as i128, m);
        let (mut x0, mut x1) = (1i128, 0i128);
        while b != 0 {
            let q = a / b;
            (a, b) = (b, a - q * b);
            (x0, x1) = (x1, x0 - q * x1);
        }
        Some(x0.rem_euclid(m) as u64)
    }
}

/// A finite abelian p-group ⊕ Z/p^e, stored as a sorted exponent multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PGroup {
    p: u64,
    exps: Vec<u32>,
}

impl PGroup {
    pub fn trivial(p: u64) -> Self {
        Self { p, exps: Vec::new() }
    }

    /// Z/p^e; e = 0 gives the trivial group.
    pub fn cyclic(p: u64, e: u32) -> Self {
        Self::from_exponents(p, [e])
    }

    /// Zero exponents are dropped, the rest sorted descending.
    pub fn from_exponents(p: u64, exps: impl IntoIterator<Item = u32>) -> Self {
        let mut exps: Vec<u32> = exps.into_iter().filter(|&e| e > 0).collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        Self { p, exps }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    /// log_p of the order.
    pub fn log_order(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    pub fn max_exponent(&self) -> u32 {
        self.exps.first().copied().unwrap_or(0)
    }

    pub fn direct_sum(&self, other: &PGroup) -> PGroup {
        PGroup::from_exponents(self.p, self.exps.iter().chain(&other.exps).copied())
    }

    /// Multiset containment of exponent lists.
    pub fn is_submultiset_of(&self, other: &PGroup) -> bool {
        let mut rest: BTreeMap<u32, usize> = BTreeMap::new();
        for &e in &other.exps {
            *rest.entry(e).or_default() += 1;
        }
        for &e in &self.exps {
            match rest.get_mut(&e) {
                Some(c) if *c > 0 => *c -= 1,
                _ => return false,
            }
        }
        true
    }
}

impl fmt::Display for PGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for &e in &self.exps {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "Z/{}", self.p)?;
            } else {
                write!(f, "Z/{}^{}", self.p, e)?;
            }
        }
        Ok(())
    }
}

/// A dense matrix over Z/p^r, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PMatrix {
    ring: Zpr,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl PMatrix {
    pub fn zeros(ring: Zpr, rows: usize, cols: usize) -> Self {
        Self { ring, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(ring: Zpr, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(ring: Zpr, rows: &[Vec<i64>]) -> Result<Self, ArithError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(ring, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(ArithError::DimensionMismatch { expected: cols, found: row.len() });
            }
            for (j, &x) in row.iter().enumerate() {
                m.data[i * cols + j] = ring.from_i64(x);
            }
        }
        Ok(m)
    }

    pub fn ring(&self) -> Zpr {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = self.ring.reduce(x);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &PMatrix) -> Result<PMatrix, ArithError> {
        if self.ring != other.ring {
            return Err(ArithError::RingMismatch);
        }
        if self.cols != other.rows {
            return Err(ArithError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let ring = self.ring;
        let mut out = PMatrix::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let idx = i * out.cols + j;
                        out.data[idx] = ring.add(out.data[idx], ring.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Side-by-side concatenation [self | other].
    pub fn hstack(&self, other: &PMatrix) -> Result<PMatrix, ArithError> {
        if self.rows != other.rows {
            return Err(ArithError::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let cols = self.cols + other.cols;
        let mut out = PMatrix::zeros(self.ring, self.rows, cols);
        for i in 0..self.rows {
            out.data[i * cols..i * cols + self.cols].copy_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
            out.data[i * cols + self.cols..(i + 1) * cols]
                .copy_from_slice(&other.data[i * other.cols..(i + 1) * other.cols]);
        }
        Ok(out)
    }

    /// Diagonal matrix with entries p^{e_i}.
    pub fn torsion_diagonal(ring: Zpr, exps: &[u32]) -> PMatrix {
        let n = exps.len();
        let mut m = PMatrix::zeros(ring, n, n);
        for (i, &e) in exps.iter().enumerate() {
            m.data[i * n + i] = ring.p_pow(e);
        }
        m
    }

    /// The first `k` rows.
    pub fn top_rows(&self, k: usize) -> PMatrix {
        let mut out = PMatrix::zeros(self.ring, k, self.cols);
        out.data.copy_from_slice(&self.data[..k * self.cols]);
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn scale_row(&mut self, i: usize, c: u64) {
        let ring = self.ring;
        for x in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *x = ring.mul(*x, c);
        }
    }

    /// row[dst] -= c * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, c: u64) {
        let ring = self.ring;
        let cols = self.cols;
        for j in 0..cols {
            let s = self.data[src * cols + j];
            if s != 0 {
                let d = &mut self.data[dst * cols + j];
                *d = ring.sub(*d, ring.mul(c, s));
            }
        }
    }

    /// col[dst] -= c * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, c: u64) {
        let ring = self.ring;
        let cols = self.cols;
        for i in 0..self.rows {
            let s = self.data[i * cols + src];
            if s != 0 {
                let d = &mut self.data[i * cols + dst];
                *d = ring.sub(*d, ring.mul(c, s));
            }
        }
    }
}

/// Result of [`smith_normal_form`]: `u * m * v == d`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: PMatrix,
    pub d: PMatrix,
    pub v: PMatrix,
    /// Valuations of the nonzero diagonal entries, weakly increasing.
    pub pivots: Vec<u32>,
}

struct Reduced {
    d: PMatrix,
    u: Option<PMatrix>,
    v: Option<PMatrix>,
    pivots: Vec<u32>,
}

fn reduce(m: &PMatrix, track_u: bool, track_v: bool) -> Reduced {
    let ring = m.ring;
    let mut a = m.clone();
    let mut u = track_u.then(|| PMatrix::identity(ring, m.rows));
    let mut v = track_v.then(|| PMatrix::identity(ring, m.cols));
    let mut pivots = Vec::new();
    let steps = m.rows.min(m.cols);
    for t in 0..steps {
        // minimal valuation, ties to the lowest (row, col)
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for i in t..a.rows {
            for j in t..a.cols {
                let x = a.get(i, j);
                if x == 0 {
                    continue;
                }
                let val = ring.val(x);
                if best.is_none_or(|(bv, _, _)| val < bv) {
                    best = Some((val, i, j));
                    if val == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        if let Some(u) = u.as_mut() {
            u.swap_rows(t, pi);
        }
        if let Some(v) = v.as_mut() {
            v.swap_cols(t, pj);
        }
        let unit = a.get(t, t) / ring.p.pow(val);
        let inv = ring.inv(unit).expect("pivot cofactor is a unit");
        a.scale_row(t, inv);
        if let Some(u) = u.as_mut() {
            u.scale_row(t, inv);
        }
        let pv = ring.p.pow(val);
        for i in 0..a.rows {
            if i != t {
                let x = a.get(i, t);
                if x != 0 {
                    let f = x / pv;
                    a.row_axpy(i, t, f);
                    if let Some(u) = u.as_mut() {
                        u.row_axpy(i, t, f);
                    }
                }
            }
        }
        // column t is now p^val at (t, t) only, so clearing row t touches nothing else
        for j in t + 1..a.cols {
            let x = a.get(t, j);
            if x != 0 {
                let g = x / pv;
                a.data[t * a.cols + j] = 0;
                if let Some(v) = v.as_mut() {
                    v.col_axpy(j, t, g);
                }
            }
        }
        pivots.push(val);
    }
    Reduced { d: a, u, v, pivots }
}

/// Smith normal form over Z/p^r with the deterministic pivot rule: minimal
/// valuation, ties broken by the lowest (row, col) of the working block.
pub fn smith_normal_form(m: &PMatrix) -> Snf {
    let r = reduce(m, true, true);
    Snf { u: r.u.expect("tracked"), d: r.d, v: r.v.expect("tracked"), pivots: r.pivots }
}

/// Generators of the kernel of `m` acting on the free module (Z/p^r)^cols,
/// returned as the columns of a matrix.
pub fn kernel_generators(m: &PMatrix) -> PMatrix {
    let ring = m.ring;
    let red = reduce(m, false, true);
    let v = red.v.expect("tracked");
    let mut gens: Vec<(usize, u64)> = Vec::new();
    for (t, &a) in red.pivots.iter().enumerate() {
        if a > 0 {
            gens.push((t, ring.p_pow(ring.r - a)));
        }
    }
    for t in red.pivots.len()..m.cols {
        gens.push((t, 1));
    }
    let mut out = PMatrix::zeros(ring, m.cols, gens.len());
    for (c, &(t, scale)) in gens.iter().enumerate() {
        for i in 0..m.cols {
            out.data[i * gens.len() + c] = ring.mul(v.get(i, t), scale);
        }
    }
    out
}

/// Cokernel of `m` viewed as a map into the free module (Z/p^r)^rows.
pub fn cokernel(m: &PMatrix) -> PGroup {
    let ring = m.ring;
    let red = reduce(m, false, false);
    let free = m.rows - red.pivots.len();
    PGroup::from_exponents(ring.p, red.pivots.iter().copied().chain(std::iter::repeat_n(ring.r, free)))
}

/// ⊕ Z/p^{e_g} over Z/p^r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedModule {
    ring: Zpr,
    exps: Vec<u32>,
}

impl PresentedModule {
    pub fn new(ring: Zpr, exps: Vec<u32>) -> Result<Self, ArithError> {
        if let Some(&e) = exps.iter().find(|&&e| e == 0 || e > ring.r) {
            return Err(ArithError::BadExponent { e, r: ring.r });
        }
        Ok(Self { ring, exps })
    }

    pub fn ring(&self) -> Zpr {
        self.ring
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn as_group(&self) -> PGroup {
        PGroup::from_exponents(self.ring.p, self.exps.iter().copied())
    }
}

fn check_shape(m: &PMatrix, src: &PresentedModule, dst: &PresentedModule) -> Result<(), ArithError> {
    if m.ring != src.ring || m.ring != dst.ring {
        return Err(ArithError::RingMismatch);
    }
    if m.cols != src.len() {
        return Err(ArithError::DimensionMismatch { expected: src.len(), found: m.cols });
    }
    if m.rows != dst.len() {
        return Err(ArithError::DimensionMismatch { expected: dst.len(), found: m.rows });
    }
    Ok(())
}

/// Index of the first source generator whose torsion is not respected.
fn torsion_violation(m: &PMatrix, src: &PresentedModule, dst: &PresentedModule) -> Option<usize> {
    let ring = m.ring;
    (0..src.len()).find(|&g| {
        let pe = ring.p_pow(src.exps[g]);
        (0..dst.len()).any(|t| !ring.mul(pe, m.get(t, g)).is_multiple_of(ring.p_pow_or_mod(dst.exps[t])))
    })
}

impl Zpr {
    /// p^e as a modulus (p^r itself when e = r).
    fn p_pow_or_mod(&self, e: u32) -> u64 {
        if e >= self.r {
            self.modulus
        } else {
            self.p.pow(e)
        }
    }
}

/// True iff `m` defines a homomorphism src → dst: p^{e_g} times column g
/// vanishes in dst for every source generator g.
pub fn hom_check(m: &PMatrix, src: &PresentedModule, dst: &PresentedModule) -> Result<bool, ArithError> {
    check_shape(m, src, dst)?;
    Ok(torsion_violation(m, src, dst).is_none())
}

fn validate_complex(modules: &[PresentedModule], boundaries: &[PMatrix]) -> Result<(), ArithError> {
    if boundaries.len() + 1 != modules.len() && !(modules.is_empty() && boundaries.is_empty()) {
        return Err(ArithError::DimensionMismatch {
            expected: modules.len().saturating_sub(1),
            found: boundaries.len(),
        });
    }
    for (k, d) in boundaries.iter().enumerate() {
        check_shape(d, &modules[k], &modules[k + 1])?;
        if let Some(g) = torsion_violation(d, &modules[k], &modules[k + 1]) {
            return Err(ArithError::NotAHomomorphism { index: k, generator: g });
        }
    }
    for k in 0..boundaries.len().saturating_sub(1) {
        let dd = boundaries[k + 1].mul(&boundaries[k])?;
        let tgt = &modules[k + 2];
        let ring = dd.ring;
        for t in 0..dd.rows {
            let m = ring.p_pow_or_mod(tgt.exps[t]);
            if (0..dd.cols).any(|j| dd.get(t, j) % m != 0) {
                return Err(ArithError::NotAComplex { index: k, next: k + 1 });
            }
        }
    }
    Ok(())
}

/// Homology at one slot of a cochain complex of presented modules, where
/// `boundaries[k]` maps `modules[k]` to `modules[k + 1]`.
pub fn homology(modules: &[PresentedModule], boundaries: &[PMatrix], at: usize) -> Result<PGroup, ArithError> {
    if at >= modules.len() {
        return Err(ArithError::IndexOutOfRange { at, len: modules.len() });
    }
    validate_complex(modules, boundaries)?;
    Ok(homology_unchecked(modules, boundaries, at))
}

/// Homology at every slot.
pub fn homology_all(modules: &[PresentedModule], boundaries: &[PMatrix]) -> Result<Vec<PGroup>, ArithError> {
    validate_complex(modules, boundaries)?;
    Ok((0..modules.len()).map(|k| homology_unchecked(modules, boundaries, k)).collect())
}

fn homology_unchecked(modules: &[PresentedModule], boundaries: &[PMatrix], at: usize) -> PGroup {
    let c = &modules[at];
    let ring = c.ring;
    let n = c.len();
    if n == 0 {
        return PGroup::trivial(ring.p);
    }
    // cycles: x with d x in the torsion relations of the target
    let cycles = match boundaries.get(at) {
        Some(d) if d.rows > 0 => {
            let rel = PMatrix::torsion_diagonal(ring, &modules[at + 1].exps);
            kernel_generators(&d.hstack(&rel).expect("same row count")).top_rows(n)
        }
        _ => PMatrix::identity(ring, n),
    };
    // boundaries plus the torsion relations of this slot
    let own = PMatrix::torsion_diagonal(ring, &c.exps);
    let bounds = match at.checked_sub(1).map(|k| &boundaries[k]) {
        Some(prev) if prev.cols > 0 => prev.hstack(&own).expect("same row count"),
        _ => own,
    };
    let g = cycles.cols;
    if g == 0 {
        return PGroup::trivial(ring.p);
    }
    let rel = kernel_generators(&cycles.hstack(&bounds).expect("same row count")).top_rows(g);
    cokernel(&rel)
}

/// A cochain complex with sparse differentials, reducible by cancelling
/// isomorphism pairs before the dense homology computation.
///
/// Entries follow the same convention as [`PMatrix`] boundaries: the entry
/// for (source s, target t) is the image of the generator of s, a residue
/// modulo p^{e_t}. Boundaries are kept sorted by target; incidence lists
/// are maintained lazily and may hold stale or repeated sources.
#[derive(Debug, Clone)]
pub struct SparseComplex {
    ring: Zpr,
    exps: Vec<Vec<u32>>,
    out: Vec<Vec<Vec<(u32, u64)>>>,
    inc: Vec<Vec<Vec<u32>>>,
    alive: Vec<Vec<bool>>,
}

fn find(col: &[(u32, u64)], t: u32) -> Result<usize, usize> {
    col.binary_search_by_key(&t, |e| e.0)
}

impl SparseComplex {
    pub fn new(ring: Zpr, exps: Vec<Vec<u32>>) -> Result<Self, ArithError> {
        for e in exps.iter().flatten() {
            if *e == 0 || *e > ring.r {
                return Err(ArithError::BadExponent { e: *e, r: ring.r });
            }
        }
        let out = exps.iter().map(|v| vec![Vec::new(); v.len()]).collect();
        let inc = exps.iter().map(|v| vec![Vec::new(); v.len()]).collect();
        let alive = exps.iter().map(|v| vec![true; v.len()]).collect();
        Ok(Self { ring, exps, out, inc, alive })
    }

    pub fn ring(&self) -> Zpr {
        self.ring
    }

    pub fn degrees(&self) -> usize {
        self.exps.len()
    }

    pub fn len(&self, k: usize) -> usize {
        self.exps[k].len()
    }

    pub fn exponent(&self, k: usize, i: usize) -> u32 {
        self.exps[k][i]
    }

    pub fn is_alive(&self, k: usize, i: usize) -> bool {
        self.alive[k][i]
    }

    fn modulus_of(&self, k: usize, i: usize) -> u64 {
        self.ring.p_pow_or_mod(self.exps[k][i])
    }

    /// Adds `coef` to the entry from cell `s` in degree `k` to cell `t` in
    /// degree `k + 1`.
    pub fn add_entry(&mut self, k: usize, s: usize, t: usize, coef: u64) {
        let m = self.modulus_of(k + 1, t);
        let col = &mut self.out[k][s];
        match find(col, t as u32) {
            Ok(pos) => {
                let e = (col[pos].1 + coef % m) % m;
                if e == 0 {
                    col.remove(pos);
                } else {
                    col[pos].1 = e;
                }
            }
            Err(pos) => {
                if !coef.is_multiple_of(m) {
                    col.insert(pos, (t as u32, coef % m));
                    self.inc[k + 1][t].push(s as u32);
                }
            }
        }
    }

    /// Replaces the boundary of a cell; entries are reduced and merged.
    pub fn set_boundary(&mut self, k: usize, s: usize, entries: impl IntoIterator<Item = (usize, u64)>) {
        let mut col: Vec<(u32, u64)> = entries.into_iter().map(|(t, c)| (t as u32, c)).collect();
        col.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(u32, u64)> = Vec::with_capacity(col.len());
        for (t, c) in col {
            let m = self.modulus_of(k + 1, t as usize);
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 = (last.1 + c % m) % m,
                _ => merged.push((t, c % m)),
            }
        }
        merged.retain(|e| e.1 != 0);
        for &(t, _) in &merged {
            self.inc[k + 1][t as usize].push(s as u32);
        }
        self.out[k][s] = merged;
    }

    pub fn entry(&self, k: usize, s: usize, t: usize) -> u64 {
        find(&self.out[k][s], t as u32).map(|p| self.out[k][s][p].1).unwrap_or(0)
    }

    /// Current boundary of a cell as (target, coefficient) pairs.
    pub fn boundary(&self, k: usize, s: usize) -> &[(u32, u64)] {
        &self.out[k][s]
    }

    pub fn alive_cells(&self, k: usize) -> Vec<usize> {
        (0..self.exps[k].len()).filter(|&i| self.alive[k][i]).collect()
    }

    /// Checks d∘d = 0 and the torsion condition on every stored entry.
    pub fn check(&self) -> Result<(), ArithError> {
        let ring = self.ring;
        for k in 0..self.exps.len().saturating_sub(1) {
            for s in 0..self.exps[k].len() {
                if !self.alive[k][s] {
                    continue;
                }
                let pe = ring.p_pow(self.exps[k][s]);
                for &(t, c) in &self.out[k][s] {
                    if !ring.mul(pe, c).is_multiple_of(self.modulus_of(k + 1, t as usize)) {
                        return Err(ArithError::NotAHomomorphism { index: k, generator: s });
                    }
                }
                if k + 2 < self.exps.len() {
                    let mut acc: BTreeMap<u32, u64> = BTreeMap::new();
                    for &(t, c) in &self.out[k][s] {
                        for &(u, c2) in &self.out[k + 1][t as usize] {
                            let m = self.modulus_of(k + 2, u as usize);
                            let e = acc.entry(u).or_insert(0);
                            *e = (*e + ring.mul(c, c2) % m) % m;
                        }
                    }
                    if acc.values().any(|&x| x != 0) {
                        return Err(ArithError::NotAComplex { index: k, next: k + 1 });
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether (k, s) → (k+1, t) is an isomorphism of cyclic groups.
    pub fn cancellable(&self, k: usize, s: usize, t: usize) -> bool {
        self.alive[k][s]
            && self.alive[k + 1][t]
            && self.exps[k][s] == self.exps[k + 1][t]
            && self.ring.is_unit(self.entry(k, s, t))
    }

    /// Live sources whose boundary currently hits (k+1, t); compacts the
    /// incidence list as a side effect.
    pub fn sources(&mut self, k: usize, t: usize) -> Vec<usize> {
        let mut list = std::mem::take(&mut self.inc[k + 1][t]);
        list.sort_unstable();
        list.dedup();
        list.retain(|&s| self.alive[k][s as usize] && find(&self.out[k][s as usize], t as u32).is_ok());
        let out = list.iter().map(|&s| s as usize).collect();
        self.inc[k + 1][t] = list;
        out
    }

    /// Gaussian elimination of an isomorphism pair; returns false when the
    /// pair is not (or no longer) cancellable.
    pub fn cancel(&mut self, k: usize, s: usize, t: usize) -> bool {
        if !self.cancellable(k, s, t) {
            return false;
        }
        let ring = self.ring;
        let cinv = ring.inv(self.entry(k, s, t)).expect("unit");
        let col: Vec<(u32, u64)> = self.out[k][s].iter().copied().filter(|e| e.0 != t as u32).collect();
        for s2 in self.sources(k, t) {
            if s2 == s {
                continue;
            }
            let own = std::mem::take(&mut self.out[k][s2]);
            let pos = find(&own, t as u32).expect("checked by sources");
            let f = ring.mul(own[pos].1, cinv);
            // merge own (minus t) with -f·col
            let mut merged = Vec::with_capacity(own.len() + col.len());
            let (mut i, mut j) = (0, 0);
            while i < own.len() || j < col.len() {
                if i < own.len() && own[i].0 == t as u32 {
                    i += 1;
                    continue;
                }
                let take_own = j >= col.len() || (i < own.len() && own[i].0 < col[j].0);
                let take_col = i >= own.len() || (j < col.len() && col[j].0 < own[i].0);
                if take_own {
                    merged.push(own[i]);
                    i += 1;
                } else {
                    let (u, v) = col[j];
                    let m = self.modulus_of(k + 1, u as usize);
                    let delta = ring.mul(f, v) % m;
                    let base = if take_col { 0 } else { own[i].1 };
                    if !take_col {
                        i += 1;
                    } else {
                        self.inc[k + 1][u as usize].push(s2 as u32);
                    }
                    let e = (base + m - delta) % m;
                    if e != 0 {
                        merged.push((u, e));
                    }
                    j += 1;
                }
            }
            self.out[k][s2] = merged;
        }
        // drop s together with everything touching it
        if k > 0 {
            for s3 in std::mem::take(&mut self.inc[k][s]) {
                if let Ok(p) = find(&self.out[k - 1][s3 as usize], s as u32) {
                    self.out[k - 1][s3 as usize].remove(p);
                }
            }
        }
        self.out[k][s].clear();
        self.inc[k + 1][t].clear();
        if k + 2 < self.exps.len() {
            self.out[k + 1][t].clear();
        }
        self.alive[k][s] = false;
        self.alive[k + 1][t] = false;
        true
    }

    /// Greedy cancellation until no isomorphism pair is left. Targets with
    /// few incoming entries are preferred to limit fill-in.
    pub fn reduce_greedy(&mut self) -> usize {
        let mut total = 0;
        loop {
            let mut changed = 0;
            for k in (0..self.exps.len().saturating_sub(1)).rev() {
                for s in 0..self.exps[k].len() {
                    if !self.alive[k][s] {
                        continue;
                    }
                    let es = self.exps[k][s];
                    let best = self.out[k][s]
                        .iter()
                        .filter(|&&(t, c)| self.exps[k + 1][t as usize] == es && self.ring.is_unit(c))
                        .min_by_key(|&&(t, _)| (self.inc[k + 1][t as usize].len(), t))
                        .map(|&(t, _)| t as usize);
                    if let Some(t) = best {
                        if self.cancel(k, s, t) {
                            changed += 1;
                        }
                    }
                }
            }
            total += changed;
            if changed == 0 {
                return total;
            }
        }
    }

    /// Dense form of the surviving cells: modules, boundaries, and for each
    /// degree the original indices of the surviving cells.
    pub fn to_dense(&self) -> (Vec<PresentedModule>, Vec<PMatrix>, Vec<Vec<usize>>) {
        let idx: Vec<Vec<usize>> = (0..self.exps.len()).map(|k| self.alive_cells(k)).collect();
        let modules: Vec<PresentedModule> = idx
            .iter()
            .enumerate()
            .map(|(k, cells)| PresentedModule {
                ring: self.ring,
                exps: cells.iter().map(|&i| self.exps[k][i]).collect(),
            })
            .collect();
        let mut maps = Vec::new();
        for k in 0..self.exps.len().saturating_sub(1) {
            let pos: BTreeMap<usize, usize> = idx[k + 1].iter().enumerate().map(|(j, &t)| (t, j)).collect();
            let mut m = PMatrix::zeros(self.ring, idx[k + 1].len(), idx[k].len());
            for (col, &s) in idx[k].iter().enumerate() {
                for &(t, c) in &self.out[k][s] {
                    m.set(pos[&(t as usize)], col, c);
                }
            }
            maps.push(m);
        }
        (modules, maps, idx)
    }

    /// Homology in every degree after greedy reduction.
    pub fn homology(&mut self) -> Result<Vec<PGroup>, ArithError> {
        self.reduce_greedy();
        let (modules, maps, _) = self.to_dense();
        homology_all(&modules, &maps)
    }
}
