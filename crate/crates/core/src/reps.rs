//! S^1-representations, the fixed-point region formula, and the Mackey
//! structure of the Witt vectors of F_p.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::arith::{is_prime, ArithError, PGroup, PMatrix, Zpr};
use crate::chart::Chart;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("rotation numbers must be positive")]
    ZeroRotation,
    #[error("subgroup index {j} outside [-1, {r}]")]
    IndexOutOfRange { j: i64, r: u32 },
    #[error("cyclotomic restriction needs r >= 2, got {r}")]
    LengthTooSmall { r: u32 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// An integer extended by tagged infinities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extended {
    NegInf,
    Finite(u64),
    PosInf,
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        use Extended::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Extended {
    fn le_int(self, a: i64) -> bool {
        match self {
            Extended::NegInf => true,
            Extended::PosInf => false,
            Extended::Finite(x) => a >= 0 && x <= a as u64,
        }
    }

    fn gt_int(self, a: i64) -> bool {
        match self {
            Extended::NegInf => false,
            Extended::PosInf => true,
            Extended::Finite(x) => a < 0 || x > a as u64,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => write!(f, "-inf"),
            Extended::PosInf => write!(f, "+inf"),
            Extended::Finite(x) => write!(f, "{x}"),
        }
    }
}

/// A complex S^1-representation ⊕ C[ξ_n], stored as its rotation numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rep {
    p: u64,
    rotations: Vec<u64>,
}

impl Rep {
    pub fn new(p: u64, mut rotations: Vec<u64>) -> Result<Self, RepError> {
        if !is_prime(p) {
            return Err(RepError::NotPrime { p });
        }
        if rotations.contains(&0) {
            return Err(RepError::ZeroRotation);
        }
        rotations.sort_unstable();
        Ok(Self { p, rotations })
    }

    pub fn zero(p: u64) -> Self {
        Self { p, rotations: Vec::new() }
    }

    /// V_n = C[ξ_1] ⊕ … ⊕ C[ξ_n].
    pub fn v_n(p: u64, n: u64) -> Self {
        Self { p, rotations: (1..=n).collect() }
    }

    /// V_{n_1} ⊕ … ⊕ V_{n_k}.
    pub fn wedge_word(p: u64, word: &[u64]) -> Self {
        let mut rotations: Vec<u64> = word.iter().flat_map(|&n| 1..=n).collect();
        rotations.sort_unstable();
        Self { p, rotations }
    }

    pub fn direct_sum(&self, other: &Rep) -> Rep {
        let mut rotations = self.rotations.clone();
        rotations.extend_from_slice(&other.rotations);
        rotations.sort_unstable();
        Rep { p: self.p, rotations }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rotations(&self) -> &[u64] {
        &self.rotations
    }

    pub fn complex_dim(&self) -> usize {
        self.rotations.len()
    }

    /// |V^{Z/p^j}| for j in [-1, r], with +∞ at j = -1 and -∞ at j = r.
    pub fn fixed_dim(&self, j: i64, r: u32) -> Result<Extended, RepError> {
        if j < -1 || j > r as i64 {
            return Err(RepError::IndexOutOfRange { j, r });
        }
        Ok(if j == -1 {
            Extended::PosInf
        } else if j == r as i64 {
            Extended::NegInf
        } else {
            let q = self.p.pow(j as u32);
            Extended::Finite(self.rotations.iter().filter(|&&n| n % q == 0).count() as u64)
        })
    }

    /// The finite values |V^{Z/p^j}| for j = 0..r-1.
    pub fn fixed_dims(&self, r: u32) -> Vec<u64> {
        (0..r)
            .map(|j| match self.fixed_dim(j as i64, r) {
                Ok(Extended::Finite(x)) => x,
                _ => unreachable!("j in range"),
            })
            .collect()
    }
}

/// Fixed dimensions of V_{n_1} ⊕ … ⊕ V_{n_k} without materializing the
/// rotations: |V_n^{Z/p^j}| = ⌊n/p^j⌋.
pub fn word_fixed_dims(p: u64, r: u32, word: &[u64]) -> Vec<u64> {
    (0..r)
        .map(|j| {
            let q = p.pow(j);
            word.iter().map(|&n| n / q).sum()
        })
        .collect()
}

/// The unique i in [0, r] with |V^{Z/p^{r-i}}| ≤ a < |V^{Z/p^{r-i-1}}|,
/// given the finite fixed dimensions for j = 0..r-1.
///
/// Panics if the region is not unique; that can only happen for a
/// non-monotone input, which no representation produces.
pub fn region_exponent(fixed: &[u64], a: i64) -> u32 {
    let r = fixed.len() as i64;
    let at = |j: i64| -> Extended {
        if j < 0 {
            Extended::PosInf
        } else if j >= r {
            Extended::NegInf
        } else {
            Extended::Finite(fixed[j as usize])
        }
    };
    let mut hit = None;
    for i in 0..=r {
        if at(r - i).le_int(a) && at(r - i - 1).gt_int(a) {
            assert!(hit.is_none(), "region exponent is not unique for a = {a}");
            hit = Some(i as u32);
        }
    }
    hit.expect("some region always contains a >= 0")
}

/// π_{2a} of (S^V ∧ T(F_p))^{Z/p^{r-1}}: the cyclic group Z/p^i of the
/// region containing a. Negative a gives the trivial group.
pub fn smash_homotopy(v: &Rep, r: u32, a: i64) -> PGroup {
    if a < 0 || r == 0 {
        return PGroup::trivial(v.p);
    }
    PGroup::cyclic(v.p, region_exponent(&v.fixed_dims(r), a))
}

/// Zeroes every cell of dimension below `dim`.
pub fn trunc_ge(chart: &Chart, dim: i64) -> Chart {
    let mut out = chart.clone();
    out.retain(|_, d, _| d >= dim);
    out
}

/// Per-level groups with restriction and transfer between adjacent levels.
/// `res[l-1]` maps level l+1 to level l, `tr[l-1]` maps level l to l+1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MackeyChart {
    pub p: u64,
    pub r: u32,
    pub dim: i64,
    pub levels: Vec<PGroup>,
    pub res: Vec<PMatrix>,
    pub tr: Vec<PMatrix>,
}

impl MackeyChart {
    pub fn level(&self, l: u32) -> &PGroup {
        &self.levels[l as usize - 1]
    }

    fn level_modulus(&self, l: u32) -> u64 {
        self.p.pow(self.level(l).max_exponent())
    }

    /// res ∘ tr on level l, as a 1×1 residue mod |level l|.
    pub fn res_after_tr(&self, l: u32) -> Option<u64> {
        let i = l as usize - 1;
        let (res, tr) = (self.res.get(i)?, self.tr.get(i)?);
        Some(res.mul(tr).ok()?.get(0, 0) % self.level_modulus(l))
    }

    /// tr ∘ res on level l ≥ 2.
    pub fn tr_after_res(&self, l: u32) -> Option<u64> {
        let i = (l as usize).checked_sub(2)?;
        let (res, tr) = (self.res.get(i)?, self.tr.get(i)?);
        Some(tr.mul(res).ok()?.get(0, 0) % self.level_modulus(l))
    }

    /// res∘tr = p and tr∘res = p wherever both are defined.
    pub fn relations_hold(&self) -> bool {
        (1..=self.r).all(|l| {
            let m = self.level_modulus(l);
            let p = self.p % m;
            self.res_after_tr(l).is_none_or(|x| x == p) && self.tr_after_res(l).is_none_or(|x| x == p)
        })
    }
}

/// The Mackey chart of W(F_p) truncated at length r in an even dimension:
/// level l is Z/p^l, restriction is reduction, transfer is 1 ↦ p.
pub fn w_mackey(p: u64, r: u32, dim: i64) -> Result<MackeyChart, RepError> {
    let ring = Zpr::new(p, r)?;
    if dim < 0 || dim % 2 != 0 {
        return Ok(MackeyChart {
            p,
            r,
            dim,
            levels: vec![PGroup::trivial(p); r as usize],
            res: Vec::new(),
            tr: Vec::new(),
        });
    }
    let levels = (1..=r).map(|l| PGroup::cyclic(p, l)).collect();
    let mut res = Vec::new();
    let mut tr = Vec::new();
    for _ in 1..r {
        let mut m = PMatrix::zeros(ring, 1, 1);
        m.set(0, 0, 1);
        res.push(m);
        let mut m = PMatrix::zeros(ring, 1, 1);
        m.set(0, 0, p);
        tr.push(m);
    }
    Ok(MackeyChart { p, r, dim, levels, res, tr })
}

/// Per-level groups of (S^V ∧ T(F_p)) in dimension `dim`; structure maps
/// are not exposed for V ≠ 0.
pub fn smash_levels(v: &Rep, r: u32, dim: i64) -> Vec<PGroup> {
    (1..=r).map(|l| if dim % 2 == 0 { smash_homotopy(v, l, dim / 2) } else { PGroup::trivial(v.p) }).collect()
}

/// The ring map TR^r(F_p) → TR^{r-1}(F_p) sending σ to pσ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclotomicRestriction {
    pub p: u64,
    pub r: u32,
    target: Zpr,
}

pub fn cyclotomic_restriction(p: u64, r: u32) -> Result<CyclotomicRestriction, RepError> {
    if r < 2 {
        return Err(RepError::LengthTooSmall { r });
    }
    Ok(CyclotomicRestriction { p, r, target: Zpr::new(p, r - 1)? })
}

impl CyclotomicRestriction {
    /// Image of the generator in dimension `dim`: p^a mod p^{r-1} for
    /// dim = 2a, zero in odd or negative dimensions.
    pub fn coefficient(&self, dim: i64) -> u64 {
        if dim < 0 || dim % 2 != 0 {
            return 0;
        }
        let a = (dim / 2) as u32;
        self.target.p_pow(a)
    }

    /// Image of x·σ^a.
    pub fn apply(&self, dim: i64, x: u64) -> u64 {
        self.target.mul(self.target.reduce(x), self.coefficient(dim))
    }

    /// Checks φ(xσ^a · yσ^b) = φ(xσ^a)·φ(yσ^b) for all residues x, y and
    /// a, b ≤ max_a.
    pub fn is_multiplicative(&self, max_a: u32) -> bool {
        let src = Zpr::new(self.p, self.r).expect("validated");
        let m = src.modulus();
        for a in 0..=max_a as i64 {
            for b in 0..=max_a as i64 {
                let (ca, cb, cab) = (self.coefficient(2 * a), self.coefficient(2 * b), self.coefficient(2 * (a + b)));
                let t = &self.target;
                for x in 0..m {
                    let fx = t.mul(t.reduce(x), ca);
                    for y in 0..m {
                        let lhs = t.mul(t.reduce(src.mul(x, y)), cab);
                        if lhs != t.mul(fx, t.mul(t.reduce(y), cb)) {
                            return false;
                        }
                    }
                }
            }
        }
        self.apply(0, 1) == 1
    }
}
