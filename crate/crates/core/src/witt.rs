//! p-typical Witt vectors of monomial semiperfect F_p-algebras.
//!
//! W_r of F_p[x^{1/p^∞}] ⊗ (F_p[y^{1/p^∞}]/(y))^{⊗k} is carried in its flat
//! presentation: Z/p^r-combinations of monomials where a monomial m has
//! torsion order p^{e(m)}, e(m) = min(r, min{j : m^{p^j} ∈ (y)}). Exponents are
//! numerators over a shared denominator p^N.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::arith::{hom_check, ArithError, PMatrix, PresentedModule, Zpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WittError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("exponent numerator {num} is not divisible by p^{need} at level {level}")]
    Capacity { num: u64, need: u32, level: u32 },
    #[error("expected {expected} variables, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("universal sum polynomials are tabulated only for r <= 4, got {r}")]
    LengthTooLarge { r: u32 },
    #[error("image of basis column {column} has a monomial outside the target basis")]
    OutsideBasis { column: usize },
    #[error("induced map violates torsion at column {column}")]
    Torsion { column: usize },
}

/// A rational number num/p^level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PRational {
    pub p: u64,
    pub num: u64,
    pub level: u32,
}

impl PRational {
    pub fn new(p: u64, num: u64, level: u32) -> Self {
        Self { p, num, level }
    }

    /// Numerator of the same number at a deeper level; `None` if the level
    /// is too shallow to hold it exactly.
    pub fn numerator_at(&self, level: u32) -> Option<u64> {
        if level >= self.level {
            Some(self.num * self.p.pow(level - self.level))
        } else {
            let q = self.p.pow(self.level - level);
            self.num.is_multiple_of(q).then(|| self.num / q)
        }
    }

    /// Parses "num/p^N".
    pub fn parse(s: &str) -> Option<Self> {
        let (num, rest) = s.split_once('/')?;
        let (p, level) = rest.split_once('^')?;
        Some(Self { p: p.trim().parse().ok()?, num: num.trim().parse().ok()?, level: level.trim().parse().ok()? })
    }
}

impl fmt::Display for PRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.num, self.p, self.level)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// No relation.
    X,
    /// Exponent ≥ 1 lands in the ideal.
    Y,
}

/// Monomial exponents as numerators over the algebra's p^level.
pub type Monomial = Vec<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialAlgebra {
    p: u64,
    level: u32,
    roles: Vec<Role>,
}

impl MonomialAlgebra {
    pub fn new(p: u64, level: u32, roles: Vec<Role>) -> Self {
        Self { p, level, roles }
    }

    /// F_p[x^{1/p^∞}] ⊗ (F_p[y^{1/p^∞}]/(y))^{⊗k} at the given level; the
    /// variable order is x, y_1, …, y_k.
    pub fn conerve_level(p: u64, level: u32, k: usize) -> Self {
        let mut roles = vec![Role::X];
        roles.extend(std::iter::repeat_n(Role::Y, k));
        Self::new(p, level, roles)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn nvars(&self) -> usize {
        self.roles.len()
    }

    /// p^level, the numerator of exponent 1.
    pub fn one(&self) -> u64 {
        self.p.pow(self.level)
    }

    /// The same variables with no relations.
    pub fn free(&self) -> Self {
        Self { roles: vec![Role::X; self.roles.len()], ..self.clone() }
    }

    /// The same algebra at another level.
    pub fn at_level(&self, level: u32) -> Self {
        Self { level, ..self.clone() }
    }

    pub fn in_ideal(&self, m: &[u64]) -> bool {
        let one = self.one();
        self.roles.iter().zip(m).any(|(r, &n)| *r == Role::Y && n >= one)
    }

    pub fn weight_numerator(&self, m: &[u64]) -> u64 {
        m.iter().sum()
    }

    /// Smallest level holding every exponent of `m` exactly.
    pub fn min_level(&self, m: &[u64]) -> u32 {
        let v = m
            .iter()
            .filter(|&&n| n > 0)
            .map(|&n| crate::arith::valuation(n, self.p).unwrap_or(0).min(self.level))
            .min()
            .unwrap_or(self.level);
        self.level - v
    }

    /// Re-expresses a monomial at a deeper or shallower level.
    pub fn rescale(&self, m: &[u64], to: u32) -> Result<Monomial, WittError> {
        m.iter()
            .map(|&n| {
                PRational::new(self.p, n, self.level).numerator_at(to).ok_or_else(|| WittError::Capacity {
                    num: n,
                    need: self.level.saturating_sub(to),
                    level: self.level,
                })
            })
            .collect()
    }

    pub fn format(&self, m: &[u64]) -> String {
        let mut parts = Vec::new();
        let mut y = 0;
        for (role, &n) in self.roles.iter().zip(m) {
            let name = match role {
                Role::X => "x".to_string(),
                Role::Y => {
                    y += 1;
                    format!("y{y}")
                }
            };
            if n > 0 {
                parts.push(format!("{name}^{}", PRational::new(self.p, n, self.level)));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }
}

/// e(m) for a non-ideal monomial; `None` when m lies in the ideal.
pub fn torsion_order(m: &[u64], alg: &MonomialAlgebra, r: u32) -> Option<u32> {
    let one = alg.one();
    let ymax = alg.roles.iter().zip(m).filter(|(role, _)| **role == Role::Y).map(|(_, &n)| n).max().unwrap_or(0);
    if ymax >= one {
        return None;
    }
    if ymax == 0 {
        return Some(r);
    }
    let mut j = 0;
    let mut v = ymax;
    while v < one && j < r {
        v *= alg.p;
        j += 1;
    }
    Some(j.min(r))
}

fn mul_monomials(a: &[u64], b: &[u64]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// A polynomial over F_p in the monomials of an algebra, with ideal
/// monomials dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPPoly {
    pub terms: BTreeMap<Monomial, u64>,
}

impl CharPPoly {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn monomial(alg: &MonomialAlgebra, m: Monomial, c: u64) -> Self {
        let mut out = Self::zero();
        out.add_term(alg, m, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, alg: &MonomialAlgebra, m: Monomial, c: u64) {
        if alg.in_ideal(&m) {
            return;
        }
        let p = alg.p;
        let e = self.terms.entry(m.clone()).or_insert(0);
        *e = (*e + c % p) % p;
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, alg: &MonomialAlgebra, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(alg, m.clone(), c);
        }
        out
    }

    pub fn mul(&self, alg: &MonomialAlgebra, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                out.add_term(alg, mul_monomials(a, b), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, alg: &MonomialAlgebra, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::monomial(alg, vec![0; alg.nvars()], 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(alg, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(alg, &base);
            }
        }
        acc
    }

    /// The p^k-th root in characteristic p: exponents divided by p^k,
    /// coefficients fixed. Fails if a numerator is not divisible.
    pub fn root(&self, alg: &MonomialAlgebra, k: u32) -> Result<Self, WittError> {
        let q = alg.p.pow(k);
        let mut out = Self::zero();
        for (m, &c) in &self.terms {
            let mut r = Vec::with_capacity(m.len());
            for &n in m {
                if n % q != 0 {
                    return Err(WittError::Capacity { num: n, need: k, level: alg.level });
                }
                r.push(n / q);
            }
            out.terms.insert(r, c);
        }
        Ok(out)
    }

    /// Re-expresses every monomial at another level.
    pub fn rescale(&self, alg: &MonomialAlgebra, to: u32) -> Result<Self, WittError> {
        let target = alg.at_level(to);
        let mut out = Self::zero();
        for (m, &c) in &self.terms {
            out.add_term(&target, alg.rescale(m, to)?, c);
        }
        Ok(out)
    }
}

/// An element of W_r(A) in the flat presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittElement {
    pub r: u32,
    pub coeffs: BTreeMap<Monomial, u64>,
}

impl WittElement {
    pub fn zero(r: u32) -> Self {
        Self { r, coeffs: BTreeMap::new() }
    }

    /// The basis element [m] = Teichmüller of the monomial m.
    pub fn basis(alg: &MonomialAlgebra, r: u32, m: Monomial) -> Self {
        let mut out = Self::zero(r);
        out.add_term(alg, m, 1);
        out
    }

    fn modulus(&self, alg: &MonomialAlgebra, m: &[u64]) -> Option<u64> {
        torsion_order(m, alg, self.r).map(|e| alg.p.pow(e))
    }

    pub fn add_term(&mut self, alg: &MonomialAlgebra, m: Monomial, c: u64) {
        let Some(q) = self.modulus(alg, &m) else { return };
        let e = self.coeffs.entry(m.clone()).or_insert(0);
        *e = ((*e as u128 + c as u128) % q as u128) as u64;
        if *e == 0 {
            self.coeffs.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, alg: &MonomialAlgebra, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in &other.coeffs {
            out.add_term(alg, m.clone(), c);
        }
        out
    }

    pub fn scale(&self, alg: &MonomialAlgebra, c: u64) -> Self {
        let mut out = Self::zero(self.r);
        for (m, &x) in &self.coeffs {
            out.add_term(alg, m.clone(), ((x as u128 * c as u128) % alg.p.pow(self.r) as u128) as u64);
        }
        out
    }

    pub fn mul(&self, alg: &MonomialAlgebra, other: &Self) -> Self {
        let modulus = alg.p.pow(self.r) as u128;
        let mut out = Self::zero(self.r);
        for (a, &ca) in &self.coeffs {
            for (b, &cb) in &other.coeffs {
                out.add_term(alg, mul_monomials(a, b), ((ca as u128 * cb as u128) % modulus) as u64);
            }
        }
        out
    }

    pub fn pow(&self, alg: &MonomialAlgebra, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::basis(alg, self.r, vec![0; alg.nvars()]);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(alg, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(alg, &base);
            }
        }
        acc
    }

    /// Re-expresses every monomial at another level.
    pub fn rescale(&self, alg: &MonomialAlgebra, to: u32) -> Result<Self, WittError> {
        let target = alg.at_level(to);
        let mut out = Self::zero(self.r);
        for (m, &c) in &self.coeffs {
            out.add_term(&target, alg.rescale(m, to)?, c);
        }
        Ok(out)
    }
}

/// lift(Q)^{p^k} in the flat presentation of W_len: Q lifted
/// coefficient-wise to Z/p^len, then raised to the p^k-th power exactly.
pub fn lift_power(q: &CharPPoly, alg: &MonomialAlgebra, len: u32, k: u32) -> WittElement {
    let mut lifted = WittElement::zero(len);
    for (m, &c) in &q.terms {
        lifted.add_term(alg, m.clone(), c);
    }
    let mut out = lifted;
    for _ in 0..k {
        out = out.pow(alg, alg.p);
    }
    out
}

/// Teichmüller lift of a characteristic-p polynomial: the p^{r-1}-th root is
/// lifted to Z/p^r and raised back to the p^{r-1}-th power. Every exponent
/// of `poly` must be divisible by p^{r-1} at the algebra's level.
pub fn teichmuller_expand(poly: &CharPPoly, alg: &MonomialAlgebra, r: u32) -> Result<WittElement, WittError> {
    let root = poly.root(alg, r - 1)?;
    Ok(lift_power(&root, alg, r, r - 1))
}

/// The weight piece of W_r(A): all non-ideal monomials with the given
/// weight numerator, with their torsion exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittGroup {
    pub gens: Vec<Monomial>,
    pub exps: Vec<u32>,
}

impl WittGroup {
    pub fn module(&self, ring: Zpr) -> Result<PresentedModule, ArithError> {
        PresentedModule::new(ring, self.exps.clone())
    }

    pub fn index_of(&self, m: &[u64]) -> Option<usize> {
        self.gens.binary_search_by(|g| g.as_slice().cmp(m)).ok()
    }
}

/// Enumerates every exponent vector with entries summing to `total`, where
/// entries of ideal variables stay below `one`.
pub fn monomials_of_weight(alg: &MonomialAlgebra, total: u64) -> Vec<Monomial> {
    fn go(alg: &MonomialAlgebra, i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Monomial>) {
        if i == alg.nvars() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let cap = match alg.roles[i] {
            Role::X => left,
            Role::Y => left.min(alg.one() - 1),
        };
        for n in 0..=cap {
            cur.push(n);
            go(alg, i + 1, left - n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(alg, 0, total, &mut Vec::new(), &mut out);
    out.sort();
    out
}

pub fn witt_group(alg: &MonomialAlgebra, r: u32, weight: PRational) -> Result<WittGroup, WittError> {
    let total = weight.numerator_at(alg.level).ok_or_else(|| WittError::Capacity {
        num: weight.num,
        need: weight.level.saturating_sub(alg.level),
        level: alg.level,
    })?;
    let mut gens = Vec::new();
    let mut exps = Vec::new();
    for m in monomials_of_weight(alg, total) {
        if let Some(e) = torsion_order(&m, alg, r) {
            gens.push(m);
            exps.push(e);
        }
    }
    Ok(WittGroup { gens, exps })
}

/// A ring map given on variables: entry v is the image of variable v as a
/// raw polynomial over the target's variables with integral exponents
/// (level 0, nothing dropped). Build it with `dst.at_level(0).free()`.
pub type Assignment = Vec<CharPPoly>;

/// f applied to a monomial: ∏_v f(v)^{s_v} computed through p-power roots.
/// The result lives at level `work`, which must be deep enough.
pub fn apply_to_monomial(
    f: &Assignment,
    src: &MonomialAlgebra,
    dst: &MonomialAlgebra,
    m: &[u64],
    root: u32,
    work: u32,
) -> Result<CharPPoly, WittError> {
    if f.len() != src.nvars() || m.len() != src.nvars() {
        return Err(WittError::Arity { expected: src.nvars(), found: f.len().min(m.len()) });
    }
    let walg = dst.at_level(work);
    let raw = dst.at_level(0).free();
    let wfree = walg.free();
    let mut acc = CharPPoly::monomial(&walg, vec![0; dst.nvars()], 1);
    for (v, &n) in m.iter().enumerate() {
        if n == 0 {
            continue;
        }
        // f(v)^{n / p^{src.level + root}} = (f(v)^{1/p^{src.level + root}})^n;
        // roots are taken before the ideal is imposed
        let base = f[v].rescale(&raw, work)?.root(&wfree, src.level + root)?;
        acc = acc.mul(&walg, &base.pow(&walg, n));
    }
    Ok(acc)
}

/// Matrix of W_r(f) from the weight piece `src_basis` of W_r(src) to the
/// weight piece `dst_basis` of W_r(dst). Column m is the Teichmüller
/// expansion of f(m); computations run p^{r-1} levels deeper and are then
/// restricted to the target level.
pub fn induced_map(
    f: &Assignment,
    src: &MonomialAlgebra,
    dst: &MonomialAlgebra,
    r: u32,
    src_basis: &WittGroup,
    dst_basis: &WittGroup,
) -> Result<PMatrix, WittError> {
    let ring = Zpr::new(src.p, r)?;
    let work = dst.level + src.level + r - 1;
    let walg = dst.at_level(work);
    let mut mat = PMatrix::zeros(ring, dst_basis.gens.len(), src_basis.gens.len());
    for (col, m) in src_basis.gens.iter().enumerate() {
        let q = apply_to_monomial(f, src, dst, m, r - 1, work)?;
        let image = lift_power(&q, &walg, r, r - 1).rescale(&walg, dst.level)?;
        for (mono, &c) in &image.coeffs {
            let row = dst_basis.index_of(mono).ok_or(WittError::OutsideBasis { column: col })?;
            mat.set(row, col, c);
        }
    }
    let src_mod = src_basis.module(ring)?;
    let dst_mod = dst_basis.module(ring)?;
    if !hom_check(&mat, &src_mod, &dst_mod)? {
        let column = (0..src_basis.gens.len())
            .find(|&c| {
                let single = PMatrix::zeros(ring, dst_basis.gens.len(), 1);
                let mut single = single;
                for row in 0..dst_basis.gens.len() {
                    single.set(row, 0, mat.get(row, c));
                }
                let one = PresentedModule::new(ring, vec![src_basis.exps[c]]).expect("valid exponent");
                !hom_check(&single, &one, &dst_mod).unwrap_or(false)
            })
            .unwrap_or(0);
        return Err(WittError::Torsion { column });
    }
    Ok(mat)
}

/// The flat element Σ_i V^i[a_i] = Σ_i p^i·[a_i^{1/p^i}] of a Witt
/// coordinate vector. Coordinates live at `alg`'s level and need 2(r-1)
/// spare levels of divisibility.
pub fn from_coordinates(
    coords: &[CharPPoly],
    alg: &MonomialAlgebra,
    r: u32,
    work: u32,
) -> Result<WittElement, WittError> {
    let walg = alg.at_level(work);
    let mut out = WittElement::zero(r);
    for (i, a) in coords.iter().enumerate().take(r as usize) {
        let i = i as u32;
        // p^i·Teich(a^{1/p^i}) only depends on Teich mod p^{r-i}
        let root = a.rescale(alg, work)?.root(&walg, i + (r - 1 - i))?;
        let teich = lift_power(&root, &walg, r - i, r - 1 - i);
        let pi = alg.p.pow(i);
        for (m, &c) in &teich.coeffs {
            out.add_term(&walg, m.clone(), c * pi);
        }
    }
    Ok(out)
}

/// Integer polynomial in 2r variables X_0..X_{r-1}, Y_0..Y_{r-1} with
/// coefficients kept modulo a power of p.
type IntPoly = BTreeMap<Vec<u32>, u64>;

fn ipoly_add(a: &mut IntPoly, b: &IntPoly, scale: u64, modulus: u64) {
    for (m, &c) in b {
        let e = a.entry(m.clone()).or_insert(0);
        *e = ((*e as u128 + c as u128 * scale as u128) % modulus as u128) as u64;
        if *e == 0 {
            a.remove(m);
        }
    }
}

fn ipoly_mul(a: &IntPoly, b: &IntPoly, modulus: u64) -> IntPoly {
    let mut out = IntPoly::new();
    for (ma, &ca) in a {
        for (mb, &cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let e = out.entry(m).or_insert(0);
            *e = ((*e as u128 + ca as u128 * cb as u128) % modulus as u128) as u64;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn ipoly_pow(a: &IntPoly, mut e: u64, nv: usize, modulus: u64) -> IntPoly {
    let mut acc: IntPoly = [(vec![0; nv], 1 % modulus)].into_iter().collect();
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = ipoly_mul(&acc, &base, modulus);
        }
        e >>= 1;
        if e > 0 {
            base = ipoly_mul(&base, &base, modulus);
        }
    }
    acc
}

/// The universal Witt addition polynomials S_0, …, S_{r-1}, computed from
/// the ghost recursion p^n S_n = w_n(X) + w_n(Y) − Σ_{i<n} p^i S_i^{p^{n-i}}
/// and reduced mod p. Used as an independent check on the flat lift.
#[derive(Debug, Clone)]
pub struct WittSumOracle {
    pub p: u64,
    pub r: u32,
    polys: Vec<IntPoly>,
}

pub fn witt_sum_oracle(p: u64, r: u32) -> Result<WittSumOracle, WittError> {
    if r > 4 {
        return Err(WittError::LengthTooLarge { r });
    }
    Zpr::new(p, r.max(1))?;
    let nv = 2 * r as usize;
    // S_i is needed mod p^{r-i}; work mod p^r throughout
    let modulus = p.pow(r);
    let var = |i: usize| -> IntPoly {
        let mut m = vec![0; nv];
        m[i] = 1;
        [(m, 1)].into_iter().collect()
    };
    let mut polys: Vec<IntPoly> = Vec::new();
    for n in 0..r as usize {
        let mut rhs = IntPoly::new();
        for i in 0..=n {
            let pi = p.pow(i as u32);
            let e = p.pow((n - i) as u32);
            ipoly_add(&mut rhs, &ipoly_pow(&var(i), e, nv, modulus), pi, modulus);
            ipoly_add(&mut rhs, &ipoly_pow(&var(r as usize + i), e, nv, modulus), pi, modulus);
        }
        for (i, s) in polys.iter().enumerate() {
            let pi = p.pow(i as u32);
            let term = ipoly_pow(s, p.pow((n - i) as u32), nv, modulus);
            ipoly_add(&mut rhs, &term, modulus - pi % modulus, modulus);
        }
        let pn = p.pow(n as u32);
        let mut s = IntPoly::new();
        for (m, c) in rhs {
            assert_eq!(c % pn, 0, "ghost recursion must divide by p^{n}");
            let q = (c / pn) % p.pow(r - n as u32);
            if q != 0 {
                s.insert(m, q);
            }
        }
        polys.push(s);
    }
    Ok(WittSumOracle { p, r, polys })
}

impl WittSumOracle {
    /// S_n as an explicit list of (exponent vector over X_0..,Y_0.., coefficient mod p).
    pub fn polynomial_mod_p(&self, n: usize) -> Vec<(Vec<u32>, u64)> {
        self.polys[n].iter().filter(|(_, &c)| c % self.p != 0).map(|(m, &c)| (m.clone(), c % self.p)).collect()
    }

    /// Witt coordinates of a + b, evaluated in characteristic p.
    pub fn sum(&self, alg: &MonomialAlgebra, a: &[CharPPoly], b: &[CharPPoly]) -> Vec<CharPPoly> {
        let r = self.r as usize;
        let vars: Vec<&CharPPoly> = a.iter().take(r).chain(b.iter().take(r)).collect();
        let mut cache: BTreeMap<(usize, u32), CharPPoly> = BTreeMap::new();
        (0..r)
            .map(|n| {
                let mut out = CharPPoly::zero();
                for (m, c) in self.polynomial_mod_p(n) {
                    let mut term = CharPPoly::monomial(alg, vec![0; alg.nvars()], c);
                    for (v, &e) in m.iter().enumerate() {
                        if e > 0 {
                            let pw = cache.entry((v, e)).or_insert_with(|| vars[v].pow(alg, e as u64));
                            term = term.mul(alg, pw);
                        }
                    }
                    out = out.add(alg, &term);
                }
                out
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y_only(p: u64, level: u32) -> MonomialAlgebra {
        MonomialAlgebra::new(p, level, vec![Role::Y])
    }

    #[test]
    fn torsion_order_examples() {
        let a = y_only(3, 2);
        assert_eq!(torsion_order(&[3], &a, 2), Some(1));
        assert_eq!(torsion_order(&[1], &a, 3), Some(2));
        assert_eq!(torsion_order(&[9], &a, 3), None);
        let x = MonomialAlgebra::new(3, 2, vec![Role::X]);
        assert_eq!(torsion_order(&[27], &x, 3), Some(3));
    }

    #[test]
    fn teichmuller_of_x_plus_y() {
        // (x^{1/2} + y^{1/2})^2 = x + 2 x^{1/2} y^{1/2} + y over Z/4
        let alg = MonomialAlgebra::conerve_level(2, 1, 1);
        let free = alg.free();
        let mut poly = CharPPoly::zero();
        poly.add_term(&free, vec![2, 0], 1);
        poly.add_term(&free, vec![0, 2], 1);
        let t = teichmuller_expand(&poly, &free, 2).unwrap();
        let mut want = WittElement::zero(2);
        want.add_term(&free, vec![2, 0], 1);
        want.add_term(&free, vec![1, 1], 2);
        want.add_term(&free, vec![0, 2], 1);
        assert_eq!(t, want);
        // in the quotient y = 0 and x^{1/2}y^{1/2} is killed by 2
        let mut q = CharPPoly::zero();
        q.add_term(&alg, vec![2, 0], 1);
        q.add_term(&alg, vec![0, 2], 1);
        let t = teichmuller_expand(&q, &alg, 2).unwrap();
        assert_eq!(t, WittElement::basis(&alg, 2, vec![2, 0]));
        assert!(teichmuller_expand(&CharPPoly::zero(), &alg, 2).unwrap().is_zero());
    }

    #[test]
    fn witt_group_examples() {
        let a = y_only(3, 1);
        let g = witt_group(&a, 2, PRational::new(3, 1, 1)).unwrap();
        assert_eq!(g.exps, vec![1]);
        let x = MonomialAlgebra::new(2, 0, vec![Role::X]);
        let g = witt_group(&x, 3, PRational::new(2, 5, 0)).unwrap();
        assert_eq!(g.exps, vec![3]);
        let xy = MonomialAlgebra::conerve_level(2, 1, 1);
        let g = witt_group(&xy, 2, PRational::new(2, 1, 0)).unwrap();
        assert_eq!(g.gens, vec![vec![1, 1], vec![2, 0]]);
        assert_eq!(g.exps, vec![1, 2]);
    }

    #[test]
    fn universal_sum_in_length_two() {
        let o = witt_sum_oracle(2, 2).unwrap();
        // S_1 = X_1 + Y_1 + X_0 Y_0 mod 2
        let mut s1 = o.polynomial_mod_p(1);
        s1.sort();
        assert_eq!(s1, vec![(vec![0, 0, 0, 1], 1), (vec![0, 1, 0, 0], 1), (vec![1, 0, 1, 0], 1)]);
        assert!(witt_sum_oracle(2, 5).is_err());
    }

    #[test]
    fn prational_round_trip() {
        let q = PRational::new(2, 3, 2);
        assert_eq!(q.to_string(), "3/2^2");
        assert_eq!(PRational::parse("3/2^2"), Some(q));
        assert_eq!(q.numerator_at(3), Some(6));
        assert_eq!(q.numerator_at(1), None);
    }
}
