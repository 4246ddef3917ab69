//! The dimension-0 row: W_r of the conerve in weight d/p^{r-1}.
//!
//! The Z/p^{r-1}-fixed points of the weight-d summand of T(F_p[x]) are
//! the Witt vectors of ghost weight d/p^{r-1}, so the row is computed at
//! that weight. Level k of the complex is spanned by p^t[μ] where μ runs
//! over non-ideal monomials at denominator level N and t = max(0, L(μ) − N0)
//! with N0 = N − (r−1); these are the classes V^t[μ^{p^t}] whose Witt
//! coordinates live at level N0. Cofaces act through Teichmüller lifts,
//! p^t[f(μ)] = p^t·Teich_{W_{r-t}}(f(μ)).

use std::collections::BTreeMap;

use super::conerve::{build_conerve, CosimplicialRing};
use super::CobarError;
use crate::arith::{homology_all, PGroup, PMatrix, PresentedModule, SparseComplex, Zpr};
use crate::witt::{apply_to_monomial, lift_power, torsion_order, witt_group, Monomial, MonomialAlgebra, PRational};

/// A generator p^t[μ] with effective order p^{exp}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dim0Gen {
    pub mono: Monomial,
    pub t: u32,
    pub exp: u32,
}

#[derive(Debug, Clone)]
pub struct Dim0Complex {
    pub p: u64,
    pub r: u32,
    pub d: u64,
    pub level: u32,
    pub kmax: usize,
    pub normalized: bool,
    /// Generators per cosimplicial degree 0..=k_max+1.
    pub gens: Vec<Vec<Dim0Gen>>,
    complex: SparseComplex,
}

fn sublattice_shift(alg: &MonomialAlgebra, m: &[u64], n0: u32) -> u32 {
    alg.min_level(m).saturating_sub(n0)
}

fn generators(
    alg: &MonomialAlgebra,
    r: u32,
    weight: PRational,
    n0: u32,
    normalized: bool,
) -> Result<Vec<Dim0Gen>, CobarError> {
    let group = witt_group(alg, r, weight)?;
    Ok(group
        .gens
        .into_iter()
        .zip(group.exps)
        .filter(|(m, _)| !normalized || m[1..].iter().all(|&n| n > 0))
        .filter_map(|(mono, e)| {
            let t = sublattice_shift(alg, &mono, n0);
            (e > t).then(|| Dim0Gen { mono, t, exp: e - t })
        })
        .collect())
}

/// Builds the (normalized by default) cochain complex of the dimension-0
/// row for weight d with Witt length r at denominator level N ≥ r−1.
pub fn dim0_complex(
    p: u64,
    r: u32,
    d: u64,
    kmax: usize,
    level: u32,
    normalized: bool,
) -> Result<Dim0Complex, CobarError> {
    if level + 1 < r {
        return Err(CobarError::Input(format!("denominator level {level} is below r - 1 = {}", r - 1)));
    }
    let ring = Zpr::new(p, r)?;
    let n0 = level + 1 - r;
    let conerve: CosimplicialRing = build_conerve(p, kmax + 1, level, d.max(1))?;
    let weight = PRational::new(p, d * p.pow(n0), level);
    let mut gens = Vec::with_capacity(kmax + 2);
    for k in 0..=kmax + 1 {
        gens.push(generators(&conerve.algebra(k), r, weight, n0, normalized)?);
    }
    let exps = gens.iter().map(|g| g.iter().map(|x| x.exp).collect()).collect();
    let mut complex = SparseComplex::new(ring, exps)?;
    let work = level + r - 1;
    for k in 0..=kmax {
        let src = conerve.algebra(k);
        let dst = conerve.algebra(k + 1);
        let walg = dst.at_level(work);
        let index: BTreeMap<&[u64], usize> =
            gens[k + 1].iter().enumerate().map(|(i, g)| (g.mono.as_slice(), i)).collect();
        let faces: Vec<_> = (0..=k + 1).map(|j| conerve.coface(k, j)).collect();
        for (s, g) in gens[k].iter().enumerate() {
            let mut acc: BTreeMap<Monomial, u64> = BTreeMap::new();
            for (j, f) in faces.iter().enumerate() {
                let len = r - g.t;
                let q = apply_to_monomial(f, &src, &dst, &g.mono, len - 1, work)?;
                let image = lift_power(&q, &walg, len, len - 1).rescale(&walg, level)?;
                let scale = ring.p_pow(g.t);
                for (mono, c) in image.coeffs {
                    let Some(e) = torsion_order(&mono, &dst, r) else { continue };
                    let modulus = p.pow(e);
                    let mut v = ring.mul(c, scale) % modulus;
                    if j % 2 == 1 {
                        v = (modulus - v) % modulus;
                    }
                    let slot = acc.entry(mono).or_insert(0);
                    *slot = (*slot + v) % modulus;
                }
            }
            let mut entries = Vec::new();
            for (mono, c) in acc {
                if c == 0 {
                    continue;
                }
                if normalized && mono[1..].contains(&0) {
                    return Err(CobarError::NotNormalized { level: k + 1, monomial: dst.format(&mono) });
                }
                let t = sublattice_shift(&dst, &mono, n0);
                let q = p.pow(t);
                match index.get(mono.as_slice()) {
                    Some(&i) if c % q == 0 => entries.push((i, c / q)),
                    _ => {
                        return Err(CobarError::Sublattice { level: k + 1, monomial: dst.format(&mono) });
                    }
                }
            }
            complex.set_boundary(k, s, entries);
        }
    }
    Ok(Dim0Complex { p, r, d, level, kmax, normalized, gens, complex })
}

impl Dim0Complex {
    /// Dense modules and boundaries over degrees 0..=k_max+1.
    pub fn dense(&self) -> (Vec<PresentedModule>, Vec<PMatrix>) {
        let (m, d, _) = self.complex.to_dense();
        (m, d)
    }

    pub fn check(&self) -> Result<(), CobarError> {
        Ok(self.complex.check()?)
    }

    /// H^0 … H^{k_max}.
    pub fn homology(&self) -> Result<Vec<PGroup>, CobarError> {
        let mut c = self.complex.clone();
        c.check()?;
        c.reduce_greedy();
        let (modules, maps, _) = c.to_dense();
        let mut h = homology_all(&modules, &maps)?;
        h.truncate(self.kmax + 1);
        Ok(h)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.gens.iter().map(Vec::len).collect()
    }
}
