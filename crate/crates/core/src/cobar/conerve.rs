//! The Čech conerve of F_p[x] → F_p[x^{1/p^N}] in the coordinates
//! y_i = x_{i-1} − x_i (i = 1..k) and x = x_k, the last tensor factor.
//!
//! In these coordinates every coface and codegeneracy is a linear
//! substitution of variables, so the maps are stored as raw level-0
//! polynomials and pushed through `witt::induced_map` or applied directly.

use super::CobarError;
use crate::arith::is_prime;
use crate::witt::{Assignment, CharPPoly, MonomialAlgebra};

/// Levels 0..=k_max+1 of the conerve with their structure maps.
#[derive(Debug, Clone)]
pub struct CosimplicialRing {
    pub p: u64,
    pub level: u32,
    pub weight_cap: u64,
    pub kmax: usize,
}

pub fn build_conerve(p: u64, kmax: usize, level: u32, weight_cap: u64) -> Result<CosimplicialRing, CobarError> {
    if !is_prime(p) {
        return Err(CobarError::Input(format!("{p} is not prime")));
    }
    let numerator = p.checked_pow(level).and_then(|q| q.checked_mul(weight_cap)).filter(|&n| n < 1 << 32);
    if numerator.is_none() {
        return Err(CobarError::CapOverflow(format!("weight {weight_cap} at level {level} for p = {p}")));
    }
    Ok(CosimplicialRing { p, level, weight_cap, kmax })
}

fn var(nvars: usize, v: usize) -> Vec<u64> {
    let mut m = vec![0; nvars];
    m[v] = 1;
    m
}

impl CosimplicialRing {
    /// The algebra in cosimplicial degree k: variables x, y_1, …, y_k.
    pub fn algebra(&self, k: usize) -> MonomialAlgebra {
        MonomialAlgebra::conerve_level(self.p, self.level, k)
    }

    fn raw(&self, k: usize) -> MonomialAlgebra {
        self.algebra(k).at_level(0).free()
    }

    fn poly(&self, k: usize, terms: &[(usize, u64)]) -> CharPPoly {
        let raw = self.raw(k);
        let mut out = CharPPoly::zero();
        for &(v, c) in terms {
            out.add_term(&raw, var(k + 1, v), c);
        }
        out
    }

    /// d^j from degree k to degree k+1, 0 ≤ j ≤ k+1. Variable 0 is x and
    /// variable i is y_i.
    pub fn coface(&self, k: usize, j: usize) -> Assignment {
        assert!(j <= k + 1, "coface index {j} out of range in degree {k}");
        let mut images = Vec::with_capacity(k + 1);
        if j == k + 1 {
            images.push(self.poly(k + 1, &[(0, 1), (k + 1, 1)]));
        } else {
            images.push(self.poly(k + 1, &[(0, 1)]));
        }
        for i in 1..=k {
            let img = if j == k + 1 || i < j {
                self.poly(k + 1, &[(i, 1)])
            } else if i == j {
                self.poly(k + 1, &[(i, 1), (i + 1, 1)])
            } else {
                self.poly(k + 1, &[(i + 1, 1)])
            };
            images.push(img);
        }
        images
    }

    /// s^j from degree k+1 to degree k, 0 ≤ j ≤ k: y_{j+1} ↦ 0.
    pub fn codegeneracy(&self, k: usize, j: usize) -> Assignment {
        assert!(j <= k, "codegeneracy index {j} out of range in degree {k}");
        let mut images = vec![self.poly(k, &[(0, 1)])];
        for i in 1..=k + 1 {
            let img = if i <= j {
                self.poly(k, &[(i, 1)])
            } else if i == j + 1 {
                CharPPoly::zero()
            } else {
                self.poly(k, &[(i - 1, 1)])
            };
            images.push(img);
        }
        images
    }

    /// Checks every cosimplicial identity between degrees 0 and k_max+1 as
    /// identities of polynomial substitutions.
    pub fn check_identities(&self) -> Result<(), CobarError> {
        let kmax = self.kmax;
        for k in 0..kmax {
            // d^j d^i = d^i d^{j-1} for i < j, from degree k to k+2
            for j in 0..=k + 2 {
                for i in 0..j {
                    let lhs = compose(&self.coface(k + 1, j), &self.coface(k, i), &self.raw(k + 2));
                    let rhs = compose(&self.coface(k + 1, i), &self.coface(k, j - 1), &self.raw(k + 2));
                    if lhs != rhs {
                        return Err(CobarError::Identity(format!("d^{j} d^{i} = d^{i} d^{} in degree {k}", j - 1)));
                    }
                }
            }
            // s^j s^i = s^i s^{j+1} for i ≤ j, from degree k+2 to k
            for j in 0..=k {
                for i in 0..=j {
                    let lhs = compose(&self.codegeneracy(k, j), &self.codegeneracy(k + 1, i), &self.raw(k));
                    let rhs = compose(&self.codegeneracy(k, i), &self.codegeneracy(k + 1, j + 1), &self.raw(k));
                    if lhs != rhs {
                        return Err(CobarError::Identity(format!("s^{j} s^{i} = s^{i} s^{} in degree {k}", j + 1)));
                    }
                }
            }
        }
        // mixed identities: s^j d^i on degree k, with d^i: k → k+1 and s^j: k+1 → k
        for k in 0..=kmax {
            let raw = self.raw(k);
            for j in 0..=k {
                for i in 0..=k + 1 {
                    let lhs = compose(&self.codegeneracy(k, j), &self.coface(k, i), &raw);
                    let ok = if i == j || i == j + 1 {
                        lhs == identity(&raw)
                    } else if k == 0 {
                        false
                    } else if i < j {
                        lhs == compose(&self.coface(k - 1, i), &self.codegeneracy(k - 1, j - 1), &raw)
                    } else {
                        lhs == compose(&self.coface(k - 1, i - 1), &self.codegeneracy(k - 1, j), &raw)
                    };
                    if !ok {
                        return Err(CobarError::Identity(format!("s^{j} d^{i} in degree {k}")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn identity(alg: &MonomialAlgebra) -> Assignment {
    (0..alg.nvars()).map(|v| CharPPoly::monomial(alg, var(alg.nvars(), v), 1)).collect()
}

/// g ∘ f for substitutions with integral exponents: each f(v) is rewritten
/// by substituting g. `dst` is the raw algebra of g's target.
pub fn compose(g: &Assignment, f: &Assignment, dst: &MonomialAlgebra) -> Assignment {
    f.iter()
        .map(|poly| {
            let mut out = CharPPoly::zero();
            for (m, &c) in &poly.terms {
                let mut term = CharPPoly::monomial(dst, vec![0; dst.nvars()], c);
                for (v, &e) in m.iter().enumerate() {
                    if e > 0 {
                        term = term.mul(dst, &g[v].pow(dst, e));
                    }
                }
                out = out.add(dst, &term);
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero_cofaces_are_the_coaction() {
        let c = build_conerve(2, 3, 1, 4).unwrap();
        let raw = c.algebra(1).at_level(0).free();
        assert_eq!(c.coface(0, 0)[0], CharPPoly::monomial(&raw, vec![1, 0], 1));
        let mut xy = CharPPoly::monomial(&raw, vec![1, 0], 1);
        xy.add_term(&raw, vec![0, 1], 1);
        assert_eq!(c.coface(0, 1)[0], xy);
    }

    #[test]
    fn identities_hold() {
        for p in [2, 3] {
            build_conerve(p, 4, 1, 4).unwrap().check_identities().unwrap();
        }
    }

    #[test]
    fn broken_coface_is_caught() {
        let c = build_conerve(2, 2, 1, 4).unwrap();
        let raw = c.algebra(2).at_level(0).free();
        let good = compose(&c.coface(1, 2), &c.coface(0, 0), &raw);
        let bad = compose(&c.coface(1, 1), &c.coface(0, 0), &raw);
        assert_ne!(good, bad);
        assert!(build_conerve(2, 2, 40, 1 << 20).is_err());
    }
}
