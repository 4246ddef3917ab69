//! Several variables by induction on the number of nonzero coordinates.
//!
//! Coordinates outside the support only contribute their weight-0 piece,
//! so the computation runs on the support A. Totalizing the coordinates
//! after the first gives an inner complex whose dimension-0 group Z/p^{r'}
//! fixes the coefficient length for the first coordinate: the outer
//! spectral sequence is the one-variable one at length r' and weight d_1,
//! tensored with the exterior classes u_s of the inner coordinates. Each
//! inner class u_s moves a cell one column right and one row up.

use std::collections::BTreeMap;

use super::symbolic::{symbolic_e2, Page, PageCell};
use super::CobarError;

fn subsets(items: &[usize], q: usize) -> Vec<Vec<usize>> {
    if q == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], q - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// E_2 in multidegree `deg`, abutment dimensions 0..=max_dim. `kmax`
/// bounds the columns of the first-coordinate sequence.
pub fn multivar_e2(p: u64, r: u32, deg: &[u64], max_dim: i64, kmax: usize) -> Result<Page, CobarError> {
    if deg.is_empty() {
        return Err(CobarError::Input("empty multidegree".into()));
    }
    let support: Vec<usize> = (0..deg.len()).filter(|&s| deg[s] != 0).collect();
    if support.len() <= 1 {
        let d = support.first().map_or(0, |&s| deg[s]);
        let mut page = symbolic_e2(p, r, d, max_dim, kmax)?;
        page.deg = deg.to_vec();
        return Ok(page);
    }
    let first = support[0];
    let inner_deg: Vec<u64> = support[1..].iter().map(|&s| deg[s]).collect();
    let inner_kmax = inner_deg[0] as usize + 2;
    let inner = multivar_e2(p, r, &inner_deg, 0, inner_kmax)?;
    let r_inner = inner.abutment(0).max_exponent();
    if r_inner == 0 {
        return Err(CobarError::Input(format!("inner complex for {inner_deg:?} has no dimension-0 class")));
    }
    let outer = symbolic_e2(p, r_inner, deg[first], max_dim, kmax)?;
    let mut cells: BTreeMap<(usize, i64), PageCell> = BTreeMap::new();
    let others = &support[1..];
    for (&(k, dim), cell) in &outer.cells {
        for q in 0..=others.len() {
            let (k2, dim2) = (k + q, dim + 2 * q as i64);
            if dim2 - k2 as i64 > max_dim {
                continue;
            }
            for us in subsets(others, q) {
                let tag: String = us.iter().map(|s| format!("u{}", s + 1)).collect();
                let slot = cells
                    .entry((k2, dim2))
                    .or_insert_with(|| PageCell { group: crate::arith::PGroup::trivial(p), labels: Vec::new() });
                slot.group = slot.group.direct_sum(&cell.group);
                slot.labels.extend(cell.labels.iter().map(|l| {
                    if tag.is_empty() {
                        l.clone()
                    } else {
                        format!("{l} {tag}")
                    }
                }));
            }
        }
    }
    let page = Page {
        p,
        r,
        deg: deg.to_vec(),
        kmax,
        max_dim,
        cells,
        residual: outer.residual,
        e1_cells: outer.e1_cells,
        cancelled: outer.cancelled,
        max_column: support.len(),
    };
    let bad = page.violations();
    if !bad.is_empty() {
        return Err(CobarError::CollapseViolation { cells: bad });
    }
    Ok(page)
}
