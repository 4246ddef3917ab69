//! Cell-by-cell comparison of an E_2 page against a closed-form chart.

use super::symbolic::Page;
use crate::arith::PGroup;
use crate::chart::Chart;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellReport {
    pub deg: Vec<u64>,
    pub dim: i64,
    pub page: PGroup,
    pub oracle: PGroup,
    pub pass: bool,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareReport {
    pub cells: Vec<CellReport>,
    pub pass: bool,
}

impl CompareReport {
    pub fn failures(&self) -> impl Iterator<Item = &CellReport> {
        self.cells.iter().filter(|c| !c.pass)
    }
}

/// Compares the abutment of `page` in dimensions 0..=max_dim with
/// `oracle`. With a filtration index i only rows 2a with a ≥ i count, which
/// is the page's picture of the i-th filtration piece.
pub fn compare(page: &Page, oracle: &Chart, filtration: Option<u32>) -> CompareReport {
    let min_row = 2 * filtration.unwrap_or(0) as i64;
    let mut cells = Vec::new();
    for n in 0..=page.max_dim {
        let mut group = PGroup::trivial(page.p);
        let mut labels = Vec::new();
        for (&(k, dim), cell) in &page.cells {
            if dim - k as i64 == n && dim >= min_row {
                group = group.direct_sum(&cell.group);
                labels.extend(cell.labels.iter().cloned());
            }
        }
        let want = oracle.group(&page.deg, n);
        cells.push(CellReport {
            deg: page.deg.clone(),
            dim: n,
            pass: group == want,
            page: group,
            oracle: want,
            labels,
        });
    }
    let pass = cells.iter().all(|c| c.pass);
    CompareReport { cells, pass }
}
