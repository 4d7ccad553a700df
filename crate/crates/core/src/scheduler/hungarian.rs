//! Rectangular min-cost assignment (Hungarian algorithm, shortest augmenting
//! paths with potentials).
//!
//! Rows are matched to distinct columns; `None` marks a missing edge. Runs in
//! O(n²·m) for n rows and m ≥ n columns. Costs may be negative.

/// Result of a left-perfect matching.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Column matched to each row.
    pub row_to_col: Vec<usize>,
    /// Sum of the matched edge costs.
    pub total: f64,
}

/// Minimum-cost matching covering every row.
///
/// Returns `None` if some row cannot be matched (no perfect matching on the
/// left exists). Ties resolve toward lower column indices as rows are added
/// in order, so the result is deterministic for a given matrix.
pub fn min_cost_matching(cost: &[Vec<Option<f64>>], cols: usize) -> Option<Matching> {
    let n = cost.len();
    if n == 0 {
        return Some(Matching {
            row_to_col: Vec::new(),
            total: 0.0,
        });
    }
    if n > cols {
        return None;
    }
    let m = cols;
    // 1-based; index 0 is the sentinel column/row.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let row = &cost[i0 - 1];
            let mut delta = f64::INFINITY;
            let mut j1 = usize::MAX;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                if let Some(c) = row[j - 1] {
                    let cur = c - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if j1 == usize::MAX {
                return None;
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=m {
        if owner[j] != 0 {
            row_to_col[owner[j] - 1] = j - 1;
        }
    }
    let total = row_to_col
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j].expect("matched along an existing edge"))
        .sum();
    Some(Matching { row_to_col, total })
}
