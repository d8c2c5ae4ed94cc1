//! Exact Gaussian elimination over the rationals for small dense systems.
//!
//! Systems here are tiny (at most ~15 unknowns), so exactness beats speed.
//! Pivots are chosen by minimal numerator-plus-denominator bit length to
//! keep intermediate fractions small.

use num_traits::Zero;

use crate::rational::{bit_length, Rational};

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    /// The unique exact solution.
    Unique(Vec<Rational>),
    /// Equations are inconsistent; `row` indexes the first failing input row.
    Inconsistent { row: usize },
    /// Fewer independent equations than unknowns.
    Underdetermined,
}

/// Solve the (typically overdetermined) system `rows * x = rhs` exactly.
pub fn solve_exact(rows: &[Vec<Rational>], rhs: &[Rational]) -> SolveOutcome {
    assert_eq!(rows.len(), rhs.len());
    let m = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 {
        // No unknowns: consistent iff every rhs vanishes.
        return match rhs.iter().position(|v| !v.is_zero()) {
            Some(row) => SolveOutcome::Inconsistent { row },
            None => SolveOutcome::Unique(Vec::new()),
        };
    }
    // Augmented working copy with original row indices.
    let mut work: Vec<(usize, Vec<Rational>)> = rows
        .iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (r, b))| {
            assert_eq!(r.len(), cols, "ragged row");
            let mut row = r.clone();
            row.push(b.clone());
            (i, row)
        })
        .collect();

    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        // smallest-bit-length nonzero pivot among the remaining rows
        let pivot = work[rank..]
            .iter()
            .enumerate()
            .filter(|(_, (_, row))| !row[col].is_zero())
            .min_by_key(|(_, (_, row))| bit_length(&row[col]))
            .map(|(offset, _)| rank + offset);
        let Some(p) = pivot else {
            return SolveOutcome::Underdetermined;
        };
        work.swap(rank, p);
        let inv = work[rank].1[col].recip();
        for v in work[rank].1.iter_mut() {
            *v *= &inv;
        }
        let pivot_row = work[rank].1.clone();
        for (j, (_, row)) in work.iter_mut().enumerate() {
            if j == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &factor * pv;
            }
        }
        pivot_of_col[col] = rank;
        rank += 1;
        if rank == m && col + 1 < cols {
            return SolveOutcome::Underdetermined;
        }
    }
    // Any leftover row must have vanished entirely.
    for (orig, row) in &work[rank..] {
        if !row[cols].is_zero() {
            return SolveOutcome::Inconsistent { row: *orig };
        }
    }
    let mut x = vec![Rational::zero(); cols];
    for (col, &r) in pivot_of_col.iter().enumerate() {
        x[col] = work[r].1[cols].clone();
    }
    SolveOutcome::Unique(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn solves_a_small_system() {
        // x + 2y = 5, 3x - y = 1  =>  x = 1, y = 2
        let rows = vec![vec![rat(1), rat(2)], vec![rat(3), rat(-1)]];
        let rhs = vec![rat(5), rat(1)];
        match solve_exact(&rows, &rhs) {
            SolveOutcome::Unique(x) => assert_eq!(x, vec![rat(1), rat(2)]),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn detects_inconsistency_with_row_index() {
        let rows = vec![vec![rat(1)], vec![rat(2)], vec![rat(1)]];
        let rhs = vec![ratio(1, 3), ratio(2, 3), rat(1)];
        match solve_exact(&rows, &rhs) {
            SolveOutcome::Inconsistent { row } => assert_eq!(row, 2),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn detects_underdetermined_systems() {
        let rows = vec![vec![rat(1), rat(1)], vec![rat(2), rat(2)]];
        let rhs = vec![rat(3), rat(6)];
        assert!(matches!(
            solve_exact(&rows, &rhs),
            SolveOutcome::Underdetermined
        ));
    }

    #[test]
    fn empty_basis_consistency() {
        match solve_exact(&[vec![], vec![]], &[rat(0), rat(1)]) {
            SolveOutcome::Inconsistent { row } => assert_eq!(row, 1),
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
