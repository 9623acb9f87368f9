//! Exact linear algebra over `Q` and `Z`.

use num_rational::Ratio;
use num_traits::{One, Zero};

pub(crate) type Q = Ratio<i64>;

/// Basis of the right nullspace of `a` (rows of equal length `cols`),
/// computed from the reduced row echelon form. One vector per free column,
/// in increasing column order.
pub(crate) fn nullspace(mut a: Vec<Vec<Q>>, cols: usize) -> Vec<Vec<Q>> {
    let pivots = rref(&mut a, cols);
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[row][free];
        }
        basis.push(v);
    }
    basis
}

/// In-place reduced row echelon form. Returns the pivot column of each
/// leading row.
fn rref(a: &mut [Vec<Q>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= inv;
        }
        let pivot_row = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let f = other[col];
                for (x, &y) in other.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub(crate) fn integer_rank(mut a: Vec<Vec<i128>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    let mut prev = 1i128;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let piv = a[rank][col];
        let (top, bottom) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom {
            let f = row[col];
            for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = (piv * *x - f * y) / prev;
            }
        }
        prev = piv;
        rank += 1;
    }
    rank
}
