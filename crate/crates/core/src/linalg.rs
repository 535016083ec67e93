//! Dense exact linear algebra over `Q`: row reduction, rank, particular
//! solutions and kernels. Matrices are row-major `Vec<Vec<Rational>>`.

use num_traits::{One, Zero};

use crate::algebra::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (v, p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut work = m.clone();
    rref(&mut work, cols).len()
}

/// Some `x` with `a·x = b`, free variables set to zero, or `None`.
pub fn solve(a: &Matrix, cols: usize, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.len(), b.len());
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// A basis of `{x : a·x = 0}`.
pub fn kernel(a: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut work = a.clone();
    let pivots = rref(&mut work, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -work[r][f].clone();
            }
            v
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(Rational::zero(), |acc, (u, v)| acc + u * v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|v| int(*v)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ker = kernel(&a, 3);
        assert_eq!(ker.len(), 1);
        assert!(mat_vec(&a, &ker[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, 2, &[int(3), int(1)]).unwrap();
        assert_eq!(x, vec![int(2), int(1)]);
        let singular = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&singular, 2, &[int(1), int(3)]).is_none());
        assert!(solve(&zeros(0, 2), 2, &[]).is_some());
    }
}
