//! Dense square solver for the small normal-equation systems of the
//! predictor fit (at most 11 unknowns).

use num_traits::Float;

/// Solves `a * x = b` for a row-major `n x n` matrix by Gaussian
/// elimination with partial pivoting. Returns `None` when a pivot's
/// magnitude falls below `pivot_tol`. `a` and `b` are used as scratch.
pub fn solve_in_place<T: Float>(a: &mut [T], b: &mut [T], n: usize, pivot_tol: T) -> Option<Vec<T>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col]
                    .abs()
                    .partial_cmp(&a[j * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty pivot search");
        let pivot = a[pivot_row * n + col];
        if pivot.is_nan() || pivot.abs() < pivot_tol {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == T::zero() {
                continue;
            }
            a[row * n + col] = T::zero();
            for k in col + 1..n {
                a[row * n + k] = a[row * n + k] - factor * a[col * n + k];
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc = acc - a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

pub fn solve<T: Float>(a: &[T], b: &[T], n: usize, pivot_tol: T) -> Option<Vec<T>> {
    solve_in_place(&mut a.to_vec(), &mut b.to_vec(), n, pivot_tol)
}
