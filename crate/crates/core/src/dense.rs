use crate::banded::{Scalar, ONE, ZERO};

/// Determinant of a small dense matrix by Gaussian elimination with partial
/// pivoting. The input is consumed as scratch space.
pub(crate) fn determinant(mut m: Vec<Vec<Scalar>>) -> Scalar {
    let n = m.len();
    let mut det = ONE;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap_or(col);
        if m[pivot_row][col] == ZERO {
            return ZERO;
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        let pivot = m[col][col];
        det *= pivot;
        for row in col + 1..n {
            let factor = m[row][col] / pivot;
            if factor == ZERO {
                continue;
            }
            for k in col..n {
                let sub = factor * m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn two_by_two() {
        let (a, b, c, d) = (
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(3.0, -1.0),
            Complex64::new(0.25, 4.0),
        );
        let det = determinant(vec![vec![a, b], vec![c, d]]);
        assert!((det - (a * d - b * c)).norm() < 1e-14);
    }

    #[test]
    fn singular_is_zero() {
        let r = vec![ONE, ONE];
        assert_eq!(determinant(vec![r.clone(), r]), ZERO);
    }
}
