//! Dense reference computations, written independently of the library.
#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64 as C64;
use toda_darboux::Banded;

pub type Dense = Vec<Vec<C64>>;

pub fn dense(m: &dyn Banded) -> Dense {
    let n = m.n();
    (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Leading `m x m` block.
pub fn leading(a: &Dense, m: usize) -> Dense {
    a[..m].iter().map(|r| r[..m].to_vec()).collect()
}

/// Embeds a square matrix in a larger zero-padded one.
pub fn pad(a: &Dense, n: usize) -> Dense {
    let mut out = vec![vec![C64::new(0.0, 0.0); n]; n];
    for (i, r) in a.iter().enumerate() {
        out[i][..r.len()].copy_from_slice(r);
    }
    out
}

pub fn max_diff(a: &Dense, b: &Dense, m: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

/// Determinant by Gaussian elimination with complete pivoting.
pub fn det(mut a: Dense) -> C64 {
    let n = a.len();
    let mut d = C64::new(1.0, 0.0);
    for c in 0..n {
        let (mut pr, mut pc, mut best) = (c, c, -1.0);
        for (r, row) in a.iter().enumerate().skip(c) {
            for (k, v) in row.iter().enumerate().skip(c) {
                if v.norm() > best {
                    best = v.norm();
                    pr = r;
                    pc = k;
                }
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pr != c {
            a.swap(pr, c);
            d = -d;
        }
        if pc != c {
            for row in a.iter_mut() {
                row.swap(pc, c);
            }
            d = -d;
        }
        let piv = a[c][c];
        d *= piv;
        for r in c + 1..n {
            let f = a[r][c] / piv;
            for k in c..n {
                let s = f * a[c][k];
                a[r][k] -= s;
            }
        }
    }
    d
}

/// Determinant by cofactor expansion along the first row; small sizes only.
pub fn det_laplace(a: &Dense) -> C64 {
    let n = a.len();
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    if n == 1 {
        return a[0][0];
    }
    let mut acc = C64::new(0.0, 0.0);
    for c in 0..n {
        if a[0][c] == C64::new(0.0, 0.0) {
            continue;
        }
        let minor: Dense = a[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, v)| *v).collect())
            .collect();
        let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
        acc += a[0][c] * det_laplace(&minor) * sign;
    }
    acc
}

/// Doolittle LU without pivoting: unit lower `l` and upper `u`.
pub fn doolittle(a: &Dense) -> (Dense, Dense) {
    let n = a.len();
    let zero = C64::new(0.0, 0.0);
    let mut l = vec![vec![zero; n]; n];
    let mut u = vec![vec![zero; n]; n];
    for i in 0..n {
        for k in i..n {
            let s: C64 = (0..i).map(|j| l[i][j] * u[j][k]).sum();
            u[i][k] = a[i][k] - s;
        }
        l[i][i] = C64::new(1.0, 0.0);
        for k in i + 1..n {
            let s: C64 = (0..i).map(|j| l[k][j] * u[j][i]).sum();
            l[k][i] = (a[k][i] - s) / u[i][i];
        }
    }
    (l, u)
}

/// `J - c I` as a dense matrix.
pub fn shifted(m: &dyn Banded, c: C64) -> Dense {
    let mut d = dense(m);
    for (i, row) in d.iter_mut().enumerate() {
        row[i] -= c;
    }
    d
}
