//! Pivot-free LU factorization of a shifted Hessenberg matrix and the
//! characteristic-polynomial route to its pivots.

use serde::{Deserialize, Serialize};

use crate::banded::{Banded, BandedHessenberg, Bidiagonal, Scalar, UnitLowerBanded, ONE, ZERO};
use crate::error::{Error, Result};

/// Default pivot threshold, relative to the largest entry modulus of `J - C I`.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-12;

/// A Hessenberg matrix together with the shift `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedProblem {
    pub j: BandedHessenberg,
    #[serde(with = "crate::json::scalar")]
    pub shift: Scalar,
}

impl ShiftedProblem {
    pub fn new(j: BandedHessenberg, shift: Scalar) -> Self {
        ShiftedProblem { j, shift }
    }

    fn shifted(&self, i: usize, k: usize) -> Scalar {
        let v = self.j.get(i, k);
        if i == k {
            v - self.shift
        } else {
            v
        }
    }

    /// Absolute pivot threshold for the relative tolerance `rel`.
    pub fn pivot_threshold(&self, rel: f64) -> f64 {
        let scale = self
            .j
            .entries()
            .map(|((i, k), v)| if i == k { (v - self.shift).norm() } else { v.norm() })
            .fold(0.0f64, f64::max);
        rel * scale.max(f64::MIN_POSITIVE)
    }
}

/// Values `P_0(C), ..., P_m(C)` of the polynomials attached to `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySequence(Vec<Scalar>);

impl PolySequence {
    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    /// `P_k`, with `P_k = 0` for negative `k`.
    pub fn get(&self, k: isize) -> Scalar {
        if k < 0 {
            ZERO
        } else {
            self.0[k as usize]
        }
    }
}

/// `J - C I = L U` with `L` unit lower (`p` bands) and `U` upper bidiagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuFactors {
    pub l: UnitLowerBanded,
    pub u: Bidiagonal,
}

/// Column-by-column Doolittle elimination specialised to the band shape.
///
/// With `U` upper bidiagonal and a unit superdiagonal, entry `(i, k)` of
/// `L U` is `l[i][k] u[k] + l[i][k-1]`, which gives every unknown in turn.
pub fn lu_factorize(prob: &ShiftedProblem, rel_tol: f64) -> Result<LuFactors> {
    let j = &prob.j;
    let (n, p) = (j.n(), j.p());
    let threshold = prob.pivot_threshold(rel_tol);
    // l_cols[k][d - 1] = l[k + d][k]
    let mut l_cols: Vec<Vec<Scalar>> = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let l_at = |cols: &Vec<Vec<Scalar>>, i: usize, k: usize| -> Scalar {
        if i == k {
            ONE
        } else {
            cols[k][i - k - 1]
        }
    };
    for k in 0..n {
        let left = if k > 0 { l_at(&l_cols, k, k - 1) } else { ZERO };
        let pivot = prob.shifted(k, k) - left;
        if pivot.norm() <= threshold || !pivot.norm().is_finite() {
            return Err(Error::SingularLeadingMinor {
                minor: k + 1,
                modulus: pivot.norm(),
            });
        }
        u.push(pivot);
        let mut col = Vec::with_capacity(p);
        for i in k + 1..(k + p + 1).min(n) {
            let left = if k > 0 && i - (k - 1) <= p {
                l_at(&l_cols, i, k - 1)
            } else {
                ZERO
            };
            col.push((prob.shifted(i, k) - left) / pivot);
        }
        l_cols.push(col);
    }
    let l = UnitLowerBanded::from_fn(p, n, |i, k| l_cols[k][i - k - 1])?;
    Ok(LuFactors {
        l,
        u: Bidiagonal::upper(u)?,
    })
}

/// Evaluates `P_0(C), ..., P_m(C)` through the three-term-like recurrence
/// `sum_{i=k-p}^{k-1} a[k][i] P_i + (a[k][k] - C) P_k + P_{k+1} = 0`.
///
/// `P_k(C)` equals `det(C I_k - J_k)`.
pub fn char_poly(prob: &ShiftedProblem, m: usize) -> Result<PolySequence> {
    let j = &prob.j;
    if m > j.n() {
        return Err(Error::Size(format!(
            "P_{m} needs rows 0..{m} but the matrix has {} rows",
            j.n()
        )));
    }
    let p = j.p();
    let mut vals = Vec::with_capacity(m + 1);
    vals.push(ONE);
    for k in 0..m {
        let mut next = -(j.get(k, k) - prob.shift) * vals[k];
        for i in k.saturating_sub(p)..k {
            next -= j.get(k, i) * vals[i];
        }
        vals.push(next);
    }
    Ok(PolySequence(vals))
}

/// The diagonal of `U` as ratios `-P_{k+1}(C) / P_k(C)`, `k < m`.
pub fn pivot_gammas(prob: &ShiftedProblem, m: usize, rel_tol: f64) -> Result<Vec<Scalar>> {
    let polys = char_poly(prob, m)?;
    let threshold = prob.pivot_threshold(rel_tol);
    let vals = polys.values();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let ratio = -vals[k + 1] / vals[k];
        if ratio.norm() <= threshold || !ratio.norm().is_finite() {
            return Err(Error::SingularLeadingMinor {
                minor: k + 1,
                modulus: ratio.norm(),
            });
        }
        out.push(ratio);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banded::{random_hessenberg, residual, multiply, SampleMode, Truncate, ValidWindow};
    use num_complex::Complex64;

    fn c(re: f64) -> Scalar {
        Complex64::new(re, 0.0)
    }

    fn two_by_two() -> ShiftedProblem {
        let j = BandedHessenberg::from_fn(1, 2, |i, k| match (i, k) {
            (0, 0) => c(2.0),
            (1, 0) => c(1.0),
            _ => c(3.0),
        })
        .unwrap();
        ShiftedProblem::new(j, c(0.0))
    }

    #[test]
    fn upper_bidiagonal_input_is_already_factored() {
        let d = [1.5, -2.0, 0.5, 3.0];
        let j = BandedHessenberg::from_fn(2, 4, |i, k| if i == k { c(d[i]) } else { c(0.0) }).unwrap();
        let f = lu_factorize(&ShiftedProblem::new(j.clone(), c(0.0)), DEFAULT_PIVOT_TOL).unwrap();
        assert!(f.l.band(1).iter().chain(f.l.band(2)).all(|v| *v == c(0.0)));
        assert_eq!(f.u.free(), &d.map(c));
        assert_eq!(residual(&f.u, &j, ValidWindow(4)), 0.0);
    }

    #[test]
    fn two_by_two_example() {
        let f = lu_factorize(&two_by_two(), DEFAULT_PIVOT_TOL).unwrap();
        assert_eq!(f.l.band(1), &[c(0.5)]);
        assert_eq!(f.u.free(), &[c(2.0), c(2.5)]);
    }

    #[test]
    fn char_poly_two_by_two() {
        let prob = two_by_two();
        assert_eq!(char_poly(&prob, 0).unwrap().values(), &[c(1.0)]);
        let vals = char_poly(&prob, 2).unwrap();
        assert_eq!(vals.values(), &[c(1.0), c(-2.0), c(5.0)]);
        assert_eq!(vals.get(-1), c(0.0));
        let g = pivot_gammas(&prob, 2, DEFAULT_PIVOT_TOL).unwrap();
        assert_eq!(g, vec![c(2.0), c(2.5)]);
    }

    #[test]
    fn gammas_of_upper_bidiagonal_are_the_diagonal() {
        let d = [1.0, -4.0, 2.5];
        let j = BandedHessenberg::from_fn(1, 3, |i, k| if i == k { c(d[i]) } else { c(0.0) }).unwrap();
        let g = pivot_gammas(&ShiftedProblem::new(j, c(0.0)), 3, DEFAULT_PIVOT_TOL).unwrap();
        assert_eq!(g, d.map(c).to_vec());
    }

    #[test]
    fn singular_minor_reported() {
        // det(J_2) = 1*1 - 1 = 0.
        let j = BandedHessenberg::from_fn(1, 3, |_, _| c(1.0)).unwrap();
        let prob = ShiftedProblem::new(j, c(0.0));
        assert!(matches!(
            lu_factorize(&prob, DEFAULT_PIVOT_TOL),
            Err(Error::SingularLeadingMinor { minor: 2, .. })
        ));
        assert!(matches!(
            pivot_gammas(&prob, 3, DEFAULT_PIVOT_TOL),
            Err(Error::SingularLeadingMinor { minor: 2, .. })
        ));
        assert!(char_poly(&prob, 4).is_err());
    }

    #[test]
    fn factors_reproduce_shifted_matrix() {
        let j = random_hessenberg(3, 10, 17, SampleMode::Complex).unwrap();
        let shift = Complex64::new(0.3, -0.2);
        let prob = ShiftedProblem::new(j.clone(), shift);
        let f = lu_factorize(&prob, DEFAULT_PIVOT_TOL).unwrap();
        let (prod, w) = multiply(&f.l, &f.u, ValidWindow(10), ValidWindow(10)).unwrap();
        assert_eq!(w, ValidWindow(10));
        assert!(residual(&prod, &prob.j.shifted(shift), w) < 1e-12);

        // Factoring a truncation gives the truncated factors.
        let small = lu_factorize(&ShiftedProblem::new(j.truncate(6).unwrap(), shift), DEFAULT_PIVOT_TOL).unwrap();
        assert_eq!(small.l, f.l.truncate(6).unwrap());
        assert_eq!(small.u, f.u.truncate(6).unwrap());
    }
}
