//! Small dense kernels: Jacobi singular values and symmetric eigenvalues.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Singular values of `a` in descending order, by one-sided (Hestenes) Jacobi
/// orthogonalisation of the columns.
pub fn singular_values(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let mut work = if a.nrows() >= a.ncols() {
        a.clone()
    } else {
        a.transpose()
    };
    let n = work.ncols();
    let eps = f64::EPSILON;
    let mut converged = false;
    let mut last_off = 0.0_f64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        last_off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let cp = work.column(p);
                    let cq = work.column(q);
                    (cp.norm_squared(), cq.norm_squared(), cp.dot(&cq))
                };
                if gamma == 0.0 {
                    continue;
                }
                let scale = (alpha * beta).sqrt();
                let off = gamma.abs() / scale;
                last_off = last_off.max(off);
                if off <= eps {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..work.nrows() {
                    let up = work[(i, p)];
                    let uq = work[(i, q)];
                    work[(i, p)] = c * up - s * uq;
                    work[(i, q)] = s * up + c * uq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            what: "jacobi singular values",
            iterations: MAX_SWEEPS,
            residual: last_off,
        });
    }
    let mut values: Vec<f64> = (0..n).map(|j| work.column(j).norm()).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Eigenvalues of the symmetric part `(a + aᵀ)/2`, ascending, by cyclic Jacobi.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let n = a.nrows();
    let mut s = (a + a.transpose()) * 0.5;
    let mut converged = n <= 1;
    let mut off = 0.0;
    for _ in 0..MAX_SWEEPS {
        off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += s[(p, q)] * s[(p, q)];
            }
        }
        let total: f64 = s.iter().map(|v| v * v).sum();
        if off <= 1e-32 * total.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = s[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (s[(q, q)] - s[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let skp = s[(k, p)];
                    let skq = s[(k, q)];
                    s[(k, p)] = c * skp - sn * skq;
                    s[(k, q)] = sn * skp + c * skq;
                }
                for k in 0..n {
                    let spk = s[(p, k)];
                    let sqk = s[(q, k)];
                    s[(p, k)] = c * spk - sn * sqk;
                    s[(q, k)] = sn * spk + c * sqk;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            what: "jacobi eigenvalues",
            iterations: MAX_SWEEPS,
            residual: off.sqrt(),
        });
    }
    let mut values: Vec<f64> = (0..n).map(|i| s[(i, i)]).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn distance_squared(a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            found: a.len(),
        });
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum())
}

pub fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_singular_values() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -5.0, 1.0]));
        let s = singular_values(&a).unwrap();
        assert_eq!(s.len(), 3);
        for (got, want) in s.iter().zip([5.0, 3.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn wide_matrix_uses_transpose() {
        let a = DMatrix::from_row_slice(1, 2, &[3.0, 4.0]);
        let s = singular_values(&a).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_rotation_block() {
        // [[1, 1], [-1, 1]] is sqrt(2) times a rotation.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0]);
        let s = singular_values(&a).unwrap();
        for v in s {
            assert!((v - 2f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_part_of_skew_plus_identity() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 7.0, -7.0, 2.0]);
        let e = symmetric_eigenvalues(&a).unwrap();
        assert!((e[0] - 2.0).abs() < 1e-14 && (e[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_eigenvalues_known() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = symmetric_eigenvalues(&a).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn distance_examples() {
        let z = DVector::from_vec(vec![0.0, 0.0]);
        assert_eq!(distance_squared(&z, &z).unwrap(), 0.0);
        assert_eq!(distance_squared(&DVector::from_vec(vec![1.0, 0.0]), &z).unwrap(), 1.0);
        assert_eq!(distance_squared(&DVector::from_vec(vec![3.0, 4.0]), &z).unwrap(), 25.0);
        assert!(matches!(
            distance_squared(&DVector::from_vec(vec![1.0]), &z),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
