//! Least squares through Householder QR.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Minimizes `sum_i w_i (y_i - a_i . beta)^2` over `beta`.
///
/// Rows are scaled by `sqrt(w_i)` and the scaled system is reduced by Householder
/// reflections; rank deficiency is reported rather than regularized away.
pub fn weighted_least_squares<T: Scalar>(
    design: &Matrix<T>,
    y: &[T],
    weights: Option<&[T]>,
) -> Result<Vec<T>> {
    let (m, k) = (design.nrows(), design.ncols());
    if y.len() != m || weights.is_some_and(|w| w.len() != m) {
        return Err(Error::Shape {
            expected: format!("{m} responses and weights"),
            actual: format!("{} responses", y.len()),
        });
    }
    if m < k {
        return Err(Error::SingularFit(format!(
            "{m} observations for {k} coefficients"
        )));
    }
    // Column-major working copy of the scaled system.
    let mut a: Vec<Vec<T>> = (0..k).map(|c| design.column(c)).collect();
    let mut b = y.to_vec();
    if let Some(w) = weights {
        for (i, &wi) in w.iter().enumerate() {
            if wi < T::zero() || !wi.is_finite() {
                return Err(Error::InvalidArgument(format!("weight {wi} at row {i}")));
            }
            let s = wi.sqrt();
            b[i] = b[i] * s;
            for col in a.iter_mut() {
                col[i] = col[i] * s;
            }
        }
    }

    let mut diag = Vec::with_capacity(k);
    for c in 0..k {
        let norm = a[c][c..].iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
        if norm == T::zero() {
            diag.push(T::zero());
            continue;
        }
        let alpha = if a[c][c] > T::zero() { -norm } else { norm };
        // v = x - alpha e1, stored in place of the column.
        let mut v: Vec<T> = a[c][c..].to_vec();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |acc, &t| acc + t * t);
        diag.push(alpha);
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::one() + T::one();
        for col in a.iter_mut().skip(c + 1) {
            let dot = v
                .iter()
                .zip(&col[c..])
                .fold(T::zero(), |acc, (&vi, &ci)| acc + vi * ci);
            let f = two * dot / vnorm2;
            for (ci, &vi) in col[c..].iter_mut().zip(&v) {
                *ci = *ci - f * vi;
            }
        }
        let dot = v
            .iter()
            .zip(&b[c..])
            .fold(T::zero(), |acc, (&vi, &bi)| acc + vi * bi);
        let f = two * dot / vnorm2;
        for (bi, &vi) in b[c..].iter_mut().zip(&v) {
            *bi = *bi - f * vi;
        }
    }

    let scale = diag.iter().fold(T::zero(), |acc, d| acc.max(d.abs()));
    let tol = scale * T::epsilon() * T::of_usize(100 * m.max(k));
    if let Some(c) = diag.iter().position(|d| d.abs() <= tol) {
        return Err(Error::SingularFit(format!(
            "design column {c} is linearly dependent"
        )));
    }

    let mut beta = vec![T::zero(); k];
    for c in (0..k).rev() {
        let mut s = b[c];
        for (r, &br) in beta.iter().enumerate().skip(c + 1) {
            s = s - a[r][c] * br;
        }
        beta[c] = s / diag[c];
    }
    Ok(beta)
}
