//! Dense complex least squares on top of nalgebra.

use crate::scalar::{C64, ZERO};
use nalgebra::{DMatrix, DVector};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Minimum-norm least-squares solution via SVD. Singular values below
/// `rcond * sigma_max` are treated as zero.
pub fn lstsq(a: &CMat, b: &CVec, rcond: f64) -> CVec {
    if a.ncols() == 0 {
        return CVec::zeros(0);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = (rcond * smax).max(f64::MIN_POSITIVE);
    svd.solve(b, eps).unwrap_or_else(|_| CVec::zeros(a.ncols()))
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().cloned().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Right singular vector of the smallest singular value.
pub fn null_vector(a: &CMat) -> CVec {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    v_t.row(k).adjoint()
}

pub fn norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Outcome of [`gauss_newton`].
#[derive(Clone, Debug)]
pub struct Fit {
    pub params: Vec<C64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Damped Gauss-Newton for holomorphic residuals r(p) in C^m.
/// `model` returns the residual vector and its Jacobian.
pub fn gauss_newton(p0: &[C64], mut model: impl FnMut(&[C64]) -> (CVec, CMat), max_iter: usize, tol: f64) -> Fit {
    let mut p = p0.to_vec();
    let (mut r, mut j) = model(&p);
    let mut cost = norm(&r);
    let mut damping = 1e-6;
    let mut iterations = 0;
    while iterations < max_iter && cost > tol {
        iterations += 1;
        let n = p.len();
        let jh = j.adjoint();
        let normal = &jh * &j;
        let rhs = -(&jh * &r);
        let mut improved = false;
        for _ in 0..12 {
            let mut m = normal.clone();
            let diag_scale = (0..n).map(|i| normal[(i, i)].re).fold(0.0, f64::max).max(1e-300);
            for i in 0..n {
                m[(i, i)] += C64::new(damping * diag_scale, 0.0);
            }
            let step = lstsq(&m, &rhs, 1e-15);
            let trial: Vec<C64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let (rt, jt) = model(&trial);
            let ct = norm(&rt);
            if ct.is_finite() && ct < cost {
                p = trial;
                r = rt;
                j = jt;
                let gain = cost / ct.max(1e-300);
                cost = ct;
                damping = (damping / if gain > 2.0 { 10.0 } else { 2.0 }).max(1e-15);
                improved = true;
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Fit { params: p, residual_norm: cost, iterations }
}

pub fn column(values: &[C64]) -> CVec {
    CVec::from_column_slice(values)
}

pub fn zeros(m: usize, n: usize) -> CMat {
    CMat::from_element(m, n, ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, re};

    #[test]
    fn solves_overdetermined() {
        let a = CMat::from_row_slice(3, 2, &[re(1.0), re(0.0), re(0.0), re(1.0), re(1.0), re(1.0)]);
        let x = CVec::from_column_slice(&[c(1.0, 1.0), c(2.0, -1.0)]);
        let b = &a * &x;
        let got = lstsq(&a, &b, 1e-14);
        assert!((got - x).norm() < 1e-12);
    }

    #[test]
    fn gauss_newton_quadratic() {
        // r(p) = p^2 - (1+2i)^2 has root 1+2i near the start.
        let target = c(1.0, 2.0) * c(1.0, 2.0);
        let fit = gauss_newton(
            &[c(0.8, 1.7)],
            |p| {
                let r = CVec::from_column_slice(&[p[0] * p[0] - target]);
                let j = CMat::from_row_slice(1, 1, &[p[0] * 2.0]);
                (r, j)
            },
            50,
            1e-14,
        );
        assert!((fit.params[0] - c(1.0, 2.0)).norm() < 1e-10);
    }
}
