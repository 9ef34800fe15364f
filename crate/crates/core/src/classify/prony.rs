//! Exponential-polynomial analysis of sampled sequences:
//! u(k) = sum_j P_j(k) z_j^k with polynomial amplitudes.

use crate::linalg::{gauss_newton, lstsq, null_vector, singular_values, CMat, CVec};
use crate::poly;
use crate::scalar::{C64, ZERO};

/// Largest model order considered.
const MAX_ORDER: usize = 9;
/// Singular values below this fraction of the largest count as zero.
const RANK_TOL: f64 = 1e-11;
/// Roots closer than this (relative) belong to one cluster.
const CLUSTER_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    pub root: C64,
    pub multiplicity: usize,
}

fn hankel(u: &[C64], cols: usize) -> CMat {
    let rows = u.len() + 1 - cols;
    CMat::from_fn(rows, cols, |i, j| u[i + j])
}

/// Numerical order of the sequence.
fn order(u: &[C64]) -> usize {
    let cols = (MAX_ORDER + 1).min(u.len() / 2);
    let sv = singular_values(&hankel(u, cols));
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > RANK_TOL * top).count().min(cols - 1)
}

fn cluster(roots: Vec<C64>) -> Vec<Mode> {
    let mut groups: Vec<Vec<C64>> = vec![];
    for z in roots {
        match groups.iter_mut().find(|g| {
            let centre: C64 = g.iter().sum::<C64>() / g.len() as f64;
            (centre - z).norm() <= CLUSTER_TOL * centre.norm().max(1.0)
        }) {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    groups.into_iter().map(|g| Mode { root: g.iter().sum::<C64>() / g.len() as f64, multiplicity: g.len() }).collect()
}

/// Basis value k^m z^k and its z-derivative.
fn basis(k: i32, m: usize, z: C64) -> (C64, C64) {
    let km = C64::new((k as f64).powi(m as i32), 0.0);
    let zk = z.powi(k);
    let dz = if k == 0 { ZERO } else { C64::new(k as f64, 0.0) * z.powi(k - 1) };
    (km * zk, km * dz)
}

/// Linear amplitudes for fixed modes.
fn amplitudes(ks: &[i32], u: &[C64], modes: &[Mode]) -> Vec<C64> {
    let ncols: usize = modes.iter().map(|m| m.multiplicity).sum();
    let mut a = CMat::zeros(ks.len(), ncols);
    for (row, &k) in ks.iter().enumerate() {
        let mut col = 0;
        for md in modes {
            for m in 0..md.multiplicity {
                a[(row, col)] = basis(k, m, md.root).0;
                col += 1;
            }
        }
    }
    lstsq(&a, &CVec::from_column_slice(u), 1e-14).iter().copied().collect()
}

/// Polishes the roots by joint least squares on roots and amplitudes.
fn refine(ks: &[i32], u: &[C64], modes: Vec<Mode>) -> Vec<Mode> {
    let nm = modes.len();
    let mut p0: Vec<C64> = modes.iter().map(|m| m.root).collect();
    p0.extend(amplitudes(ks, u, &modes));
    let mults: Vec<usize> = modes.iter().map(|m| m.multiplicity).collect();
    let scale = u.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let model = |p: &[C64]| -> (CVec, CMat) {
        let mut r = CVec::zeros(ks.len());
        let mut jac = CMat::zeros(ks.len(), p.len());
        for (row, &k) in ks.iter().enumerate() {
            let mut acc = -u[row];
            let mut col = nm;
            for (j, &mult) in mults.iter().enumerate() {
                for m in 0..mult {
                    let (b, db) = basis(k, m, p[j]);
                    acc += p[col] * b;
                    jac[(row, j)] += p[col] * db / scale;
                    jac[(row, col)] = b / scale;
                    col += 1;
                }
            }
            r[row] = acc / scale;
        }
        (r, jac)
    };
    let fit = gauss_newton(&p0, model, 40, 1e-15);
    modes.into_iter().zip(&fit.params).map(|(m, z)| Mode { root: *z, multiplicity: m.multiplicity }).collect()
}

/// Distinct nonzero roots of the sequence sampled at the integer points `ks`
/// (consecutive), with multiplicities.
pub fn modes(ks: &[i32], u: &[C64]) -> Vec<Mode> {
    let r = order(u);
    if r == 0 {
        return vec![];
    }
    let null = null_vector(&hankel(u, r + 1));
    let coeffs: Vec<C64> = null.iter().copied().collect();
    let roots: Vec<C64> = poly::roots(&coeffs).into_iter().filter(|z| z.norm() > 1e-12 && z.is_finite()).collect();
    let found = cluster(roots);
    let refined = refine(ks, u, found);
    refined.into_iter().filter(|m| m.root.is_finite() && m.root != ZERO).collect()
}

/// Root of a mode whose logarithm is taken on the principal branch.
pub fn log_root(z: C64, step: f64) -> C64 {
    z.ln() / step
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn sample(f: impl Fn(f64) -> C64) -> (Vec<i32>, Vec<C64>) {
        let ks: Vec<i32> = (-7..=8).collect();
        let u = ks.iter().map(|&k| f(k as f64)).collect();
        (ks, u)
    }

    #[test]
    fn separates_two_exponentials() {
        let (b1, b2) = (c(0.3, 0.1), c(-0.2, 0.4));
        let (ks, u) = sample(|k| (b1 * k).exp() * 2.0 - (b2 * k).exp() * c(0.5, 1.0));
        let mut got: Vec<C64> = modes(&ks, &u).iter().map(|m| log_root(m.root, 1.0)).collect();
        got.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((got[0] - b2).norm() < 1e-9 && (got[1] - b1).norm() < 1e-9, "{got:?}");
    }

    #[test]
    fn triple_root_from_quadratic_amplitude() {
        let (b, e) = (c(0.25, -0.3), c(-0.4, 0.0));
        let (ks, u) = sample(|k| (b * k).exp() * (1.0 + 0.5 * k + 0.2 * k * k) + (e * k).exp());
        let ms = modes(&ks, &u);
        assert_eq!(ms.len(), 2, "{ms:?}");
        let triple = ms.iter().find(|m| m.multiplicity == 3).expect("triple mode");
        assert!((log_root(triple.root, 1.0) - b).norm() < 1e-9);
    }
}
