//! Roots of complex polynomials (Aberth iteration with a Newton polish).

use crate::scalar::{C64, ZERO};

/// Evaluates `coeffs[0] + coeffs[1] z + ...` and its derivative.
fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of the polynomial with coefficients in ascending order.
/// Leading zero coefficients are dropped.
pub fn roots(coeffs: &[C64]) -> Vec<C64> {
    let mut cs = coeffs.to_vec();
    while cs.last().is_some_and(|z| *z == ZERO) {
        cs.pop();
    }
    let n = cs.len().saturating_sub(1);
    if n == 0 {
        return vec![];
    }
    let lead = cs[n];
    let monic: Vec<C64> = cs.iter().map(|z| z / lead).collect();
    if n == 1 {
        return vec![-monic[0]];
    }
    // Cauchy bound for the starting circle.
    let radius = 1.0 + monic[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let r0 = radius.min(1e6) * 0.5;
    let mut z: Vec<C64> =
        (0..n).map(|k| C64::from_polar(r0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4)).collect();
    for _ in 0..500 {
        let mut moved = 0f64;
        for i in 0..n {
            let (p, dp) = horner(&monic, z[i]);
            if p == ZERO {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&monic, *zi);
            if dp == ZERO {
                break;
            }
            let step = p / dp;
            if step.is_finite() && step.norm() < 1e-6 * zi.norm().max(1.0) {
                *zi -= step;
            }
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    z
}

/// Roots of `a z^3 + b z^2 + c z + d`.
pub fn cubic(a: C64, b: C64, c: C64, d: C64) -> Vec<C64> {
    roots(&[d, c, b, a])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, re};

    #[test]
    fn cubic_of_known_roots() {
        let r = [c(1.0, 2.0), c(-0.5, 0.0), c(3.0, -1.0)];
        // (z - r0)(z - r1)(z - r2)
        let e1 = r[0] + r[1] + r[2];
        let e2 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
        let e3 = r[0] * r[1] * r[2];
        let got = cubic(re(1.0), -e1, e2, -e3);
        for want in r {
            assert!(got.iter().any(|g| (g - want).norm() < 1e-12), "{got:?}");
        }
    }

    #[test]
    fn real_root_example() {
        // d^3 - d^2 + 1 = 0 has a real root near -0.75488.
        let got = cubic(re(1.0), re(-1.0), re(0.0), re(1.0));
        assert!(got.iter().any(|z| (z - re(-0.754877666)).norm() < 1e-8));
        for z in got {
            assert!((z * z * z - z * z + 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn higher_degree() {
        // z^6 - 1
        let mut cs = vec![re(-1.0)];
        cs.extend(std::iter::repeat_n(ZERO, 5));
        cs.push(re(1.0));
        let got = roots(&cs);
        assert_eq!(got.len(), 6);
        for z in got {
            assert!((z.powu(6) - 1.0).norm() < 1e-13);
        }
    }
}
