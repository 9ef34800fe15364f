//! Exact character enumeration and additive bases on finite tables.

use super::{AddForm, AdditiveFn, Character};
use crate::carrier::Carrier;
use crate::error::{Error, Result};
use crate::scalar::{C64, ZERO};
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use std::f64::consts::PI;

/// A character value on a finite semigroup: `None` is 0, `Some(q)` is
/// `exp(2 pi i q)` with `q` in [0, 1).
pub type Unit = Option<Rational64>;

pub fn unit_value(u: &Unit) -> C64 {
    match u {
        None => ZERO,
        Some(q) => {
            let t = *q.numer() as f64 / *q.denom() as f64;
            // Exact values on the axes keep tables free of 1e-17 noise.
            match (*q.numer() * 4) % *q.denom() {
                0 => match (*q.numer() * 4) / *q.denom() {
                    0 => C64::new(1.0, 0.0),
                    1 => C64::new(0.0, 1.0),
                    2 => C64::new(-1.0, 0.0),
                    _ => C64::new(0.0, -1.0),
                },
                _ => C64::new((2.0 * PI * t).cos(), (2.0 * PI * t).sin()),
            }
        }
    }
}

fn unit_mul(a: &Unit, b: &Unit) -> Unit {
    match (a, b) {
        (Some(p), Some(q)) => Some((p + q).fract()),
        _ => None,
    }
}

fn candidates(period: usize) -> Vec<Unit> {
    let mut v = vec![None];
    v.extend((0..period as i64).map(|j| Some(Rational64::new(j, period as i64))));
    v
}

fn consistent(table: &[Vec<usize>], vals: &[Unit], upto: usize) -> bool {
    for a in 0..=upto {
        for b in 0..=upto {
            let ab = table[a][b];
            if ab <= upto && unit_mul(&vals[a], &vals[b]) != vals[ab] {
                return false;
            }
        }
    }
    true
}

/// All multiplicative maps, zero included, in exact form.
pub fn enumerate_exact(carrier: &Carrier) -> Result<Vec<Vec<Unit>>> {
    let n = carrier.size().ok_or(Error::NotFinite)?;
    let table = carrier.table();
    let cands: Vec<Vec<Unit>> = (0..n).map(|x| candidates(carrier.index_period(x).1)).collect();
    let mut out = vec![];
    let mut vals: Vec<Unit> = vec![None; n];
    fn go(
        i: usize,
        n: usize,
        table: &[Vec<usize>],
        cands: &[Vec<Unit>],
        vals: &mut Vec<Unit>,
        out: &mut Vec<Vec<Unit>>,
    ) {
        if i == n {
            out.push(vals.clone());
            return;
        }
        for c in &cands[i] {
            vals[i] = *c;
            if consistent(table, vals, i) {
                go(i + 1, n, table, cands, vals, out);
            }
        }
    }
    go(0, n, table, &cands, &mut vals, &mut out);
    Ok(out)
}

/// The characters of a finite carrier, zero first.
pub fn enumerate_characters(carrier: &Carrier) -> Result<Vec<Character>> {
    Ok(enumerate_exact(carrier)?.into_iter().map(|v| Character::table(v.iter().map(unit_value).collect())).collect())
}

/// Brute force over every map S -> `values`; used to cross-check the
/// backtracking enumeration.
pub fn exhaustive_characters(carrier: &Carrier, values: &[Unit]) -> Result<Vec<Vec<Unit>>> {
    let n = carrier.size().ok_or(Error::NotFinite)?;
    let table = carrier.table();
    let k = values.len();
    let total = k.checked_pow(n as u32).ok_or_else(|| Error::Malformed("search too large".into()))?;
    let mut out = vec![];
    for code in 0..total {
        let mut rest = code;
        let vals: Vec<Unit> = (0..n)
            .map(|_| {
                let v = values[rest % k];
                rest /= k;
                v
            })
            .collect();
        if consistent(table, &vals, n - 1) {
            out.push(vals);
        }
    }
    Ok(out)
}

/// Nullspace of a(xy) - a(x) - a(y) = 0 over a finite domain.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveBasis {
    pub domain: Vec<usize>,
    pub vectors: Vec<Vec<Rational64>>,
}

impl AdditiveBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    pub fn functions(&self, n: usize) -> Vec<AdditiveFn> {
        self.vectors
            .iter()
            .map(|v| {
                let mut vals = vec![None; n];
                for (k, &x) in self.domain.iter().enumerate() {
                    vals[x] = Some(C64::new(*v[k].numer() as f64 / *v[k].denom() as f64, 0.0));
                }
                AdditiveFn { form: AddForm::Table(vals) }
            })
            .collect()
    }
}

/// Exact additive basis on `domain` (all elements when `None`).
pub fn additive_basis(carrier: &Carrier, domain: Option<&[usize]>) -> Result<AdditiveBasis> {
    let n = carrier.size().ok_or(Error::NotFinite)?;
    let domain: Vec<usize> = domain.map(<[usize]>::to_vec).unwrap_or_else(|| (0..n).collect());
    let table = carrier.table();
    let pos = |x: usize| domain.iter().position(|&d| d == x);
    let m = domain.len();
    let mut rows: Vec<Vec<Rational64>> = vec![];
    for &x in &domain {
        for &y in &domain {
            let xy = table[x][y];
            let k = pos(xy)
                .ok_or_else(|| Error::DomainNotClosed(carrier.labels()[x].clone(), carrier.labels()[y].clone()))?;
            let mut row = vec![Rational64::zero(); m];
            row[k] += Rational64::one();
            row[pos(x).unwrap_or(0)] -= Rational64::one();
            row[pos(y).unwrap_or(0)] -= Rational64::one();
            rows.push(row);
        }
    }
    let vectors = nullspace(rows, m);
    Ok(AdditiveBasis { domain, vectors })
}

/// Exact nullspace by reduced row echelon form.
fn nullspace(mut rows: Vec<Vec<Rational64>>, m: usize) -> Vec<Vec<Rational64>> {
    let mut pivots = vec![];
    let mut r = 0;
    for col in 0..m {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let lead = rows[r][col];
        for v in rows[r].iter_mut() {
            *v /= lead;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= *p * f;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational64::zero(); m];
            v[fc] = Rational64::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[i][fc];
            }
            v
        })
        .collect()
}

/// Least common multiple of all element periods; the value set
/// {0} u mu_lcm contains every candidate set.
pub fn period_lcm(carrier: &Carrier) -> Result<usize> {
    let n = carrier.size().ok_or(Error::NotFinite)?;
    Ok((0..n).map(|x| carrier.index_period(x).1).fold(1, |a, b| a.lcm(&b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Vec<Unit>>) -> Vec<Vec<Unit>> {
        v.sort();
        v
    }

    #[test]
    fn two_element_multiplication() {
        let c = Carrier::finite(vec!["0".into(), "1".into()], vec![vec![0, 0], vec![0, 1]]).unwrap();
        let chars = enumerate_exact(&c).unwrap();
        let one = Some(Rational64::zero());
        assert_eq!(sorted(chars), sorted(vec![vec![None, None], vec![None, one], vec![one, one]]));
    }

    #[test]
    fn cyclic_three() {
        let chars = enumerate_characters(&Carrier::cyclic(3)).unwrap();
        assert_eq!(chars.len(), 4);
        assert!(chars[0].is_zero());
        let basis = additive_basis(&Carrier::cyclic(3), None).unwrap();
        assert_eq!(basis.dimension(), 0);
    }

    #[test]
    fn singleton() {
        let c = Carrier::finite(vec!["e".into()], vec![vec![0]]).unwrap();
        assert_eq!(enumerate_exact(&c).unwrap().len(), 2);
    }

    #[test]
    fn idempotent_domain() {
        let c = Carrier::finite(vec!["0".into(), "1".into()], vec![vec![0, 0], vec![0, 1]]).unwrap();
        assert_eq!(additive_basis(&c, Some(&[1])).unwrap().dimension(), 0);
        let z4 = Carrier::cyclic(4);
        assert!(matches!(additive_basis(&z4, Some(&[1])), Err(Error::DomainNotClosed(..))));
    }

    #[test]
    fn axis_units_are_exact() {
        assert_eq!(unit_value(&Some(Rational64::new(1, 2))), C64::new(-1.0, 0.0));
        assert_eq!(unit_value(&Some(Rational64::new(3, 4))), C64::new(0.0, -1.0));
    }
}
