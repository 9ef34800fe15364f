//! Semigroups: finite multiplication tables and the two built-in analytic
//! carriers, each with a finite evaluation window.

use crate::error::{Error, Result};
use crate::scalar::{rational_from_value, rational_to_value};
use num_rational::Rational64;
use num_traits::{CheckedAdd, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    /// Position in a finite table.
    Idx(usize),
    /// Point of (Q^dim, +).
    Rat(Vec<Rational64>),
    /// Point of ([0, inf), *).
    Real(f64),
}

impl Element {
    pub fn rat(coords: &[(i64, i64)]) -> Element {
        Element::Rat(coords.iter().map(|&(p, q)| Rational64::new(p, q)).collect())
    }

    /// Coordinates as floats (rat-add only).
    pub fn coords(&self) -> Option<Vec<f64>> {
        match self {
            Element::Rat(v) => Some(v.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    Finite,
    RatAdd { dim: usize },
    NonnegRealMul,
}

#[derive(Clone, Debug)]
pub struct Carrier {
    pub name: Option<String>,
    pub kind: Kind,
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    window: Vec<Element>,
}

/// Outcome of the square-generation search for one element.
#[derive(Clone, Debug, PartialEq)]
pub enum SquareVerdict {
    /// `x = r1^2 ... rn^2` with the listed roots.
    Reached(Vec<usize>),
    Unreachable,
}

/// Twelve points with small coordinates; pair sums stay inside [-4, 4].
fn default_rat_window(dim: usize) -> Vec<Element> {
    if dim == 1 {
        return [(0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2), (2, 1), (-2, 1), (1, 3), (3, 2), (-3, 2), (1, 4), (-5, 4)]
            .iter()
            .map(|&(p, q)| Element::rat(&[(p, q)]))
            .collect();
    }
    let base: [(i64, i64, i64, i64); 12] = [
        (0, 1, 0, 1),
        (1, 1, 0, 1),
        (0, 1, 1, 1),
        (1, 1, 1, 1),
        (1, 2, -1, 1),
        (-1, 1, 1, 2),
        (2, 1, 1, 1),
        (1, 1, -2, 1),
        (-1, 2, -1, 2),
        (3, 2, 1, 4),
        (-2, 1, 1, 1),
        (1, 4, 2, 1),
    ];
    base.iter()
        .map(|&(p1, q1, p2, q2)| {
            let mut v = vec![Rational64::zero(); dim];
            v[0] = Rational64::new(p1, q1);
            v[1] = Rational64::new(p2, q2);
            for (k, x) in v.iter_mut().enumerate().skip(2) {
                *x = Rational64::new(p1 * (k as i64 % 3) - p2, 2 * q1 * q2);
            }
            Element::Rat(v)
        })
        .collect()
}

fn default_real_window() -> Vec<Element> {
    [0.0, 0.1, 0.25, 0.5, 0.8, 1.0, 1.5, 2.0, 2.5, 3.0, 3.25, 4.0].into_iter().map(Element::Real).collect()
}

impl Carrier {
    /// Finite carrier from labels and a table of indices; checks associativity.
    pub fn finite(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Carrier> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Malformed("finite carrier needs at least one element".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Malformed(format!("duplicate element label {l}")));
            }
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::Malformed(format!("table must be {n}x{n}")));
        }
        if let Some(&bad) = table.iter().flatten().find(|&&v| v >= n) {
            return Err(Error::Malformed(format!("table entry {bad} out of range")));
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if table[table[i][j]][k] != table[i][table[j][k]] {
                        return Err(Error::NonAssociative(labels[i].clone(), labels[j].clone(), labels[k].clone()));
                    }
                }
            }
        }
        let window = (0..n).map(Element::Idx).collect();
        Ok(Carrier { name: None, kind: Kind::Finite, labels, table, window })
    }

    pub fn rat_add(dim: usize, window: Option<Vec<Element>>) -> Result<Carrier> {
        if dim == 0 {
            return Err(Error::Malformed("rat-add dimension must be positive".into()));
        }
        let mut c = Carrier { name: None, kind: Kind::RatAdd { dim }, labels: vec![], table: vec![], window: vec![] };
        c.set_window(window.unwrap_or_else(|| default_rat_window(dim)))?;
        Ok(c)
    }

    pub fn nonneg_real_mul(window: Option<Vec<Element>>) -> Result<Carrier> {
        let mut c = Carrier { name: None, kind: Kind::NonnegRealMul, labels: vec![], table: vec![], window: vec![] };
        c.set_window(window.unwrap_or_else(default_real_window))?;
        Ok(c)
    }

    /// Cyclic group (Z/n, +).
    pub fn cyclic(n: usize) -> Carrier {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let mut c = Carrier::finite(labels, table).expect("cyclic groups are associative");
        c.name = Some(format!("Z/{n}"));
        c
    }

    pub fn with_name(mut self, name: &str) -> Carrier {
        self.name = Some(name.to_string());
        self
    }

    pub fn set_window(&mut self, window: Vec<Element>) -> Result<()> {
        for (i, x) in window.iter().enumerate() {
            if !self.contains(x) {
                return Err(Error::NotInCarrier(self.show(x)));
            }
            if window[..i].contains(x) {
                return Err(Error::DuplicateWindow(self.show(x)));
            }
        }
        if window.is_empty() {
            return Err(Error::Malformed("window is empty".into()));
        }
        self.window = window;
        Ok(())
    }

    pub fn window(&self) -> &[Element] {
        &self.window
    }

    pub fn is_finite(&self) -> bool {
        self.kind == Kind::Finite
    }

    /// Number of elements of a finite carrier.
    pub fn size(&self) -> Option<usize> {
        self.is_finite().then_some(self.labels.len())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// All elements of a finite carrier.
    pub fn elements(&self) -> Result<Vec<Element>> {
        let n = self.size().ok_or(Error::NotFinite)?;
        Ok((0..n).map(Element::Idx).collect())
    }

    pub fn contains(&self, x: &Element) -> bool {
        match (&self.kind, x) {
            (Kind::Finite, Element::Idx(i)) => *i < self.labels.len(),
            (Kind::RatAdd { dim }, Element::Rat(v)) => v.len() == *dim,
            (Kind::NonnegRealMul, Element::Real(r)) => r.is_finite() && *r >= 0.0,
            _ => false,
        }
    }

    pub fn compose(&self, x: &Element, y: &Element) -> Result<Element> {
        for e in [x, y] {
            if !self.contains(e) {
                return Err(Error::NotInCarrier(self.show(e)));
            }
        }
        match (x, y) {
            (Element::Idx(i), Element::Idx(j)) => Ok(Element::Idx(self.table[*i][*j])),
            (Element::Rat(a), Element::Rat(b)) => a
                .iter()
                .zip(b)
                .map(|(p, q)| p.checked_add(q))
                .collect::<Option<Vec<_>>>()
                .map(Element::Rat)
                .ok_or_else(|| Error::Malformed("rational overflow in composition".into())),
            (Element::Real(a), Element::Real(b)) => Ok(Element::Real(a * b)),
            _ => unreachable!("membership checked above"),
        }
    }

    /// `x^n` for n >= 1.
    pub fn power(&self, x: &Element, n: usize) -> Result<Element> {
        let mut acc = x.clone();
        for _ in 1..n {
            acc = self.compose(&acc, x)?;
        }
        Ok(acc)
    }

    /// Index of a finite element by label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// JSON form of an element (label, rational vector or real).
    pub fn element_value(&self, x: &Element) -> Value {
        match x {
            Element::Idx(i) => Value::String(self.labels.get(*i).cloned().unwrap_or(i.to_string())),
            Element::Rat(v) => Value::Array(v.iter().map(rational_to_value).collect()),
            Element::Real(r) => Value::from(*r),
        }
    }

    pub fn show(&self, x: &Element) -> String {
        match x {
            Element::Idx(i) => self.labels.get(*i).cloned().unwrap_or(format!("#{i}")),
            other => self.element_value(other).to_string(),
        }
    }

    pub fn parse_element(&self, v: &Value) -> Result<Element> {
        let bad = || Error::Malformed(format!("cannot read element {v}"));
        let x = match &self.kind {
            Kind::Finite => match v {
                Value::String(s) => Element::Idx(self.index_of(s).ok_or_else(bad)?),
                Value::Number(n) => {
                    let s = n.to_string();
                    match self.index_of(&s) {
                        Some(i) => Element::Idx(i),
                        None => Element::Idx(n.as_u64().ok_or_else(bad)? as usize),
                    }
                }
                _ => return Err(bad()),
            },
            Kind::RatAdd { .. } => match v {
                Value::Array(items) => {
                    Element::Rat(items.iter().map(rational_from_value).collect::<Option<Vec<_>>>().ok_or_else(bad)?)
                }
                other => Element::Rat(vec![rational_from_value(other).ok_or_else(bad)?]),
            },
            Kind::NonnegRealMul => Element::Real(match v {
                Value::String(s) => crate::scalar::parse_rational(s).and_then(|q| q.to_f64()).ok_or_else(bad)?,
                other => other.as_f64().ok_or_else(bad)?,
            }),
        };
        if !self.contains(&x) {
            return Err(Error::NotInCarrier(v.to_string()));
        }
        Ok(x)
    }

    /// Loads a carrier description (see the README for the format).
    pub fn from_json(v: &Value) -> Result<Carrier> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Malformed("carrier needs a string field \"kind\"".into()))?;
        let name = v.get("name").and_then(Value::as_str).map(str::to_string);
        let mut carrier = match kind {
            "finite" | "finite-table" => {
                let labels: Vec<String> = v
                    .get("elements")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Malformed("finite carrier needs \"elements\"".into()))?
                    .iter()
                    .map(|e| match e {
                        Value::String(s) => Ok(s.clone()),
                        Value::Number(n) => Ok(n.to_string()),
                        other => Err(Error::Malformed(format!("bad element label {other}"))),
                    })
                    .collect::<Result<_>>()?;
                let rows = v
                    .get("table")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Malformed("finite carrier needs \"table\"".into()))?;
                let lookup = |e: &Value| -> Result<usize> {
                    let s = match e {
                        Value::String(s) => s.clone(),
                        Value::Number(n) => n.to_string(),
                        other => return Err(Error::Malformed(format!("bad table entry {other}"))),
                    };
                    labels
                        .iter()
                        .position(|l| *l == s)
                        .ok_or_else(|| Error::Malformed(format!("table entry {s} is not an element")))
                };
                let table = rows
                    .iter()
                    .map(|row| {
                        row.as_array()
                            .ok_or_else(|| Error::Malformed("table rows must be arrays".into()))?
                            .iter()
                            .map(lookup)
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Carrier::finite(labels, table)?
            }
            "rat-add" => {
                let dim = v
                    .get("dim")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::Malformed("rat-add needs a positive \"dim\"".into()))?
                    as usize;
                Carrier::rat_add(dim, None)?
            }
            "nonneg-real-mul" => Carrier::nonneg_real_mul(None)?,
            other => return Err(Error::Malformed(format!("unknown carrier kind {other}"))),
        };
        if let Some(w) = v.get("window") {
            let items = w.as_array().ok_or_else(|| Error::Malformed("\"window\" must be an array".into()))?;
            let window = items.iter().map(|e| carrier.parse_element(e)).collect::<Result<Vec<_>>>()?;
            carrier.set_window(window)?;
        }
        carrier.name = name;
        Ok(carrier)
    }

    pub fn to_json(&self) -> Value {
        let window: Vec<Value> = self.window.iter().map(|x| self.element_value(x)).collect();
        let mut v = match &self.kind {
            Kind::Finite => json!({
                "kind": "finite",
                "elements": self.labels,
                "table": self.table.iter()
                    .map(|row| row.iter().map(|&k| self.labels[k].clone()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "window": window,
            }),
            Kind::RatAdd { dim } => json!({"kind": "rat-add", "dim": dim, "window": window}),
            Kind::NonnegRealMul => json!({"kind": "nonneg-real-mul", "window": window}),
        };
        if let Some(n) = &self.name {
            v["name"] = Value::String(n.clone());
        }
        v
    }

    /// Index and period of a finite element: the least k, p with x^(k+p) = x^k.
    pub fn index_period(&self, x: usize) -> (usize, usize) {
        let mut seen = vec![usize::MAX; self.labels.len()];
        let mut cur = x;
        let mut step = 1;
        loop {
            if seen[cur] != usize::MAX {
                return (seen[cur], step - seen[cur]);
            }
            seen[cur] = step;
            cur = self.table[cur][x];
            step += 1;
        }
    }

    /// Breadth-first closure of the squares. Analytic carriers are
    /// square-generated by construction.
    pub fn square_generated(&self, max_length: Option<usize>) -> Result<Vec<SquareVerdict>> {
        let n = self.size().ok_or(Error::NotFinite)?;
        let max_length = max_length.unwrap_or(n);
        let squares: Vec<(usize, usize)> = (0..n).map(|x| (self.table[x][x], x)).collect();
        let mut best: Vec<Option<Vec<usize>>> = vec![None; n];
        let mut frontier = VecDeque::new();
        for &(sq, root) in &squares {
            if best[sq].is_none() {
                best[sq] = Some(vec![root]);
                frontier.push_back(sq);
            }
        }
        let mut length = 1;
        while length < max_length && !frontier.is_empty() {
            let mut next = VecDeque::new();
            while let Some(z) = frontier.pop_front() {
                for &(sq, root) in &squares {
                    let y = self.table[z][sq];
                    if best[y].is_none() {
                        let mut path = best[z].clone().unwrap_or_default();
                        path.push(root);
                        best[y] = Some(path);
                        next.push_back(y);
                    }
                }
            }
            frontier = next;
            length += 1;
        }
        Ok(best.into_iter().map(|b| b.map_or(SquareVerdict::Unreachable, SquareVerdict::Reached)).collect())
    }

    pub fn is_square_generated(&self) -> bool {
        match self.square_generated(None) {
            Ok(v) => v.iter().all(|s| matches!(s, SquareVerdict::Reached(_))),
            Err(_) => true,
        }
    }

    /// Window triples where associativity fails (empty on valid carriers).
    pub fn window_associativity_failures(&self) -> Result<Vec<(Element, Element, Element)>> {
        let mut bad = vec![];
        for x in &self.window {
            for y in &self.window {
                for z in &self.window {
                    let l = self.compose(&self.compose(x, y)?, z)?;
                    let r = self.compose(x, &self.compose(y, z)?)?;
                    let same = match (&l, &r) {
                        (Element::Real(a), Element::Real(b)) => (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0),
                        _ => l == r,
                    };
                    if !same {
                        bad.push((x.clone(), y.clone(), z.clone()));
                    }
                }
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul2() -> Carrier {
        Carrier::finite(vec!["0".into(), "1".into()], vec![vec![0, 0], vec![0, 1]]).unwrap()
    }

    #[test]
    fn loads_finite_and_checks_associativity() {
        let c = mul2();
        assert_eq!(c.compose(&Element::Idx(1), &Element::Idx(0)).unwrap(), Element::Idx(0));
        let bad = Carrier::finite(vec!["a".into(), "b".into()], vec![vec![1, 0], vec![0, 0]]);
        assert!(matches!(bad, Err(Error::NonAssociative(..))));
        let single = Carrier::finite(vec!["e".into()], vec![vec![0]]).unwrap();
        assert_eq!(single.size(), Some(1));
    }

    #[test]
    fn analytic_composition() {
        let c = Carrier::rat_add(1, Some(vec![Element::rat(&[(1, 2)])])).unwrap();
        let x = c.compose(&Element::rat(&[(1, 2)]), &Element::rat(&[(1, 3)])).unwrap();
        assert_eq!(x, Element::rat(&[(5, 6)]));
        let m = Carrier::nonneg_real_mul(None).unwrap();
        assert_eq!(m.compose(&Element::Real(0.0), &Element::Real(7.5)).unwrap(), Element::Real(0.0));
        assert!(m.compose(&Element::Real(-1.0), &Element::Real(1.0)).is_err());
        assert_eq!(m.window().len(), 12);
        assert_eq!(Carrier::rat_add(2, None).unwrap().window().len(), 12);
        assert_eq!(Carrier::rat_add(1, None).unwrap().window().len(), 12);
        assert_eq!(Carrier::rat_add(3, None).unwrap().window().len(), 12);
    }

    #[test]
    fn window_checks() {
        let mut c = Carrier::nonneg_real_mul(None).unwrap();
        assert!(c.set_window(vec![Element::Real(1.0), Element::Real(1.0)]).is_err());
        assert!(c.set_window(vec![Element::Real(-2.0)]).is_err());
    }

    #[test]
    fn square_generation() {
        assert!(mul2().is_square_generated());
        assert!(Carrier::cyclic(3).is_square_generated());
        let z2 = Carrier::cyclic(2).square_generated(None).unwrap();
        assert_eq!(z2[1], SquareVerdict::Unreachable);
        for n in 1..=12 {
            assert_eq!(Carrier::cyclic(n).is_square_generated(), n % 2 == 1, "n={n}");
        }
        let z3 = Carrier::cyclic(3).square_generated(None).unwrap();
        // 1 = 2 + 2, the double of 2.
        assert_eq!(z3[1], SquareVerdict::Reached(vec![2]));
    }

    #[test]
    fn json_round_trip() {
        let v = json!({"kind":"finite","elements":["0","1"],"table":[["0","0"],["0","1"]]});
        let c = Carrier::from_json(&v).unwrap();
        let again = Carrier::from_json(&c.to_json()).unwrap();
        assert_eq!(again.table(), c.table());
        let r = json!({"kind":"rat-add","dim":2,"window":[[0,0],["1/2",1]]});
        let c = Carrier::from_json(&r).unwrap();
        assert_eq!(c.window()[1], Element::rat(&[(1, 2), (1, 1)]));
        let bad = json!({"kind":"nonneg-real-mul","window":[1,-1]});
        assert!(Carrier::from_json(&bad).is_err());
    }

    #[test]
    fn index_period() {
        let z3 = Carrier::cyclic(3);
        assert_eq!(z3.index_period(1), (1, 3));
        assert_eq!(z3.index_period(0), (1, 1));
        assert_eq!(mul2().index_period(0), (1, 1));
    }
}
