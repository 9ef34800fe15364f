//! Residuals of the functional equations over all ordered window pairs.

use crate::carrier::{Carrier, Element};
use crate::error::Result;
use crate::funcspace::{independence_of_values, ComplexFn, Independence};
use crate::scalar::{pair, C64, ONE};
use serde_json::{json, Value};

/// `comp[lhs](xy) = sum coef * comp[u](x) * comp[v](y)`.
#[derive(Clone, Debug)]
pub struct Law {
    pub id: &'static str,
    pub lhs: usize,
    pub terms: Vec<(C64, usize, usize)>,
}

/// Components (f, g).
pub fn sine_law() -> Vec<Law> {
    vec![Law { id: "sine", lhs: 0, terms: vec![(ONE, 0, 1), (ONE, 1, 0)] }]
}

/// Components (f, g, h).
pub fn cosine_sine_law() -> Vec<Law> {
    vec![Law { id: "cosine-sine", lhs: 0, terms: vec![(ONE, 0, 1), (ONE, 1, 0), (ONE, 2, 2)] }]
}

/// Components (f, g): f(xy) = f(x)f(y) + g(x)g(y).
pub fn cosine_addition_law() -> Vec<Law> {
    vec![Law { id: "cosine-addition", lhs: 0, terms: vec![(ONE, 0, 0), (ONE, 1, 1)] }]
}

/// Components (f, g1, h, g2). Both equations share one code path so that
/// swapping the system reproduces residuals bit for bit.
pub fn system_laws(l1: C64, l2: C64) -> Vec<Law> {
    vec![
        Law { id: "r1", lhs: 0, terms: vec![(ONE, 0, 1), (ONE, 1, 0), (l1 * l1, 2, 2)] },
        Law { id: "r2", lhs: 2, terms: vec![(ONE, 2, 3), (ONE, 3, 2), (l2 * l2, 0, 0)] },
    ]
}

/// Window elements and all ordered products.
pub struct Grid<'a> {
    pub carrier: &'a Carrier,
    pub products: Vec<Element>,
}

/// A function sampled on the window (`at`) and on the products (`prod`,
/// row-major in the first factor).
#[derive(Clone, Debug)]
pub struct Values {
    pub at: Vec<C64>,
    pub prod: Vec<C64>,
}

impl<'a> Grid<'a> {
    pub fn new(carrier: &'a Carrier) -> Result<Grid<'a>> {
        let w = carrier.window();
        let mut products = Vec::with_capacity(w.len() * w.len());
        for x in w {
            for y in w {
                products.push(carrier.compose(x, y)?);
            }
        }
        Ok(Grid { carrier, products })
    }

    pub fn n(&self) -> usize {
        self.carrier.window().len()
    }

    pub fn values(&self, f: &ComplexFn) -> Result<Values> {
        Ok(Values {
            at: self.carrier.window().iter().map(|x| f.eval(x)).collect::<Result<_>>()?,
            prod: self.products.iter().map(|x| f.eval(x)).collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquationResidual {
    pub id: String,
    pub max_abs: f64,
    /// Largest single-term magnitude of the equation over the window.
    pub scale: f64,
    pub argmax: (usize, usize),
}

impl EquationResidual {
    pub fn relative(&self) -> f64 {
        relative(self.max_abs, self.scale)
    }
}

fn relative(abs: f64, scale: f64) -> f64 {
    if abs == 0.0 {
        0.0
    } else if scale > 0.0 {
        abs / scale
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub argmax_pair: (Element, Element),
    pub per_equation: Vec<EquationResidual>,
    pub scale: f64,
}

impl ResidualReport {
    /// Largest per-equation relative residual.
    pub fn relative(&self) -> f64 {
        self.per_equation.iter().map(EquationResidual::relative).fold(0.0, f64::max)
    }

    pub fn equation(&self, id: &str) -> Option<&EquationResidual> {
        self.per_equation.iter().find(|e| e.id == id)
    }

    pub fn to_json(&self, carrier: &Carrier) -> Value {
        json!({
            "max_abs": self.max_abs,
            "relative": self.relative(),
            "scale": self.scale,
            "argmax": [carrier.element_value(&self.argmax_pair.0), carrier.element_value(&self.argmax_pair.1)],
            "equations": self.per_equation.iter().map(|e| json!({
                "id": e.id, "max_abs": e.max_abs, "scale": e.scale, "relative": e.relative(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Residual value of one law at the pair (i, j), with the largest term.
pub fn law_at(law: &Law, comps: &[Values], n: usize, i: usize, j: usize) -> (C64, f64) {
    let lhs = comps[law.lhs].prod[i * n + j];
    let mut r = lhs;
    let mut big = lhs.norm();
    for &(k, u, v) in &law.terms {
        let t = k * comps[u].at[i] * comps[v].at[j];
        big = big.max(t.norm());
        r -= t;
    }
    (r, big)
}

/// Sweeps every ordered window pair.
pub fn evaluate(grid: &Grid, comps: &[Values], laws: &[Law]) -> ResidualReport {
    let n = grid.n();
    let mut per_equation = vec![];
    for law in laws {
        let mut best = (0.0, (0, 0));
        let mut scale = 0f64;
        for i in 0..n {
            for j in 0..n {
                let (r, big) = law_at(law, comps, n, i, j);
                scale = scale.max(big);
                let a = r.norm();
                if a > best.0 || a.is_nan() {
                    best = (a, (i, j));
                }
            }
        }
        per_equation.push(EquationResidual { id: law.id.to_string(), max_abs: best.0, scale, argmax: best.1 });
    }
    let worst = per_equation
        .iter()
        .fold(None::<&EquationResidual>, |acc, e| match acc {
            Some(a) if a.max_abs >= e.max_abs => Some(a),
            _ => Some(e),
        })
        .expect("at least one law");
    let w = grid.carrier.window();
    ResidualReport {
        max_abs: worst.max_abs,
        argmax_pair: (w[worst.argmax.0].clone(), w[worst.argmax.1].clone()),
        scale: per_equation.iter().map(|e| e.scale).fold(0.0, f64::max),
        per_equation,
    }
}

fn run(carrier: &Carrier, fns: &[&ComplexFn], laws: &[Law]) -> Result<ResidualReport> {
    let grid = Grid::new(carrier)?;
    let vals = fns.iter().map(|f| grid.values(f)).collect::<Result<Vec<_>>>()?;
    Ok(evaluate(&grid, &vals, laws))
}

pub fn residual_sine(carrier: &Carrier, f: &ComplexFn, g: &ComplexFn) -> Result<ResidualReport> {
    run(carrier, &[f, g], &sine_law())
}

pub fn residual_cosine_sine(carrier: &Carrier, f: &ComplexFn, g: &ComplexFn, h: &ComplexFn) -> Result<ResidualReport> {
    run(carrier, &[f, g, h], &cosine_sine_law())
}

pub fn residual_cosine_addition(carrier: &Carrier, f: &ComplexFn, g: &ComplexFn) -> Result<ResidualReport> {
    run(carrier, &[f, g], &cosine_addition_law())
}

/// A candidate solution (f, g1, h, g2) of the system.
#[derive(Clone, Debug)]
pub struct Quadruple {
    pub f: ComplexFn,
    pub g1: ComplexFn,
    pub h: ComplexFn,
    pub g2: ComplexFn,
}

impl Quadruple {
    pub fn components(&self) -> [&ComplexFn; 4] {
        [&self.f, &self.g1, &self.h, &self.g2]
    }
}

/// Residuals of both equations plus the independence of (f, h).
#[derive(Clone, Debug, PartialEq)]
pub struct SystemReport {
    pub residual: ResidualReport,
    pub independence: Independence,
}

impl SystemReport {
    pub fn r1(&self) -> &EquationResidual {
        &self.residual.per_equation[0]
    }

    pub fn r2(&self) -> &EquationResidual {
        &self.residual.per_equation[1]
    }

    pub fn relative(&self) -> f64 {
        self.residual.relative()
    }

    pub fn to_json(&self, carrier: &Carrier) -> Value {
        let mut v = json!({
            "r1": self.r1().max_abs,
            "r2": self.r2().max_abs,
            "r1_relative": self.r1().relative(),
            "r2_relative": self.r2().relative(),
            "argmax": [carrier.element_value(&self.residual.argmax_pair.0), carrier.element_value(&self.residual.argmax_pair.1)],
            "independent": self.independence.independent,
            "scale": self.residual.scale,
        });
        if let Some((i, j)) = self.independence.witness {
            let w = carrier.window();
            v["independence_witness"] = json!([carrier.element_value(&w[i]), carrier.element_value(&w[j])]);
        }
        v
    }
}

/// Residual sweep of the system; independence uses `tol` relative.
pub fn residual_system(carrier: &Carrier, q: &Quadruple, l1: C64, l2: C64, tol: f64) -> Result<SystemReport> {
    let grid = Grid::new(carrier)?;
    let vals = q.components().iter().map(|f| grid.values(f)).collect::<Result<Vec<_>>>()?;
    system_report(&grid, &vals, l1, l2, tol)
}

pub fn system_report(grid: &Grid, vals: &[Values], l1: C64, l2: C64, tol: f64) -> Result<SystemReport> {
    let residual = evaluate(grid, vals, &system_laws(l1, l2));
    let independence = independence_of_values(&vals[0].at, &vals[2].at, tol)?;
    Ok(SystemReport { residual, independence })
}

/// Exchanges the roles of the two equations.
pub fn swap_system(q: &Quadruple, l1: C64, l2: C64) -> (Quadruple, C64, C64) {
    (Quadruple { f: q.h.clone(), g1: q.g2.clone(), h: q.f.clone(), g2: q.g1.clone() }, l2, l1)
}

/// JSON of a (relative) number pair for reports.
pub fn lambda_json(l1: C64, l2: C64) -> Value {
    json!({"lambda1": pair(l1), "lambda2": pair(l2)})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{AdditiveFn, Character, Lin};
    use crate::scalar::{c, re};

    fn rat1() -> Carrier {
        Carrier::rat_add(1, None).unwrap()
    }

    #[test]
    fn sine_examples() {
        let r = rat1();
        let x1 = Character::exp(vec![c(0.3, 0.2)]);
        let x2 = Character::exp(vec![c(-0.4, 0.1)]);
        let alpha = c(1.5, -0.5);
        let f: ComplexFn = ((Lin::chr(&x1) - Lin::chr(&x2)) * alpha).into();
        let g: ComplexFn = ((Lin::chr(&x1) + Lin::chr(&x2)) * 0.5).into();
        assert!(residual_sine(&r, &f, &g).unwrap().relative() < 1e-13);
        let f: ComplexFn = Lin::psi(&x1, &AdditiveFn::linear(vec![re(2.0)])).into();
        let g: ComplexFn = (&x1).into();
        assert!(residual_sine(&r, &f, &g).unwrap().relative() < 1e-13);
        let one: ComplexFn = Lin::chr(&Character::ones()).into();
        assert_eq!(residual_sine(&r, &one, &one).unwrap().max_abs, 1.0);
    }

    #[test]
    fn cosine_sine_with_zero_h_is_sine() {
        let r = rat1();
        let x1 = Character::exp(vec![c(0.3, 0.2)]);
        let f: ComplexFn = Lin::psi(&x1, &AdditiveFn::linear(vec![re(2.0)])).into();
        let g: ComplexFn = (&x1).into();
        let a = residual_cosine_sine(&r, &f, &g, &ComplexFn::zero()).unwrap();
        let b = residual_sine(&r, &f, &g).unwrap();
        assert_eq!(a.max_abs, b.max_abs);
    }

    #[test]
    fn cosine_addition() {
        // cos(x+y) = cos x cos y - sin x sin y with g = i sin.
        let r = rat1();
        let e = Character::exp(vec![c(0.0, 1.0)]);
        let ei = Character::exp(vec![c(0.0, -1.0)]);
        let cos: ComplexFn = ((Lin::chr(&e) + Lin::chr(&ei)) * 0.5).into();
        let isin: ComplexFn = ((Lin::chr(&e) - Lin::chr(&ei)) * 0.5).into();
        assert!(residual_cosine_addition(&r, &cos, &isin).unwrap().relative() < 1e-13);
    }

    #[test]
    fn zero_quadruple_is_dependent() {
        let r = rat1();
        let z = ComplexFn::zero();
        let q = Quadruple { f: z.clone(), g1: z.clone(), h: z.clone(), g2: z };
        let rep = residual_system(&r, &q, ONE, ONE, 1e-9).unwrap();
        assert_eq!(rep.residual.max_abs, 0.0);
        assert!(!rep.independence.independent);
    }

    #[test]
    fn swap_is_involution() {
        let x1 = Character::exp(vec![c(0.3, 0.2)]);
        let f: ComplexFn = (&x1).into();
        let q = Quadruple { f: f.clone(), g1: ComplexFn::zero(), h: f.scaled(re(2.0)), g2: f };
        let (s, a, b) = swap_system(&q, re(1.0), re(2.0));
        let (t, a2, b2) = swap_system(&s, a, b);
        assert_eq!((a2, b2), (re(1.0), re(2.0)));
        let r = rat1();
        for (u, v) in q.components().iter().zip(t.components()) {
            assert_eq!(u.on_window(&r).unwrap(), v.on_window(&r).unwrap());
        }
    }
}
