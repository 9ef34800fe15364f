//! Complex-valued functions on carriers: characters, additive functions,
//! extension by zero, and the structural predicates built on them.

mod finite;
mod json;

pub use finite::{
    additive_basis, enumerate_characters, enumerate_exact, exhaustive_characters, period_lcm, unit_value,
    AdditiveBasis, Unit,
};
pub use json::{
    additive_from_json, additive_to_json, character_from_json, character_to_json, fn_from_json, fn_to_json,
    phi_from_json,
};

use crate::carrier::{Carrier, Element, Kind};
use crate::error::{Error, Result};
use crate::scalar::{C64, ONE, ZERO};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// Closed forms a character can take.
#[derive(Clone, Debug, PartialEq)]
pub enum CharForm {
    /// `exp(b . x)` on rat-add.
    Exp(Vec<C64>),
    /// `x^s` for x > 0 and 0 at 0, on nonneg-real-mul.
    Power(C64),
    /// Constant 1.
    Ones,
    /// Constant 0.
    Zero,
    /// Values listed per element of a finite carrier.
    Table(Vec<C64>),
}

/// A multiplicative function together with its null ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    pub form: CharForm,
}

impl Character {
    pub fn exp(b: Vec<C64>) -> Character {
        Character { form: CharForm::Exp(b) }
    }

    pub fn power(s: C64) -> Character {
        Character { form: CharForm::Power(s) }
    }

    pub fn ones() -> Character {
        Character { form: CharForm::Ones }
    }

    pub fn zero() -> Character {
        Character { form: CharForm::Zero }
    }

    pub fn table(values: Vec<C64>) -> Character {
        Character { form: CharForm::Table(values) }
    }

    pub fn eval(&self, x: &Element) -> Result<C64> {
        match (&self.form, x) {
            (CharForm::Exp(b), Element::Rat(_)) => {
                let xs = x.coords().unwrap_or_default();
                if xs.len() != b.len() {
                    return Err(Error::Incompatible(format!(
                        "exp character of dimension {} at a point of dimension {}",
                        b.len(),
                        xs.len()
                    )));
                }
                Ok(b.iter().zip(&xs).map(|(bi, xi)| bi * xi).sum::<C64>().exp())
            }
            (CharForm::Power(s), Element::Real(r)) => {
                if *r == 0.0 {
                    Ok(ZERO)
                } else {
                    Ok((s * r.ln()).exp())
                }
            }
            (CharForm::Ones, _) => Ok(ONE),
            (CharForm::Zero, _) => Ok(ZERO),
            (CharForm::Table(v), Element::Idx(i)) => {
                v.get(*i).copied().ok_or_else(|| Error::Incompatible(format!("table has no entry {i}")))
            }
            (form, x) => Err(Error::Incompatible(format!("{form:?} at {x:?}"))),
        }
    }

    /// Membership in the null ideal {x : chi(x) = 0}.
    pub fn in_null_ideal(&self, x: &Element) -> bool {
        match (&self.form, x) {
            (CharForm::Power(_), Element::Real(r)) => *r == 0.0,
            (CharForm::Zero, _) => true,
            (CharForm::Table(v), Element::Idx(i)) => v.get(*i).is_some_and(|z| *z == ZERO),
            _ => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.form {
            CharForm::Zero => true,
            CharForm::Table(v) => v.iter().all(|z| *z == ZERO),
            _ => false,
        }
    }

    /// Window elements inside the null ideal.
    pub fn null_ideal_on(&self, carrier: &Carrier) -> Vec<Element> {
        carrier.window().iter().filter(|x| self.in_null_ideal(x)).cloned().collect()
    }

    /// Largest |chi(xy) - chi(x)chi(y)| over window pairs.
    pub fn multiplicativity_residual(&self, carrier: &Carrier) -> Result<f64> {
        let mut worst = 0f64;
        for x in carrier.window() {
            for y in carrier.window() {
                let xy = carrier.compose(x, y)?;
                worst = worst.max((self.eval(&xy)? - self.eval(x)? * self.eval(y)?).norm());
            }
        }
        Ok(worst)
    }

    /// A window pair (x in I, y arbitrary) with xy or yx outside the null
    /// ideal, if any.
    pub fn ideal_violation(&self, carrier: &Carrier) -> Result<Option<(Element, Element)>> {
        if self.is_zero() {
            return Ok(None);
        }
        for x in carrier.window().iter().filter(|x| self.in_null_ideal(x)) {
            for y in carrier.window() {
                if !self.in_null_ideal(&carrier.compose(x, y)?) || !self.in_null_ideal(&carrier.compose(y, x)?) {
                    return Ok(Some((x.clone(), y.clone())));
                }
            }
        }
        Ok(None)
    }

    /// Gap between the closed forms of two characters, independent of any
    /// window: 0 when equal, infinite when the forms are of different kinds.
    pub fn form_gap(&self, other: &Character) -> f64 {
        let gap = |a: &[C64], b: &[C64]| {
            if a.len() != b.len() {
                return f64::INFINITY;
            }
            a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
        };
        let flat = |c: &Character| match &c.form {
            CharForm::Exp(b) if b.iter().all(|z| *z == ZERO) => CharForm::Ones,
            f => f.clone(),
        };
        match (flat(self), flat(other)) {
            (CharForm::Exp(a), CharForm::Exp(b)) => gap(&a, &b),
            (CharForm::Power(a), CharForm::Power(b)) => (a - b).norm(),
            (CharForm::Table(a), CharForm::Table(b)) => gap(&a, &b),
            (CharForm::Ones, CharForm::Ones) | (CharForm::Zero, CharForm::Zero) => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Uniform distance on the window.
    pub fn distance(&self, other: &Character, carrier: &Carrier) -> Result<f64> {
        let mut worst = 0f64;
        for x in carrier.window() {
            worst = worst.max((self.eval(x)? - other.eval(x)?).norm());
        }
        Ok(worst)
    }
}

/// Parameters accepted by [`analytic_character`].
#[derive(Clone, Debug)]
pub enum CharParams {
    Exp(Vec<C64>),
    Power(C64),
    Ones,
}

/// Character of a built-in analytic carrier.
pub fn analytic_character(carrier: &Carrier, params: CharParams) -> Result<Character> {
    match (&carrier.kind, params) {
        (Kind::RatAdd { dim }, CharParams::Exp(b)) => {
            if b.len() != *dim {
                return Err(Error::Malformed(format!("exponent needs {dim} entries, got {}", b.len())));
            }
            Ok(Character::exp(b))
        }
        (Kind::NonnegRealMul, CharParams::Power(s)) => Ok(Character::power(s)),
        (Kind::Finite, _) => Err(Error::Incompatible("finite carriers enumerate characters".into())),
        (_, CharParams::Ones) => Ok(Character::ones()),
        (kind, p) => Err(Error::Incompatible(format!("{p:?} on {kind:?}"))),
    }
}

/// Closed forms of additive functions.
#[derive(Clone, Debug, PartialEq)]
pub enum AddForm {
    /// `alpha . x` on all of rat-add.
    Linear(Vec<C64>),
    /// `alpha * ln x` on (0, inf).
    Log(C64),
    /// Values on a finite domain; `None` marks elements outside it.
    Table(Vec<Option<C64>>),
    Zero,
}

/// An additive function on a stated subsemigroup.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveFn {
    pub form: AddForm,
}

impl AdditiveFn {
    pub fn linear(alpha: Vec<C64>) -> AdditiveFn {
        AdditiveFn { form: AddForm::Linear(alpha) }
    }

    pub fn log(alpha: C64) -> AdditiveFn {
        AdditiveFn { form: AddForm::Log(alpha) }
    }

    pub fn zero() -> AdditiveFn {
        AdditiveFn { form: AddForm::Zero }
    }

    pub fn in_domain(&self, x: &Element) -> bool {
        match (&self.form, x) {
            (AddForm::Log(_), Element::Real(r)) => *r > 0.0,
            (AddForm::Log(_), _) => false,
            (AddForm::Table(v), Element::Idx(i)) => v.get(*i).is_some_and(Option::is_some),
            (AddForm::Table(_), _) => false,
            _ => true,
        }
    }

    /// Value at `x`, or `None` outside the domain.
    pub fn eval(&self, x: &Element) -> Result<Option<C64>> {
        if !self.in_domain(x) {
            return Ok(None);
        }
        match (&self.form, x) {
            (AddForm::Linear(a), Element::Rat(_)) => {
                let xs = x.coords().unwrap_or_default();
                if xs.len() != a.len() {
                    return Err(Error::Incompatible("additive dimension mismatch".into()));
                }
                Ok(Some(a.iter().zip(&xs).map(|(ai, xi)| ai * xi).sum()))
            }
            (AddForm::Log(a), Element::Real(r)) => Ok(Some(a * r.ln())),
            (AddForm::Table(v), Element::Idx(i)) => Ok(v[*i]),
            (AddForm::Zero, _) => Ok(Some(ZERO)),
            (form, x) => Err(Error::Incompatible(format!("{form:?} at {x:?}"))),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.form {
            AddForm::Zero => true,
            AddForm::Linear(a) => a.iter().all(|z| *z == ZERO),
            AddForm::Log(a) => *a == ZERO,
            AddForm::Table(v) => v.iter().flatten().all(|z| *z == ZERO),
        }
    }

    pub fn scaled(&self, s: C64) -> AdditiveFn {
        let form = match &self.form {
            AddForm::Linear(a) => AddForm::Linear(a.iter().map(|z| z * s).collect()),
            AddForm::Log(a) => AddForm::Log(a * s),
            AddForm::Table(v) => AddForm::Table(v.iter().map(|z| z.map(|z| z * s)).collect()),
            AddForm::Zero => AddForm::Zero,
        };
        AdditiveFn { form }
    }

    /// Largest |a(xy) - a(x) - a(y)| over window pairs inside the domain;
    /// errors if the domain is not closed on the window.
    pub fn additivity_residual(&self, carrier: &Carrier) -> Result<f64> {
        let mut worst = 0f64;
        for x in carrier.window() {
            for y in carrier.window() {
                let (Some(ax), Some(ay)) = (self.eval(x)?, self.eval(y)?) else { continue };
                let xy = carrier.compose(x, y)?;
                let axy = self.eval(&xy)?.ok_or_else(|| Error::DomainNotClosed(carrier.show(x), carrier.show(y)))?;
                worst = worst.max((axy - ax - ay).norm());
            }
        }
        Ok(worst)
    }
}

/// Parameters accepted by [`analytic_additive`].
#[derive(Clone, Debug)]
pub enum AddParams {
    Linear(Vec<C64>),
    Log(C64),
}

/// Additive function of a built-in analytic carrier.
pub fn analytic_additive(carrier: &Carrier, params: AddParams) -> Result<AdditiveFn> {
    match (&carrier.kind, params) {
        (Kind::RatAdd { dim }, AddParams::Linear(a)) if a.len() == *dim => Ok(AdditiveFn::linear(a)),
        (Kind::NonnegRealMul, AddParams::Log(a)) => Ok(AdditiveFn::log(a)),
        (kind, p) => Err(Error::Incompatible(format!("{p:?} on {kind:?}"))),
    }
}

/// Argument of an extension by zero: a function on S minus I_chi built from
/// additive functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Phi {
    Add(AdditiveFn),
    Square(AdditiveFn),
    Combo(Vec<(C64, Phi)>),
}

impl Phi {
    pub fn eval(&self, x: &Element) -> Result<Option<C64>> {
        Ok(match self {
            Phi::Add(a) => a.eval(x)?,
            Phi::Square(a) => a.eval(x)?.map(|v| v * v),
            Phi::Combo(parts) => {
                let mut acc = ZERO;
                for (k, p) in parts {
                    match p.eval(x)? {
                        Some(v) => acc += k * v,
                        None => return Ok(None),
                    }
                }
                Some(acc)
            }
        })
    }
}

/// One basis shape of a closed-form descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Char(Character),
    Psi(Character, Phi),
}

impl Term {
    pub fn eval(&self, x: &Element) -> Result<C64> {
        match self {
            Term::Char(chi) => chi.eval(x),
            Term::Psi(chi, phi) => psi_value(chi, phi, x),
        }
    }
}

fn psi_value(chi: &Character, phi: &Phi, x: &Element) -> Result<C64> {
    if chi.in_null_ideal(x) {
        return Ok(ZERO);
    }
    let v = phi.eval(x)?.ok_or_else(|| Error::Undefined(format!("{x:?}")))?;
    Ok(chi.eval(x)? * v)
}

/// Closed-form descriptor: a finite sum of `constant * term`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lin(pub Vec<(C64, Term)>);

impl Lin {
    pub fn zero() -> Lin {
        Lin(vec![])
    }

    pub fn chr(chi: &Character) -> Lin {
        Lin(vec![(ONE, Term::Char(chi.clone()))])
    }

    /// Psi_chi(A).
    pub fn psi(chi: &Character, a: &AdditiveFn) -> Lin {
        Lin(vec![(ONE, Term::Psi(chi.clone(), Phi::Add(a.clone())))])
    }

    /// Psi_chi(A^2).
    pub fn psi_sq(chi: &Character, a: &AdditiveFn) -> Lin {
        Lin(vec![(ONE, Term::Psi(chi.clone(), Phi::Square(a.clone())))])
    }

    pub fn eval(&self, x: &Element) -> Result<C64> {
        let mut acc = ZERO;
        for (k, t) in &self.0 {
            if *k != ZERO {
                acc += k * t.eval(x)?;
            }
        }
        Ok(acc)
    }

    /// Coefficient attached to a given term (summing repeats).
    pub fn coefficient(&self, term: &Term) -> C64 {
        self.0.iter().filter(|(_, t)| t == term).map(|(k, _)| *k).sum()
    }
}

impl Add for Lin {
    type Output = Lin;
    fn add(mut self, rhs: Lin) -> Lin {
        self.0.extend(rhs.0);
        self
    }
}

impl Sub for Lin {
    type Output = Lin;
    fn sub(self, rhs: Lin) -> Lin {
        self + (-rhs)
    }
}

impl Neg for Lin {
    type Output = Lin;
    fn neg(self) -> Lin {
        self * (-ONE)
    }
}

impl Mul<C64> for Lin {
    type Output = Lin;
    fn mul(self, k: C64) -> Lin {
        Lin(self.0.into_iter().map(|(c, t)| (c * k, t)).collect())
    }
}

impl Mul<f64> for Lin {
    type Output = Lin;
    fn mul(self, k: f64) -> Lin {
        self * C64::new(k, 0.0)
    }
}

type Evaluator = Arc<dyn Fn(&Element) -> Result<C64> + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Lin(Lin),
    Table(Vec<C64>),
    Custom(Evaluator),
}

/// An evaluable map from carrier elements to complex numbers.
#[derive(Clone)]
pub struct ComplexFn {
    repr: Repr,
}

impl fmt::Debug for ComplexFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Lin(l) => f.debug_tuple("ComplexFn").field(l).finish(),
            Repr::Table(t) => f.debug_tuple("ComplexFn::Table").field(t).finish(),
            Repr::Custom(_) => f.write_str("ComplexFn::Custom"),
        }
    }
}

impl From<Lin> for ComplexFn {
    fn from(l: Lin) -> Self {
        ComplexFn { repr: Repr::Lin(l) }
    }
}

impl ComplexFn {
    pub fn zero() -> ComplexFn {
        Lin::zero().into()
    }

    pub fn table(values: Vec<C64>) -> ComplexFn {
        ComplexFn { repr: Repr::Table(values) }
    }

    pub fn custom(f: impl Fn(&Element) -> Result<C64> + Send + Sync + 'static) -> ComplexFn {
        ComplexFn { repr: Repr::Custom(Arc::new(f)) }
    }

    pub fn eval(&self, x: &Element) -> Result<C64> {
        match &self.repr {
            Repr::Lin(l) => l.eval(x),
            Repr::Table(t) => match x {
                Element::Idx(i) => {
                    t.get(*i).copied().ok_or_else(|| Error::Incompatible(format!("table has no entry {i}")))
                }
                other => Err(Error::Incompatible(format!("table at {other:?}"))),
            },
            Repr::Custom(f) => f(x),
        }
    }

    pub fn descriptor(&self) -> Option<&Lin> {
        match &self.repr {
            Repr::Lin(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_table(&self) -> Option<&[C64]> {
        match &self.repr {
            Repr::Table(t) => Some(t),
            _ => None,
        }
    }

    /// `sum k_i * f_i`, keeping a descriptor when every summand has one.
    pub fn combine(parts: &[(C64, &ComplexFn)]) -> ComplexFn {
        if let Some(lins) = parts.iter().map(|(_, f)| f.descriptor()).collect::<Option<Vec<_>>>() {
            let mut acc = Lin::zero();
            for ((k, _), l) in parts.iter().zip(lins) {
                acc = acc + l.clone() * *k;
            }
            return acc.into();
        }
        let owned: Vec<(C64, ComplexFn)> = parts.iter().map(|(k, f)| (*k, (*f).clone())).collect();
        ComplexFn::custom(move |x| {
            let mut acc = ZERO;
            for (k, f) in &owned {
                acc += k * f.eval(x)?;
            }
            Ok(acc)
        })
    }

    pub fn scaled(&self, k: C64) -> ComplexFn {
        ComplexFn::combine(&[(k, self)])
    }

    /// Values on the window.
    pub fn on_window(&self, carrier: &Carrier) -> Result<Vec<C64>> {
        carrier.window().iter().map(|x| self.eval(x)).collect()
    }
}

impl From<&Character> for ComplexFn {
    fn from(chi: &Character) -> Self {
        Lin::chr(chi).into()
    }
}

/// Extension by zero of `phi` along `chi`; `phi` must be defined at every
/// window element outside the null ideal.
pub fn psi_extend(carrier: &Carrier, chi: &Character, phi: &Phi) -> Result<ComplexFn> {
    for x in carrier.window() {
        if !chi.in_null_ideal(x) && phi.eval(x)?.is_none() {
            return Err(Error::Undefined(carrier.show(x)));
        }
    }
    Ok(Lin(vec![(ONE, Term::Psi(chi.clone(), phi.clone()))]).into())
}

/// Result of the independence test.
#[derive(Clone, Debug, PartialEq)]
pub struct Independence {
    pub independent: bool,
    pub witness: Option<(usize, usize)>,
    pub max_minor: f64,
    pub scale: f64,
}

/// `f` and `h` are independent iff some 2x2 minor f(x)h(y) - f(y)h(x) on
/// the window exceeds `tol` times max|f| max|h|.
pub fn linear_independence(carrier: &Carrier, f: &ComplexFn, h: &ComplexFn, tol: f64) -> Result<Independence> {
    let fv = f.on_window(carrier)?;
    let hv = h.on_window(carrier)?;
    independence_of_values(&fv, &hv, tol)
}

pub(crate) fn independence_of_values(fv: &[C64], hv: &[C64], tol: f64) -> Result<Independence> {
    let fmax = fv.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let hmax = hv.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = fmax * hmax;
    let mut best = (0.0, None);
    for i in 0..fv.len() {
        for j in 0..fv.len() {
            let m = (fv[i] * hv[j] - fv[j] * hv[i]).norm();
            if m > best.0 {
                best = (m, Some((i, j)));
            }
        }
    }
    let independent = scale > 0.0 && best.0 > tol * scale;
    Ok(Independence { independent, witness: if independent { best.1 } else { None }, max_minor: best.0, scale })
}

/// Largest |f(xy) - f(x)g(y) - g(x)f(y)| over window pairs.
pub fn law_residual_membership(carrier: &Carrier, f: &ComplexFn, g: &ComplexFn) -> Result<f64> {
    let mut worst = 0f64;
    for x in carrier.window() {
        for y in carrier.window() {
            let xy = carrier.compose(x, y)?;
            let r = f.eval(&xy)? - f.eval(x)? * g.eval(y)? - g.eval(x)? * f.eval(y)?;
            worst = worst.max(r.norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, re};

    fn rat1() -> Carrier {
        Carrier::rat_add(1, None).unwrap()
    }

    #[test]
    fn analytic_characters() {
        let r = rat1();
        let one = analytic_character(&r, CharParams::Exp(vec![ZERO])).unwrap();
        assert!(r.window().iter().all(|x| one.eval(x).unwrap() == ONE));
        let e = analytic_character(&r, CharParams::Exp(vec![ONE])).unwrap();
        assert!(e.multiplicativity_residual(&r).unwrap() < 1e-12);
        let m = Carrier::nonneg_real_mul(None).unwrap();
        let id = analytic_character(&m, CharParams::Power(ONE)).unwrap();
        assert!(id.in_null_ideal(&Element::Real(0.0)));
        assert!((id.eval(&Element::Real(2.5)).unwrap() - re(2.5)).norm() < 1e-14);
        assert!(id.ideal_violation(&m).unwrap().is_none());
        assert!(analytic_character(&r, CharParams::Power(ONE)).is_err());
    }

    #[test]
    fn analytic_additives() {
        let m = Carrier::nonneg_real_mul(None).unwrap();
        let ln = analytic_additive(&m, AddParams::Log(ONE)).unwrap();
        assert_eq!(ln.eval(&Element::Real(0.0)).unwrap(), None);
        // (0, inf) is closed, so the residual is over the positive window.
        assert!(ln.additivity_residual(&m).unwrap() < 1e-14);
        let r2 = Carrier::rat_add(2, None).unwrap();
        let a = analytic_additive(&r2, AddParams::Linear(vec![ONE, ZERO])).unwrap();
        let b = analytic_additive(&r2, AddParams::Linear(vec![ZERO, ONE])).unwrap();
        let p = Element::rat(&[(1, 1), (0, 1)]);
        let q = Element::rat(&[(0, 1), (1, 1)]);
        let det = a.eval(&p).unwrap().unwrap() * b.eval(&q).unwrap().unwrap()
            - a.eval(&q).unwrap().unwrap() * b.eval(&p).unwrap().unwrap();
        assert!(det.norm() > 0.5);
    }

    #[test]
    fn psi_definition() {
        let m = Carrier::nonneg_real_mul(None).unwrap();
        let id = Character::power(ONE);
        let f = psi_extend(&m, &id, &Phi::Add(AdditiveFn::log(ONE))).unwrap();
        assert_eq!(f.eval(&Element::Real(0.0)).unwrap(), ZERO);
        let v = f.eval(&Element::Real(2.0)).unwrap();
        assert!((v - re(2.0 * 2f64.ln())).norm() < 1e-14);
        // ln is undefined at 0 but the all-ones character has no null ideal there.
        assert!(matches!(
            psi_extend(&m, &Character::ones(), &Phi::Add(AdditiveFn::log(ONE))),
            Err(Error::Undefined(_))
        ));
        let z = psi_extend(&m, &id, &Phi::Add(AdditiveFn::zero())).unwrap();
        assert!(z.on_window(&m).unwrap().iter().all(|v| *v == ZERO));
    }

    #[test]
    fn independence() {
        let r = rat1();
        let e1 = Character::exp(vec![ONE]);
        let e2 = Character::exp(vec![re(2.0)]);
        let f: ComplexFn = (Lin::chr(&e1) - Lin::chr(&e2)).into();
        let h: ComplexFn = (Lin::chr(&e1) + Lin::chr(&e2)).into();
        assert!(!linear_independence(&r, &f, &f, 1e-9).unwrap().independent);
        assert!(!linear_independence(&r, &f, &f.scaled(re(2.0)), 1e-9).unwrap().independent);
        let ind = linear_independence(&r, &f, &h, 1e-9).unwrap();
        assert!(ind.independent && ind.witness.is_some());
    }

    #[test]
    fn membership() {
        let r = rat1();
        let chi = Character::exp(vec![c(0.3, 0.1)]);
        let g: ComplexFn = (&chi).into();
        assert_eq!(law_residual_membership(&r, &ComplexFn::zero(), &g).unwrap(), 0.0);
        let f: ComplexFn = Lin::psi(&chi, &AdditiveFn::linear(vec![re(2.0)])).into();
        assert!(law_residual_membership(&r, &f, &g).unwrap() < 1e-12);
        assert!(law_residual_membership(&r, &g, &g).unwrap() > 0.5);
    }
}
