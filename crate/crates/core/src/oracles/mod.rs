//! Brute-force checkers for the auxiliary results on extensions by zero,
//! characters and additive functions.
//!
//! Each oracle is a conditional: premises are checked numerically first and
//! a failed premise yields [`Status::NotApplicable`] with the measured
//! residual. Universal quantifiers over S are replaced by the window plus
//! all window products.

mod corpus;

pub use corpus::{constructed, falsify, run_suite, Instance, Suite, SuiteReport, Tally};

use crate::carrier::{Carrier, Element};
use crate::error::{Error, Result};
use crate::funcspace::{psi_extend, AdditiveFn, Character, ComplexFn, Phi};
use crate::linalg::{lstsq, CMat, CVec};
use crate::scalar::{C64, ONE, ZERO};
use serde_json::{json, Value};
use std::sync::Arc;

/// Relative tolerance for premises and conclusions alike.
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Holds,
    NotApplicable,
    Counterexample,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::NotApplicable => "not-applicable",
            Status::Counterexample => "counterexample",
        }
    }
}

/// A point where a conclusion fails, with the offending quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub element: Option<String>,
    pub quantity: String,
    pub magnitude: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleVerdict {
    pub oracle: String,
    /// Implication verdict: false only with a counterexample.
    pub holds: bool,
    pub status: Status,
    pub hypothesis_residual: Option<f64>,
    pub reason: Option<String>,
    pub note: Option<String>,
    pub counterexample: Option<Counterexample>,
    pub checked_count: usize,
}

impl OracleVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "oracle": self.oracle,
            "status": self.status.name(),
            "holds": self.holds,
            "hypothesis_residual": self.hypothesis_residual,
            "reason": self.reason,
            "note": self.note,
            "counterexample": self.counterexample.as_ref().map(|c| json!({
                "element": c.element,
                "quantity": c.quantity,
                "magnitude": c.magnitude,
                "bound": c.bound,
            })),
            "checked_count": self.checked_count,
        })
    }
}

/// A subset of the carrier given by a membership test (a subsemigroup or an
/// ideal, depending on use).
#[derive(Clone)]
pub struct Region {
    pub name: String,
    test: Arc<dyn Fn(&Element) -> bool + Send + Sync>,
}

impl std::fmt::Debug for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Region({})", self.name)
    }
}

impl Region {
    pub fn new(name: &str, test: impl Fn(&Element) -> bool + Send + Sync + 'static) -> Region {
        Region { name: name.to_string(), test: Arc::new(test) }
    }

    pub fn all() -> Region {
        Region::new("S", |_| true)
    }

    /// Listed indices of a finite carrier.
    pub fn indices(name: &str, members: Vec<usize>) -> Region {
        Region::new(name, move |x| matches!(x, Element::Idx(i) if members.contains(i)))
    }

    /// `{0}` of nonneg-real-mul.
    pub fn origin() -> Region {
        Region::new("{0}", |x| matches!(x, Element::Real(r) if *r == 0.0))
    }

    /// `(0, inf)` of nonneg-real-mul.
    pub fn positive() -> Region {
        Region::new("(0,inf)", |x| matches!(x, Element::Real(r) if *r > 0.0))
    }

    pub fn contains(&self, x: &Element) -> bool {
        (self.test)(x)
    }
}

/// Right-hand side `sum c_j chi_j`; coefficients are fitted by least squares
/// when not given.
#[derive(Clone, Debug, Default)]
pub struct Span {
    pub chars: Vec<Character>,
    pub coefs: Option<Vec<C64>>,
}

impl Span {
    pub fn fitted(chars: Vec<Character>) -> Span {
        Span { chars, coefs: None }
    }

    pub fn fixed(chars: Vec<Character>, coefs: Vec<C64>) -> Span {
        Span { chars, coefs: Some(coefs) }
    }
}

/// Evaluation context: the sample points and a running check counter.
struct Probe<'a> {
    carrier: &'a Carrier,
    oracle: String,
    pts: Vec<Element>,
    checked: usize,
}

fn norm_max(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn opt_max(v: &[Option<C64>]) -> f64 {
    v.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Window elements followed by the distinct window products not already
/// listed.
pub fn sample_points(carrier: &Carrier) -> Result<Vec<Element>> {
    let mut pts: Vec<Element> = carrier.window().to_vec();
    for x in carrier.window() {
        for y in carrier.window() {
            let xy = carrier.compose(x, y)?;
            if !pts.contains(&xy) {
                pts.push(xy);
            }
        }
    }
    Ok(pts)
}

fn sum(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl<'a> Probe<'a> {
    fn new(carrier: &'a Carrier, oracle: &str) -> Result<Probe<'a>> {
        Ok(Probe { carrier, oracle: oracle.to_string(), pts: sample_points(carrier)?, checked: 0 })
    }

    fn verdict(&self, status: Status) -> OracleVerdict {
        OracleVerdict {
            oracle: self.oracle.clone(),
            holds: status != Status::Counterexample,
            status,
            hypothesis_residual: None,
            reason: None,
            note: None,
            counterexample: None,
            checked_count: self.checked,
        }
    }

    fn not_applicable(&self, reason: impl Into<String>, residual: Option<f64>) -> OracleVerdict {
        OracleVerdict {
            reason: Some(reason.into()),
            hypothesis_residual: residual,
            ..self.verdict(Status::NotApplicable)
        }
    }

    fn holds(&self, residual: Option<f64>, note: Option<String>) -> OracleVerdict {
        OracleVerdict { hypothesis_residual: residual, note, ..self.verdict(Status::Holds) }
    }

    fn failed(&self, residual: Option<f64>, cx: Counterexample) -> OracleVerdict {
        OracleVerdict {
            hypothesis_residual: residual,
            counterexample: Some(cx),
            ..self.verdict(Status::Counterexample)
        }
    }

    fn chi(&self, chi: &Character) -> Result<Vec<C64>> {
        self.pts.iter().map(|x| chi.eval(x)).collect()
    }

    fn fun(&self, f: &ComplexFn) -> Result<Vec<C64>> {
        self.pts.iter().map(|x| f.eval(x)).collect()
    }

    fn add(&self, a: &AdditiveFn) -> Result<Vec<Option<C64>>> {
        self.pts.iter().map(|x| a.eval(x)).collect()
    }

    /// Psi_mu(phi) through the library's extension by zero.
    fn psi(&self, mu: &Character, phi: &Phi) -> Result<Vec<C64>> {
        let f = psi_extend(self.carrier, mu, phi)?;
        self.fun(&f)
    }

    /// Largest |chi(xy) - chi(x)chi(y)| over window pairs, relative.
    fn multiplicative(&mut self, chi: &Character) -> Result<f64> {
        self.checked += self.carrier.window().len().pow(2);
        let r = chi.multiplicativity_residual(self.carrier)?;
        Ok(r / norm_max(&self.chi(chi)?).max(1.0))
    }

    /// Relative additivity defect of `a` on window pairs inside `dom`;
    /// `None` when `a` is undefined somewhere in `dom`.
    fn additive_on(&mut self, a: &AdditiveFn, dom: &Region) -> Result<Option<f64>> {
        let w = self.carrier.window();
        let scale = opt_max(&self.add(a)?).max(1.0);
        let mut worst = 0f64;
        for x in w.iter().filter(|x| dom.contains(x)) {
            for y in w.iter().filter(|y| dom.contains(y)) {
                let xy = self.carrier.compose(x, y)?;
                self.checked += 1;
                match (a.eval(x)?, a.eval(y)?, a.eval(&xy)?) {
                    (Some(ax), Some(ay), Some(axy)) => worst = worst.max((axy - ax - ay).norm()),
                    _ => return Ok(None),
                }
            }
        }
        Ok(Some(worst / scale))
    }

    /// Indices of sample points inside `dom`.
    fn inside(&self, dom: &Region) -> Vec<usize> {
        (0..self.pts.len()).filter(|&i| dom.contains(&self.pts[i])).collect()
    }

    /// Values of the span on the points, fitting coefficients to `target`
    /// over `rows` when none are given.
    fn span(&self, span: &Span, target: &[C64], rows: &[usize]) -> Result<Vec<C64>> {
        let cols: Vec<Vec<C64>> = span.chars.iter().map(|c| self.chi(c)).collect::<Result<_>>()?;
        let coefs = match &span.coefs {
            Some(k) if k.len() == cols.len() => k.clone(),
            Some(_) => return Err(Error::Malformed("coefficient and character counts differ".into())),
            None if cols.is_empty() || rows.is_empty() => vec![ZERO; cols.len()],
            None => {
                let a = CMat::from_fn(rows.len(), cols.len(), |i, j| cols[j][rows[i]]);
                let b = CVec::from_iterator(rows.len(), rows.iter().map(|&i| target[i]));
                lstsq(&a, &b, 1e-14).iter().copied().collect()
            }
        };
        Ok((0..self.pts.len()).map(|i| cols.iter().zip(&coefs).map(|(col, k)| k * col[i]).sum()).collect())
    }

    /// Largest |a - b| over `rows`.
    fn gap(&mut self, a: &[C64], b: &[C64], rows: &[usize]) -> f64 {
        self.checked += rows.len();
        rows.iter().map(|&i| (a[i] - b[i]).norm()).fold(0.0, f64::max)
    }

    /// Checks |v| <= tol * scale on `rows`; returns the worst violation.
    fn vanishes(&mut self, what: &str, v: &[C64], rows: &[usize], scale: f64) -> Option<Counterexample> {
        self.checked += rows.len();
        let bound = ORACLE_TOL * scale;
        let (i, m) =
            rows.iter().map(|&i| (i, v[i].norm())).fold((usize::MAX, 0.0), |b, p| if p.1 > b.1 { p } else { b });
        (m > bound).then(|| Counterexample {
            element: Some(self.carrier.show(&self.pts[i])),
            quantity: what.to_string(),
            magnitude: m,
            bound,
        })
    }
}

fn phi_sum_sq(a1: &AdditiveFn, a: &AdditiveFn) -> Phi {
    Phi::Combo(vec![(ONE, Phi::Add(a1.clone())), (ONE, Phi::Square(a.clone()))])
}

fn complement(mu: &Character) -> Region {
    let mu = mu.clone();
    Region::new("S\\I_mu", move |x| !mu.in_null_ideal(x))
}

fn both(a: &Region, b: &Region) -> Region {
    let (a2, b2) = (a.clone(), b.clone());
    Region::new(&format!("{}∩{}", a.name, b.name), move |x| a2.contains(x) && b2.contains(x))
}

/// Values of an additive function with undefined points read as zero; only
/// used where the domain check has already passed.
fn dense(v: &[Option<C64>]) -> Vec<C64> {
    v.iter().map(|z| z.unwrap_or(ZERO)).collect()
}

/// Premise shared by every oracle taking characters: nonzero where required
/// and multiplicative on the window.
fn check_chars(p: &mut Probe, chars: &[(&str, &Character, bool)]) -> Result<Option<OracleVerdict>> {
    for (name, chi, nonzero) in chars {
        if *nonzero && chi.is_zero() {
            return Ok(Some(p.not_applicable(format!("{name} is the zero character"), None)));
        }
        let r = p.multiplicative(chi)?;
        if r > ORACLE_TOL {
            return Ok(Some(p.not_applicable(format!("{name} is not multiplicative"), Some(r))));
        }
    }
    Ok(None)
}

/// Premise: each additive function is defined and additive on its domain.
fn check_adds(p: &mut Probe, adds: &[(&str, &AdditiveFn, &Region)]) -> Result<Option<OracleVerdict>> {
    for (name, a, dom) in adds {
        match p.additive_on(a, dom)? {
            None => return Ok(Some(p.not_applicable(format!("{name} is undefined on {}", dom.name), None))),
            Some(r) if r > ORACLE_TOL => {
                return Ok(Some(p.not_applicable(format!("{name} is not additive on {}", dom.name), Some(r))))
            }
            _ => {}
        }
        let rows = p.inside(dom);
        let vals = p.add(a)?;
        if rows.iter().any(|&i| vals[i].is_none()) {
            return Ok(Some(p.not_applicable(format!("{name} is undefined on {}", dom.name), None)));
        }
    }
    Ok(None)
}

/// An ingredient undefined at a sample point fails the premises.
fn undefined_is_premise(oracle: &str, r: Result<OracleVerdict>) -> Result<OracleVerdict> {
    match r {
        Err(Error::Undefined(x)) => Ok(OracleVerdict {
            oracle: oracle.to_string(),
            holds: true,
            status: Status::NotApplicable,
            hypothesis_residual: None,
            reason: Some(format!("an ingredient is undefined at {x}")),
            note: None,
            counterexample: None,
            checked_count: 0,
        }),
        other => other,
    }
}

macro_rules! premise {
    ($e:expr) => {
        if let Some(v) = $e? {
            return Ok(v);
        }
    };
}

/// An additive function on T vanishing on T ∩ I vanishes on T.
pub fn oracle_lemma31(carrier: &Carrier, t: &Region, ideal: &Region, a: &AdditiveFn) -> Result<OracleVerdict> {
    undefined_is_premise("lemma31", lemma31(carrier, t, ideal, a))
}

fn lemma31(carrier: &Carrier, t: &Region, ideal: &Region, a: &AdditiveFn) -> Result<OracleVerdict> {
    let mut p = Probe::new(carrier, "lemma31")?;
    let w = carrier.window().to_vec();
    for x in &w {
        for y in &w {
            let xy = carrier.compose(x, y)?;
            let yx = carrier.compose(y, x)?;
            p.checked += 1;
            if t.contains(x) && t.contains(y) && !t.contains(&xy) {
                return Ok(p.not_applicable(
                    format!("{} is not closed at {}*{}", t.name, carrier.show(x), carrier.show(y)),
                    None,
                ));
            }
            if ideal.contains(x) && !(ideal.contains(&xy) && ideal.contains(&yx)) {
                return Ok(
                    p.not_applicable(format!("{} absorbs neither side at {}", ideal.name, carrier.show(x)), None)
                );
            }
        }
    }
    let meet = p.inside(&both(t, ideal));
    if meet.is_empty() {
        return Ok(p.not_applicable(format!("{} ∩ {} is empty", t.name, ideal.name), None));
    }
    premise!(check_adds(&mut p, &[("a", a, t)]));
    let on_t = p.inside(t);
    let vals = dense(&p.add(a)?);
    let scale = on_t.iter().map(|&i| vals[i].norm()).fold(1.0, f64::max);
    let hyp = meet.iter().map(|&i| vals[i].norm()).fold(0.0, f64::max) / scale;
    p.checked += meet.len();
    if hyp > ORACLE_TOL {
        return Ok(p.not_applicable("a does not vanish on T∩I", Some(hyp)));
    }
    Ok(match p.vanishes("a on T", &vals, &on_t, scale) {
        Some(cx) => p.failed(Some(hyp), cx),
        None => p.holds(Some(hyp), None),
    })
}

/// `sum mu_i A_i = sum c_j chi_j` with distinct mu_i forces every
/// `mu_i A_i = 0`.
pub fn oracle_lemma32(carrier: &Carrier, mus: &[Character], adds: &[AdditiveFn], span: &Span) -> Result<OracleVerdict> {
    lemma32_like(carrier, "lemma32", mus, adds, span, true)
}

/// Two-term variant without distinctness: the sum itself vanishes.
pub fn oracle_pair_sum(
    carrier: &Carrier,
    mus: [&Character; 2],
    adds: [&AdditiveFn; 2],
    span: &Span,
) -> Result<OracleVerdict> {
    let mus = [mus[0].clone(), mus[1].clone()];
    let adds = [adds[0].clone(), adds[1].clone()];
    lemma32_like(carrier, "pair-sum", &mus, &adds, span, false)
}

fn lemma32_like(
    carrier: &Carrier,
    name: &str,
    mus: &[Character],
    adds: &[AdditiveFn],
    span: &Span,
    termwise: bool,
) -> Result<OracleVerdict> {
    undefined_is_premise(name, lemma32_inner(carrier, name, mus, adds, span, termwise))
}

fn lemma32_inner(
    carrier: &Carrier,
    name: &str,
    mus: &[Character],
    adds: &[AdditiveFn],
    span: &Span,
    termwise: bool,
) -> Result<OracleVerdict> {
    let mut p = Probe::new(carrier, name)?;
    if mus.len() != adds.len() || mus.is_empty() {
        return Err(Error::Malformed("need one additive function per character".into()));
    }
    let labels: Vec<String> = (1..=mus.len()).map(|i| format!("mu{i}")).collect();
    let mut chars: Vec<(&str, &Character, bool)> =
        mus.iter().zip(&labels).map(|(m, l)| (l.as_str(), m, false)).collect();
    let span_labels: Vec<String> = (1..=span.chars.len()).map(|j| format!("chi{j}")).collect();
    chars.extend(span.chars.iter().zip(&span_labels).map(|(c, l)| (l.as_str(), c, false)));
    premise!(check_chars(&mut p, &chars));
    let all = Region::all();
    let a_labels: Vec<String> = (1..=adds.len()).map(|i| format!("A{i}")).collect();
    let add_list: Vec<(&str, &AdditiveFn, &Region)> =
        adds.iter().zip(&a_labels).map(|(a, l)| (l.as_str(), a, &all)).collect();
    premise!(check_adds(&mut p, &add_list));
    let mv: Vec<Vec<C64>> = mus.iter().map(|m| p.chi(m)).collect::<Result<_>>()?;
    let rows: Vec<usize> = (0..p.pts.len()).collect();
    if termwise {
        for i in 0..mus.len() {
            for k in 0..i {
                let scale = norm_max(&mv[i]).max(norm_max(&mv[k])).max(1.0);
                if p.gap(&mv[i], &mv[k], &rows) <= ORACLE_TOL * scale {
                    return Ok(p.not_applicable(format!("mu{} and mu{} coincide", k + 1, i + 1), None));
                }
            }
        }
    }
    let terms: Vec<Vec<C64>> = mv
        .iter()
        .zip(adds)
        .map(|(m, a)| Ok(m.iter().zip(dense(&p.add(a)?)).map(|(x, y)| x * y).collect()))
        .collect::<Result<_>>()?;
    let lhs = terms.iter().fold(vec![ZERO; p.pts.len()], |acc, t| sum(&acc, t));
    let rhs = p.span(span, &lhs, &rows)?;
    let scale = terms.iter().map(|t| norm_max(t)).fold(norm_max(&rhs), f64::max).max(1.0);
    let hyp = p.gap(&lhs, &rhs, &rows) / scale;
    if hyp > ORACLE_TOL {
        return Ok(p.not_applicable("the sum is not in the span of the characters", Some(hyp)));
    }
    let found = if termwise {
        terms.iter().enumerate().find_map(|(i, t)| p.vanishes(&format!("mu{0} A{0}", i + 1), t, &rows, scale))
    } else {
        p.vanishes("mu1 A1 + mu2 A2", &lhs, &rows, scale)
    };
    Ok(match found {
        Some(cx) => p.failed(Some(hyp), cx),
        None => p.holds(Some(hyp), None),
    })
}

/// Ingredients of the seven parts on extensions by zero.
#[derive(Clone, Debug)]
pub enum Prop33 {
    /// Linearity `Psi(l phi1 + phi2) = l Psi(phi1) + Psi(phi2)`, and
    /// injectivity: `Psi(phi1) = 0` forces `phi1 = 0` off the null ideal.
    Injective { mu: Character, phi1: Phi, phi2: Phi, lambda: C64 },
    /// `Psi_mu(A)` in a character span on T vanishes on T.
    SpanOnSubsemigroup { mu: Character, a: AdditiveFn, t: Region, span: Span },
    /// `Psi_mu1(A1) + Psi_mu2(A2)` in a character span vanishes.
    TwoExtensions { mu1: Character, a1: AdditiveFn, mu2: Character, a2: AdditiveFn, span: Span },
    /// `Psi_mu(a1 + a^2)` in a span on `(S \ I_mu) ∩ T` forces `a1 = a = 0` there.
    QuadraticOnSubsemigroup { mu: Character, a1: AdditiveFn, a: AdditiveFn, t: Region, span: Span },
    /// `Psi_mu1(a1 + a^2) + Psi_mu(A)` in a span forces `a = 0`.
    QuadraticPlusLinear { mu1: Character, a1: AdditiveFn, a: AdditiveFn, mu: Character, big_a: AdditiveFn, span: Span },
    /// `Psi_mu(A) = Psi_mu1(a1 + a^2)` forces `a = 0`.
    LinearEqualsQuadratic { mu: Character, big_a: AdditiveFn, mu1: Character, a1: AdditiveFn, a: AdditiveFn },
    /// `Psi_mu1(a1 + a^2) = Psi_mu(A1 + A^2)` with `a, A != 0` forces
    /// `mu = mu1`, `a1 = A1`, `a = ±A`.
    QuadraticIdentity {
        mu1: Character,
        a1: AdditiveFn,
        a: AdditiveFn,
        mu: Character,
        big_a1: AdditiveFn,
        big_a: AdditiveFn,
    },
}

impl Prop33 {
    pub fn part(&self) -> usize {
        match self {
            Prop33::Injective { .. } => 1,
            Prop33::SpanOnSubsemigroup { .. } => 2,
            Prop33::TwoExtensions { .. } => 3,
            Prop33::QuadraticOnSubsemigroup { .. } => 4,
            Prop33::QuadraticPlusLinear { .. } => 5,
            Prop33::LinearEqualsQuadratic { .. } => 6,
            Prop33::QuadraticIdentity { .. } => 7,
        }
    }
}

pub fn oracle_prop33(carrier: &Carrier, case: &Prop33) -> Result<OracleVerdict> {
    let name = format!("prop33.{}", case.part());
    undefined_is_premise(&name, prop33(carrier, &name, case))
}

fn prop33(carrier: &Carrier, name: &str, case: &Prop33) -> Result<OracleVerdict> {
    let mut p = Probe::new(carrier, name)?;
    let rows: Vec<usize> = (0..p.pts.len()).collect();
    let verdict = |p: &Probe, hyp: f64, found: Option<Counterexample>, note: Option<String>| match found {
        Some(cx) => p.failed(Some(hyp), cx),
        None => p.holds(Some(hyp), note),
    };
    match case {
        Prop33::Injective { mu, phi1, phi2, lambda } => {
            premise!(check_chars(&mut p, &[("mu", mu, true)]));
            let off = p.inside(&complement(mu));
            let v1 = p.psi(mu, phi1)?;
            let v2 = p.psi(mu, phi2)?;
            let combo = p.psi(mu, &Phi::Combo(vec![(*lambda, phi1.clone()), (ONE, phi2.clone())]))?;
            let expect: Vec<C64> = v1.iter().zip(&v2).map(|(a, b)| lambda * a + b).collect();
            let scale = norm_max(&combo).max(norm_max(&expect)).max(1.0);
            let diff: Vec<C64> = combo.iter().zip(&expect).map(|(a, b)| a - b).collect();
            if let Some(cx) = p.vanishes("Psi(l phi1 + phi2) - l Psi(phi1) - Psi(phi2)", &diff, &rows, scale) {
                return Ok(p.failed(None, cx));
            }
            let raw: Vec<C64> = p.pts.iter().map(|x| phi1.eval(x).map(|v| v.unwrap_or(ZERO))).collect::<Result<_>>()?;
            let s1 = norm_max(&raw).max(norm_max(&v1)).max(1.0);
            let hyp = norm_max(&v1) / s1;
            p.checked += rows.len();
            if hyp > ORACLE_TOL {
                return Ok(p.holds(Some(hyp), Some("linear; injectivity premise not met".into())));
            }
            let found = p.vanishes("phi1 off the null ideal", &raw, &off, s1);
            Ok(verdict(&p, hyp, found, Some("linear; injectivity premise met".into())))
        }
        Prop33::SpanOnSubsemigroup { mu, a, t, span } => {
            premise!(check_chars(&mut p, &[("mu", mu, true)]));
            premise!(check_adds(&mut p, &[("A", a, &complement(mu))]));
            let on_t = p.inside(t);
            if on_t.is_empty() {
                return Ok(p.not_applicable(format!("{} has no sample points", t.name), None));
            }
            let lhs = p.psi(mu, &Phi::Add(a.clone()))?;
            let rhs = p.span(span, &lhs, &on_t)?;
            let scale = norm_max(&lhs).max(norm_max(&rhs)).max(1.0);
            let hyp = p.gap(&lhs, &rhs, &on_t) / scale;
            if hyp > ORACLE_TOL {
                return Ok(p.not_applicable("Psi_mu(A) is not in the span on T", Some(hyp)));
            }
            let found = p.vanishes("Psi_mu(A) on T", &lhs, &on_t, scale);
            Ok(verdict(&p, hyp, found, None))
        }
        Prop33::TwoExtensions { mu1, a1, mu2, a2, span } => {
            premise!(check_chars(&mut p, &[("mu1", mu1, true), ("mu2", mu2, true)]));
            premise!(check_adds(&mut p, &[("A1", a1, &complement(mu1)), ("A2", a2, &complement(mu2))]));
            let (m1, m2) = (p.chi(mu1)?, p.chi(mu2)?);
            if p.gap(&m1, &m2, &rows) <= ORACLE_TOL * norm_max(&m1).max(1.0) {
                return Ok(p.not_applicable("mu1 and mu2 coincide", None));
            }
            let t1 = p.psi(mu1, &Phi::Add(a1.clone()))?;
            let t2 = p.psi(mu2, &Phi::Add(a2.clone()))?;
            let lhs = sum(&t1, &t2);
            let rhs = p.span(span, &lhs, &rows)?;
            let scale = norm_max(&t1).max(norm_max(&t2)).max(norm_max(&rhs)).max(1.0);
            let hyp = p.gap(&lhs, &rhs, &rows) / scale;
            if hyp > ORACLE_TOL {
                return Ok(p.not_applicable("the sum is not in the span", Some(hyp)));
            }
            let found = p.vanishes("Psi_mu1(A1) + Psi_mu2(A2)", &lhs, &rows, scale);
            Ok(verdict(&p, hyp, found, None))
        }
        Prop33::QuadraticOnSubsemigroup { mu, a1, a, t, span } => {
            premise!(check_chars(&mut p, &[("mu", mu, true)]));
            let off = complement(mu);
            premise!(check_adds(&mut p, &[("a1", a1, &off), ("a", a, &off)]));
            let dom = p.inside(&both(&off, t));
            if dom.is_empty() {
                return Ok(p.not_applicable("(S\\I_mu) ∩ T is empty", None));
            }
            let lhs = p.psi(mu, &phi_sum_sq(a1, a))?;
            let rhs = p.span(span, &lhs, &dom)?;
            let (v1, v) = (dense(&p.add(a1)?), dense(&p.add(a)?));
            let scale = [norm_max(&lhs), norm_max(&rhs), norm_max(&v1), norm_max(&v)].into_iter().fold(1.0, f64::max);
            let hyp = p.gap(&lhs, &rhs, &dom) / scale;
            if hyp > ORACLE_TOL {
                return Ok(p.not_applicable("Psi_mu(a1 + a^2) is not in the span there", Some(hyp)));
            }
            let found = p.vanishes("a1", &v1, &dom, scale).or_else(|| p.vanishes("a", &v, &dom, scale));
            Ok(verdict(&p, hyp, found, None))
        }
        Prop33::QuadraticPlusLinear { mu1, a1, a, mu, big_a, span } => {
            premise!(check_chars(&mut p, &[("mu1", mu1, true), ("mu", mu, true)]));
            let (off1, off) = (complement(mu1), complement(mu));
            premise!(check_adds(&mut p, &[("a1", a1, &off1), ("a", a, &off1), ("A", big_a, &off)]));
            let q = p.psi(mu1, &phi_sum_sq(a1, a))?;
            let l = p.psi(mu, &Phi::Add(big_a.clone()))?;
            let lhs = sum(&q, &l);
            let rhs = p.span(span, &lhs, &rows)?;
            let v = dense(&p.add(a)?);
            let scale = [norm_max(&q), norm_max(&l), norm_max(&rhs), norm_max(&v)].into_iter().fold(1.0, f64::max);
            let hyp = p.gap(&lhs, &rhs, &rows) / scale;
            if hyp > ORACLE_TOL {
                return Ok(p.not_applicable("the sum is not in the span", Some(hyp)));
            }
            let found = p.vanishes("a", &v, &p.inside(&off1), scale);
            Ok(verdict(&p, hyp, found, None))
        }
        Prop33::LinearEqualsQuadratic { mu, big_a, mu1, a1, a } => {
            premise!(check_chars(&mut p, &[("mu", mu, true), ("mu1", mu1, true)]));
            let (off1, off) = (complement(mu1), complement(mu));
            premise!(check_adds(&mut p, &[("A", big_a, &off), ("a1", a1, &off1), ("a", a, &off1)]));
            let l = p.psi(mu, &Phi::Add(big_a.clone()))?;
            let q = p.psi(mu1, &phi_sum_sq(a1, a))?;
            let v = dense(&p.add(a)?);
            let scale = [norm_max(&l), norm_max(&q), norm_max(&v)].into_iter().fold(1.0, f64::max);
            let hyp = p.gap(&l, &q, &rows) / scale;
            if hyp > ORACLE_TOL {
                return Ok(p.not_applicable("the two extensions differ", Some(hyp)));
            }
            let found = p.vanishes("a", &v, &p.inside(&off1), scale);
            Ok(verdict(&p, hyp, found, None))
        }
        Prop33::QuadraticIdentity { mu1, a1, a, mu, big_a1, big_a } => {
            premise!(check_chars(&mut p, &[("mu1", mu1, true), ("mu", mu, true)]));
            let (off1, off) = (complement(mu1), complement(mu));
            premise!(check_adds(
                &mut p,
                &[("a1", a1, &off1), ("a", a, &off1), ("A1", big_a1, &off), ("A", big_a, &off)]
            ));
            let vals: Vec<Vec<C64>> =
                [a1, a, big_a1, big_a].iter().map(|f| Ok(dense(&p.add(f)?))).collect::<Result<_>>()?;
            let floor = vals.iter().map(|v| norm_max(v)).fold(1.0, f64::max);
            if norm_max(&vals[1]) <= ORACLE_TOL * floor || norm_max(&vals[3]) <= ORACLE_TOL * floor {
                return Ok(p.not_applicable("a or A vanishes", None));
            }
            let lhs = p.psi(mu1, &phi_sum_sq(a1, a))?;
            let rhs = p.psi(mu, &phi_sum_sq(big_a1, big_a))?;
            let (m1, m) = (p.chi(mu1)?, p.chi(mu)?);
            let scale =
                [norm_max(&lhs), norm_max(&rhs), norm_max(&m1), norm_max(&m), floor].into_iter().fold(1.0, f64::max);
            let hyp = p.gap(&lhs, &rhs, &rows) / scale;
            if hyp > ORACLE_TOL {
                return Ok(p.not_applicable("the two extensions differ", Some(hyp)));
            }
            let dm: Vec<C64> = m1.iter().zip(&m).map(|(x, y)| x - y).collect();
            if let Some(cx) = p.vanishes("mu1 - mu", &dm, &rows, scale) {
                return Ok(p.failed(Some(hyp), cx));
            }
            let dom = p.inside(&off1);
            let d1: Vec<C64> = vals[0].iter().zip(&vals[2]).map(|(x, y)| x - y).collect();
            if let Some(cx) = p.vanishes("a1 - A1", &d1, &dom, scale) {
                return Ok(p.failed(Some(hyp), cx));
            }
            let minus: Vec<C64> = vals[1].iter().zip(&vals[3]).map(|(x, y)| x - y).collect();
            let plus: Vec<C64> = vals[1].iter().zip(&vals[3]).map(|(x, y)| x + y).collect();
            let (gm, gp) = (p.gap(&minus, &vec![ZERO; minus.len()], &dom), p.gap(&plus, &vec![ZERO; plus.len()], &dom));
            let (branch, diff) = if gm <= gp { ("a=A", &minus) } else { ("a=-A", &plus) };
            let found = p.vanishes(&format!("{branch} branch"), diff, &dom, scale);
            Ok(verdict(&p, hyp, found, Some(branch.to_string())))
        }
    }
}

/// Ingredients of the three parts on sine-law solution spaces S_g.
#[derive(Clone, Debug)]
pub enum Prop34 {
    /// Members f1, f2 of S_g give `alpha f1 + f2` in S_g.
    Closure { g: ComplexFn, f1: ComplexFn, f2: ComplexFn, alpha: C64 },
    /// A nonzero f in S_g ∩ S_h forces g = h.
    SharedMember { f: ComplexFn, g: ComplexFn, h: ComplexFn },
    /// `Psi_chi(a) = Psi_mu(A)` with a != 0 forces chi = mu and a = A.
    EqualExtensions { chi: Character, a: AdditiveFn, mu: Character, big_a: AdditiveFn },
}

impl Prop34 {
    pub fn part(&self) -> usize {
        match self {
            Prop34::Closure { .. } => 1,
            Prop34::SharedMember { .. } => 2,
            Prop34::EqualExtensions { .. } => 3,
        }
    }
}

/// Relative sine-law defect of f against g over window pairs.
fn membership(p: &mut Probe, f: &ComplexFn, g: &ComplexFn) -> Result<f64> {
    let w = p.carrier.window().to_vec();
    let mut worst = 0f64;
    let mut scale = 1f64;
    for x in &w {
        for y in &w {
            let xy = p.carrier.compose(x, y)?;
            let (fx, fy, gx, gy, fxy) = (f.eval(x)?, f.eval(y)?, g.eval(x)?, g.eval(y)?, f.eval(&xy)?);
            let terms = [fxy, fx * gy, gx * fy];
            scale = terms.iter().map(|z| z.norm()).fold(scale, f64::max);
            worst = worst.max((terms[0] - terms[1] - terms[2]).norm());
            p.checked += 1;
        }
    }
    Ok(worst / scale)
}

pub fn oracle_prop34(carrier: &Carrier, case: &Prop34) -> Result<OracleVerdict> {
    let name = format!("prop34.{}", case.part());
    undefined_is_premise(&name, prop34(carrier, &name, case))
}

fn prop34(carrier: &Carrier, name: &str, case: &Prop34) -> Result<OracleVerdict> {
    let mut p = Probe::new(carrier, name)?;
    let rows: Vec<usize> = (0..p.pts.len()).collect();
    match case {
        Prop34::Closure { g, f1, f2, alpha } => {
            let hyp = membership(&mut p, f1, g)?.max(membership(&mut p, f2, g)?);
            if hyp > ORACLE_TOL {
                return Ok(p.not_applicable("f1 or f2 is not in S_g", Some(hyp)));
            }
            let combo = ComplexFn::combine(&[(*alpha, f1), (ONE, f2)]);
            let r = membership(&mut p, &combo, g)?;
            if r > ORACLE_TOL {
                let cx = Counterexample {
                    element: None,
                    quantity: "sine-law defect of alpha f1 + f2".into(),
                    magnitude: r,
                    bound: ORACLE_TOL,
                };
                return Ok(p.failed(Some(hyp), cx));
            }
            Ok(p.holds(Some(hyp), None))
        }
        Prop34::SharedMember { f, g, h } => {
            let fv = p.fun(f)?;
            let (gv, hv) = (p.fun(g)?, p.fun(h)?);
            let scale = [norm_max(&fv), norm_max(&gv), norm_max(&hv)].into_iter().fold(1.0, f64::max);
            if norm_max(&fv) <= ORACLE_TOL * scale {
                return Ok(p.not_applicable("f vanishes", None));
            }
            let hyp = membership(&mut p, f, g)?.max(membership(&mut p, f, h)?);
            if hyp > ORACLE_TOL {
                return Ok(p.not_applicable("f is not in both S_g and S_h", Some(hyp)));
            }
            let diff: Vec<C64> = gv.iter().zip(&hv).map(|(x, y)| x - y).collect();
            let window: Vec<usize> = (0..carrier.window().len()).collect();
            Ok(match p.vanishes("g - h", &diff, &window, scale) {
                Some(cx) => p.failed(Some(hyp), cx),
                None => p.holds(Some(hyp), None),
            })
        }
        Prop34::EqualExtensions { chi, a, mu, big_a } => {
            premise!(check_chars(&mut p, &[("chi", chi, true), ("mu", mu, true)]));
            let (offc, offm) = (complement(chi), complement(mu));
            premise!(check_adds(&mut p, &[("a", a, &offc), ("A", big_a, &offm)]));
            let (av, bv) = (dense(&p.add(a)?), dense(&p.add(big_a)?));
            let (cv, mv) = (p.chi(chi)?, p.chi(mu)?);
            let scale = [norm_max(&av), norm_max(&bv), norm_max(&cv), norm_max(&mv)].into_iter().fold(1.0, f64::max);
            if norm_max(&av) <= ORACLE_TOL * scale {
                return Ok(p.not_applicable("a vanishes", None));
            }
            let l = p.psi(chi, &Phi::Add(a.clone()))?;
            let r = p.psi(mu, &Phi::Add(big_a.clone()))?;
            let hyp = p.gap(&l, &r, &rows) / scale.max(norm_max(&l)).max(norm_max(&r));
            if hyp > ORACLE_TOL {
                return Ok(p.not_applicable("the extensions differ", Some(hyp)));
            }
            let dc: Vec<C64> = cv.iter().zip(&mv).map(|(x, y)| x - y).collect();
            let da: Vec<C64> = av.iter().zip(&bv).map(|(x, y)| x - y).collect();
            let dom = p.inside(&offc);
            let found = p.vanishes("chi - mu", &dc, &rows, scale).or_else(|| p.vanishes("a - A", &da, &dom, scale));
            Ok(match found {
                Some(cx) => p.failed(Some(hyp), cx),
                None => p.holds(Some(hyp), None),
            })
        }
    }
}
