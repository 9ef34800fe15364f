//! Recognising the templates a given solution belongs to.
//!
//! Characters are recovered first (enumeration on finite carriers, Prony
//! analysis along lines on the analytic ones), each component is then
//! decomposed over characters and extensions by zero, and every template
//! proposes parameters algebraically from those coefficients. A proposal
//! counts only if rebuilding the template reproduces the input pointwise.

pub mod prony;

use crate::carrier::{Carrier, Element, Kind};
use crate::error::{Error, Result};
use crate::families::templates::variant;
use crate::families::{
    build_unchecked, info, validate_constraints, verify_solution, AddRole, ErrataMode, FamilyId, FamilyParams, Role,
    Shape, Solution, Sym,
};
use crate::funcspace::{
    additive_basis, character_to_json, enumerate_characters, AddForm, AdditiveFn, CharForm, Character, ComplexFn,
};
use crate::laws::{lambda_json, Grid, Quadruple};
use crate::linalg::{lstsq, CMat, CVec};
use crate::scalar::{sqrt, C64, ONE, ZERO};
use serde_json::{json, Value};
use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::rc::Rc;

/// Pointwise relative mismatch accepted for a match.
pub const MATCH_TOL: f64 = 1e-9;
/// Slack for scalar constraint equations of recovered parameters.
pub const CONSTRAINT_SLACK: f64 = 1e-8;
/// Near misses below this are polished by Gauss-Newton.
const POLISH_BELOW: f64 = 1e-5;
/// Samples along each line: k = -9..=10.
const LINE: std::ops::RangeInclusive<i32> = -9..=10;
/// Ratio between consecutive sample points on the nonnegative reals.
const LOG_STEP: f64 = 0.5;
const WEIGHTS: [C64; 4] = [C64::new(1.0, 0.0), C64::new(0.71, 0.29), C64::new(0.53, -0.41), C64::new(-0.37, 0.83)];

/// One recognised template.
#[derive(Clone, Debug)]
pub struct Match {
    pub id: FamilyId,
    pub params: FamilyParams,
    pub fit_residual: f64,
    /// Other canonical parameter sets reproducing the same solution.
    pub alternatives: Vec<FamilyParams>,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub lambda1: C64,
    pub lambda2: C64,
    pub candidates: Vec<Character>,
    pub matches: Vec<Match>,
    pub square_generated: bool,
}

impl Classification {
    pub fn unmatched(&self) -> bool {
        self.matches.is_empty()
    }

    pub fn find(&self, id: FamilyId) -> Option<&Match> {
        self.matches.iter().find(|m| m.id == id)
    }

    pub fn to_json(&self, carrier: &Carrier) -> Value {
        let matches: Vec<Value> = self
            .matches
            .iter()
            .map(|m| {
                json!({
                    "family": m.id.key(),
                    "params": m.params.to_json(carrier),
                    "fit_residual": m.fit_residual,
                    "alternatives": m.alternatives.iter().map(|p| p.to_json(carrier)).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "schema": crate::SCHEMA_VERSION,
            "lambdas": lambda_json(self.lambda1, self.lambda2),
            "square_generated": self.square_generated,
            "candidate_characters": self.candidates.iter().map(|c| character_to_json(carrier, c)).collect::<Vec<_>>(),
            "matches": matches,
            "unmatched": self.unmatched(),
        })
    }
}

// ---------------------------------------------------------------- characters

fn combined(comps: &[&ComplexFn], x: &Element) -> Result<C64> {
    let mut acc = ZERO;
    for (f, w) in comps.iter().zip(WEIGHTS.iter().cycle()) {
        acc += w * f.eval(x)?;
    }
    Ok(acc)
}

fn line_roots(comps: &[&ComplexFn], point: impl Fn(i32) -> Element) -> Result<Vec<C64>> {
    let ks: Vec<i32> = LINE.collect();
    let u = ks.iter().map(|&k| combined(comps, &point(k))).collect::<Result<Vec<_>>>()?;
    Ok(prony::modes(&ks, &u).into_iter().map(|m| m.root).collect())
}

fn push_distinct(out: &mut Vec<Character>, chi: Character) {
    if out.iter().all(|c| c.form_gap(&chi) > 1e-7) {
        out.push(chi);
    }
}

/// Characters that may occur in the given components.
///
/// Finite carriers: every nonzero character. rat-add: exponents along the
/// axes, paired through the diagonals e1+ei. nonneg-real-mul: exponents along
/// a geometric progression; a root at 1 yields both the all-ones character
/// and x^0.
pub fn recover_characters(carrier: &Carrier, comps: &[&ComplexFn]) -> Result<Vec<Character>> {
    match carrier.kind {
        Kind::Finite => Ok(enumerate_characters(carrier)?.into_iter().filter(|c| !c.is_zero()).collect()),
        Kind::RatAdd { dim } => {
            let along = |dir: Vec<i64>| {
                line_roots(comps, move |k| Element::rat(&dir.iter().map(|&d| (d * k as i64, 1)).collect::<Vec<_>>()))
            };
            let unit = |i: usize| (0..dim).map(|j| i64::from(j == i)).collect::<Vec<i64>>();
            let axes = (0..dim).map(|i| along(unit(i))).collect::<Result<Vec<_>>>()?;
            let diagonals = (1..dim)
                .map(|i| along((0..dim).map(|j| i64::from(j == 0 || j == i)).collect()))
                .collect::<Result<Vec<_>>>()?;
            let mut partial: Vec<Vec<C64>> = axes[0].iter().map(|&z| vec![z]).collect();
            for i in 1..dim {
                let mut next = vec![];
                for p in &partial {
                    for &zi in &axes[i] {
                        let prod = p[0] * zi;
                        if diagonals[i - 1].iter().any(|d| (d - prod).norm() <= 1e-6 * d.norm().max(1.0)) {
                            let mut q = p.clone();
                            q.push(zi);
                            next.push(q);
                        }
                    }
                }
                partial = next;
            }
            let mut out = vec![];
            for zs in partial {
                push_distinct(&mut out, Character::exp(zs.iter().map(|z| z.ln()).collect()));
            }
            Ok(out)
        }
        Kind::NonnegRealMul => {
            let roots = line_roots(comps, |k| Element::Real((LOG_STEP * k as f64).exp()))?;
            let mut out = vec![];
            for z in roots {
                let s = z.ln() / LOG_STEP;
                if s.norm() < 1e-7 {
                    push_distinct(&mut out, Character::ones());
                    push_distinct(&mut out, Character::power(ZERO));
                } else {
                    push_distinct(&mut out, Character::power(s));
                }
            }
            Ok(out)
        }
    }
}

// ------------------------------------------------------------- decomposition

/// Additive basis usable inside Psi_chi on this carrier.
fn additive_directions(carrier: &Carrier, chi: &Character) -> Vec<AdditiveFn> {
    match (&carrier.kind, &chi.form) {
        (Kind::RatAdd { dim }, CharForm::Exp(_)) => (0..*dim)
            .map(|i| AdditiveFn::linear((0..*dim).map(|j| if i == j { ONE } else { ZERO }).collect()))
            .collect(),
        (Kind::NonnegRealMul, CharForm::Power(_)) => vec![AdditiveFn::log(ONE)],
        (Kind::Finite, CharForm::Table(v)) => {
            let domain: Vec<usize> = (0..v.len()).filter(|&i| v[i] != ZERO).collect();
            match additive_basis(carrier, Some(&domain)) {
                Ok(b) => b.functions(v.len()),
                Err(_) => vec![],
            }
        }
        _ => vec![],
    }
}

/// Linear combination of additive functions of one form.
fn combine_additive(dirs: &[AdditiveFn], coeffs: &[C64]) -> AdditiveFn {
    match dirs.first().map(|a| &a.form) {
        Some(AddForm::Linear(_)) => {
            let mut alpha = vec![ZERO; dirs.len()];
            for (d, k) in dirs.iter().zip(coeffs) {
                if let AddForm::Linear(v) = &d.form {
                    for (a, x) in alpha.iter_mut().zip(v) {
                        *a += k * x;
                    }
                }
            }
            AdditiveFn::linear(alpha)
        }
        Some(AddForm::Log(_)) => {
            let mut a = ZERO;
            for (d, k) in dirs.iter().zip(coeffs) {
                if let AddForm::Log(x) = d.form {
                    a += k * x;
                }
            }
            AdditiveFn::log(a)
        }
        Some(AddForm::Table(first)) => {
            let mut vals: Vec<Option<C64>> = first.iter().map(|v| v.map(|_| ZERO)).collect();
            for (d, k) in dirs.iter().zip(coeffs) {
                if let AddForm::Table(v) = &d.form {
                    for (a, x) in vals.iter_mut().zip(v) {
                        if let (Some(a), Some(x)) = (a.as_mut(), x) {
                            *a += k * x;
                        }
                    }
                }
            }
            AdditiveFn { form: AddForm::Table(vals) }
        }
        _ => AdditiveFn::zero(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Col {
    Char(usize),
    Lin(usize, usize),
    Quad(usize, usize, usize),
}

impl Col {
    fn owner(&self) -> usize {
        match self {
            Col::Char(k) | Col::Lin(k, _) | Col::Quad(k, _, _) => *k,
        }
    }
}

/// Coefficients of every component over a set of columns.
struct Decomp {
    cols: Vec<Col>,
    coef: Vec<Vec<C64>>,
}

impl Decomp {
    fn find(&self, col: Col) -> Option<usize> {
        self.cols.iter().position(|c| *c == col)
    }

    fn get(&self, comp: usize, col: Col) -> C64 {
        self.find(col).map_or(ZERO, |i| self.coef[comp][i])
    }
}

fn column_value(cands: &[Character], dirs: &[Vec<AdditiveFn>], col: Col, x: &Element) -> Result<C64> {
    let add = |k: usize, i: usize| -> Result<C64> { Ok(dirs[k][i].eval(x)?.unwrap_or(ZERO)) };
    let k = col.owner();
    if !matches!(col, Col::Char(_)) && cands[k].in_null_ideal(x) {
        return Ok(ZERO);
    }
    Ok(match col {
        Col::Char(k) => cands[k].eval(x)?,
        Col::Lin(k, i) => cands[k].eval(x)? * add(k, i)?,
        Col::Quad(k, i, j) => cands[k].eval(x)? * add(k, i)? * add(k, j)?,
    })
}

/// Columns of one candidate: the character, then Psi monomials if asked.
fn columns_of(k: usize, ndirs: usize, lin: bool, quad: bool, out: &mut Vec<Col>) {
    out.push(Col::Char(k));
    if lin {
        out.extend((0..ndirs).map(|i| Col::Lin(k, i)));
    }
    if quad {
        for i in 0..ndirs {
            out.extend((i..ndirs).map(|j| Col::Quad(k, i, j)));
        }
    }
}

/// Sampled data of one solution, shared by all template fits.
struct Analysis {
    shape: Shape,
    lambda1: C64,
    lambda2: C64,
    points: Vec<Element>,
    target: Vec<Vec<C64>>,
    scale: f64,
    cands: Vec<Character>,
    dirs: Vec<Vec<AdditiveFn>>,
    /// Largest contribution of each candidate in the full decomposition,
    /// relative to the data scale.
    weight: Vec<f64>,
    cache: RefCell<BTreeMap<Vec<Col>, Rc<Decomp>>>,
}

fn sample_points(carrier: &Carrier) -> Result<Vec<Element>> {
    let grid = Grid::new(carrier)?;
    let mut pts: Vec<Element> = vec![];
    for x in carrier.window().iter().chain(&grid.products) {
        if !pts.contains(x) {
            pts.push(x.clone());
        }
    }
    Ok(pts)
}

fn shape_of(sol: &Solution) -> Shape {
    match sol {
        Solution::Sine { .. } => Shape::Sine,
        Solution::CosineSine { .. } => Shape::CosineSine,
        Solution::System(_) => Shape::Coupled,
    }
}

impl Analysis {
    fn new(carrier: &Carrier, sol: &Solution, l1: C64, l2: C64) -> Result<Analysis> {
        let comps = sol.components();
        let points = sample_points(carrier)?;
        let target: Vec<Vec<C64>> = comps
            .iter()
            .map(|f| points.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let scale = target.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let cands = recover_characters(carrier, &comps)?;
        let dirs: Vec<Vec<AdditiveFn>> = cands.iter().map(|c| additive_directions(carrier, c)).collect();
        let mut an = Analysis {
            shape: shape_of(sol),
            lambda1: l1,
            lambda2: l2,
            points,
            target,
            scale,
            cands,
            dirs,
            weight: vec![],
            cache: RefCell::new(BTreeMap::new()),
        };
        let mut cols = vec![];
        for (k, d) in an.dirs.iter().enumerate() {
            columns_of(k, d.len(), true, true, &mut cols);
        }
        let full = an.solve(cols)?;
        let mut weight = vec![0f64; an.cands.len()];
        for row in &full.1 {
            for (col, x) in full.0.cols.iter().zip(row) {
                weight[col.owner()] = weight[col.owner()].max(*x);
            }
        }
        an.weight = weight;
        Ok(an)
    }

    /// Least squares over `cols`; also returns each coefficient's
    /// contribution relative to the data scale.
    fn solve(&self, cols: Vec<Col>) -> Result<(Decomp, Vec<Vec<f64>>)> {
        let mut a = CMat::zeros(self.points.len(), cols.len());
        for (r, x) in self.points.iter().enumerate() {
            for (c, col) in cols.iter().enumerate() {
                a[(r, c)] = column_value(&self.cands, &self.dirs, *col, x)?;
            }
        }
        let norms: Vec<f64> =
            (0..cols.len()).map(|c| a.column(c).iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300)).collect();
        for (c, n) in norms.iter().enumerate() {
            a.column_mut(c).scale_mut(1.0 / n);
        }
        let mut coef = vec![];
        let mut contrib = vec![];
        for t in &self.target {
            let x = lstsq(&a, &CVec::from_column_slice(t), 1e-13);
            contrib.push(x.iter().map(|z| z.norm() / self.scale.max(1e-300)).collect());
            coef.push(x.iter().zip(&norms).map(|(z, n)| z / *n).collect());
        }
        Ok((Decomp { cols, coef }, contrib))
    }

    /// Decomposition restricted to the given columns (cached).
    fn restricted(&self, cols: Vec<Col>) -> Option<Rc<Decomp>> {
        if let Some(d) = self.cache.borrow().get(&cols) {
            return Some(d.clone());
        }
        let d = Rc::new(self.solve(cols.clone()).ok()?.0);
        self.cache.borrow_mut().insert(cols, d.clone());
        Some(d)
    }

    /// Relative pointwise mismatch between a rebuilt template and the data.
    fn mismatch(&self, id: FamilyId, p: &FamilyParams) -> Option<f64> {
        let inst = build_unchecked(id, p, self.lambda1, self.lambda2, ErrataMode::Corrected).ok()?;
        let mut worst = 0f64;
        for (f, t) in inst.solution.components().iter().zip(&self.target) {
            for (x, v) in self.points.iter().zip(t) {
                worst = worst.max((f.eval(x).ok()? - v).norm());
            }
        }
        let rel = if worst == 0.0 { 0.0 } else { worst / self.scale.max(1e-300) };
        rel.is_finite().then_some(rel)
    }

    /// Residual vector of a rebuilt template against the data.
    fn residuals(&self, id: FamilyId, p: &FamilyParams) -> Option<Vec<C64>> {
        let inst = build_unchecked(id, p, self.lambda1, self.lambda2, ErrataMode::Corrected).ok()?;
        let s = self.scale.max(1e-300);
        let mut out = Vec::with_capacity(self.target.len() * self.points.len());
        for (f, t) in inst.solution.components().iter().zip(&self.target) {
            for (x, v) in self.points.iter().zip(t) {
                out.push((f.eval(x).ok()? - v) / s);
            }
        }
        out.iter().all(|z| z.is_finite()).then_some(out)
    }

    /// Least-squares polish of every continuous parameter, starting from an
    /// algebraic proposal. The map is holomorphic, so a real forward step
    /// gives the complex derivative.
    fn polish(&self, id: FamilyId, p: &FamilyParams) -> Option<(FamilyParams, f64)> {
        let v0 = pack(p);
        if v0.is_empty() {
            return None;
        }
        let rows = self.target.len() * self.points.len();
        let model = |v: &[C64]| -> (CVec, CMat) {
            let q = unpack(p, v);
            let Some(r) = self.residuals(id, &q) else {
                return (CVec::from_element(rows, C64::new(f64::INFINITY, 0.0)), CMat::zeros(rows, v.len()));
            };
            let mut jac = CMat::zeros(rows, v.len());
            for i in 0..v.len() {
                let h = 1e-7 * v[i].norm().max(1.0);
                let mut w = v.to_vec();
                w[i] += h;
                if let Some(rw) = self.residuals(id, &unpack(p, &w)) {
                    for (k, (a, b)) in rw.iter().zip(&r).enumerate() {
                        jac[(k, i)] = (a - b) / h;
                    }
                }
            }
            (CVec::from_vec(r), jac)
        };
        let fit = crate::linalg::gauss_newton(&v0, model, 8, 1e-14);
        let q = unpack(p, &fit.params);
        let res = self.mismatch(id, &q)?;
        Some((q, res))
    }

    /// Constraints within slack and a visible extension by zero.
    fn admissible(&self, id: FamilyId, p: &FamilyParams) -> bool {
        let Ok(checks) = validate_constraints(id, p, self.lambda1, self.lambda2, ErrataMode::Corrected) else {
            return false;
        };
        if checks.iter().any(|c| if c.equation { c.magnitude > CONSTRAINT_SLACK } else { !c.satisfied }) {
            return false;
        }
        let t = info(id);
        if let (Some(r), Ok(a)) = (t.psi, p.add(AddRole::A)) {
            let Ok(chi) = p.ch(r) else { return false };
            let size = self
                .points
                .iter()
                .filter(|x| !chi.in_null_ideal(x))
                .map(|x| match (chi.eval(x), a.eval(x)) {
                    (Ok(c), Ok(Some(v))) => (c * v).norm(),
                    _ => 0.0,
                })
                .fold(0.0, f64::max);
            if size <= 1e-8 * self.scale {
                return false;
            }
        }
        true
    }
}

// ------------------------------------------------------------ per template

/// Role assignment plus coefficient access.
struct View<'a> {
    an: &'a Analysis,
    dec: Rc<Decomp>,
    roles: BTreeMap<Role, usize>,
}

impl View<'_> {
    fn c(&self, comp: usize, r: Role) -> C64 {
        self.dec.get(comp, Col::Char(self.roles[&r]))
    }
    fn lin(&self, comp: usize, r: Role) -> Vec<C64> {
        let k = self.roles[&r];
        (0..self.an.dirs[k].len()).map(|i| self.dec.get(comp, Col::Lin(k, i))).collect()
    }
    fn quad(&self, comp: usize, r: Role) -> Vec<C64> {
        let k = self.roles[&r];
        let n = self.an.dirs[k].len();
        (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| self.dec.get(comp, Col::Quad(k, i, j))).collect()
    }
    fn additive(&self, r: Role, v: &[C64]) -> AdditiveFn {
        combine_additive(&self.an.dirs[self.roles[&r]], v)
    }
    fn base(&self) -> FamilyParams {
        let mut p = FamilyParams::default();
        for (r, k) in &self.roles {
            p = p.with_char(*r, self.an.cands[*k].clone());
        }
        p
    }
}

/// a_i / b_i at the largest |b_i|.
fn ratio(a: &[C64], b: &[C64]) -> Option<C64> {
    let (i, bi) = b.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    (bi.norm() > 1e-300).then(|| a[i] / bi)
}

fn scaled(v: &[C64], k: C64) -> Vec<C64> {
    v.iter().map(|z| z * k).collect()
}

fn axpy(a: &[C64], k: C64, b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + k * y).collect()
}

fn inv(z: C64) -> Option<C64> {
    (z.norm() > 1e-300).then(|| ONE / z)
}

/// Parameter proposals of one template under one role assignment.
fn propose(id: FamilyId, v: &View, l1: C64, l2: C64) -> Vec<FamilyParams> {
    propose_opt(id, v, l1, l2).unwrap_or_default()
}

fn propose_opt(id: FamilyId, v: &View, l1: C64, l2: C64) -> Option<Vec<FamilyParams>> {
    use FamilyId::*;
    use Role::*;
    let two = C64::new(2.0, 0.0);
    let half = C64::new(0.5, 0.0);
    let b = v.base();
    let (f, g1, h, g2) = (0, 1, 2, 3);
    Some(match id {
        P41_1 => vec![b.with(Sym::Alpha, v.c(f, Chi1))],
        P41_2 => vec![b.with_add(AddRole::A, v.additive(Chi, &v.lin(f, Chi)))],
        P42_1 => {
            let delta = -ratio(&v.quad(h, Chi), &v.quad(f, Chi))?;
            let a = axpy(&v.lin(h, Chi), delta, &v.lin(f, Chi));
            vec![b
                .with(Sym::Delta, delta)
                .with_add(AddRole::A, v.additive(Chi, &a))
                .with_add(AddRole::A1, v.additive(Chi, &scaled(&v.lin(f, Chi), two)))]
        }
        P42_2 => {
            let delta = -ratio(&v.lin(h, Chi), &v.lin(f, Chi))?;
            let c = v.c(h, Mu) + delta * v.c(f, Mu);
            let a = scaled(&v.lin(f, Chi), -inv(c)?);
            vec![b.with(Sym::Delta, delta).with(Sym::C, c).with_add(AddRole::A, v.additive(Chi, &a))]
        }
        P42_3 | T2_4 => {
            let c = v.c(f, Mu);
            let delta = match id {
                P42_3 => -v.c(h, Mu) * inv(c)?,
                _ => -l1 * v.c(h, Mu) * inv(c)?,
            };
            let d0 = inv(sqrt(c))?;
            [d0, -d0]
                .into_iter()
                .filter_map(|d| {
                    let a = scaled(&v.lin(f, Chi), inv(c * d)?);
                    Some(
                        b.clone()
                            .with(Sym::C, c)
                            .with(Sym::D, d)
                            .with(Sym::Delta, delta)
                            .with_add(AddRole::A, v.additive(Chi, &a)),
                    )
                })
                .collect()
        }
        P42_4 => {
            let c = -v.c(f, Chi3) * half;
            let beta = v.c(f, Chi1) * inv(c)?;
            let delta = v.c(h, Chi3) * inv(two * c)?;
            let alpha = inv(two * (v.c(h, Chi1) + delta * c * beta))?;
            vec![b.with(Sym::C, c).with(Sym::Beta, beta).with(Sym::Delta, delta).with(Sym::Alpha, alpha)]
        }
        T1_1 => vec![b
            .with_add(AddRole::A, v.additive(M, &v.lin(f, M)))
            .with_add(AddRole::A1, v.additive(M, &scaled(&v.lin(h, M), two)))],
        T1_2 => {
            let alpha = v.c(f, Mu);
            let a = scaled(&v.lin(h, M), -inv(alpha * l2)?);
            vec![b.with(Sym::Alpha, alpha).with_add(AddRole::A, v.additive(M, &a))]
        }
        T1_3 => {
            let a = scaled(&v.lin(f, M), l2);
            let c = -ratio(&v.lin(h, M), &a)?;
            vec![b.with(Sym::C, c).with_add(AddRole::A, v.additive(M, &a))]
        }
        T1_4 => {
            let d = -inv(l2 * v.c(f, Mu))?;
            let a = scaled(&v.lin(h, M), d);
            vec![b.with(Sym::C, inv(d * d)?).with(Sym::D, d).with_add(AddRole::A, v.additive(M, &a))]
        }
        T1_5 => {
            let a = scaled(&v.lin(f, M), l2);
            let d = -two * ratio(&v.lin(g2, M), &a)?;
            vec![b.with(Sym::C, v.c(h, Mu)).with(Sym::D, d).with_add(AddRole::A, v.additive(M, &a))]
        }
        T1_6 | T1_7 | T1_8 => {
            let c = -v.c(h, Chi3) * half;
            let beta = v.c(h, Chi1) * inv(c)?;
            let lambda = match id {
                T1_6 => inv(two * l2 * v.c(f, Chi1))?,
                T1_7 => inv(l2 * (two - beta) * v.c(f, Chi1))?,
                _ => -inv(l2 * beta * v.c(f, Chi2))?,
            };
            vec![b.with(Sym::C, c).with(Sym::Beta, beta).with(Sym::Lambda, lambda)]
        }
        T2_1 => {
            let delta = -l1 * ratio(&v.quad(h, Chi), &v.quad(f, Chi))?;
            let a1 = scaled(&v.lin(f, Chi), two);
            let a = axpy(&scaled(&v.lin(h, Chi), l1), delta * half, &a1);
            vec![b
                .with(Sym::Delta, delta)
                .with_add(AddRole::A, v.additive(Chi, &a))
                .with_add(AddRole::A1, v.additive(Chi, &a1))]
        }
        T2_2 => {
            let d1_sq = -two * ratio(&v.lin(g1, Chi), &v.lin(f, Chi))?;
            let r = sqrt(d1_sq);
            [r, -r]
                .into_iter()
                .filter_map(|d1| {
                    let d2 = l1 * l2 * inv(d1)?;
                    let k = l1 * inv(l1 * d1 + d2 * d2)?;
                    let a = scaled(&v.lin(f, Chi), -inv(k)?);
                    Some(
                        b.clone().with(Sym::Delta1, d1).with(Sym::Delta2, d2).with_add(AddRole::A, v.additive(Chi, &a)),
                    )
                })
                .collect()
        }
        T2_3 => {
            let delta = -l1 * ratio(&v.lin(h, Chi), &v.lin(f, Chi))?;
            let c = delta * delta * inv(delta * delta * delta + l1 * l2 * l2)?;
            let a = scaled(&v.lin(f, Chi), -inv(c)?);
            vec![b.with(Sym::C, c).with(Sym::Delta, delta).with_add(AddRole::A, v.additive(Chi, &a))]
        }
        _ => {
            let var = variant(id);
            let c = -v.c(f, Chi3) * half;
            let d = v.c(f, Chi1) * inv(c)?;
            let alpha = -v.c(h, var.slots[2]) * half;
            let l0 = sqrt(inv(two * c * d * (two - d))?);
            [l0, -l0]
                .into_iter()
                .filter_map(|lambda| {
                    let gamma = alpha * lambda * l1 * inv(var.sign * c * l2)?;
                    Some(b.clone().with(Sym::C, c).with(Sym::D, d).with(Sym::Lambda, lambda).with(Sym::Gamma, gamma))
                })
                .collect()
        }
    })
}

/// Continuous parameters in a fixed order: scalars, character exponents,
/// additive coefficients.
fn pack(p: &FamilyParams) -> Vec<C64> {
    let mut v: Vec<C64> = p.scalars.values().copied().collect();
    for c in p.chars.values() {
        match &c.form {
            CharForm::Exp(b) => v.extend(b),
            CharForm::Power(s) => v.push(*s),
            _ => {}
        }
    }
    for a in p.additive.values() {
        match &a.form {
            AddForm::Linear(x) => v.extend(x),
            AddForm::Log(x) => v.push(*x),
            _ => {}
        }
    }
    v
}

fn unpack(p: &FamilyParams, v: &[C64]) -> FamilyParams {
    let mut it = v.iter().copied();
    let mut q = p.clone();
    for s in q.scalars.values_mut() {
        *s = it.next().unwrap_or(*s);
    }
    for c in q.chars.values_mut() {
        match &mut c.form {
            CharForm::Exp(b) => b.iter_mut().for_each(|z| *z = it.next().unwrap_or(*z)),
            CharForm::Power(s) => *s = it.next().unwrap_or(*s),
            _ => {}
        }
    }
    for a in q.additive.values_mut() {
        match &mut a.form {
            AddForm::Linear(x) => x.iter_mut().for_each(|z| *z = it.next().unwrap_or(*z)),
            AddForm::Log(x) => *x = it.next().unwrap_or(*x),
            _ => {}
        }
    }
    q
}

/// k-permutations of `pool`.
fn arrangements(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for (i, &x) in pool.iter().enumerate() {
        let rest: Vec<usize> = pool.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, y)| *y).collect();
        for mut tail in arrangements(&rest, k - 1) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

fn candidate_templates(shape: Shape, l1: C64) -> Vec<FamilyId> {
    FamilyId::ALL
        .into_iter()
        .filter(|id| match (shape, id.shape()) {
            (Shape::Sine, Shape::Sine) | (Shape::CosineSine, Shape::CosineSine) => true,
            (Shape::Coupled | Shape::Decoupled, Shape::Decoupled) => l1.norm() <= 1e-12,
            (Shape::Coupled | Shape::Decoupled, Shape::Coupled) => l1.norm() > 1e-12,
            _ => false,
        })
        .collect()
}

/// Every admissible proposal of one template with its mismatch, and the best
/// mismatch seen at all (admissible or not).
fn fit_all(an: &Analysis, id: FamilyId) -> (Vec<(FamilyParams, f64)>, f64) {
    use FamilyId::*;
    let t = info(id);
    let quad = matches!(id, P42_1 | T1_1 | T2_1);
    let pool: Vec<usize> = (0..an.cands.len()).filter(|&k| an.weight[k] > 1e-9).collect();
    let mut best = f64::INFINITY;
    let mut good = vec![];
    if pool.len() < t.chars.len() {
        return (good, best);
    }
    for arr in arrangements(&pool, t.chars.len()) {
        let roles: BTreeMap<Role, usize> = t.chars.iter().copied().zip(arr).collect();
        let psi = t.psi.map(|r| roles[&r]);
        if psi.is_some_and(|k| an.dirs[k].is_empty()) {
            continue;
        }
        let mut ks: Vec<usize> = roles.values().copied().collect();
        ks.sort_unstable();
        let mut cols = vec![];
        for k in ks {
            let own = psi == Some(k);
            columns_of(k, an.dirs[k].len(), own, own && quad, &mut cols);
        }
        let Some(dec) = an.restricted(cols) else { continue };
        let view = View { an, dec, roles };
        for p in propose(id, &view, an.lambda1, an.lambda2) {
            let Some(mut res) = an.mismatch(id, &p) else { continue };
            let mut p = p;
            if res > MATCH_TOL && res < POLISH_BELOW {
                if let Some((q, r)) = an.polish(id, &p) {
                    if r < res {
                        p = q;
                        res = r;
                    }
                }
            }
            best = best.min(res);
            if res <= MATCH_TOL && an.admissible(id, &p) {
                good.push((canonicalize(id, &p), res));
            }
        }
    }
    (good, best)
}

/// Best parameters of one template for a solution and their relative
/// pointwise mismatch (infinite when no proposal could be built). The
/// solution is not required to satisfy the equations.
pub fn fit_template(
    carrier: &Carrier,
    sol: &Solution,
    id: FamilyId,
    l1: C64,
    l2: C64,
) -> Result<(Option<FamilyParams>, f64)> {
    if sol.components().len() != id_components(id) {
        return Ok((None, f64::INFINITY));
    }
    let an = Analysis::new(carrier, sol, l1, l2)?;
    let (good, best) = fit_all(&an, id);
    let params = good.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).map(|(p, _)| p);
    Ok((params, best))
}

fn id_components(id: FamilyId) -> usize {
    match id.shape() {
        Shape::Sine => 2,
        Shape::CosineSine => 3,
        _ => 4,
    }
}

/// Classifies any solution shape. Fails on non-solutions and when f and h
/// are linearly dependent.
pub fn classify(carrier: &Carrier, sol: &Solution, l1: C64, l2: C64, tol: f64) -> Result<Classification> {
    let ver = verify_solution(carrier, sol, l1, l2, tol)?;
    if ver.relative() > tol {
        return Err(Error::NotASolution(ver.relative()));
    }
    if ver.independence.as_ref().is_some_and(|i| !i.independent) {
        return Err(Error::Hypothesis("f and h are linearly dependent".into()));
    }
    let an = Analysis::new(carrier, sol, l1, l2)?;
    let mut matches = vec![];
    for id in candidate_templates(an.shape, l1) {
        let (good, _) = fit_all(&an, id);
        let mut merged: Vec<(FamilyParams, f64)> = vec![];
        for (p, res) in good {
            match merged.iter_mut().find(|(q, _)| params_gap(q, &p) <= 1e-6) {
                Some(slot) if res < slot.1 => *slot = (p, res),
                Some(_) => {}
                None => merged.push((p, res)),
            }
        }
        merged.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut it = merged.into_iter();
        if let Some((params, fit_residual)) = it.next() {
            matches.push(Match { id, params, fit_residual, alternatives: it.map(|(p, _)| p).collect() });
        }
    }
    Ok(Classification {
        lambda1: l1,
        lambda2: l2,
        candidates: an.cands,
        matches,
        square_generated: carrier.is_square_generated(),
    })
}

pub fn classify_quadruple(carrier: &Carrier, q: &Quadruple, l1: C64, l2: C64, tol: f64) -> Result<Classification> {
    classify(carrier, &Solution::System(q.clone()), l1, l2, tol)
}

// --------------------------------------------------------- canonical forms

fn char_key(c: &Character) -> Vec<f64> {
    let flat = |v: &[C64]| v.iter().flat_map(|z| [z.re, z.im]).collect();
    match &c.form {
        CharForm::Exp(b) => flat(b),
        CharForm::Power(s) => vec![s.re, s.im],
        CharForm::Table(v) => flat(v),
        CharForm::Ones | CharForm::Zero => vec![],
    }
}

/// Total order on characters used to pick a representative of a swap orbit.
pub fn char_order(a: &Character, b: &Character) -> Ordering {
    let rank = |c: &Character| match c.form {
        CharForm::Zero => 0,
        CharForm::Ones => 1,
        _ => 2,
    };
    rank(a).cmp(&rank(b)).then_with(|| {
        for (x, y) in char_key(a).iter().zip(char_key(b)) {
            match x.total_cmp(&y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        char_key(a).len().cmp(&char_key(b).len())
    })
}

/// Representative of the parameter orbit that yields the same solution:
/// (chi1, chi2) swaps with alpha -> -alpha, beta -> 2-beta, lambda -> -lambda
/// as the template requires.
pub fn canonicalize(id: FamilyId, p: &FamilyParams) -> FamilyParams {
    use FamilyId::*;
    let (Ok(x1), Ok(x2)) = (p.ch(Role::Chi1), p.ch(Role::Chi2)) else { return p.clone() };
    if !matches!(id, P41_1 | P42_4 | T1_6) || char_order(x1, x2) != Ordering::Greater {
        return p.clone();
    }
    let mut q = p.clone().with_char(Role::Chi1, x2.clone()).with_char(Role::Chi2, x1.clone());
    let two = C64::new(2.0, 0.0);
    for (k, v) in q.scalars.iter_mut() {
        match (id, k) {
            (P41_1 | P42_4, Sym::Alpha) | (T1_6, Sym::Lambda) => *v = -*v,
            (P42_4 | T1_6, Sym::Beta) => *v = two - *v,
            _ => {}
        }
    }
    q
}

fn additive_gap(a: &AdditiveFn, b: &AdditiveFn) -> f64 {
    let gap = |x: &[C64], y: &[C64]| {
        if x.len() != y.len() {
            return f64::INFINITY;
        }
        x.iter().zip(y).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
    };
    match (&a.form, &b.form) {
        (AddForm::Linear(x), AddForm::Linear(y)) => gap(x, y),
        (AddForm::Log(x), AddForm::Log(y)) => (x - y).norm(),
        (AddForm::Table(x), AddForm::Table(y)) => {
            let f = |v: &[Option<C64>]| v.iter().map(|z| z.unwrap_or(ZERO)).collect::<Vec<_>>();
            gap(&f(x), &f(y))
        }
        (AddForm::Zero, AddForm::Zero) => 0.0,
        (AddForm::Zero, other) | (other, AddForm::Zero) => {
            let f = AdditiveFn { form: other.clone() };
            additive_gap(&f, &f.scaled(ZERO))
        }
        _ => f64::INFINITY,
    }
}

/// Largest discrepancy between two parameter sets (scalars relative to
/// max(1, |value|)); infinite when their keys differ.
pub fn params_gap(a: &FamilyParams, b: &FamilyParams) -> f64 {
    if a.scalars.keys().ne(b.scalars.keys())
        || a.chars.keys().ne(b.chars.keys())
        || a.additive.keys().ne(b.additive.keys())
    {
        return f64::INFINITY;
    }
    let s = a.scalars.iter().map(|(k, x)| (x - b.scalars[k]).norm() / x.norm().max(1.0));
    let c = a.chars.iter().map(|(k, x)| x.form_gap(&b.chars[k]));
    let d = a.additive.iter().map(|(k, x)| additive_gap(x, &b.additive[k]));
    s.chain(c).chain(d).fold(0.0, f64::max)
}

/// Largest relative discrepancy between the scalar parameters only.
pub fn scalar_gap(a: &FamilyParams, b: &FamilyParams) -> f64 {
    if a.scalars.keys().ne(b.scalars.keys()) {
        return f64::INFINITY;
    }
    a.scalars.iter().map(|(k, x)| (x - b.scalars[k]).norm() / x.norm().max(1.0)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::build;
    use crate::scalar::{c, re};

    #[test]
    fn recovers_two_exponents_on_the_line() {
        let car = Carrier::rat_add(1, None).unwrap();
        let p = FamilyParams::default()
            .with(Sym::Alpha, re(0.7))
            .with_char(Role::Mu, Character::exp(vec![re(1.0)]))
            .with_char(Role::M, Character::exp(vec![re(2.0)]))
            .with_add(AddRole::A, AdditiveFn::linear(vec![re(1.0)]));
        let inst = build(FamilyId::T1_2, &p, ZERO, re(1.3), ErrataMode::Corrected).unwrap();
        let comps = inst.solution.components();
        let cands = recover_characters(&car, &comps).unwrap();
        for b in [1.0, 2.0] {
            assert!(cands.iter().any(|ch| ch.form_gap(&Character::exp(vec![re(b)])) < 1e-6), "{cands:?}");
        }
    }

    #[test]
    fn classifies_a_t16_instance_on_the_plane() {
        let car = Carrier::rat_add(2, None).unwrap();
        let (beta, cc, l2) = (c(0.6, 0.1), c(0.8, -0.2), c(1.1, -0.3));
        let lambda = sqrt(ONE / (2.0 * cc * beta * (2.0 - beta)));
        let p = FamilyParams::default()
            .with(Sym::Beta, beta)
            .with(Sym::C, cc)
            .with(Sym::Lambda, lambda)
            .with_char(Role::Chi1, Character::exp(vec![c(0.3, 0.1), c(-0.2, 0.0)]))
            .with_char(Role::Chi2, Character::exp(vec![c(-0.1, 0.2), c(0.25, -0.1)]))
            .with_char(Role::Chi3, Character::exp(vec![c(0.05, -0.3), c(0.1, 0.3)]));
        let inst = build(FamilyId::T1_6, &p, ZERO, l2, ErrataMode::Corrected).unwrap();
        let cls = classify(&car, &inst.solution, ZERO, l2, 1e-9).unwrap();
        let m = cls.find(FamilyId::T1_6).expect("t1.6 match");
        assert!(params_gap(&m.params, &canonicalize(FamilyId::T1_6, &p)) < 1e-6, "{m:?}");
    }

    #[test]
    fn canonicalisation_is_idempotent_on_swaps() {
        let p = FamilyParams::default()
            .with(Sym::Alpha, re(2.0))
            .with_char(Role::Chi1, Character::exp(vec![re(0.5)]))
            .with_char(Role::Chi2, Character::exp(vec![re(-0.5)]));
        let q = canonicalize(FamilyId::P41_1, &p);
        assert_eq!(q.s(Sym::Alpha).unwrap(), re(-2.0));
        assert_eq!(canonicalize(FamilyId::P41_1, &q), q);
    }
}
