//! The catalog of closed-form solution families, their constraints,
//! seeded sampling and errata adjudication.

mod adjudicate;
mod catalog;
mod sample;
pub(crate) mod templates;

pub use adjudicate::{adjudicate, adjudicate_all, default_lambdas, Adjudication, ComponentFit, Verdict};
pub use catalog::{catalog_json, info, TemplateInfo};
pub use sample::{draw_additive, draw_character, hosting_carriers, sample_instance, sample_params, SampleOptions};
pub use templates::{
    build, build_unchecked, delta_transform, has_erratum, p42_base, t25_derived, validate_constraints, ConstraintCheck,
};

use crate::carrier::Carrier;
use crate::error::{Error, Result};
use crate::funcspace::{
    additive_from_json, additive_to_json, character_from_json, character_to_json, fn_from_json, fn_to_json, AdditiveFn,
    Character, ComplexFn, Independence,
};
use crate::laws::{self, Grid, Law, Quadruple, ResidualReport};
use crate::scalar::{complex_from_value, pair, C64, ZERO};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    P41_1,
    P41_2,
    P42_1,
    P42_2,
    P42_3,
    P42_4,
    T1_1,
    T1_2,
    T1_3,
    T1_4,
    T1_5,
    T1_6,
    T1_7,
    T1_8,
    T2_1,
    T2_2,
    T2_3,
    T2_4,
    T2_5I,
    T2_5II,
    T2_5III,
    T2_5IV,
    T2_5V,
    T2_5VI,
}

/// Which equation(s) a family solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// (f, g) of the sine addition law.
    Sine,
    /// (f, g, h) of the cosine-sine equation.
    CosineSine,
    /// (f, g1, h, g2) of the system with lambda1 = 0.
    Decoupled,
    /// (f, g1, h, g2) with both couplings nonzero.
    Coupled,
}

impl FamilyId {
    pub const ALL: [FamilyId; 24] = [
        FamilyId::P41_1,
        FamilyId::P41_2,
        FamilyId::P42_1,
        FamilyId::P42_2,
        FamilyId::P42_3,
        FamilyId::P42_4,
        FamilyId::T1_1,
        FamilyId::T1_2,
        FamilyId::T1_3,
        FamilyId::T1_4,
        FamilyId::T1_5,
        FamilyId::T1_6,
        FamilyId::T1_7,
        FamilyId::T1_8,
        FamilyId::T2_1,
        FamilyId::T2_2,
        FamilyId::T2_3,
        FamilyId::T2_4,
        FamilyId::T2_5I,
        FamilyId::T2_5II,
        FamilyId::T2_5III,
        FamilyId::T2_5IV,
        FamilyId::T2_5V,
        FamilyId::T2_5VI,
    ];

    pub fn key(self) -> &'static str {
        use FamilyId::*;
        match self {
            P41_1 => "p41.1",
            P41_2 => "p41.2",
            P42_1 => "p42.1",
            P42_2 => "p42.2",
            P42_3 => "p42.3",
            P42_4 => "p42.4",
            T1_1 => "t1.1",
            T1_2 => "t1.2",
            T1_3 => "t1.3",
            T1_4 => "t1.4",
            T1_5 => "t1.5",
            T1_6 => "t1.6",
            T1_7 => "t1.7",
            T1_8 => "t1.8",
            T2_1 => "t2.1",
            T2_2 => "t2.2",
            T2_3 => "t2.3",
            T2_4 => "t2.4",
            T2_5I => "t2.5.i",
            T2_5II => "t2.5.ii",
            T2_5III => "t2.5.iii",
            T2_5IV => "t2.5.iv",
            T2_5V => "t2.5.v",
            T2_5VI => "t2.5.vi",
        }
    }

    pub fn shape(self) -> Shape {
        use FamilyId::*;
        match self {
            P41_1 | P41_2 => Shape::Sine,
            P42_1 | P42_2 | P42_3 | P42_4 => Shape::CosineSine,
            T1_1 | T1_2 | T1_3 | T1_4 | T1_5 | T1_6 | T1_7 | T1_8 => Shape::Decoupled,
            _ => Shape::Coupled,
        }
    }

    pub fn is_system(self) -> bool {
        matches!(self.shape(), Shape::Decoupled | Shape::Coupled)
    }

    pub fn is_t25(self) -> bool {
        use FamilyId::*;
        matches!(self, T2_5I | T2_5II | T2_5III | T2_5IV | T2_5V | T2_5VI)
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for FamilyId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL.iter().copied().find(|id| id.key() == s.trim()).ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Scalar parameter names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Lambda,
    Gamma,
    Delta,
    Delta1,
    Delta2,
    Alpha,
    Beta,
    C,
    D,
}

impl Sym {
    pub const ALL: [Sym; 9] =
        [Sym::Lambda, Sym::Gamma, Sym::Delta, Sym::Delta1, Sym::Delta2, Sym::Alpha, Sym::Beta, Sym::C, Sym::D];

    pub fn name(self) -> &'static str {
        match self {
            Sym::Lambda => "lambda",
            Sym::Gamma => "gamma",
            Sym::Delta => "delta",
            Sym::Delta1 => "delta1",
            Sym::Delta2 => "delta2",
            Sym::Alpha => "alpha",
            Sym::Beta => "beta",
            Sym::C => "c",
            Sym::D => "d",
        }
    }

    pub fn parse(s: &str) -> Option<Sym> {
        Sym::ALL.into_iter().find(|x| x.name() == s)
    }
}

/// Character slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Chi,
    Mu,
    M,
    Chi1,
    Chi2,
    Chi3,
}

impl Role {
    pub const ALL: [Role; 6] = [Role::Chi, Role::Mu, Role::M, Role::Chi1, Role::Chi2, Role::Chi3];

    pub fn name(self) -> &'static str {
        match self {
            Role::Chi => "chi",
            Role::Mu => "mu",
            Role::M => "m",
            Role::Chi1 => "chi1",
            Role::Chi2 => "chi2",
            Role::Chi3 => "chi3",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|x| x.name() == s)
    }
}

/// Additive slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AddRole {
    A,
    A1,
}

impl AddRole {
    pub fn name(self) -> &'static str {
        match self {
            AddRole::A => "A",
            AddRole::A1 => "A1",
        }
    }

    pub fn parse(s: &str) -> Option<AddRole> {
        [AddRole::A, AddRole::A1].into_iter().find(|x| x.name() == s)
    }
}

/// Scalars, characters and additive functions of one template.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FamilyParams {
    pub scalars: BTreeMap<Sym, C64>,
    pub chars: BTreeMap<Role, Character>,
    pub additive: BTreeMap<AddRole, AdditiveFn>,
}

impl FamilyParams {
    pub fn s(&self, k: Sym) -> Result<C64> {
        self.scalars.get(&k).copied().ok_or_else(|| Error::MissingParam(k.name().into()))
    }

    pub fn ch(&self, r: Role) -> Result<&Character> {
        self.chars.get(&r).ok_or_else(|| Error::MissingParam(r.name().into()))
    }

    pub fn add(&self, r: AddRole) -> Result<&AdditiveFn> {
        self.additive.get(&r).ok_or_else(|| Error::MissingParam(r.name().into()))
    }

    pub fn with(mut self, k: Sym, v: C64) -> Self {
        self.scalars.insert(k, v);
        self
    }

    pub fn with_char(mut self, r: Role, chi: Character) -> Self {
        self.chars.insert(r, chi);
        self
    }

    pub fn with_add(mut self, r: AddRole, a: AdditiveFn) -> Self {
        self.additive.insert(r, a);
        self
    }

    pub fn to_json(&self, carrier: &Carrier) -> Value {
        let scalars: Map<String, Value> = self.scalars.iter().map(|(k, v)| (k.name().to_string(), pair(*v))).collect();
        let chars: Map<String, Value> =
            self.chars.iter().map(|(k, v)| (k.name().to_string(), character_to_json(carrier, v))).collect();
        let adds: Map<String, Value> =
            self.additive.iter().map(|(k, v)| (k.name().to_string(), additive_to_json(carrier, v))).collect();
        json!({"scalars": scalars, "characters": chars, "additive": adds})
    }

    pub fn from_json(carrier: &Carrier, v: &Value) -> Result<FamilyParams> {
        let mut p = FamilyParams::default();
        let obj = |key: &str| v.get(key).and_then(Value::as_object);
        if let Some(m) = obj("scalars") {
            for (k, val) in m {
                let sym = Sym::parse(k).ok_or_else(|| Error::Malformed(format!("unknown scalar {k}")))?;
                let z = complex_from_value(val).ok_or_else(|| Error::Malformed(format!("bad scalar {val}")))?;
                p.scalars.insert(sym, z);
            }
        }
        if let Some(m) = obj("characters") {
            for (k, val) in m {
                let r = Role::parse(k).ok_or_else(|| Error::Malformed(format!("unknown character slot {k}")))?;
                p.chars.insert(r, character_from_json(carrier, val)?);
            }
        }
        if let Some(m) = obj("additive") {
            for (k, val) in m {
                let r = AddRole::parse(k).ok_or_else(|| Error::Malformed(format!("unknown additive slot {k}")))?;
                p.additive.insert(r, additive_from_json(carrier, val)?);
            }
        }
        Ok(p)
    }
}

/// Which variant of a template to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrataMode {
    AsPrinted,
    Corrected,
}

impl ErrataMode {
    pub fn name(self) -> &'static str {
        match self {
            ErrataMode::AsPrinted => "as-printed",
            ErrataMode::Corrected => "corrected",
        }
    }
}

impl FromStr for ErrataMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-printed" => Ok(ErrataMode::AsPrinted),
            "corrected" => Ok(ErrataMode::Corrected),
            other => Err(Error::Malformed(format!("unknown errata mode {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ErrataStatus {
    AsPrinted,
    Corrected(String),
}

impl ErrataStatus {
    pub fn to_json(&self) -> Value {
        match self {
            ErrataStatus::AsPrinted => json!({"status": "as-printed"}),
            ErrataStatus::Corrected(d) => json!({"status": "corrected", "description": d}),
        }
    }
}

/// The functions a family produces.
#[derive(Clone, Debug)]
pub enum Solution {
    Sine { f: ComplexFn, g: ComplexFn },
    CosineSine { f: ComplexFn, g: ComplexFn, h: ComplexFn },
    System(Quadruple),
}

impl Solution {
    pub fn components(&self) -> Vec<&ComplexFn> {
        match self {
            Solution::Sine { f, g } => vec![f, g],
            Solution::CosineSine { f, g, h } => vec![f, g, h],
            Solution::System(q) => q.components().to_vec(),
        }
    }

    pub fn names(&self) -> &'static [&'static str] {
        match self {
            Solution::Sine { .. } => &["f", "g"],
            Solution::CosineSine { .. } => &["f", "g", "h"],
            Solution::System(_) => &["f", "g1", "h", "g2"],
        }
    }

    pub fn laws(&self, l1: C64, l2: C64) -> Vec<Law> {
        match self {
            Solution::Sine { .. } => laws::sine_law(),
            Solution::CosineSine { .. } => laws::cosine_sine_law(),
            Solution::System(_) => laws::system_laws(l1, l2),
        }
    }

    /// Index of h, when the solution has one.
    pub fn h_index(&self) -> Option<usize> {
        match self {
            Solution::Sine { .. } => None,
            _ => Some(2),
        }
    }

    pub fn quadruple(&self) -> Option<&Quadruple> {
        match self {
            Solution::System(q) => Some(q),
            _ => None,
        }
    }

    pub fn from_components(shape: Shape, mut c: Vec<ComplexFn>) -> Solution {
        match shape {
            Shape::Sine => {
                let g = c.pop().expect("two components");
                let f = c.pop().expect("two components");
                Solution::Sine { f, g }
            }
            Shape::CosineSine => {
                let h = c.pop().expect("three components");
                let g = c.pop().expect("three components");
                let f = c.pop().expect("three components");
                Solution::CosineSine { f, g, h }
            }
            _ => {
                let g2 = c.pop().expect("four components");
                let h = c.pop().expect("four components");
                let g1 = c.pop().expect("four components");
                let f = c.pop().expect("four components");
                Solution::System(Quadruple { f, g1, h, g2 })
            }
        }
    }

    pub fn to_json(&self, carrier: &Carrier) -> Result<Value> {
        let mut m = Map::new();
        for (name, f) in self.names().iter().zip(self.components()) {
            m.insert(name.to_string(), fn_to_json(carrier, f)?);
        }
        Ok(Value::Object(m))
    }

    /// Reads `{"f":..,"g1":..,"h":..,"g2":..}` (or the shorter forms).
    pub fn from_json(carrier: &Carrier, v: &Value) -> Result<Solution> {
        let get = |k: &str| v.get(k).map(|x| fn_from_json(carrier, x)).transpose();
        match (get("f")?, get("g")?, get("g1")?, get("h")?, get("g2")?) {
            (Some(f), None, Some(g1), Some(h), Some(g2)) => Ok(Solution::System(Quadruple { f, g1, h, g2 })),
            (Some(f), Some(g), None, Some(h), None) => Ok(Solution::CosineSine { f, g, h }),
            (Some(f), Some(g), None, None, None) => Ok(Solution::Sine { f, g }),
            _ => Err(Error::Malformed("solution needs f,g1,h,g2 (or f,g,h / f,g)".into())),
        }
    }
}

/// A built family member.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub id: FamilyId,
    pub params: FamilyParams,
    pub lambda1: C64,
    pub lambda2: C64,
    pub mode: ErrataMode,
    pub errata_status: ErrataStatus,
    /// Scalars computed from the free ones by the template's formulas.
    pub derived: BTreeMap<Sym, C64>,
    pub solution: Solution,
}

/// Residual report of an instance with the independence of (f, h).
#[derive(Clone, Debug)]
pub struct Verification {
    pub residual: ResidualReport,
    pub independence: Option<Independence>,
}

impl Verification {
    pub fn relative(&self) -> f64 {
        self.residual.relative()
    }

    /// Residual within `tol` and (f, h) independent where that applies.
    pub fn passes(&self, tol: f64) -> bool {
        self.relative() <= tol && self.independence.as_ref().is_none_or(|i| i.independent)
    }

    pub fn to_json(&self, carrier: &Carrier) -> Value {
        let mut v = self.residual.to_json(carrier);
        let eq = |k: &str| self.residual.equation(k).map(|e| e.max_abs);
        if let (Some(r1), Some(r2)) = (eq("r1"), eq("r2")) {
            v["r1"] = json!(r1);
            v["r2"] = json!(r2);
        }
        if let Some(ind) = &self.independence {
            v["independent"] = json!(ind.independent);
        }
        v
    }
}

/// Residuals of a solution against its own equation(s).
pub fn verify_solution(carrier: &Carrier, sol: &Solution, l1: C64, l2: C64, tol: f64) -> Result<Verification> {
    let grid = Grid::new(carrier)?;
    let vals = sol.components().iter().map(|f| grid.values(f)).collect::<Result<Vec<_>>>()?;
    let residual = laws::evaluate(&grid, &vals, &sol.laws(l1, l2));
    let independence = match sol.h_index() {
        Some(k) => Some(crate::funcspace::independence_of_values(&vals[0].at, &vals[k].at, tol)?),
        None => None,
    };
    Ok(Verification { residual, independence })
}

impl FamilyInstance {
    pub fn verify(&self, carrier: &Carrier, tol: f64) -> Result<Verification> {
        verify_solution(carrier, &self.solution, self.lambda1, self.lambda2, tol)
    }

    pub fn to_json(&self, carrier: &Carrier) -> Result<Value> {
        let derived: Map<String, Value> = self.derived.iter().map(|(k, v)| (k.name().to_string(), pair(*v))).collect();
        Ok(json!({
            "schema": crate::SCHEMA_VERSION,
            "family": self.id.key(),
            "lambda1": pair(self.lambda1),
            "lambda2": pair(self.lambda2),
            "mode": self.mode.name(),
            "errata_status": self.errata_status.to_json(),
            "params": self.params.to_json(carrier),
            "derived": derived,
            "carrier": carrier.to_json(),
            "solution": self.solution.to_json(carrier)?,
        }))
    }

    /// Rebuilds an instance from its file (the stored solution is ignored
    /// in favour of the template).
    pub fn from_json(v: &Value) -> Result<(Carrier, FamilyInstance)> {
        let carrier = Carrier::from_json(v.get("carrier").ok_or_else(|| Error::Malformed("missing carrier".into()))?)?;
        let id: FamilyId = v
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Malformed("missing family".into()))?
            .parse()?;
        let lam = |k: &str| v.get(k).and_then(complex_from_value).unwrap_or(ZERO);
        let mode = v.get("mode").and_then(Value::as_str).unwrap_or("corrected").parse()?;
        let params = FamilyParams::from_json(&carrier, v.get("params").unwrap_or(&Value::Null))?;
        let inst = build(id, &params, lam("lambda1"), lam("lambda2"), mode)?;
        Ok((carrier, inst))
    }
}
