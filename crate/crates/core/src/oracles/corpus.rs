//! Constructed oracle instances and the seeded falsification search.

use super::{
    oracle_lemma31, oracle_lemma32, oracle_pair_sum, oracle_prop33, oracle_prop34, OracleVerdict, Prop33, Prop34,
    Region, Span, Status, ORACLE_TOL,
};
use crate::carrier::{Carrier, Element, Kind};
use crate::error::{Error, Result};
use crate::families::{draw_additive, draw_character};
use crate::funcspace::{AdditiveFn, Character, ComplexFn, Lin, Phi};
use crate::scalar::{c, re, C64, ONE};
use crate::SCHEMA_VERSION;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemma31,
    Lemma32,
    Prop33,
    Prop34,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "lemma31" => Suite::Lemma31,
            "lemma32" => Suite::Lemma32,
            "prop33" => Suite::Prop33,
            "prop34" => Suite::Prop34,
            "all" => Suite::All,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma31 => "lemma31",
            Suite::Lemma32 => "lemma32",
            Suite::Prop33 => "prop33",
            Suite::Prop34 => "prop34",
            Suite::All => "all",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Lemma31, Suite::Lemma32, Suite::Prop33, Suite::Prop34],
            s => vec![s],
        }
    }
}

#[derive(Clone, Debug)]
enum Case {
    Lemma31 { t: Region, ideal: Region, a: AdditiveFn },
    Lemma32 { mus: Vec<Character>, adds: Vec<AdditiveFn>, span: Span },
    PairSum { mus: [Character; 2], adds: [AdditiveFn; 2], span: Span },
    Prop33(Prop33),
    Prop34(Prop34),
}

/// One named oracle run with the status it is expected to produce.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub suite: Suite,
    pub expected: Status,
    carrier: Carrier,
    case: Case,
}

impl Instance {
    fn new(name: &str, carrier: &Carrier, expected: Status, case: Case) -> Instance {
        let suite = match &case {
            Case::Lemma31 { .. } => Suite::Lemma31,
            Case::Lemma32 { .. } | Case::PairSum { .. } => Suite::Lemma32,
            Case::Prop33(_) => Suite::Prop33,
            Case::Prop34(_) => Suite::Prop34,
        };
        Instance { name: name.to_string(), suite, expected, carrier: carrier.clone(), case }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn run(&self) -> Result<OracleVerdict> {
        run_case(&self.carrier, &self.case)
    }
}

fn run_case(carrier: &Carrier, case: &Case) -> Result<OracleVerdict> {
    match case {
        Case::Lemma31 { t, ideal, a } => oracle_lemma31(carrier, t, ideal, a),
        Case::Lemma32 { mus, adds, span } => oracle_lemma32(carrier, mus, adds, span),
        Case::PairSum { mus, adds, span } => oracle_pair_sum(carrier, [&mus[0], &mus[1]], [&adds[0], &adds[1]], span),
        Case::Prop33(p) => oracle_prop33(carrier, p),
        Case::Prop34(p) => oracle_prop34(carrier, p),
    }
}

fn mul2() -> Carrier {
    Carrier::finite(vec!["0".into(), "1".into()], vec![vec![0, 0], vec![0, 1]])
        .expect("({0,1},*) is associative")
        .with_name("mul2")
}

fn rat(dim: usize) -> Carrier {
    Carrier::rat_add(dim, None).expect("default window").with_name(&format!("rat-add{dim}"))
}

fn nonneg() -> Carrier {
    Carrier::nonneg_real_mul(None).expect("default window").with_name("nonneg")
}

fn psi(chi: &Character, a: &AdditiveFn) -> ComplexFn {
    Lin::psi(chi, a).into()
}

/// The shipped instance corpus.
pub fn constructed() -> Vec<Instance> {
    use Status::{Holds, NotApplicable as Na};
    let (r1, r2, nn, m2, z3) = (rat(1), rat(2), nonneg(), mul2(), Carrier::cyclic(3).with_name("Z3"));
    let ex = |b: f64| Character::exp(vec![re(b)]);
    let ex2 = |b1: C64, b2: C64| Character::exp(vec![b1, b2]);
    let lin1 = |a: f64| AdditiveFn::linear(vec![re(a)]);
    let lin2 = |a1: C64, a2: C64| AdditiveFn::linear(vec![a1, a2]);
    let id = Character::power(ONE);
    let sq = Character::power(re(2.0));
    let ln = AdditiveFn::log(ONE);
    let zero = AdditiveFn::zero();
    let z3_chars = crate::funcspace::enumerate_characters(&z3).expect("Z3 characters");
    let (w1, w2) = (z3_chars[1].clone(), z3_chars[2].clone());
    let (b1, b2) = (c(0.3, -0.2), c(-0.1, 0.4));
    let (a1, a2) = (lin2(c(0.7, 0.1), c(-0.4, 0.2)), lin2(c(-0.2, 0.5), c(0.3, 0.3)));
    let i31 = |t, ideal, a| Case::Lemma31 { t, ideal, a };
    let i33 = Case::Prop33;
    let i34 = Case::Prop34;
    let all = Region::all;
    vec![
        Instance::new("lemma31 nonneg T=(0,inf) I={0}", &nn, Na, i31(Region::positive(), Region::origin(), ln.clone())),
        Instance::new("lemma31 nonneg T=S I={0} a=0", &nn, Holds, i31(all(), Region::origin(), zero.clone())),
        Instance::new("lemma31 nonneg T=S I={0} a=ln", &nn, Na, i31(all(), Region::origin(), ln.clone())),
        Instance::new("lemma31 nonneg T=(0,inf) I=S a=ln", &nn, Na, i31(Region::positive(), all(), ln.clone())),
        Instance::new(
            "lemma31 mul2 T=S I={0} a=0",
            &m2,
            Holds,
            i31(all(), Region::indices("{0}", vec![0]), zero.clone()),
        ),
        Instance::new(
            "lemma31 mul2 T={1} I={0}",
            &m2,
            Na,
            i31(Region::indices("{1}", vec![1]), Region::indices("{0}", vec![0]), zero.clone()),
        ),
        Instance::new("lemma31 rat-add1 T=S I=S a=x", &r1, Na, i31(all(), all(), lin1(1.0))),
        Instance::new(
            "lemma32 rat-add1 zero functions",
            &r1,
            Holds,
            Case::Lemma32 {
                mus: vec![ex(1.0), ex(-0.5)],
                adds: vec![zero.clone(), zero.clone()],
                span: Span::fixed(vec![ex(0.2)], vec![re(0.0)]),
            },
        ),
        Instance::new(
            "lemma32 rat-add1 x e^x against a character span",
            &r1,
            Na,
            Case::Lemma32 {
                mus: vec![ex(1.0)],
                adds: vec![lin1(1.0)],
                span: Span::fitted(vec![ex(0.0), ex(1.0), ex(2.0)]),
            },
        ),
        Instance::new(
            "lemma32 rat-add2 two products against their own characters",
            &r2,
            Na,
            Case::Lemma32 {
                mus: vec![ex2(b1, b2), ex2(b2, b1)],
                adds: vec![a1.clone(), a2.clone()],
                span: Span::fitted(vec![ex2(b1, b2), ex2(b2, b1)]),
            },
        ),
        Instance::new(
            "lemma32 rat-add2 zero character kills its additive",
            &r2,
            Holds,
            Case::Lemma32 {
                mus: vec![Character::zero(), ex2(b1, b2)],
                adds: vec![a1.clone(), zero.clone()],
                span: Span::fitted(vec![ex2(b2, b1)]),
            },
        ),
        Instance::new(
            "lemma32 Z3 distinct characters",
            &z3,
            Holds,
            Case::Lemma32 {
                mus: vec![w1.clone(), w2.clone()],
                adds: vec![zero.clone(), zero.clone()],
                span: Span::fitted(vec![w1.clone()]),
            },
        ),
        Instance::new(
            "pair-sum rat-add1 cancelling products",
            &r1,
            Holds,
            Case::PairSum { mus: [ex(1.0), ex(1.0)], adds: [lin1(1.0), lin1(-1.0)], span: Span::fitted(vec![ex(0.5)]) },
        ),
        Instance::new(
            "prop33.1 nonneg chi=id phi=0",
            &nn,
            Holds,
            i33(Prop33::Injective {
                mu: id.clone(),
                phi1: Phi::Add(zero.clone()),
                phi2: Phi::Add(ln.clone()),
                lambda: c(1.5, -0.5),
            }),
        ),
        Instance::new(
            "prop33.1 rat-add2 linearity",
            &r2,
            Holds,
            i33(Prop33::Injective {
                mu: ex2(b1, b2),
                phi1: Phi::Add(a1.clone()),
                phi2: Phi::Square(a2.clone()),
                lambda: c(2.0, -1.0),
            }),
        ),
        Instance::new(
            "prop33.2 nonneg Psi(ln) against x^s on (0,inf)",
            &nn,
            Na,
            i33(Prop33::SpanOnSubsemigroup {
                mu: sq.clone(),
                a: ln.clone(),
                t: Region::positive(),
                span: Span::fitted(vec![sq.clone(), id.clone()]),
            }),
        ),
        Instance::new(
            "prop33.2 nonneg Psi on T={0}",
            &nn,
            Holds,
            i33(Prop33::SpanOnSubsemigroup {
                mu: id.clone(),
                a: ln.clone(),
                t: Region::origin(),
                span: Span::fitted(vec![Character::ones()]),
            }),
        ),
        Instance::new(
            "prop33.3 rat-add1 two extensions",
            &r1,
            Na,
            i33(Prop33::TwoExtensions {
                mu1: ex(1.0),
                a1: lin1(1.0),
                mu2: ex(-1.0),
                a2: lin1(2.0),
                span: Span::fitted(vec![ex(1.0), ex(-1.0)]),
            }),
        ),
        Instance::new(
            "prop33.3 nonneg zero additives",
            &nn,
            Holds,
            i33(Prop33::TwoExtensions {
                mu1: id.clone(),
                a1: zero.clone(),
                mu2: sq.clone(),
                a2: zero.clone(),
                span: Span::fitted(vec![id.clone()]),
            }),
        ),
        Instance::new(
            "prop33.4 nonneg Psi(ln + (ln/2)^2)",
            &nn,
            Na,
            i33(Prop33::QuadraticOnSubsemigroup {
                mu: id.clone(),
                a1: ln.clone(),
                a: ln.scaled(re(0.5)),
                t: all(),
                span: Span::fitted(vec![id.clone(), sq.clone()]),
            }),
        ),
        Instance::new(
            "prop33.5 rat-add2 quadratic plus linear",
            &r2,
            Na,
            i33(Prop33::QuadraticPlusLinear {
                mu1: ex2(b1, b2),
                a1: a1.clone(),
                a: a2.clone(),
                mu: ex2(b2, b1),
                big_a: a1.clone(),
                span: Span::fitted(vec![ex2(b1, b2)]),
            }),
        ),
        Instance::new(
            "prop33.5 rat-add2 cancelling linear parts",
            &r2,
            Holds,
            i33(Prop33::QuadraticPlusLinear {
                mu1: ex2(b1, b2),
                a1: a1.clone(),
                a: zero.clone(),
                mu: ex2(b1, b2),
                big_a: a1.scaled(-ONE),
                span: Span::fitted(vec![]),
            }),
        ),
        Instance::new(
            "prop33.6 rat-add2 equal extensions with a=0",
            &r2,
            Holds,
            i33(Prop33::LinearEqualsQuadratic {
                mu: ex2(b1, b2),
                big_a: a2.clone(),
                mu1: ex2(b1, b2),
                a1: a2.clone(),
                a: zero.clone(),
            }),
        ),
        Instance::new(
            "prop33.6 nonneg a!=0",
            &nn,
            Na,
            i33(Prop33::LinearEqualsQuadratic {
                mu: id.clone(),
                big_a: ln.clone(),
                mu1: id.clone(),
                a1: ln.clone(),
                a: ln.clone(),
            }),
        ),
        Instance::new(
            "prop33.7 rat-add2 reflexive",
            &r2,
            Holds,
            i33(Prop33::QuadraticIdentity {
                mu1: ex2(b1, b2),
                a1: a1.clone(),
                a: a2.clone(),
                mu: ex2(b1, b2),
                big_a1: a1.clone(),
                big_a: a2.clone(),
            }),
        ),
        Instance::new(
            "prop33.7 rat-add2 negated square root",
            &r2,
            Holds,
            i33(Prop33::QuadraticIdentity {
                mu1: ex2(b1, b2),
                a1: a1.clone(),
                a: a2.scaled(-ONE),
                mu: ex2(b1, b2),
                big_a1: a1.clone(),
                big_a: a2.clone(),
            }),
        ),
        Instance::new(
            "prop33.7 nonneg reflexive",
            &nn,
            Holds,
            i33(Prop33::QuadraticIdentity {
                mu1: id.clone(),
                a1: zero.clone(),
                a: ln.clone(),
                mu: id.clone(),
                big_a1: zero.clone(),
                big_a: ln.clone(),
            }),
        ),
        Instance::new(
            "prop33.7 nonneg different characters",
            &nn,
            Na,
            i33(Prop33::QuadraticIdentity {
                mu1: id.clone(),
                a1: ln.clone(),
                a: ln.clone(),
                mu: sq.clone(),
                big_a1: ln.clone(),
                big_a: ln.clone(),
            }),
        ),
        Instance::new(
            "prop34.1 rat-add2 3 f1 + f2",
            &r2,
            Holds,
            i34(Prop34::Closure {
                g: (&ex2(b1, b2)).into(),
                f1: psi(&ex2(b1, b2), &a1),
                f2: psi(&ex2(b1, b2), &a2),
                alpha: re(3.0),
            }),
        ),
        Instance::new(
            "prop34.1 Z3 sine pair",
            &z3,
            Holds,
            i34(Prop34::Closure {
                g: ComplexFn::combine(&[(re(0.5), &(&w1).into()), (re(0.5), &(&w2).into())]),
                f1: ComplexFn::combine(&[(ONE, &(&w1).into()), (-ONE, &(&w2).into())]),
                f2: ComplexFn::combine(&[(c(0.0, 2.0), &(&w1).into()), (c(0.0, -2.0), &(&w2).into())]),
                alpha: c(1.0, 1.0),
            }),
        ),
        Instance::new(
            "prop34.2 nonneg g=h=chi",
            &nn,
            Holds,
            i34(Prop34::SharedMember { f: psi(&id, &ln), g: (&id).into(), h: (&id).into() }),
        ),
        Instance::new(
            "prop34.2 nonneg h a different character",
            &nn,
            Na,
            i34(Prop34::SharedMember { f: psi(&id, &ln), g: (&id).into(), h: (&sq).into() }),
        ),
        Instance::new(
            "prop34.3 nonneg chi=mu=id a=A=ln",
            &nn,
            Holds,
            i34(Prop34::EqualExtensions { chi: id.clone(), a: ln.clone(), mu: id.clone(), big_a: ln.clone() }),
        ),
        Instance::new(
            "prop34.3 rat-add1 different characters",
            &r1,
            Na,
            i34(Prop34::EqualExtensions { chi: ex(1.0), a: lin1(1.0), mu: ex(0.5), big_a: lin1(1.0) }),
        ),
    ]
}

/// Falsification counts for one suite.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub draws: usize,
    pub premise_met: usize,
    pub not_applicable: usize,
    pub counterexamples: Vec<(usize, OracleVerdict)>,
}

impl Tally {
    fn to_json(&self) -> Value {
        json!({
            "draws": self.draws,
            "premise_met": self.premise_met,
            "not_applicable": self.not_applicable,
            "counterexamples": self.counterexamples.iter().map(|(i, v)| json!({"draw": i, "verdict": v.to_json()})).collect::<Vec<_>>(),
        })
    }
}

fn carrier_pool() -> Vec<Carrier> {
    vec![rat(1), rat(2), nonneg(), mul2(), Carrier::cyclic(3).with_name("Z3")]
}

fn regions(carrier: &Carrier) -> Vec<Region> {
    let mut out = vec![Region::all()];
    match carrier.kind {
        Kind::NonnegRealMul => out.extend([Region::positive(), Region::origin()]),
        Kind::RatAdd { .. } => out.push(Region::new("x1>0", |x| matches!(x, Element::Rat(v) if v[0] > 0.into()))),
        Kind::Finite if carrier.size() == Some(2) => {
            out.extend([Region::indices("{0}", vec![0]), Region::indices("{1}", vec![1])])
        }
        Kind::Finite => {}
    }
    out
}

struct Draw<'a> {
    rng: ChaCha8Rng,
    carrier: &'a Carrier,
}

impl Draw<'_> {
    fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    fn scalar(&mut self) -> C64 {
        c(self.rng.random_range(-2.0..2.0), self.rng.random_range(-2.0..2.0))
    }

    fn chi(&mut self) -> Result<Character> {
        draw_character(self.carrier, &mut self.rng, false)
    }

    /// A character that may be zero.
    fn chi_or_zero(&mut self) -> Result<Character> {
        if self.chance(0.15) {
            Ok(Character::zero())
        } else {
            self.chi()
        }
    }

    /// A nonzero additive function where the carrier has one, else zero.
    fn add(&mut self) -> Result<AdditiveFn> {
        match draw_additive(self.carrier, &mut self.rng) {
            Ok(a) => Ok(a),
            Err(Error::CannotHost(_)) => Ok(AdditiveFn::zero()),
            Err(e) => Err(e),
        }
    }

    fn add_or_zero(&mut self, p_zero: f64) -> Result<AdditiveFn> {
        if self.chance(p_zero) {
            Ok(AdditiveFn::zero())
        } else {
            self.add()
        }
    }

    /// Up to three characters, sometimes including the given ones.
    fn span(&mut self, include: &[&Character]) -> Result<Span> {
        let n = self.rng.random_range(0..=3);
        let mut chars: Vec<Character> = (0..n).map(|_| self.chi()).collect::<Result<_>>()?;
        for mu in include {
            if self.chance(0.5) {
                chars.push((*mu).clone());
            }
        }
        Ok(if self.chance(0.2) {
            let coefs = (0..chars.len()).map(|_| self.scalar()).collect();
            Span::fixed(chars, coefs)
        } else {
            Span::fitted(chars)
        })
    }

    fn region(&mut self) -> Region {
        regions(self.carrier).choose(&mut self.rng).cloned().unwrap_or_else(Region::all)
    }

    fn lemma32(&mut self) -> Result<Case> {
        if self.chance(0.3) {
            let mu1 = self.chi()?;
            let mu2 = if self.chance(0.5) { mu1.clone() } else { self.chi()? };
            let a1 = self.add_or_zero(0.2)?;
            let a2 = if self.chance(0.5) { a1.scaled(-ONE) } else { self.add_or_zero(0.3)? };
            let span = self.span(&[&mu1, &mu2])?;
            return Ok(Case::PairSum { mus: [mu1, mu2], adds: [a1, a2], span });
        }
        let n = self.rng.random_range(1..=3);
        let mus: Vec<Character> = (0..n).map(|_| self.chi_or_zero()).collect::<Result<_>>()?;
        let adds: Vec<AdditiveFn> = (0..n).map(|_| self.add_or_zero(0.5)).collect::<Result<_>>()?;
        let refs: Vec<&Character> = mus.iter().collect();
        let span = self.span(&refs)?;
        Ok(Case::Lemma32 { mus, adds, span })
    }

    fn prop33(&mut self) -> Result<Case> {
        let part = self.rng.random_range(1..=7);
        let mu = self.chi()?;
        Ok(Case::Prop33(match part {
            1 => {
                let phi1 = Phi::Add(self.add_or_zero(0.4)?);
                let phi2 = Phi::Square(self.add()?);
                Prop33::Injective { mu, phi1, phi2, lambda: self.scalar() }
            }
            2 => {
                let a = self.add_or_zero(0.4)?;
                let t = self.region();
                let span = self.span(&[&mu])?;
                Prop33::SpanOnSubsemigroup { mu, a, t, span }
            }
            3 => {
                let mu2 = self.chi()?;
                let (a1, a2) = (self.add_or_zero(0.4)?, self.add_or_zero(0.4)?);
                let span = self.span(&[&mu, &mu2])?;
                Prop33::TwoExtensions { mu1: mu, a1, mu2, a2, span }
            }
            4 => {
                let (a1, a) = (self.add_or_zero(0.5)?, self.add_or_zero(0.5)?);
                let t = self.region();
                let span = self.span(&[&mu])?;
                Prop33::QuadraticOnSubsemigroup { mu, a1, a, t, span }
            }
            5 => {
                if self.chance(0.4) {
                    let a1 = self.add()?;
                    let a = self.add_or_zero(0.7)?;
                    Prop33::QuadraticPlusLinear {
                        mu1: mu.clone(),
                        big_a: a1.scaled(-ONE),
                        a1,
                        a,
                        mu,
                        span: self.span(&[])?,
                    }
                } else {
                    let mu1 = self.chi()?;
                    let (a1, a, big_a) = (self.add_or_zero(0.3)?, self.add_or_zero(0.5)?, self.add_or_zero(0.3)?);
                    let span = self.span(&[&mu, &mu1])?;
                    Prop33::QuadraticPlusLinear { mu1, a1, a, mu, big_a, span }
                }
            }
            6 => {
                if self.chance(0.5) {
                    let big_a = self.add()?;
                    let a = self.add_or_zero(0.7)?;
                    Prop33::LinearEqualsQuadratic { mu1: mu.clone(), a1: big_a.clone(), mu, big_a, a }
                } else {
                    let mu1 = self.chi()?;
                    let (big_a, a1, a) = (self.add()?, self.add()?, self.add_or_zero(0.5)?);
                    Prop33::LinearEqualsQuadratic { mu, big_a, mu1, a1, a }
                }
            }
            _ => {
                if self.chance(0.6) {
                    let (a1, a) = (self.add_or_zero(0.3)?, self.add()?);
                    let big_a = if self.chance(0.5) { a.clone() } else { a.scaled(-ONE) };
                    Prop33::QuadraticIdentity { mu1: mu.clone(), big_a1: a1.clone(), a1, a, mu, big_a }
                } else {
                    let mu1 = self.chi()?;
                    let (a1, a, big_a1, big_a) = (self.add()?, self.add()?, self.add()?, self.add()?);
                    Prop33::QuadraticIdentity { mu1, a1, a, mu, big_a1, big_a }
                }
            }
        }))
    }

    fn prop34(&mut self) -> Result<Case> {
        let part = self.rng.random_range(1..=3);
        let chi = self.chi()?;
        let g: ComplexFn = (&chi).into();
        Ok(Case::Prop34(match part {
            1 => {
                if self.chance(0.5) {
                    let (a1, a2) = (self.add()?, self.add()?);
                    Prop34::Closure { g, f1: psi(&chi, &a1), f2: psi(&chi, &a2), alpha: self.scalar() }
                } else {
                    let chi2 = self.chi()?;
                    let half = ComplexFn::combine(&[(re(0.5), &g), (re(0.5), &(&chi2).into())]);
                    let diff = ComplexFn::combine(&[(ONE, &g), (-ONE, &(&chi2).into())]);
                    let (k1, k2) = (self.scalar(), self.scalar());
                    let g = if self.chance(0.8) { half } else { (&chi2).into() };
                    Prop34::Closure { g, f1: diff.scaled(k1), f2: diff.scaled(k2), alpha: self.scalar() }
                }
            }
            2 => {
                let a = self.add()?;
                let h = if self.chance(0.5) { g.clone() } else { (&self.chi()?).into() };
                Prop34::SharedMember { f: psi(&chi, &a), g, h }
            }
            _ => {
                let a = self.add()?;
                if self.chance(0.5) {
                    Prop34::EqualExtensions { chi: chi.clone(), a: a.clone(), mu: chi, big_a: a }
                } else {
                    let (mu, big_a) = (self.chi()?, self.add()?);
                    Prop34::EqualExtensions { chi, a, mu, big_a }
                }
            }
        }))
    }
}

/// Seeded random instances of one suite; each draw picks a carrier, then a
/// case mixing premise-satisfying constructions with free draws.
pub fn falsify(suite: Suite, seed: u64, draws: usize) -> Result<Tally> {
    let pool = carrier_pool();
    let mut tally = Tally::default();
    if suite == Suite::Lemma31 || suite == Suite::All {
        return Err(Error::Malformed(format!("no falsification search for suite {}", suite.name())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..draws {
        let carrier = pool.choose(&mut rng).expect("nonempty pool");
        let mut d = Draw { rng: ChaCha8Rng::seed_from_u64(rng.random()), carrier };
        let case = match suite {
            Suite::Lemma32 => d.lemma32()?,
            Suite::Prop33 => d.prop33()?,
            _ => d.prop34()?,
        };
        let v = run_case(carrier, &case)?;
        tally.draws += 1;
        match v.status {
            Status::Holds => tally.premise_met += usize::from(v.hypothesis_residual.is_some_and(|h| h <= ORACLE_TOL)),
            Status::NotApplicable => tally.not_applicable += 1,
            Status::Counterexample => tally.counterexamples.push((i, v)),
        }
    }
    Ok(tally)
}

/// Verdicts of the constructed corpus plus the falsification tallies.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub verdicts: Vec<(Instance, OracleVerdict)>,
    pub tallies: Vec<(Suite, Tally)>,
}

impl SuiteReport {
    /// No counterexample anywhere.
    pub fn clean(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| v.holds) && self.tallies.iter().all(|(_, t)| t.counterexamples.is_empty())
    }

    /// Constructed instances whose status differs from the expected one.
    pub fn surprises(&self) -> Vec<&str> {
        self.verdicts.iter().filter(|(i, v)| i.expected != v.status).map(|(i, _)| i.name.as_str()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "suite": self.suite.name(),
            "seed": self.seed,
            "clean": self.clean(),
            "instances": self.verdicts.iter().map(|(i, v)| {
                let mut o = v.to_json();
                o["instance"] = json!(i.name);
                o["carrier"] = json!(i.carrier.name.clone().unwrap_or_default());
                o["expected"] = json!(i.expected.name());
                o
            }).collect::<Vec<_>>(),
            "falsification": self.tallies.iter().map(|(s, t)| {
                let mut o = t.to_json();
                o["suite"] = json!(s.name());
                o
            }).collect::<Vec<_>>(),
        })
    }
}

/// Runs the constructed corpus restricted to `suite` and `draws` seeded
/// falsification draws for each member suite that has a search.
pub fn run_suite(suite: Suite, seed: u64, draws: usize) -> Result<SuiteReport> {
    let members = suite.members();
    let verdicts = constructed()
        .into_iter()
        .filter(|i| members.contains(&i.suite))
        .map(|i| {
            let v = i.run()?;
            Ok((i, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut tallies = vec![];
    for (k, s) in members.into_iter().enumerate() {
        if s != Suite::Lemma31 && draws > 0 {
            tallies.push((s, falsify(s, seed.wrapping_add(k as u64), draws)?));
        }
    }
    Ok(SuiteReport { suite, seed, verdicts, tallies })
}
