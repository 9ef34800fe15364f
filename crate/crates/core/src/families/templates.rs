//! Closed-form builders for every template, as printed and corrected.

use super::{AddRole, ErrataMode, ErrataStatus, FamilyId, FamilyInstance, FamilyParams, Role, Shape, Solution, Sym};
use crate::error::{Error, Result};
use crate::funcspace::{ComplexFn, Lin};
use crate::scalar::{C64, ONE, ZERO};
use std::cell::Cell;
use std::collections::BTreeMap;

/// Tolerance for scalar constraint equations (relative to their terms).
pub const CONSTRAINT_TOL: f64 = 1e-12;
/// Below this a denominator or a "nonzero" constant counts as vanishing.
pub const VANISH_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintCheck {
    pub name: String,
    pub satisfied: bool,
    pub magnitude: f64,
    /// Scalar equation (as opposed to a nonvanishing or distinctness condition).
    pub equation: bool,
}

impl ConstraintCheck {
    fn equation(name: &str, terms: &[C64]) -> ConstraintCheck {
        let sum: C64 = terms.iter().sum();
        let scale = terms.iter().map(|t| t.norm()).fold(1.0, f64::max);
        let magnitude = sum.norm() / scale;
        ConstraintCheck { name: name.into(), satisfied: magnitude <= CONSTRAINT_TOL, magnitude, equation: true }
    }

    fn nonzero(name: &str, value: C64) -> ConstraintCheck {
        ConstraintCheck {
            name: name.into(),
            satisfied: value.norm() > VANISH_TOL,
            magnitude: value.norm(),
            equation: false,
        }
    }

    fn zero(name: &str, value: C64) -> ConstraintCheck {
        ConstraintCheck {
            name: name.into(),
            satisfied: value.norm() <= VANISH_TOL,
            magnitude: value.norm(),
            equation: false,
        }
    }
}

/// Whether a template has a documented corrected variant.
pub fn has_erratum(id: FamilyId) -> bool {
    use FamilyId::*;
    matches!(id, T1_3 | T1_4 | T2_1 | T2_2 | T2_3 | T2_4 | T2_5II)
}

fn status(id: FamilyId, mode: ErrataMode) -> ErrataStatus {
    match (mode, super::catalog::info(id).erratum) {
        (ErrataMode::Corrected, Some(e)) => ErrataStatus::Corrected(e.summary.to_string()),
        _ => ErrataStatus::AsPrinted,
    }
}

/// Every constraint of the template, evaluated.
pub fn validate_constraints(
    id: FamilyId,
    p: &FamilyParams,
    l1: C64,
    l2: C64,
    mode: ErrataMode,
) -> Result<Vec<ConstraintCheck>> {
    use FamilyId::*;
    let info = super::catalog::info(id);
    let corrected = mode == ErrataMode::Corrected;
    let mut out = Vec::new();

    for r in info.chars {
        p.ch(*r)?;
    }
    for a in info.additive {
        p.add(*a)?;
    }
    for k in info.scalars {
        let v = p.s(*k)?;
        if info.nonzero.contains(k) {
            out.push(ConstraintCheck::nonzero(&format!("{}!=0", k.name()), v));
        }
    }
    if let Some(r) = info.psi {
        let chi = p.ch(r)?;
        out.push(ConstraintCheck {
            name: format!("{}!=0", r.name()),
            satisfied: !chi.is_zero(),
            magnitude: if chi.is_zero() { 0.0 } else { 1.0 },
            equation: false,
        });
    }
    if let Ok(a) = p.add(AddRole::A) {
        out.push(ConstraintCheck {
            name: "A!=0".into(),
            satisfied: !a.is_zero(),
            magnitude: if a.is_zero() { 0.0 } else { 1.0 },
            equation: false,
        });
    }
    let chars = info.chars;
    for (i, ri) in chars.iter().enumerate() {
        for rj in &chars[i + 1..] {
            let gap = p.ch(*ri)?.form_gap(p.ch(*rj)?);
            out.push(ConstraintCheck {
                name: format!("{}!={}", ri.name(), rj.name()),
                satisfied: gap > VANISH_TOL,
                magnitude: gap,
                equation: false,
            });
        }
    }

    match id.shape() {
        Shape::Decoupled => {
            out.push(ConstraintCheck::zero("lambda1=0", l1));
            out.push(ConstraintCheck::nonzero("lambda2!=0", l2));
        }
        Shape::Coupled => {
            out.push(ConstraintCheck::nonzero("lambda1!=0", l1));
            out.push(ConstraintCheck::nonzero("lambda2!=0", l2));
        }
        _ => {}
    }

    let s = |k| p.s(k);
    let two = C64::new(2.0, 0.0);
    match id {
        P42_3 | T1_5 => {
            let (c, d) = (s(Sym::C)?, s(Sym::D)?);
            out.push(ConstraintCheck::equation("1-c*d^2=0", &[ONE, -c * d * d]));
        }
        T1_4 if corrected => {
            let (c, d) = (s(Sym::C)?, s(Sym::D)?);
            out.push(ConstraintCheck::equation("1-c*d^2=0", &[ONE, -c * d * d]));
        }
        P42_4 => {
            let (c, a, b) = (s(Sym::C)?, s(Sym::Alpha)?, s(Sym::Beta)?);
            out.push(ConstraintCheck::equation(
                "2*c*alpha^2*beta*(2-beta)=1",
                &[two * c * a * a * b * (two - b), -ONE],
            ));
        }
        T1_6 | T1_7 | T1_8 => {
            let (c, l, b) = (s(Sym::C)?, s(Sym::Lambda)?, s(Sym::Beta)?);
            out.push(ConstraintCheck::equation(
                "2*c*lambda^2*beta*(2-beta)=1",
                &[two * c * l * l * b * (two - b), -ONE],
            ));
            out.push(ConstraintCheck::nonzero("2-beta!=0", two - b));
        }
        T2_1 if corrected => {
            let d = s(Sym::Delta)?;
            out.push(ConstraintCheck::equation("delta^3+lambda1*lambda2^2=0", &[d * d * d, l1 * l2 * l2]));
        }
        T2_2 => {
            let (d1, d2) = (s(Sym::Delta1)?, s(Sym::Delta2)?);
            out.push(ConstraintCheck::nonzero("lambda2*delta2+delta1^2!=0", l2 * d2 + d1 * d1));
            out.push(ConstraintCheck::nonzero("lambda1*delta1+delta2^2!=0", l1 * d1 + d2 * d2));
            if corrected {
                out.push(ConstraintCheck::equation("delta1*delta2=lambda1*lambda2", &[d1 * d2, -l1 * l2]));
            }
        }
        T2_3 => {
            let (c, d) = (s(Sym::C)?, s(Sym::Delta)?);
            out.push(ConstraintCheck::equation(
                "c*delta^3-delta^2+c*lambda1*lambda2^2=0",
                &[c * d * d * d, -d * d, c * l1 * l2 * l2],
            ));
        }
        T2_4 => {
            let (c, d, de) = (s(Sym::C)?, s(Sym::D)?, s(Sym::Delta)?);
            out.push(ConstraintCheck::nonzero("d!=delta", d - de));
            out.push(ConstraintCheck::equation("1-c*d^2=0", &[ONE, -c * d * d]));
            if corrected {
                let e = d - de;
                out.push(ConstraintCheck::equation(
                    "delta*(d-delta)^2+lambda1*lambda2^2=0",
                    &[de * e * e, l1 * l2 * l2],
                ));
            }
        }
        _ if id.is_t25() => {
            let (c, d, l) = (s(Sym::C)?, s(Sym::D)?, s(Sym::Lambda)?);
            out.push(ConstraintCheck::equation("2*c*lambda^2*d*(2-d)=1", &[two * c * l * l * d * (two - d), -ONE]));
            out.push(ConstraintCheck::nonzero("2-d!=0", two - d));
            if l1.norm() > VANISH_TOL && l2.norm() > VANISH_TOL && l.norm() > VANISH_TOL {
                let g = s(Sym::Gamma)?;
                if let Ok(derived) = t25_derived(id, c, d, g, l, l1, l2) {
                    let (a, b) = (derived[&Sym::Alpha], derived[&Sym::Beta]);
                    for (k, v) in &derived {
                        out.push(ConstraintCheck::nonzero(&format!("{}!=0", k.name()), *v));
                    }
                    out.push(ConstraintCheck::nonzero("2-beta!=0", two - b));
                    out.push(ConstraintCheck::equation(
                        "2*alpha*gamma^2*beta*(2-beta)=1",
                        &[two * a * g * g * b * (two - b), -ONE],
                    ));
                } else {
                    out.push(ConstraintCheck {
                        name: "derived scalars finite".into(),
                        satisfied: false,
                        magnitude: 0.0,
                        equation: false,
                    });
                }
            }
        }
        _ => {}
    }
    Ok(out)
}

/// Validates, then builds.
pub fn build(id: FamilyId, p: &FamilyParams, l1: C64, l2: C64, mode: ErrataMode) -> Result<FamilyInstance> {
    if let Some(bad) = validate_constraints(id, p, l1, l2, mode)?.into_iter().find(|c| !c.satisfied) {
        return Err(Error::Constraint { name: bad.name, magnitude: bad.magnitude });
    }
    build_unchecked(id, p, l1, l2, mode)
}

/// Builds the template without checking its constraints (used to probe
/// constraint necessity). Vanishing denominators still fail.
pub fn build_unchecked(id: FamilyId, p: &FamilyParams, l1: C64, l2: C64, mode: ErrataMode) -> Result<FamilyInstance> {
    Ok(build_raw(id, p, l1, l2, mode)?.0)
}

/// Builds and also reports the smallest denominator met on the way.
pub(crate) fn build_raw(
    id: FamilyId,
    p: &FamilyParams,
    l1: C64,
    l2: C64,
    mode: ErrataMode,
) -> Result<(FamilyInstance, f64)> {
    let cx = Ctx { p, l1, l2, min_den: Cell::new(f64::INFINITY), corrected: mode == ErrataMode::Corrected };
    let (parts, derived) = cx.template(id)?;
    let solution = Solution::from_components(id.shape(), parts.into_iter().map(ComplexFn::from).collect());
    let inst = FamilyInstance {
        id,
        params: p.clone(),
        lambda1: l1,
        lambda2: l2,
        mode,
        errata_status: status(id, mode),
        derived,
        solution,
    };
    Ok((inst, cx.min_den.get()))
}

struct Ctx<'a> {
    p: &'a FamilyParams,
    l1: C64,
    l2: C64,
    min_den: Cell<f64>,
    corrected: bool,
}

/// f = F, g = -1/2 delta^2 F + G + delta H, h = -delta F + H.
pub fn delta_transform(big_f: Lin, big_g: Lin, big_h: Lin, delta: C64) -> (Lin, Lin, Lin) {
    if delta == ZERO {
        return (big_f, big_g, big_h);
    }
    let g = big_f.clone() * (-0.5 * delta * delta) + big_g + big_h.clone() * delta;
    let h = big_f.clone() * (-delta) + big_h;
    (big_f, g, h)
}

type Parts = (Vec<Lin>, BTreeMap<Sym, C64>);

impl Ctx<'_> {
    fn s(&self, k: Sym) -> Result<C64> {
        self.p.s(k)
    }

    fn ch(&self, r: Role) -> Result<Lin> {
        Ok(Lin::chr(self.p.ch(r)?))
    }

    fn psi(&self, r: Role, a: AddRole) -> Result<Lin> {
        Ok(Lin::psi(self.p.ch(r)?, self.p.add(a)?))
    }

    fn psi_sq(&self, r: Role, a: AddRole) -> Result<Lin> {
        Ok(Lin::psi_sq(self.p.ch(r)?, self.p.add(a)?))
    }

    fn inv(&self, z: C64, what: &str) -> Result<C64> {
        inv(z, what, &self.min_den)
    }

    fn template(&self, id: FamilyId) -> Result<Parts> {
        use FamilyId::*;
        let none = BTreeMap::new();
        let half = 0.5;
        let two = C64::new(2.0, 0.0);
        let l2 = self.l2;
        let l1 = self.l1;
        Ok(match id {
            P41_1 => {
                let (x1, x2, a) = (self.ch(Role::Chi1)?, self.ch(Role::Chi2)?, self.s(Sym::Alpha)?);
                (vec![(x1.clone() - x2.clone()) * a, (x1 + x2) * half], none)
            }
            P41_2 => (vec![self.psi(Role::Chi, AddRole::A)?, self.ch(Role::Chi)?], none),
            P42_1 | P42_2 | P42_3 | P42_4 => {
                let (bf, bg, bh) = self.p42_base(id)?;
                let (f, g, h) = delta_transform(bf, bg, bh, self.s(Sym::Delta)?);
                (vec![f, g, h], none)
            }
            T1_1 => {
                let m = self.ch(Role::M)?;
                let f = self.psi(Role::M, AddRole::A)?;
                let h = self.psi(Role::M, AddRole::A1)? * half + self.psi_sq(Role::M, AddRole::A)? * (half * l2 * l2);
                (vec![f, m.clone(), h, m], none)
            }
            T1_2 => {
                let (mu, m, a) = (self.ch(Role::Mu)?, self.ch(Role::M)?, self.s(Sym::Alpha)?);
                let pa = self.psi(Role::M, AddRole::A)?;
                let f = (mu.clone() - m.clone()) * a;
                let g1 = (mu.clone() + m.clone()) * half;
                let h = (mu - m.clone()) * (a * a * l2 * l2) - pa * (a * l2);
                (vec![f, g1, h, m], none)
            }
            T1_3 => {
                let (mu, m, c) = (self.ch(Role::Mu)?, self.ch(Role::M)?, self.s(Sym::C)?);
                let pa = self.psi(Role::M, AddRole::A)?;
                let f = pa.clone() * self.inv(l2, "lambda2")?;
                let h = (mu.clone() - m.clone()) * (c * c) - pa.clone() * c;
                let k = self.inv(two * c, "2c")?;
                let g2 =
                    if self.corrected { (mu + m.clone()) * half + pa * k } else { (mu - m.clone()) * half - pa * k };
                (vec![f, m, h, g2], none)
            }
            T1_4 => {
                let (mu, m, c, d) = (self.ch(Role::Mu)?, self.ch(Role::M)?, self.s(Sym::C)?, self.s(Sym::D)?);
                let pa = self.psi(Role::M, AddRole::A)?;
                let f = (mu.clone() - m.clone()) * (-self.inv(d * l2, "d*lambda2")?);
                let g1 = (mu.clone() + m.clone()) * half;
                let h = (mu - m.clone()) * c + pa * self.inv(d, "d")?;
                (vec![f, g1, h, m], none)
            }
            T1_5 => {
                let (mu, m, c, d) = (self.ch(Role::Mu)?, self.ch(Role::M)?, self.s(Sym::C)?, self.s(Sym::D)?);
                let pa = self.psi(Role::M, AddRole::A)?;
                let f = pa.clone() * self.inv(l2, "lambda2")?;
                let h = (mu.clone() - m.clone()) * c + pa.clone() * self.inv(d, "d")?;
                let g2 = (mu + m.clone()) * half - pa * (half * d);
                (vec![f, m, h, g2], none)
            }
            T1_6 | T1_7 | T1_8 => {
                let (x1, x2, x3) = (self.ch(Role::Chi1)?, self.ch(Role::Chi2)?, self.ch(Role::Chi3)?);
                let (l, b, c) = (self.s(Sym::Lambda)?, self.s(Sym::Beta)?, self.s(Sym::C)?);
                let h = x1.clone() * (c * b) + x2.clone() * (c * (two - b)) - x3.clone() * (two * c);
                let (f, g1, g2) = match id {
                    T1_6 => (
                        (x1.clone() - x2.clone()) * self.inv(two * l * l2, "2*lambda*lambda2")?,
                        (x1.clone() + x2.clone()) * half,
                        (x1 * b + x2 * (two - b) + x3 * two) * 0.25,
                    ),
                    T1_7 => (
                        (x1.clone() - x3.clone()) * self.inv(l * l2 * (two - b), "lambda*lambda2*(2-beta)")?,
                        (x1.clone() + x3.clone()) * half,
                        (x1 * (-b) + x2 * (two - b) + x3 * two) * self.inv(two * (two - b), "2(2-beta)")?,
                    ),
                    _ => (
                        (x2.clone() - x3.clone()) * (-self.inv(l * l2 * b, "lambda*lambda2*beta")?),
                        (x2.clone() + x3.clone()) * half,
                        (x1 * b - x2 * (two - b) + x3 * two) * self.inv(two * b, "2*beta")?,
                    ),
                };
                (vec![f, g1, h, g2], none)
            }
            T2_1 => {
                let (chi, d) = (self.ch(Role::Chi)?, self.s(Sym::Delta)?);
                let (pa, pa1, psq) = (
                    self.psi(Role::Chi, AddRole::A)?,
                    self.psi(Role::Chi, AddRole::A1)?,
                    self.psi_sq(Role::Chi, AddRole::A)?,
                );
                let k1 = self.inv(two * l1, "2*lambda1")?;
                let f = pa1.clone() * half + psq.clone() * half;
                let g1 =
                    (pa1.clone() * d - pa.clone() * 4.0) * (-0.25 * d) - psq.clone() * (0.25 * d * d) + chi.clone();
                let h = (pa1.clone() * d - pa.clone() * 2.0) * (-k1) - psq.clone() * (d * k1);
                let g2 = (pa1 * d + pa * 2.0) * (-0.25 * d) - psq * (0.25 * d * d) + chi;
                (vec![f, g1, h, g2], none)
            }
            T2_2 => {
                let (mu, chi, d1, d2) =
                    (self.ch(Role::Mu)?, self.ch(Role::Chi)?, self.s(Sym::Delta1)?, self.s(Sym::Delta2)?);
                let pa = self.psi(Role::Chi, AddRole::A)?;
                let den1 = l1 * d1 + d2 * d2;
                let den2 = l2 * d2 + d1 * d1;
                let k = l1 * self.inv(den1, "lambda1*delta1+delta2^2")?;
                let l = l2 * self.inv(den2, "lambda2*delta2+delta1^2")?;
                let diff = mu - chi.clone();
                let f = diff.clone() * (k * k) - pa.clone() * k;
                let a1 = ONE + d2 * d2 * self.inv(den1, "lambda1*delta1+delta2^2")?;
                let g1 = if self.corrected {
                    diff.clone() * (0.5 * d1 * k * a1) + pa.clone() * (0.5 * d1 * d1 * k) + chi.clone()
                } else {
                    (diff.clone() * a1 + pa.clone()) * (0.5 * d1 * k) + chi.clone()
                };
                let mut h = diff.clone() * (l * l);
                if self.corrected {
                    h = h + pa.clone() * (l * d1 * self.inv(d2, "delta2")?);
                }
                let a2 = ONE + d1 * d1 * self.inv(den2, "lambda2*delta2+delta1^2")?;
                let g2 = (diff * a2 - pa * d1) * (0.5 * d2 * l) + chi;
                (vec![f, g1, h, g2], none)
            }
            T2_3 => {
                let (mu, chi, c, d) = (self.ch(Role::Mu)?, self.ch(Role::Chi)?, self.s(Sym::C)?, self.s(Sym::Delta)?);
                let pa = self.psi(Role::Chi, AddRole::A)?;
                let f = (mu.clone() - chi.clone()) * (c * c) - pa.clone() * c;
                let e = (d * c - ONE) * (d * c - ONE);
                let g1 = mu.clone() * (half * (ONE - e))
                    + chi.clone() * (half * (ONE + e))
                    + pa.clone() * (half * d * d * c);
                let h = (mu.clone() - chi.clone()) * (l2 * l2 * c * c * self.inv(d * d, "delta^2")?)
                    + pa.clone() * (d * c * self.inv(l1, "lambda1")?);
                let q = if self.corrected { (c * d - ONE) * (c * d - ONE) } else { (c - d) * (c - d) };
                let k = d * d * d * q * self.inv(two * c * l1 * l2 * l2, "2c*lambda1*lambda2^2")?;
                let dc2 = d * d * c * c;
                let g2 = mu * (half * (ONE - dc2)) + chi * (half * (ONE + dc2)) - pa * k;
                (vec![f, g1, h, g2], none)
            }
            T2_4 => {
                let (mu, chi) = (self.ch(Role::Mu)?, self.ch(Role::Chi)?);
                let (c, d, de) = (self.s(Sym::C)?, self.s(Sym::D)?, self.s(Sym::Delta)?);
                let pa = self.psi(Role::Chi, AddRole::A)?;
                let f = (mu.clone() - chi.clone()) * c + pa.clone() * (c * d);
                let id2 = self.inv(two * d * d, "2d^2")?;
                let k1 = if self.corrected { -(d - de) * (d - de) } else { d * d + de * de };
                let g1 = mu.clone() * ((d * d - de * de) * id2)
                    + chi.clone() * ((d * d + de * de) * id2)
                    + pa.clone() * (k1 * self.inv(two * d, "2d")?);
                let il1 = self.inv(l1, "lambda1")?;
                let h = (mu.clone() - chi.clone()) * (-de * self.inv(d * d, "d^2")? * il1)
                    + pa.clone() * ((d - de) * self.inv(d, "d")? * il1);
                let ll = l1 * l2 * l2;
                let idd = self.inv(two * de * d * d, "2*delta*d^2")?;
                let g2 = mu * ((de * d * d + ll) * idd) + chi * ((de * d * d - ll) * idd)
                    - pa * (ll * self.inv(two * d * (d - de), "2d(d-delta)")?);
                (vec![f, g1, h, g2], none)
            }
            _ => self.t25(id)?,
        })
    }

    fn p42_base(&self, id: FamilyId) -> Result<(Lin, Lin, Lin)> {
        let two = C64::new(2.0, 0.0);
        Ok(match id {
            FamilyId::P42_1 => {
                let f = self.psi(Role::Chi, AddRole::A1)? * 0.5 + self.psi_sq(Role::Chi, AddRole::A)? * 0.5;
                (f, self.ch(Role::Chi)?, self.psi(Role::Chi, AddRole::A)?)
            }
            FamilyId::P42_2 => {
                let (mu, chi, c) = (self.ch(Role::Mu)?, self.ch(Role::Chi)?, self.s(Sym::C)?);
                let pa = self.psi(Role::Chi, AddRole::A)?;
                let diff = mu - chi.clone();
                (diff.clone() * (c * c) - pa * c, chi, diff * c)
            }
            FamilyId::P42_3 => {
                let (mu, chi, c, d) = (self.ch(Role::Mu)?, self.ch(Role::Chi)?, self.s(Sym::C)?, self.s(Sym::D)?);
                let pa = self.psi(Role::Chi, AddRole::A)?;
                let f = (mu.clone() - chi.clone()) * c + pa.clone() * (c * d);
                let g = (mu + chi) * 0.5 - pa.clone() * (0.5 * d);
                (f, g, pa)
            }
            _ => {
                let (x1, x2, x3) = (self.ch(Role::Chi1)?, self.ch(Role::Chi2)?, self.ch(Role::Chi3)?);
                let (c, a, b) = (self.s(Sym::C)?, self.s(Sym::Alpha)?, self.s(Sym::Beta)?);
                let f = x1.clone() * (c * b) + x2.clone() * (c * (two - b)) - x3.clone() * (two * c);
                let g = x1.clone() * (0.25 * b) + x2.clone() * (0.25 * (two - b)) + x3 * 0.5;
                let h = (x1 - x2) * self.inv(two * a, "2*alpha")?;
                (f, g, h)
            }
        })
    }

    fn t25(&self, id: FamilyId) -> Result<Parts> {
        let two = C64::new(2.0, 0.0);
        let (c, d, g, l) = (self.s(Sym::C)?, self.s(Sym::D)?, self.s(Sym::Gamma)?, self.s(Sym::Lambda)?);
        let derived = t25_derived_tracked(id, c, d, g, l, self.l1, self.l2, &self.min_den)?;
        let (d1, d2, a, b) = (derived[&Sym::Delta1], derived[&Sym::Delta2], derived[&Sym::Alpha], derived[&Sym::Beta]);
        let v = variant(id);
        let x = |r| self.ch(r);
        let f1 = x(Role::Chi1)? * (c * d) + x(Role::Chi2)? * (c * (two - d)) - x(Role::Chi3)? * (two * c);
        let g1b = x(Role::Chi1)? * (0.25 * d) + x(Role::Chi2)? * (0.25 * (two - d)) + x(Role::Chi3)? * 0.5;
        let l1h1 = (x(Role::Chi1)? - x(Role::Chi2)?) * self.inv(two * l, "2*lambda")?;
        let h2 = x(v.slots[0])? * (a * b) + x(v.slots[1])? * (a * (two - b)) - x(v.slots[2])? * (two * a);
        let g2b = x(v.slots[0])? * (0.25 * b) + x(v.slots[1])? * (0.25 * (two - b)) + x(v.slots[2])? * 0.5;
        let (p, q) = if self.corrected { v.pair_corrected } else { v.pair_printed };
        let l2f2 = (x(p)? - x(q)?) * self.inv(two * g, "2*gamma")?;
        let g1 = f1.clone() * (-0.5 * d1 * d1) + g1b + l1h1 * d1;
        let g2 = h2.clone() * (-0.5 * d2 * d2) + g2b + l2f2 * d2;
        Ok((vec![f1, g1, h2, g2], derived))
    }
}

fn inv(z: C64, what: &str, min_den: &Cell<f64>) -> Result<C64> {
    let m = z.norm();
    min_den.set(min_den.get().min(m));
    if m <= VANISH_TOL || !m.is_finite() {
        return Err(Error::Degenerate(format!("{what} vanishes")));
    }
    Ok(ONE / z)
}

/// Role layout of one family-(5) sub-variant.
pub(crate) struct Variant {
    /// Characters carrying beta, 2-beta and -2 in H2.
    pub slots: [Role; 3],
    pub pair_printed: (Role, Role),
    pub pair_corrected: (Role, Role),
    /// Sign in alpha = sign * c gamma lambda2 / (lambda lambda1).
    pub sign: f64,
}

pub(crate) fn variant(id: FamilyId) -> Variant {
    use FamilyId::*;
    use Role::{Chi1 as X1, Chi2 as X2, Chi3 as X3};
    let v = |slots, pair, sign| Variant { slots, pair_printed: pair, pair_corrected: pair, sign };
    match id {
        T2_5I => v([X1, X2, X3], (X1, X2), -1.0),
        T2_5II => Variant { slots: [X2, X1, X3], pair_printed: (X1, X2), pair_corrected: (X2, X1), sign: 1.0 },
        T2_5III => v([X1, X3, X2], (X1, X3), 1.0),
        T2_5IV => v([X3, X1, X2], (X3, X1), -1.0),
        T2_5V => v([X2, X3, X1], (X2, X3), -1.0),
        T2_5VI => v([X3, X2, X1], (X3, X2), 1.0),
        other => panic!("{other} is not a family-(5) sub-variant"),
    }
}

/// beta = u + v/gamma for each sub-variant.
pub(crate) fn beta_coefficients(id: FamilyId, c: C64, d: C64, l2: C64) -> Result<(C64, C64)> {
    use FamilyId::*;
    let two = C64::new(2.0, 0.0);
    let cell = Cell::new(f64::INFINITY);
    let i = |z, w| inv(z, w, &cell);
    Ok(match id {
        T2_5I => (d, -i(two * c * l2, "2c*lambda2")?),
        T2_5II => (two - d, -i(two * c * l2, "2c*lambda2")?),
        T2_5III => (-two * d * i(two - d, "2-d")?, i(c * (two - d) * l2, "c(2-d)lambda2")?),
        T2_5IV => (C64::new(4.0, 0.0) * i(two - d, "2-d")?, i(c * (two - d) * l2, "c(2-d)lambda2")?),
        T2_5V => (-two * (two - d) * i(d, "d")?, i(c * d * l2, "c*d*lambda2")?),
        T2_5VI => (C64::new(4.0, 0.0) * i(d, "d")?, i(c * d * l2, "c*d*lambda2")?),
        other => return Err(Error::UnknownFamily(other.key().into())),
    })
}

/// delta1, delta2, alpha, beta from (c, d, gamma, lambda) by the printed formulas.
pub fn t25_derived(id: FamilyId, c: C64, d: C64, g: C64, l: C64, l1: C64, l2: C64) -> Result<BTreeMap<Sym, C64>> {
    t25_derived_tracked(id, c, d, g, l, l1, l2, &Cell::new(f64::INFINITY))
}

#[allow(clippy::too_many_arguments)]
fn t25_derived_tracked(
    id: FamilyId,
    c: C64,
    d: C64,
    g: C64,
    l: C64,
    l1: C64,
    l2: C64,
    cell: &Cell<f64>,
) -> Result<BTreeMap<Sym, C64>> {
    use FamilyId::*;
    let i = |z, w| inv(z, w, cell);
    let two = C64::new(2.0, 0.0);
    let four = C64::new(4.0, 0.0);
    let v = variant(id);
    let alpha = v.sign * c * g * l2 * i(l * l1, "lambda*lambda1")?;
    let beta = match id {
        T2_5I => d - i(two * c * g * l2, "2c*gamma*lambda2")?,
        T2_5II => two - d - i(two * c * g * l2, "2c*gamma*lambda2")?,
        T2_5III => (ONE - two * c * d * g * l2) * i(c * (two - d) * g * l2, "c(2-d)gamma*lambda2")?,
        T2_5IV => (ONE + four * c * g * l2) * i(c * (two - d) * g * l2, "c(2-d)gamma*lambda2")?,
        T2_5V => (ONE - two * c * (two - d) * g * l2) * i(c * d * g * l2, "c*d*gamma*lambda2")?,
        _ => (ONE + four * c * g * l2) * i(c * d * g * l2, "c*d*gamma*lambda2")?,
    };
    let (d1, d2) = match id {
        T2_5I => (g * l2 * i(l, "lambda")?, l * l1 * i(g, "gamma")?),
        T2_5II => (-g * l2 * i(l, "lambda")?, -l * l1 * i(g, "gamma")?),
        T2_5III => (
            (four * c * g * l2 - ONE) * i(two * c * (two - d) * l, "2c(2-d)lambda")?,
            (two - d) * l * l1 * i(two * g, "2*gamma")?,
        ),
        T2_5IV => (
            -(ONE + four * c * g * l2) * i(two * c * (two - d) * l, "2c(2-d)lambda")?,
            -(two - d) * l * l1 * i(two * g, "2*gamma")?,
        ),
        T2_5V => ((ONE - four * c * g * l2) * i(two * c * d * l, "2c*d*lambda")?, -d * l * l1 * i(two * g, "2*gamma")?),
        _ => ((ONE + four * c * g * l2) * i(two * c * d * l, "2c*d*lambda")?, d * l * l1 * i(two * g, "2*gamma")?),
    };
    Ok(BTreeMap::from([(Sym::Alpha, alpha), (Sym::Beta, beta), (Sym::Delta1, d1), (Sym::Delta2, d2)]))
}

/// The (F, G, H) triple of a p42 template, before the delta transform.
pub fn p42_base(id: FamilyId, p: &FamilyParams) -> Result<(ComplexFn, ComplexFn, ComplexFn)> {
    let cx = Ctx { p, l1: ZERO, l2: ZERO, min_den: Cell::new(f64::INFINITY), corrected: false };
    let (f, g, h) = cx.p42_base(id)?;
    Ok((f.into(), g.into(), h.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::Carrier;
    use crate::funcspace::{AdditiveFn, Character};
    use crate::scalar::{c, re};

    fn rat2() -> Carrier {
        Carrier::rat_add(2, None).unwrap()
    }

    fn ex(b0: f64, b1: f64) -> Character {
        Character::exp(vec![re(b0), re(b1)])
    }

    #[test]
    fn p42_three_with_unit_constants() {
        let carrier = rat2();
        let p = FamilyParams::default()
            .with(Sym::C, ONE)
            .with(Sym::D, ONE)
            .with(Sym::Delta, c(0.3, 0.1))
            .with_char(Role::Mu, ex(0.2, -0.1))
            .with_char(Role::Chi, ex(-0.3, 0.25))
            .with_add(AddRole::A, AdditiveFn::linear(vec![re(1.0), re(0.5)]));
        let inst = build(FamilyId::P42_3, &p, ZERO, ZERO, ErrataMode::Corrected).unwrap();
        assert!(inst.verify(&carrier, 1e-9).unwrap().relative() < 1e-12);
    }

    #[test]
    fn p42_three_needs_its_constraint() {
        let carrier = rat2();
        let p = FamilyParams::default()
            .with(Sym::C, ONE)
            .with(Sym::D, re(2.0))
            .with(Sym::Delta, ZERO)
            .with_char(Role::Mu, ex(0.2, -0.1))
            .with_char(Role::Chi, ex(-0.3, 0.25))
            .with_add(AddRole::A, AdditiveFn::linear(vec![re(1.0), re(0.5)]));
        assert!(matches!(build(FamilyId::P42_3, &p, ZERO, ZERO, ErrataMode::Corrected), Err(Error::Constraint { .. })));
        let inst = build_unchecked(FamilyId::P42_3, &p, ZERO, ZERO, ErrataMode::Corrected).unwrap();
        let v = inst.verify(&carrier, 1e-9).unwrap();
        assert!(v.relative() > 0.01, "{}", v.relative());
    }

    #[test]
    fn p42_four_with_half() {
        let carrier = rat2();
        let p = FamilyParams::default()
            .with(Sym::C, re(0.5))
            .with(Sym::Alpha, ONE)
            .with(Sym::Beta, ONE)
            .with(Sym::Delta, re(0.7))
            .with_char(Role::Chi1, ex(0.0, 0.0))
            .with_char(Role::Chi2, ex(0.3, 0.0))
            .with_char(Role::Chi3, ex(0.0, -0.4));
        let inst = build(FamilyId::P42_4, &p, ZERO, ZERO, ErrataMode::AsPrinted).unwrap();
        let v = inst.verify(&carrier, 1e-9).unwrap();
        assert!(v.passes(1e-12), "{}", v.relative());
    }

    #[test]
    fn zero_delta_leaves_base_triple() {
        let carrier = rat2();
        let p = FamilyParams::default()
            .with(Sym::Delta, ZERO)
            .with_char(Role::Chi, ex(0.2, 0.1))
            .with_add(AddRole::A, AdditiveFn::linear(vec![re(1.0), re(0.0)]))
            .with_add(AddRole::A1, AdditiveFn::linear(vec![re(0.0), re(1.0)]));
        let inst = build(FamilyId::P42_1, &p, ZERO, ZERO, ErrataMode::AsPrinted).unwrap();
        let (bf, bg, bh) = p42_base(FamilyId::P42_1, &p).unwrap();
        for (a, b) in inst.solution.components().into_iter().zip([bf, bg, bh]) {
            assert_eq!(a.on_window(&carrier).unwrap(), b.on_window(&carrier).unwrap());
        }
    }

    #[test]
    fn t1_six_spec_instance() {
        let carrier = Carrier::rat_add(1, None).unwrap();
        let p = FamilyParams::default()
            .with(Sym::Lambda, ONE)
            .with(Sym::Beta, ONE)
            .with(Sym::C, re(0.5))
            .with_char(Role::Chi1, Character::exp(vec![ZERO]))
            .with_char(Role::Chi2, Character::exp(vec![ONE]))
            .with_char(Role::Chi3, Character::exp(vec![re(2.0)]));
        let inst = build(FamilyId::T1_6, &p, ZERO, ONE, ErrataMode::AsPrinted).unwrap();
        assert!(inst.verify(&carrier, 1e-9).unwrap().passes(1e-9));
    }

    #[test]
    fn t1_five_rejects_unconstrained() {
        let p = FamilyParams::default()
            .with(Sym::C, ONE)
            .with(Sym::D, re(2.0))
            .with_char(Role::Mu, ex(0.1, 0.0))
            .with_char(Role::M, ex(0.0, 0.2))
            .with_add(AddRole::A, AdditiveFn::linear(vec![ONE, ZERO]));
        let err = build(FamilyId::T1_5, &p, ZERO, ONE, ErrataMode::AsPrinted).unwrap_err();
        assert!(matches!(err, Error::Constraint { ref name, .. } if name == "1-c*d^2=0"));
    }

    #[test]
    fn validator_examples() {
        let p = FamilyParams::default()
            .with(Sym::C, re(0.5))
            .with(Sym::Lambda, ONE)
            .with(Sym::Beta, ONE)
            .with_char(Role::Chi1, ex(0.0, 0.0))
            .with_char(Role::Chi2, ex(1.0, 0.0))
            .with_char(Role::Chi3, ex(2.0, 0.0));
        let checks = validate_constraints(FamilyId::T1_6, &p, ZERO, ONE, ErrataMode::AsPrinted).unwrap();
        assert!(checks.iter().all(|c| c.satisfied));

        let p = FamilyParams::default()
            .with(Sym::Delta1, ONE)
            .with(Sym::Delta2, -ONE)
            .with_char(Role::Mu, ex(0.0, 0.0))
            .with_char(Role::Chi, ex(1.0, 0.0))
            .with_add(AddRole::A, AdditiveFn::linear(vec![ONE, ZERO]));
        let checks = validate_constraints(FamilyId::T2_2, &p, ONE, ONE, ErrataMode::AsPrinted).unwrap();
        let bad: Vec<_> = checks.iter().filter(|c| !c.satisfied).map(|c| c.name.as_str()).collect();
        assert_eq!(bad, ["lambda2*delta2+delta1^2!=0"]);

        let p = FamilyParams::default()
            .with(Sym::C, re(0.25))
            .with(Sym::D, re(2.0))
            .with(Sym::Delta, re(2.0))
            .with_char(Role::Mu, ex(0.0, 0.0))
            .with_char(Role::Chi, ex(1.0, 0.0))
            .with_add(AddRole::A, AdditiveFn::linear(vec![ONE, ZERO]));
        let checks = validate_constraints(FamilyId::T2_4, &p, ONE, ONE, ErrataMode::AsPrinted).unwrap();
        assert!(checks.iter().any(|c| c.name == "d!=delta" && !c.satisfied));
    }

    #[test]
    fn t25_first_spec_example_is_degenerate() {
        let d = t25_derived(FamilyId::T2_5I, re(0.5), ONE, ONE, ONE, ONE, ONE).unwrap();
        assert!(d[&Sym::Beta].norm() < 1e-15);
        assert!((d[&Sym::Alpha] + re(0.5)).norm() < 1e-15);
        assert!((d[&Sym::Delta1] - ONE).norm() < 1e-15 && (d[&Sym::Delta2] - ONE).norm() < 1e-15);
    }
}
