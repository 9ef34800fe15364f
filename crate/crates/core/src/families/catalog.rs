//! Static description of every template.

use super::{AddRole, FamilyId, Role, Sym};
use serde_json::{json, Value};

pub struct Erratum {
    /// Any of "constraint", "component", "interpretation".
    pub kinds: &'static [&'static str],
    pub summary: &'static str,
    pub corrected_formulas: &'static [(&'static str, &'static str)],
    pub added_constraints: &'static [&'static str],
}

pub struct TemplateInfo {
    pub id: FamilyId,
    pub chars: &'static [Role],
    /// Character carrying the extension by zero, if any.
    pub psi: Option<Role>,
    pub additive: &'static [AddRole],
    /// Scalars supplied by the caller.
    pub scalars: &'static [Sym],
    pub nonzero: &'static [Sym],
    /// Scalars computed from the others.
    pub derived: &'static [Sym],
    pub formulas: &'static [(&'static str, &'static str)],
    pub constraints: &'static [&'static str],
    pub erratum: Option<Erratum>,
}

use AddRole::{A, A1};
use Role::{Chi, Chi1, Chi2, Chi3, Mu, M};
use Sym::*;

const X123: &[Role] = &[Chi1, Chi2, Chi3];
const T1_NONZERO: &[&str] = &["m!=0", "mu!=m", "A!=0", "lambda2!=0", "lambda1=0"];
const T25_SCALARS: &[Sym] = &[C, D, Gamma, Lambda];
const T25_DERIVED: &[Sym] = &[Delta1, Delta2, Alpha, Beta];
const T25_CONSTRAINTS: &[&str] =
    &["2*c*lambda^2*d*(2-d)=1", "2*alpha*gamma^2*beta*(2-beta)=1", "chi1,chi2,chi3 distinct"];

fn t25_formulas(id: FamilyId) -> &'static [(&'static str, &'static str)] {
    use FamilyId::*;
    match id {
        T2_5I => &[
            ("H2", "alpha*beta*chi1 + alpha*(2-beta)*chi2 - 2*alpha*chi3"),
            ("G2", "beta/4*chi1 + (2-beta)/4*chi2 + chi3/2"),
            ("lambda2*F2", "(chi1-chi2)/(2*gamma)"),
            ("delta1", "gamma*lambda2/lambda"),
            ("delta2", "lambda*lambda1/gamma"),
            ("alpha", "-c*gamma*lambda2/(lambda*lambda1)"),
            ("beta", "d - 1/(2*c*gamma*lambda2)"),
        ],
        T2_5II => &[
            ("H2", "alpha*beta*chi2 + alpha*(2-beta)*chi1 - 2*alpha*chi3"),
            ("G2", "beta/4*chi2 + (2-beta)/4*chi1 + chi3/2"),
            ("lambda2*F2", "(chi1-chi2)/(2*gamma)"),
            ("delta1", "-gamma*lambda2/lambda"),
            ("delta2", "-lambda*lambda1/gamma"),
            ("alpha", "c*gamma*lambda2/(lambda*lambda1)"),
            ("beta", "2 - d - 1/(2*c*gamma*lambda2)"),
        ],
        T2_5III => &[
            ("H2", "alpha*beta*chi1 + alpha*(2-beta)*chi3 - 2*alpha*chi2"),
            ("G2", "beta/4*chi1 + (2-beta)/4*chi3 + chi2/2"),
            ("lambda2*F2", "(chi1-chi3)/(2*gamma)"),
            ("delta1", "(4*c*gamma*lambda2-1)/(2*c*(2-d)*lambda)"),
            ("delta2", "(2-d)*lambda*lambda1/(2*gamma)"),
            ("alpha", "c*gamma*lambda2/(lambda*lambda1)"),
            ("beta", "(1-2*c*d*gamma*lambda2)/(c*(2-d)*gamma*lambda2)"),
        ],
        T2_5IV => &[
            ("H2", "alpha*beta*chi3 + alpha*(2-beta)*chi1 - 2*alpha*chi2"),
            ("G2", "beta/4*chi3 + (2-beta)/4*chi1 + chi2/2"),
            ("lambda2*F2", "(chi3-chi1)/(2*gamma)"),
            ("delta1", "-(1+4*c*gamma*lambda2)/(2*c*(2-d)*lambda)"),
            ("delta2", "-(2-d)*lambda*lambda1/(2*gamma)"),
            ("alpha", "-c*gamma*lambda2/(lambda*lambda1)"),
            ("beta", "(1+4*c*gamma*lambda2)/(c*(2-d)*gamma*lambda2)"),
        ],
        T2_5V => &[
            ("H2", "alpha*beta*chi2 + alpha*(2-beta)*chi3 - 2*alpha*chi1"),
            ("G2", "beta/4*chi2 + (2-beta)/4*chi3 + chi1/2"),
            ("lambda2*F2", "(chi2-chi3)/(2*gamma)"),
            ("delta1", "(1-4*c*gamma*lambda2)/(2*c*d*lambda)"),
            ("delta2", "-d*lambda*lambda1/(2*gamma)"),
            ("alpha", "-c*gamma*lambda2/(lambda*lambda1)"),
            ("beta", "(1-2*c*(2-d)*gamma*lambda2)/(c*d*gamma*lambda2)"),
        ],
        _ => &[
            ("H2", "alpha*beta*chi3 + alpha*(2-beta)*chi2 - 2*alpha*chi1"),
            ("G2", "beta/4*chi3 + (2-beta)/4*chi2 + chi1/2"),
            ("lambda2*F2", "(chi3-chi2)/(2*gamma)"),
            ("delta1", "(1+4*c*gamma*lambda2)/(2*c*d*lambda)"),
            ("delta2", "d*lambda*lambda1/(2*gamma)"),
            ("alpha", "c*gamma*lambda2/(lambda*lambda1)"),
            ("beta", "(1+4*c*gamma*lambda2)/(c*d*gamma*lambda2)"),
        ],
    }
}

const T25_COMMON: &[(&str, &str)] = &[
    ("f", "F1"),
    ("g1", "-delta1^2/2*F1 + G1 + delta1*(lambda1*H1)"),
    ("h", "H2"),
    ("g2", "-delta2^2/2*H2 + G2 + delta2*(lambda2*F2)"),
    ("F1", "c*d*chi1 + c*(2-d)*chi2 - 2*c*chi3"),
    ("G1", "d/4*chi1 + (2-d)/4*chi2 + chi3/2"),
    ("lambda1*H1", "(chi1-chi2)/(2*lambda)"),
];

pub fn info(id: FamilyId) -> TemplateInfo {
    use FamilyId::*;
    let base = TemplateInfo {
        id,
        chars: &[],
        psi: None,
        additive: &[],
        scalars: &[],
        nonzero: &[],
        derived: &[],
        formulas: &[],
        constraints: &[],
        erratum: None,
    };
    match id {
        P41_1 => TemplateInfo {
            chars: &[Chi1, Chi2],
            scalars: &[Alpha],
            nonzero: &[Alpha],
            formulas: &[("f", "alpha*(chi1-chi2)"), ("g", "(chi1+chi2)/2")],
            constraints: &["chi1!=chi2", "alpha!=0"],
            ..base
        },
        P41_2 => TemplateInfo {
            chars: &[Chi],
            psi: Some(Chi),
            additive: &[A],
            formulas: &[("f", "Psi_chi(A)"), ("g", "chi")],
            constraints: &["chi!=0", "A!=0"],
            ..base
        },
        P42_1 => TemplateInfo {
            chars: &[Chi],
            psi: Some(Chi),
            additive: &[A, A1],
            scalars: &[Delta],
            formulas: &[
                ("F", "Psi_chi(A1 + A^2)/2"),
                ("G", "chi"),
                ("H", "Psi_chi(A)"),
                ("f,g,h", "F, -delta^2/2*F + G + delta*H, -delta*F + H"),
            ],
            constraints: &["chi!=0", "A!=0"],
            ..base
        },
        P42_2 => TemplateInfo {
            chars: &[Mu, Chi],
            psi: Some(Chi),
            additive: &[A],
            scalars: &[C, Delta],
            nonzero: &[C],
            formulas: &[
                ("F", "c^2*(mu-chi) - c*Psi_chi(A)"),
                ("G", "chi"),
                ("H", "c*(mu-chi)"),
                ("f,g,h", "F, -delta^2/2*F + G + delta*H, -delta*F + H"),
            ],
            constraints: &["chi!=0", "mu!=chi", "A!=0", "c!=0"],
            ..base
        },
        P42_3 => TemplateInfo {
            chars: &[Mu, Chi],
            psi: Some(Chi),
            additive: &[A],
            scalars: &[C, D, Delta],
            nonzero: &[C, D],
            formulas: &[
                ("F", "c*(mu-chi) + c*d*Psi_chi(A)"),
                ("G", "(mu+chi)/2 - d/2*Psi_chi(A)"),
                ("H", "Psi_chi(A)"),
                ("f,g,h", "F, -delta^2/2*F + G + delta*H, -delta*F + H"),
            ],
            constraints: &["1-c*d^2=0", "chi!=0", "mu!=chi", "A!=0"],
            ..base
        },
        P42_4 => TemplateInfo {
            chars: X123,
            scalars: &[Alpha, Beta, C, Delta],
            nonzero: &[Alpha, Beta, C],
            formulas: &[
                ("F", "c*beta*chi1 + c*(2-beta)*chi2 - 2*c*chi3"),
                ("G", "beta/4*chi1 + (2-beta)/4*chi2 + chi3/2"),
                ("H", "(chi1-chi2)/(2*alpha)"),
                ("f,g,h", "F, -delta^2/2*F + G + delta*H, -delta*F + H"),
            ],
            constraints: &["2*c*alpha^2*beta*(2-beta)=1", "chi1,chi2,chi3 distinct"],
            ..base
        },
        T1_1 => TemplateInfo {
            chars: &[M],
            psi: Some(M),
            additive: &[A, A1],
            formulas: &[("f", "Psi_m(A)"), ("g1", "m"), ("h", "Psi_m(A1 + lambda2^2*A^2)/2"), ("g2", "m")],
            constraints: T1_NONZERO,
            ..base
        },
        T1_2 => TemplateInfo {
            chars: &[Mu, M],
            psi: Some(M),
            additive: &[A],
            scalars: &[Alpha],
            nonzero: &[Alpha],
            formulas: &[
                ("f", "alpha*(mu-m)"),
                ("g1", "(mu+m)/2"),
                ("h", "alpha^2*lambda2^2*(mu-m) - alpha*lambda2*Psi_m(A)"),
                ("g2", "m"),
            ],
            constraints: T1_NONZERO,
            ..base
        },
        T1_3 => TemplateInfo {
            chars: &[Mu, M],
            psi: Some(M),
            additive: &[A],
            scalars: &[C],
            nonzero: &[C],
            formulas: &[
                ("f", "Psi_m(A)/lambda2"),
                ("g1", "m"),
                ("h", "c^2*(mu-m) - c*Psi_m(A)"),
                ("g2", "(mu-m)/2 - Psi_m(A)/(2c)"),
            ],
            constraints: T1_NONZERO,
            erratum: Some(Erratum {
                kinds: &["component"],
                summary: "g2 = (mu+m)/2 + Psi_m(A)/(2c)",
                corrected_formulas: &[("g2", "(mu+m)/2 + Psi_m(A)/(2c)")],
                added_constraints: &[],
            }),
            ..base
        },
        T1_4 => TemplateInfo {
            chars: &[Mu, M],
            psi: Some(M),
            additive: &[A],
            scalars: &[C, D],
            nonzero: &[C, D],
            formulas: &[
                ("f", "-(mu-m)/(d*lambda2)"),
                ("g1", "(mu+m)/2"),
                ("h", "c*(mu-m) + Psi_m(A)/d"),
                ("g2", "m"),
            ],
            constraints: T1_NONZERO,
            erratum: Some(Erratum {
                kinds: &["constraint"],
                summary: "requires 1-c*d^2=0",
                corrected_formulas: &[],
                added_constraints: &["1-c*d^2=0"],
            }),
            ..base
        },
        T1_5 => TemplateInfo {
            chars: &[Mu, M],
            psi: Some(M),
            additive: &[A],
            scalars: &[C, D],
            nonzero: &[C, D],
            formulas: &[
                ("f", "Psi_m(A)/lambda2"),
                ("g1", "m"),
                ("h", "c*(mu-m) + Psi_m(A)/d"),
                ("g2", "(mu+m)/2 - d/2*Psi_m(A)"),
            ],
            constraints: &["1-c*d^2=0", "m!=0", "mu!=m", "A!=0", "lambda2!=0", "lambda1=0"],
            ..base
        },
        T1_6 => TemplateInfo {
            chars: X123,
            scalars: &[Lambda, Beta, C],
            nonzero: &[Lambda, Beta, C],
            formulas: &[
                ("f", "(chi1-chi2)/(2*lambda*lambda2)"),
                ("g1", "(chi1+chi2)/2"),
                ("h", "c*beta*chi1 + c*(2-beta)*chi2 - 2*c*chi3"),
                ("g2", "(beta*chi1 + (2-beta)*chi2 + 2*chi3)/4"),
            ],
            constraints: &["2*c*lambda^2*beta*(2-beta)=1", "chi1,chi2,chi3 distinct", "lambda1=0"],
            ..base
        },
        T1_7 => TemplateInfo {
            chars: X123,
            scalars: &[Lambda, Beta, C],
            nonzero: &[Lambda, Beta, C],
            formulas: &[
                ("f", "(chi1-chi3)/(lambda*lambda2*(2-beta))"),
                ("g1", "(chi1+chi3)/2"),
                ("h", "c*beta*chi1 + c*(2-beta)*chi2 - 2*c*chi3"),
                ("g2", "(-beta*chi1 + (2-beta)*chi2 + 2*chi3)/(2*(2-beta))"),
            ],
            constraints: &["2*c*lambda^2*beta*(2-beta)=1", "chi1,chi2,chi3 distinct", "lambda1=0"],
            ..base
        },
        T1_8 => TemplateInfo {
            chars: X123,
            scalars: &[Lambda, Beta, C],
            nonzero: &[Lambda, Beta, C],
            formulas: &[
                ("f", "-(chi2-chi3)/(lambda*lambda2*beta)"),
                ("g1", "(chi2+chi3)/2"),
                ("h", "c*beta*chi1 + c*(2-beta)*chi2 - 2*c*chi3"),
                ("g2", "(beta*chi1 - (2-beta)*chi2 + 2*chi3)/(2*beta)"),
            ],
            constraints: &["2*c*lambda^2*beta*(2-beta)=1", "chi1,chi2,chi3 distinct", "lambda1=0"],
            ..base
        },
        T2_1 => TemplateInfo {
            chars: &[Chi],
            psi: Some(Chi),
            additive: &[A, A1],
            scalars: &[Delta],
            nonzero: &[Delta],
            formulas: &[
                ("f", "Psi_chi(A1 + A^2)/2"),
                ("g1", "-delta/4*Psi_chi(delta*A1 - 4A) - delta^2/4*Psi_chi(A^2) + chi"),
                ("h", "-Psi_chi(delta*A1 - 2A)/(2*lambda1) - delta/(2*lambda1)*Psi_chi(A^2)"),
                ("g2", "-delta/4*Psi_chi(delta*A1 + 2A) - delta^2/4*Psi_chi(A^2) + chi"),
            ],
            constraints: &["chi!=0", "A!=0", "delta!=0"],
            erratum: Some(Erratum {
                kinds: &["constraint"],
                summary: "requires delta^3+lambda1*lambda2^2=0",
                corrected_formulas: &[],
                added_constraints: &["delta^3+lambda1*lambda2^2=0"],
            }),
            ..base
        },
        T2_2 => TemplateInfo {
            chars: &[Mu, Chi],
            psi: Some(Chi),
            additive: &[A],
            scalars: &[Delta1, Delta2],
            nonzero: &[Delta1, Delta2],
            formulas: &[
                ("K", "lambda1/(lambda1*delta1 + delta2^2)"),
                ("L", "lambda2/(lambda2*delta2 + delta1^2)"),
                ("f", "K*(K*(mu-chi) - Psi_chi(A))"),
                ("g1", "delta1*K/2*((1 + delta2^2/(lambda1*delta1+delta2^2))*(mu-chi) + Psi_chi(A)) + chi"),
                ("h", "L^2*(mu-chi)"),
                ("g2", "delta2*L/2*((1 + delta1^2/(lambda2*delta2+delta1^2))*(mu-chi) - delta1*Psi_chi(A)) + chi"),
            ],
            constraints: &["lambda2*delta2+delta1^2!=0", "lambda1*delta1+delta2^2!=0", "mu!=chi", "A!=0"],
            erratum: Some(Erratum {
                kinds: &["interpretation", "constraint", "component"],
                summary: "f read as K*(K*(mu-chi)-Psi_chi(A)); requires delta1*delta2=lambda1*lambda2; h gains L*delta1/delta2*Psi_chi(A); g1 Psi coefficient delta1^2*K/2",
                corrected_formulas: &[
                    ("g1", "delta1*K/2*(1 + delta2^2/(lambda1*delta1+delta2^2))*(mu-chi) + delta1^2*K/2*Psi_chi(A) + chi"),
                    ("h", "L^2*(mu-chi) + L*delta1/delta2*Psi_chi(A)"),
                ],
                added_constraints: &["delta1*delta2=lambda1*lambda2"],
            }),
            ..base
        },
        T2_3 => TemplateInfo {
            chars: &[Mu, Chi],
            psi: Some(Chi),
            additive: &[A],
            scalars: &[C, Delta],
            nonzero: &[C, Delta],
            formulas: &[
                ("f", "c^2*(mu-chi) - c*Psi_chi(A)"),
                ("g1", "((1-(delta*c-1)^2)*mu + (1+(delta*c-1)^2)*chi)/2 + delta^2*c/2*Psi_chi(A)"),
                ("h", "lambda2^2*c^2/delta^2*(mu-chi) + delta*c/lambda1*Psi_chi(A)"),
                ("g2", "((1-delta^2*c^2)*mu + (1+delta^2*c^2)*chi)/2 - delta^3*(c-delta)^2/(2*c*lambda1*lambda2^2)*Psi_chi(A)"),
            ],
            constraints: &["c*delta^3-delta^2+c*lambda1*lambda2^2=0", "mu!=chi", "A!=0"],
            erratum: Some(Erratum {
                kinds: &["component"],
                summary: "g2 Psi coefficient -delta^3*(c*delta-1)^2/(2*c*lambda1*lambda2^2)",
                corrected_formulas: &[(
                    "g2",
                    "((1-delta^2*c^2)*mu + (1+delta^2*c^2)*chi)/2 - delta^3*(c*delta-1)^2/(2*c*lambda1*lambda2^2)*Psi_chi(A)",
                )],
                added_constraints: &[],
            }),
            ..base
        },
        T2_4 => TemplateInfo {
            chars: &[Mu, Chi],
            psi: Some(Chi),
            additive: &[A],
            scalars: &[C, D, Delta],
            nonzero: &[C, D, Delta],
            formulas: &[
                ("f", "c*(mu-chi) + c*d*Psi_chi(A)"),
                ("g1", "((d^2-delta^2)*mu + (d^2+delta^2)*chi)/(2*d^2) + (d^2+delta^2)/(2*d)*Psi_chi(A)"),
                ("h", "-delta/(d^2*lambda1)*(mu-chi) + (d-delta)/(d*lambda1)*Psi_chi(A)"),
                ("g2", "((delta*d^2+lambda1*lambda2^2)*mu + (delta*d^2-lambda1*lambda2^2)*chi)/(2*delta*d^2) - lambda1*lambda2^2/(2*d*(d-delta))*Psi_chi"),
            ],
            constraints: &["d!=delta", "1-c*d^2=0", "mu!=chi", "A!=0"],
            erratum: Some(Erratum {
                kinds: &["interpretation", "constraint", "component"],
                summary: "dangling Psi_chi in g2 read as Psi_chi(A); requires delta*(d-delta)^2+lambda1*lambda2^2=0; g1 Psi coefficient -(d-delta)^2/(2*d)",
                corrected_formulas: &[
                    ("g1", "((d^2-delta^2)*mu + (d^2+delta^2)*chi)/(2*d^2) - (d-delta)^2/(2*d)*Psi_chi(A)"),
                    ("g2", "((delta*d^2+lambda1*lambda2^2)*mu + (delta*d^2-lambda1*lambda2^2)*chi)/(2*delta*d^2) - lambda1*lambda2^2/(2*d*(d-delta))*Psi_chi(A)"),
                ],
                added_constraints: &["delta*(d-delta)^2+lambda1*lambda2^2=0"],
            }),
            ..base
        },
        _ => TemplateInfo {
            chars: X123,
            scalars: T25_SCALARS,
            nonzero: T25_SCALARS,
            derived: T25_DERIVED,
            formulas: t25_formulas(id),
            constraints: T25_CONSTRAINTS,
            erratum: (id == T2_5II).then_some(Erratum {
                kinds: &["component"],
                summary: "lambda2*F2 = (chi2-chi1)/(2*gamma)",
                corrected_formulas: &[("lambda2*F2", "(chi2-chi1)/(2*gamma)")],
                added_constraints: &[],
            }),
            ..base
        },
    }
}

fn pairs(list: &[(&str, &str)]) -> Value {
    Value::Object(list.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

impl TemplateInfo {
    pub fn to_json(&self) -> Value {
        let names = |xs: &[Sym]| xs.iter().map(|s| s.name()).collect::<Vec<_>>();
        let mut formulas = pairs(self.formulas);
        if self.id.is_t25() {
            let common = pairs(T25_COMMON);
            if let (Value::Object(m), Value::Object(c)) = (&mut formulas, common) {
                for (k, v) in c {
                    m.insert(k, v);
                }
            }
        }
        json!({
            "id": self.id.key(),
            "shape": format!("{:?}", self.id.shape()),
            "characters": self.chars.iter().map(|r| r.name()).collect::<Vec<_>>(),
            "psi_character": self.psi.map(|r| r.name()),
            "additive": self.additive.iter().map(|r| r.name()).collect::<Vec<_>>(),
            "scalars": names(self.scalars),
            "derived": names(self.derived),
            "formulas": formulas,
            "constraints": self.constraints,
            "erratum": self.erratum.as_ref().map(|e| json!({
                "kinds": e.kinds,
                "summary": e.summary,
                "corrected_formulas": pairs(e.corrected_formulas),
                "added_constraints": e.added_constraints,
            })),
        })
    }
}

/// The whole catalog, in key order.
pub fn catalog_json() -> Value {
    json!({
        "schema": crate::SCHEMA_VERSION,
        "templates": FamilyId::ALL.iter().map(|id| info(*id).to_json()).collect::<Vec<_>>(),
    })
}
