//! Seeded parameter sampling on hosting carriers.

use super::templates::{beta_coefficients, build_raw, validate_constraints};
use super::{catalog::info, ErrataMode, FamilyId, FamilyInstance, FamilyParams, Role, Sym};
use crate::carrier::{Carrier, Kind};
use crate::error::{Error, Result};
use crate::funcspace::{additive_basis, enumerate_characters, AdditiveFn, Character};
use crate::poly;
use crate::scalar::{c, C64, ONE};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub mode: ErrataMode,
    pub max_attempts: usize,
    /// Smallest denominator magnitude accepted in the printed formulas.
    pub min_denominator: f64,
    /// Accepted range for the magnitude of every scalar, free or derived.
    pub magnitude: (f64, f64),
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { mode: ErrataMode::Corrected, max_attempts: 100, min_denominator: 0.05, magnitude: (0.02, 50.0) }
    }
}

/// Carriers on which the family is sampled: rat-add of dimension 2 and
/// nonneg-real-mul for every family, plus Z/3 and Z/5 for families built
/// from characters alone.
pub fn hosting_carriers(id: FamilyId) -> Vec<Carrier> {
    let mut out = vec![
        Carrier::rat_add(2, None).expect("default window"),
        Carrier::nonneg_real_mul(None).expect("default window"),
    ];
    if info(id).additive.is_empty() {
        out.push(Carrier::cyclic(3));
        out.push(Carrier::cyclic(5));
    }
    out
}

fn annulus(rng: &mut ChaCha8Rng) -> C64 {
    let r = (rng.random_range(0.3f64.ln()..3f64.ln())).exp();
    C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

fn box_value(rng: &mut ChaCha8Rng, re: (f64, f64), im: (f64, f64)) -> C64 {
    c(rng.random_range(re.0..re.1), rng.random_range(im.0..im.1))
}

/// A nonzero character on an analytic carrier; `ideal` asks for a nonempty
/// null ideal where the carrier has one.
pub fn draw_character(carrier: &Carrier, rng: &mut ChaCha8Rng, ideal: bool) -> Result<Character> {
    match carrier.kind {
        Kind::RatAdd { dim } => {
            Ok(Character::exp((0..dim).map(|_| box_value(rng, (-0.5, 0.5), (-0.5, 0.5))).collect()))
        }
        Kind::NonnegRealMul => {
            if ideal || rng.random_bool(0.75) {
                Ok(Character::power(box_value(rng, (0.2, 1.5), (-0.5, 0.5))))
            } else {
                Ok(Character::ones())
            }
        }
        Kind::Finite => {
            let chars = enumerate_characters(carrier)?;
            let nonzero: Vec<_> = chars.into_iter().filter(|c| !c.is_zero()).collect();
            nonzero.choose(rng).cloned().ok_or_else(|| Error::CannotHost("no nonzero character".into()))
        }
    }
}

/// A nonzero additive function on the complement of the null ideal.
pub fn draw_additive(carrier: &Carrier, rng: &mut ChaCha8Rng) -> Result<AdditiveFn> {
    match carrier.kind {
        Kind::RatAdd { dim } => loop {
            let alpha: Vec<C64> = (0..dim).map(|_| box_value(rng, (-1.0, 1.0), (-1.0, 1.0))).collect();
            if alpha.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() >= 0.3 {
                return Ok(AdditiveFn::linear(alpha));
            }
        },
        Kind::NonnegRealMul => loop {
            let a = box_value(rng, (-1.0, 1.0), (-1.0, 1.0));
            if a.norm() >= 0.3 {
                return Ok(AdditiveFn::log(a));
            }
        },
        Kind::Finite => {
            let basis = additive_basis(carrier, None)?;
            if basis.dimension() == 0 {
                return Err(Error::CannotHost("additive dimension 0, A≠0 unsatisfiable".into()));
            }
            let funcs = basis.functions(carrier.size().unwrap_or(0));
            Ok(funcs[rng.random_range(0..funcs.len())].clone())
        }
    }
}

fn pick_root(rng: &mut ChaCha8Rng, coeffs: &[C64]) -> Option<C64> {
    let roots = poly::roots(coeffs);
    if roots.is_empty() {
        return None;
    }
    Some(roots[rng.random_range(0..roots.len())])
}

/// Why an attempt was rejected.
fn draw_once(
    id: FamilyId,
    carrier: &Carrier,
    l1: C64,
    l2: C64,
    opts: &SampleOptions,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<FamilyParams, String> {
    use FamilyId::*;
    let tinfo = info(id);
    let mut p = FamilyParams::default();

    if carrier.is_finite() {
        let mut chars: Vec<Character> =
            enumerate_characters(carrier).map_err(|e| e.to_string())?.into_iter().filter(|c| !c.is_zero()).collect();
        if chars.len() < tinfo.chars.len() {
            return Err(format!("needs {} distinct nonzero characters", tinfo.chars.len()));
        }
        chars.shuffle(rng);
        for (r, ch) in tinfo.chars.iter().zip(chars) {
            p.chars.insert(*r, ch);
        }
    } else {
        for r in tinfo.chars {
            let ch = draw_character(carrier, rng, tinfo.psi == Some(*r)).map_err(|e| e.to_string())?;
            p.chars.insert(*r, ch);
        }
        let roles: Vec<&Role> = p.chars.keys().collect();
        for (i, a) in roles.iter().enumerate() {
            for b in &roles[i + 1..] {
                let gap = p.chars[a].distance(&p.chars[b], carrier).map_err(|e| e.to_string())?;
                if gap < 0.2 {
                    return Err(format!("{} and {} nearly coincide", a.name(), b.name()));
                }
            }
        }
    }
    for a in tinfo.additive {
        p.additive.insert(*a, draw_additive(carrier, rng).map_err(|e| e.to_string())?);
    }

    let corrected = opts.mode == ErrataMode::Corrected;
    let two = c(2.0, 0.0);
    let mut set = |k: Sym, v: C64| {
        p.scalars.insert(k, v);
    };
    match id {
        P41_1 => set(Sym::Alpha, annulus(rng)),
        P41_2 | T1_1 => {}
        P42_1 => set(Sym::Delta, annulus(rng)),
        P42_2 => {
            set(Sym::C, annulus(rng));
            set(Sym::Delta, annulus(rng));
        }
        P42_3 | T1_5 => {
            let d = annulus(rng);
            set(Sym::D, d);
            set(Sym::C, ONE / (d * d));
            if id == P42_3 {
                set(Sym::Delta, annulus(rng));
            }
        }
        P42_4 => {
            let (a, b) = (annulus(rng), annulus(rng));
            set(Sym::Alpha, a);
            set(Sym::Beta, b);
            set(Sym::C, ONE / (two * a * a * b * (two - b)));
            set(Sym::Delta, annulus(rng));
        }
        T1_2 => set(Sym::Alpha, annulus(rng)),
        T1_3 => set(Sym::C, annulus(rng)),
        T1_4 => {
            let d = annulus(rng);
            set(Sym::D, d);
            set(Sym::C, if corrected { ONE / (d * d) } else { annulus(rng) });
        }
        T1_6 | T1_7 | T1_8 => {
            let (l, b) = (annulus(rng), annulus(rng));
            set(Sym::Lambda, l);
            set(Sym::Beta, b);
            set(Sym::C, ONE / (two * l * l * b * (two - b)));
        }
        T2_1 => {
            let d = if corrected {
                pick_root(rng, &[l1 * l2 * l2, C64::default(), C64::default(), ONE]).ok_or("no cube root")?
            } else {
                annulus(rng)
            };
            set(Sym::Delta, d);
        }
        T2_2 => {
            let d1 = annulus(rng);
            set(Sym::Delta1, d1);
            set(Sym::Delta2, if corrected { l1 * l2 / d1 } else { annulus(rng) });
        }
        T2_3 => {
            let cc = annulus(rng);
            set(Sym::C, cc);
            let d = pick_root(rng, &[cc * l1 * l2 * l2, C64::default(), -ONE, cc]).ok_or("no cubic root")?;
            set(Sym::Delta, d);
        }
        T2_4 => {
            let d = annulus(rng);
            set(Sym::D, d);
            set(Sym::C, ONE / (d * d));
            let de = if corrected {
                pick_root(rng, &[l1 * l2 * l2, d * d, -two * d, ONE]).ok_or("no cubic root")?
            } else {
                annulus(rng)
            };
            set(Sym::Delta, de);
        }
        _ => {
            let (d, l) = (annulus(rng), annulus(rng));
            let cc = ONE / (two * l * l * d * (two - d));
            set(Sym::D, d);
            set(Sym::Lambda, l);
            set(Sym::C, cc);
            if l1 == C64::default() {
                return Err("lambda1 must be nonzero".into());
            }
            let (u, v) = beta_coefficients(id, cc, d, l2).map_err(|e| e.to_string())?;
            let sign = super::templates::variant(id).sign;
            let k = two * sign * cc * l2 / (l * l1);
            let g = pick_root(rng, &[-ONE, -k * v * v, k * v * (two - two * u), k * u * (two - u)])
                .ok_or("no gamma root")?;
            set(Sym::Gamma, g);
        }
    }

    let checks = validate_constraints(id, &p, l1, l2, opts.mode).map_err(|e| e.to_string())?;
    if let Some(bad) = checks.iter().find(|c| !c.satisfied) {
        return Err(format!("{} ({:.3e})", bad.name, bad.magnitude));
    }
    let (inst, min_den) = build_raw(id, &p, l1, l2, opts.mode).map_err(|e| e.to_string())?;
    if min_den < opts.min_denominator {
        return Err(format!("denominator {min_den:.3e} too small"));
    }
    let (lo, hi) = opts.magnitude;
    for (k, v) in p.scalars.iter().chain(inst.derived.iter()) {
        let m = v.norm();
        // delta may legitimately be tiny for the p42 transform, but keep draws tame.
        if !(lo..=hi).contains(&m) {
            return Err(format!("|{}| = {m:.3e} out of range", k.name()));
        }
    }
    if id.is_t25() {
        let b = inst.derived[&Sym::Beta];
        if (two - b).norm() < lo {
            return Err("2-beta nearly vanishes".into());
        }
    }
    Ok(p)
}

/// Constraint-satisfying parameters for `id` on `carrier`, fully determined
/// by `seed`.
pub fn sample_params(
    id: FamilyId,
    carrier: &Carrier,
    l1: C64,
    l2: C64,
    seed: u64,
    opts: &SampleOptions,
) -> Result<FamilyParams> {
    let tinfo = info(id);
    if carrier.is_finite() && !tinfo.additive.is_empty() {
        let dim = additive_basis(carrier, None)?.dimension();
        if dim == 0 {
            return Err(Error::CannotHost("additive dimension 0, A≠0 unsatisfiable".into()));
        }
    }
    if carrier.is_finite() && tinfo.additive.is_empty() {
        let n = enumerate_characters(carrier)?.iter().filter(|c| !c.is_zero()).count();
        if n < tinfo.chars.len() {
            return Err(Error::CannotHost(format!(
                "{} distinct nonzero characters needed, carrier has {n}",
                tinfo.chars.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reason = String::new();
    for _ in 0..opts.max_attempts {
        match draw_once(id, carrier, l1, l2, opts, &mut rng) {
            Ok(p) => return Ok(p),
            Err(r) => reason = r,
        }
    }
    Err(Error::Sampling { attempts: opts.max_attempts, reason })
}

/// Samples and builds.
pub fn sample_instance(
    id: FamilyId,
    carrier: &Carrier,
    l1: C64,
    l2: C64,
    seed: u64,
    opts: &SampleOptions,
) -> Result<FamilyInstance> {
    let p = sample_params(id, carrier, l1, l2, seed, opts)?;
    super::build(id, &p, l1, l2, opts.mode)
}
