use cslab::carrier::{Carrier, Element};
use cslab::classify::{canonicalize, classify, fit_template, scalar_gap};
use cslab::families::{
    build_unchecked, default_lambdas, hosting_carriers, sample_instance, sample_params, verify_solution, ErrataMode,
    FamilyId, FamilyInstance, SampleOptions, Solution,
};
use cslab::funcspace::{enumerate_characters, psi_extend, AdditiveFn, Character, ComplexFn, Lin, Phi};
use cslab::laws::{residual_system, swap_system, Quadruple};
use cslab::oracles::{constructed, falsify, Status, Suite};
use cslab::scalar::{c, C64, ZERO};
use proptest::prelude::*;

fn cplx(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(a, b)| c(a, b))
}

fn rat2() -> Carrier {
    Carrier::rat_add(2, None).unwrap()
}

fn exp_char() -> impl Strategy<Value = Character> {
    (cplx(0.5), cplx(0.5)).prop_map(|(a, b)| Character::exp(vec![a, b]))
}

fn linear() -> impl Strategy<Value = AdditiveFn> {
    (cplx(2.0), cplx(2.0)).prop_map(|(a, b)| AdditiveFn::linear(vec![a, b]))
}

fn values(carrier: &Carrier, f: &ComplexFn) -> Vec<C64> {
    f.on_window(carrier).unwrap()
}

fn gap(a: &[C64], b: &[C64]) -> f64 {
    let scale = a.iter().chain(b).map(|z| z.norm()).fold(1.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

fn system_id() -> impl Strategy<Value = FamilyId> {
    prop::sample::select(FamilyId::ALL.into_iter().filter(|i| i.is_system()).collect::<Vec<_>>())
}

fn any_id() -> impl Strategy<Value = FamilyId> {
    prop::sample::select(FamilyId::ALL.to_vec())
}

fn instance(id: FamilyId, host: usize, seed: u64) -> (Carrier, FamilyInstance) {
    let hosts = hosting_carriers(id);
    let carrier = hosts[host % hosts.len()].clone();
    let (l1, l2) = default_lambdas(id);
    let inst = sample_instance(id, &carrier, l1, l2, seed, &SampleOptions::default()).unwrap();
    (carrier, inst)
}

/// The monogenic semigroup with the given index and period, as a table.
fn monogenic(index: usize, period: usize) -> Carrier {
    let n = index + period - 1;
    let reduce = |k: usize| if k <= n { k } else { index + (k - index) % period };
    let labels: Vec<String> = (1..=n).map(|k| format!("a{k}")).collect();
    let table = (1..=n).map(|i| (1..=n).map(|j| reduce(i + j) - 1).collect()).collect();
    Carrier::finite(labels, table).unwrap()
}

/// Multiplicative maps into {0} and the 12th roots of unity, by brute force.
fn brute_force_count(carrier: &Carrier) -> usize {
    let n = carrier.size().unwrap();
    let mut vals = vec![ZERO];
    vals.extend((0..12).map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 12.0)));
    let t = carrier.table();
    (0..vals.len().pow(n as u32))
        .filter(|code| {
            let chi: Vec<C64> = (0..n).map(|i| vals[code / vals.len().pow(i as u32) % vals.len()]).collect();
            (0..n).all(|x| (0..n).all(|y| (chi[t[x][y]] - chi[x] * chi[y]).norm() < 1e-9))
        })
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_is_linear(chi in exp_char(), a in linear(), b in linear(), s in cplx(2.0), t in cplx(2.0)) {
        let car = rat2();
        let combo = psi_extend(&car, &chi, &Phi::Combo(vec![(s, Phi::Add(a.clone())), (t, Phi::Add(b.clone()))])).unwrap();
        let parts: ComplexFn = (Lin::psi(&chi, &a) * s + Lin::psi(&chi, &b) * t).into();
        prop_assert!(gap(&values(&car, &combo), &values(&car, &parts)) < 1e-12);
    }

    /// Dividing by the character off its null ideal recovers the argument.
    #[test]
    fn psi_is_injective_off_the_ideal(s in cplx(3.0), alpha in cplx(2.0)) {
        let car = Carrier::nonneg_real_mul(None).unwrap();
        let chi = Character::power(s);
        let a = AdditiveFn::log(alpha);
        let image: ComplexFn = Lin::psi(&chi, &a).into();
        for x in car.window() {
            let k = chi.eval(x).unwrap();
            if k.norm() > 1e-12 {
                let back = image.eval(x).unwrap() / k;
                let want = a.eval(x).unwrap().unwrap();
                prop_assert!((back - want).norm() <= 1e-12 * want.norm().max(1.0));
            } else {
                prop_assert_eq!(image.eval(x).unwrap(), ZERO);
            }
        }
    }

    #[test]
    fn residual_ignores_window_order(id in system_id(), seed in 0u64..500, shift in 1usize..11) {
        let car = rat2();
        let (l1, l2) = default_lambdas(id);
        let inst = sample_instance(id, &car, l1, l2, seed, &SampleOptions::default()).unwrap();
        let mut window: Vec<Element> = car.window().to_vec();
        let len = window.len();
        window.rotate_left(shift % len);
        window.reverse();
        let permuted = Carrier::rat_add(2, Some(window)).unwrap();
        let q = inst.solution.quadruple().unwrap();
        let a = residual_system(&car, q, l1, l2, 1e-9).unwrap();
        let b = residual_system(&permuted, q, l1, l2, 1e-9).unwrap();
        prop_assert_eq!(a.r1().max_abs, b.r1().max_abs);
        prop_assert_eq!(a.r2().max_abs, b.r2().max_abs);
        prop_assert_eq!(a.residual.scale, b.residual.scale);
    }

    #[test]
    fn swap_is_exact(id in system_id(), seed in 0u64..500, host in 0usize..4) {
        let (car, inst) = instance(id, host, seed);
        let q = inst.solution.quadruple().unwrap();
        let before = residual_system(&car, q, inst.lambda1, inst.lambda2, 1e-9).unwrap();
        let (sq, m1, m2) = swap_system(q, inst.lambda1, inst.lambda2);
        let after = residual_system(&car, &sq, m1, m2, 1e-9).unwrap();
        prop_assert_eq!(after.r1().max_abs.to_bits(), before.r2().max_abs.to_bits());
        prop_assert_eq!(after.r2().max_abs.to_bits(), before.r1().max_abs.to_bits());
        let (back, k1, k2) = swap_system(&sq, m1, m2);
        prop_assert_eq!((k1, k2), (inst.lambda1, inst.lambda2));
        prop_assert_eq!(residual_system(&car, &back, k1, k2, 1e-9).unwrap().residual, before.residual);
    }

    /// f -> t f and h -> s h, compensated by lambda1^2 -> lambda1^2 t/s^2 and
    /// lambda2^2 -> lambda2^2 s/t^2.
    #[test]
    fn gauge_scaling_preserves_solutions(id in system_id(), seed in 0u64..300, t in cplx(3.0), s in cplx(3.0)) {
        prop_assume!(t.norm() > 0.1 && s.norm() > 0.1);
        let (car, inst) = instance(id, 0, seed);
        let q = inst.solution.quadruple().unwrap();
        let scaled = Quadruple { f: q.f.scaled(t), g1: q.g1.clone(), h: q.h.scaled(s), g2: q.g2.clone() };
        let m1 = inst.lambda1 * (t / (s * s)).sqrt();
        let m2 = inst.lambda2 * (s / (t * t)).sqrt();
        let r = residual_system(&car, &scaled, m1, m2, 1e-9).unwrap().relative();
        prop_assert!(r < 1e-9, "r = {r:e}");
    }

    #[test]
    fn characters_match_brute_force(index in 1usize..4, period in 1usize..5) {
        let car = monogenic(index, period);
        prop_assume!(car.size().unwrap() <= 4);
        let chars = enumerate_characters(&car).unwrap();
        prop_assert_eq!(chars.len(), brute_force_count(&car));
        for chi in &chars {
            prop_assert!(chi.multiplicativity_residual(&car).unwrap() < 1e-12);
        }
    }

    #[test]
    fn equality_constraints_are_necessary(seed in 0u64..1000, factor in 1.1f64..1.5) {
        use FamilyId::*;
        use cslab::families::Sym;
        let car = rat2();
        for (id, sym) in [(T1_5, Sym::D), (T1_6, Sym::Lambda), (T2_3, Sym::Delta), (P42_3, Sym::D), (T2_5III, Sym::Gamma)] {
            let (l1, l2) = default_lambdas(id);
            let p = sample_params(id, &car, l1, l2, seed, &SampleOptions::default()).unwrap();
            let v = p.s(sym).unwrap();
            let broken = build_unchecked(id, &p.clone().with(sym, v * factor), l1, l2, ErrataMode::Corrected).unwrap();
            let r = broken.verify(&car, 1e-9).unwrap().relative();
            prop_assert!(r > 1e-6, "{id}: r = {r:e}");
        }
    }

    #[test]
    fn t25_variants_differ(seed in 0u64..500) {
        use FamilyId::*;
        let car = rat2();
        let variants = [T2_5I, T2_5II, T2_5III, T2_5IV, T2_5V, T2_5VI];
        let (l1, l2) = default_lambdas(T2_5I);
        let p = sample_params(T2_5I, &car, l1, l2, seed, &SampleOptions::default()).unwrap();
        let built: Vec<Vec<C64>> = variants
            .iter()
            .map(|&id| {
                let inst = build_unchecked(id, &p, l1, l2, ErrataMode::Corrected).unwrap();
                inst.solution.components().iter().flat_map(|f| values(&car, f)).collect()
            })
            .collect();
        for i in 0..built.len() {
            for j in i + 1..built.len() {
                prop_assert!(gap(&built[i], &built[j]) > 1e-6, "{} == {}", variants[i], variants[j]);
            }
        }
    }

    #[test]
    fn instance_files_round_trip(id in any_id(), seed in 0u64..300, host in 0usize..4) {
        let (car, inst) = instance(id, host, seed);
        let v = inst.to_json(&car).unwrap();
        let (car2, back) = FamilyInstance::from_json(&v).unwrap();
        prop_assert_eq!(back.id, id);
        let a: Vec<C64> = inst.solution.components().iter().flat_map(|f| values(&car, f)).collect();
        let b: Vec<C64> = back.solution.components().iter().flat_map(|f| values(&car2, f)).collect();
        prop_assert!(gap(&a, &b) < 1e-12);
        prop_assert_eq!(back.to_json(&car2).unwrap(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classifier_recovers_and_is_idempotent(id in any_id(), seed in 1000u64..2000, host in 0usize..4) {
        let (car, inst) = instance(id, host, seed);
        let (l1, l2) = (inst.lambda1, inst.lambda2);
        let cls = classify(&car, &inst.solution, l1, l2, 1e-9).unwrap();
        let m = cls.find(id).expect("generating template reported");
        let want = canonicalize(id, &inst.params);
        prop_assert!(std::iter::once(&m.params).chain(&m.alternatives).any(|p| scalar_gap(p, &want) <= 1e-6));
        prop_assert!(scalar_gap(&canonicalize(id, &m.params), &m.params) <= 1e-12);
        // Classifying the rebuilt solution reports the same parameters.
        let rebuilt = build_unchecked(id, &m.params, l1, l2, ErrataMode::Corrected).unwrap();
        let again = classify(&car, &rebuilt.solution, l1, l2, 1e-9).unwrap();
        let m2 = again.find(id).expect("still matches");
        prop_assert!(std::iter::once(&m2.params).chain(&m2.alternatives).any(|p| scalar_gap(p, &m.params) <= 1e-6));
    }

    #[test]
    fn random_quadruples_fit_nothing(chars in prop::collection::vec(exp_char(), 4), coefs in prop::collection::vec(cplx(1.0), 8)) {
        let car = rat2();
        let mix = |i: usize| -> ComplexFn { (Lin::chr(&chars[i % 4]) * coefs[i] + Lin::chr(&chars[(i + 1) % 4]) * coefs[i + 4]).into() };
        let sol = Solution::System(Quadruple { f: mix(0), g1: mix(1), h: mix(2), g2: mix(3) });
        let (l1, l2) = (c(0.9, 0.2), c(1.1, -0.3));
        prop_assume!(verify_solution(&car, &sol, l1, l2, 1e-9).unwrap().relative() > 1e-3);
        for id in FamilyId::ALL.into_iter().filter(|i| i.is_system()) {
            let (_, r) = fit_template(&car, &sol, id, l1, l2).unwrap();
            prop_assert!(r > 1e-2, "{id} fits a random quadruple: {r:e}");
        }
    }

    #[test]
    fn falsification_finds_no_counterexample(seed in any::<u64>()) {
        for suite in [Suite::Lemma32, Suite::Prop33, Suite::Prop34] {
            let tally = falsify(suite, seed, 300).unwrap();
            prop_assert!(tally.counterexamples.is_empty(), "{}: {:?}", suite.name(), tally.counterexamples.first());
        }
    }
}

#[test]
fn constructed_corpus_meets_expectations() {
    let corpus = constructed();
    assert!(corpus.len() >= 20);
    for inst in &corpus {
        let v = inst.run().unwrap();
        assert_eq!(v.status, inst.expected, "{}", inst.name);
        assert_ne!(v.status, Status::Counterexample, "{}", inst.name);
        if v.status == Status::NotApplicable {
            // Structural premises (empty intersections, coinciding characters) have no residual.
            assert!(v.hypothesis_residual.is_some() || v.reason.is_some(), "{} gives no premise diagnostic", inst.name);
        }
    }
}
