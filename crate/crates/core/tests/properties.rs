use std::collections::BTreeSet;
use std::sync::OnceLock;

use pgl2_llc::characters::{
    build_mu, build_tau_tilde, enumerate_pairs, mu_at_uniformizer, mu_at_uniformizer_closed_form, nu_type_characters,
    AdmissiblePair, MultChar,
};
use pgl2_llc::constants::{gamma_alpha_y, hilbert, square_class_reps, weil_index, AdditiveChar};
use pgl2_llc::cover::{decompose, depth_n, depth_n_oracle, formula_f, sample_points, GenuineChar, PositiveRoot};
use pgl2_llc::gl2::depth_zero_sample;
use pgl2_llc::verifier::{param_to_genuine, WeilParamSpec};
use pgl2_llc::{unit_quotient_structure, CycloValue, FieldConfig, PadicElem, QuadExtElem, Rat, RootOfUnity};
use proptest::prelude::*;

fn cfgs() -> &'static Vec<FieldConfig> {
    static C: OnceLock<Vec<FieldConfig>> = OnceLock::new();
    C.get_or_init(|| {
        [3u64, 5]
            .iter()
            .flat_map(|&p| FieldConfig::all_extensions(p, 6).unwrap())
            .collect()
    })
}

fn pairs() -> &'static Vec<AdmissiblePair> {
    static P: OnceLock<Vec<AdmissiblePair>> = OnceLock::new();
    P.get_or_init(|| cfgs().iter().flat_map(|c| enumerate_pairs(c, 2, true).unwrap()).collect())
}

/// Per configuration: the power-of-two-order extensions of aleph on a level-1 quotient.
fn nu_types() -> &'static Vec<Vec<MultChar>> {
    static N: OnceLock<Vec<Vec<MultChar>>> = OnceLock::new();
    N.get_or_init(|| {
        cfgs()
            .iter()
            .map(|c| nu_type_characters(&unit_quotient_structure(c, 1, 4).unwrap()).unwrap())
            .collect()
    })
}

struct Evaluator {
    g: GenuineChar,
    tau: MultChar,
    sample: Vec<QuadExtElem>,
}

fn evaluators() -> &'static Vec<Evaluator> {
    static E: OnceLock<Vec<Evaluator>> = OnceLock::new();
    E.get_or_init(|| {
        pairs()
            .iter()
            .map(|pr| Evaluator {
                g: GenuineChar::new(pr.clone()).unwrap(),
                tau: build_tau_tilde(pr.chi.quotient(), 0).unwrap(),
                sample: sample_points(pr.cfg(), pr.minimal_level(), 1).unwrap(),
            })
            .collect()
    })
}

fn cyclo() -> impl Strategy<Value = CycloValue> {
    prop::collection::vec((0i64..24, -5i64..6), 0..5).prop_map(|terms| {
        CycloValue::from_terms(
            terms
                .into_iter()
                .map(|(k, c)| (RootOfUnity::new(k, 24), Rat::from_integer(c.into()))),
        )
    })
}

fn base_elem(p: u64) -> impl Strategy<Value = PadicElem> {
    let pi = p as i128;
    (1i128..pi.pow(4), -2i64..4)
        .prop_filter("unit", move |(u, _)| u % pi != 0)
        .prop_map(move |(u, v)| PadicElem::new(p, v, u, 6))
}

fn half_delta(cfg: &FieldConfig, w: &QuadExtElem) -> QuadExtElem {
    let two_delta = cfg.scale(&cfg.elem(2), &cfg.delta());
    cfg.div(&cfg.sub(w, &cfg.conj(w)), &two_delta).unwrap()
}

#[test]
fn roots_over_a_full_period() {
    for n in 1..=24u64 {
        let prod = (0..n).fold(RootOfUnity::one(), |acc, k| acc * RootOfUnity::new(k as i64, n));
        assert_eq!(prod, RootOfUnity::new((n * (n - 1) / 2) as i64, n));
        let sum = (0..n).fold(CycloValue::zero(), |acc, k| acc + CycloValue::from_root(RootOfUnity::new(k as i64, n)));
        assert_eq!(sum.is_zero(), n > 1, "n = {n}");
    }
}

#[test]
fn four_square_classes() {
    for p in [3u64, 5, 7] {
        let mut classes = BTreeSet::new();
        for v in 0..2 {
            for u in 1..(p as i128).pow(3) {
                if u % p as i128 != 0 {
                    classes.insert(PadicElem::new(p, v, u, 3).square_class().unwrap());
                }
            }
        }
        assert_eq!(classes.len(), 4, "p = {p}");
    }
}

#[test]
fn hilbert_laws_on_square_classes() {
    for p in [3u64, 5, 7] {
        let reps = square_class_reps(p, 6);
        for a in &reps {
            assert_eq!(hilbert(a, &a.neg()).unwrap(), 1);
            for b in &reps {
                assert_eq!(hilbert(a, b).unwrap(), hilbert(b, a).unwrap());
                for c in &reps {
                    let bc = hilbert(a, &b.mul(c)).unwrap();
                    assert_eq!(bc, hilbert(a, b).unwrap() * hilbert(a, c).unwrap());
                }
            }
        }
    }
}

#[test]
fn nu_type_characters_are_trivial_on_one_units() {
    for (cfg, nus) in cfgs().iter().zip(nu_types()) {
        assert!(!nus.is_empty(), "zeta = {}", cfg.zeta);
        let q = unit_quotient_structure(cfg, 2, 4).unwrap();
        for nu in nu_type_characters(&q).unwrap() {
            assert_eq!(nu.level(), 0, "zeta = {}", cfg.zeta);
        }
    }
}

#[test]
fn mu_is_self_inverse_when_unramified() {
    for pr in pairs().iter().filter(|pr| !pr.cfg().ram) {
        let mu = build_mu(pr).unwrap();
        assert_eq!(mu, mu.inv(), "{}", pr.chi);
    }
}

#[test]
fn mu_at_delta_when_ramified() {
    for p in [3u64, 5] {
        for cfg in FieldConfig::all_extensions(p, 7).unwrap().into_iter().filter(|c| c.ram) {
            for pr in enumerate_pairs(&cfg, 3, true).unwrap().iter().filter(|pr| pr.minimal) {
                assert_eq!(mu_at_uniformizer(pr).unwrap(), mu_at_uniformizer_closed_form(pr).unwrap());
            }
        }
    }
}

#[test]
fn alpha_is_a_minimal_element() {
    for pr in pairs().iter().filter(|pr| pr.minimal && pr.level >= 1) {
        let cfg = pr.cfg();
        let alpha = pr.alpha_chi.unwrap();
        let bound = 1 - pr.level as i64;
        let pi = cfg.p as i128;
        let mut coset_reps = vec![PadicElem::zero(cfg.p, 12), alpha.a];
        for j in -(pr.level as i64) - 1..=1 {
            for u in 1..pi * pi {
                if u % pi != 0 {
                    coset_reps.push(PadicElem::new(cfg.p, j, u, cfg.precision));
                }
            }
        }
        for c in &coset_reps {
            let diff = cfg.sub(&alpha, &cfg.from_base(c));
            assert!(cfg.v_e(&diff).unwrap() < bound, "alpha {alpha:?} meets F at {c:?}");
        }
    }
}

#[test]
fn omega_identity_on_depth_zero() {
    for (cfg, nus) in cfgs().iter().zip(nu_types()) {
        let q = unit_quotient_structure(cfg, 1, 4).unwrap();
        let tau = build_tau_tilde(&q, 0).unwrap();
        for w in sample_points(cfg, 0, 2).unwrap() {
            assert_eq!(depth_n(cfg, &w).unwrap(), 0);
            let lhs = tau.eval(&half_delta(cfg, &w)).unwrap();
            let w_over_delta = cfg.div(&w, &cfg.delta()).unwrap();
            if cfg.ram {
                for om in nus {
                    assert_eq!(lhs, om.eval(&w_over_delta).unwrap(), "w = {w:?}");
                }
            } else {
                let v = cfg.v_e(&w_over_delta).unwrap();
                assert_eq!(lhs, RootOfUnity::from_sign(if v % 2 == 0 { 1 } else { -1 }), "w = {w:?}");
            }
        }
    }
}

#[test]
fn gamma_factor_in_kernel_form() {
    for pr in pairs().iter().filter(|pr| pr.minimal_level() >= 1) {
        let cfg = pr.cfg();
        let ci = cfgs().iter().position(|c| c.p == cfg.p && c.zeta == cfg.zeta).unwrap();
        let alpha = pr.minimal_alpha().unwrap();
        let z = cfg.zeta_elem();
        let base = RootOfUnity::from_sign(hilbert(&alpha.b, &z).unwrap()) * weil_index(&z, &pr.psi).unwrap();
        for w in sample_points(cfg, 2 * pr.minimal_level(), 1).unwrap() {
            if depth_n(cfg, &w).unwrap() == 0 {
                continue;
            }
            let (_, y) = decompose(cfg, &w).unwrap();
            let g = gamma_alpha_y(cfg, &alpha, &y, &pr.psi).unwrap();
            for nu in &nu_types()[ci] {
                let rhs = base * nu.eval(&half_delta(cfg, &w)).unwrap() * nu.eval(&w).unwrap();
                assert_eq!(g, rhs, "w = {w:?}");
            }
        }
    }
}

#[test]
fn depth_zero_boundary_agrees_with_coset_search() {
    for cfg in cfgs() {
        let mut points = sample_points(cfg, 0, 2).unwrap();
        if !cfg.ram {
            points.extend(depth_zero_sample(cfg));
        }
        for w in points {
            assert_eq!(depth_n(cfg, &w).unwrap(), 0, "w = {w:?}");
            assert_eq!(depth_n_oracle(cfg, &w, 3).unwrap(), 0, "w = {w:?}");
        }
    }
}

#[test]
fn parameters_to_genuine_characters_is_injective() {
    for cfg in cfgs().iter().filter(|c| c.p == 3) {
        let mut seen = BTreeSet::new();
        for pr in enumerate_pairs(cfg, 1, true).unwrap() {
            let g = param_to_genuine(&WeilParamSpec::new(pr).unwrap()).unwrap();
            assert!(seen.insert(g.chi().values_on_generators()), "zeta = {}", cfg.zeta);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cyclo_ring_laws(a in cyclo(), b in cyclo(), c in cyclo()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((a.clone() - a.clone()).is_zero());
    }

    #[test]
    fn canonical_form_is_idempotent(a in cyclo()) {
        let once = &a + &CycloValue::zero();
        let twice = &once + &CycloValue::zero();
        prop_assert_eq!(once.terms(), twice.terms());
        prop_assert_eq!(&once, &a);
    }

    #[test]
    fn conjugation_keeps_valuation_and_norm_is_multiplicative(
        ci in 0usize..6, a1 in -400i128..400, b1 in 1i128..400, a2 in -400i128..400, b2 in 1i128..400,
    ) {
        let cfg = &cfgs()[ci];
        let (w1, w2) = (cfg.ext(a1, b1), cfg.ext(a2, b2));
        prop_assert_eq!(cfg.v_e(&w1).unwrap(), cfg.v_e(&cfg.conj(&w1)).unwrap());
        prop_assert!(cfg.norm(&cfg.mul(&w1, &w2)).congruent(&cfg.norm(&w1).mul(&cfg.norm(&w2))));
    }

    #[test]
    fn hilbert_symbol_laws(a in base_elem(5), b in base_elem(5), c in base_elem(5)) {
        prop_assert_eq!(hilbert(&a, &b).unwrap(), hilbert(&b, &a).unwrap());
        prop_assert_eq!(hilbert(&a, &b.mul(&c)).unwrap(), hilbert(&a, &b).unwrap() * hilbert(&a, &c).unwrap());
        prop_assert_eq!(hilbert(&a, &a.neg()).unwrap(), 1);
    }

    #[test]
    fn weil_index_squares_to_hilbert_symbol(a in base_elem(3), level in 0i32..3) {
        let psi = AdditiveChar::new(3, level);
        let g = weil_index(&a, &psi).unwrap();
        let minus_one = PadicElem::from_int(3, -1, 6);
        prop_assert_eq!(g * g, RootOfUnity::from_sign(hilbert(&minus_one, &a).unwrap()));
    }

    #[test]
    fn formula_unchanged_by_central_rescaling(pi in 0usize..10_000, c in 1i128..60, e in -1i64..2) {
        let all = evaluators();
        let ev = &all[pi % all.len()];
        let cfg = ev.g.chi().cfg();
        prop_assume!(c % cfg.p as i128 != 0);
        let x = PadicElem::new(cfg.p, e, c, cfg.precision);
        for w in ev.sample.iter().step_by(5) {
            let a = formula_f(&ev.g, w, PositiveRoot::Standard, &ev.tau).unwrap();
            let b = formula_f(&ev.g, &cfg.scale(&x, w), PositiveRoot::Standard, &ev.tau).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn norms_are_exactly_the_hilbert_trivial_elements(ci in 0usize..6, u in 1i128..625, v in -2i64..4) {
        let cfg = &cfgs()[ci];
        prop_assume!(u % cfg.p as i128 != 0);
        let x = PadicElem::new(cfg.p, v, u, 6);
        prop_assert_eq!(cfg.is_norm(&x).unwrap(), hilbert(&x, &cfg.zeta_elem()).unwrap() == 1);
    }
}
