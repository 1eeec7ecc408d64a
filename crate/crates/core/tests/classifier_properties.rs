use proptest::prelude::*;
use satake::classifier::{generate_case, Generator};
use satake::{classify, CaseLabel, Mode, SatakeClass, Scalar, Witnesses, CLASSIFY_TOL};

fn mode_of(label: CaseLabel) -> Mode {
    label.mode().unwrap_or(Mode::General4)
}

fn any_label() -> impl Strategy<Value = CaseLabel> {
    proptest::sample::select(CaseLabel::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn generated_classes_classify_back(label in any_label(), seed in any::<u64>()) {
        let g = generate_case(label, &Witnesses::default(), seed).unwrap();
        let res = classify(&g.class, mode_of(label), g.eta, CLASSIFY_TOL).unwrap();
        prop_assert_eq!(res.label, label);
        prop_assert!(res.residual <= 1e-8);
    }

    #[test]
    fn witnesses_regenerate_the_input(label in any_label(), seed in any::<u64>()) {
        prop_assume!(label != CaseLabel::Tempered);
        let g = generate_case(label, &Witnesses::default(), seed).unwrap();
        let res = classify(&g.class, mode_of(label), g.eta, CLASSIFY_TOL).unwrap();
        let back = res.regenerate(g.class.prime_norm()).unwrap();
        prop_assert!(back.matches(&g.class, 1e-8).unwrap().is_some());
    }

    #[test]
    fn other_primes_work_too(label in any_label(), seed in any::<u64>(), q in 2.0f64..50.0) {
        let gen = Generator::new(q, (1.5, 30.0)).unwrap();
        let g = gen.generate(label, &Witnesses::default(), seed).unwrap();
        let res = classify(&g.class, mode_of(label), g.eta, CLASSIFY_TOL).unwrap();
        prop_assert_eq!(res.label, label);
    }

    #[test]
    fn tempered_iff_in_s_1(
        angles in proptest::collection::vec(0.0f64..6.3, 2),
        rho in prop_oneof![Just(1.0), 1.0f64..4.0],
    ) {
        // {a·rho, a/rho, b, conj(b)}-style classes closed under 1/conj
        let a = Scalar::from_polar(1.0, angles[0]);
        let b = Scalar::from_polar(1.0, angles[1]);
        let c = SatakeClass::new(vec![a * rho, a / rho, b, b.conj()]).unwrap();
        let res = classify(&c, Mode::General4, None, CLASSIFY_TOL).unwrap();
        let tempered = c.in_s_r(1.0, CLASSIFY_TOL).unwrap();
        prop_assert_eq!(res.label == CaseLabel::Tempered, tempered);
    }

    #[test]
    fn esd_with_trivial_twist_agrees_with_self_dual(
        label in proptest::sample::select(vec![
            CaseLabel::Esd2aI, CaseLabel::Esd2aII, CaseLabel::Esd2bI, CaseLabel::Esd2bII,
        ]),
        positive in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let u = Scalar::new(if positive { 1.0 } else { -1.0 }, 0.0);
        let fixed = Witnesses { u: Some(u), ..Default::default() };
        let g = generate_case(label, &fixed, seed).unwrap();
        prop_assert!((g.eta.unwrap() - 1.0).norm() < 1e-12);
        let esd = classify(&g.class, Mode::Esd4, g.eta, CLASSIFY_TOL).unwrap();
        let sd = classify(&g.class, Mode::SelfDual4, None, CLASSIFY_TOL).unwrap();
        prop_assert_eq!(esd.label, label);
        let expected = match label {
            CaseLabel::Esd2aI => CaseLabel::SdQuadNeg,
            CaseLabel::Esd2bI | CaseLabel::Esd2bII => CaseLabel::SdI,
            _ => CaseLabel::SdII,
        };
        prop_assert_eq!(sd.label, expected);
    }
}

#[test]
fn full_roundtrip_for_one_seed_block() {
    for label in CaseLabel::ALL {
        for seed in 0..200 {
            let g = generate_case(label, &Witnesses::default(), seed).unwrap();
            let res = classify(&g.class, mode_of(label), g.eta, CLASSIFY_TOL).unwrap();
            assert_eq!(res.label, label, "seed {seed}");
        }
    }
}
