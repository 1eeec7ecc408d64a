use proptest::prelude::*;
use satake::bounds::{
    ramakrishnan_density, t4_interval, theorem_bound, Character, Theorem, TheoremOptions,
};
use satake::ingest::{empirical_density, load_records, write_records, SatakeRecord};
use satake::Scalar;

fn finite_nonzero() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6f64..1e6,
        proptest::num::f64::NORMAL.prop_filter("moderate", |x| x.abs() < 1e100 && x.abs() > 1e-100),
    ]
}

fn record(p: u64, params: Vec<(f64, f64)>) -> SatakeRecord {
    SatakeRecord {
        object_label: "obj".into(),
        degree: params.len(),
        field_label: "1.1.1.1".into(),
        prime_norm: p,
        satake: params.into_iter().map(|(a, b)| Scalar::new(a, b)).collect(),
    }
}

proptest! {
    #[test]
    fn jsonl_roundtrip_is_bit_stable(
        rows in proptest::collection::vec(
            (2u64..1_000_000, proptest::collection::vec((finite_nonzero(), finite_nonzero()), 2..5)),
            1..20,
        )
    ) {
        let recs: Vec<SatakeRecord> = rows.into_iter().map(|(p, v)| record(p, v)).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        write_records(&path, &recs).unwrap();
        let back = load_records(&path).unwrap();
        prop_assert_eq!(back.len(), recs.len());
        for (a, b) in recs.iter().zip(&back) {
            for (x, y) in a.satake.iter().zip(&b.satake) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn proportion_is_monotone_in_r(
        moduli in proptest::collection::vec(0.1f64..10.0, 1..40),
        r1 in 1.0f64..8.0,
        dr in 0.0f64..4.0,
    ) {
        let recs: Vec<SatakeRecord> = moduli
            .iter()
            .enumerate()
            .map(|(i, &m)| record(2 + i as u64, vec![(m, 0.0), (1.0 / m, 0.0)]))
            .collect();
        let a = empirical_density(&recs, r1, u64::MAX).unwrap().proportion;
        let b = empirical_density(&recs, r1 + dr, u64::MAX).unwrap().proportion;
        prop_assert!(a <= b);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn ramakrishnan_closure(k in 1.0f64..1e4) {
        let d = ramakrishnan_density(k).unwrap();
        prop_assert!((d + 1.0 / (k * k) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn essentially_self_dual_never_beats_general(r in 1.0f64..100.0) {
        let m = r + 1.0 / r;
        prop_assume!(m > 2.0 + 1e-9);
        let c0 = theorem_bound(Theorem::T1, r, &TheoremOptions::default()).unwrap();
        let c1 = theorem_bound(Theorem::T1, r, &TheoremOptions { c: 1, ..Default::default() }).unwrap();
        prop_assert!(c1.raw_bound <= c0.raw_bound);
        prop_assert!(c1.lower_bound <= c0.lower_bound);
    }

    #[test]
    fn reports_close_exactly(r in 1.0f64..50.0, quadratic in any::<bool>(), c in 0u8..2) {
        let opts = TheoremOptions {
            c,
            character: if quadratic { Character::Quadratic } else { Character::Trivial },
            ..Default::default()
        };
        for th in Theorem::ALL {
            let rep = theorem_bound(th, r, &opts).unwrap();
            let total: f64 = rep.contributions.iter().map(|x| x.cap).sum();
            prop_assert_eq!(rep.raw_bound, 1.0 - total);
            prop_assert_eq!(rep.lower_bound, rep.raw_bound.clamp(0.0, 1.0));
        }
    }

    #[test]
    fn t4_endpoints_are_reciprocal(r in 1.0f64..1e6) {
        let (lo, hi) = t4_interval(r).unwrap();
        prop_assert!((lo * hi - 1.0).abs() < 1e-12);
        prop_assert!(lo <= 1.0 && hi >= 1.0);
    }
}

/// Independent rational evaluation of the GL(4) bound at r = 4:
/// m = 17/4, so 1 - (4/9)² - (2/13)² = 10661/13689.
#[test]
fn t1_at_four_matches_rational_oracle() {
    let rep = theorem_bound(Theorem::T1, 4.0, &TheoremOptions::default()).unwrap();
    assert!((rep.lower_bound - 10661.0 / 13689.0).abs() < 1e-15);
}

/// m = 10/3 at r = 3, so 1 - 2·(3/7)² = 31/49.
#[test]
fn t2_trivial_at_three_matches_rational_oracle() {
    let rep = theorem_bound(Theorem::T2, 3.0, &TheoremOptions::default()).unwrap();
    assert!((rep.lower_bound - 31.0 / 49.0).abs() < 1e-15);
}
