use std::sync::OnceLock;

use nalgebra::SVector;
use nkverify::frames::{build_frame, s3s3_dependent_frame, FrameCase, HypersurfaceFrame};
use nkverify::linform::LinForm;
use nkverify::numeric_s6::{cross, inner, Octonion, V7};
use nkverify::scalar::Scalar;
use nkverify::tables::{compute_rows, conclude_forms, golden_spec, ShapeClass, ShapeConclusion};
use proptest::prelude::*;

struct Table {
    frame: HypersurfaceFrame,
    stages: Vec<Vec<LinForm>>,
    baseline: ShapeConclusion,
}

fn tables() -> &'static [Table] {
    static CACHE: OnceLock<Vec<Table>> = OnceLock::new();
    CACHE.get_or_init(|| {
        FrameCase::ALL
            .iter()
            .map(|&case| {
                let frame = build_frame(case);
                let spec = golden_spec(case.table()).unwrap();
                let stages = compute_rows(&frame, spec).unwrap();
                let baseline = conclude_forms(&frame, spec, &stages);
                Table { frame, stages, baseline }
            })
            .collect()
    })
}

fn same(a: &ShapeConclusion, b: &ShapeConclusion) -> bool {
    a.classification == b.classification && a.principal == b.principal && a.lambda == b.lambda
}

fn octonion() -> impl Strategy<Value = Octonion> {
    prop::array::uniform8(-2.0f64..2.0).prop_map(Octonion)
}

fn v7() -> impl Strategy<Value = V7> {
    prop::array::uniform7(-2.0f64..2.0).prop_map(SVector::from)
}

fn close(a: &Octonion, b: &Octonion) -> bool {
    a.0.iter().zip(&b.0).all(|(x, y)| (x - y).abs() < 1e-9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conclusion_ignores_row_order_within_stages(table in 0usize..8, seed in any::<u64>()) {
        let t = &tables()[table];
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let stages: Vec<Vec<LinForm>> = t
            .stages
            .iter()
            .map(|st| {
                let mut st = st.clone();
                rand::seq::SliceRandom::shuffle(st.as_mut_slice(), &mut rng);
                st
            })
            .collect();
        let spec = golden_spec(table + 1).unwrap();
        let c = conclude_forms(&t.frame, spec, &stages);
        prop_assert!(same(&c, &t.baseline), "{:?} vs {:?}", c.principal, t.baseline.principal);
    }

    #[test]
    fn conclusion_ignores_nonzero_row_scaling(table in 0usize..8, k in prop::sample::select(vec![-3i64, -1, 2, 5, 7])) {
        let t = &tables()[table];
        let f = &t.frame.field;
        let stages: Vec<Vec<LinForm>> = t
            .stages
            .iter()
            .map(|st| st.iter().map(|r| r.scale(&Scalar::frac(f, k, 3))).collect())
            .collect();
        let c = conclude_forms(&t.frame, golden_spec(table + 1).unwrap(), &stages);
        prop_assert!(same(&c, &t.baseline));
    }

    #[test]
    fn octonion_norm_is_multiplicative(a in octonion(), b in octonion()) {
        let lhs = a.mul(&b).norm();
        prop_assert!((lhs - a.norm() * b.norm()).abs() < 1e-9 * (1.0 + lhs));
    }

    #[test]
    fn octonions_satisfy_moufang(a in octonion(), b in octonion(), c in octonion()) {
        // (ab)(ca) = a((bc)a)
        let lhs = a.mul(&b).mul(&c.mul(&a));
        let rhs = a.mul(&b.mul(&c).mul(&a));
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn cross_product_is_orthogonal_with_pythagorean_norm(x in v7(), y in v7()) {
        let c = cross(&x, &y);
        prop_assert!(inner(&c, &x).abs() < 1e-9 && inner(&c, &y).abs() < 1e-9);
        let lhs = inner(&c, &c);
        let rhs = inner(&x, &x) * inner(&y, &y) - inner(&x, &y).powi(2);
        prop_assert!((lhs - rhs).abs() < 1e-8);
    }
}

#[test]
fn dependent_frame_with_opposite_eigenvalue_still_concludes() {
    let frame = s3s3_dependent_frame(-1);
    let spec = golden_spec(2).unwrap();
    let stages = compute_rows(&frame, spec).unwrap();
    let c = conclude_forms(&frame, spec, &stages);
    assert_eq!(c.classification, ShapeClass::EtaQuasiUmbilical);
}
