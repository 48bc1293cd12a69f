use approx::assert_relative_eq;
use proptest::prelude::*;

use conemetric::cones::Cone;
use conemetric::metric::{random_table, scalarize};
use conemetric::ordernorm::{compare_norms, DEFAULT_GAUGE_REL_TOL};
use conemetric::{par, OrderUnitSpace, Vector};

fn cones() -> Vec<Cone> {
    let g = |c: &[f64]| Vector::new(c.to_vec()).unwrap();
    vec![
        Cone::orthant(3).unwrap(),
        Cone::lorentz(4).unwrap(),
        Cone::psd(2).unwrap(),
        Cone::polyhedral(vec![
            g(&[1.0, 0.0, 0.0]),
            g(&[0.0, 1.0, 0.0]),
            g(&[0.0, 0.0, 1.0]),
            g(&[1.0, 1.0, -0.5]),
        ])
        .unwrap(),
    ]
}

/// A cone, a random unit drawn from `seed`, and a vector of matching size.
fn space_and_vectors(count: usize) -> impl Strategy<Value = (OrderUnitSpace, Vec<Vector>)> {
    (
        0..4usize,
        any::<u64>(),
        prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 4), count),
    )
        .prop_map(|(c, seed, raw)| {
            let cone = cones().swap_remove(c);
            let mut rng = par::stream_rng(seed, 0);
            let e = cone.random_order_unit(&mut rng);
            let dim = cone.ambient_dim();
            let space = OrderUnitSpace::new(cone, e, 1e-9).unwrap();
            let vs = raw
                .into_iter()
                .map(|v| Vector::new(v[..dim].to_vec()).unwrap())
                .collect();
            (space, vs)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gauge_and_dual_agree((space, vs) in space_and_vectors(1)) {
        let cmp = compare_norms(&space, &vs[0], DEFAULT_GAUGE_REL_TOL).unwrap();
        prop_assert!(cmp.agree, "{cmp:?}");
    }

    #[test]
    fn norm_is_homogeneous((space, vs) in space_and_vectors(1), t in -20.0f64..20.0) {
        let p = space.norm(&vs[0]).unwrap();
        let pt = space.norm(&vs[0].scale(t)).unwrap();
        assert_relative_eq!(pt, t.abs() * p, epsilon = 1e-9, max_relative = 1e-9);
    }

    #[test]
    fn norm_is_subadditive((space, vs) in space_and_vectors(2)) {
        let sum = &vs[0] + &vs[1];
        let lhs = space.norm(&sum).unwrap();
        let rhs = space.norm(&vs[0]).unwrap() + space.norm(&vs[1]).unwrap();
        prop_assert!(lhs <= rhs + 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn norm_vanishes_only_at_zero((space, vs) in space_and_vectors(1)) {
        let p = space.norm(&vs[0]).unwrap();
        prop_assert_eq!(p == 0.0, vs[0].is_zero());
        prop_assert_eq!(space.norm(&Vector::zeros(space.dim())).unwrap(), 0.0);
    }

    #[test]
    fn norm_is_monotone_on_the_cone(c in 0..4usize, seed in any::<u64>(), s in 0.0f64..5.0) {
        let cone = cones().swap_remove(c);
        let mut rng = par::stream_rng(seed, 1);
        let space = OrderUnitSpace::new(cone.clone(), cone.random_order_unit(&mut rng), 1e-9).unwrap();
        let u = cone.random_element(&mut rng);
        let v = u.axpy(s, &cone.random_element(&mut rng));
        prop_assert!(space.norm(&u).unwrap() <= space.norm(&v).unwrap() + 1e-9);
    }

    #[test]
    fn unit_has_norm_one((space, _) in space_and_vectors(0)) {
        assert_relative_eq!(space.norm(space.unit()).unwrap(), 1.0, max_relative = 1e-11);
    }

    #[test]
    fn membership_is_scale_invariant((space, vs) in space_and_vectors(1), t in 0.01f64..100.0) {
        let cone = space.cone();
        let s = cone.slack(&vs[0]).unwrap();
        prop_assume!(s.abs() > 1e-6);
        prop_assert_eq!(cone.contains(&vs[0], 0.0).unwrap(), cone.contains(&vs[0].scale(t), 0.0).unwrap());
    }

    #[test]
    fn cone_is_pointed((space, vs) in space_and_vectors(1)) {
        let cone = space.cone();
        prop_assume!(!vs[0].is_zero());
        let both = cone.contains(&vs[0], 0.0).unwrap() && cone.contains(&-&vs[0], 0.0).unwrap();
        prop_assert!(!both);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn scalarized_tables_are_metrics(c in 0..4usize, seed in any::<u64>()) {
        let cone = cones().swap_remove(c);
        let mut rng = par::stream_rng(seed, 2);
        let space = OrderUnitSpace::new(cone.clone(), cone.random_order_unit(&mut rng), 1e-9).unwrap();
        let m = random_table(&space, 8, seed).unwrap();
        prop_assert!(m.verify_axioms(1e-9).passed());
        let s = scalarize(&m).unwrap();
        prop_assert!(s.axiom_violations(1e-9).is_empty());
    }
}

#[test]
fn cone_json_round_trips() {
    for cone in cones() {
        let text = serde_json::to_string(&cone).unwrap();
        let back: Cone = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cone);
    }
}
