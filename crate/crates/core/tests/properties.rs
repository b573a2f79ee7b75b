// SPDX-License-Identifier: Apache-2.0

mod common;

use mrfbound_core::coretail::Benchmarks;
use mrfbound_core::format::Instance;
use mrfbound_core::mechanisms::{optimal_rev, srev};
use mrfbound_core::mrf::{
    check_conditioning_bounds, independent_envelope, max_weighted_degree, ConditioningOptions, Mrf,
};
use mrfbound_core::ocrs::{check_adaptive_scheme, y_active_closed_form, y_recursion, OcrsInstance, ACTIVE};
use mrfbound_core::prophet::{
    check_level_policy, evaluate_policy, expected_max, hard_instance, optimal_online, verify_lower_bound,
    ProphetInstance, ThresholdPolicy,
};
use mrfbound_core::valuation::{ItemSet, SetValuation, ValuationDistribution};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// `min(sum, c max)` tables are not always subadditive, so draw until one validates.
fn subadditive<R: Rng>(rng: &mut R, radices: &[usize]) -> SetValuation {
    loop {
        let a = common::grid_values(rng, radices);
        let c = rng.gen_range(1.0..=radices.len() as f64);
        let g = SetValuation::tabulate(radices, |typed| {
            let vals = typed.iter().enumerate().filter_map(|(i, w)| w.map(|w| a[i][w]));
            let (sum, max) = vals.fold((0.0, 0.0f64), |(s, m), v| (s + v, m.max(v)));
            sum.min(c * max)
        })
        .unwrap();
        if g.validate_class().pass {
            return g;
        }
    }
}

fn valuation<R: Rng>(rng: &mut R, radices: &[usize], class: u8) -> SetValuation {
    match class {
        0 => SetValuation::additive(common::grid_values(rng, radices)).unwrap(),
        1 => SetValuation::unit_demand(common::grid_values(rng, radices)).unwrap(),
        _ => subadditive(rng, radices),
    }
}

/// Binary MRF with the active state penalized until total activity is at most one.
fn ocrs_instance(seed: u64) -> OcrsInstance {
    let mut r = rng(seed);
    let n = r.gen_range(1..=5);
    let base = common::random_mrf(&mut r, &vec![2; n], 1.5);
    let mut shift = 0.0;
    loop {
        let vertex = base.vertex_potentials().iter().map(|p| vec![p[0], p[1] - shift]).collect();
        let mrf = Mrf::new(base.supports().to_vec(), vertex, base.edges().to_vec()).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        if let Ok(inst) = OcrsInstance::from_mrf(mrf, order) {
            return inst;
        }
        shift += 0.25;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn joint_is_a_distribution(seed in any::<u64>(), cap in 0.0f64..3.0) {
        let mut r = rng(seed);
        let radices = common::random_radices(&mut r, 4, 3);
        let joint = common::random_mrf(&mut r, &radices, cap).joint_table().unwrap();
        prop_assert!(joint.probs().iter().all(|&p| p >= 0.0));
        prop_assert!((joint.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn conditioning_ratios_within_degree_bound(seed in any::<u64>(), cap in 0.0f64..2.0) {
        let mut r = rng(seed);
        let radices = common::random_radices(&mut r, 4, 3);
        let mrf = common::random_mrf(&mut r, &radices, cap);
        let delta = max_weighted_degree(&mrf).delta;
        let opts = ConditioningOptions { samples: 500, ..Default::default() };
        let rep = check_conditioning_bounds(&mrf.joint_table().unwrap(), delta, &opts);
        prop_assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn vertex_shift_changes_nothing(seed in any::<u64>(), c in -5.0f64..5.0) {
        let mut r = rng(seed);
        let radices = common::random_radices(&mut r, 3, 3);
        let mrf = common::random_mrf(&mut r, &radices, 1.0);
        let v = r.gen_range(0..radices.len());
        let mut vertex = mrf.vertex_potentials().to_vec();
        vertex[v].iter_mut().for_each(|p| *p += c);
        let shifted = Mrf::new(mrf.supports().to_vec(), vertex, mrf.edges().to_vec()).unwrap();
        prop_assert_eq!(max_weighted_degree(&mrf).delta, max_weighted_degree(&shifted).delta);
        let (a, b) = (mrf.joint_table().unwrap(), shifted.joint_table().unwrap());
        for (x, y) in a.probs().iter().zip(b.probs()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn envelope_is_dominated_by_marginals(seed in any::<u64>()) {
        let mut r = rng(seed);
        let radices = common::random_radices(&mut r, 3, 3);
        let joint = common::random_mrf(&mut r, &radices, 1.5).joint_table().unwrap();
        let env = independent_envelope(&joint).unwrap();
        for (i, m) in env.marginals.iter().enumerate() {
            prop_assert!((m.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(m[env.dummy(i)] >= -1e-15);
            let real = joint.marginal(i).unwrap();
            for (w, &p) in real.iter().enumerate() {
                prop_assert!(m[w] <= p + 1e-12);
            }
        }
    }

    #[test]
    fn item_sets_enumerate_every_subset(mask in 0u64..(1 << 10)) {
        let s = ItemSet(mask);
        let subs: Vec<ItemSet> = s.subsets().collect();
        prop_assert_eq!(subs.len(), 1usize << s.len());
        prop_assert!(subs.iter().all(|t| t.is_subset(s)));
        let mut bits: Vec<u64> = subs.iter().map(|t| t.0).collect();
        bits.sort_unstable();
        bits.dedup();
        prop_assert_eq!(bits.len(), subs.len());
    }

    #[test]
    fn valuation_classes_hold(seed in any::<u64>()) {
        let mut r = rng(seed);
        let radices = common::random_radices(&mut r, 3, 3);
        let a = common::grid_values(&mut r, &radices);
        let add = SetValuation::additive(a.clone()).unwrap();
        let unit = SetValuation::unit_demand(a.clone()).unwrap();
        let typed: Vec<Option<usize>> = radices.iter().map(|&k| r.gen_bool(0.7).then(|| r.gen_range(0..k))).collect();
        let held = typed.iter().enumerate().filter_map(|(i, w)| w.map(|w| a[i][w]));
        prop_assert!(close(add.value(&typed).unwrap(), held.clone().sum(), 1e-15));
        prop_assert_eq!(unit.value(&typed).unwrap(), held.fold(0.0, f64::max));
        prop_assert!(add.validate_class().pass && unit.validate_class().pass);
    }

    #[test]
    fn optimum_dominates_simple_mechanisms(seed in any::<u64>(), class in 0u8..3) {
        let mut r = rng(seed);
        let radices = common::random_radices(&mut r, 3, 3);
        let mrf = common::random_mrf(&mut r, &radices, 1.0);
        let g = valuation(&mut r, &radices, class);
        let d = ValuationDistribution::new(mrf.joint_table().unwrap(), g).unwrap();
        let opt = optimal_rev(&d).unwrap();
        prop_assert!(opt.incentive_violation(&d) <= 1e-7);
        let b = Benchmarks::compute(&d).unwrap();
        let slack = 1e-7 * b.rev.max(1.0);
        prop_assert!(b.srev <= b.rev + slack && b.brev <= b.rev + slack && b.srev_prime <= b.rev + slack, "{b:?}");
        prop_assert_eq!(srev(&d).grid_restricted, class != 0);
    }

    #[test]
    fn online_values_are_sandwiched(seed in any::<u64>()) {
        let mut r = rng(seed);
        let radices = common::random_radices(&mut r, 4, 3);
        let mrf = common::random_mrf(&mut r, &radices, 1.0);
        let mut order: Vec<usize> = (0..radices.len()).collect();
        order.shuffle(&mut r);
        let inst = ProphetInstance::new(mrf, common::grid_values(&mut r, &radices), order).unwrap();
        let emax = expected_max(&inst);
        let opt = optimal_online(&inst).unwrap();
        let levels: Vec<(f64, f64)> = (0..3).map(|_| (r.gen_range(0.0..20.0), r.gen_range(0.0..1.0))).collect();
        let total: f64 = levels.iter().map(|l| l.1).sum();
        let policy = ThresholdPolicy::new(levels.iter().map(|&(t, w)| (t, w / total)).collect()).unwrap();
        let alg = evaluate_policy(&inst, &policy);
        prop_assert!(alg <= opt + 1e-12 * opt.max(1.0));
        prop_assert!(opt <= emax + 1e-12 * emax.max(1.0));
        let rep = check_level_policy(&inst, inst.delta()).unwrap();
        prop_assert!(rep.pass, "{rep}");
    }

    #[test]
    fn hard_chain_meets_its_closed_form(delta in 0.45f64..2.0) {
        let (inst, cf) = hard_instance(delta).unwrap();
        for rep in verify_lower_bound(&inst, &cf).unwrap() {
            prop_assert!(rep.pass, "{rep}");
        }
    }

    #[test]
    fn adaptive_scheme_is_exactly_selectable(seed in any::<u64>()) {
        let inst = ocrs_instance(seed);
        for rep in check_adaptive_scheme(&inst).unwrap() {
            prop_assert!(rep.pass, "{rep}");
        }
    }

    #[test]
    fn y_closed_form_matches_iteration(p in 0.001f64..0.5, q in 0.001f64..0.5, n in 0usize..300, alpha in 0.0f64..1.0) {
        let iterated = y_recursion(p, q, n, alpha)[n][ACTIVE];
        let closed = y_active_closed_form(p, q, n, alpha);
        prop_assert!(close(closed, iterated, 1e-12), "{closed} vs {iterated}");
    }

    #[test]
    fn instance_files_round_trip(seed in any::<u64>(), class in 0u8..3) {
        let mut r = rng(seed);
        let radices = common::random_radices(&mut r, 4, 3);
        let mrf = common::random_mrf(&mut r, &radices, 2.0);
        let mut order: Vec<usize> = (0..radices.len()).collect();
        order.shuffle(&mut r);
        let inst = Instance {
            id: Some(format!("case-{seed}")),
            seed: Some(seed >> 1),
            valuation: Some(valuation(&mut r, &radices, class)),
            order: Some(order),
            ..Instance::new(mrf)
        };
        let text = inst.to_toml().unwrap();
        let back = Instance::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(back.to_toml().unwrap(), text);
    }
}
