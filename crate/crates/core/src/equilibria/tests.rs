use super::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Identity;

impl Reinforcement for Identity {
    fn eval(&self, x: f64) -> f64 {
        x
    }
    fn deriv(&self, _: f64) -> f64 {
        1.0
    }
    fn primitive(&self, x: f64) -> f64 {
        0.5 * x * x
    }
}

fn params(n: usize, alpha: f64, beta: f64, q: f64, f: ReinforcementFunction) -> ModelParams {
    ModelParams::new(n, alpha, beta, q, f).unwrap()
}

fn lp_fig2(n: usize) -> ModelParams {
    params(n, 0.1, 0.2, 0.4, ReinforcementFunction::lp(0.9, 1.0 / 3.0).unwrap())
}

fn logp(n: usize, theta: f64, xstar: f64, alpha: f64, beta: f64, q: f64) -> ModelParams {
    params(n, alpha, beta, q, ReinforcementFunction::logp(theta, xstar).unwrap())
}

fn tech(n: usize, theta: f64, alpha: f64, beta: f64, q: f64) -> ModelParams {
    params(n, alpha, beta, q, ReinforcementFunction::tech(theta).unwrap())
}

/// Valid LP map: `theta x*` is placed at fraction `u` of its admissible range.
fn lp_from_unit(theta: f64, u: f64) -> ReinforcementFunction {
    let lo = (1.0 - theta).max(0.01);
    ReinforcementFunction::lp(theta, (lo + u * (1.0 - lo)) / theta).unwrap()
}

fn zeros(p: &ModelParams) -> Vec<ZeroPoint> {
    all_zeros(p, EnumerationOptions::default()).unwrap()
}

fn sync_values(z: &[ZeroPoint]) -> Vec<f64> {
    z.iter().filter(|z| z.kind == ZeroKind::Synchronization).map(|z| z.groups[0].value).collect()
}

#[test]
fn drift_with_identity_double() {
    let p = ModelParams::new(3, 0.0, 0.5, 0.5, Identity).unwrap();
    let z = [0.0, 0.3, 1.0];
    for (f, zh) in drift(&p, &z).iter().zip(z) {
        assert!((f - (0.25 - 0.5 * zh)).abs() < 1e-15);
    }
}

#[test]
fn drift_vanishes_at_sync_zero() {
    let p = lp_fig2(5);
    let z = sync_zeros(&p)[0].groups[0].value;
    assert!(sup_norm(&drift(&p, &[z; 5])) < 1e-12);
    assert!(sup_norm(&drift(&p, &[0.664; 5])) < 2e-3);
}

#[test]
fn lp_quadratic_matches_bisection() {
    let p = lp_fig2(1);
    let closed = lp_sync_roots(0.1, 0.2, 0.4, 0.9, 1.0 / 3.0);
    let bisected = sync_roots_by_bisection(&p);
    assert_eq!(closed.len(), 1);
    assert_eq!(bisected.len(), 1);
    assert!((closed[0] - bisected[0]).abs() < 1e-10);
    // 0.81 z^2 - 0.502 z - 0.024 = 0
    let want = (0.502 + (0.502f64.powi(2) + 4.0 * 0.81 * 0.024).sqrt()) / (2.0 * 0.81);
    assert!((closed[0] - want).abs() < 1e-12);
    assert!((closed[0] - 0.66435).abs() < 1e-4);
    assert!(sync_residual(&p, 0.66435).abs() < 1e-4);
}

#[test]
fn lp_without_forcing() {
    let roots = lp_sync_roots(0.3, 0.0, 0.5, 0.9, 1.0 / 3.0);
    assert_eq!(roots.len(), 2);
    assert_eq!(roots[0], 0.0);
    assert!((roots[1] - (1.0 - 0.3) / 0.9).abs() < 1e-12);
    // theta x* >= 1 leaves only the origin
    assert_eq!(lp_sync_roots(0.3, 0.0, 0.5, 2.0, 0.6), vec![0.0]);
}

#[test]
fn lp_origin_flagged() {
    let p = params(4, 0.3, 0.0, 0.5, ReinforcementFunction::lp(0.9, 1.0 / 3.0).unwrap());
    let z = zeros(&p);
    assert_eq!(z.len(), 2);
    let kept = stability::exclude_unstable(&p, &z);
    assert!(kept[0].is_origin() && kept[0].excluded_given_nonzero_start);
    assert!(!kept[1].excluded_given_nonzero_start);
    assert!((kept[1].groups[0].value - 0.7778).abs() < 1e-4);
}

#[test]
fn lp_fig2_single_zero() {
    for n in [1, 2, 3, 10, 30] {
        let z = zeros(&lp_fig2(n));
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].kind, ZeroKind::Synchronization);
        assert!((z[0].groups[0].value - 0.664).abs() < 1e-2);
        assert_eq!(z[0].stability, Stability::StrictlyStable);
    }
}

#[test]
fn logp_single_zero() {
    let p = logp(3, 5.0, 0.6, 0.1, 0.3, 0.4);
    let z = zeros(&p);
    assert_eq!(z.len(), 1);
    assert!((z[0].groups[0].value - 0.22).abs() < 1e-2);
    assert!(z[0].stability.is_stable());
    assert!(nosync_zeros(&p, false).is_empty());
    let flags = diagnostics(&p).conditions.unwrap();
    assert!(flags.s1);
}

#[test]
fn tech_single_agent_cubic() {
    let p = tech(1, 0.9, 0.0, 0.0, 0.5);
    let v = sync_values(&zeros(&p));
    let s2 = std::f64::consts::SQRT_2;
    let want = [(2.0 - s2) / 4.0, 0.5, (2.0 + s2) / 4.0];
    assert_eq!(v.len(), 3);
    for (a, b) in v.iter().zip(want) {
        assert!((a - b).abs() < 1e-10);
    }
    let z = zeros(&p);
    assert!(z[1].stability.is_linearly_unstable());
    assert!(z[0].stability == Stability::StrictlyStable && z[2].stability == Stability::StrictlyStable);
}

#[test]
fn logp_steep_symmetric() {
    let p = logp(2, 30.0, 0.5, 0.4, 0.0, 0.5);
    let z = sync_zeros(&p);
    assert_eq!(z.len(), 3);
    assert!(z[0].groups[0].value < 0.05 && z[2].groups[0].value > 0.95);
    assert!((z[1].groups[0].value - 0.5).abs() < 1e-12);
    assert!(z[1].stability.is_linearly_unstable());
    assert!(z[0].stability.is_stable() && z[2].stability.is_stable());
    // the stable pair is symmetric about 1/2
    assert!((z[0].groups[0].value + z[2].groups[0].value - 1.0).abs() < 1e-9);
    assert!(diagnostics(&p).half_is_zero);
}

#[test]
fn logp_steep_fragmented_pair() {
    for n in [2, 4, 6] {
        let p = logp(n, 30.0, 0.5, 0.4, 0.0, 0.5);
        let frag = nosync_zeros(&p, false);
        let stable: Vec<_> = frag.iter().filter(|z| z.stability.is_stable()).collect();
        assert!(!stable.is_empty());
        let half = stable.iter().find(|z| z.groups[0].count == n / 2).expect("balanced split");
        assert!((half.groups[0].value - 0.2).abs() < 0.03);
        assert!((half.groups[1].value - 0.8).abs() < 0.03);
        // symmetric special case
        let z1 = half.groups[0].value;
        assert!((half.groups[1].value - (1.0 - z1)).abs() < 1e-9);
        assert!((0.6 * p.f.eval(z1) - z1 + 0.2).abs() < 1e-9);
    }
}

#[test]
fn logp_two_stable_sync_and_fragments() {
    let p = logp(2, 12.0, 0.47, 0.1, 0.3, 0.4);
    let z = zeros(&p);
    let stable_sync: Vec<f64> = z
        .iter()
        .filter(|z| z.kind == ZeroKind::Synchronization && z.stability.is_stable())
        .map(|z| z.groups[0].value)
        .collect();
    assert_eq!(stable_sync.len(), 2);
    assert!((stable_sync[0] - 0.14).abs() < 0.02);
    assert!((stable_sync[1] - 0.78).abs() < 0.02);
    assert!(z.iter().any(|z| z.kind == ZeroKind::NoSynchronization));
}

#[test]
fn tech_fragments() {
    let p = tech(4, 0.99, 0.14, 0.0, 0.5);
    let z = zeros(&p);
    let stable_sync: Vec<f64> = z
        .iter()
        .filter(|z| z.kind == ZeroKind::Synchronization && z.stability.is_stable())
        .map(|z| z.groups[0].value)
        .collect();
    assert_eq!(stable_sync.len(), 2);
    assert!((stable_sync[0] - 0.0103).abs() < 5e-3);
    assert!((stable_sync[1] - 0.989).abs() < 5e-3);
    let stable_frag: Vec<_> =
        z.iter().filter(|z| z.kind == ZeroKind::NoSynchronization && z.stability.is_stable()).collect();
    // 3:1 splits are stable as well; the balanced split carries the
    // symmetric pair
    let balanced: Vec<_> = stable_frag.iter().filter(|z| z.groups[0].count == 2).collect();
    assert_eq!(balanced.len(), 1);
    for f in &stable_frag {
        let (lo, hi) = restriction_bounds(&p, f.groups[0].value, f.groups[1].value);
        let share = p.alpha * f.groups[0].count as f64 / 4.0;
        assert!(lo < share && share < hi);
    }
    for f in balanced {
        assert!((f.groups[0].value - 0.104).abs() < 5e-3);
        assert!((f.groups[1].value - 0.896).abs() < 5e-3);
    }
}

#[test]
fn restriction_bounds_flat_double() {
    struct Flat;
    impl Reinforcement for Flat {
        fn eval(&self, _: f64) -> f64 {
            0.5
        }
        fn deriv(&self, _: f64) -> f64 {
            0.0
        }
        fn primitive(&self, x: f64) -> f64 {
            0.5 * x
        }
    }
    let p = ModelParams::new(2, 0.4, 0.0, 0.5, Flat).unwrap();
    let (lo, hi) = restriction_bounds(&p, 0.2, 0.8);
    assert!((lo + 0.6).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
}

#[test]
fn lp_never_fragments() {
    for (theta, xstar) in [(0.9, 1.0 / 3.0), (1.5, 0.2), (0.6, 1.0), (5.0, 0.05)] {
        for n in [2, 3, 5] {
            let p = params(n, 0.2, 0.1, 0.7, ReinforcementFunction::lp(theta, xstar).unwrap());
            assert!(nosync_zeros(&p, true).is_empty());
        }
    }
}

#[test]
fn middle_branch_zeros_are_unstable() {
    let p = logp(3, 30.0, 0.5, 0.4, 0.0, 0.5);
    let all = nosync_zeros(&p, true);
    let strict = nosync_zeros(&p, false);
    assert!(all.len() > strict.len());
    let xs = critical_abscissas(&p).xstar12;
    for z in &all {
        let middle = z.groups.iter().any(|g| g.value > xs[0] + 1e-9 && g.value < xs[1] - 1e-9);
        if middle {
            assert!(z.stability.is_linearly_unstable());
        }
    }
}

#[test]
fn degenerate_tangency_skips_search() {
    // theta / 4 == 1 / g with g = 0.5
    let p = logp(3, 8.0, 0.5, 0.3, 0.2, 0.5);
    let d = diagnostics(&p);
    assert!(d.degenerate);
    assert!(nosync_zeros(&p, true).is_empty());
}

#[test]
fn critical_abscissas_sorted_in_unit_interval() {
    let p = logp(2, 12.0, 0.47, 0.1, 0.3, 0.4);
    let c = critical_abscissas(&p);
    for v in [&c.xhat, &c.xstar12] {
        assert!(v.len() <= 2);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
    }
    assert_eq!(c.xstar12.len(), 2);
}

#[test]
fn condition_flags_gate_fragmentation() {
    let cases = [
        logp(3, 5.0, 0.6, 0.1, 0.3, 0.4),
        logp(3, 12.0, 0.47, 0.1, 0.3, 0.4),
        logp(4, 30.0, 0.5, 0.4, 0.0, 0.5),
        logp(3, 20.0, 0.3, 0.2, 0.1, 0.8),
        tech(4, 0.99, 0.14, 0.0, 0.5),
        tech(3, 0.9, 0.1, 0.2, 0.3),
        tech(3, 0.97, 0.18, 0.01, 0.01),
    ];
    for p in cases {
        let flags = diagnostics(&p).conditions.unwrap();
        if flags.s1 || flags.s2 || flags.s3 {
            assert!(nosync_zeros(&p, false).is_empty(), "{flags:?}");
        }
        if flags.u1 || flags.u2 || flags.u3 {
            assert_eq!(sync_zeros(&p).len(), 1, "{flags:?}");
        }
        if flags.cond_cs {
            assert!(nosync_zeros(&p, false).iter().all(|z| !z.stability.is_stable()));
        }
    }
}

#[test]
fn half_diagnostic() {
    assert!(diagnostics(&tech(2, 0.9, 0.2, 0.0, 0.3)).half_is_zero);
    assert!(!diagnostics(&lp_fig2(2)).half_is_zero);
    assert!(diagnostics(&logp(2, 7.0, 0.5, 0.1, 0.2, 0.5)).half_is_zero);
}

#[test]
fn tech_single_agent_threshold() {
    for (theta, two) in [(0.8, false), (0.83, false), (5.0 / 6.0, false), (0.84, true), (0.9, true)] {
        let stable: Vec<f64> = zeros(&tech(1, theta, 0.0, 0.0, 0.5))
            .into_iter()
            .filter(|z| z.stability.is_stable())
            .map(|z| z.groups[0].value)
            .collect();
        if two {
            assert_eq!(stable.len(), 2, "theta = {theta}");
            assert!((stable[0] + stable[1] - 1.0).abs() < 1e-9);
        } else {
            assert_eq!(stable, vec![0.5], "theta = {theta}");
        }
    }
}

#[test]
fn every_zero_is_canonical() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in [logp(4, 30.0, 0.5, 0.4, 0.0, 0.5), tech(4, 0.99, 0.14, 0.0, 0.5), logp(3, 12.0, 0.47, 0.1, 0.3, 0.4)] {
        for z in all_zeros(&p, EnumerationOptions { include_unstable_middle: true, oracle_check: false }).unwrap() {
            assert_eq!(z.kind == ZeroKind::Synchronization, z.groups.len() == 1);
            assert!(z.groups.windows(2).all(|w| w[0].value < w[1].value));
            assert_eq!(z.n_agents(), p.n_agents);
            assert!(z.residual <= RESIDUAL_BOUND);
            assert_eq!(z.stability, stability::classify(&z.spectrum));
            let mut v = z.expanded();
            for _ in 0..10 {
                v.shuffle(&mut rng);
                assert!(sup_norm(&drift(&p, &v)) <= RESIDUAL_BOUND);
            }
        }
    }
}

#[test]
fn oracle_agrees_on_small_systems() {
    for p in [logp(3, 30.0, 0.5, 0.4, 0.0, 0.5), tech(2, 0.99, 0.14, 0.0, 0.5)] {
        let full = all_zeros(&p, EnumerationOptions { include_unstable_middle: true, oracle_check: false }).unwrap();
        let report = compare(&p, &full, 2000, 17);
        assert!(report.extra.is_empty(), "{report:?}");
        assert!(report.missing.is_empty(), "{report:?}");
    }
    assert!(all_zeros(&lp_fig2(3), EnumerationOptions { include_unstable_middle: false, oracle_check: true }).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_boundary_signs(theta in 0.5f64..40.0, xstar in 0.05f64..0.95, alpha in 0.0f64..0.6, beta in 0.0f64..0.39, q in 0.01f64..1.0, fam in 0usize..3) {
        prop_assume!(alpha + beta > 0.01);
        let f = match fam {
            0 => lp_from_unit(theta / 8.0, xstar),
            1 => ReinforcementFunction::logp(theta, xstar).unwrap(),
            _ => ReinforcementFunction::tech(0.5 + theta / 80.0).unwrap(),
        };
        let p = params(2, alpha, beta, q, f);
        prop_assert!(sync_residual(&p, 0.0) >= -1e-12);
        prop_assert!(sync_residual(&p, 1.0) <= 1e-12);
        let s = sync_zeros(&p);
        prop_assert!(!s.is_empty());
        for z in s {
            prop_assert!(z.residual <= RESIDUAL_BOUND);
        }
    }

    #[test]
    fn lp_closed_form_agrees_with_bisection(theta in 0.2f64..5.0, u in 0.0f64..1.0, alpha in 0.0f64..0.6, beta in 0.01f64..0.39, q in 0.01f64..1.0) {
        let f = lp_from_unit(theta, u);
        let Some(ReinforcementFunction::Lp { xstar, .. }) = f.family().cloned() else { unreachable!() };
        let p = params(1, alpha, beta, q, f);
        let a = lp_sync_roots(alpha, beta, q, theta, xstar);
        let b = sync_roots_by_bisection(&p);
        prop_assert_eq!(a.len(), 1);
        prop_assert_eq!(b.len(), 1);
        prop_assert!((a[0] - b[0]).abs() < 1e-10);
    }

    #[test]
    fn symmetric_logp_pairs(theta in 1.0f64..40.0, alpha in 0.01f64..0.6) {
        let p = logp(2, theta, 0.5, alpha, 0.0, 0.5);
        let stable: Vec<f64> = sync_zeros(&p).into_iter().filter(|z| z.stability.is_stable()).map(|z| z.groups[0].value).collect();
        for z in &stable {
            prop_assert!(stable.iter().any(|w| (z + w - 1.0).abs() < 1e-8));
        }
    }
}
