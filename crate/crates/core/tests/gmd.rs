mod common;

use cmd_core::bregman::ConvexFamily;
use cmd_core::games::make_builtin;
use cmd_core::gmd::{
    assemble_kkt, gmd_step, gmd_update, raw_policy, solve_dual, DecisionState, GmdConfig, GmdState,
    LambdaInit, NewtonOptions, Start,
};
use common::{max_abs_diff, prox_oracle, random_interior, Psi};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn no_magnet(family: ConvexFamily, m: usize) -> GmdConfig {
    GmdConfig {
        magnet: false,
        ..GmdConfig::new(family, m)
    }
}

#[test]
fn step_matches_numeric_maximizer() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for psi in Psi::DEFAULTS {
        for _ in 0..40 {
            let n = rng.random_range(2..=4);
            let m = rng.random_range(1..=4);
            let q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let hist: Vec<Vec<f64>> = (0..m).map(|_| random_interior(&mut rng, n, 0.01)).collect();
            let alpha: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
            let magnet = random_interior(&mut rng, n, 0.01);
            let wm = rng.random_range(0.05..1.0);

            let mut config = GmdConfig::new(psi.library(), m);
            config.alpha = alpha.clone();
            let mut st = DecisionState::new(hist[m - 1].clone());
            for h in hist.iter().rev().skip(1) {
                st.history.push_front(h.clone());
            }
            st.magnet = magnet.clone();
            let got = gmd_step(&mut st, &q, &alpha, wm, &config, Start::Default).unwrap();

            let mut anchors: Vec<(f64, Vec<f64>)> =
                alpha.iter().cloned().zip(hist.iter().cloned()).collect();
            anchors.push((wm, magnet));
            let want = prox_oracle(psi, &q, &anchors, 0.0);
            assert!(
                max_abs_diff(&got, &want) < 1e-6,
                "{psi:?}: {got:?} vs {want:?}"
            );
        }
    }
}

#[test]
fn entropy_single_history_is_multiplicative_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let config = no_magnet(ConvexFamily::Entropy, 1);
    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        let pi = random_interior(&mut rng, n, 1e-3);
        let q: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let mut st = DecisionState::new(pi.clone());
        let got = gmd_step(&mut st, &q, &[1.0], 0.0, &config, Start::Default).unwrap();
        let w: Vec<f64> = pi.iter().zip(&q).map(|(p, x)| p * x.exp()).collect();
        let s: f64 = w.iter().sum();
        let want: Vec<f64> = w.iter().map(|x| x / s).collect();
        assert!(max_abs_diff(&got, &want) < 1e-7);
    }
}

#[test]
fn power_family_can_zero_out_actions() {
    let config = no_magnet(ConvexFamily::Power { n: 2.0 }, 1);
    let mut st = DecisionState::new(vec![0.5, 0.5]);
    let got = gmd_step(&mut st, &[10.0, 0.0], &[1.0], 0.0, &config, Start::Default).unwrap();
    assert!(got[1] <= 1e-9 && (got[0] - 1.0).abs() < 1e-9);
    let want = prox_oracle(Psi::Power(2.0), &[10.0, 0.0], &[(1.0, vec![0.5, 0.5])], 0.0);
    assert!(max_abs_diff(&got, &want) < 1e-6);
}

#[test]
fn random_and_warm_starts_agree_with_default() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for fam in ConvexFamily::defaults() {
        for _ in 0..50 {
            let n = rng.random_range(2..=6);
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let b = rng.random_range(0.01..3.0);
            let base = solve_dual(&a, b, &fam, &NewtonOptions::default()).unwrap();
            for start in [
                Start::Fraction(rng.random()),
                Start::Warm(base.lambda + 0.3),
            ] {
                let opts = NewtonOptions {
                    start,
                    ..Default::default()
                };
                let other = solve_dual(&a, b, &fam, &opts).unwrap();
                assert!(max_abs_diff(&base.policy, &other.policy) < 1e-7, "{fam}");
            }
        }
    }
}

#[test]
fn warm_up_uses_available_history_only() {
    let tree = make_builtin("kuhn_poker").unwrap().tree;
    let config = GmdConfig {
        alpha: vec![1e-6, 1e-6, 1e-6],
        ..no_magnet(ConvexFamily::Entropy, 3)
    };
    let mut state = GmdState::uniform(&tree);
    let joint = gmd_update(&tree, &mut state, &config).unwrap();
    let mut reference = GmdState::uniform(&tree);
    let mwu = gmd_update(&tree, &mut reference, &no_magnet(ConvexFamily::Entropy, 1)).unwrap();
    assert_eq!(joint, mwu);
    assert_eq!(state.k, 2);
    assert_eq!(state.players[0][0].history.len(), 2);
}

#[test]
fn random_lambda_init_is_reproducible() {
    let tree = make_builtin("leduc_poker").unwrap().tree;
    let config = GmdConfig {
        lambda_init: LambdaInit::Random { seed: 3 },
        ..GmdConfig::new(ConvexFamily::NegPower { n: 0.1 }, 2)
    };
    let run = || {
        let mut s = GmdState::uniform(&tree);
        for _ in 0..3 {
            gmd_update(&tree, &mut s, &config).unwrap();
        }
        s.current()
    };
    let det = {
        let c = GmdConfig {
            lambda_init: LambdaInit::Deterministic,
            ..config.clone()
        };
        let mut s = GmdState::uniform(&tree);
        for _ in 0..3 {
            gmd_update(&tree, &mut s, &c).unwrap();
        }
        s.current()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    for (pa, pd) in a.players.iter().zip(&det.players) {
        for (x, y) in pa.probs.iter().zip(&pd.probs) {
            assert!(max_abs_diff(x, y) < 1e-7);
        }
    }
}

#[test]
fn epsilon_floor_holds_after_every_step() {
    let tree = make_builtin("kuhn_poker").unwrap().tree;
    for fam in ConvexFamily::defaults() {
        let config = GmdConfig::new(fam, 2);
        let mut s = GmdState::uniform(&tree);
        for _ in 0..30 {
            let j = gmd_update(&tree, &mut s, &config).unwrap();
            for p in &j.players {
                for probs in &p.probs {
                    assert!(probs.iter().all(|&x| x >= config.epsilon * 0.999));
                    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn residual_is_small(
        a in prop::collection::vec(-20.0f64..20.0, 1..8),
        b in 1e-6f64..5.0,
        which in 0usize..4,
    ) {
        let fam = ConvexFamily::defaults()[which];
        let sol = solve_dual(&a, b, &fam, &NewtonOptions::default()).unwrap();
        prop_assert!((sol.policy.iter().sum::<f64>() - 1.0).abs() <= 1e-8);
        prop_assert!(sol.policy.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn entropy_ignores_constant_shifts(
        q in prop::collection::vec(-3.0f64..3.0, 2..6),
        c in -50.0f64..50.0,
    ) {
        let n = q.len();
        let config = no_magnet(ConvexFamily::Entropy, 1);
        let pi = vec![1.0 / n as f64; n];
        let mut s1 = DecisionState::new(pi.clone());
        let mut s2 = DecisionState::new(pi);
        let shifted: Vec<f64> = q.iter().map(|x| x + c).collect();
        let p1 = gmd_step(&mut s1, &q, &[0.7], 0.0, &config, Start::Default).unwrap();
        let p2 = gmd_step(&mut s2, &shifted, &[0.7], 0.0, &config, Start::Default).unwrap();
        prop_assert!(max_abs_diff(&p1, &p2) < 1e-9);
    }

    #[test]
    fn raw_policy_is_scale_free(
        a in prop::collection::vec(-3.0f64..3.0, 2..6),
        b in 0.1f64..3.0,
        lambda in -3.0f64..3.0,
        c in 0.1f64..10.0,
    ) {
        let fam = ConvexFamily::Entropy;
        let x = raw_policy(&a, b, lambda, &fam).unwrap();
        let scaled: Vec<f64> = a.iter().map(|v| v / c).collect();
        let y = raw_policy(&scaled, b / c, lambda / c, &fam).unwrap();
        for (u, v) in x.iter().zip(&y) {
            prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
        }
    }

    #[test]
    fn kkt_weights_sum(
        m in 1usize..5,
        w in prop::collection::vec(1e-6f64..1.0, 5),
        wm in 1e-6f64..1.0,
    ) {
        let hist = vec![vec![0.25, 0.75]; m];
        let refs: Vec<&[f64]> = hist.iter().map(|h| h.as_slice()).collect();
        let (_, b) = assemble_kkt(&[0.0, 1.0], &refs, &w[..m], Some((&[0.5, 0.5], wm)), &ConvexFamily::Entropy).unwrap();
        prop_assert!((b - w[..m].iter().sum::<f64>() - wm).abs() < 1e-12);
    }
}
