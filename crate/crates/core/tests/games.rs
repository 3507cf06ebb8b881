mod common;

use cmd_core::eval::nash_conv;
use cmd_core::game::{
    apply_team_rewards, best_response, expected_values, fix_player_policy, JointPolicy,
};
use cmd_core::games::{
    exhaustive_optimum, kuhn_poker, make_builtin, parse_game_file, write_game_file,
    TinyHanabiPayoff,
};
use common::random_joint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const KUHN_FILE: &str = include_str!("data/kuhn_poker_2p.game");
const PENNIES_FILE: &str = include_str!("data/matching_pennies.game");

#[test]
fn decision_point_counts() {
    for (name, want) in [
        ("single_agent_kuhn_a", 6),
        ("single_agent_kuhn_b", 6),
        ("tiny_hanabi_game_a", 8),
        ("tiny_hanabi_game_b", 6),
        ("tiny_hanabi_game_c", 6),
        ("kuhn_poker", 12),
        ("kuhn_poker(players=3)", 48),
        ("leduc_poker", 936),
        ("mcc_kuhn_a", 48),
        ("mcc_kuhn_b", 48),
        ("matching_pennies", 2),
        ("single_agent_goofspiel", 8),
        ("goofspiel(players=3)", 30),
        ("mcc_goofspiel", 30),
    ] {
        assert_eq!(
            make_builtin(name).unwrap().tree.decision_points().total,
            want,
            "{name}"
        );
    }
}

#[test]
fn file_kuhn_matches_builtin() {
    let file = parse_game_file(KUHN_FILE).unwrap();
    let builtin = kuhn_poker(2).unwrap();
    assert_eq!(file.decision_points(), builtin.decision_points());
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let joint = random_joint(&mut rng, &builtin);
        let moved = JointPolicy::from_keyed(&file, &joint.to_keyed(&builtin)).unwrap();
        let a = nash_conv(&builtin, &joint).unwrap();
        let b = nash_conv(&file, &moved).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn pennies_file_merges_hidden_information() {
    let tree = parse_game_file(PENNIES_FILE).unwrap();
    let counts = tree.decision_points();
    assert_eq!(counts.per_player, vec![1, 1]);
    assert_eq!(counts.total, 2);
    assert_eq!(tree.num_decision_nodes(), 3);
    assert!(
        nash_conv(&tree, &JointPolicy::uniform(&tree))
            .unwrap()
            .abs()
            < 1e-12
    );
}

#[test]
fn written_files_parse_back_to_the_same_game() {
    for name in ["kuhn_poker", "tiny_hanabi_game_a", "matching_pennies"] {
        let tree = make_builtin(name).unwrap().tree;
        let back = parse_game_file(&write_game_file(&tree)).unwrap();
        let joint = JointPolicy::uniform(&tree);
        assert_eq!(
            expected_values(&tree, &joint).unwrap(),
            expected_values(&back, &joint).unwrap()
        );
        assert_eq!(tree.decision_points(), back.decision_points());
    }
}

#[test]
fn malformed_files_are_rejected() {
    let bad_chance = "game g players 1\n\
        node r chance { 0.5 -> a 0.4 -> b }\n\
        node a terminal [ 1 ]\nnode b terminal [ 0 ]\nroot r\n";
    let dangling = "game g players 1\nnode r player 0 infostate \"s\" { x -> nowhere }\nroot r\n";
    let wrong_arity = "game g players 2\nnode r terminal [ 1 ]\nroot r\n";
    let cycle = "game g players 1\n\
        node r player 0 infostate \"s\" { x -> t y -> r }\nnode t terminal [ 0 ]\nroot r\n";
    for text in [bad_chance, dangling, wrong_arity, cycle, ""] {
        assert!(parse_game_file(text).is_err(), "accepted {text:?}");
    }
}

#[test]
fn builders_are_deterministic() {
    for name in [
        "kuhn_poker(players=3)",
        "leduc_poker",
        "goofspiel",
        "mcc_kuhn_b",
    ] {
        let a = make_builtin(name).unwrap().tree;
        let b = make_builtin(name).unwrap().tree;
        assert_eq!(a.to_raw(), b.to_raw(), "{name}");
    }
}

#[test]
fn single_agent_optimum_is_best_response_to_uniform() {
    let kuhn = kuhn_poker(2).unwrap();
    let uniform = JointPolicy::uniform(&kuhn);
    for (name, player) in [("single_agent_kuhn_a", 0), ("single_agent_kuhn_b", 1)] {
        let tree = make_builtin(name).unwrap().tree;
        let (opt, _) = exhaustive_optimum(&tree).unwrap();
        let br = best_response(&kuhn, &uniform, player).unwrap().value;
        assert!((opt - br).abs() < 1e-12, "{name}: {opt} vs {br}");
    }
}

/// Enumerates every deterministic pair (c0 → a0, (c1, a0) → a1) straight from the payoff table.
fn brute_force_hanabi(p: &TinyHanabiPayoff) -> f64 {
    let (c, a) = (p.num_chance, p.num_actions);
    let first = a.pow(c as u32);
    let second = a.pow((c * a) as u32);
    let digit = |code: usize, i: usize| (code / a.pow(i as u32)) % a;
    let mut best = f64::NEG_INFINITY;
    for f in 0..first {
        for s in 0..second {
            let mut v = 0.0;
            for c0 in 0..c {
                for c1 in 0..c {
                    let a0 = digit(f, c0);
                    let a1 = digit(s, c1 * a + a0);
                    v += p.get(c0, c1, a0, a1);
                }
            }
            best = best.max(v / (c * c) as f64);
        }
    }
    best
}

#[test]
fn tiny_hanabi_optimum_matches_brute_force() {
    for (name, payoff) in [
        ("tiny_hanabi_game_a", TinyHanabiPayoff::default_a()),
        ("tiny_hanabi_game_b", TinyHanabiPayoff::default_b()),
        ("tiny_hanabi_game_c", TinyHanabiPayoff::default_c()),
    ] {
        let tree = make_builtin(name).unwrap().tree;
        let (opt, policy) = exhaustive_optimum(&tree).unwrap();
        assert!((opt - brute_force_hanabi(&payoff)).abs() < 1e-12, "{name}");
        assert!((expected_values(&tree, &policy).unwrap()[0] - opt).abs() < 1e-12);
    }
    assert_eq!(brute_force_hanabi(&TinyHanabiPayoff::default_a()), 10.0);
}

#[test]
fn unknown_games_and_parameters_are_errors() {
    assert!(make_builtin("chess").is_err());
    assert!(make_builtin("kuhn_poker(players=9)").is_err());
    assert!(make_builtin("kuhn_poker(cards=3)").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zero_sum_games_sum_to_zero(seed in any::<u64>(), which in 0usize..3) {
        let name = ["kuhn_poker", "kuhn_poker(players=3)", "leduc_poker"][which];
        let tree = make_builtin(name).unwrap().tree;
        let joint = random_joint(&mut ChaCha8Rng::seed_from_u64(seed), &tree);
        let total: f64 = expected_values(&tree, &joint).unwrap().iter().sum();
        prop_assert!(total.abs() < 1e-9);
    }

    #[test]
    fn best_response_dominates_current_value(seed in any::<u64>(), player in 0usize..3) {
        let tree = kuhn_poker(3).unwrap();
        let joint = random_joint(&mut ChaCha8Rng::seed_from_u64(seed), &tree);
        let v = expected_values(&tree, &joint).unwrap()[player];
        let br = best_response(&tree, &joint, player).unwrap();
        prop_assert!(br.value >= v - 1e-12);
        let deviated = joint.with_player(player, br.policy);
        prop_assert!((expected_values(&tree, &deviated).unwrap()[player] - br.value).abs() < 1e-12);
    }

    #[test]
    fn team_rewards_preserve_team_totals(seed in any::<u64>()) {
        let tree = kuhn_poker(3).unwrap();
        let teams = vec![vec![0, 2], vec![1]];
        let shared = apply_team_rewards(&tree, &teams).unwrap();
        let joint = random_joint(&mut ChaCha8Rng::seed_from_u64(seed), &tree);
        let a = expected_values(&tree, &joint).unwrap();
        let b = expected_values(&shared, &joint).unwrap();
        prop_assert!((a[0] + a[2] - b[0] - b[2]).abs() < 1e-12);
        prop_assert!((b[0] - b[2]).abs() < 1e-12);
        prop_assert!((a[1] - b[1]).abs() < 1e-12);
    }

    #[test]
    fn fixing_a_player_keeps_the_other_values(seed in any::<u64>()) {
        let tree = kuhn_poker(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let joint = random_joint(&mut rng, &tree);
        let fixed = fix_player_policy(&tree, 1, &joint.players[1], true).unwrap();
        prop_assert_eq!(fixed.num_players(), 1);
        let solo = JointPolicy { players: vec![joint.players[0].clone()] };
        let v = expected_values(&fixed, &solo).unwrap()[0];
        prop_assert!((v - expected_values(&tree, &joint).unwrap()[0]).abs() < 1e-12);

        let kept = fix_player_policy(&tree, 1, &joint.players[1], false).unwrap();
        let mut both = JointPolicy::uniform(&kept);
        both.players[0] = joint.players[0].clone();
        prop_assert_eq!(both.players[1].len(), 0);
        prop_assert_eq!(&expected_values(&kept, &both).unwrap(), &expected_values(&tree, &joint).unwrap());
    }
}
