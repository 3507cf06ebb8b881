use crate::error::{Error, Result};
use crate::game::{best_response, GameTree, JointPolicy, Policy};

/// Upper bound on the number of pure policy profiles enumerated for the non-final players.
pub const MAX_ENUMERATED_POLICIES: u64 = 1 << 22;

/// Optimal common value and a deterministic joint policy attaining it.
///
/// Enumerates every pure policy of players 0..N−1 and lets the last player best-respond,
/// so the game must pay all players the same amount.
pub fn exhaustive_optimum(tree: &GameTree) -> Result<(f64, JointPolicy)> {
    let n = tree.num_players();
    if n > 1 && !tree.is_common_payoff() {
        return Err(Error::Config(format!(
            "{}: an optimal value is only defined for single-agent or common-payoff games",
            tree.name()
        )));
    }
    let last = n - 1;
    let radices: Vec<(usize, usize)> = (0..last)
        .flat_map(|p| {
            tree.infostates(p)
                .iter()
                .enumerate()
                .map(move |(s, info)| (p, s, info.num_actions()))
        })
        .map(|(p, _, a)| (p, a))
        .collect();
    let total = radices
        .iter()
        .try_fold(1u64, |acc, &(_, a)| acc.checked_mul(a as u64))
        .filter(|&t| t <= MAX_ENUMERATED_POLICIES)
        .ok_or_else(|| {
            Error::Config(format!(
                "{}: too many pure policies to enumerate",
                tree.name()
            ))
        })?;

    let mut digits = vec![0usize; radices.len()];
    let mut best: Option<(f64, JointPolicy)> = None;
    for _ in 0..total {
        let mut joint = JointPolicy::uniform(tree);
        let mut i = 0;
        for p in 0..last {
            let m = tree.infostates(p).len();
            joint.players[p] = Policy::deterministic(tree, p, &digits[i..i + m]);
            i += m;
        }
        let br = best_response(tree, &joint, last)?;
        if best.as_ref().is_none_or(|(v, _)| br.value > *v) {
            joint.players[last] = br.policy;
            best = Some((br.value, joint));
        }
        for (d, &(_, radix)) in digits.iter_mut().zip(&radices) {
            *d += 1;
            if *d < radix {
                break;
            }
            *d = 0;
        }
    }
    Ok(best.expect("at least one profile"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::expected_values;
    use crate::games::make_builtin;

    #[test]
    fn shipped_tiny_hanabi_optima() {
        for (name, want) in [
            ("tiny_hanabi_game_a", 10.0),
            ("tiny_hanabi_game_b", 0.75),
            ("tiny_hanabi_game_c", 3.0),
        ] {
            let tree = make_builtin(name).unwrap().tree;
            let (v, joint) = exhaustive_optimum(&tree).unwrap();
            assert!((v - want).abs() < 1e-12, "{name}: {v}");
            let vals = expected_values(&tree, &joint).unwrap();
            assert!((vals[0] - v).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_competitive_games() {
        let tree = make_builtin("kuhn_poker").unwrap().tree;
        assert!(exhaustive_optimum(&tree).is_err());
    }
}
