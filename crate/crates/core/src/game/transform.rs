use super::policy::Policy;
use super::tree::{GameTree, PlayerId, RawNode, TreeBuilder};
use crate::error::{Error, Result};

/// A partition of players into teams.
pub type Teams = Vec<Vec<PlayerId>>;

/// Checks that `teams` partitions `0..players`.
pub fn validate_teams(teams: &[Vec<PlayerId>], players: usize) -> Result<()> {
    let mut seen = vec![false; players];
    for team in teams {
        if team.is_empty() {
            return Err(Error::Config("empty team in partition".into()));
        }
        for &p in team {
            if p >= players {
                return Err(Error::Config(format!(
                    "team member {p} out of range for {players} players"
                )));
            }
            if seen[p] {
                return Err(Error::Config(format!("player {p} appears in two teams")));
            }
            seen[p] = true;
        }
    }
    if let Some(p) = seen.iter().position(|s| !s) {
        return Err(Error::Config(format!("player {p} is in no team")));
    }
    Ok(())
}

/// Replaces each member's terminal payoff by the team average.
pub fn apply_team_rewards(tree: &GameTree, teams: &[Vec<PlayerId>]) -> Result<GameTree> {
    validate_teams(teams, tree.num_players())?;
    Ok(tree.map_terminals(|payoffs| {
        let mut out = payoffs.to_vec();
        for team in teams {
            let mean = team.iter().map(|&p| payoffs[p]).sum::<f64>() / team.len() as f64;
            for &p in team {
                out[p] = mean;
            }
        }
        out
    }))
}

/// Turns `player` into part of the environment by replacing its decision nodes with
/// chance nodes drawn from `policy`.
///
/// With `drop_payoff` the player's payoff entry is removed and later players are
/// renumbered down by one; otherwise the player is kept as a payoff-only seat.
pub fn fix_player_policy(
    tree: &GameTree,
    player: PlayerId,
    policy: &Policy,
    drop_payoff: bool,
) -> Result<GameTree> {
    let n = tree.num_players();
    if player >= n {
        return Err(Error::Config(format!("player {player} out of range")));
    }
    let infos = tree.infostates(player);
    if policy.probs.len() != infos.len() {
        let missing = infos
            .get(policy.probs.len())
            .map(|i| i.key.clone())
            .unwrap_or_default();
        return Err(Error::Config(format!(
            "policy for player {player} covers {} of {} infostates (first missing {missing:?})",
            policy.probs.len(),
            infos.len()
        )));
    }
    if drop_payoff && n == 1 {
        return Err(Error::Config("cannot drop the only player".into()));
    }
    for (info, v) in infos.iter().zip(&policy.probs) {
        if v.len() != info.num_actions() {
            return Err(Error::Config(format!(
                "policy for infostate {:?} has {} entries, expected {}",
                info.key,
                v.len(),
                info.num_actions()
            )));
        }
    }

    let raw: Vec<RawNode> = tree
        .to_raw()
        .into_iter()
        .map(|node| match node {
            RawNode::Decision {
                player: owner,
                key,
                actions,
            } if owner == player => {
                let s = tree.lookup(player, &key).expect("key from this tree");
                RawNode::Chance(
                    policy.probs[s]
                        .iter()
                        .zip(actions)
                        .map(|(&p, (_, c))| (p, c))
                        .collect(),
                )
            }
            RawNode::Decision {
                player: owner,
                key,
                actions,
            } if drop_payoff && owner > player => RawNode::Decision {
                player: owner - 1,
                key,
                actions,
            },
            RawNode::Terminal(mut payoffs) if drop_payoff => {
                payoffs.remove(player);
                RawNode::Terminal(payoffs)
            }
            other => other,
        })
        .collect();
    let players = if drop_payoff { n - 1 } else { n };
    TreeBuilder::from_raw(raw).build(tree.name(), players, tree.root())
}
