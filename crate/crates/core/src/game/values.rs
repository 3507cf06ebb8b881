//! Expectation passes over a [`GameTree`]: reach probabilities, subtree values,
//! counterfactual action values and exact best responses.
//!
//! Trees are stored in preorder, so every pass is a plain loop over node ids:
//! ascending for reach (parents before children), descending for values.

use super::policy::{JointPolicy, Policy};
use super::tree::{GameTree, Node, PlayerId};
use crate::error::Result;

/// Per-node reach probabilities and expected payoffs under one joint policy.
#[derive(Clone, Debug)]
pub struct Traversal {
    players: usize,
    /// `cf[h * n + i]`: chance times every other player's reach of `h`.
    cf: Vec<f64>,
    /// `own[h * n + i]`: player i's own contribution to reaching `h`.
    own: Vec<f64>,
    /// `value[h * n + i]`: expected payoff to i from `h` onwards.
    value: Vec<f64>,
}

impl Traversal {
    pub fn new(tree: &GameTree, joint: &JointPolicy) -> Result<Self> {
        joint.check_shape(tree)?;
        Ok(Self::new_unchecked(tree, joint))
    }

    pub(crate) fn new_unchecked(tree: &GameTree, joint: &JointPolicy) -> Self {
        let n = tree.num_players();
        let len = tree.num_nodes() * n;
        let mut cf = vec![0.0; len];
        let mut own = vec![0.0; len];
        cf[..n].fill(1.0);
        own[..n].fill(1.0);

        for (h, node) in tree.nodes().iter().enumerate() {
            match node {
                Node::Chance { outcomes } => {
                    for &(q, c) in outcomes {
                        for i in 0..n {
                            cf[c * n + i] = cf[h * n + i] * q;
                            own[c * n + i] = own[h * n + i];
                        }
                    }
                }
                Node::Decision {
                    player,
                    infostate,
                    children,
                } => {
                    let pi = joint.probs(*player, *infostate);
                    for (a, &c) in children.iter().enumerate() {
                        for i in 0..n {
                            if i == *player {
                                cf[c * n + i] = cf[h * n + i];
                                own[c * n + i] = own[h * n + i] * pi[a];
                            } else {
                                cf[c * n + i] = cf[h * n + i] * pi[a];
                                own[c * n + i] = own[h * n + i];
                            }
                        }
                    }
                }
                Node::Terminal { .. } => {}
            }
        }

        let mut value = vec![0.0; len];
        for (h, node) in tree.nodes().iter().enumerate().rev() {
            match node {
                Node::Terminal { payoffs } => value[h * n..(h + 1) * n].copy_from_slice(payoffs),
                Node::Chance { outcomes } => {
                    for &(q, c) in outcomes {
                        for i in 0..n {
                            value[h * n + i] += q * value[c * n + i];
                        }
                    }
                }
                Node::Decision {
                    player,
                    infostate,
                    children,
                } => {
                    let pi = joint.probs(*player, *infostate);
                    for (a, &c) in children.iter().enumerate() {
                        for i in 0..n {
                            value[h * n + i] += pi[a] * value[c * n + i];
                        }
                    }
                }
            }
        }

        Self {
            players: n,
            cf,
            own,
            value,
        }
    }

    pub fn root_values(&self) -> Vec<f64> {
        self.value[..self.players].to_vec()
    }

    pub fn value(&self, node: usize, player: PlayerId) -> f64 {
        self.value[node * self.players + player]
    }

    pub fn cf_reach(&self, node: usize, player: PlayerId) -> f64 {
        self.cf[node * self.players + player]
    }

    pub fn own_reach(&self, node: usize, player: PlayerId) -> f64 {
        self.own[node * self.players + player]
    }

    /// Counterfactual action values for every infostate of `player`.
    pub fn q_values(&self, tree: &GameTree, player: PlayerId) -> Vec<Vec<f64>> {
        let n = self.players;
        tree.infostates(player)
            .iter()
            .map(|info| {
                let mut q = vec![0.0; info.num_actions()];
                for &h in &info.nodes {
                    let w = self.cf[h * n + player];
                    if w == 0.0 {
                        continue;
                    }
                    if let Node::Decision { children, .. } = tree.node(h) {
                        for (a, &c) in children.iter().enumerate() {
                            q[a] += w * self.value[c * n + player];
                        }
                    }
                }
                q
            })
            .collect()
    }

    /// Player's own reach of each of its infostates (identical across member nodes).
    pub fn infostate_own_reach(&self, tree: &GameTree, player: PlayerId) -> Vec<f64> {
        tree.infostates(player)
            .iter()
            .map(|info| self.own[info.nodes[0] * self.players + player])
            .collect()
    }
}

/// Expected payoff of every player from the root.
pub fn expected_values(tree: &GameTree, joint: &JointPolicy) -> Result<Vec<f64>> {
    Ok(Traversal::new(tree, joint)?.root_values())
}

/// Counterfactual action values Q(τ, a) for every infostate of `player`.
pub fn q_values(tree: &GameTree, joint: &JointPolicy, player: PlayerId) -> Result<Vec<Vec<f64>>> {
    Ok(Traversal::new(tree, joint)?.q_values(tree, player))
}

/// Action values for all players from a single traversal.
pub fn q_values_all(tree: &GameTree, joint: &JointPolicy) -> Result<Vec<Vec<Vec<f64>>>> {
    let t = Traversal::new(tree, joint)?;
    Ok((0..tree.num_players())
        .map(|p| t.q_values(tree, p))
        .collect())
}

/// A deterministic best response and its value.
#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse {
    pub actions: Vec<usize>,
    pub policy: Policy,
    pub value: f64,
}

/// Exact best response of `player` against the other players' parts of `joint`.
pub fn best_response(
    tree: &GameTree,
    joint: &JointPolicy,
    player: PlayerId,
) -> Result<BestResponse> {
    let t = Traversal::new(tree, joint)?;
    Ok(best_response_with(tree, joint, player, &t))
}

/// Best response reusing the reach probabilities of an existing traversal of `joint`.
///
/// Infostates are decided from the deepest own-decision level upwards; at each level the
/// subtree values below already use the decided deeper actions.
pub fn best_response_with(
    tree: &GameTree,
    joint: &JointPolicy,
    player: PlayerId,
    traversal: &Traversal,
) -> BestResponse {
    let n = tree.num_players();
    let infos = tree.infostates(player);
    let mut chosen: Vec<Option<usize>> = vec![None; infos.len()];
    let max_depth = tree.max_depth(player);
    let mut v = vec![0.0; tree.num_nodes()];

    let pass = |v: &mut Vec<f64>, chosen: &[Option<usize>]| {
        for (h, node) in tree.nodes().iter().enumerate().rev() {
            v[h] = match node {
                Node::Terminal { payoffs } => payoffs[player],
                Node::Chance { outcomes } => outcomes.iter().map(|&(q, c)| q * v[c]).sum(),
                Node::Decision {
                    player: owner,
                    infostate,
                    children,
                } => {
                    if *owner == player {
                        match chosen[*infostate] {
                            Some(a) => v[children[a]],
                            None => 0.0,
                        }
                    } else {
                        let pi = joint.probs(*owner, *infostate);
                        children.iter().zip(pi).map(|(&c, &p)| p * v[c]).sum()
                    }
                }
            };
        }
    };

    if !infos.is_empty() {
        for depth in (0..=max_depth).rev() {
            pass(&mut v, &chosen);
            for (s, info) in infos.iter().enumerate() {
                if info.depth != depth {
                    continue;
                }
                let mut score = vec![0.0; info.num_actions()];
                for &h in &info.nodes {
                    let w = traversal.cf[h * n + player];
                    if let Node::Decision { children, .. } = tree.node(h) {
                        for (a, &c) in children.iter().enumerate() {
                            score[a] += w * v[c];
                        }
                    }
                }
                let mut best = 0;
                for a in 1..score.len() {
                    if score[a] > score[best] {
                        best = a;
                    }
                }
                chosen[s] = Some(best);
            }
        }
    }
    pass(&mut v, &chosen);

    let actions: Vec<usize> = chosen.into_iter().map(|a| a.unwrap_or(0)).collect();
    BestResponse {
        policy: Policy::deterministic(tree, player, &actions),
        actions,
        value: v[0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::tree::TreeBuilder;

    fn matching_pennies() -> GameTree {
        let mut b = TreeBuilder::new();
        let mut p1_nodes = Vec::new();
        for a in 0..2 {
            let mut acts = Vec::new();
            for c in 0..2 {
                let u = if a == c { 1.0 } else { -1.0 };
                let t = b.terminal(vec![u, -u]);
                acts.push((["H", "T"][c].to_string(), t));
            }
            p1_nodes.push(b.decision(1, "p1", acts));
        }
        let root = b.decision(
            0,
            "p0",
            vec![("H".into(), p1_nodes[0]), ("T".into(), p1_nodes[1])],
        );
        b.build("mp", 2, root).unwrap()
    }

    #[test]
    fn depth_one_q_values() {
        let mut b = TreeBuilder::new();
        let t0 = b.terminal(vec![3.0]);
        let t1 = b.terminal(vec![1.0]);
        let root = b.decision(0, "r", vec![("a0".into(), t0), ("a1".into(), t1)]);
        let tree = b.build("d1", 1, root).unwrap();
        let q = q_values(&tree, &JointPolicy::uniform(&tree), 0).unwrap();
        assert_eq!(q, vec![vec![3.0, 1.0]]);
    }

    #[test]
    fn matching_pennies_uniform_values() {
        let tree = matching_pennies();
        let v = expected_values(&tree, &JointPolicy::uniform(&tree)).unwrap();
        assert_eq!(v, vec![0.0, 0.0]);
        let br = best_response(&tree, &JointPolicy::uniform(&tree), 0).unwrap();
        assert!(br.value.abs() < 1e-15);
    }

    #[test]
    fn best_response_to_biased_opponent() {
        let tree = matching_pennies();
        let mut joint = JointPolicy::uniform(&tree);
        joint.set(1, 0, vec![0.9, 0.1]);
        let br = best_response(&tree, &joint, 0).unwrap();
        assert!((br.value - 0.8).abs() < 1e-12);
        assert_eq!(br.actions, vec![0]);
    }

    #[test]
    fn zero_reach_gives_zero_q() {
        let tree = matching_pennies();
        let mut joint = JointPolicy::uniform(&tree);
        joint.set(0, 0, vec![1.0, 0.0]);
        // Player 0 never reaches anything through "T", but player 1's infostate is shared;
        // build a case with all-zero opponent weight instead: player 1 sees only H.
        let q = q_values(&tree, &joint, 1).unwrap();
        assert_eq!(q[0], vec![-1.0, 1.0]);
        joint.set(0, 0, vec![0.0, 0.0]);
        let q = q_values(&tree, &joint, 1).unwrap();
        assert_eq!(q[0], vec![0.0, 0.0]);
    }

    #[test]
    fn missing_infostate_is_named() {
        let tree = matching_pennies();
        let mut joint = JointPolicy::uniform(&tree);
        joint.players[1].probs.clear();
        match expected_values(&tree, &joint) {
            Err(crate::Error::MissingInfostate { player, key }) => {
                assert_eq!(player, 1);
                assert_eq!(key, "p1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
