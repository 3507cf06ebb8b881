use std::collections::HashMap;

use crate::error::{Error, Result};

pub type PlayerId = usize;
pub type NodeId = usize;

/// Tolerance for chance rows summing to one.
pub const CHANCE_SUM_TOL: f64 = 1e-12;

/// A node of a finalized tree. Children always carry larger ids than their parent.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Chance {
        outcomes: Vec<(f64, NodeId)>,
    },
    Decision {
        player: PlayerId,
        infostate: usize,
        children: Vec<NodeId>,
    },
    Terminal {
        payoffs: Vec<f64>,
    },
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        matches!(self, Node::Terminal { .. })
    }
}

/// One information state (decision point) of a player.
#[derive(Clone, Debug, PartialEq)]
pub struct Infostate {
    pub key: String,
    pub actions: Vec<String>,
    pub nodes: Vec<NodeId>,
    /// Number of the owner's own decisions preceding this infostate.
    pub depth: usize,
}

impl Infostate {
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
}

/// A node as supplied to [`TreeBuilder`], before reindexing and validation.
#[derive(Clone, Debug, PartialEq)]
pub enum RawNode {
    Chance(Vec<(f64, usize)>),
    Decision {
        player: PlayerId,
        key: String,
        actions: Vec<(String, usize)>,
    },
    Terminal(Vec<f64>),
}

/// Collects nodes in any order and assembles a validated [`GameTree`].
#[derive(Clone, Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<RawNode>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_raw(nodes: Vec<RawNode>) -> Self {
        Self { nodes }
    }

    pub fn push(&mut self, node: RawNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn chance(&mut self, outcomes: Vec<(f64, usize)>) -> usize {
        self.push(RawNode::Chance(outcomes))
    }

    pub fn decision(
        &mut self,
        player: PlayerId,
        key: impl Into<String>,
        actions: Vec<(String, usize)>,
    ) -> usize {
        self.push(RawNode::Decision {
            player,
            key: key.into(),
            actions,
        })
    }

    pub fn terminal(&mut self, payoffs: Vec<f64>) -> usize {
        self.push(RawNode::Terminal(payoffs))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Reindexes the nodes reachable from `root` in preorder and validates the result.
    pub fn build(self, name: impl Into<String>, players: usize, root: usize) -> Result<GameTree> {
        let name = name.into();
        if players == 0 {
            return Err(Error::InvalidGame(
                "a game needs at least one player".into(),
            ));
        }
        let raw = self.nodes;
        if root >= raw.len() {
            return Err(Error::InvalidGame(format!("root {root} does not exist")));
        }

        // Preorder numbering with an explicit stack.
        let mut new_id = vec![usize::MAX; raw.len()];
        let mut order = Vec::with_capacity(raw.len());
        let mut stack = vec![root];
        while let Some(old) = stack.pop() {
            if new_id[old] != usize::MAX {
                return Err(Error::InvalidGame(format!(
                    "node {old} is reachable along more than one path"
                )));
            }
            new_id[old] = order.len();
            order.push(old);
            let children: Vec<usize> = match &raw[old] {
                RawNode::Chance(o) => o.iter().map(|&(_, c)| c).collect(),
                RawNode::Decision { actions, .. } => actions.iter().map(|(_, c)| *c).collect(),
                RawNode::Terminal(_) => Vec::new(),
            };
            for &c in children.iter().rev() {
                if c >= raw.len() {
                    return Err(Error::InvalidGame(format!(
                        "node {old} references missing child {c}"
                    )));
                }
                stack.push(c);
            }
        }
        if order.len() != raw.len() {
            return Err(Error::InvalidGame(format!(
                "{} node(s) unreachable from the root",
                raw.len() - order.len()
            )));
        }

        let mut nodes = Vec::with_capacity(order.len());
        let mut infostates: Vec<Vec<Infostate>> = vec![Vec::new(); players];
        let mut index: Vec<HashMap<String, usize>> = vec![HashMap::new(); players];

        for (id, &old) in order.iter().enumerate() {
            let node = match &raw[old] {
                RawNode::Chance(outcomes) => {
                    if outcomes.is_empty() {
                        return Err(Error::InvalidGame(format!(
                            "chance node {id} has no outcomes"
                        )));
                    }
                    let mut sum = 0.0;
                    for &(p, _) in outcomes {
                        if !p.is_finite() || p < 0.0 {
                            return Err(Error::InvalidGame(format!(
                                "chance node {id} has invalid probability {p}"
                            )));
                        }
                        sum += p;
                    }
                    if (sum - 1.0).abs() > CHANCE_SUM_TOL {
                        return Err(Error::InvalidGame(format!(
                            "chance node {id} probabilities sum to {sum}"
                        )));
                    }
                    Node::Chance {
                        outcomes: outcomes.iter().map(|&(p, c)| (p, new_id[c])).collect(),
                    }
                }
                RawNode::Decision {
                    player,
                    key,
                    actions,
                } => {
                    let player = *player;
                    if player >= players {
                        return Err(Error::InvalidGame(format!(
                            "decision node {id} owned by player {player} in a {players}-player game"
                        )));
                    }
                    if actions.is_empty() {
                        return Err(Error::InvalidGame(format!(
                            "decision node {id} has no actions"
                        )));
                    }
                    let slot = match index[player].get(key) {
                        Some(&s) => {
                            let info = &mut infostates[player][s];
                            if info.actions.len() != actions.len() {
                                return Err(Error::InvalidGame(format!(
                                    "infostate {key:?} of player {player} has {} actions at one node and {} at another",
                                    info.actions.len(),
                                    actions.len()
                                )));
                            }
                            info.nodes.push(id);
                            s
                        }
                        None => {
                            let s = infostates[player].len();
                            infostates[player].push(Infostate {
                                key: key.clone(),
                                actions: actions.iter().map(|(a, _)| a.clone()).collect(),
                                nodes: vec![id],
                                depth: 0,
                            });
                            index[player].insert(key.clone(), s);
                            s
                        }
                    };
                    Node::Decision {
                        player,
                        infostate: slot,
                        children: actions.iter().map(|(_, c)| new_id[*c]).collect(),
                    }
                }
                RawNode::Terminal(payoffs) => {
                    if payoffs.len() != players {
                        return Err(Error::InvalidGame(format!(
                            "terminal {id} has {} payoffs for {players} players",
                            payoffs.len()
                        )));
                    }
                    if payoffs.iter().any(|v| !v.is_finite()) {
                        return Err(Error::InvalidGame(format!(
                            "terminal {id} has a non-finite payoff"
                        )));
                    }
                    Node::Terminal {
                        payoffs: payoffs.clone(),
                    }
                }
            };
            nodes.push(node);
        }

        let mut tree = GameTree {
            name,
            players,
            discount: 1.0,
            nodes,
            infostates,
            index,
        };
        tree.check_perfect_recall()?;
        Ok(tree)
    }
}

/// An immutable extensive-form game with a perfect-recall infostate index.
#[derive(Clone, Debug, PartialEq)]
pub struct GameTree {
    name: String,
    players: usize,
    discount: f64,
    nodes: Vec<Node>,
    infostates: Vec<Vec<Infostate>>,
    index: Vec<HashMap<String, usize>>,
}

/// Decision points per player and in total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionPointCount {
    pub per_player: Vec<usize>,
    pub total: usize,
}

impl GameTree {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_players(&self) -> usize {
        self.players
    }

    /// Always 1 for the finite-horizon games handled here.
    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn infostates(&self, player: PlayerId) -> &[Infostate] {
        &self.infostates[player]
    }

    pub fn infostate(&self, player: PlayerId, id: usize) -> &Infostate {
        &self.infostates[player][id]
    }

    pub fn lookup(&self, player: PlayerId, key: &str) -> Option<usize> {
        self.index.get(player)?.get(key).copied()
    }

    pub fn num_decision_nodes(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Decision { .. }))
            .count()
    }

    pub fn max_depth(&self, player: PlayerId) -> usize {
        self.infostates[player]
            .iter()
            .map(|i| i.depth)
            .max()
            .unwrap_or(0)
    }

    pub fn decision_points(&self) -> DecisionPointCount {
        count_decision_points(self)
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Converts back to builder nodes with the current ids, so that transforms can rebuild.
    pub fn to_raw(&self) -> Vec<RawNode> {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Chance { outcomes } => RawNode::Chance(outcomes.clone()),
                Node::Decision {
                    player,
                    infostate,
                    children,
                } => {
                    let info = &self.infostates[*player][*infostate];
                    RawNode::Decision {
                        player: *player,
                        key: info.key.clone(),
                        actions: info
                            .actions
                            .iter()
                            .cloned()
                            .zip(children.iter().copied())
                            .collect(),
                    }
                }
                Node::Terminal { payoffs } => RawNode::Terminal(payoffs.clone()),
            })
            .collect()
    }

    /// Whether every terminal pays all players the same amount.
    pub fn is_common_payoff(&self) -> bool {
        self.nodes.iter().all(|n| match n {
            Node::Terminal { payoffs } => payoffs.iter().all(|&v| (v - payoffs[0]).abs() <= 1e-12),
            _ => true,
        })
    }

    /// Whether every terminal's payoffs sum to the same constant.
    pub fn constant_sum(&self) -> Option<f64> {
        let mut total = None;
        for n in &self.nodes {
            if let Node::Terminal { payoffs } = n {
                let s: f64 = payoffs.iter().sum();
                match total {
                    None => total = Some(s),
                    Some(t) if (t - s).abs() > 1e-9 => return None,
                    _ => {}
                }
            }
        }
        total
    }

    /// Each infostate's nodes must share the owner's last own (infostate, action);
    /// also fills in infostate depths.
    fn check_perfect_recall(&mut self) -> Result<()> {
        let n = self.players;
        // last[node * n + p] = (infostate, action) of p's most recent decision above node
        let mut last: Vec<Option<(usize, usize)>> = vec![None; self.nodes.len() * n];
        let mut seen: Vec<Vec<Option<Option<(usize, usize)>>>> = self
            .infostates
            .iter()
            .map(|v| vec![None; v.len()])
            .collect();
        for h in 0..self.nodes.len() {
            match &self.nodes[h] {
                Node::Chance { outcomes } => {
                    for &(_, c) in outcomes {
                        for p in 0..n {
                            last[c * n + p] = last[h * n + p];
                        }
                    }
                }
                Node::Decision {
                    player,
                    infostate,
                    children,
                } => {
                    let here = last[h * n + player];
                    match seen[*player][*infostate] {
                        None => seen[*player][*infostate] = Some(here),
                        Some(prev) if prev != here => {
                            return Err(Error::InvalidGame(format!(
                                "infostate {:?} of player {player} violates perfect recall",
                                self.infostates[*player][*infostate].key
                            )));
                        }
                        _ => {}
                    }
                    for (a, &c) in children.iter().enumerate() {
                        for p in 0..n {
                            last[c * n + p] = if p == *player {
                                Some((*infostate, a))
                            } else {
                                last[h * n + p]
                            };
                        }
                    }
                }
                Node::Terminal { .. } => {}
            }
        }
        // Depths follow parents: infostates are discovered in preorder, so parents come first.
        for p in 0..n {
            for s in 0..self.infostates[p].len() {
                let depth = match seen[p][s].flatten() {
                    Some((parent, _)) => self.infostates[p][parent].depth + 1,
                    None => 0,
                };
                self.infostates[p][s].depth = depth;
            }
        }
        Ok(())
    }

    pub(crate) fn map_terminals(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> GameTree {
        let mut out = self.clone();
        for node in &mut out.nodes {
            if let Node::Terminal { payoffs } = node {
                *payoffs = f(payoffs);
            }
        }
        out
    }
}

/// Number of distinct (player, infostate key) pairs.
pub fn count_decision_points(tree: &GameTree) -> DecisionPointCount {
    let per_player: Vec<usize> = tree.infostates.iter().map(Vec::len).collect();
    let total = per_player.iter().sum();
    DecisionPointCount { per_player, total }
}
