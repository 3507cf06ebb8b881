use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::tree::{GameTree, PlayerId};
use crate::error::{Error, Result};

/// Tolerance for a probability vector summing to one.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// One player's behavioral policy, indexed by infostate id.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    pub probs: Vec<Vec<f64>>,
}

impl Policy {
    pub fn uniform(tree: &GameTree, player: PlayerId) -> Self {
        let probs = tree
            .infostates(player)
            .iter()
            .map(|info| {
                let n = info.num_actions();
                vec![1.0 / n as f64; n]
            })
            .collect();
        Self { probs }
    }

    /// Pure policy playing `actions[s]` at infostate `s`.
    pub fn deterministic(tree: &GameTree, player: PlayerId, actions: &[usize]) -> Self {
        let probs = tree
            .infostates(player)
            .iter()
            .zip(actions)
            .map(|(info, &a)| {
                let mut v = vec![0.0; info.num_actions()];
                v[a] = 1.0;
                v
            })
            .collect();
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// A product joint policy: one behavioral policy per player.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPolicy {
    pub players: Vec<Policy>,
}

/// Keyed representation used for policy files: per player, infostate key -> probabilities.
pub type KeyedPolicy = Vec<BTreeMap<String, Vec<f64>>>;

impl JointPolicy {
    pub fn uniform(tree: &GameTree) -> Self {
        Self {
            players: (0..tree.num_players())
                .map(|p| Policy::uniform(tree, p))
                .collect(),
        }
    }

    pub fn probs(&self, player: PlayerId, infostate: usize) -> &[f64] {
        &self.players[player].probs[infostate]
    }

    pub fn set(&mut self, player: PlayerId, infostate: usize, probs: Vec<f64>) {
        self.players[player].probs[infostate] = probs;
    }

    /// Replaces one player's policy.
    pub fn with_player(&self, player: PlayerId, policy: Policy) -> Self {
        let mut out = self.clone();
        out.players[player] = policy;
        out
    }

    /// Checks the shape against the tree, naming the first missing infostate.
    pub fn check_shape(&self, tree: &GameTree) -> Result<()> {
        if self.players.len() != tree.num_players() {
            return Err(Error::Config(format!(
                "policy covers {} players, game has {}",
                self.players.len(),
                tree.num_players()
            )));
        }
        for p in 0..tree.num_players() {
            let infos = tree.infostates(p);
            let probs = &self.players[p].probs;
            if probs.len() < infos.len() {
                return Err(Error::MissingInfostate {
                    player: p,
                    key: infos[probs.len()].key.clone(),
                });
            }
            if probs.len() > infos.len() {
                return Err(Error::Config(format!(
                    "policy for player {p} has {} entries, game has {} infostates",
                    probs.len(),
                    infos.len()
                )));
            }
            for (info, v) in infos.iter().zip(probs) {
                if v.len() != info.num_actions() {
                    return Err(Error::Config(format!(
                        "infostate {:?} of player {p} needs {} probabilities, got {}",
                        info.key,
                        info.num_actions(),
                        v.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Shape check plus nonnegativity and unit sums.
    pub fn validate(&self, tree: &GameTree) -> Result<()> {
        self.check_shape(tree)?;
        for p in 0..tree.num_players() {
            for (info, v) in tree.infostates(p).iter().zip(&self.players[p].probs) {
                let sum: f64 = v.iter().sum();
                if v.iter().any(|&x| !x.is_finite() || x < 0.0) || (sum - 1.0).abs() > SIMPLEX_TOL {
                    return Err(Error::Config(format!(
                        "infostate {:?} of player {p} is not a probability vector",
                        info.key
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_keyed(&self, tree: &GameTree) -> KeyedPolicy {
        (0..tree.num_players())
            .map(|p| {
                tree.infostates(p)
                    .iter()
                    .zip(&self.players[p].probs)
                    .map(|(info, v)| (info.key.clone(), v.clone()))
                    .collect()
            })
            .collect()
    }

    pub fn from_keyed(tree: &GameTree, keyed: &KeyedPolicy) -> Result<Self> {
        if keyed.len() != tree.num_players() {
            return Err(Error::Config(format!(
                "policy file covers {} players, game has {}",
                keyed.len(),
                tree.num_players()
            )));
        }
        let mut players = Vec::with_capacity(keyed.len());
        for (p, map) in keyed.iter().enumerate() {
            let mut probs = Vec::with_capacity(tree.infostates(p).len());
            for info in tree.infostates(p) {
                let v = map.get(&info.key).ok_or_else(|| Error::MissingInfostate {
                    player: p,
                    key: info.key.clone(),
                })?;
                probs.push(v.clone());
            }
            for key in map.keys() {
                if tree.lookup(p, key).is_none() {
                    return Err(Error::Config(format!(
                        "policy names unknown infostate {key:?} for player {p}"
                    )));
                }
            }
            players.push(Policy { probs });
        }
        let joint = Self { players };
        joint.validate(tree)?;
        Ok(joint)
    }

    pub fn to_json(&self, tree: &GameTree) -> String {
        let file = PolicyFile {
            game: tree.name().to_string(),
            players: self.to_keyed(tree),
        };
        serde_json::to_string_pretty(&file).expect("policy serialization cannot fail")
    }

    pub fn from_json(tree: &GameTree, text: &str) -> Result<Self> {
        let file: PolicyFile = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("bad policy file: {e}")))?;
        Self::from_keyed(tree, &file.players)
    }
}

/// On-disk policy format.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PolicyFile {
    #[serde(default)]
    pub game: String,
    pub players: KeyedPolicy,
}
