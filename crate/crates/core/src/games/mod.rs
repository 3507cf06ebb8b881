//! Built-in games, their derived variants, and the game-file format.

mod file;
mod goofspiel;
mod kuhn;
mod leduc;
mod optimum;
mod tiny_hanabi;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub use file::{parse_game_file, write_game_file};
pub use goofspiel::{goofspiel, GoofspielParams, PointOrder, Returns};
pub use kuhn::kuhn_poker;
pub use leduc::leduc_poker;
pub use optimum::{exhaustive_optimum, MAX_ENUMERATED_POLICIES};
pub use tiny_hanabi::{tiny_hanabi, TinyHanabiPayoff};

use crate::error::{Error, Result};
use crate::game::{apply_team_rewards, fix_player_policy, GameTree, Policy, Teams, TreeBuilder};

/// A parameter value in a game spec string.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Str(String),
    List(Vec<f64>),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v:?}"),
            ParamValue::Str(s) => f.write_str(s),
            ParamValue::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                f.write_str(&parts.join(";"))
            }
        }
    }
}

impl ParamValue {
    fn parse(raw: &str) -> Self {
        let raw = raw.trim();
        if raw.contains(';') {
            let items: std::result::Result<Vec<f64>, _> = raw
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<f64>())
                .collect();
            if let Ok(v) = items {
                return ParamValue::List(v);
            }
        }
        if let Ok(v) = raw.parse::<i64>() {
            return ParamValue::Int(v);
        }
        if let Ok(v) = raw.parse::<f64>() {
            return ParamValue::Float(v);
        }
        ParamValue::Str(raw.trim_matches('"').to_string())
    }
}

/// A game name plus parameters, written `name(key=value,...)`.
///
/// Sequence parameters use `;` between entries, e.g. `payoff=1;0;0;1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSpec {
    pub name: String,
    pub params: BTreeMap<String, ParamValue>,
}

impl GameSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: ParamValue) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn usize_param(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(ParamValue::Int(v)) if *v >= 0 => Ok(*v as usize),
            Some(other) => Err(Error::Config(format!(
                "{}: parameter {key} must be a nonnegative integer, got {other}",
                self.name
            ))),
        }
    }

    fn str_param(&self, key: &str, default: &str) -> Result<String> {
        match self.params.get(key) {
            None => Ok(default.to_string()),
            Some(ParamValue::Str(s)) => Ok(s.clone()),
            Some(other) => Err(Error::Config(format!(
                "{}: parameter {key} must be a string, got {other}",
                self.name
            ))),
        }
    }

    fn list_param(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.params.get(key) {
            None => Ok(None),
            Some(ParamValue::List(v)) => Ok(Some(v.clone())),
            Some(ParamValue::Int(v)) => Ok(Some(vec![*v as f64])),
            Some(ParamValue::Float(v)) => Ok(Some(vec![*v])),
            Some(other) => Err(Error::Config(format!(
                "{}: parameter {key} must be a ;-separated list of numbers, got {other}",
                self.name
            ))),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!(
                "{}: unknown parameter {k:?} (allowed: {})",
                self.name,
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }
}

impl FromStr for GameSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("malformed game spec {s:?}"));
        let (name, rest) = match s.find('(') {
            None => (s, None),
            Some(i) => {
                let inner = s[i + 1..].strip_suffix(')').ok_or_else(bad)?;
                (&s[..i], Some(inner))
            }
        };
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(bad());
        }
        let mut spec = GameSpec::new(name);
        if let Some(inner) = rest {
            for part in inner.split(',').filter(|p| !p.trim().is_empty()) {
                let (k, v) = part.split_once('=').ok_or_else(bad)?;
                let k = k.trim();
                if k.is_empty() || spec.params.contains_key(k) {
                    return Err(bad());
                }
                spec.params.insert(k.to_string(), ParamValue::parse(v));
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            let parts: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

/// Broad game category; decides the default evaluation measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    SingleAgent,
    Cooperative,
    Competitive,
    /// Mixed cooperative-competitive: teams share rewards and compete with each other.
    Mixed,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::SingleAgent => "single-agent",
            Category::Cooperative => "cooperative",
            Category::Competitive => "competitive",
            Category::Mixed => "mixed",
        })
    }
}

/// A constructed game together with what the harness needs to evaluate it.
#[derive(Clone, Debug)]
pub struct BuiltGame {
    pub tree: GameTree,
    pub category: Category,
    /// Team partition for mixed games.
    pub teams: Option<Teams>,
}

/// One row of [`list_games`].
#[derive(Clone, Debug)]
pub struct GameInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub description: &'static str,
}

const REGISTRY: &[GameInfo] = &[
    GameInfo {
        name: "kuhn_poker",
        params: "players=2|3",
        description: "Kuhn poker with N+1 cards, ante 1, single bet",
    },
    GameInfo {
        name: "leduc_poker",
        params: "players=2",
        description: "Leduc poker, 6 cards, two rounds, raise cap 2",
    },
    GameInfo {
        name: "goofspiel",
        params:
            "players, cards, point_order=descending|ascending, returns=win_loss|point_difference",
        description: "imperfect-information Goofspiel with sequentialized bids",
    },
    GameInfo {
        name: "tiny_hanabi",
        params: "num_chance, num_actions, payoff=v;v;... (indexed c0,c1,a0,a1)",
        description: "two-step cooperative signaling game with a shared payoff",
    },
    GameInfo {
        name: "tiny_hanabi_game_a",
        params: "",
        description: "tiny Hanabi, 2 cards, 3 actions, shipped default payoff",
    },
    GameInfo {
        name: "tiny_hanabi_game_b",
        params: "",
        description: "tiny Hanabi, 2 cards, 2 actions, shipped default payoff",
    },
    GameInfo {
        name: "tiny_hanabi_game_c",
        params: "",
        description: "tiny Hanabi, 2 cards, 2 actions, shipped default payoff",
    },
    GameInfo {
        name: "single_agent_kuhn_a",
        params: "",
        description: "2p Kuhn poker as player 0 against a uniform opponent",
    },
    GameInfo {
        name: "single_agent_kuhn_b",
        params: "",
        description: "2p Kuhn poker as player 1 against a uniform opponent",
    },
    GameInfo {
        name: "single_agent_goofspiel",
        params: "cards=3, point_order, returns",
        description: "2p Goofspiel as player 0 against a uniform opponent",
    },
    GameInfo {
        name: "mcc_kuhn_a",
        params: "",
        description: "3p Kuhn poker, players 0 and 1 share rewards against player 2",
    },
    GameInfo {
        name: "mcc_kuhn_b",
        params: "",
        description: "3p Kuhn poker, players 0 and 2 share rewards against player 1",
    },
    GameInfo {
        name: "mcc_goofspiel",
        params: "cards=3, point_order, returns",
        description: "3p Goofspiel, players 0 and 1 share rewards against player 2",
    },
    GameInfo {
        name: "matching_pennies",
        params: "",
        description: "matching pennies as a two-node sequential game with hidden first move",
    },
    GameInfo {
        name: "file",
        params: "path=<game file>",
        description: "a game read from a plain-text game file",
    },
];

/// Names, parameters and short descriptions of every constructible game.
pub fn list_games() -> &'static [GameInfo] {
    REGISTRY
}

fn goofspiel_params(spec: &GameSpec, players: usize) -> Result<GoofspielParams> {
    Ok(GoofspielParams {
        players,
        cards: spec.usize_param("cards", 3)?,
        point_order: spec.str_param("point_order", "descending")?.parse()?,
        returns: spec.str_param("returns", "win_loss")?.parse()?,
    })
}

fn single_agent(tree: &GameTree, background: usize) -> Result<GameTree> {
    let uniform = Policy::uniform(tree, background);
    fix_player_policy(tree, background, &uniform, true)
}

fn mixed(tree: &GameTree, teams: Teams) -> Result<BuiltGame> {
    Ok(BuiltGame {
        tree: apply_team_rewards(tree, &teams)?,
        category: Category::Mixed,
        teams: Some(teams),
    })
}

fn matching_pennies() -> Result<GameTree> {
    let mut b = TreeBuilder::new();
    let mut second = Vec::new();
    for a in 0..2 {
        let acts = (0..2)
            .map(|c| {
                let u = if a == c { 1.0 } else { -1.0 };
                (["H", "T"][c].to_string(), b.terminal(vec![u, -u]))
            })
            .collect();
        second.push(b.decision(1, "p1", acts));
    }
    let root = b.decision(
        0,
        "p0",
        vec![("H".into(), second[0]), ("T".into(), second[1])],
    );
    b.build("matching_pennies", 2, root)
}

/// Builds a game from its spec.
pub fn make_game(spec: &GameSpec) -> Result<BuiltGame> {
    let plain = |tree: GameTree, category| BuiltGame {
        tree,
        category,
        teams: None,
    };
    let built = match spec.name.as_str() {
        "kuhn_poker" => {
            spec.check_keys(&["players"])?;
            plain(
                kuhn_poker(spec.usize_param("players", 2)?)?,
                Category::Competitive,
            )
        }
        "leduc_poker" => {
            spec.check_keys(&["players"])?;
            plain(
                leduc_poker(spec.usize_param("players", 2)?)?,
                Category::Competitive,
            )
        }
        "goofspiel" => {
            spec.check_keys(&["players", "cards", "point_order", "returns"])?;
            let params = goofspiel_params(spec, spec.usize_param("players", 2)?)?;
            plain(goofspiel(params)?, Category::Competitive)
        }
        "tiny_hanabi" => {
            spec.check_keys(&["num_chance", "num_actions", "payoff"])?;
            let c = spec.usize_param("num_chance", 2)?;
            let a = spec.usize_param("num_actions", 3)?;
            let payoff = match spec.list_param("payoff")? {
                Some(v) => TinyHanabiPayoff::new(c, a, v)?,
                None if (c, a) == (2, 3) => TinyHanabiPayoff::default_a(),
                None => {
                    return Err(Error::Config(format!(
                        "tiny_hanabi(num_chance={c},num_actions={a}) needs a payoff"
                    )))
                }
            };
            plain(tiny_hanabi("tiny_hanabi", &payoff)?, Category::Cooperative)
        }
        "tiny_hanabi_game_a" | "tiny_hanabi_game_b" | "tiny_hanabi_game_c" => {
            spec.check_keys(&[])?;
            let payoff = match spec.name.as_str() {
                "tiny_hanabi_game_a" => TinyHanabiPayoff::default_a(),
                "tiny_hanabi_game_b" => TinyHanabiPayoff::default_b(),
                _ => TinyHanabiPayoff::default_c(),
            };
            plain(
                tiny_hanabi(spec.name.clone(), &payoff)?,
                Category::Cooperative,
            )
        }
        "single_agent_kuhn_a" | "single_agent_kuhn_b" => {
            spec.check_keys(&[])?;
            let background = if spec.name.ends_with('a') { 1 } else { 0 };
            plain(
                single_agent(&kuhn_poker(2)?, background)?,
                Category::SingleAgent,
            )
        }
        "single_agent_goofspiel" => {
            spec.check_keys(&["cards", "point_order", "returns"])?;
            let tree = goofspiel(goofspiel_params(spec, 2)?)?;
            plain(single_agent(&tree, 1)?, Category::SingleAgent)
        }
        "mcc_kuhn_a" => {
            spec.check_keys(&[])?;
            mixed(&kuhn_poker(3)?, vec![vec![0, 1], vec![2]])?
        }
        "mcc_kuhn_b" => {
            spec.check_keys(&[])?;
            mixed(&kuhn_poker(3)?, vec![vec![0, 2], vec![1]])?
        }
        "mcc_goofspiel" => {
            spec.check_keys(&["cards", "point_order", "returns"])?;
            mixed(
                &goofspiel(goofspiel_params(spec, 3)?)?,
                vec![vec![0, 1], vec![2]],
            )?
        }
        "matching_pennies" => {
            spec.check_keys(&[])?;
            plain(matching_pennies()?, Category::Competitive)
        }
        "file" => {
            spec.check_keys(&["path"])?;
            let path = spec.str_param("path", "")?;
            if path.is_empty() {
                return Err(Error::Config("file game needs path=<file>".into()));
            }
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("cannot read game file {path}: {e}")))?;
            let tree = parse_game_file(&text)?;
            let category = if tree.num_players() == 1 {
                Category::SingleAgent
            } else if tree.is_common_payoff() {
                Category::Cooperative
            } else {
                Category::Competitive
            };
            return Ok(BuiltGame {
                tree,
                category,
                teams: None,
            });
        }
        other => {
            return Err(Error::Config(format!(
                "unknown game {other:?}; run list-games for the available names"
            )))
        }
    };
    let mut built = built;
    built.tree.set_name(spec.to_string());
    Ok(built)
}

/// Builds a game directly from a spec string such as `kuhn_poker(players=3)`.
pub fn make_builtin(spec: &str) -> Result<BuiltGame> {
    make_game(&spec.parse()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        let s: GameSpec = "kuhn_poker(players=3)".parse().unwrap();
        assert_eq!(s.name, "kuhn_poker");
        assert_eq!(s.params["players"], ParamValue::Int(3));
        assert_eq!(s.to_string(), "kuhn_poker(players=3)");

        let s: GameSpec = "tiny_hanabi(num_chance=1, num_actions=2, payoff=1;0;0.5;2)"
            .parse()
            .unwrap();
        assert_eq!(
            s.params["payoff"],
            ParamValue::List(vec![1.0, 0.0, 0.5, 2.0])
        );

        assert_eq!("leduc_poker".parse::<GameSpec>().unwrap().params.len(), 0);
        assert!("kuhn_poker(players=3".parse::<GameSpec>().is_err());
        assert!("kuhn poker".parse::<GameSpec>().is_err());
        assert!("kuhn_poker(players)".parse::<GameSpec>().is_err());
    }

    #[test]
    fn table_counts() {
        let count = |s: &str| make_builtin(s).unwrap().tree.decision_points().total;
        assert_eq!(count("single_agent_kuhn_a"), 6);
        assert_eq!(count("single_agent_kuhn_b"), 6);
        assert_eq!(count("tiny_hanabi_game_a"), 8);
        assert_eq!(count("tiny_hanabi_game_b"), 6);
        assert_eq!(count("tiny_hanabi_game_c"), 6);
        assert_eq!(count("kuhn_poker(players=3)"), 48);
        assert_eq!(count("mcc_kuhn_a"), 48);
        assert_eq!(count("mcc_kuhn_b"), 48);
        assert_eq!(count("single_agent_goofspiel"), 8);
        assert_eq!(count("mcc_goofspiel"), 30);
    }

    #[test]
    fn errors() {
        assert!(make_builtin("chess").is_err());
        assert!(make_builtin("kuhn_poker(players=5)").is_err());
        assert!(make_builtin("kuhn_poker(cards=5)").is_err());
        assert!(make_builtin("tiny_hanabi(num_chance=2,num_actions=2)").is_err());
        assert!(make_builtin("tiny_hanabi(num_chance=1,num_actions=2,payoff=1;2;3)").is_err());
        assert!(make_builtin("goofspiel(point_order=sideways)").is_err());
    }

    #[test]
    fn variant_shapes() {
        let b = make_builtin("single_agent_kuhn_b").unwrap();
        assert_eq!(b.tree.num_players(), 1);
        assert_eq!(b.category, Category::SingleAgent);
        let m = make_builtin("mcc_kuhn_b").unwrap();
        assert_eq!(m.teams, Some(vec![vec![0, 2], vec![1]]));
        assert_eq!(m.tree.num_players(), 3);
    }

    #[test]
    fn every_listed_game_builds() {
        for info in list_games() {
            if info.name == "file" {
                continue;
            }
            make_builtin(info.name).unwrap_or_else(|e| panic!("{}: {e}", info.name));
        }
    }
}
