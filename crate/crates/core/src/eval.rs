//! Evaluation measures: optimality gap, NashConv, CCE gap, social welfare, and team
//! deviations for mixed cooperative-competitive games.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{mmd_update_players, MmdConfig, MmdState, MmdVariant};
use crate::error::{Error, Result};
use crate::game::{
    best_response_with, validate_teams, GameTree, JointPolicy, PlayerId, Teams, Traversal,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MeasureKind {
    OptGap,
    NashConv,
    CceGap,
    SocialWelfare,
}

impl MeasureKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::OptGap => "opt_gap",
            Self::NashConv => "nash_conv",
            Self::CceGap => "cce_gap",
            Self::SocialWelfare => "social_welfare",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "opt_gap" | "optgap" => Ok(Self::OptGap),
            "nash_conv" | "nashconv" => Ok(Self::NashConv),
            "cce_gap" | "ccegap" => Ok(Self::CceGap),
            "social_welfare" | "sw" => Ok(Self::SocialWelfare),
            _ => Err(Error::Config(format!(
                "unknown measure {s:?} (expected opt_gap, nash_conv, cce_gap, social_welfare)"
            ))),
        }
    }
}

impl TryFrom<String> for MeasureKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MeasureKind> for String {
    fn from(m: MeasureKind) -> String {
        m.name().to_string()
    }
}

/// A fully specified measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    pub kind: MeasureKind,
    /// Optimal value V(ν, π*) for the optimality gap.
    pub reference_value: Option<f64>,
    /// Team partition; NashConv then measures team deviations.
    pub teams: Option<Teams>,
    pub team_br_updates: usize,
    pub team_br_config: MmdConfig,
}

impl Measure {
    pub fn new(kind: MeasureKind) -> Self {
        Self {
            kind,
            reference_value: None,
            teams: None,
            team_br_updates: 100,
            team_br_config: MmdConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == MeasureKind::OptGap && self.reference_value.is_none() {
            return Err(Error::Config("opt_gap needs a reference value".into()));
        }
        if self.team_br_updates == 0 {
            return Err(Error::Config("team_br_updates must be positive".into()));
        }
        Ok(())
    }

    /// The measure's value on `joint`.
    pub fn evaluate(&self, tree: &GameTree, joint: &JointPolicy) -> Result<f64> {
        match self.kind {
            MeasureKind::OptGap => {
                let v = self
                    .reference_value
                    .ok_or_else(|| Error::Config("opt_gap needs a reference value".into()))?;
                opt_gap(tree, joint, v)
            }
            MeasureKind::NashConv | MeasureKind::CceGap => match &self.teams {
                Some(teams) => mcc_nash_conv_with(
                    tree,
                    joint,
                    teams,
                    self.team_br_updates,
                    &self.team_br_config,
                ),
                None if self.kind == MeasureKind::NashConv => nash_conv(tree, joint),
                None => cce_gap(tree, joint),
            },
            MeasureKind::SocialWelfare => social_welfare(tree, joint),
        }
    }

    /// The value as a quantity to minimize (social welfare is negated).
    pub fn loss(&self, tree: &GameTree, joint: &JointPolicy) -> Result<f64> {
        let v = self.evaluate(tree, joint)?;
        Ok(if self.kind == MeasureKind::SocialWelfare {
            -v
        } else {
            v
        })
    }
}

/// V(ν, π*) − V(ν, π), with V the mean of the players' values (all equal in common-payoff
/// games).
pub fn opt_gap(tree: &GameTree, joint: &JointPolicy, v_star: f64) -> Result<f64> {
    let values = Traversal::new(tree, joint)?.root_values();
    Ok(v_star - values.iter().sum::<f64>() / values.len() as f64)
}

/// Σᵢ [Vᵢ(BRᵢ, π₋ᵢ) − Vᵢ(π)].
pub fn nash_conv(tree: &GameTree, joint: &JointPolicy) -> Result<f64> {
    let t = Traversal::new(tree, joint)?;
    let values = t.root_values();
    Ok((0..tree.num_players())
        .map(|p| best_response_with(tree, joint, p, &t).value - values[p])
        .sum())
}

/// Gap to a coarse correlated equilibrium. Every policy handled here is a product of
/// per-player policies, for which the correlated deviation benchmark is the best response,
/// so this coincides with [`nash_conv`].
pub fn cce_gap(tree: &GameTree, joint: &JointPolicy) -> Result<f64> {
    nash_conv(tree, joint)
}

/// Σᵢ Vᵢ(π).
pub fn social_welfare(tree: &GameTree, joint: &JointPolicy) -> Result<f64> {
    Ok(Traversal::new(tree, joint)?.root_values().iter().sum())
}

/// Mean value of the team's members.
pub fn team_value(values: &[f64], team: &[PlayerId]) -> f64 {
    team.iter().map(|&p| values[p]).sum::<f64>() / team.len() as f64
}

/// Result of an approximate team best response.
#[derive(Clone, Debug, PartialEq)]
pub struct TeamBestResponse {
    /// `joint` with the team's policies replaced by the response.
    pub joint: JointPolicy,
    pub value: f64,
    /// Team value before the first update and after each update.
    pub trace: Vec<f64>,
}

/// Approximates the team's best response by running entropic MMD on the team's decision
/// points only, starting from (and initially anchored at) the team's current policies.
pub fn team_best_response(
    tree: &GameTree,
    joint: &JointPolicy,
    team: &[PlayerId],
    n_updates: usize,
    config: &MmdConfig,
) -> Result<TeamBestResponse> {
    if team.is_empty() {
        return Err(Error::Config("empty team".into()));
    }
    if let Some(&p) = team.iter().find(|&&p| p >= tree.num_players()) {
        return Err(Error::Config(format!("team member {p} out of range")));
    }
    let mut state = MmdState::new(joint.clone());
    let mut trace = Vec::with_capacity(n_updates + 1);
    trace.push(team_value(
        &Traversal::new(tree, joint)?.root_values(),
        team,
    ));
    for _ in 0..n_updates {
        mmd_update_players(tree, &mut state, MmdVariant::Kl, config, team)?;
        let values = Traversal::new_unchecked(tree, &state.joint).root_values();
        trace.push(team_value(&values, team));
    }
    Ok(TeamBestResponse {
        value: *trace.last().expect("nonempty trace"),
        joint: state.joint,
        trace,
    })
}

/// NashConv over teams: exact best responses for singleton teams, the MMD team response
/// (100 updates, default parameters) otherwise.
pub fn mcc_nash_conv(tree: &GameTree, joint: &JointPolicy, teams: &[Vec<PlayerId>]) -> Result<f64> {
    mcc_nash_conv_with(tree, joint, teams, 100, &MmdConfig::default())
}

pub fn mcc_nash_conv_with(
    tree: &GameTree,
    joint: &JointPolicy,
    teams: &[Vec<PlayerId>],
    n_updates: usize,
    config: &MmdConfig,
) -> Result<f64> {
    validate_teams(teams, tree.num_players())?;
    let t = Traversal::new(tree, joint)?;
    let values = t.root_values();
    let mut total = 0.0;
    for team in teams {
        total += if let [p] = team[..] {
            best_response_with(tree, joint, p, &t).value - values[p]
        } else {
            team_best_response(tree, joint, team, n_updates, config)?.value
                - team_value(&values, team)
        };
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::make_builtin;

    #[test]
    fn measure_names_round_trip() {
        for k in [
            MeasureKind::OptGap,
            MeasureKind::NashConv,
            MeasureKind::CceGap,
            MeasureKind::SocialWelfare,
        ] {
            assert_eq!(k.name().parse::<MeasureKind>().unwrap(), k);
        }
        assert!("regret".parse::<MeasureKind>().is_err());
    }

    #[test]
    fn matching_pennies_values() {
        let tree = make_builtin("matching_pennies").unwrap().tree;
        let mut joint = JointPolicy::uniform(&tree);
        assert!(nash_conv(&tree, &joint).unwrap().abs() < 1e-12);
        joint.set(0, 0, vec![0.9, 0.1]);
        assert!((nash_conv(&tree, &joint).unwrap() - 0.8).abs() < 1e-12);
        assert!(social_welfare(&tree, &joint).unwrap().abs() < 1e-12);
    }

    #[test]
    fn opt_gap_needs_reference() {
        let m = Measure::new(MeasureKind::OptGap);
        assert!(m.validate().is_err());
        let tree = make_builtin("tiny_hanabi_game_b").unwrap().tree;
        assert!(m.evaluate(&tree, &JointPolicy::uniform(&tree)).is_err());
    }

    #[test]
    fn welfare_loss_is_negated() {
        let tree = make_builtin("tiny_hanabi_game_c").unwrap().tree;
        let joint = JointPolicy::uniform(&tree);
        let m = Measure::new(MeasureKind::SocialWelfare);
        let sw = m.evaluate(&tree, &joint).unwrap();
        assert_eq!(m.loss(&tree, &joint).unwrap(), -sw);
        let v = Traversal::new(&tree, &joint).unwrap().root_values();
        assert!((sw - 2.0 * v[0]).abs() < 1e-12);
    }

    #[test]
    fn zero_updates_return_the_start() {
        let tree = make_builtin("mcc_kuhn_a").unwrap().tree;
        let joint = JointPolicy::uniform(&tree);
        let br = team_best_response(&tree, &joint, &[0, 1], 0, &MmdConfig::default()).unwrap();
        assert_eq!(br.trace.len(), 1);
        assert_eq!(br.joint, joint);
    }
}
