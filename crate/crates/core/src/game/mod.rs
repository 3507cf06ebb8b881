//! Extensive-form game representation and exact tree computations.

mod policy;
mod transform;
mod tree;
mod values;

pub use policy::{JointPolicy, KeyedPolicy, Policy, PolicyFile, SIMPLEX_TOL};
pub use transform::{apply_team_rewards, fix_player_policy, validate_teams, Teams};
pub use tree::{
    count_decision_points, DecisionPointCount, GameTree, Infostate, Node, NodeId, PlayerId,
    RawNode, TreeBuilder, CHANCE_SUM_TOL,
};
pub use values::{
    best_response, best_response_with, expected_values, q_values, q_values_all, BestResponse,
    Traversal,
};
