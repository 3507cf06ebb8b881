use crate::game::{GameTree, JointPolicy, Policy, Traversal};

/// Cumulative regrets and average-policy weights for every decision point.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretState {
    /// `regrets[p][s][a]`
    pub regrets: Vec<Vec<Vec<f64>>>,
    /// `average[p][s][a]`: reach-weighted policy sums.
    pub average: Vec<Vec<Vec<f64>>>,
    /// Completed iterations.
    pub t: usize,
    /// CFR+: alternating updates, regrets floored at 0, linearly weighted averages.
    pub plus: bool,
}

impl RegretState {
    pub fn new(tree: &GameTree, plus: bool) -> Self {
        let zeros: Vec<Vec<Vec<f64>>> = (0..tree.num_players())
            .map(|p| {
                tree.infostates(p)
                    .iter()
                    .map(|i| vec![0.0; i.num_actions()])
                    .collect()
            })
            .collect();
        Self {
            regrets: zeros.clone(),
            average: zeros,
            t: 0,
            plus,
        }
    }

    /// Regret matching on the current cumulative regrets.
    pub fn current(&self) -> JointPolicy {
        JointPolicy {
            players: self
                .regrets
                .iter()
                .map(|infos| Policy {
                    probs: infos.iter().map(|r| regret_matching(r)).collect(),
                })
                .collect(),
        }
    }

    /// Normalized average policy; decision points never reached are uniform.
    pub fn average(&self) -> JointPolicy {
        JointPolicy {
            players: self
                .average
                .iter()
                .map(|infos| Policy {
                    probs: infos.iter().map(|w| normalize_or_uniform(w)).collect(),
                })
                .collect(),
        }
    }
}

fn normalize_or_uniform(w: &[f64]) -> Vec<f64> {
    let sum: f64 = w.iter().sum();
    if sum > 0.0 {
        w.iter().map(|x| x / sum).collect()
    } else {
        vec![1.0 / w.len() as f64; w.len()]
    }
}

fn regret_matching(r: &[f64]) -> Vec<f64> {
    let pos: Vec<f64> = r.iter().map(|x| x.max(0.0)).collect();
    normalize_or_uniform(&pos)
}

fn accumulate(
    state: &mut RegretState,
    tree: &GameTree,
    joint: &JointPolicy,
    p: usize,
    weight: f64,
) {
    let traversal = Traversal::new_unchecked(tree, joint);
    let q = traversal.q_values(tree, p);
    let reach = traversal.infostate_own_reach(tree, p);
    let plus = state.plus;
    for (s, qs) in q.iter().enumerate() {
        let sigma = &joint.players[p].probs[s];
        let v: f64 = sigma.iter().zip(qs).map(|(a, b)| a * b).sum();
        for (a, r) in state.regrets[p][s].iter_mut().enumerate() {
            *r += qs[a] - v;
            if plus {
                *r = r.max(0.0);
            }
        }
        for (w, &x) in state.average[p][s].iter_mut().zip(sigma) {
            *w += weight * reach[s] * x;
        }
    }
}

/// One CFR (simultaneous, uniform averaging) or CFR+ (alternating, floored regrets, linear
/// averaging) iteration. Returns the current and average joint policies.
pub fn cfr_iteration(tree: &GameTree, state: &mut RegretState) -> (JointPolicy, JointPolicy) {
    let t = state.t + 1;
    if state.plus {
        for p in 0..tree.num_players() {
            let sigma = state.current();
            accumulate(state, tree, &sigma, p, t as f64);
        }
    } else {
        let sigma = state.current();
        for p in 0..tree.num_players() {
            accumulate(state, tree, &sigma, p, 1.0);
        }
    }
    state.t = t;
    (state.current(), state.average())
}
