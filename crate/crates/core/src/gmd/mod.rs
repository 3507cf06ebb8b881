//! Generalized mirror descent: every decision point moves to the maximizer of its action
//! values minus a weighted sum of Bregman divergences to its last M policies (and
//! optionally to a fixed magnet policy).

mod solver;

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use solver::{
    assemble_kkt, newton_lambda, project, raw_policy, solve_dual, DualSolution, NewtonOptions,
    Start,
};

use crate::bregman::ConvexFamily;
use crate::error::{Error, Result};
use crate::game::{GameTree, JointPolicy, Policy, Traversal};

/// How each dual solve picks its first iterate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaInit {
    /// Deterministic start, warm-started from the previous solve at the same decision point.
    Deterministic,
    /// Uniformly random point of the bracket, reproducible from the seed.
    Random { seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GmdConfig {
    pub family: ConvexFamily,
    /// Number of historical policies M.
    pub history: usize,
    /// Weights α_τ of π_{k−τ}, τ = 0..M.
    pub alpha: Vec<f64>,
    pub magnet: bool,
    pub alpha_magnet: f64,
    /// Probability floor ε of the projection.
    pub epsilon: f64,
    /// Lower bound ι on every weight.
    pub iota: f64,
    /// Newton steps per solve (C).
    pub newton_iters: usize,
    pub newton_tol: f64,
    pub lambda_init: LambdaInit,
}

impl Default for GmdConfig {
    fn default() -> Self {
        Self::new(ConvexFamily::Entropy, 1)
    }
}

impl GmdConfig {
    /// Uniform weights 1/M, magnet enabled with weight 1/M.
    pub fn new(family: ConvexFamily, history: usize) -> Self {
        let w = 1.0 / history.max(1) as f64;
        Self {
            family,
            history,
            alpha: vec![w; history],
            magnet: true,
            alpha_magnet: w,
            epsilon: 1e-10,
            iota: 1e-6,
            newton_iters: 50,
            newton_tol: 1e-8,
            lambda_init: LambdaInit::Deterministic,
        }
    }

    /// Dimension of the weight vector seen by a meta-controller.
    pub fn alpha_dim(&self) -> usize {
        self.history + usize::from(self.magnet)
    }

    /// Weights ordered (magnet, τ = 0..M) when the magnet is on, else (τ = 0..M).
    pub fn alpha_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.alpha_dim());
        if self.magnet {
            v.push(self.alpha_magnet);
        }
        v.extend_from_slice(&self.alpha);
        v
    }

    pub fn set_alpha_vector(&mut self, v: &[f64]) {
        assert_eq!(v.len(), self.alpha_dim(), "weight vector dimension");
        let (m, rest) = if self.magnet {
            (v[0], &v[1..])
        } else {
            (self.alpha_magnet, v)
        };
        self.alpha_magnet = m;
        self.alpha = rest.to_vec();
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.history == 0 {
            return bad("history length M must be at least 1".into());
        }
        if self.alpha.len() != self.history {
            return bad(format!(
                "{} weights for history length {}",
                self.alpha.len(),
                self.history
            ));
        }
        if !(self.iota > 0.0 && self.iota < 1.0) {
            return bad(format!("iota must be in (0, 1), got {}", self.iota));
        }
        if self
            .alpha_vector()
            .iter()
            .any(|&w| !(w >= self.iota && w <= 1.0))
        {
            return bad(format!(
                "weights {:?} must lie in [iota, 1]",
                self.alpha_vector()
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return bad(format!("epsilon must be in (0, 0.5), got {}", self.epsilon));
        }
        if self.newton_iters == 0 || !(self.newton_tol > 0.0) {
            return bad("newton_iters and newton_tol must be positive".into());
        }
        Ok(())
    }

    /// Weights used at iteration k: during the first M iterations every available term
    /// (including the magnet) gets 1/k.
    pub fn weights_at(&self, k: usize) -> (Vec<f64>, f64) {
        if k <= self.history {
            let w = 1.0 / k as f64;
            (vec![w; k], w)
        } else {
            (self.alpha.clone(), self.alpha_magnet)
        }
    }
}

/// Per-decision-point state: recent policies (newest first), the magnet, and the last λ.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionState {
    pub history: VecDeque<Vec<f64>>,
    pub magnet: Vec<f64>,
    pub lambda: Option<f64>,
}

impl DecisionState {
    pub fn new(initial: Vec<f64>) -> Self {
        Self {
            history: VecDeque::from([initial.clone()]),
            magnet: initial,
            lambda: None,
        }
    }

    pub fn current(&self) -> &[f64] {
        &self.history[0]
    }
}

/// One proximal step at a decision point; the new policy is pushed onto the history.
///
/// `alpha` weights the newest `alpha.len()` history entries; `magnet_weight` is used only
/// when the config enables the magnet.
pub fn gmd_step(
    state: &mut DecisionState,
    q: &[f64],
    alpha: &[f64],
    magnet_weight: f64,
    config: &GmdConfig,
    start: Start,
) -> Result<Vec<f64>> {
    let used = alpha.len().min(state.history.len());
    let history: Vec<&[f64]> = state.history.iter().take(used).map(Vec::as_slice).collect();
    let magnet = config
        .magnet
        .then_some((state.magnet.as_slice(), magnet_weight));
    let (a, b) = assemble_kkt(q, &history, &alpha[..used], magnet, &config.family)?;
    let opts = NewtonOptions {
        max_iters: config.newton_iters,
        tol: config.newton_tol,
        epsilon: config.epsilon,
        start,
    };
    let sol = solve_dual(&a, b, &config.family, &opts)?;
    let next = project(&sol.policy, config.epsilon);
    state.lambda = Some(sol.lambda);
    state.history.push_front(next.clone());
    state.history.truncate(config.history);
    Ok(next)
}

/// Histories of every decision point plus the iteration counter k (1-based: the next update
/// is the k-th).
#[derive(Clone, Debug, PartialEq)]
pub struct GmdState {
    pub players: Vec<Vec<DecisionState>>,
    pub k: usize,
}

impl GmdState {
    /// Starts from `initial`, which also becomes the magnet.
    pub fn new(tree: &GameTree, initial: &JointPolicy) -> Result<Self> {
        initial.validate(tree)?;
        let players = initial
            .players
            .iter()
            .map(|p| p.probs.iter().cloned().map(DecisionState::new).collect())
            .collect();
        Ok(Self { players, k: 1 })
    }

    pub fn uniform(tree: &GameTree) -> Self {
        Self::new(tree, &JointPolicy::uniform(tree)).expect("uniform policy is valid")
    }

    pub fn current(&self) -> JointPolicy {
        JointPolicy {
            players: self
                .players
                .iter()
                .map(|p| Policy {
                    probs: p.iter().map(|s| s.current().to_vec()).collect(),
                })
                .collect(),
        }
    }
}

fn start_for(
    config: &GmdConfig,
    state: &DecisionState,
    player: usize,
    info: usize,
    k: usize,
) -> Start {
    match config.lambda_init {
        LambdaInit::Deterministic => state.lambda.map_or(Start::Default, Start::Warm),
        LambdaInit::Random { seed } => {
            let stream = ((player as u64) << 40) ^ ((info as u64) << 20) ^ k as u64;
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            Start::Fraction(rng.random::<f64>())
        }
    }
}

/// Advances every decision point once, all against the same pre-update joint policy.
pub fn gmd_update(
    tree: &GameTree,
    state: &mut GmdState,
    config: &GmdConfig,
) -> Result<JointPolicy> {
    let joint = state.current();
    let traversal = Traversal::new(tree, &joint)?;
    let (alpha, magnet_weight) = config.weights_at(state.k);
    let k = state.k;
    for (p, infos) in state.players.iter_mut().enumerate() {
        let q = traversal.q_values(tree, p);
        for (s, (entry, q)) in infos.iter_mut().zip(&q).enumerate() {
            let start = start_for(config, entry, p, s, k);
            gmd_step(entry, q, &alpha, magnet_weight, config, start)?;
        }
    }
    state.k += 1;
    Ok(state.current())
}
