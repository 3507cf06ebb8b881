use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameTree, JointPolicy, PlayerId, Traversal};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MmdConfig {
    /// Pull toward the magnet ξ.
    pub xi: f64,
    /// Step size η.
    pub eta: f64,
    /// Magnet step size η̃; 0 keeps the magnet fixed.
    pub eta_tilde: f64,
    /// Division guard ζ of the Euclidean projection.
    pub zeta: f64,
}

impl Default for MmdConfig {
    fn default() -> Self {
        Self {
            xi: 1.0,
            eta: 0.1,
            eta_tilde: 0.05,
            zeta: 1e-10,
        }
    }
}

impl MmdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi >= 0.0 && self.eta > 0.0 && self.zeta > 0.0)
            || !(0.0..=1.0).contains(&self.eta_tilde)
        {
            return Err(Error::Config(format!("invalid MMD parameters {self:?}")));
        }
        Ok(())
    }
}

/// Euclidean step: π = (ξρ + π_k/η + Q − mean Q)/(ξ + 1/η), then clip at 0, add the guard ζ
/// to every entry and renormalize.
pub fn mmd_eu_step(q: &[f64], pi: &[f64], rho: &[f64], config: &MmdConfig) -> Vec<f64> {
    let mean = q.iter().sum::<f64>() / q.len() as f64;
    let inv_eta = 1.0 / config.eta;
    let denom = config.xi + inv_eta;
    let raw: Vec<f64> = q
        .iter()
        .zip(pi)
        .zip(rho)
        .map(|((&qa, &pa), &ra)| ((config.xi * ra + pa * inv_eta + qa - mean) / denom).max(0.0))
        .collect();
    let sum: f64 = raw.iter().map(|&x| x + config.zeta).sum();
    raw.iter().map(|&x| (x + config.zeta) / sum).collect()
}

/// Entropic step: π ∝ exp[(Q + ξ ln ρ + (1/η) ln π_k)/(ξ + 1/η)].
pub fn mmd_kl_step(q: &[f64], pi: &[f64], rho: &[f64], config: &MmdConfig) -> Vec<f64> {
    let inv_eta = 1.0 / config.eta;
    let denom = config.xi + inv_eta;
    let logits: Vec<f64> = q
        .iter()
        .zip(pi)
        .zip(rho)
        .map(|((&qa, &pa), &ra)| (qa + config.xi * ra.ln() + inv_eta * pa.ln()) / denom)
        .collect();
    softmax(&logits)
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - top).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// ρ ← (1 − η̃)ρ + η̃π.
pub fn magnet_update(rho: &[f64], pi: &[f64], eta_tilde: f64) -> Vec<f64> {
    rho.iter()
        .zip(pi)
        .map(|(&r, &p)| (1.0 - eta_tilde) * r + eta_tilde * p)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmdVariant {
    Kl,
    Eu,
}

/// Current policies and magnets of an MMD run.
#[derive(Clone, Debug, PartialEq)]
pub struct MmdState {
    pub joint: JointPolicy,
    pub magnet: JointPolicy,
}

impl MmdState {
    /// Starts at `initial`, which is also the first magnet.
    pub fn new(initial: JointPolicy) -> Self {
        Self {
            magnet: initial.clone(),
            joint: initial,
        }
    }
}

/// One simultaneous MMD step for every player.
pub fn mmd_update(
    tree: &GameTree,
    state: &mut MmdState,
    variant: MmdVariant,
    config: &MmdConfig,
) -> Result<()> {
    let all: Vec<PlayerId> = (0..tree.num_players()).collect();
    mmd_update_players(tree, state, variant, config, &all)
}

/// One simultaneous MMD step for `players` only; everyone else keeps their policy.
pub fn mmd_update_players(
    tree: &GameTree,
    state: &mut MmdState,
    variant: MmdVariant,
    config: &MmdConfig,
    players: &[PlayerId],
) -> Result<()> {
    let traversal = Traversal::new(tree, &state.joint)?;
    let step = match variant {
        MmdVariant::Kl => mmd_kl_step,
        MmdVariant::Eu => mmd_eu_step,
    };
    for &p in players {
        let q = traversal.q_values(tree, p);
        let pol = &mut state.joint.players[p].probs;
        let mag = &mut state.magnet.players[p].probs;
        for ((pi, rho), q) in pol.iter_mut().zip(mag.iter_mut()).zip(&q) {
            let next = step(q, pi, rho, config);
            *rho = magnet_update(rho, &next, config.eta_tilde);
            *pi = next;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_hand_example() {
        let c = MmdConfig::default();
        let p = mmd_eu_step(&[1.0, 0.0], &[0.5, 0.5], &[0.5, 0.5], &c);
        assert!((p[0] - 6.0 / 11.0).abs() < 1e-9);
        assert!((p[1] - 5.0 / 11.0).abs() < 1e-9);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_points() {
        let c = MmdConfig::default();
        let pi = [0.2, 0.3, 0.5];
        let p = mmd_eu_step(&[0.4; 3], &pi, &pi, &c);
        for (x, y) in p.iter().zip(pi) {
            assert!((x - y).abs() < 1e-9);
        }
        let u = [1.0 / 3.0; 3];
        let k = mmd_kl_step(&[2.0; 3], &u, &u, &c);
        for x in k {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn euclidean_clips_negative_entries() {
        let c = MmdConfig::default();
        let p = mmd_eu_step(&[100.0, 0.0], &[0.5, 0.5], &[0.5, 0.5], &c);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[1] < 1e-9);
    }

    #[test]
    fn magnet_mixing() {
        assert_eq!(magnet_update(&[0.5, 0.5], &[0.9, 0.1], 0.0), vec![0.5, 0.5]);
        assert_eq!(magnet_update(&[0.5, 0.5], &[0.9, 0.1], 1.0), vec![0.9, 0.1]);
        let m = magnet_update(&[0.5, 0.5], &[0.9, 0.1], 0.05);
        assert!((m[0] - 0.52).abs() < 1e-15 && (m[1] - 0.48).abs() < 1e-15);
    }
}
