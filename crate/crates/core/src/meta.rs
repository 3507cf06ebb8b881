//! Zero-order meta-controllers for the GMD weights and the configurable outer loop that
//! combines them with GMD.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::Measure;
use crate::game::{GameTree, JointPolicy};
use crate::gmd::{gmd_update, GmdConfig, GmdState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MetaKind {
    /// Direction-guided random search: only the sign of each finite difference is used.
    Drs,
    /// Random search weighted by the finite differences.
    Rs,
    /// Gradientless descent: keep the best of D candidates.
    Gld,
    /// Finite differences against the current policy.
    Glds,
    /// Sign-only variant of [`MetaKind::Glds`].
    Dglds,
}

impl MetaKind {
    pub const ALL: [MetaKind; 5] = [Self::Drs, Self::Rs, Self::Gld, Self::Glds, Self::Dglds];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Drs => "drs",
            Self::Rs => "rs",
            Self::Gld => "gld",
            Self::Glds => "glds",
            Self::Dglds => "dglds",
        }
    }

    /// Measure evaluations per update for `samples` directions.
    pub fn evaluations(&self, samples: usize) -> usize {
        match self {
            Self::Drs | Self::Rs => 2 * samples,
            Self::Gld => samples,
            Self::Glds | Self::Dglds => samples + 1,
        }
    }

    fn uses_sphere(&self) -> bool {
        matches!(self, Self::Gld | Self::Glds | Self::Dglds)
    }
}

impl fmt::Display for MetaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetaKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown meta-controller {s:?} (expected drs, rs, gld, glds, dglds)"
                ))
            })
    }
}

impl TryFrom<String> for MetaKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MetaKind> for String {
    fn from(k: MetaKind) -> String {
        k.name().to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub kind: MetaKind,
    /// Number of sampled directions D.
    pub samples: usize,
    /// Update α every κ iterations.
    pub kappa: usize,
    /// Smoothing radius μ (DRS, RS).
    pub mu: f64,
    /// Radius interval [r_L, r_H] (GLD family).
    pub r_low: f64,
    pub r_high: f64,
    /// Floor ι of every weight.
    pub iota: f64,
    /// Factor applied to u* before it is added to α. Unset means μ for DRS/RS, whose
    /// directions are unit-variance normals, and 1 for the GLD family, whose directions
    /// already have radius in [r_L, r_H]. Set to 1 for the unscaled rule.
    pub step_scale: Option<f64>,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            kind: MetaKind::Drs,
            samples: 5,
            kappa: 10,
            mu: 0.05,
            r_low: 0.01,
            r_high: 0.05,
            iota: 1e-6,
            step_scale: None,
            seed: 0,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.samples == 0 || self.kappa == 0 {
            return bad("samples and kappa must be positive".into());
        }
        if !(self.iota > 0.0 && self.iota < 1.0) {
            return bad(format!("iota must be in (0, 1), got {}", self.iota));
        }
        if self.kind.uses_sphere() {
            if !(self.r_low > 0.0 && self.r_low <= self.r_high && self.r_high.is_finite()) {
                return bad(format!(
                    "need 0 < r_low <= r_high, got [{}, {}]",
                    self.r_low, self.r_high
                ));
            }
        } else if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if let Some(s) = self.step_scale {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("step_scale must be positive, got {s}"));
            }
        }
        Ok(())
    }

    pub fn effective_step_scale(&self) -> f64 {
        self.step_scale.unwrap_or(if self.kind.uses_sphere() {
            1.0
        } else {
            self.mu
        })
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Three-way sign.
pub fn sgn(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else if z < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Clamps to [ι, 1].
pub fn clip_unit(z: f64, iota: f64) -> f64 {
    z.clamp(iota, 1.0)
}

pub fn clip_vec(z: &[f64], iota: f64) -> Vec<f64> {
    z.iter().map(|&x| clip_unit(x, iota)).collect()
}

/// Draws the D directions of one update: standard normal for DRS/RS, a uniform radius in
/// [r_L, r_H] times a uniform unit vector for the GLD family.
pub fn sample_directions<R: Rng + ?Sized>(
    cfg: &McConfig,
    dim: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    (0..cfg.samples)
        .map(|_| {
            let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            if !cfg.kind.uses_sphere() {
                return g;
            }
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let r = if cfg.r_low < cfg.r_high {
                Uniform::new_inclusive(cfg.r_low, cfg.r_high)
                    .expect("validated radius interval")
                    .sample(rng)
            } else {
                cfg.r_low
            };
            if norm > 0.0 {
                g.iter().map(|x| r * x / norm).collect()
            } else {
                let mut e = vec![0.0; dim];
                e[0] = r;
                e
            }
        })
        .collect()
}

/// Outcome of one meta-controller update.
#[derive(Clone, Debug, PartialEq)]
pub struct McUpdate {
    pub alpha: Vec<f64>,
    /// Direction u* before scaling and clipping.
    pub step: Vec<f64>,
    /// Candidate losses in evaluation order.
    pub losses: Vec<f64>,
    pub evaluations: usize,
}

fn add_scaled(x: &[f64], u: &[f64], s: f64) -> Vec<f64> {
    x.iter().zip(u).map(|(a, b)| a + s * b).collect()
}

/// One update from fixed directions. `candidate(α′)` returns the loss after a GMD step
/// with α′; `current()` returns the loss of the current policy. Any failing callback aborts
/// the update and the error is returned; the caller keeps its α.
pub fn mc_update_with(
    alpha: &[f64],
    directions: &[Vec<f64>],
    candidate: &mut dyn FnMut(&[f64]) -> Result<f64>,
    current: &mut dyn FnMut() -> Result<f64>,
    cfg: &McConfig,
) -> Result<McUpdate> {
    let dim = alpha.len();
    if directions.is_empty() || directions.iter().any(|u| u.len() != dim) {
        return Err(Error::Config(format!(
            "need at least one direction of dimension {dim}"
        )));
    }
    let iota = cfg.iota;
    let mut losses = Vec::new();
    let mut step = vec![0.0; dim];
    match cfg.kind {
        MetaKind::Drs | MetaKind::Rs => {
            for u in directions {
                let plus = candidate(&clip_vec(&add_scaled(alpha, u, cfg.mu), iota))?;
                let minus = candidate(&clip_vec(&add_scaled(alpha, u, -cfg.mu), iota))?;
                losses.extend([plus, minus]);
                let delta = plus - minus;
                let w = if cfg.kind == MetaKind::Drs {
                    sgn(delta)
                } else {
                    delta
                };
                step = add_scaled(&step, u, -w);
            }
        }
        MetaKind::Gld => {
            let mut best = (f64::INFINITY, 0);
            for (j, u) in directions.iter().enumerate() {
                let l = candidate(&clip_vec(&add_scaled(alpha, u, 1.0), iota))?;
                losses.push(l);
                if l < best.0 {
                    best = (l, j);
                }
            }
            step = directions[best.1].clone();
        }
        MetaKind::Glds | MetaKind::Dglds => {
            let base = current()?;
            for u in directions {
                let l = candidate(&clip_vec(&add_scaled(alpha, u, 1.0), iota))?;
                losses.push(l);
                let delta = l - base;
                let w = if cfg.kind == MetaKind::Dglds {
                    sgn(delta)
                } else {
                    delta
                };
                step = add_scaled(&step, u, -w);
            }
            losses.push(base);
        }
    }
    if losses.iter().any(|l| !l.is_finite()) {
        return Err(Error::Solver(format!(
            "non-finite candidate loss in {losses:?}"
        )));
    }
    Ok(McUpdate {
        alpha: clip_vec(&add_scaled(alpha, &step, cfg.effective_step_scale()), iota),
        step,
        evaluations: losses.len(),
        losses,
    })
}

/// One update with freshly sampled directions (all drawn before any evaluation).
pub fn mc_update<R: Rng + ?Sized>(
    alpha: &[f64],
    candidate: &mut dyn FnMut(&[f64]) -> Result<f64>,
    current: &mut dyn FnMut() -> Result<f64>,
    cfg: &McConfig,
    rng: &mut R,
) -> Result<McUpdate> {
    let directions = sample_directions(cfg, alpha.len(), rng);
    mc_update_with(alpha, &directions, candidate, current, cfg)
}

/// Fixed-rule weight schedules applied to every α coordinate after the warm-up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaSchedule {
    /// Keep the configured weights.
    Fixed,
    /// max(ι, 1 − (k − 1)/horizon).
    LinearDecay { horizon: usize },
    /// 1/√k.
    InverseSqrt,
}

impl AlphaSchedule {
    /// The common weight at iteration k, or `None` for [`AlphaSchedule::Fixed`].
    pub fn weight(&self, k: usize, iota: f64) -> Option<f64> {
        match *self {
            Self::Fixed => None,
            Self::LinearDecay { horizon } => {
                let h = horizon.max(1) as f64;
                Some(clip_unit(1.0 - (k as f64 - 1.0) / h, iota))
            }
            Self::InverseSqrt => Some(clip_unit(1.0 / (k as f64).sqrt(), iota)),
        }
    }
}

/// How the weights evolve over a run.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaControl {
    Schedule(AlphaSchedule),
    Meta(McConfig),
}

/// What one outer iteration did.
#[derive(Clone, Debug, PartialEq)]
pub struct CmdStep {
    /// Index k of the iteration just performed.
    pub k: usize,
    pub joint: JointPolicy,
    /// Weight vector (magnet first) used by the committed GMD step.
    pub alpha: Vec<f64>,
    pub update: Option<McUpdate>,
}

/// One iteration of the configurable loop. For k ≤ M every weight is 1/k; afterwards the
/// controller runs every κ-th iteration, each candidate being scored by a GMD step on a
/// clone of the state. The committed GMD step then uses the (possibly new) weights.
pub fn cmd_iteration<R: Rng + ?Sized>(
    tree: &GameTree,
    state: &mut GmdState,
    config: &mut GmdConfig,
    control: &AlphaControl,
    measure: &Measure,
    rng: &mut R,
) -> Result<CmdStep> {
    let k = state.k;
    let mut update = None;
    if k <= config.history {
        if matches!(control, AlphaControl::Meta(_)) {
            config.set_alpha_vector(&vec![1.0 / k as f64; config.alpha_dim()]);
        }
    } else {
        match control {
            AlphaControl::Schedule(s) => {
                if let Some(w) = s.weight(k, config.iota) {
                    config.set_alpha_vector(&vec![w; config.alpha_dim()]);
                }
            }
            AlphaControl::Meta(mc) if k.is_multiple_of(mc.kappa) => {
                let snapshot = config.clone();
                let mut candidate = |a: &[f64]| -> Result<f64> {
                    let mut s = state.clone();
                    let mut c = snapshot.clone();
                    c.set_alpha_vector(a);
                    let joint = gmd_update(tree, &mut s, &c)?;
                    measure.loss(tree, &joint)
                };
                let mut current = || measure.loss(tree, &state.current());
                let u = mc_update(
                    &config.alpha_vector(),
                    &mut candidate,
                    &mut current,
                    mc,
                    rng,
                )?;
                config.set_alpha_vector(&u.alpha);
                update = Some(u);
            }
            AlphaControl::Meta(_) => {}
        }
    }
    let alpha = if k <= config.history {
        vec![1.0 / k as f64; config.alpha_dim()]
    } else {
        config.alpha_vector()
    };
    let joint = gmd_update(tree, state, config)?;
    Ok(CmdStep {
        k,
        joint,
        alpha,
        update,
    })
}
