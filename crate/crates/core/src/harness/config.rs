use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::MmdConfig;
use crate::bregman::ConvexFamily;
use crate::error::{Error, Result};
use crate::eval::{Measure, MeasureKind};
use crate::games::{exhaustive_optimum, make_game, BuiltGame, Category, GameSpec};
use crate::gmd::{GmdConfig, LambdaInit};
use crate::meta::{AlphaControl, AlphaSchedule, McConfig, MetaKind};

pub const DEFAULT_ITERATIONS: usize = 100_000;
pub const DEFAULT_EVAL_EVERY: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    Cmd,
    Gmd,
    GmdLd,
    GmdIsr,
    MmdKl,
    MmdEu,
    Cfr,
    CfrPlus,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Self::Cmd,
        Self::Gmd,
        Self::GmdLd,
        Self::GmdIsr,
        Self::MmdKl,
        Self::MmdEu,
        Self::Cfr,
        Self::CfrPlus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Cmd => "cmd",
            Self::Gmd => "gmd",
            Self::GmdLd => "gmd_ld",
            Self::GmdIsr => "gmd_isr",
            Self::MmdKl => "mmd_kl",
            Self::MmdEu => "mmd_eu",
            Self::Cfr => "cfr",
            Self::CfrPlus => "cfr_plus",
        }
    }

    /// Whether the algorithm is a GMD variant (and so reports weight snapshots).
    pub fn is_gmd(&self) -> bool {
        matches!(self, Self::Cmd | Self::Gmd | Self::GmdLd | Self::GmdIsr)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s
            .to_ascii_lowercase()
            .replace(['-', ' '], "_")
            .replace('+', "_plus");
        Self::ALL
            .into_iter()
            .find(|a| a.name() == norm)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown algorithm {s:?} (expected one of {})",
                    Self::ALL.map(|a| a.name()).join(", ")
                ))
            })
    }
}

impl TryFrom<String> for Algorithm {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.name().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaInitKind {
    Deterministic,
    /// Random bracket start seeded from the experiment seed.
    Random,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GmdSection {
    pub family: Option<ConvexFamily>,
    pub history: Option<usize>,
    pub alpha: Option<Vec<f64>>,
    pub magnet: Option<bool>,
    pub alpha_magnet: Option<f64>,
    pub epsilon: Option<f64>,
    pub iota: Option<f64>,
    pub newton_iters: Option<usize>,
    pub newton_tol: Option<f64>,
    pub lambda_init: Option<LambdaInitKind>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetaSection {
    pub kind: Option<MetaKind>,
    pub samples: Option<usize>,
    pub kappa: Option<usize>,
    pub mu: Option<f64>,
    pub r_low: Option<f64>,
    pub r_high: Option<f64>,
    pub step_scale: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MmdSection {
    pub xi: Option<f64>,
    pub eta: Option<f64>,
    pub eta_tilde: Option<f64>,
    pub zeta: Option<f64>,
}

/// An experiment as written in a config file. Omitted fields take per-game defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Game spec such as `kuhn_poker(players=3)`.
    pub game: String,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub measure: Option<MeasureKind>,
    /// Optimal value for `opt_gap`; computed by enumeration when omitted.
    #[serde(default)]
    pub reference_value: Option<f64>,
    #[serde(default)]
    pub iterations: Option<usize>,
    #[serde(default)]
    pub eval_every: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Record wall-clock seconds; off by default so outputs are reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
    /// MMD updates of the approximate team best response.
    #[serde(default)]
    pub team_br_updates: Option<usize>,
    #[serde(default)]
    pub gmd: GmdSection,
    #[serde(default)]
    pub meta: MetaSection,
    #[serde(default)]
    pub mmd: MmdSection,
}

impl ExperimentConfig {
    pub fn new(game: impl Into<String>, algorithm: Algorithm) -> Self {
        Self {
            game: game.into(),
            algorithm,
            measure: None,
            reference_value: None,
            iterations: None,
            eval_every: None,
            seed: 0,
            timing: false,
            team_br_updates: None,
            gmd: GmdSection::default(),
            meta: MetaSection::default(),
            mmd: MmdSection::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Builds the game and fills every omitted field.
    pub fn resolve(&self) -> Result<Experiment> {
        let alg = self.algorithm;
        let unused = [
            ("gmd", self.gmd != GmdSection::default() && !alg.is_gmd()),
            (
                "meta",
                self.meta != MetaSection::default() && alg != Algorithm::Cmd,
            ),
            (
                "mmd",
                self.mmd != MmdSection::default()
                    && !matches!(alg, Algorithm::MmdKl | Algorithm::MmdEu),
            ),
        ];
        if let Some((section, _)) = unused.iter().find(|(_, bad)| *bad) {
            return Err(Error::Config(format!(
                "[{section}] settings do not apply to algorithm {}",
                alg.name()
            )));
        }
        let spec: GameSpec = self.game.parse()?;
        let built = make_game(&spec)?;
        let (history, mu) = table_defaults(&spec);
        let magnet_default = matches!(built.category, Category::Competitive | Category::Mixed);

        let iterations = self.iterations.unwrap_or(DEFAULT_ITERATIONS);
        if iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        let eval_every = self.eval_every.unwrap_or(DEFAULT_EVAL_EVERY);
        if eval_every == 0 {
            return Err(Error::Config("eval_every must be at least 1".into()));
        }

        let g = &self.gmd;
        let history = g.history.unwrap_or(history);
        let mut gmd = GmdConfig::new(g.family.unwrap_or(ConvexFamily::Entropy), history);
        gmd.magnet = g.magnet.unwrap_or(magnet_default);
        if let Some(a) = &g.alpha {
            gmd.alpha = a.clone();
        }
        if let Some(a) = g.alpha_magnet {
            gmd.alpha_magnet = a;
        }
        gmd.epsilon = g.epsilon.unwrap_or(gmd.epsilon);
        gmd.iota = g.iota.unwrap_or(gmd.iota);
        gmd.newton_iters = g.newton_iters.unwrap_or(gmd.newton_iters);
        gmd.newton_tol = g.newton_tol.unwrap_or(gmd.newton_tol);
        gmd.lambda_init = match g.lambda_init.unwrap_or(LambdaInitKind::Deterministic) {
            LambdaInitKind::Deterministic => LambdaInit::Deterministic,
            LambdaInitKind::Random => LambdaInit::Random { seed: self.seed },
        };
        gmd.validate()?;

        let m = &self.meta;
        let base = McConfig::default();
        let mc = McConfig {
            kind: m.kind.unwrap_or(base.kind),
            samples: m.samples.unwrap_or(base.samples),
            kappa: m.kappa.unwrap_or(base.kappa),
            mu: m.mu.unwrap_or(mu),
            r_low: m.r_low.unwrap_or(base.r_low),
            r_high: m.r_high.unwrap_or(base.r_high),
            iota: gmd.iota,
            step_scale: m.step_scale,
            seed: self.seed,
        };
        mc.validate()?;

        let d = MmdConfig::default();
        let mmd = MmdConfig {
            xi: self.mmd.xi.unwrap_or(d.xi),
            eta: self.mmd.eta.unwrap_or(d.eta),
            eta_tilde: self.mmd.eta_tilde.unwrap_or(d.eta_tilde),
            zeta: self.mmd.zeta.unwrap_or(d.zeta),
        };
        mmd.validate()?;

        let kind = self.measure.unwrap_or(match built.category {
            Category::SingleAgent | Category::Cooperative => MeasureKind::OptGap,
            Category::Competitive | Category::Mixed => MeasureKind::NashConv,
        });
        let mut measure = Measure::new(kind);
        measure.teams = built.teams.clone();
        measure.team_br_updates = self.team_br_updates.unwrap_or(measure.team_br_updates);
        if kind == MeasureKind::OptGap {
            measure.reference_value = Some(match self.reference_value {
                Some(v) => v,
                None => exhaustive_optimum(&built.tree)?.0,
            });
        }
        measure.validate()?;

        let control = match self.algorithm {
            Algorithm::Cmd => AlphaControl::Meta(mc.clone()),
            Algorithm::GmdLd => AlphaControl::Schedule(AlphaSchedule::LinearDecay {
                horizon: iterations,
            }),
            Algorithm::GmdIsr => AlphaControl::Schedule(AlphaSchedule::InverseSqrt),
            _ => AlphaControl::Schedule(AlphaSchedule::Fixed),
        };

        let mut effective = self.clone();
        effective.measure = Some(kind);
        effective.reference_value = measure.reference_value;
        effective.iterations = Some(iterations);
        effective.eval_every = Some(eval_every);
        effective.team_br_updates = Some(measure.team_br_updates);
        effective.gmd = GmdSection::default();
        effective.meta = MetaSection::default();
        effective.mmd = MmdSection::default();
        if alg.is_gmd() {
            effective.gmd = GmdSection {
                family: Some(gmd.family),
                history: Some(gmd.history),
                alpha: Some(gmd.alpha.clone()),
                magnet: Some(gmd.magnet),
                alpha_magnet: Some(gmd.alpha_magnet),
                epsilon: Some(gmd.epsilon),
                iota: Some(gmd.iota),
                newton_iters: Some(gmd.newton_iters),
                newton_tol: Some(gmd.newton_tol),
                lambda_init: g.lambda_init.or(Some(LambdaInitKind::Deterministic)),
            };
        }
        if alg == Algorithm::Cmd {
            effective.meta = MetaSection {
                kind: Some(mc.kind),
                samples: Some(mc.samples),
                kappa: Some(mc.kappa),
                mu: Some(mc.mu),
                r_low: Some(mc.r_low),
                r_high: Some(mc.r_high),
                step_scale: Some(mc.effective_step_scale()),
            };
        }
        if matches!(alg, Algorithm::MmdKl | Algorithm::MmdEu) {
            effective.mmd = MmdSection {
                xi: Some(mmd.xi),
                eta: Some(mmd.eta),
                eta_tilde: Some(mmd.eta_tilde),
                zeta: Some(mmd.zeta),
            };
        }

        Ok(Experiment {
            game: built,
            algorithm: self.algorithm,
            measure,
            iterations,
            eval_every,
            seed: self.seed,
            timing: self.timing,
            gmd,
            control,
            mmd,
            effective,
        })
    }
}

/// A fully resolved experiment.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub game: BuiltGame,
    pub algorithm: Algorithm,
    pub measure: Measure,
    pub iterations: usize,
    pub eval_every: usize,
    pub seed: u64,
    pub timing: bool,
    pub gmd: GmdConfig,
    pub control: AlphaControl,
    pub mmd: MmdConfig,
    /// The config with every default written out.
    pub effective: ExperimentConfig,
}

/// Per-game history length M and smoothing radius μ from the tuned defaults. Two-player
/// Kuhn shares the Kuhn row; games without a row use (1, 0.05).
pub fn table_defaults(spec: &GameSpec) -> (usize, f64) {
    match spec.name.as_str() {
        "single_agent_kuhn_a" | "single_agent_kuhn_b" | "single_agent_goofspiel" => (1, 0.05),
        "tiny_hanabi_game_a" => (3, 0.05),
        "tiny_hanabi_game_b" | "tiny_hanabi_game_c" => (1, 0.05),
        "kuhn_poker" => (5, 0.01),
        "leduc_poker" => (3, 0.05),
        "goofspiel" => (3, 0.01),
        "mcc_kuhn_a" | "mcc_kuhn_b" | "mcc_goofspiel" => (1, 0.01),
        _ => (1, 0.05),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("CFR+".parse::<Algorithm>().unwrap(), Algorithm::CfrPlus);
        assert_eq!("gmd-ld".parse::<Algorithm>().unwrap(), Algorithm::GmdLd);
        assert!("sgd".parse::<Algorithm>().is_err());
    }

    #[test]
    fn defaults_fill_in() {
        let c =
            ExperimentConfig::from_toml("game = \"kuhn_poker\"\nalgorithm = \"cmd\"\n").unwrap();
        let e = c.resolve().unwrap();
        assert_eq!(e.gmd.history, 5);
        assert!(e.gmd.magnet);
        assert_eq!(e.iterations, DEFAULT_ITERATIONS);
        assert_eq!(e.measure.kind, MeasureKind::NashConv);
        match e.control {
            AlphaControl::Meta(mc) => assert_eq!(mc.mu, 0.01),
            _ => panic!("cmd uses a meta-controller"),
        }
    }

    #[test]
    fn explicit_fields_win() {
        let text = "game = \"kuhn_poker\"\nalgorithm = \"cmd\"\n[gmd]\nhistory = 2\nmagnet = false\n[meta]\nmu = 0.3\n";
        let e = ExperimentConfig::from_toml(text)
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(e.gmd.history, 2);
        assert!(!e.gmd.magnet);
        match e.control {
            AlphaControl::Meta(mc) => assert_eq!(mc.mu, 0.3),
            _ => panic!(),
        }
    }

    #[test]
    fn opt_gap_reference_is_enumerated() {
        let e = ExperimentConfig::new("tiny_hanabi_game_a", Algorithm::Gmd)
            .resolve()
            .unwrap();
        assert_eq!(e.measure.reference_value, Some(10.0));
        assert_eq!(e.gmd.history, 3);
        assert!(!e.gmd.magnet);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::from_toml(
            "game = \"kuhn_poker\"\nalgorithm = \"cmd\"\nbogus = 1\n"
        )
        .is_err());
        let mut c = ExperimentConfig::new("kuhn_poker", Algorithm::Gmd);
        c.iterations = Some(0);
        assert!(c.resolve().is_err());
        c.iterations = None;
        c.gmd.alpha = Some(vec![0.5]);
        assert!(c.resolve().is_err());
    }

    #[test]
    fn effective_config_round_trips() {
        let e = ExperimentConfig::new("leduc_poker", Algorithm::MmdKl)
            .resolve()
            .unwrap();
        let text = e.effective.to_toml();
        let again = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(again, e.effective);
    }
}
