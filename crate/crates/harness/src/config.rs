use serde::{Deserialize, Serialize};

use corrida_core::chesscore::Variant;
use corrida_core::engines::EngineRef;
use corrida_core::strategy::{OpeningScript, ThreatPolicy, DEFAULT_DEADLINE};

use crate::HarnessError;

pub const DEFAULT_MAX_PLIES: usize = 300;
pub const DEFAULT_DRAW_BAND_CP: i32 = 50;

/// Who plays a color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlayerSpec {
    /// An opening script, then `fallback` once it is done or aborted. White only.
    Scripted {
        script: String,
        #[serde(default)]
        policy: ThreatPolicy,
        fallback: EngineRef,
    },
    Engine {
        engine: EngineRef,
    },
    /// The non-interfering test opponent.
    Passive,
}

impl PlayerSpec {
    pub fn scripted(script: &OpeningScript, fallback: EngineRef) -> PlayerSpec {
        PlayerSpec::Scripted {
            script: script.to_string(),
            policy: script.abort_policy,
            fallback,
        }
    }

    pub fn engine(engine: EngineRef) -> PlayerSpec {
        PlayerSpec::Engine { engine }
    }

    pub fn opening_script(&self) -> Result<Option<OpeningScript>, HarnessError> {
        match self {
            PlayerSpec::Scripted { script, policy, .. } => {
                let s: OpeningScript = script.parse().map_err(|e| HarnessError::Config(format!("{e}")))?;
                Ok(Some(s.with_policy(*policy)))
            }
            _ => Ok(None),
        }
    }

    /// The engine that moves once scripted play is over, if any.
    pub fn engine_ref(&self) -> Option<&EngineRef> {
        match self {
            PlayerSpec::Scripted { fallback, .. } => Some(fallback),
            PlayerSpec::Engine { engine } => Some(engine),
            PlayerSpec::Passive => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdjudicationRules {
    /// White moves allowed for restoring the setup on Corrida boards; `None` disables the rule.
    pub corrida_deadline: Option<usize>,
    /// Games reaching the ply cap are drawn when the evaluation lies within this band.
    pub draw_band_cp: i32,
    /// Builtin search depth for the cap evaluation.
    pub eval_depth: u32,
    /// End games on threefold repetition and the fifty-move rule.
    pub rule_draws: bool,
}

impl Default for AdjudicationRules {
    fn default() -> Self {
        AdjudicationRules {
            corrida_deadline: Some(DEFAULT_DEADLINE),
            draw_band_cp: DEFAULT_DRAW_BAND_CP,
            eval_depth: 2,
            rule_draws: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub variant: Variant,
    pub white: PlayerSpec,
    pub black: PlayerSpec,
    pub games: usize,
    /// One per game; defaults to 1..=games.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "default_max_plies")]
    pub max_plies: usize,
    #[serde(default)]
    pub adjudication: AdjudicationRules,
    /// Worker threads; results do not depend on it.
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_max_plies() -> usize {
    DEFAULT_MAX_PLIES
}

fn default_workers() -> usize {
    1
}

impl MatchConfig {
    pub fn new(variant: Variant, white: PlayerSpec, black: PlayerSpec, seeds: Vec<u64>) -> MatchConfig {
        MatchConfig {
            variant,
            white,
            black,
            games: seeds.len(),
            seeds,
            max_plies: DEFAULT_MAX_PLIES,
            adjudication: AdjudicationRules::default(),
            workers: 1,
        }
    }

    pub fn from_toml(text: &str) -> Result<MatchConfig, HarnessError> {
        let mut c: MatchConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        if c.seeds.is_empty() {
            c.seeds = (1..=c.games as u64).collect();
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.games != self.seeds.len() {
            return bad(format!("{} games but {} seeds", self.games, self.seeds.len()));
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if matches!(self.black, PlayerSpec::Scripted { .. }) {
            return bad("opening scripts are for White".into());
        }
        if let Some(s) = self.white.opening_script()? {
            if s.variant != self.variant {
                return bad(format!("script is for {}, match is {}", s.variant, self.variant));
            }
        }
        for spec in [&self.white, &self.black] {
            if let Some(e) = spec.engine_ref() {
                e.validate(self.variant).map_err(|e| HarnessError::Config(e.to_string()))?;
            }
        }
        Ok(())
    }
}
