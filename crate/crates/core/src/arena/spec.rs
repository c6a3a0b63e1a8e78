use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{Agent, GreedyAgent, RandomAgent};
use crate::alphazero::AlphaZeroAgent;
use crate::mcts::{MctsAgent, Rollout, SearchParams};
use crate::minimax::{HeuristicParams, MinimaxAgent, MinimaxConfig};
use crate::neural::{peek_precision, Checkpoint, Precision};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("unknown agent {0:?}")]
    UnknownAgent(String),
    #[error("agent {agent} does not take parameter {key:?}")]
    UnknownKey { agent: String, key: String },
    #[error("bad value for {key}: {value:?}")]
    BadValue { key: String, value: String },
    #[error("agent {agent} requires parameter {key:?}")]
    MissingKey { agent: String, key: String },
    #[error("parameter {0:?} given twice")]
    DuplicateKey(String),
    #[error("cannot load checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
}

/// A parsed agent description, `NAME[:key=value,...]`.
#[derive(Debug, Clone, PartialEq)]
pub enum AgentSpec {
    Random,
    Greedy,
    Minimax(MinimaxConfig),
    Mcts { c: f64, iters: u64, rollout: Rollout },
    /// Same search as `Mcts`, with the hybrid's defaults.
    Hybrid { c: f64, iters: u64, rollout: Rollout },
    AlphaZero { checkpoint: PathBuf, sims: u32, c_puct: f64 },
}

/// One tunable parameter of an agent, for listings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamInfo {
    pub key: String,
    pub default: Option<String>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentInfo {
    pub name: String,
    pub description: String,
    pub params: Vec<ParamInfo>,
}

fn param(key: &str, default: Option<String>, description: &str) -> ParamInfo {
    ParamInfo {
        key: key.into(),
        default,
        description: description.into(),
    }
}

fn rollout_text(r: &Rollout) -> String {
    match r {
        Rollout::Random => "random".into(),
        Rollout::Minimax { depth, .. } => format!("minimax{depth}"),
    }
}

fn parse_rollout(v: &str) -> Option<Rollout> {
    if v == "random" {
        return Some(Rollout::Random);
    }
    let depth: u32 = v.strip_prefix("minimax")?.parse().ok()?;
    (depth >= 1).then(|| Rollout::minimax(depth))
}

impl AgentSpec {
    /// Every agent name with its parameters and defaults.
    pub fn catalog() -> Vec<AgentInfo> {
        let heur = HeuristicParams::default();
        let plain = SearchParams::plain(0);
        let hybrid = SearchParams::hybrid(0);
        let search_params = |p: &SearchParams| {
            vec![
                param("c", Some(p.c.to_string()), "UCB exploration constant"),
                param("iters", Some(p.iterations.to_string()), "iteration cap per move"),
                param("rollout", Some(rollout_text(&p.rollout)), "random or minimaxN"),
            ]
        };
        vec![
            AgentInfo {
                name: "random".into(),
                description: "uniformly random legal column".into(),
                params: vec![],
            },
            AgentInfo {
                name: "greedy".into(),
                description: "immediate win if available, else lowest open column".into(),
                params: vec![],
            },
            AgentInfo {
                name: "minimax".into(),
                description: "iterative-deepening alpha-beta".into(),
                params: vec![
                    param("depth", Some(MinimaxConfig::default().depth.to_string()), "maximum depth in plies"),
                    param("own", Some(heur.own_base.to_string()), "base for own runs"),
                    param("opp", Some(heur.opp_base.to_string()), "base for opponent runs"),
                ],
            },
            AgentInfo {
                name: "mcts".into(),
                description: "UCT search with rollouts".into(),
                params: search_params(&plain),
            },
            AgentInfo {
                name: "hybrid".into(),
                description: "UCT search with shallow minimax rollouts".into(),
                params: search_params(&hybrid),
            },
            AgentInfo {
                name: "alphazero".into(),
                description: "network-guided search from a checkpoint".into(),
                params: vec![
                    param("checkpoint", None, "checkpoint path"),
                    param("sims", Some("100".into()), "simulations per move"),
                    param("c_puct", Some("1.5".into()), "prior exploration constant"),
                ],
            },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            AgentSpec::Random => "random",
            AgentSpec::Greedy => "greedy",
            AgentSpec::Minimax(_) => "minimax",
            AgentSpec::Mcts { .. } => "mcts",
            AgentSpec::Hybrid { .. } => "hybrid",
            AgentSpec::AlphaZero { .. } => "alphazero",
        }
    }

    /// Instantiates the agent. `seed` drives every random choice it makes.
    pub fn build(&self, seed: u64) -> Result<Box<dyn Agent>, SpecError> {
        Ok(match self {
            AgentSpec::Random => Box::new(RandomAgent::new(seed)),
            AgentSpec::Greedy => Box::new(GreedyAgent),
            AgentSpec::Minimax(config) => Box::new(MinimaxAgent::new(*config)),
            AgentSpec::Mcts { c, iters, rollout } | AgentSpec::Hybrid { c, iters, rollout } => {
                Box::new(MctsAgent::new(SearchParams {
                    c: *c,
                    iterations: *iters,
                    rollout: *rollout,
                    seed,
                }))
            }
            AgentSpec::AlphaZero { checkpoint, sims, c_puct } => {
                let fail = |e: &dyn fmt::Display| SpecError::Checkpoint {
                    path: checkpoint.clone(),
                    reason: e.to_string(),
                };
                match peek_precision(checkpoint).map_err(|e| fail(&e))? {
                    Precision::F32 => {
                        let ck = Checkpoint::<f32>::load(checkpoint).map_err(|e| fail(&e))?;
                        Box::new(AlphaZeroAgent::new(Arc::new(ck.network), *sims, *c_puct, seed))
                    }
                    Precision::F64 => {
                        let ck = Checkpoint::<f64>::load(checkpoint).map_err(|e| fail(&e))?;
                        Box::new(AlphaZeroAgent::new(Arc::new(ck.network), *sims, *c_puct, seed))
                    }
                }
            }
        })
    }
}

struct Params<'a> {
    agent: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn parse(agent: &'a str, text: Option<&'a str>) -> Result<Self, SpecError> {
        let mut pairs: Vec<(&str, &str)> = Vec::new();
        for item in text.into_iter().flat_map(|t| t.split(',')) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (k, v) = item.split_once('=').ok_or_else(|| SpecError::BadValue {
                key: item.into(),
                value: String::new(),
            })?;
            let k = k.trim();
            if pairs.iter().any(|(seen, _)| *seen == k) {
                return Err(SpecError::DuplicateKey(k.into()));
            }
            pairs.push((k, v.trim()));
        }
        Ok(Params { agent, pairs })
    }

    fn allow(&self, keys: &[&str]) -> Result<(), SpecError> {
        match self.pairs.iter().find(|(k, _)| !keys.contains(k)) {
            Some((k, _)) => Err(SpecError::UnknownKey {
                agent: self.agent.into(),
                key: (*k).into(),
            }),
            None => Ok(()),
        }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, SpecError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| SpecError::BadValue {
                key: key.into(),
                value: v.into(),
            }),
        }
    }
}

fn positive(key: &str, v: f64) -> Result<f64, SpecError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(SpecError::BadValue {
            key: key.into(),
            value: v.to_string(),
        })
    }
}

fn nonzero<T: PartialEq + Default + ToString>(key: &str, v: T) -> Result<T, SpecError> {
    if v == T::default() {
        Err(SpecError::BadValue {
            key: key.into(),
            value: v.to_string(),
        })
    } else {
        Ok(v)
    }
}

impl FromStr for AgentSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (s, None),
        };
        let p = Params::parse(name, rest)?;
        let search = |defaults: SearchParams| -> Result<(f64, u64, Rollout), SpecError> {
            p.allow(&["c", "iters", "rollout"])?;
            let rollout = match p.raw("rollout") {
                None => defaults.rollout,
                Some(v) => parse_rollout(v).ok_or_else(|| SpecError::BadValue {
                    key: "rollout".into(),
                    value: v.into(),
                })?,
            };
            Ok((
                positive("c", p.get("c", defaults.c)?)?,
                nonzero("iters", p.get("iters", defaults.iterations)?)?,
                rollout,
            ))
        };
        match name {
            "random" => p.allow(&[]).map(|_| AgentSpec::Random),
            "greedy" => p.allow(&[]).map(|_| AgentSpec::Greedy),
            "minimax" => {
                p.allow(&["depth", "own", "opp"])?;
                let d = MinimaxConfig::default();
                let params = HeuristicParams {
                    own_base: p.get("own", d.params.own_base)?,
                    opp_base: p.get("opp", d.params.opp_base)?,
                };
                params.validate().map_err(|reason| SpecError::BadValue {
                    key: "own/opp".into(),
                    value: reason,
                })?;
                Ok(AgentSpec::Minimax(MinimaxConfig {
                    depth: nonzero("depth", p.get("depth", d.depth)?)?,
                    params,
                }))
            }
            "mcts" => {
                let (c, iters, rollout) = search(SearchParams::plain(0))?;
                Ok(AgentSpec::Mcts { c, iters, rollout })
            }
            "hybrid" => {
                let (c, iters, rollout) = search(SearchParams::hybrid(0))?;
                Ok(AgentSpec::Hybrid { c, iters, rollout })
            }
            "alphazero" => {
                p.allow(&["checkpoint", "sims", "c_puct"])?;
                let checkpoint = p.raw("checkpoint").ok_or_else(|| SpecError::MissingKey {
                    agent: name.into(),
                    key: "checkpoint".into(),
                })?;
                Ok(AgentSpec::AlphaZero {
                    checkpoint: PathBuf::from(checkpoint),
                    sims: nonzero("sims", p.get("sims", 100u32)?)?,
                    c_puct: positive("c_puct", p.get("c_puct", 1.5)?)?,
                })
            }
            other => Err(SpecError::UnknownAgent(other.into())),
        }
    }
}

impl fmt::Display for AgentSpec {
    /// Canonical text with every parameter spelled out; parses back to an
    /// equal spec.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Random | AgentSpec::Greedy => f.write_str(self.name()),
            AgentSpec::Minimax(c) => write!(f, "minimax:depth={},own={},opp={}", c.depth, c.params.own_base, c.params.opp_base),
            AgentSpec::Mcts { c, iters, rollout } | AgentSpec::Hybrid { c, iters, rollout } => {
                write!(f, "{}:c={c},iters={iters},rollout={}", self.name(), rollout_text(rollout))
            }
            AgentSpec::AlphaZero { checkpoint, sims, c_puct } => {
                write!(f, "alphazero:checkpoint={},sims={sims},c_puct={c_puct}", checkpoint.display())
            }
        }
    }
}

impl Serialize for AgentSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AgentSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
