//! The JSON run configuration and the objects built from it.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use ltlmon::intervention::{InputScript, InterventionPolicy};
use ltlmon::models::{
    Categorical, EndpointConfig, EndpointLabeler, EndpointModel, Rule, RuleLabeler, ScriptedModel,
};
use ltlmon::synth::SyntheticLabeler;
use ltlmon::{
    BlackBoxModel, Constraint, LabelError, LabelingFunction, Mode, Monitor, StepRecord,
    TruthAssignment,
};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LabelerSpec {
    /// Substring / regex rules over the step text.
    Rules {
        rules: Vec<Rule>,
        #[serde(default)]
        vocabulary: Vec<String>,
    },
    /// Asks a configured model one yes/no question per proposition.
    Model {
        model: String,
        vocabulary: Vec<String>,
        #[serde(default)]
        descriptions: BTreeMap<String, String>,
        #[serde(default)]
        history_budget: Option<usize>,
    },
    /// Vocabulary scan for the synthetic benchmark's sentences.
    Synthetic {
        #[serde(default)]
        entities: usize,
    },
    /// Labels must already be present in the trace.
    Embedded,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Guided {
    pub marker: String,
    pub dist: Categorical,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Replays `outputs`, then the stop token.
    Sequence {
        outputs: Vec<String>,
        #[serde(default)]
        stop_token: Option<String>,
    },
    /// Draws step i from `steps[i]`.
    Stochastic {
        steps: Vec<Categorical>,
        #[serde(default = "yes")]
        repeat_last: bool,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        stop_token: Option<String>,
        #[serde(default)]
        guided: Option<Guided>,
    },
    /// `bad` with probability `p` at every step.
    Bernoulli {
        bad: String,
        good: String,
        p: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        guided: Option<Guided>,
    },
    /// OpenAI-compatible chat-completions endpoint.
    Endpoint(EndpointConfig),
}

fn yes() -> bool {
    true
}

fn default_max_steps() -> usize {
    50
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct Outputs {
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub trace: Option<PathBuf>,
    #[serde(default)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    #[serde(default)]
    pub labeler: Option<LabelerSpec>,
    #[serde(default)]
    pub models: BTreeMap<String, ModelSpec>,
    /// Key in `models` of the system being monitored.
    #[serde(default)]
    pub primary: Option<String>,
    #[serde(default)]
    pub policy: InterventionPolicy,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub inputs: InputScript,
    #[serde(default)]
    pub stop_token: Option<String>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

impl Config {
    /// Reads and validates a config. Relative paths inside it resolve
    /// against the config file's directory.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Config = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(p) = &cfg.policy.template_path {
            let full = base.join(p);
            cfg.policy.template = Some(
                std::fs::read_to_string(&full)
                    .with_context(|| format!("reading template {}", full.display()))?,
            );
        }
        for out in [
            &mut cfg.outputs.report,
            &mut cfg.outputs.trace,
            &mut cfg.outputs.log,
        ]
        .into_iter()
        .flatten()
        {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        Monitor::new(&self.constraints, self.mode)?;
        self.policy.validate()?;
        if let Some(name) = &self.policy.substitute_model {
            if !self.models.contains_key(name) {
                bail!("substitute model `{name}` is not defined under `models`");
            }
        }
        if let Some(name) = &self.primary {
            if !self.models.contains_key(name) {
                bail!("primary model `{name}` is not defined under `models`");
            }
        }
        Ok(())
    }

    pub fn model(&self, name: &str) -> Result<Box<dyn BlackBoxModel>> {
        let spec = self
            .models
            .get(name)
            .ok_or_else(|| anyhow!("model `{name}` is not defined under `models`"))?;
        build_model(name, spec)
    }

    /// The primary model's name: `primary`, or the only model defined.
    pub fn primary_name(&self) -> Result<&str> {
        if let Some(p) = &self.primary {
            return Ok(p);
        }
        let mut names = self.models.keys();
        match (names.next(), names.next()) {
            (Some(only), None) => Ok(only),
            (None, _) => bail!("no models defined"),
            _ => bail!("several models defined; set `primary`"),
        }
    }

    /// Stop token from the config, else the primary scripted model's.
    pub fn stop_token(&self) -> Result<String> {
        if let Some(s) = &self.stop_token {
            return Ok(s.clone());
        }
        let name = self.primary_name()?;
        Ok(match &self.models[name] {
            ModelSpec::Sequence {
                stop_token: Some(s),
                ..
            }
            | ModelSpec::Stochastic {
                stop_token: Some(s),
                ..
            } => s.clone(),
            _ => ltlmon::models::DEFAULT_STOP_TOKEN.to_string(),
        })
    }

    pub fn labeler(&self) -> Result<Box<dyn LabelingFunction>> {
        let spec = self
            .labeler
            .as_ref()
            .ok_or_else(|| anyhow!("config has no `labeler`"))?;
        Ok(match spec {
            LabelerSpec::Rules { rules, vocabulary } => {
                Box::new(RuleLabeler::new(rules)?.with_extra_vocabulary(vocabulary.clone()))
            }
            LabelerSpec::Model {
                model,
                vocabulary,
                descriptions,
                history_budget,
            } => {
                let mut l = EndpointLabeler::new(self.model(model)?, vocabulary.clone())
                    .with_descriptions(descriptions.clone())
                    .with_seed(self.seed);
                if let Some(b) = history_budget {
                    l = l.with_history_budget(*b);
                }
                Box::new(l)
            }
            LabelerSpec::Synthetic { entities } => Box::new(SyntheticLabeler::new(*entities)),
            LabelerSpec::Embedded => Box::new(Embedded::new(&self.constraints)),
        })
    }
}

fn build_model(name: &str, spec: &ModelSpec) -> Result<Box<dyn BlackBoxModel>> {
    let guide = |m: ScriptedModel, g: &Option<Guided>| match g {
        Some(g) => m.with_guided(g.marker.clone(), g.dist.clone()),
        None => m,
    };
    Ok(match spec {
        ModelSpec::Sequence {
            outputs,
            stop_token,
        } => {
            let mut m = ScriptedModel::sequence(outputs.clone()).with_name(name);
            if let Some(s) = stop_token {
                m = m.with_stop_token(s.clone());
            }
            Box::new(m)
        }
        ModelSpec::Stochastic {
            steps,
            repeat_last,
            seed,
            stop_token,
            guided,
        } => {
            let mut m =
                ScriptedModel::stochastic(steps.clone(), *repeat_last, *seed)?.with_name(name);
            if let Some(s) = stop_token {
                m = m.with_stop_token(s.clone());
            }
            Box::new(guide(m, guided))
        }
        ModelSpec::Bernoulli {
            bad,
            good,
            p,
            seed,
            guided,
        } => {
            if !(0.0..=1.0).contains(p) {
                bail!("model `{name}`: p = {p} is outside [0, 1]");
            }
            Box::new(guide(
                ScriptedModel::bernoulli(bad, good, *p, *seed).with_name(name),
                guided,
            ))
        }
        ModelSpec::Endpoint(cfg) => Box::new(EndpointModel::new(name, cfg.clone())?),
    })
}

/// Returns the labels already attached to the step; fails on unlabeled steps.
struct Embedded {
    vocab: BTreeSet<String>,
}

impl Embedded {
    fn new(constraints: &[Constraint]) -> Self {
        Embedded {
            vocab: constraints.iter().flat_map(|c| c.formula.props()).collect(),
        }
    }
}

impl LabelingFunction for Embedded {
    fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    fn label(&self, history: &[StepRecord]) -> Result<TruthAssignment, LabelError> {
        let step = history
            .last()
            .ok_or_else(|| LabelError::Other("empty history".into()))?;
        let labels = step
            .labels
            .clone()
            .ok_or_else(|| LabelError::Other(format!("step {} carries no labels", step.t)))?;
        // propositions outside every constraint do not affect verdicts
        Ok(labels.iter().filter(|p| self.vocab.contains(*p)).collect())
    }
}
