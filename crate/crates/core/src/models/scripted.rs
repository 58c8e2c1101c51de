use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BlackBoxModel, ModelError, SampleParams};
use crate::seed;
use crate::trace::StepRecord;

/// A finite distribution over outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Categorical {
    pub outcomes: Vec<(String, f64)>,
}

impl Categorical {
    pub fn new(outcomes: Vec<(String, f64)>) -> Result<Self, ModelError> {
        if outcomes.is_empty() {
            return Err(ModelError::Config(
                "categorical distribution has no outcomes".into(),
            ));
        }
        if outcomes.iter().any(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(ModelError::Config(
                "weights must be finite and non-negative".into(),
            ));
        }
        if outcomes.iter().map(|(_, w)| w).sum::<f64>() <= 0.0 {
            return Err(ModelError::Config("weights sum to zero".into()));
        }
        Ok(Categorical { outcomes })
    }

    /// `bad` with probability `p`, `good` otherwise.
    pub fn bernoulli(bad: &str, good: &str, p: f64) -> Self {
        Categorical {
            outcomes: vec![(bad.to_string(), p), (good.to_string(), 1.0 - p)],
        }
    }

    pub fn point(output: &str) -> Self {
        Categorical {
            outcomes: vec![(output.to_string(), 1.0)],
        }
    }

    fn sample(&self, u: f64) -> &str {
        let total: f64 = self.outcomes.iter().map(|(_, w)| w).sum();
        let mut acc = 0.0;
        let target = u * total;
        for (out, w) in &self.outcomes {
            acc += w;
            if target < acc {
                return out;
            }
        }
        // u * total can round up to the final boundary
        &self
            .outcomes
            .iter()
            .rev()
            .find(|(_, w)| *w > 0.0)
            .expect("validated")
            .0
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Script {
    Sequence(Vec<String>),
    Stochastic {
        steps: Vec<Categorical>,
        repeat_last: bool,
    },
}

/// A test double that replays a fixed script or draws from per-step
/// distributions.
///
/// The step index is the history length, so hypothetical continuations see
/// the same script position as the real run would. A stochastic draw depends
/// only on the model seed, the call seed and that index; temperature is
/// ignored.
#[derive(Debug, Clone)]
pub struct ScriptedModel {
    name: String,
    script: Script,
    stop_token: String,
    seed: u64,
    guided: Option<(String, Categorical)>,
}

pub const DEFAULT_STOP_TOKEN: &str = "DONE";

impl ScriptedModel {
    pub fn sequence<S: Into<String>>(outputs: impl IntoIterator<Item = S>) -> Self {
        ScriptedModel {
            name: "scripted".into(),
            script: Script::Sequence(outputs.into_iter().map(Into::into).collect()),
            stop_token: DEFAULT_STOP_TOKEN.into(),
            seed: 0,
            guided: None,
        }
    }

    /// Draws step `i` from `steps[i]`; past the end, either the last
    /// distribution repeats or the stop token is returned.
    pub fn stochastic(
        steps: Vec<Categorical>,
        repeat_last: bool,
        seed: u64,
    ) -> Result<Self, ModelError> {
        if steps.is_empty() {
            return Err(ModelError::Config("stochastic script has no steps".into()));
        }
        for c in &steps {
            Categorical::new(c.outcomes.clone())?;
        }
        Ok(ScriptedModel {
            name: "stochastic".into(),
            script: Script::Stochastic { steps, repeat_last },
            stop_token: DEFAULT_STOP_TOKEN.into(),
            seed,
            guided: None,
        })
    }

    /// Every step `bad` with probability `p`, `good` otherwise, forever.
    pub fn bernoulli(bad: &str, good: &str, p: f64, seed: u64) -> Self {
        Self::stochastic(vec![Categorical::bernoulli(bad, good, p)], true, seed)
            .expect("valid bernoulli")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_stop_token(mut self, token: impl Into<String>) -> Self {
        self.stop_token = token.into();
        self
    }

    /// When the current input contains `marker`, draw from `dist` instead.
    /// Models a system that responds to constraint-guided prompting.
    pub fn with_guided(mut self, marker: impl Into<String>, dist: Categorical) -> Self {
        self.guided = Some((marker.into(), dist));
        self
    }

    pub fn stop_token(&self) -> &str {
        &self.stop_token
    }
}

impl BlackBoxModel for ScriptedModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn next_output(
        &self,
        history: &[StepRecord],
        input: &str,
        params: &SampleParams,
    ) -> Result<String, ModelError> {
        let idx = history.len();
        let dist = match &self.script {
            Script::Sequence(outputs) => {
                return Ok(outputs
                    .get(idx)
                    .cloned()
                    .unwrap_or_else(|| self.stop_token.clone()));
            }
            Script::Stochastic { steps, repeat_last } => match steps.get(idx) {
                Some(d) => d,
                None if *repeat_last => steps.last().expect("nonempty"),
                None => return Ok(self.stop_token.clone()),
            },
        };
        let dist = match &self.guided {
            Some((marker, guided)) if input.contains(marker.as_str()) => guided,
            _ => dist,
        };
        let mut rng = seed::rng(seed::derive(self.seed, &[params.seed, idx as u64]));
        Ok(dist.sample(rng.gen::<f64>()).to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(n: usize) -> Vec<StepRecord> {
        (1..=n).map(|t| StepRecord::new(t, "", "x")).collect()
    }

    #[test]
    fn sequence_by_step() {
        let m = ScriptedModel::sequence(["a", "b"]);
        let p = SampleParams::new(0.2, 0);
        assert_eq!(m.next_output(&hist(0), "go", &p).unwrap(), "a");
        assert_eq!(m.next_output(&hist(1), "", &p).unwrap(), "b");
        assert_eq!(m.next_output(&hist(2), "", &p).unwrap(), "DONE");
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        let m = ScriptedModel::bernoulli("bad", "ok", 0.5, 3);
        let draws = |m: &ScriptedModel| {
            (0..50)
                .map(|s| {
                    m.next_output(&hist(0), "", &SampleParams::new(0.8, s))
                        .unwrap()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draws(&m), draws(&m.clone()));
        let bad = draws(&m).iter().filter(|o| *o == "bad").count();
        assert!(bad > 10 && bad < 40, "{bad}");
    }

    #[test]
    fn bernoulli_frequency() {
        let m = ScriptedModel::bernoulli("bad", "ok", 0.1, 11);
        let n = 20_000;
        let bad = (0..n)
            .filter(|&s| {
                m.next_output(&hist(0), "", &SampleParams::new(0.8, s))
                    .unwrap()
                    == "bad"
            })
            .count();
        let freq = bad as f64 / n as f64;
        assert!((freq - 0.1).abs() < 0.01, "{freq}");
    }

    #[test]
    fn exhausted_stochastic_script_stops() {
        let m = ScriptedModel::stochastic(vec![Categorical::point("a")], false, 0).unwrap();
        let p = SampleParams::new(0.2, 0);
        assert_eq!(m.next_output(&hist(0), "", &p).unwrap(), "a");
        assert_eq!(m.next_output(&hist(1), "", &p).unwrap(), "DONE");
    }

    #[test]
    fn guided_marker_switches_distribution() {
        let m = ScriptedModel::bernoulli("bad", "ok", 1.0, 0)
            .with_guided("IMPORTANT", Categorical::point("ok"));
        let p = SampleParams::new(0.2, 0);
        assert_eq!(m.next_output(&hist(0), "do it", &p).unwrap(), "bad");
        assert_eq!(
            m.next_output(&hist(0), "do it IMPORTANT", &p).unwrap(),
            "ok"
        );
    }

    #[test]
    fn invalid_distributions() {
        assert!(Categorical::new(vec![]).is_err());
        assert!(Categorical::new(vec![("a".into(), -1.0)]).is_err());
        assert!(ScriptedModel::stochastic(vec![], true, 0).is_err());
    }
}
