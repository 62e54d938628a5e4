use serde::{Deserialize, Serialize};

use gridbench::ObsMode;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Current observation in, a single action integer out.
    Markovian,
    /// Current observation in, brief reasoning then a final `ACTION:` line.
    #[default]
    MarkovianReasoner,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Markovian => "markovian",
            Preset::MarkovianReasoner => "markovian_reasoner",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub temperature: f64,
    pub top_p: f64,
    pub top_k: Option<u32>,
    pub max_tokens: u32,
}

impl Default for Sampling {
    /// The open-weight serving settings: temperature 0.7, top-p 0.8, top-k 20, 100 tokens.
    fn default() -> Self {
        Sampling { temperature: 0.7, top_p: 0.8, top_k: Some(20), max_tokens: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    /// Chat-completions endpoint configured through environment variables.
    #[default]
    HttpChat,
    /// Responses supplied in-process, for offline runs.
    Scripted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessConfig {
    pub preset: Preset,
    pub obs_mode: ObsMode,
    pub sampling: Sampling,
    pub model_name: String,
    pub backend: BackendKind,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            preset: Preset::default(),
            obs_mode: ObsMode::Ascii,
            sampling: Sampling::default(),
            model_name: String::new(),
            backend: BackendKind::default(),
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidConfig(msg));
        if self.sampling.max_tokens < 1 {
            return bad("sampling.max_tokens must be at least 1".into());
        }
        if self.sampling.temperature.is_nan() || self.sampling.temperature < 0.0 {
            return bad(format!("sampling.temperature must be non-negative, got {}", self.sampling.temperature));
        }
        if !(self.sampling.top_p > 0.0 && self.sampling.top_p <= 1.0) {
            return bad(format!("sampling.top_p must lie in (0, 1], got {}", self.sampling.top_p));
        }
        if !matches!(self.obs_mode, ObsMode::Ascii | ObsMode::Language | ObsMode::Structured) {
            return bad(format!("observation mode `{}` is not text", self.obs_mode.name()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_sampling() {
        let mut c = HarnessConfig::default();
        c.validate().unwrap();
        c.sampling.max_tokens = 0;
        assert!(c.validate().is_err());
        c.sampling.max_tokens = 10;
        c.sampling.temperature = -0.1;
        assert!(c.validate().is_err());
        c.sampling.temperature = 0.0;
        c.obs_mode = ObsMode::Pixels;
        assert!(c.validate().is_err());
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: HarnessConfig = serde_json::from_str(r#"{"preset":"markovian","obs_mode":"language"}"#).unwrap();
        assert_eq!(c.preset, Preset::Markovian);
        assert_eq!(c.obs_mode, ObsMode::Language);
        assert_eq!(c.sampling, Sampling::default());
    }
}
