//! Pipeline configuration with layered precedence:
//! CLI flag > environment variable > config file > built-in default.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::ProviderKind;

pub const ENV_LLM_API_KEY: &str = "LLM_API_KEY";
pub const ENV_LLM_API_URL: &str = "LLM_API_URL";
pub const ENV_EMBEDDING_API_URL: &str = "EMBEDDING_API_URL";

/// Prefix for environment overrides of config fields, e.g.
/// `LITSIFT_IQR_MULTIPLIER=1.0`.
pub const ENV_PREFIX: &str = "LITSIFT_";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config field `{field}`: {value}")]
    Invalid { field: String, value: String },
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(field: &str, value: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        value: value.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub keyword_min: usize,
    pub keyword_max: usize,
    pub max_per_keyword: usize,
    pub iqr_multiplier: f64,
    pub provider_id: String,
    pub llm_model_id: String,
    pub request_delay_ms: u64,
    pub output_dir: PathBuf,
    /// Defaults to `<output_dir>/cache` when unset.
    pub cache_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            keyword_min: 5,
            keyword_max: 10,
            max_per_keyword: 20,
            iqr_multiplier: 0.5,
            provider_id: "minilm".to_string(),
            llm_model_id: "gemini-2.0-flash".to_string(),
            request_delay_ms: 3000,
            output_dir: PathBuf::from("litsift-out"),
            cache_dir: None,
        }
    }
}

impl PipelineConfig {
    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir
            .clone()
            .unwrap_or_else(|| self.output_dir.join("cache"))
    }

    pub fn provider(&self) -> ProviderKind {
        ProviderKind::parse(&self.provider_id).expect("validated provider id")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.keyword_min < 1 {
            return Err(invalid("keyword_min", self.keyword_min));
        }
        if self.keyword_min > self.keyword_max {
            return Err(invalid(
                "keyword_min",
                format!(
                    "{} exceeds keyword_max {}",
                    self.keyword_min, self.keyword_max
                ),
            ));
        }
        if self.max_per_keyword < 1 {
            return Err(invalid("max_per_keyword", self.max_per_keyword));
        }
        if !(self.iqr_multiplier.is_finite() && self.iqr_multiplier >= 0.0) {
            return Err(invalid("iqr_multiplier", self.iqr_multiplier));
        }
        if ProviderKind::parse(&self.provider_id).is_none() {
            return Err(invalid("provider_id", &self.provider_id));
        }
        if self.llm_model_id.trim().is_empty() {
            return Err(invalid("llm_model_id", "empty"));
        }
        Ok(())
    }

    fn apply(&mut self, o: &ConfigOverrides) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &o.$f { self.$f = v.clone(); } )* };
        }
        take!(
            keyword_min,
            keyword_max,
            max_per_keyword,
            iqr_multiplier,
            provider_id,
            llm_model_id,
            request_delay_ms,
            output_dir
        );
        if let Some(v) = &o.cache_dir {
            self.cache_dir = Some(v.clone());
        }
    }
}

/// One layer of partial configuration. Config files deserialize into this
/// shape; CLI flags and environment variables are converted into it.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub keyword_min: Option<usize>,
    pub keyword_max: Option<usize>,
    pub max_per_keyword: Option<usize>,
    pub iqr_multiplier: Option<f64>,
    pub provider_id: Option<String>,
    pub llm_model_id: Option<String>,
    pub request_delay_ms: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

fn is_secret_name(name: &str) -> bool {
    let n = name.to_ascii_lowercase();
    n == "key"
        || n.ends_with("_key")
        || ["secret", "token", "password"]
            .iter()
            .any(|w| n.contains(w))
}

impl ConfigOverrides {
    /// Reads `LITSIFT_<FIELD>` variables from the given environment map.
    pub fn from_env(env: &HashMap<String, String>) -> Result<Self, ConfigError> {
        fn parse<T: std::str::FromStr>(
            env: &HashMap<String, String>,
            field: &str,
        ) -> Result<Option<T>, ConfigError> {
            let name = format!("{ENV_PREFIX}{}", field.to_ascii_uppercase());
            match env.get(&name) {
                None => Ok(None),
                Some(raw) => raw
                    .trim()
                    .parse()
                    .map(Some)
                    .map_err(|_| invalid(field, raw)),
            }
        }
        Ok(Self {
            keyword_min: parse(env, "keyword_min")?,
            keyword_max: parse(env, "keyword_max")?,
            max_per_keyword: parse(env, "max_per_keyword")?,
            iqr_multiplier: parse(env, "iqr_multiplier")?,
            provider_id: parse(env, "provider_id")?,
            llm_model_id: parse(env, "llm_model_id")?,
            request_delay_ms: parse(env, "request_delay_ms")?,
            output_dir: parse(env, "output_dir")?,
            cache_dir: parse(env, "cache_dir")?,
        })
    }

    fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| invalid("config_file", e.message()))?;
        if let Some(secret) = table.keys().find(|k| is_secret_name(k)) {
            return Err(invalid(
                secret,
                "secrets are accepted only via environment variables",
            ));
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| invalid("config_file", e.message()))
    }
}

/// Resolves the effective configuration. A missing `file` means defaults.
pub fn load_config(
    file: Option<&Path>,
    env: &HashMap<String, String>,
    cli: &ConfigOverrides,
) -> Result<PipelineConfig, ConfigError> {
    let mut config = PipelineConfig::default();
    if let Some(path) = file {
        config.apply(&ConfigOverrides::from_file(path)?);
    }
    config.apply(&ConfigOverrides::from_env(env)?);
    config.apply(cli);
    config.validate()?;
    Ok(config)
}

/// Service endpoints and secrets, read from the environment only.
#[derive(Debug, Clone, Default)]
pub struct Endpoints {
    pub llm_api_url: Option<String>,
    pub llm_api_key: Option<String>,
    pub embedding_api_url: Option<String>,
}

impl Endpoints {
    pub fn from_env(env: &HashMap<String, String>) -> Self {
        let get = |k: &str| env.get(k).filter(|v| !v.trim().is_empty()).cloned();
        Self {
            llm_api_url: get(ENV_LLM_API_URL),
            llm_api_key: get(ENV_LLM_API_KEY),
            embedding_api_url: get(ENV_EMBEDDING_API_URL),
        }
    }
}
