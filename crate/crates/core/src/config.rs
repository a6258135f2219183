//! `key=value` configuration files and run manifests.
//!
//! A manifest is a config file plus bookkeeping keys (`tool_version`,
//! `created_unix`, `output.*`), so any manifest can be fed back through
//! `--config` to repeat a run.

use std::path::{Path, PathBuf};

use crate::dataset::write_lines;
use crate::error::{Error, Result};
use crate::neighbors::KernelParams;
use crate::prototypes::{PrototypeOptions, PrototypePolicy};
use crate::ranking::RankParams;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolved settings for one ranking run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: RankParams,
    pub seed: u64,
    pub normalize: bool,
    pub prototype_policy: PrototypePolicy,
    pub prototype_count: Option<usize>,
    pub round: u32,
    pub embeddings: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub classes: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: RankParams::default(),
            seed: 0,
            normalize: true,
            prototype_policy: PrototypePolicy::KMeans,
            prototype_count: None,
            round: 1,
            embeddings: None,
            labels: None,
            classes: None,
        }
    }
}

/// Splits `key=value` lines, skipping blanks and `#` comments.
pub fn parse_key_values(text: &str, context: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::format(context, format!("line {}: expected key=value", lineno + 1))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParam(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::InvalidParam(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "k" => self.params.k = parse(key, value)?,
            "alpha" => self.params.alpha = parse(key, value)?,
            "blame_factor" => self.params.blame_factor = parse(key, value)?,
            "kernel_b" => self.params.kernel.b = parse(key, value)?,
            "kernel_e" => self.params.kernel.e = parse(key, value)?,
            "delta" => self.params.delta = parse(key, value)?,
            "clique_scope" => self.params.scope = value.parse()?,
            "seed" => self.seed = parse(key, value)?,
            "normalize" => self.normalize = parse_bool(key, value)?,
            "prototype_policy" => self.prototype_policy = value.parse()?,
            "prototype_count" => {
                self.prototype_count = match value {
                    "" | "auto" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "round" => self.round = parse(key, value)?,
            "embeddings" => self.embeddings = Some(PathBuf::from(value)),
            "labels" => self.labels = Some(PathBuf::from(value)),
            "classes" => self.classes = Some(PathBuf::from(value)),
            "tool_version" | "created_unix" => {}
            k if k.starts_with("output.") => {}
            other => return Err(Error::InvalidParam(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (k, v) in parse_key_values(&text, &path.display().to_string())? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.prototype_count == Some(0) {
            return Err(Error::InvalidParam("prototype_count must be >= 1".into()));
        }
        Ok(())
    }

    pub fn prototype_options(&self) -> PrototypeOptions {
        PrototypeOptions {
            seed: self.seed,
            count_override: self.prototype_count,
            policy: self.prototype_policy,
        }
    }

    pub fn kernel(&self) -> KernelParams {
        self.params.kernel
    }

    pub fn to_key_values(&self) -> Vec<String> {
        let p = &self.params;
        let mut out = Vec::new();
        if let Some(e) = &self.embeddings {
            out.push(format!("embeddings={}", e.display()));
        }
        if let Some(l) = &self.labels {
            out.push(format!("labels={}", l.display()));
        }
        if let Some(c) = &self.classes {
            out.push(format!("classes={}", c.display()));
        }
        out.extend([
            format!("k={}", p.k),
            format!("alpha={}", p.alpha),
            format!("blame_factor={}", p.blame_factor),
            format!("kernel_b={}", p.kernel.b),
            format!("kernel_e={}", p.kernel.e),
            format!("delta={}", p.delta),
            format!("clique_scope={}", p.scope),
            format!("seed={}", self.seed),
            format!("normalize={}", self.normalize),
            format!("prototype_policy={}", self.prototype_policy),
            format!(
                "prototype_count={}",
                self.prototype_count.map_or("auto".to_string(), |c| c.to_string())
            ),
            format!("round={}", self.round),
        ]);
        out
    }
}

/// Record of one run: resolved config, outputs, version and time.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: RunConfig,
    pub outputs: Vec<(String, PathBuf)>,
    pub created_unix: u64,
}

impl RunManifest {
    pub fn new(config: RunConfig) -> Self {
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self {
            config,
            outputs: Vec::new(),
            created_unix,
        }
    }

    pub fn add_output(&mut self, name: &str, path: &Path) {
        self.outputs.push((name.to_string(), path.to_path_buf()));
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("tool_version={TOOL_VERSION}"),
            format!("created_unix={}", self.created_unix),
        ];
        out.extend(self.config.to_key_values());
        out.extend(
            self.outputs
                .iter()
                .map(|(name, p)| format!("output.{name}={}", p.display())),
        );
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_lines(path, self.lines())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let mut c = RunConfig::default();
        let kv = parse_key_values("# comment\nk = 10\nalpha=0.8\n\nnormalize=false\n", "t").unwrap();
        for (k, v) in kv {
            c.set(&k, &v).unwrap();
        }
        assert_eq!(c.params.k, 10);
        assert_eq!(c.params.alpha, 0.8);
        assert!(!c.normalize);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let mut c = RunConfig::default();
        assert!(c.set("alpah", "0.5").is_err());
        assert!(c.set("k", "ten").is_err());
        assert!(parse_key_values("k 10", "t").is_err());
    }

    #[test]
    fn manifest_replays_as_config() {
        let mut c = RunConfig::default();
        c.set("blame_factor", "1.5").unwrap();
        c.set("prototype_count", "4").unwrap();
        c.set("clique_scope", "nearest-prototypes").unwrap();
        c.embeddings = Some("e.nrk".into());
        let mut m = RunManifest::new(c.clone());
        m.add_output("scores", Path::new("s.tsv"));
        let mut replay = RunConfig::default();
        for line in m.lines() {
            let (k, v) = line.split_once('=').unwrap();
            replay.set(k, v).unwrap();
        }
        assert_eq!(replay, c);
    }
}
