//! The chain description file: `{"n": int, "P": [[...]], "labels": [...]?, "pi": [...]?}`.

use std::fs;
use std::path::Path;

use mixbound_core::MarkovChain;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub n: usize,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<f64>>,
}

impl ChainFile {
    pub fn from_chain(chain: &MarkovChain) -> Self {
        ChainFile {
            n: chain.n(),
            p: (0..chain.n()).map(|x| chain.row(x).to_vec()).collect(),
            labels: chain.labels().map(<[String]>::to_vec),
            pi: Some(chain.pi().to_vec()),
        }
    }

    /// Validates the shape and builds the chain; `pi`, when given, is checked
    /// rather than trusted.
    pub fn into_chain(self) -> CliResult<MarkovChain> {
        if self.p.len() != self.n {
            return Err(CliError::input(format!("\"n\" is {} but \"P\" has {} rows", self.n, self.p.len())));
        }
        if let Some(pi) = &self.pi {
            if pi.len() != self.n {
                return Err(CliError::input(format!("\"pi\" has {} entries, expected {}", pi.len(), self.n)));
            }
        }
        let chain = MarkovChain::new(&self.p, self.pi.as_deref())?;
        match self.labels {
            Some(labels) => Ok(chain.with_labels(labels)?),
            None => Ok(chain),
        }
    }
}

pub fn parse_chain(text: &str) -> CliResult<MarkovChain> {
    let file: ChainFile = serde_json::from_str(text).map_err(|e| CliError::input(format!("malformed chain file: {e}")))?;
    file.into_chain()
}

pub fn read_chain(path: &Path) -> CliResult<MarkovChain> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_chain(&text)
}

pub fn chain_to_json(chain: &MarkovChain) -> String {
    let mut s = serde_json::to_string_pretty(&ChainFile::from_chain(chain)).expect("plain data serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use mixbound_core::generators;

    #[test]
    fn round_trip_is_exact() {
        let c = generators::random_chain(5, 3, generators::RandomKind::Sparse).unwrap();
        let back = parse_chain(&chain_to_json(&c)).unwrap();
        assert_eq!(back.matrix(), c.matrix());
        assert_eq!(back.pi(), c.pi());
    }

    #[test]
    fn labels_survive() {
        let text = r#"{"n": 2, "P": [[0.5, 0.5], [0.25, 0.75]], "labels": ["a", "b"]}"#;
        let c = parse_chain(text).unwrap();
        assert_eq!(c.labels().unwrap(), ["a", "b"]);
        assert!((c.pi()[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "{",
            r#"{"n": 3, "P": [[1.0, 0.0], [0.0, 1.0]]}"#,
            r#"{"n": 2, "P": [[0.5, 0.6], [0.5, 0.5]]}"#,
            r#"{"n": 2, "P": [[0.5, 0.5], [0.5, 0.5]], "extra": 1}"#,
            r#"{"n": 2, "P": [[0.5, 0.5], [0.5, 0.5]], "pi": [1.0]}"#,
        ] {
            assert!(matches!(parse_chain(text), Err(CliError::Input(_))), "{text}");
        }
    }
}
