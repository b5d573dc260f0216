//! Run manifests: a self-contained record of one invocation sufficient to
//! replay it and verify the output byte-for-byte.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wpsys_core::estimator::BoundConstants;

use crate::request::Request;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    /// The full [`Request`] in serialized form (command, parameters, output
    /// format, table source).
    pub parameters: serde_json::Value,
    /// The bound constants in effect, resolved from any `--constants` file.
    pub constants: BoundConstants,
    pub tool_version: String,
    /// RNG seed for stochastic commands, `null` otherwise.
    pub seed: Option<u64>,
    /// `sha256:<hex>` of the exact stdout bytes.
    pub outputs_digest: String,
}

pub fn digest(output: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(output.as_bytes())))
}

impl RunManifest {
    pub fn record(request: &Request, constants: &BoundConstants, output: &str) -> Self {
        Self {
            command: request.action.command_name().to_string(),
            parameters: serde_json::to_value(request).expect("request serializes"),
            constants: constants.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: request.action.seed(),
            outputs_digest: digest(output),
        }
    }

    pub fn request(&self) -> Result<Request, serde_json::Error> {
        serde_json::from_value(self.parameters.clone())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }

    pub fn to_json_compact(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}
