//! Run manifests: every CLI invocation records its parameters and the
//! checksums of everything it wrote, so a run can be reproduced and checked
//! byte for byte.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub kind: &'static str,
    pub tool_version: &'static str,
    pub subcommand: String,
    pub params: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// artifact name -> sha256 of its bytes; "stdout" for the primary stream.
    pub checksums: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, params: serde_json::Value, seed: Option<u64>) -> Self {
        RunManifest {
            schema_version: 1,
            kind: "run_manifest",
            tool_version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            params,
            seed,
            checksums: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, artifact: &str, bytes: &[u8]) {
        self.checksums
            .insert(artifact.to_string(), sha256_hex(bytes));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_inputs_give_identical_manifests() {
        let mut a = RunManifest::new("dim", serde_json::json!({"b": 2.0}), None);
        let mut b = RunManifest::new("dim", serde_json::json!({"b": 2.0}), None);
        a.record("stdout", b"same bytes");
        b.record("stdout", b"same bytes");
        assert_eq!(a.to_json(), b.to_json());
        let mut c = RunManifest::new("dim", serde_json::json!({"b": 2.0}), None);
        c.record("stdout", b"different bytes");
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn sha256_known_answer() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
