use metgroup::ultraseq::SeqRule;
use serde_json::{json, Value};

use crate::config::{TaskId, SCHEMA_VERSION};
use crate::groups::{GROUP_TYPES, NORMS};

/// Supported group types, norm ids, sequence rules and tasks.
pub fn list_catalog() -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "group_types": GROUP_TYPES,
        "norms": NORMS.iter().map(|(id, types)| json!({"id": id, "group_types": types})).collect::<Vec<_>>(),
        "sequence_rules": SeqRule::catalog(),
        "tasks": TaskId::ALL.iter().map(|t| t.id()).collect::<Vec<_>>(),
        "direct_systems": ["sl_chain", "sym_chain"],
    })
}
