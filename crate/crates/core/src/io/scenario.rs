use thiserror::Error;

use crate::model::{validate, Scenario, Violation};

#[derive(Debug, Error)]
pub enum ScenarioError {
    /// Malformed JSON or a schema mismatch; `path` locates the offending
    /// field (`.` for the document root).
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("scenario failed validation:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
}

/// Parses and validates a scenario document.
pub fn parse_scenario(bytes: &[u8]) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        ScenarioError::Parse {
            path,
            message: err.into_inner().to_string(),
        }
    })?;
    let violations = validate(&scenario);
    if violations.is_empty() {
        Ok(scenario)
    } else {
        Err(ScenarioError::Invalid(violations))
    }
}

pub fn serialize_scenario(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(scenario).expect("scenario serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Topology, DEFAULT_WEIGHTS};

    const MINIMAL: &str = r#"{
        "topology": "no_coalition",
        "pus": [{"id": "pu1", "zone": [0, 0], "channels": 4, "price": 10.0, "alloc_time": 60}],
        "sus": [{"id": "su1", "zone": [1, 1], "channels_requested": 2, "arrival_time": 0}]
    }"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let s = parse_scenario(MINIMAL.as_bytes()).unwrap();
        assert_eq!(s.topology, Topology::NoCoalition);
        assert_eq!(s.weights, DEFAULT_WEIGHTS);
        assert_eq!(s.timing.latency, 10.0);
        assert_eq!(s.timing.pu_reply, 2.0);
        assert!(s.aggregation);
    }

    #[test]
    fn unnormalized_weights_accepted() {
        let doc = MINIMAL.replace("\"topology\"", "\"weights\": [0.4, 1.0, 0.6], \"topology\"");
        let s = parse_scenario(doc.as_bytes()).unwrap();
        assert_eq!(s.weights, [0.4, 1.0, 0.6]);
    }

    #[test]
    fn partial_timing_keeps_other_defaults() {
        let doc = MINIMAL.replace("\"topology\"", "\"timing\": {\"latency\": 3}, \"topology\"");
        let s = parse_scenario(doc.as_bytes()).unwrap();
        assert_eq!(s.timing.latency, 3.0);
        assert_eq!(s.timing.agg_per_demand, 5.0);
    }

    #[test]
    fn duplicate_id_lists_the_id() {
        let doc = MINIMAL.replace("\"su1\"", "\"pu1\"");
        match parse_scenario(doc.as_bytes()) {
            Err(ScenarioError::Invalid(v)) => {
                assert_eq!(v.len(), 1);
                assert!(v[0].message.contains("pu1"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_field_has_a_path() {
        let doc = MINIMAL.replace("\"price\"", "\"colour\": 1, \"price\"");
        match parse_scenario(doc.as_bytes()) {
            Err(ScenarioError::Parse { path, message }) => {
                assert!(path.starts_with("pus[0]"), "{path}");
                assert!(message.contains("colour"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(
            parse_scenario(b"{ not json"),
            Err(ScenarioError::Parse { .. })
        ));
    }
}
