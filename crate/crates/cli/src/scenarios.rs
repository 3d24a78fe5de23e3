//! Scenarios shipped with the binary.

use crate::config::{ConfigError, ScenarioConfig};

pub const BUNDLED: &[(&str, &str)] = &[
    ("bump_locality", include_str!("../scenarios/bump_locality.json")),
    ("car_suite", include_str!("../scenarios/car_suite.json")),
    ("delta_locality", include_str!("../scenarios/delta_locality.json")),
    ("lebesgue_gauge", include_str!("../scenarios/lebesgue_gauge.json")),
    ("poisson_nonlocality", include_str!("../scenarios/poisson_nonlocality.json")),
];

pub fn names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn bundled(name: &str) -> Result<ScenarioConfig, ConfigError> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| ConfigError::Invalid(format!("no bundled scenario \"{name}\" (have: {})", names().join(", "))))?;
    ScenarioConfig::from_json(text)
}
